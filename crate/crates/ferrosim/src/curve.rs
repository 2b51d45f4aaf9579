//! Sampled x/y curves shared by device sweeps and analysis extraction.

use crate::units::fmt_sig;
use std::io::Write;

/// A sampled curve, points in sweep order (x need not be monotone).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Curve {
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    /// Linear interpolation of y at `x`, assuming x-montone points.
    /// Clamps outside the sampled range.
    pub fn y_at(&self, x: f64) -> f64 {
        assert!(!self.points.is_empty());
        let asc = self.points.last().unwrap().0 >= self.points[0].0;
        let mut pts: Vec<(f64, f64)> = self.points.clone();
        if !asc {
            pts.reverse();
        }
        if x <= pts[0].0 {
            return pts[0].1;
        }
        if x >= pts[pts.len() - 1].0 {
            return pts[pts.len() - 1].1;
        }
        for w in pts.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if x >= x0.min(x1) && x <= x0.max(x1) && x1 != x0 {
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            }
        }
        pts[pts.len() - 1].1
    }

    /// First crossing of `y = level` in sweep order, linearly interpolated.
    pub fn first_crossing(&self, level: f64) -> Option<f64> {
        for w in self.points.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if (y0 - level) * (y1 - level) <= 0.0 && y0 != y1 {
                return Some(x0 + (x1 - x0) * (level - y0) / (y1 - y0));
            }
        }
        None
    }

    /// Writes the curve as a two-column CSV with the given header names.
    pub fn write_csv<W: Write>(&self, w: &mut W, xname: &str, yname: &str) -> std::io::Result<()> {
        writeln!(w, "{xname},{yname}")?;
        for (x, y) in &self.points {
            writeln!(w, "{},{}", fmt_sig(*x, 9), fmt_sig(*y, 9))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_and_crossing() {
        let c = Curve::new(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)]);
        assert_eq!(c.y_at(0.5), 1.0);
        assert_eq!(c.first_crossing(1.0), Some(0.5));
        let rev = Curve::new(vec![(2.0, 0.0), (1.0, 2.0), (0.0, 0.0)]);
        assert_eq!(rev.y_at(1.5), 1.0);
    }
}
