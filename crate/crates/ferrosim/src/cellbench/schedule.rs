//! Piecewise-linear bias programs for one cell operation.

use thiserror::Error;

/// Minimum ramp for any rail value change; no instantaneous jumps.
pub const MIN_RAMP: f64 = 10e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RailBias {
    /// Keep the rail at its current value.
    Hold,
    /// Ramp linearly to the target across the phase.
    RampTo(f64),
}

/// One schedule phase: a duration and a bias motion per rail
/// (vdd, wl, bl, blb).
#[derive(Debug, Clone)]
pub struct Phase {
    pub duration: f64,
    pub rails: [RailBias; 4],
}

impl Phase {
    pub fn hold(duration: f64) -> Self {
        Self { duration, rails: [RailBias::Hold; 4] }
    }

    pub fn ramp(duration: f64, vdd: RailBias, wl: RailBias, bl: RailBias, blb: RailBias) -> Self {
        Self { duration, rails: [vdd, wl, bl, blb] }
    }
}

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("phase {0} has non-positive duration")]
    BadDuration(usize),
    #[error("phase {0} changes a rail by {1:.3} V in under the minimum {MIN_RAMP:.0e} s ramp")]
    TooFast(usize, f64),
}

/// An executable bias program: starting rail values plus phases. Compiles
/// to one global PWL per rail; construction validates continuity (every
/// value change is a ramp of at least [`MIN_RAMP`]).
#[derive(Debug, Clone)]
pub struct OperationSchedule {
    pub start: [f64; 4],
    pub phases: Vec<Phase>,
}

impl OperationSchedule {
    pub fn new(start: [f64; 4], phases: Vec<Phase>) -> Result<Self, ScheduleError> {
        let s = Self { start, phases };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), ScheduleError> {
        let mut level = self.start;
        for (i, ph) in self.phases.iter().enumerate() {
            if !(ph.duration > 0.0) {
                return Err(ScheduleError::BadDuration(i));
            }
            for (r, bias) in ph.rails.iter().enumerate() {
                if let RailBias::RampTo(v) = bias {
                    let dv = (v - level[r]).abs();
                    if dv > 1e-12 && ph.duration < MIN_RAMP {
                        return Err(ScheduleError::TooFast(i, dv));
                    }
                    level[r] = *v;
                }
            }
        }
        Ok(())
    }

    pub fn total_duration(&self) -> f64 {
        self.phases.iter().map(|p| p.duration).sum()
    }

    /// Final rail values after all phases.
    pub fn final_levels(&self) -> [f64; 4] {
        let mut level = self.start;
        for ph in &self.phases {
            for (r, bias) in ph.rails.iter().enumerate() {
                if let RailBias::RampTo(v) = bias {
                    level[r] = *v;
                }
            }
        }
        level
    }

    /// Global PWL knots for one rail (0 = vdd, 1 = wl, 2 = bl, 3 = blb).
    pub fn rail_pwl(&self, rail: usize) -> Vec<(f64, f64)> {
        let mut pts = vec![(0.0, self.start[rail])];
        let mut t = 0.0;
        let mut level = self.start[rail];
        for ph in &self.phases {
            t += ph.duration;
            if let RailBias::RampTo(v) = ph.rails[rail] {
                level = v;
            }
            pts.push((t, level));
        }
        // drop redundant middle knots on flat stretches
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
        for p in pts {
            if out.len() >= 2 {
                let a = out[out.len() - 2];
                let b = out[out.len() - 1];
                if (a.1 - b.1).abs() < 1e-15 && (b.1 - p.1).abs() < 1e-15 {
                    out.pop();
                }
            }
            out.push(p);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continuity_enforced() {
        // a 1 ps "ramp" that moves a rail 4.5 V is rejected
        let err = OperationSchedule::new(
            [0.0; 4],
            vec![Phase::ramp(
                1e-12,
                RailBias::RampTo(4.5),
                RailBias::Hold,
                RailBias::Hold,
                RailBias::Hold,
            )],
        );
        assert!(matches!(err, Err(ScheduleError::TooFast(0, _))));
    }

    #[test]
    fn pwl_compilation() {
        let s = OperationSchedule::new(
            [1.0, 0.0, 1.0, 1.0],
            vec![
                Phase::ramp(
                    1e-9,
                    RailBias::RampTo(4.5),
                    RailBias::RampTo(5.5),
                    RailBias::RampTo(4.5),
                    RailBias::RampTo(0.0),
                ),
                Phase::hold(10e-9),
                Phase::ramp(1e-9, RailBias::Hold, RailBias::RampTo(0.0), RailBias::Hold, RailBias::Hold),
            ],
        )
        .unwrap();
        assert!((s.total_duration() - 12e-9).abs() < 1e-21);
        let vdd = s.rail_pwl(0);
        assert_eq!(vdd.first().unwrap().1, 1.0);
        assert_eq!(vdd.last().unwrap().1, 4.5);
        let wl = s.rail_pwl(1);
        let (t_end, v_end) = *wl.last().unwrap();
        assert!((t_end - 12e-9).abs() < 1e-21 && v_end == 0.0);
        assert_eq!(s.final_levels(), [4.5, 0.0, 4.5, 0.0]);
    }
}
