//! Dense LU solve with partial pivoting. Cell-scale systems stay under a
//! few dozen unknowns, so dense direct factorization is the right tool.

const PIVOT_TOL: f64 = 1e-13;

/// Solves `a * x = b` in place; `b` becomes the solution.
/// Returns false if a pivot collapses (singular system).
pub fn solve_in_place(a: &mut [Vec<f64>], b: &mut [f64]) -> bool {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    for col in 0..n {
        // partial pivot
        let mut pivot_row = col;
        let mut pivot_mag = a[col][col].abs();
        for row in col + 1..n {
            let mag = a[row][col].abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if pivot_mag < PIVOT_TOL {
            return false;
        }
        if pivot_row != col {
            a.swap(col, pivot_row);
            b.swap(col, pivot_row);
        }
        let pivot = a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    // back substitution
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * b[k];
        }
        b[col] = acc / a[col][col];
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let mut a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let mut b = vec![3.0, 5.0];
        assert!(solve_in_place(&mut a, &mut b));
        assert!((b[0] - 0.8).abs() < 1e-12);
        assert!((b[1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn reports_singularity() {
        let mut a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        let mut b = vec![1.0, 2.0];
        assert!(!solve_in_place(&mut a, &mut b));
    }
}
