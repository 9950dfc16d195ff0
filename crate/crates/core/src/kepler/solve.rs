//! Kepler's equation xi - e sin xi = ell, solved by safeguarded Newton with a
//! bisection fallback; robust up to e close to 1.

use crate::error::{Error, Result};

pub fn solve_kepler(ell: f64, e: f64, tol: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::domain(format!("eccentricity must lie in [0, 1) (got {e})")));
    }
    if e == 0.0 {
        return Ok(ell);
    }
    // Reduce to the principal interval and restore the branch at the end.
    let two_pi = std::f64::consts::TAU;
    let turns = (ell / two_pi).floor();
    let m = ell - turns * two_pi;

    // xi - e sin xi is increasing, so [m - e, m + e] brackets the root.
    let mut lo = m - e;
    let mut hi = m + e;
    let mut xi = m + e * m.sin();
    for _ in 0..50 {
        let f = xi - e * xi.sin() - m;
        if f.abs() <= tol {
            return Ok(xi + turns * two_pi);
        }
        if f > 0.0 {
            hi = xi;
        } else {
            lo = xi;
        }
        let df = 1.0 - e * xi.cos();
        let newton = xi - f / df;
        xi = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    let f = xi - e * xi.sin() - m;
    if f.abs() <= tol.max(1e-12) {
        Ok(xi + turns * two_pi)
    } else {
        Err(Error::domain(format!(
            "Kepler equation stalled at residual {f:.3e} (ell = {ell}, e = {e})"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn fixed_points_of_the_equation() {
        for e in [0.0, 0.3, 0.9, 0.999] {
            assert_relative_eq!(solve_kepler(0.0, e, 1e-14).unwrap(), 0.0, epsilon = 1e-14);
            assert_relative_eq!(solve_kepler(PI, e, 1e-14).unwrap(), PI, epsilon = 1e-13);
        }
    }

    #[test]
    fn circular_case_is_identity() {
        for ell in [0.1, 2.0, 5.5, -3.0, 12.0] {
            assert_relative_eq!(solve_kepler(ell, 0.0, 1e-14).unwrap(), ell);
        }
    }

    #[test]
    fn residual_below_tolerance() {
        for &e in &[0.1, 0.5, 0.9, 0.99, 0.999999] {
            for k in 0..40 {
                let ell = -7.0 + 0.37 * k as f64;
                let xi = solve_kepler(ell, e, 1e-14).unwrap();
                assert!(
                    (xi - e * xi.sin() - ell).abs() <= 2e-13,
                    "residual too large at e = {e}, ell = {ell}"
                );
            }
        }
    }

    #[test]
    fn hyperbolic_input_rejected() {
        assert!(solve_kepler(1.0, 1.0, 1e-14).is_err());
        assert!(solve_kepler(1.0, 1.5, 1e-14).is_err());
    }
}
