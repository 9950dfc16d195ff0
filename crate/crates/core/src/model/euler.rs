//! The Euler integral E(r, G, g) = G^2 - r sqrt(1 - G^2) cos g and its level
//! sets. E is the conserved quantity of the two-fixed-centres problem; here it
//! serves as a quasi-integral of the averaged flow.

use crate::error::{Error, Result};

/// E(r, G, g) = G^2 - r sqrt(1 - G^2) cos g.
pub fn euler_integral(r: f64, mom_g: f64, g: f64) -> Result<f64> {
    if mom_g.abs() > 1.0 {
        return Err(Error::domain(format!("|G| must not exceed 1: G = {mom_g}")));
    }
    Ok(mom_g * mom_g - r * (1.0 - mom_g * mom_g).sqrt() * g.cos())
}

/// Partial derivatives of the Euler integral.
#[derive(Debug, Clone, Copy)]
pub struct EulerGradient {
    pub d_r: f64,
    pub d_mom_g: f64,
    pub d_g: f64,
}

/// Gradient of E; the G-derivative diverges at |G| = 1.
pub fn euler_gradient(r: f64, mom_g: f64, g: f64) -> Result<EulerGradient> {
    if mom_g.abs() >= 1.0 {
        return Err(Error::SingularDerivative { g_mom: mom_g });
    }
    let e = (1.0 - mom_g * mom_g).sqrt();
    Ok(EulerGradient {
        d_r: -e * g.cos(),
        d_mom_g: 2.0 * mom_g + r * mom_g * g.cos() / e,
        d_g: r * e * g.sin(),
    })
}

/// Ordered polyline sampling of the level curve S(r, level) in the (g, G) plane.
#[derive(Debug, Clone, Default)]
pub struct LevelCurve {
    /// Points (g, G) satisfying the level equation, ordered by g.
    pub points: Vec<(f64, f64)>,
    /// Number of g-samples with no admissible G root.
    pub skipped: usize,
}

/// Solve the level curve S(r, level) = {(G, g) : E(r, G, g) = level}.
///
/// For each sampled g the level equation is reduced to the quadratic
/// (G^2)^2 + (r^2 cos^2 g - 2 level) G^2 + (level^2 - r^2 cos^2 g) = 0 in G^2;
/// roots are kept when they lie in [0, 1] and reproduce the level (the
/// squaring step introduces spurious roots). The branch continuous from g = 0
/// is listed first; positive-G representatives are returned.
pub fn level_curve(r: f64, level: f64, n_points: usize) -> Result<LevelCurve> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("r must be positive (got {r})")));
    }
    if n_points < 2 {
        return Err(Error::domain("n_points must be at least 2"));
    }
    let mut curve = LevelCurve::default();
    for i in 0..n_points {
        let g = std::f64::consts::TAU * (i as f64) / (n_points as f64);
        let mut added = false;
        for root in g_squared_roots(r, level, g) {
            if !(0.0..=1.0).contains(&root) {
                continue;
            }
            let mom_g = root.sqrt();
            let e_val = euler_integral(r, mom_g, g)?;
            if (e_val - level).abs() <= 1e-12 * (1.0 + level.abs()) {
                curve.points.push((g, mom_g));
                added = true;
            }
        }
        if !added {
            curve.skipped += 1;
        }
    }
    if curve.points.is_empty() {
        return Err(Error::EmptySet(format!(
            "level set E = {level} empty for r = {r} over the sampled g grid"
        )));
    }
    curve
        .points
        .sort_by(|a, b| a.partial_cmp(b).expect("finite level-curve points"));
    Ok(curve)
}

/// Both roots of the quadratic in G^2, smaller first.
fn g_squared_roots(r: f64, level: f64, g: f64) -> [f64; 2] {
    let c2 = (r * g.cos()).powi(2);
    let b = c2 - 2.0 * level;
    let c = level * level - c2;
    let disc = (b * b - 4.0 * c).max(0.0);
    let sq = disc.sqrt();
    // Stable form: avoid cancellation for the smaller root.
    let q = -0.5 * (b + b.signum() * sq);
    let (u1, u2) = if b == 0.0 {
        (-0.5 * sq, 0.5 * sq)
    } else {
        (q, c / q)
    };
    if u1 <= u2 {
        [u1, u2]
    } else {
        [u2, u1]
    }
}

/// Solve E(r, G, g) = level for G >= 0 at a single angle g.
///
/// Returns every admissible non-negative root, deduplicated, in increasing
/// order.
pub fn g_roots_on_level(r: f64, level: f64, g: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for root in g_squared_roots(r, level, g) {
        if !(-1e-14..=1.0 + 1e-14).contains(&root) {
            continue;
        }
        let mom_g = root.clamp(0.0, 1.0).sqrt();
        if let Ok(e_val) = euler_integral(r, mom_g, g) {
            if (e_val - level).abs() <= 1e-10 * (1.0 + level.abs()) {
                out.push(mom_g);
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn value_at_the_saddle_family() {
        // On S0 the level equals r; the saddle of M(E) sits at (E, 0, pi).
        assert_relative_eq!(euler_integral(0.2, 0.0, PI).unwrap(), 0.2, epsilon = 1e-15);
        for level in [0.1, 0.5, 1.3, 1.9] {
            assert_relative_eq!(euler_integral(level, 0.0, PI).unwrap(), level, epsilon = 1e-15);
        }
    }

    #[test]
    fn value_at_circular_inner_orbit() {
        for (r, g) in [(0.3, 1.0), (2.5, 4.0), (0.01, 0.0)] {
            assert_relative_eq!(euler_integral(r, 1.0, g).unwrap(), 1.0, epsilon = 1e-15);
            assert_relative_eq!(euler_integral(r, -1.0, g).unwrap(), 1.0, epsilon = 1e-15);
        }
        assert_relative_eq!(euler_integral(1.0, 0.5, PI / 2.0).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn rejects_g_outside_unit_interval() {
        assert!(euler_integral(0.2, 1.0 + 1e-12, 0.0).is_err());
        assert!(euler_gradient(0.2, 1.0, 0.0).is_err());
    }

    #[test]
    fn gradient_vanishes_in_g_and_mom_g_at_the_saddle() {
        let grad = euler_gradient(0.7, 0.0, PI).unwrap();
        assert_relative_eq!(grad.d_r, 1.0, epsilon = 1e-15);
        assert_relative_eq!(grad.d_mom_g, 0.0, epsilon = 1e-15);
        assert_relative_eq!(grad.d_g, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn gradient_g_component_vanishes_at_the_maxima() {
        // Case (a) maxima at (pi, +-sqrt(1 - r^2/4)).
        let r: f64 = 0.6;
        let gm = (1.0 - r * r / 4.0).sqrt();
        let grad = euler_gradient(r, gm, PI).unwrap();
        assert_relative_eq!(grad.d_mom_g, 0.0, epsilon = 1e-12);
        let grad = euler_gradient(r, -gm, PI).unwrap();
        assert_relative_eq!(grad.d_mom_g, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let h = 1e-6;
        for &(r, mom_g, g) in &[(0.3, 0.2, 1.0), (0.9, -0.7, 4.2), (1.7, 0.5, 2.0)] {
            let grad = euler_gradient(r, mom_g, g).unwrap();
            let fd_r = (euler_integral(r + h, mom_g, g).unwrap()
                - euler_integral(r - h, mom_g, g).unwrap())
                / (2.0 * h);
            let fd_gg = (euler_integral(r, mom_g + h, g).unwrap()
                - euler_integral(r, mom_g - h, g).unwrap())
                / (2.0 * h);
            let fd_g = (euler_integral(r, mom_g, g + h).unwrap()
                - euler_integral(r, mom_g, g - h).unwrap())
                / (2.0 * h);
            assert_relative_eq!(grad.d_r, fd_r, max_relative = 1e-6, epsilon = 1e-9);
            assert_relative_eq!(grad.d_mom_g, fd_gg, max_relative = 1e-6, epsilon = 1e-9);
            assert_relative_eq!(grad.d_g, fd_g, max_relative = 1e-6, epsilon = 1e-9);
        }
    }

    #[test]
    fn level_curve_s1_passes_through_circular_points() {
        let curve = level_curve(0.6, 1.0, 400).unwrap();
        // S1 passes through (g, G) = (pi/2, 1).
        let hit = curve
            .points
            .iter()
            .any(|&(g, gg)| (g - PI / 2.0).abs() < 0.02 && (gg - 1.0).abs() < 1e-3);
        assert!(hit, "S1 should pass through (pi/2, 1)");
    }

    #[test]
    fn level_curve_s0_passes_through_the_saddle() {
        let curve = level_curve(0.6, 0.6, 401).unwrap();
        let hit = curve
            .points
            .iter()
            .any(|&(g, gg)| (g - PI).abs() < 0.02 && gg.abs() < 0.03);
        assert!(hit, "S0 should pass through (pi, 0)");
    }

    #[test]
    fn level_curve_points_satisfy_the_level_equation() {
        let level = 0.7;
        let curve = level_curve(0.25, level, 257).unwrap();
        for &(g, mom_g) in &curve.points {
            let e_val = euler_integral(0.25, mom_g, g).unwrap();
            assert!((e_val - level).abs() <= 1e-12, "off-level point ({g}, {mom_g})");
        }
    }

    #[test]
    fn empty_level_reported() {
        // E cannot reach 5 for r = 0.1 (max is 1 + r^2/4).
        assert!(matches!(level_curve(0.1, 5.0, 64), Err(Error::EmptySet(_))));
    }
}
