//! Scalar fields of the reduced problem: the Euler integral E, the averaged
//! potential U (quadrature and renormalised series), the two-degrees-of-freedom
//! Hamiltonian and its energy split, and the geometry of the singular set S0.

mod euler;
mod hamiltonian;
mod potential;
mod series;

pub use euler::{
    euler_gradient, euler_integral, g_roots_on_level, level_curve, EulerGradient, LevelCurve,
};
pub use hamiltonian::{PotentialBackend, ReducedSystem, SplitEnergies};
pub use potential::{
    potential_fixed_nodes, potential_on_level, potential_quadrature, potential_with_gradient,
    singularity_distance, PotentialGradient, PotentialValue, SingularityDistance, DEGRADED_GAP,
};
pub use series::{potential_series, series_coefficients, SeriesCache};

use crate::error::{Error, Result};

/// Convention for how the averaged potential enters energies.
///
/// The r^0 term of U is the constant 1 (the exact mean of 1/|x| over the mean
/// anomaly), which is dynamically inert. `Renormalized` uses U - 1, which is
/// the convention that reconciles the published energy levels with the
/// published state data; `Full` uses U as defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UConvention {
    Full,
    #[default]
    Renormalized,
}

/// Mass parameters of the reduced Hamiltonian plus the potential convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Coupling of the averaged potential.
    pub alpha: f64,
    /// Coupling of the outer Kepler term.
    pub beta: f64,
    /// Total angular momentum C.
    pub cee: f64,
    pub u_convention: UConvention,
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64, cee: f64) -> Result<Self> {
        if !(alpha > 0.0) || !(beta > 0.0) || !(cee > 0.0) {
            return Err(Error::domain(format!(
                "alpha, beta, C must be positive (got {alpha}, {beta}, {cee})"
            )));
        }
        Ok(ModelParams {
            alpha,
            beta,
            cee,
            u_convention: UConvention::default(),
        })
    }

    pub fn with_convention(mut self, u_convention: UConvention) -> Self {
        self.u_convention = u_convention;
        self
    }

    /// Constant subtracted from U when evaluating energies.
    pub fn u_offset(&self) -> f64 {
        match self.u_convention {
            UConvention::Full => 0.0,
            UConvention::Renormalized => 1.0,
        }
    }
}

/// Physical masses (kappa, mu) and the derived couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyMasses {
    pub kappa: f64,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// Derive (alpha, beta, gamma, delta) from the masses (kappa, mu).
pub fn params_from_masses(kappa: f64, mu: f64) -> Result<BodyMasses> {
    if !(kappa > 0.0 && kappa < 1.0) || !(mu > 0.0 && mu < 1.0) {
        return Err(Error::domain(format!(
            "masses must lie in (0, 1): kappa = {kappa}, mu = {mu}"
        )));
    }
    let sum = kappa + mu;
    Ok(BodyMasses {
        kappa,
        mu,
        alpha: sum / (kappa * mu * (mu + 1.0)),
        beta: sum / (kappa * kappa * (mu + 1.0)),
        gamma: 1.0 / (mu + 1.0),
        delta: kappa * (mu + 1.0) / sum,
    })
}

/// Phase point of the reduced Hamiltonian, Lambda = 1 normalisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    /// Radial momentum R.
    pub mom_r: f64,
    /// Inner angular momentum G, |G| <= 1.
    pub mom_g: f64,
    /// Outer radius r > 0.
    pub r: f64,
    /// Perihelion angle g, radians.
    pub g: f64,
}

impl ReducedState {
    pub fn new(mom_r: f64, mom_g: f64, r: f64, g: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::domain(format!("outer radius must be positive: r = {r}")));
        }
        if mom_g.abs() > 1.0 {
            return Err(Error::domain(format!("|G| must not exceed 1: G = {mom_g}")));
        }
        Ok(ReducedState {
            mom_r,
            mom_g,
            r,
            g: wrap_angle(g),
        })
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.mom_r, self.mom_g, self.r, self.g]
    }

    pub fn from_array(y: [f64; 4]) -> Self {
        ReducedState {
            mom_r: y[0],
            mom_g: y[1],
            r: y[2],
            g: y[3],
        }
    }
}

/// Euler-integral level, written calligraphic-E in the tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerLevel(pub f64);

/// Node-doubling control for the trapezoid quadrature of U.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Starting node count, a power of two, at least 16.
    pub initial_nodes: usize,
    /// Node cap, a power of two.
    pub max_nodes: usize,
    /// Relative tolerance on successive refinements.
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            initial_nodes: 64,
            max_nodes: 1 << 20,
            rel_tol: 1e-12,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.initial_nodes < 16 || !self.initial_nodes.is_power_of_two() {
            return Err(Error::domain(format!(
                "initial_nodes must be a power of two >= 16 (got {})",
                self.initial_nodes
            )));
        }
        if self.max_nodes < self.initial_nodes || !self.max_nodes.is_power_of_two() {
            return Err(Error::domain(format!(
                "max_nodes must be a power of two >= initial_nodes (got {})",
                self.max_nodes
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::domain("rel_tol must be positive"));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

/// Wrap an angle to [0, 2*pi).
pub fn wrap_angle(g: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let w = g.rem_euclid(two_pi);
    if w == two_pi {
        0.0
    } else {
        w
    }
}

/// Signed angular difference a - b wrapped to (-pi, pi].
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let two_pi = std::f64::consts::TAU;
    let d = (a - b).rem_euclid(two_pi);
    if d > pi {
        d - two_pi
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn masses_of_example_2_give_alpha_50_beta_20() {
        let m = params_from_masses(0.06814254, 0.02725702).unwrap();
        assert_relative_eq!(m.alpha, 50.0, max_relative = 1e-4);
        assert_relative_eq!(m.beta, 20.0, max_relative = 1e-4);
    }

    #[test]
    fn masses_of_example_1_give_alpha_100_beta_120() {
        // The published (kappa, mu) for this example are rounded; they
        // reproduce (100, 120) only to about 1%.
        let m = params_from_masses(0.01787503, 0.02153618).unwrap();
        assert_relative_eq!(m.alpha, 100.0, max_relative = 1e-2);
        assert_relative_eq!(m.beta, 120.0, max_relative = 1e-2);
    }

    #[test]
    fn equal_masses_satisfy_all_four_formulas() {
        let m = 0.3;
        let b = params_from_masses(m, m).unwrap();
        let sum = 2.0 * m;
        assert_relative_eq!(b.alpha, sum / (m * m * (m + 1.0)), epsilon = 1e-15);
        assert_relative_eq!(b.beta, sum / (m * m * (m + 1.0)), epsilon = 1e-15);
        assert_relative_eq!(b.gamma, 1.0 / (m + 1.0), epsilon = 1e-15);
        assert_relative_eq!(b.delta, m * (m + 1.0) / sum, epsilon = 1e-15);
    }

    #[test]
    fn out_of_range_masses_rejected() {
        assert!(params_from_masses(0.0, 0.5).is_err());
        assert!(params_from_masses(0.5, 1.0).is_err());
        assert!(params_from_masses(-0.1, 0.5).is_err());
    }

    #[test]
    fn angle_helpers() {
        assert_relative_eq!(wrap_angle(-0.1), std::f64::consts::TAU - 0.1);
        assert_relative_eq!(angle_diff(0.1, 6.2), 0.1 - 6.2 + std::f64::consts::TAU);
        assert_relative_eq!(angle_diff(3.0, 1.0), 2.0);
    }
}
