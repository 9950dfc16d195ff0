//! The reduced two-degrees-of-freedom Hamiltonian
//!
//!   Hbar_C(R, G, r, g) = R^2/2 + (C - G)^2 / (2 r^2) - alpha U(r, G, g) - beta / r
//!
//! with its energy split Hbar_C = K_C(R, r) - alpha U + Ktilde_C(G, r),
//! the energy reduction R = +-sqrt(...), and Hamilton's equations.

use std::sync::Arc;

use crate::error::{Error, Result};

use super::potential::{potential_quadrature, potential_with_gradient, PotentialGradient};
use super::series::SeriesCache;
use super::{ModelParams, QuadratureSpec, ReducedState};

/// How the potential entering the dynamics is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PotentialBackend {
    /// Adaptive trapezoid quadrature of the defining integral.
    #[default]
    Quadrature,
    /// Renormalised truncated series of the given (even) order. Finite on S0,
    /// which makes it the only usable backend for data seeded there, but it is
    /// valid only inside its convergence region r < E <= 1.
    Series { order: usize },
    /// Series of the given order while the point is close to S0 from inside
    /// (r < E), quadrature elsewhere.
    Auto { order: usize },
}

/// The three addends of the energy split.
#[derive(Debug, Clone, Copy)]
pub struct SplitEnergies {
    /// K_C = R^2/2 + C^2/(2 r^2) - beta/r.
    pub k_c: f64,
    /// Ktilde_C = (G^2 - 2 C G) / (2 r^2).
    pub k_tilde: f64,
    /// alpha * U_eff with the configured convention.
    pub alpha_u: f64,
}

/// Reduced Hamiltonian system: parameters plus potential evaluation policy.
#[derive(Clone)]
pub struct ReducedSystem {
    pub params: ModelParams,
    pub quad: QuadratureSpec,
    pub backend: PotentialBackend,
    series: Option<Arc<SeriesCache>>,
}

impl ReducedSystem {
    pub fn new(params: ModelParams, quad: QuadratureSpec) -> Self {
        ReducedSystem {
            params,
            quad,
            backend: PotentialBackend::Quadrature,
            series: None,
        }
    }

    pub fn with_backend(mut self, backend: PotentialBackend) -> Self {
        if !matches!(backend, PotentialBackend::Quadrature) && self.series.is_none() {
            self.series = Some(Arc::new(SeriesCache::new(self.quad)));
        }
        self.backend = backend;
        self
    }

    pub fn with_quadrature(mut self, quad: QuadratureSpec) -> Self {
        self.quad = quad;
        self
    }

    /// Potential and gradient under the configured backend.
    pub fn potential_gradient(&self, r: f64, mom_g: f64, g: f64) -> Result<PotentialGradient> {
        match self.backend {
            PotentialBackend::Quadrature => potential_with_gradient(r, mom_g, g, &self.quad),
            PotentialBackend::Series { order } => self
                .series
                .as_ref()
                .expect("series cache initialised with backend")
                .value_and_gradient(r, mom_g, g, order),
            PotentialBackend::Auto { order } => {
                let cache = self.series.as_ref().expect("series cache initialised");
                let level = super::euler::euler_integral(r, mom_g, g)?;
                // Inside the convergence disc and near S0 the series is the
                // only finite evaluation; elsewhere quadrature wins.
                let near = level > 0.0 && r < level && (level - r) < 0.18 * level;
                if near && cache.supported(level) {
                    cache.value_and_gradient(r, mom_g, g, order)
                } else {
                    potential_with_gradient(r, mom_g, g, &self.quad)
                }
            }
        }
    }

    /// Potential value under the configured backend.
    pub fn potential(&self, r: f64, mom_g: f64, g: f64) -> Result<f64> {
        match self.backend {
            PotentialBackend::Quadrature => Ok(potential_quadrature(r, mom_g, g, &self.quad)?.u),
            _ => Ok(self.potential_gradient(r, mom_g, g)?.u),
        }
    }

    /// Effective potential entering energies (convention applied).
    fn u_eff(&self, r: f64, mom_g: f64, g: f64) -> Result<f64> {
        Ok(self.potential(r, mom_g, g)? - self.params.u_offset())
    }

    /// Hbar_C at a state.
    pub fn hamiltonian(&self, state: &ReducedState) -> Result<f64> {
        let p = &self.params;
        let u = self.u_eff(state.r, state.mom_g, state.g)?;
        Ok(state.mom_r * state.mom_r / 2.0
            + (p.cee - state.mom_g).powi(2) / (2.0 * state.r * state.r)
            - p.alpha * u
            - p.beta / state.r)
    }

    /// The three addends whose sum is the Hamiltonian.
    pub fn split_energies(&self, state: &ReducedState) -> Result<SplitEnergies> {
        let p = &self.params;
        let r2 = state.r * state.r;
        let u = self.u_eff(state.r, state.mom_g, state.g)?;
        Ok(SplitEnergies {
            k_c: state.mom_r * state.mom_r / 2.0 + p.cee * p.cee / (2.0 * r2)
                - p.beta / state.r,
            k_tilde: (state.mom_g * state.mom_g - 2.0 * p.cee * state.mom_g) / (2.0 * r2),
            alpha_u: p.alpha * u,
        })
    }

    /// Recover the radial momentum on a fixed energy level.
    pub fn mom_r_from_energy(
        &self,
        energy: f64,
        r: f64,
        mom_g: f64,
        g: f64,
        sign: f64,
    ) -> Result<f64> {
        let p = &self.params;
        let u = self.u_eff(r, mom_g, g)?;
        let radicand = 2.0
            * (energy + p.alpha * u - (p.cee - mom_g).powi(2) / (2.0 * r * r) + p.beta / r);
        if radicand < 0.0 {
            return Err(Error::ForbiddenRegion { radicand });
        }
        Ok(sign.signum() * radicand.sqrt())
    }

    /// Hamilton's equations, d(R, G, r, g)/dt. The additive convention does
    /// not enter: a constant shift of U has zero gradient.
    pub fn vector_field(&self, state: &ReducedState) -> Result<[f64; 4]> {
        let p = &self.params;
        let grad = self.potential_gradient(state.r, state.mom_g, state.g)?;
        let r = state.r;
        let cg = p.cee - state.mom_g;
        Ok([
            // Rdot = -dH/dr
            cg * cg / (r * r * r) + p.alpha * grad.du_dr - p.beta / (r * r),
            // Gdot = -dH/dg
            p.alpha * grad.du_dg,
            // rdot = dH/dR
            state.mom_r,
            // gdot = dH/dG
            -cg / (r * r) - p.alpha * grad.du_dgg,
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::UConvention;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn example2() -> ReducedSystem {
        let params = ModelParams::new(50.0, 20.0, 1.6).unwrap();
        ReducedSystem::new(params, QuadratureSpec::default())
    }

    fn example1() -> ReducedSystem {
        let params = ModelParams::new(100.0, 120.0, 10.0).unwrap();
        ReducedSystem::new(params, QuadratureSpec::default())
    }

    /// The published periodic datum, to the precision of the error-control
    /// section (the tabulated (-11.367, 0.993, 0.132, 2.759) is its display
    /// rounding and does not itself sit on the -76.887 level).
    fn gamma_s_datum() -> ReducedState {
        ReducedState::new(-11.3668, 0.992515, 0.13165, 0.878179 * PI).unwrap()
    }

    #[test]
    fn energy_level_of_the_elliptic_datum() {
        let sys = example2();
        let h = sys.hamiltonian(&gamma_s_datum()).unwrap();
        assert_relative_eq!(h, -76.887, epsilon = 1e-2);
        // U-independent part at the tabulated display datum.
        let s = ReducedState::new(-11.367, 0.993, 0.132, 2.759).unwrap();
        let indep = s.mom_r * s.mom_r / 2.0 + (1.6 - s.mom_g).powi(2) / (2.0 * s.r * s.r)
            - 20.0 / s.r;
        assert_relative_eq!(indep, -76.34, epsilon = 1e-2);
    }

    #[test]
    fn full_convention_shifts_by_alpha() {
        let sys = example2();
        let full = example2().params.with_convention(UConvention::Full);
        let sys_full = ReducedSystem::new(full, QuadratureSpec::default());
        let s = gamma_s_datum();
        let a = sys.hamiltonian(&s).unwrap();
        let b = sys_full.hamiltonian(&s).unwrap();
        assert_relative_eq!(b, a - 50.0, epsilon = 1e-10);
    }

    #[test]
    fn reflection_symmetry_of_the_energy() {
        let sys = example2();
        for &(mom_r, mom_g, r, g) in &[(0.3, 0.4, 0.3, 1.1), (-2.0, -0.2, 0.8, 2.9)] {
            let a = sys
                .hamiltonian(&ReducedState::new(mom_r, mom_g, r, g).unwrap())
                .unwrap();
            let b = sys
                .hamiltonian(&ReducedState::new(mom_r, mom_g, r, std::f64::consts::TAU - g).unwrap())
                .unwrap();
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn split_at_the_kepler_minimum() {
        // Example 1 parameters: K_C attains -beta^2/(2 C^2) = -72 at
        // R = 0, r = C^2/beta = 0.8333...
        let sys = example1();
        let r = 100.0 / 120.0;
        let s = ReducedState::new(0.0, 0.0, r, PI).unwrap();
        let split = sys.split_energies(&s).unwrap();
        assert_relative_eq!(split.k_c, -72.0, epsilon = 1e-10);
        assert_relative_eq!(split.k_tilde, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn split_sums_to_the_hamiltonian() {
        let sys = example2();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut tested = 0;
        while tested < 100 {
            let s = ReducedState::new(
                rng.gen_range(-12.0..12.0),
                rng.gen_range(-0.99..0.99),
                rng.gen_range(0.05..1.8),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
            .unwrap();
            let sd = crate::model::singularity_distance(s.r, s.mom_g, s.g);
            if sd.on_singular_branch && sd.gap < 5e-2 {
                continue;
            }
            let split = sys.split_energies(&s).unwrap();
            let h = sys.hamiltonian(&s).unwrap();
            let sum = split.k_c - split.alpha_u + split.k_tilde;
            assert_relative_eq!(sum, h, epsilon = 1e-12, max_relative = 1e-12);
            tested += 1;
        }
    }

    #[test]
    fn energy_reduction_round_trip() {
        let sys = example2();
        let s = gamma_s_datum();
        let h = sys.hamiltonian(&s).unwrap();
        let back = sys
            .mom_r_from_energy(h, s.r, s.mom_g, s.g, s.mom_r.signum())
            .unwrap();
        assert_relative_eq!(back, s.mom_r, epsilon = 1e-10);
        // Zero radicand gives R = 0 for both signs.
        let level = sys
            .hamiltonian(&ReducedState::new(0.0, s.mom_g, s.r, s.g).unwrap())
            .unwrap();
        let zero = sys.mom_r_from_energy(level, s.r, s.mom_g, s.g, -1.0).unwrap();
        assert_relative_eq!(zero, 0.0, epsilon = 1e-7);
        // Forbidden region reported with the radicand.
        let err = sys.mom_r_from_energy(-1000.0, s.r, s.mom_g, s.g, 1.0);
        assert!(matches!(err, Err(Error::ForbiddenRegion { .. })));
    }

    #[test]
    fn paper_datum_radial_momentum() {
        // R recovered from the fixed energy level at the elliptic datum.
        let sys = example2();
        let s = gamma_s_datum();
        let r_mom = sys
            .mom_r_from_energy(-76.887, s.r, s.mom_g, s.g, -1.0)
            .unwrap();
        assert_relative_eq!(r_mom, -11.367, epsilon = 1e-2);
    }

    #[test]
    fn field_is_minus_j_grad_h() {
        let sys = example2();
        let h = 1e-6;
        for &(mom_r, mom_g, r, g) in &[
            (-11.3668, 0.992515, 0.13165, 0.878179 * PI),
            (2.0, 0.3, 0.5, 4.0),
            (0.0, -0.4, 1.1, 1.0),
        ] {
            let s = ReducedState::new(mom_r, mom_g, r, g).unwrap();
            let f = sys.vector_field(&s).unwrap();
            let ham = |st: [f64; 4]| {
                sys.hamiltonian(&ReducedState {
                    mom_r: st[0],
                    mom_g: st[1],
                    r: st[2],
                    g: st[3],
                })
                .unwrap()
            };
            let y = s.to_array();
            let mut fd = [0.0; 4];
            for i in 0..4 {
                let mut yp = y;
                let mut ym = y;
                yp[i] += h;
                ym[i] -= h;
                fd[i] = (ham(yp) - ham(ym)) / (2.0 * h);
            }
            // (Rdot, Gdot, rdot, gdot) = (-dH/dr, -dH/dg, dH/dR, dH/dG)
            assert_relative_eq!(f[0], -fd[2], max_relative = 1e-5, epsilon = 1e-6);
            assert_relative_eq!(f[1], -fd[3], max_relative = 1e-5, epsilon = 1e-6);
            assert_relative_eq!(f[2], fd[0], max_relative = 1e-5, epsilon = 1e-6);
            assert_relative_eq!(f[3], fd[1], max_relative = 1e-5, epsilon = 1e-6);
        }
    }

    #[test]
    fn angular_momentum_frozen_on_the_symmetry_axis() {
        let sys = example2();
        for g in [0.0, PI] {
            let s = ReducedState::new(1.0, 0.4, 0.6, g).unwrap();
            let f = sys.vector_field(&s).unwrap();
            assert!(f[1].abs() < 1e-10, "Gdot = {} at g = {g}", f[1]);
        }
    }

    #[test]
    fn series_backend_field_is_finite_on_s0() {
        let params = ModelParams::new(100.0, 120.0, 10.0).unwrap();
        let sys = ReducedSystem::new(params, QuadratureSpec::default())
            .with_backend(PotentialBackend::Series { order: 20 });
        // The Example-1 saddle datum sits exactly on S0.
        let s = ReducedState::new(0.0, 0.0, 0.8333333333333334, PI).unwrap();
        let f = sys.vector_field(&s).unwrap();
        assert!(f.iter().all(|v| v.is_finite()));
    }
}
