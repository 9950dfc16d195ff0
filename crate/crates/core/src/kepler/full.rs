//! The planar four-degrees-of-freedom Hamiltonian
//!
//!   H_3b = |y|^2/2 - 1/|x| + delta (|y'|^2/2 - alpha/|x - x'| - beta/|x'| + gamma y.y')
//!
//! and its canonical equations, integrated in the flat layout [y', y, x', x].

use crate::error::{Error, Result};
use crate::flow::VectorField;
use crate::model::BodyMasses;

use super::{dot, norm, CartesianState};

/// Value of the full Hamiltonian.
pub fn full_hamiltonian(cs: &CartesianState, masses: &BodyMasses) -> Result<f64> {
    cs.check_off_collision()?;
    let dx = [cs.x[0] - cs.x_prime[0], cs.x[1] - cs.x_prime[1]];
    Ok(0.5 * dot(cs.y, cs.y) - 1.0 / norm(cs.x)
        + masses.delta
            * (0.5 * dot(cs.y_prime, cs.y_prime) - masses.alpha / norm(dx)
                - masses.beta / norm(cs.x_prime)
                + masses.gamma * dot(cs.y, cs.y_prime)))
}

/// The full problem as an integrable vector field.
pub struct FullSystem {
    pub masses: BodyMasses,
}

impl FullSystem {
    pub fn new(masses: BodyMasses) -> Self {
        FullSystem { masses }
    }

    pub fn hamiltonian(&self, cs: &CartesianState) -> Result<f64> {
        full_hamiltonian(cs, &self.masses)
    }
}

impl VectorField for FullSystem {
    fn dim(&self) -> usize {
        8
    }

    fn eval(&self, _t: f64, v: &[f64], dvdt: &mut [f64]) -> Result<()> {
        let cs = CartesianState::from_array([v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]]);
        let m = &self.masses;
        let rx = norm(cs.x);
        let rp = norm(cs.x_prime);
        let dx = [cs.x[0] - cs.x_prime[0], cs.x[1] - cs.x_prime[1]];
        let rd = norm(dx);
        if rx == 0.0 || rp == 0.0 || rd == 0.0 {
            return Err(Error::Collision("vector field on the collision set".into()));
        }
        let rx3 = rx * rx * rx;
        let rp3 = rp * rp * rp;
        let rd3 = rd * rd * rd;
        // dy'/dt = -dH/dx'
        dvdt[0] = -m.delta * (m.alpha * (cs.x_prime[0] - cs.x[0]) / rd3 + m.beta * cs.x_prime[0] / rp3);
        dvdt[1] = -m.delta * (m.alpha * (cs.x_prime[1] - cs.x[1]) / rd3 + m.beta * cs.x_prime[1] / rp3);
        // dy/dt = -dH/dx
        dvdt[2] = -cs.x[0] / rx3 - m.delta * m.alpha * dx[0] / rd3;
        dvdt[3] = -cs.x[1] / rx3 - m.delta * m.alpha * dx[1] / rd3;
        // dx'/dt = dH/dy'
        dvdt[4] = m.delta * (cs.y_prime[0] + m.gamma * cs.y[0]);
        dvdt[5] = m.delta * (cs.y_prime[1] + m.gamma * cs.y[1]);
        // dx/dt = dH/dy
        dvdt[6] = cs.y[0] + m.delta * m.gamma * cs.y_prime[0];
        dvdt[7] = cs.y[1] + m.delta * m.gamma * cs.y_prime[1];
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{integrate, IntegratorSpec};
    use crate::kepler::cartesian_from_reduced;
    use crate::kepler::ReducedFull;
    use crate::model::params_from_masses;
    use approx::assert_relative_eq;

    fn test_state() -> CartesianState {
        let rf = ReducedFull {
            cee: 1.6,
            mom_g: 0.93,
            lambda: 1.0,
            mom_r: -2.0,
            node_c: 0.3,
            g: 2.1,
            ell: 4.0,
            r: 0.6,
        };
        cartesian_from_reduced(&rf).unwrap()
    }

    /// Hierarchical configuration. The effective outer coupling is
    /// delta * alpha = 1/mu, so a clean hierarchy needs |x'| well above
    /// 1/mu ~ 37 for the Example-2 masses.
    fn hierarchical_state() -> CartesianState {
        let rf = ReducedFull {
            cee: 49.99,
            mom_g: 0.99,
            lambda: 1.0,
            mom_r: -0.05,
            node_c: 0.3,
            g: 2.1,
            ell: 4.0,
            r: 120.0,
        };
        cartesian_from_reduced(&rf).unwrap()
    }

    #[test]
    fn outer_body_at_rest_reduces_to_kepler_plus_static_terms() {
        let masses = params_from_masses(0.06814254, 0.02725702).unwrap();
        let mut cs = test_state();
        cs.y_prime = [0.0, 0.0];
        let h = full_hamiltonian(&cs, &masses).unwrap();
        let dx = [cs.x[0] - cs.x_prime[0], cs.x[1] - cs.x_prime[1]];
        let expected = 0.5 * dot(cs.y, cs.y) - 1.0 / norm(cs.x)
            + masses.delta * (-masses.alpha / norm(dx) - masses.beta / norm(cs.x_prime));
        assert_relative_eq!(h, expected, epsilon = 1e-15);
    }

    #[test]
    fn rotation_invariance_of_the_hamiltonian() {
        let masses = params_from_masses(0.06814254, 0.02725702).unwrap();
        let cs = test_state();
        let phi: f64 = 1.234;
        let rot = |v: [f64; 2]| {
            [
                phi.cos() * v[0] - phi.sin() * v[1],
                phi.sin() * v[0] + phi.cos() * v[1],
            ]
        };
        let rotated = CartesianState {
            y_prime: rot(cs.y_prime),
            y: rot(cs.y),
            x_prime: rot(cs.x_prime),
            x: rot(cs.x),
        };
        assert_relative_eq!(
            full_hamiltonian(&cs, &masses).unwrap(),
            full_hamiltonian(&rotated, &masses).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn field_matches_finite_differences_of_the_hamiltonian() {
        let masses = params_from_masses(0.06814254, 0.02725702).unwrap();
        let sys = FullSystem::new(masses);
        let cs = test_state();
        let v = cs.to_array();
        let mut f = [0.0; 8];
        sys.eval(0.0, &v, &mut f).unwrap();
        let h = 1e-6;
        let ham = |v: [f64; 8]| full_hamiltonian(&CartesianState::from_array(v), &masses).unwrap();
        let mut grad = [0.0; 8];
        for i in 0..8 {
            let mut vp = v;
            let mut vm = v;
            vp[i] += h;
            vm[i] -= h;
            grad[i] = (ham(vp) - ham(vm)) / (2.0 * h);
        }
        // Layout [y', y, x', x]: momenta feel -dH/dposition and vice versa.
        for i in 0..4 {
            assert_relative_eq!(f[i], -grad[i + 4], max_relative = 1e-6, epsilon = 1e-8);
            assert_relative_eq!(f[i + 4], grad[i], max_relative = 1e-6, epsilon = 1e-8);
        }
    }

    #[test]
    fn energy_and_angular_momentum_conserved_along_the_flow() {
        let masses = params_from_masses(0.06814254, 0.02725702).unwrap();
        let sys = FullSystem::new(masses);
        let cs = hierarchical_state();
        let spec = IntegratorSpec {
            dense: false,
            ..IntegratorSpec::default().with_tol(3e-14)
        };
        let traj = integrate(&sys, &cs.to_array(), (0.0, 100.0), &spec).unwrap();
        assert!(traj.complete, "{:?}", traj.diagnostic);
        let h0 = full_hamiltonian(&cs, &masses).unwrap();
        let c0 = super::super::cross_z(cs.x, cs.y) + super::super::cross_z(cs.x_prime, cs.y_prime);
        let end = CartesianState::from_array(traj.last_state().unwrap().try_into().unwrap());
        let h1 = full_hamiltonian(&end, &masses).unwrap();
        let c1 = super::super::cross_z(end.x, end.y)
            + super::super::cross_z(end.x_prime, end.y_prime);
        assert_relative_eq!(h1, h0, max_relative = 1e-10);
        assert_relative_eq!(c1, c0, max_relative = 1e-10);
    }

    #[test]
    fn decoupled_limit_keeps_the_inner_ellipse_keplerian() {
        let mut masses = params_from_masses(0.06814254, 0.02725702).unwrap();
        masses.delta = 0.0;
        let sys = FullSystem::new(masses);
        let cs = test_state();
        let spec = IntegratorSpec {
            dense: false,
            ..IntegratorSpec::default().with_tol(1e-13)
        };
        let traj = integrate(&sys, &cs.to_array(), (0.0, 20.0), &spec).unwrap();
        let lambda0 = {
            let kep = 0.5 * dot(cs.y, cs.y) - 1.0 / norm(cs.x);
            (-0.5 / kep).sqrt()
        };
        let end = CartesianState::from_array(traj.last_state().unwrap().try_into().unwrap());
        let kep = 0.5 * dot(end.y, end.y) - 1.0 / norm(end.x);
        let lambda1 = (-0.5 / kep).sqrt();
        assert_relative_eq!(lambda1, lambda0, epsilon = 1e-12);
        // The full Hamiltonian coincides with the Kepler term: the scaled
        // remainder vanishes identically.
        let h = full_hamiltonian(&end, &masses).unwrap();
        assert_relative_eq!(h, kep, epsilon = 1e-14);
    }
}
