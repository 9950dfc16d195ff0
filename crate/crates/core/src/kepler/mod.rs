//! The un-averaged side: Kepler-equation solver, the canonical coordinate map
//! between planar Cartesian variables and the rotation-reduced set
//! (C, G, Lambda, R, c, g, ell, r), the full planar Hamiltonian, and the
//! three-scales weight diagnostics.

mod coords;
mod full;
mod solve;
mod weights;

pub use coords::{cartesian_from_reduced, reduced_from_cartesian, rescale_to_unit_lambda};
pub use full::{FullSystem, full_hamiltonian};
pub use solve::solve_kepler;
pub use weights::{lift_reduced_datum, weight_diagnostics, WeightSample};

use crate::error::{Error, Result};

/// Planar Cartesian state of the full problem: momenta and positions of the
/// outer (primed) and inner bodies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianState {
    pub y_prime: [f64; 2],
    pub y: [f64; 2],
    pub x_prime: [f64; 2],
    pub x: [f64; 2],
}

impl CartesianState {
    /// Flatten to the integration layout [y', y, x', x].
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.y_prime[0],
            self.y_prime[1],
            self.y[0],
            self.y[1],
            self.x_prime[0],
            self.x_prime[1],
            self.x[0],
            self.x[1],
        ]
    }

    pub fn from_array(v: [f64; 8]) -> Self {
        CartesianState {
            y_prime: [v[0], v[1]],
            y: [v[2], v[3]],
            x_prime: [v[4], v[5]],
            x: [v[6], v[7]],
        }
    }

    /// Distance from the collision set.
    pub fn collision_margin(&self) -> f64 {
        let dx = [self.x[0] - self.x_prime[0], self.x[1] - self.x_prime[1]];
        norm(self.x).min(norm(self.x_prime)).min(norm(dx))
    }

    pub fn check_off_collision(&self) -> Result<()> {
        if self.collision_margin() <= 0.0 {
            return Err(Error::Collision("state on the collision set".into()));
        }
        Ok(())
    }
}

/// Rotation-reduced coordinates of the full problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedFull {
    /// Total angular momentum C.
    pub cee: f64,
    /// Inner angular momentum G, 0 < G < Lambda.
    pub mom_g: f64,
    /// Lambda = sqrt(a) of the inner ellipse.
    pub lambda: f64,
    /// Radial momentum of the outer body.
    pub mom_r: f64,
    /// Polar angle of x'.
    pub node_c: f64,
    /// Perihelion angle measured from x'.
    pub g: f64,
    /// Mean anomaly of the inner body.
    pub ell: f64,
    /// |x'|.
    pub r: f64,
}

impl ReducedFull {
    pub fn validate(&self) -> Result<()> {
        if !(self.mom_g > 0.0 && self.mom_g < self.lambda) {
            return Err(Error::CoordinateSingularity {
                g_mom: self.mom_g,
                lambda: self.lambda,
            });
        }
        if !(self.r > 0.0) {
            return Err(Error::domain(format!("r must be positive (got {})", self.r)));
        }
        if self.cee < self.mom_g {
            return Err(Error::domain(format!(
                "prograde convention violated: C - G = {} < 0",
                self.cee - self.mom_g
            )));
        }
        Ok(())
    }

    /// Orbital elements of the inner ellipse.
    pub fn elements(&self) -> KeplerElements {
        let a = self.lambda * self.lambda;
        let e = (1.0 - (self.mom_g / self.lambda).powi(2)).max(0.0).sqrt();
        let xi = solve_kepler(self.ell, e, 1e-14).unwrap_or(f64::NAN);
        let nu = 2.0 * (((1.0 + e) / (1.0 - e)).sqrt() * (xi / 2.0).tan()).atan();
        KeplerElements { a, e, xi, nu }
    }
}

/// Elements of the inner ellipse derived from (Lambda, G, ell).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerElements {
    pub a: f64,
    pub e: f64,
    /// Eccentric anomaly.
    pub xi: f64,
    /// True anomaly.
    pub nu: f64,
}

pub(crate) fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

pub(crate) fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// z-component of the planar cross product.
pub(crate) fn cross_z(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}
