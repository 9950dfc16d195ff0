//! Trajectory integration: an explicit adaptive Dormand-Prince 8(5,3) stepper
//! with 7th-order dense output, section-crossing (event) detection on the
//! interpolant, and the energy-audit protocol used to police every published
//! run.

mod dop853;
mod dop853_tables;
mod events;

pub use dop853::{integrate, integrate_streaming, Dop853, Flow};
pub use events::{detect_events, refine_crossing, CrossingDirection, EventHit, EventSpec};

use crate::error::{Error, Result};

/// Right-hand side of an ODE system. Evaluation may fail (the averaged
/// potential is singular on S0), which aborts the integration cleanly.
pub trait VectorField: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()>;
}

impl VectorField for crate::model::ReducedSystem {
    fn dim(&self) -> usize {
        4
    }

    fn eval(&self, _t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()> {
        let state = crate::model::ReducedState {
            mom_r: y[0],
            mom_g: y[1],
            r: y[2],
            g: y[3],
        };
        if !(state.r > 0.0) || state.mom_g.abs() > 1.0 {
            return Err(Error::domain(format!(
                "state left the coordinate domain: r = {}, G = {}",
                state.r, state.mom_g
            )));
        }
        let guard = crate::model::singularity_distance(state.r, state.mom_g, state.g);
        if guard.on_singular_branch
            && guard.gap < 1e-5
            && matches!(
                self.backend,
                crate::model::PotentialBackend::Quadrature
            )
        {
            return Err(Error::NearSingularSet {
                gap: guard.gap,
                r: state.r,
            });
        }
        let f = self.vector_field(&state)?;
        dydt.copy_from_slice(&f);
        Ok(())
    }
}

/// Local error control for the adaptive stepper.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Store per-step dense-output coefficients in the trajectory.
    pub dense: bool,
    pub max_steps: usize,
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        IntegratorSpec {
            rel_tol: 1e-13,
            abs_tol: 1e-13,
            max_step: f64::INFINITY,
            dense: true,
            max_steps: 50_000_000,
        }
    }
}

impl IntegratorSpec {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self.abs_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::domain("integrator tolerances must be positive"));
        }
        Ok(())
    }
}

/// Dense-output polynomial of one accepted step.
#[derive(Debug, Clone)]
pub struct DenseSegment {
    pub t_old: f64,
    pub t_new: f64,
    pub y_old: Vec<f64>,
    /// The seven interpolation rows of the continuous extension.
    pub coeffs: Vec<Vec<f64>>,
}

impl DenseSegment {
    /// Evaluate the interpolant at t inside [t_old, t_new].
    pub fn eval(&self, t: f64, out: &mut [f64]) {
        let h = self.t_new - self.t_old;
        let x = (t - self.t_old) / h;
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, row) in self.coeffs.iter().rev().enumerate() {
            for (o, c) in out.iter_mut().zip(row) {
                *o += c;
            }
            let factor = if i % 2 == 0 { x } else { 1.0 - x };
            out.iter_mut().for_each(|v| *v *= factor);
        }
        for (o, y) in out.iter_mut().zip(&self.y_old) {
            *o += y;
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = if self.t_new >= self.t_old {
            (self.t_old, self.t_new)
        } else {
            (self.t_new, self.t_old)
        };
        (lo..=hi).contains(&t)
    }
}

/// Integrated orbit: step samples plus (optionally) the dense interpolant.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    /// Accepted-step samples (t, state), strictly monotone in t.
    pub samples: Vec<(f64, Vec<f64>)>,
    /// Dense-output coefficients per accepted step, when requested.
    pub segments: Vec<DenseSegment>,
    /// False when the integration stopped early; `diagnostic` then says why.
    pub complete: bool,
    pub diagnostic: Option<Error>,
}

impl Trajectory {
    pub fn start_time(&self) -> f64 {
        self.samples.first().map(|s| s.0).unwrap_or(0.0)
    }

    pub fn end_time(&self) -> f64 {
        self.samples.last().map(|s| s.0).unwrap_or(0.0)
    }

    pub fn last_state(&self) -> Option<&[f64]> {
        self.samples.last().map(|s| s.1.as_slice())
    }

    /// Interpolate the state at an interior time (requires dense output).
    pub fn state_at(&self, t: f64) -> Option<Vec<f64>> {
        if self.segments.is_empty() {
            return None;
        }
        let forward = self.segments[0].t_new >= self.segments[0].t_old;
        let idx = self
            .segments
            .partition_point(|s| if forward { s.t_new < t } else { s.t_new > t })
            .min(self.segments.len() - 1);
        let seg = &self.segments[idx];
        if !seg.contains(t) && !self.segments.iter().any(|s| s.contains(t)) {
            return None;
        }
        let seg = if seg.contains(t) {
            seg
        } else {
            self.segments.iter().find(|s| s.contains(t))?
        };
        let mut out = vec![0.0; seg.y_old.len()];
        seg.eval(t, &mut out);
        Some(out)
    }
}

/// Maximum relative drift of a first integral along a trajectory, with the
/// per-sample series for plotting.
pub fn energy_audit(
    traj: &Trajectory,
    mut hamiltonian: impl FnMut(&[f64]) -> Result<f64>,
) -> Result<(f64, Vec<(f64, f64)>)> {
    let mut series = Vec::with_capacity(traj.samples.len());
    let mut max_drift = 0.0f64;
    let mut h0 = None;
    for (t, y) in &traj.samples {
        let h = hamiltonian(y)?;
        let base = *h0.get_or_insert(h);
        let rel = if base != 0.0 {
            (h - base).abs() / base.abs()
        } else {
            (h - base).abs()
        };
        max_drift = max_drift.max(rel);
        series.push((*t, rel));
    }
    Ok((max_drift, series))
}
