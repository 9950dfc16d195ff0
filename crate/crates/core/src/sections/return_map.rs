//! The first-return map on a section plane over a fixed energy level.
//!
//! A chart point unfolds to a reduced state by solving the plane equation for
//! the off-chart coordinate and the energy reduction for R; the sign of R is
//! carried by the map as metadata (it is chosen by continuity along the
//! generating orbit, never re-chosen at the section). A crossing counts as a
//! return when the section function changes sign in the configured direction
//! and the crossing state lies on the same R-sheet.

use crate::error::{Error, Result};
use crate::flow::{Dop853, IntegratorSpec, Trajectory};
use crate::model::{ReducedState, ReducedSystem};

use super::SectionPlane;

/// Full specification of a return map.
#[derive(Debug, Clone)]
pub struct ReturnMapSpec {
    pub plane: SectionPlane,
    /// Energy level of the map.
    pub energy: f64,
    /// Sheet metadata: sign of R carried by chart points.
    pub r_sign: f64,
    /// Required sign of d(sigma)/dt at accepted crossings (time-forward).
    pub direction: f64,
    /// Return-time cap.
    pub max_time: f64,
    pub integ: IntegratorSpec,
    /// |sigma| tolerance of the refined crossing.
    pub refine_tol: f64,
}

impl ReturnMapSpec {
    pub fn new(plane: SectionPlane, energy: f64, r_sign: f64, direction: f64) -> Self {
        ReturnMapSpec {
            plane,
            energy,
            r_sign: r_sign.signum(),
            direction: direction.signum(),
            max_time: 1.0,
            integ: IntegratorSpec {
                dense: false,
                ..IntegratorSpec::default().with_tol(1e-12)
            },
            refine_tol: 1e-12,
        }
    }

    pub fn with_max_time(mut self, max_time: f64) -> Self {
        self.max_time = max_time;
        self
    }

    pub fn with_integ(mut self, integ: IntegratorSpec) -> Self {
        self.integ = IntegratorSpec {
            dense: false,
            ..integ
        };
        self
    }
}

/// A concrete return map: the reduced system plus the section data.
#[derive(Clone)]
pub struct ReturnMap {
    pub system: ReducedSystem,
    pub spec: ReturnMapSpec,
}

/// Result of following the flow to the next accepted crossing.
pub struct RawReturn {
    pub state: [f64; 4],
    pub time: f64,
}

impl ReturnMap {
    pub fn new(system: ReducedSystem, spec: ReturnMapSpec) -> Self {
        ReturnMap { system, spec }
    }

    /// Unfold a chart point to the reduced state on the energy level.
    pub fn unfold(&self, x: [f64; 2]) -> Result<ReducedState> {
        let [r, mom_g, g] = self.spec.plane.embed(x);
        let mom_r = self
            .system
            .mom_r_from_energy(self.spec.energy, r, mom_g, g, self.spec.r_sign)?;
        ReducedState::new(mom_r, mom_g, r, g)
    }

    /// Chart coordinates of a state.
    pub fn project(&self, y: &[f64]) -> [f64; 2] {
        self.spec.plane.project(y)
    }

    /// One application of the map: chart to chart, with the return time.
    pub fn forward(&self, x: [f64; 2]) -> Result<([f64; 2], f64)> {
        let state = self.unfold(x)?;
        let raw = self.propagate(&state.to_array(), 1.0)?;
        Ok((self.project(&raw.state), raw.time))
    }

    /// The inverse map: first return under the time-reversed flow.
    pub fn backward(&self, x: [f64; 2]) -> Result<([f64; 2], f64)> {
        let state = self.unfold(x)?;
        let raw = self.propagate(&state.to_array(), -1.0)?;
        Ok((self.project(&raw.state), raw.time))
    }

    /// Map a full state (not necessarily on the section) to its next accepted
    /// crossing in forward (+1) or backward (-1) time.
    pub fn propagate(&self, y0: &[f64; 4], time_sign: f64) -> Result<RawReturn> {
        self.propagate_custom(y0, time_sign, self.spec.direction, self.spec.r_sign)
    }

    /// Propagate to the next crossing with an explicit direction and R-sheet,
    /// independent of the map's own metadata (used by symmetry composites).
    pub fn propagate_custom(
        &self,
        y0: &[f64; 4],
        time_sign: f64,
        direction: f64,
        r_sign: f64,
    ) -> Result<RawReturn> {
        let plane = self.spec.plane;
        let t_end = time_sign * self.spec.max_time;
        let mut solver = Dop853::new(&self.system, 0.0, y0, t_end, self.spec.integ)?;
        let mut sig_old = plane.sigma(y0);
        let guard = plane.jump_guard();
        let mut found: Option<RawReturn> = None;
        while solver.step()? {
            let sig_new = plane.sigma(&solver.y);
            // In backward time the same geometric crossing family shows the
            // opposite apparent slope; departure wobble is filtered by the
            // |sigma| floor.
            let crossed = sig_old.abs() > 1e-12
                && sig_old * sig_new <= 0.0
                && (sig_new - sig_old).abs() < guard
                && (sig_new - sig_old) * direction * time_sign >= 0.0;
            if crossed {
                let seg = solver.dense_segment()?;
                let spec_ev = crate::flow::EventSpec {
                    sigma: std::sync::Arc::new(move |y: &[f64]| plane.sigma(y)),
                    direction: crate::flow::CrossingDirection::Both,
                    refine_tol: self.spec.refine_tol,
                };
                let (t_star, y_star) =
                    crate::flow::refine_crossing(&seg, &spec_ev, seg.t_old, seg.t_new);
                // Sheet filter: the crossing must carry the chart's R sign.
                if y_star[0] * r_sign > 0.0 {
                    found = Some(RawReturn {
                        state: [y_star[0], y_star[1], y_star[2], y_star[3]],
                        time: t_star,
                    });
                    break;
                }
            }
            sig_old = sig_new;
            if solver.finished() {
                break;
            }
        }
        found.ok_or(Error::ReturnTimeout {
            max_time: self.spec.max_time,
        })
    }

    /// The flow segment from a chart point to its first return, with dense
    /// output (used for closed-orbit extraction and statistics).
    pub fn return_orbit(&self, x: [f64; 2]) -> Result<(Trajectory, RawReturn)> {
        let state = self.unfold(x)?;
        let raw = self.propagate(&state.to_array(), 1.0)?;
        let dense_spec = IntegratorSpec {
            dense: true,
            ..self.spec.integ
        };
        let traj = crate::flow::integrate(&self.system, &state.to_array(), (0.0, raw.time), &dense_spec)?;
        if traj.diagnostic.is_some() || !traj.complete {
            return Err(traj.diagnostic.unwrap_or(Error::ReturnTimeout {
                max_time: self.spec.max_time,
            }));
        }
        Ok((traj, raw))
    }

    /// Chart difference with the angle component wrapped.
    pub fn chart_diff(&self, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
        match self.spec.plane.chart() {
            super::Chart::MomAngle => [a[0] - b[0], crate::model::angle_diff(a[1], b[1])],
            super::Chart::RadiusMom => [a[0] - b[0], a[1] - b[1]],
        }
    }
}

/// Guard against a CoordinateG plane picking up the antipodal angle family:
/// sigma there is the wrapped difference, which vanishes only at the plane.
impl ReturnMap {
    /// On-plane energy residual of a chart point (diagnostic).
    pub fn energy_residual(&self, x: [f64; 2]) -> Result<f64> {
        let s = self.unfold(x)?;
        Ok((self.system.hamiltonian(&s)? - self.spec.energy).abs())
    }
}
