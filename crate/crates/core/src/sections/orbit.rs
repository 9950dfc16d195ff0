//! Closed orbits generated by fixed points of a return map, with the
//! along-orbit statistics of the Euler integral used throughout the
//! quasi-conservation analysis.

use crate::error::Result;
use crate::flow::Trajectory;
use crate::model::euler_integral;

use super::return_map::ReturnMap;
use super::FixedPointRecord;

/// A periodic orbit extracted between successive returns.
#[derive(Debug, Clone)]
pub struct ClosedOrbit {
    pub trajectory: Trajectory,
    pub period: f64,
    /// State-space distance between the endpoints (angle wrapped).
    pub closure_gap: f64,
    /// Dense samples (t, [R, G, r, g], E) over one period.
    pub samples: Vec<(f64, [f64; 4], f64)>,
}

impl ClosedOrbit {
    pub fn euler_min(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.2)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn euler_max(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.2)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Mid value in the range sense, (min + max)/2.
    pub fn euler_mid(&self) -> f64 {
        0.5 * (self.euler_min() + self.euler_max())
    }

    pub fn r_max(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.1[2])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn r_min(&self) -> f64 {
        self.samples.iter().map(|s| s.1[2]).fold(f64::INFINITY, f64::min)
    }

    /// Range of a coordinate over the period (0 = R, 1 = G, 2 = r, 3 = g).
    pub fn coordinate_range(&self, idx: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (_, y, _) in &self.samples {
            lo = lo.min(y[idx]);
            hi = hi.max(y[idx]);
        }
        (lo, hi)
    }
}

/// Follow the flow from a converged fixed point back to the section and
/// package the closed orbit with dense Euler-integral samples.
pub fn periodic_orbit_from_fixed_point(
    map: &ReturnMap,
    fp: &FixedPointRecord,
    n_samples: usize,
) -> Result<ClosedOrbit> {
    let (traj, raw) = map.return_orbit(fp.chart)?;
    let period = raw.time;
    let start = traj.samples.first().expect("orbit has samples").1.clone();
    let end = &raw.state;
    let closure_gap = ((end[0] - start[0]).powi(2)
        + (end[1] - start[1]).powi(2)
        + (end[2] - start[2]).powi(2)
        + crate::model::angle_diff(end[3], start[3]).powi(2))
    .sqrt();
    let mut samples = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let t = period * (k as f64) / (n_samples as f64);
        let Some(y) = traj.state_at(t) else { continue };
        let e_val = euler_integral(y[2], y[1].clamp(-1.0, 1.0), y[3])?;
        samples.push((t, [y[0], y[1], y[2], y[3]], e_val));
    }
    Ok(ClosedOrbit {
        trajectory: traj,
        period,
        closure_gap,
        samples,
    })
}
