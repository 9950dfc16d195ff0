//! Section-crossing detection: scalar event functions sampled along the dense
//! interpolant, with sign-change bracketing and hybrid bisection/secant
//! refinement down to the requested |sigma| tolerance.

use std::sync::Arc;

use super::{DenseSegment, Trajectory};

/// Which sign changes of sigma count as crossings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossingDirection {
    /// sigma increasing through zero.
    Positive,
    /// sigma decreasing through zero.
    Negative,
    #[default]
    Both,
}

impl CrossingDirection {
    pub fn accepts(self, before: f64, after: f64) -> bool {
        match self {
            CrossingDirection::Positive => before < 0.0 && after >= 0.0,
            CrossingDirection::Negative => before > 0.0 && after <= 0.0,
            CrossingDirection::Both => before * after <= 0.0 && before != after,
        }
    }
}

/// A scalar event function with crossing direction and refinement tolerance.
#[derive(Clone)]
pub struct EventSpec {
    pub sigma: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    pub direction: CrossingDirection,
    /// |sigma| at the reported crossing is refined below this.
    pub refine_tol: f64,
}

impl EventSpec {
    pub fn new(
        sigma: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        direction: CrossingDirection,
    ) -> Self {
        EventSpec {
            sigma: Arc::new(sigma),
            direction,
            refine_tol: 1e-12,
        }
    }

    pub fn value(&self, y: &[f64]) -> f64 {
        (self.sigma)(y)
    }
}

/// A located crossing.
#[derive(Debug, Clone)]
pub struct EventHit {
    pub t: f64,
    pub state: Vec<f64>,
    /// Index of the event in the query list.
    pub which: usize,
    /// Set when the crossing coincides with an integration endpoint.
    pub boundary: bool,
}

/// Interior probes per step when hunting for sign changes; the flow is smooth
/// and steps are error-controlled, so a handful suffices.
const PROBES_PER_STEP: usize = 8;

/// Refine a bracketed crossing of `sigma` on one dense segment.
///
/// Returns (t, state) with |sigma(state)| <= refine_tol whenever the bracket
/// is genuine; falls back to the bisection midpoint at time-resolution limits.
pub fn refine_crossing(
    seg: &DenseSegment,
    event: &EventSpec,
    mut t_lo: f64,
    mut t_hi: f64,
) -> (f64, Vec<f64>) {
    let mut buf = vec![0.0; seg.y_old.len()];
    let eval = |t: f64, buf: &mut Vec<f64>| -> f64 {
        seg.eval(t, buf);
        event.value(buf)
    };
    let mut f_lo = eval(t_lo, &mut buf);
    let mut f_hi = eval(t_hi, &mut buf);
    if f_lo == 0.0 {
        seg.eval(t_lo, &mut buf);
        return (t_lo, buf);
    }
    for _ in 0..128 {
        // Secant candidate, safeguarded by the bracket midpoint.
        let denom = f_hi - f_lo;
        let mut t_mid = if denom != 0.0 {
            t_hi - f_hi * (t_hi - t_lo) / denom
        } else {
            0.5 * (t_lo + t_hi)
        };
        let lo = t_lo.min(t_hi);
        let hi = t_lo.max(t_hi);
        if !(t_mid > lo && t_mid < hi) {
            t_mid = 0.5 * (t_lo + t_hi);
        }
        let f_mid = eval(t_mid, &mut buf);
        if f_mid.abs() <= event.refine_tol || (t_hi - t_lo).abs() <= f64::EPSILON * t_hi.abs().max(1.0)
        {
            seg.eval(t_mid, &mut buf);
            return (t_mid, buf);
        }
        if (f_lo < 0.0) == (f_mid < 0.0) {
            t_lo = t_mid;
            f_lo = f_mid;
        } else {
            t_hi = t_mid;
            f_hi = f_mid;
        }
    }
    seg.eval(0.5 * (t_lo + t_hi), &mut buf);
    (0.5 * (t_lo + t_hi), buf)
}

/// Scan one dense segment for direction-matching crossings of one event.
pub fn crossings_in_segment(seg: &DenseSegment, event: &EventSpec) -> Vec<(f64, Vec<f64>)> {
    let mut hits = Vec::new();
    let mut buf = vec![0.0; seg.y_old.len()];
    let h = seg.t_new - seg.t_old;
    let mut t_prev = seg.t_old;
    seg.eval(t_prev, &mut buf);
    let mut f_prev = event.value(&buf);
    for j in 1..=PROBES_PER_STEP {
        let t = seg.t_old + h * (j as f64) / (PROBES_PER_STEP as f64);
        seg.eval(t, &mut buf);
        let f = event.value(&buf);
        // Time-forward crossing test, independent of the integration sense.
        let (before, after) = if h >= 0.0 { (f_prev, f) } else { (f, f_prev) };
        if event.direction.accepts(before, after) && f_prev != 0.0 {
            let (a, b) = if h >= 0.0 { (t_prev, t) } else { (t, t_prev) };
            hits.push(refine_crossing(seg, event, a, b));
        }
        t_prev = t;
        f_prev = f;
    }
    hits
}

/// All direction-matching crossings of each event over a stored trajectory.
pub fn detect_events(traj: &Trajectory, events: &[EventSpec]) -> Vec<EventHit> {
    let mut out = Vec::new();
    let t_end = traj.end_time();
    for seg in &traj.segments {
        for (which, event) in events.iter().enumerate() {
            for (t, state) in crossings_in_segment(seg, event) {
                let boundary = (t - t_end).abs() <= 1e-12 * t_end.abs().max(1.0)
                    || (t - traj.start_time()).abs() <= 1e-12;
                out.push(EventHit {
                    t,
                    state,
                    which,
                    boundary,
                });
            }
        }
    }
    out.sort_by(|a, b| a.t.partial_cmp(&b.t).expect("finite event times"));
    out
}
