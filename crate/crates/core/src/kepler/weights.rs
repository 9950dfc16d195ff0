//! Three-scales weight diagnostics along full-problem trajectories: per
//! sample, the magnitudes of the Keplerian term 1/(2 Lambda^2), the
//! zero-average remainder Htilde_C, and the averaged-energy split
//! |K_C|, alpha |U|, |Ktilde_C|.

use crate::error::Result;
use crate::flow::Trajectory;
use crate::model::{potential_quadrature, BodyMasses, ModelParams, QuadratureSpec, ReducedState};

use super::{dot, norm, reduced_from_cartesian, CartesianState, ReducedFull};

/// One diagnostic row. Magnitude fields are absolute values; `valid` is false
/// when the sample could not be reduced (coordinate singularity), in which
/// case the magnitudes are NaN.
#[derive(Debug, Clone, Copy)]
pub struct WeightSample {
    pub t: f64,
    /// |-1/(2 Lambda^2)|.
    pub kepler: f64,
    /// |Htilde_C|, the zero-average part of the parenthesised energy.
    pub h_tilde: f64,
    /// |K_C|.
    pub k_c: f64,
    /// alpha |U| with the full (un-renormalised) potential.
    pub alpha_u: f64,
    /// |Ktilde_C|.
    pub k_tilde: f64,
    pub valid: bool,
}

/// Complete a reduced datum to a full-problem state with Lambda = 1 and
/// ell = pi (the lifting convention for the published runs); c = 0.
pub fn lift_reduced_datum(state: &ReducedState, cee: f64) -> Result<CartesianState> {
    let rf = ReducedFull {
        cee,
        mom_g: state.mom_g,
        lambda: 1.0,
        mom_r: state.mom_r,
        node_c: 0.0,
        g: state.g,
        ell: std::f64::consts::PI,
        r: state.r,
    };
    super::cartesian_from_reduced(&rf)
}

/// Evaluate the weight series along a full-problem trajectory at `n_samples`
/// uniformly spaced times (dense output required).
pub fn weight_diagnostics(
    traj: &Trajectory,
    masses: &BodyMasses,
    params: &ModelParams,
    quad: &QuadratureSpec,
    n_samples: usize,
) -> Result<Vec<WeightSample>> {
    let t0 = traj.start_time();
    let t1 = traj.end_time();
    let mut out = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let t = t0 + (t1 - t0) * (k as f64) / ((n_samples - 1).max(1) as f64);
        let Some(v) = traj.state_at(t) else {
            continue;
        };
        let arr: [f64; 8] = v.as_slice().try_into().expect("full state has 8 slots");
        let cs = CartesianState::from_array(arr);
        out.push(sample_at(t, &cs, masses, params, quad));
    }
    Ok(out)
}

fn sample_at(
    t: f64,
    cs: &CartesianState,
    masses: &BodyMasses,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> WeightSample {
    let invalid = WeightSample {
        t,
        kepler: f64::NAN,
        h_tilde: f64::NAN,
        k_c: f64::NAN,
        alpha_u: f64::NAN,
        k_tilde: f64::NAN,
        valid: false,
    };
    let Ok(rf) = reduced_from_cartesian(cs) else {
        return invalid;
    };
    let hat = super::rescale_to_unit_lambda(&rf);
    if hat.mom_g.abs() > 1.0 {
        return invalid;
    }
    // U at general Lambda via the scaling identity U_L = L^-2 U_1(hat).
    let Ok(u_hat) = potential_quadrature(hat.r, hat.mom_g, hat.g, quad) else {
        return invalid;
    };
    let lam2 = rf.lambda * rf.lambda;
    let u = u_hat.u / lam2;
    let r2 = rf.r * rf.r;
    let k_c = rf.mom_r * rf.mom_r / 2.0 + rf.cee * rf.cee / (2.0 * r2) - params.beta / rf.r;
    let k_tilde = (rf.mom_g * rf.mom_g - 2.0 * rf.cee * rf.mom_g) / (2.0 * r2);
    let h_bar = rf.mom_r * rf.mom_r / 2.0 + (rf.cee - rf.mom_g).powi(2) / (2.0 * r2)
        - params.alpha * u
        - params.beta / rf.r;
    // Instantaneous parenthesised energy; Htilde is its zero-average part.
    let dx = [cs.x[0] - cs.x_prime[0], cs.x[1] - cs.x_prime[1]];
    let inst = 0.5 * dot(cs.y_prime, cs.y_prime) - params.alpha / norm(dx)
        - params.beta / norm(cs.x_prime)
        + masses.gamma * dot(cs.y, cs.y_prime);
    WeightSample {
        t,
        kepler: 0.5 / lam2,
        h_tilde: (inst - h_bar).abs(),
        k_c: k_c.abs(),
        alpha_u: (params.alpha * u).abs(),
        k_tilde: k_tilde.abs(),
        valid: true,
    }
}
