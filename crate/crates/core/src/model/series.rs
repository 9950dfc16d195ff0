//! Renormalised power series of the averaged potential,
//!
//!   U_N(r, G, g) = sum_{n even <= N} Q_n(E) r^n,   Q_n(E) = P_n(sqrt(E), pi/2),
//!
//! where E is the Euler integral of the point and P_n are the coefficients of
//! the r-expansion of U at fixed (G, g). Only even orders survive. The
//! coefficients are generated numerically: r -> U(r, sqrt(E), pi/2) is sampled
//! on a Chebyshev-Lobatto grid in s = r^2, fitted by a Chebyshev interpolant,
//! cross-checked against direct quadrature at probe radii, and converted to
//! monomial form. Each generation is cached; a lazily filled E-grid with
//! Catmull-Rom interpolation provides smooth coefficients (and their
//! E-derivatives) for series-backed dynamics.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

use super::euler::{euler_gradient, euler_integral};
use super::potential::{potential_quadrature, PotentialGradient};
use super::QuadratureSpec;

/// Highest supported power of r (even).
pub const MAX_ORDER: usize = 24;
/// Polynomial degree in s = r^2 kept by the generator.
const DEG_S: usize = MAX_ORDER / 2;
/// Lobatto panel count of the fit grid (DEG_FIT + 1 sample points).
const DEG_FIT: usize = 16;
/// Fit radius as a fraction of the level (distance to the real singularity).
const FIT_RADIUS_FRACTION: f64 = 0.6;
/// Smallest level for which coefficients are generated.
pub const MIN_LEVEL: f64 = 0.02;
/// Relative mismatch allowed between the fit and direct quadrature probes.
const PROBE_TOL: f64 = 1e-9;

/// Fit radius in r for a given level; the series representative point
/// (sqrt(E), pi/2) hits S0 at r = E, which bounds the sampling interval.
pub fn fit_radius(level: f64) -> f64 {
    (FIT_RADIUS_FRACTION * level).min(0.5)
}

/// Generate the even coefficients Q_0, Q_2, ..., Q_{2*DEG_S} at a level.
///
/// The level must lie in [MIN_LEVEL, 1]: the representative point
/// (sqrt(E), pi/2) only exists for E <= 1, and below MIN_LEVEL the fit
/// interval collapses against the singularity at r = E.
pub fn series_coefficients(level: f64, quad: &QuadratureSpec) -> Result<Arc<[f64]>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<[f64]>>>> = OnceLock::new();
    let key = level.to_bits();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().expect("series cache poisoned").get(&key) {
        return Ok(hit.clone());
    }
    let coeffs: Arc<[f64]> = generate(level, quad)?.into();
    cache
        .lock()
        .expect("series cache poisoned")
        .insert(key, coeffs.clone());
    Ok(coeffs)
}

fn generate(level: f64, quad: &QuadratureSpec) -> Result<Vec<f64>> {
    if !(MIN_LEVEL..=1.0).contains(&level) {
        return Err(Error::domain(format!(
            "series coefficients need {MIN_LEVEL} <= E <= 1 (got {level})"
        )));
    }
    let mom_g = level.sqrt();
    let g = std::f64::consts::FRAC_PI_2;
    let s_max = fit_radius(level).powi(2);

    // Sample U on the Lobatto grid in s; s = 0 is the exact value 1.
    let mut samples = [0.0f64; DEG_FIT + 1];
    for (j, v) in samples.iter_mut().enumerate() {
        let x = (std::f64::consts::PI * j as f64 / DEG_FIT as f64).cos();
        let s = 0.5 * s_max * (1.0 + x);
        *v = if s == 0.0 {
            1.0
        } else {
            potential_quadrature(s.sqrt(), mom_g, g, quad)?.u
        };
    }

    let mut cheb = chebyshev_coefficients(&samples);
    // Terms beyond DEG_S are aliasing-level noise; dropping them keeps the
    // monomial conversion well conditioned.
    cheb.truncate(DEG_S + 1);
    let mono_x = chebyshev_to_monomial(&cheb);
    let mono_s = rescale_to_s(&mono_x, s_max);

    // Refinement check against quadrature away from the fit nodes.
    for frac in [0.37, 0.71] {
        let s = frac * s_max;
        let direct = potential_quadrature(s.sqrt(), mom_g, g, quad)?.u;
        let fitted = horner(&mono_s, s);
        if (fitted - direct).abs() > PROBE_TOL * direct.abs() {
            return Err(Error::domain(format!(
                "series fit probe mismatch at level {level}: |{fitted} - {direct}| > {PROBE_TOL}"
            )));
        }
    }
    Ok(mono_s)
}

/// Chebyshev coefficients of the Lobatto interpolant (type-I DCT).
fn chebyshev_coefficients(values: &[f64]) -> Vec<f64> {
    let m = values.len() - 1;
    let mut coeffs = vec![0.0; m + 1];
    for (k, c) in coeffs.iter_mut().enumerate() {
        let mut acc = 0.5 * (values[0] + if k % 2 == 0 { values[m] } else { -values[m] });
        for (j, v) in values.iter().enumerate().take(m).skip(1) {
            acc += v * (std::f64::consts::PI * (j * k) as f64 / m as f64).cos();
        }
        let scale = if k == 0 || k == m { 1.0 } else { 2.0 };
        *c = scale * acc / m as f64;
    }
    coeffs
}

/// Convert sum a_k T_k(x) to monomial coefficients in x.
fn chebyshev_to_monomial(cheb: &[f64]) -> Vec<f64> {
    let n = cheb.len();
    let mut t_prev = vec![0.0; n];
    let mut t_curr = vec![0.0; n];
    t_prev[0] = 1.0; // T_0
    let mut out = vec![0.0; n];
    out[0] = cheb[0];
    if n > 1 {
        t_curr[1] = 1.0; // T_1
        for (i, c) in out.iter_mut().enumerate() {
            *c += cheb[1] * t_curr[i];
        }
        for k in 2..n {
            let mut t_next = vec![0.0; n];
            for i in 0..n - 1 {
                t_next[i + 1] += 2.0 * t_curr[i];
            }
            for i in 0..n {
                t_next[i] -= t_prev[i];
            }
            for (c, t) in out.iter_mut().zip(&t_next) {
                *c += cheb[k] * t;
            }
            t_prev = t_curr;
            t_curr = t_next;
        }
    }
    out
}

/// Substitute x = 2 s / s_max - 1 into a monomial polynomial in x.
fn rescale_to_s(mono_x: &[f64], s_max: f64) -> Vec<f64> {
    let n = mono_x.len();
    // First shift: x = u - 1 with u = 2 s / s_max.
    let mut shifted = vec![0.0; n];
    let mut binom_row = vec![0.0; n];
    for (m, &b) in mono_x.iter().enumerate() {
        // (u - 1)^m expanded via binomial coefficients.
        binom_row[0] = 1.0;
        for k in 1..=m {
            binom_row[k] = binom_row[k - 1] * ((m - k + 1) as f64) / (k as f64);
        }
        for k in 0..=m {
            let sign = if (m - k) % 2 == 0 { 1.0 } else { -1.0 };
            shifted[k] += b * sign * binom_row[k];
        }
    }
    // Then scale u = (2 / s_max) s.
    let mut scale = 1.0;
    for c in shifted.iter_mut() {
        *c *= scale;
        scale *= 2.0 / s_max;
    }
    shifted
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn horner_deriv(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (k, &c) in coeffs.iter().enumerate().rev().take_while(|(k, _)| *k >= 1) {
        acc = acc * x + k as f64 * c;
    }
    acc
}

/// Truncated series value U_N at a point; N odd is normalised down to N - 1.
pub fn potential_series(
    r: f64,
    mom_g: f64,
    g: f64,
    order: usize,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let level = euler_integral(r, mom_g, g)?;
    if level < 0.0 {
        return Err(Error::domain(format!(
            "series needs a non-negative Euler level (got {level})"
        )));
    }
    let order = order.min(MAX_ORDER) & !1;
    let coeffs = series_coefficients(level, quad)?;
    let n_terms = order / 2 + 1;
    let s = r * r;
    Ok(horner(&coeffs[..n_terms.min(coeffs.len())], s))
}

/// Lazily filled E-grid of series coefficients with cubic interpolation.
///
/// Interpolating the coefficients between grid levels keeps series-backed
/// dynamics smooth in the state; exact per-level generation would make the
/// vector field discontinuous in cost and is reserved for validation work.
pub struct SeriesCache {
    quad: QuadratureSpec,
    level_lo: f64,
    step: f64,
    slots: Vec<OnceLock<Arc<[f64]>>>,
}

impl SeriesCache {
    pub fn new(quad: QuadratureSpec) -> Self {
        let level_lo = MIN_LEVEL;
        let step = 1.0 / 512.0;
        let n = ((1.0 - level_lo) / step).ceil() as usize + 2;
        SeriesCache {
            quad,
            level_lo,
            step,
            slots: (0..n).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn supported(&self, level: f64) -> bool {
        (self.level_lo..=1.0).contains(&level)
    }

    fn node(&self, i: usize) -> Result<&Arc<[f64]>> {
        let level = (self.level_lo + self.step * i as f64).min(1.0);
        // OnceLock duplicates work across racing threads but settles on one value.
        if let Some(v) = self.slots[i].get() {
            return Ok(v);
        }
        let coeffs = series_coefficients(level, &self.quad)?;
        let _ = self.slots[i].set(coeffs);
        Ok(self.slots[i].get().expect("just set"))
    }

    /// Coefficients and their level-derivatives at an arbitrary level.
    fn interpolated(&self, level: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        if !self.supported(level) {
            return Err(Error::domain(format!(
                "series cache supports {} <= E <= 1 (got {level})",
                self.level_lo
            )));
        }
        let x = (level - self.level_lo) / self.step;
        let i1 = (x.floor() as usize).min(self.slots.len() - 4);
        let t = x - i1 as f64;
        let rows = [
            self.node(i1.saturating_sub(1).max(0))?.clone(),
            self.node(i1)?.clone(),
            self.node(i1 + 1)?.clone(),
            self.node(i1 + 2)?.clone(),
        ];
        let n = rows.iter().map(|r| r.len()).min().unwrap_or(0);
        let mut vals = vec![0.0; n];
        let mut ders = vec![0.0; n];
        // Catmull-Rom basis in t with uniform spacing.
        let t2 = t * t;
        let t3 = t2 * t;
        let w = [
            -0.5 * t3 + t2 - 0.5 * t,
            1.5 * t3 - 2.5 * t2 + 1.0,
            -1.5 * t3 + 2.0 * t2 + 0.5 * t,
            0.5 * t3 - 0.5 * t2,
        ];
        let dw = [
            -1.5 * t2 + 2.0 * t - 0.5,
            4.5 * t2 - 5.0 * t,
            -4.5 * t2 + 4.0 * t + 0.5,
            1.5 * t2 - t,
        ];
        for k in 0..n {
            let mut v = 0.0;
            let mut d = 0.0;
            for (j, row) in rows.iter().enumerate() {
                v += w[j] * row[k];
                d += dw[j] * row[k];
            }
            vals[k] = v;
            ders[k] = d / self.step;
        }
        Ok((vals, ders))
    }

    /// Series value and gradient with respect to (r, G, g) at truncation `order`.
    pub fn value_and_gradient(
        &self,
        r: f64,
        mom_g: f64,
        g: f64,
        order: usize,
    ) -> Result<PotentialGradient> {
        let level = euler_integral(r, mom_g, g)?;
        let (coeffs, dcoeffs) = self.interpolated(level)?;
        let n_terms = (order.min(MAX_ORDER) / 2 + 1).min(coeffs.len());
        let s = r * r;
        let u = horner(&coeffs[..n_terms], s);
        let du_ds = horner_deriv(&coeffs[..n_terms], s);
        let du_dlevel = horner(&dcoeffs[..n_terms], s);
        let egrad = euler_gradient(r, mom_g, g)?;
        Ok(PotentialGradient {
            u,
            du_dr: 2.0 * r * du_ds + du_dlevel * egrad.d_r,
            du_dgg: du_dlevel * egrad.d_mom_g,
            du_dg: du_dlevel * egrad.d_g,
            degraded: false,
            nodes: 0,
        })
    }
}
