//! Fixed points of return maps: damped Newton with finite-difference
//! Jacobians, eigen-classification, and exhaustive grid scans.

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::return_map::ReturnMap;
use super::{eigen2, FixedPointRecord};

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tol: f64,
    /// Finite-difference step in chart units.
    pub fd_step: f64,
    pub max_iterations: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-10,
            fd_step: 1e-7,
            max_iterations: 25,
        }
    }
}

fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Damped Newton on a generic chart self-map: solves F(x) = x where the
/// residual F(x) - x is supplied by the caller (angle wrapping included).
pub fn solve_fixed_point_of(
    residual: impl Fn([f64; 2]) -> Result<[f64; 2]>,
    seed: [f64; 2],
    opts: &NewtonOptions,
) -> Result<([f64; 2], f64)> {
    let mut x = seed;
    let mut trace = Vec::new();
    let mut fx = residual(x)?;
    for _ in 0..opts.max_iterations {
        let res = norm2(fx);
        trace.push(res);
        if res <= opts.tol {
            return Ok((x, res));
        }
        // Forward-difference Jacobian of the residual.
        let h = opts.fd_step;
        let mut jac = [[0.0f64; 2]; 2];
        for col in 0..2 {
            let mut xp = x;
            xp[col] += h;
            let fp = residual(xp)?;
            jac[0][col] = (fp[0] - fx[0]) / h;
            jac[1][col] = (fp[1] - fx[1]) / h;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let dx = [
            (-fx[0] * jac[1][1] + fx[1] * jac[0][1]) / det,
            (-jac[0][0] * fx[1] + jac[1][0] * fx[0]) / det,
        ];
        // Backtracking damping.
        let mut lambda = 1.0;
        let mut advanced = false;
        for _ in 0..6 {
            let xc = [x[0] + lambda * dx[0], x[1] + lambda * dx[1]];
            match residual(xc) {
                Ok(fc) if norm2(fc) < res => {
                    x = xc;
                    fx = fc;
                    advanced = true;
                    break;
                }
                _ => lambda *= 0.5,
            }
        }
        if !advanced {
            break;
        }
    }
    let final_res = norm2(fx);
    if final_res <= opts.tol {
        return Ok((x, final_res));
    }
    Err(Error::NewtonNoConvergence {
        iterations: trace.len(),
        trace,
    })
}

/// Damped Newton iteration on x -> P(x) - x from a seed.
pub fn find_fixed_point(
    map: &ReturnMap,
    seed: [f64; 2],
    opts: &NewtonOptions,
) -> Result<FixedPointRecord> {
    let residual = |x: [f64; 2]| -> Result<[f64; 2]> {
        let (px, _) = map.forward(x)?;
        Ok(map.chart_diff(px, x))
    };
    let (x, res) = solve_fixed_point_of(residual, seed, opts)?;
    classify(map, x, res, opts)
}

/// Central finite-difference Jacobian of the map at a point.
pub fn map_jacobian(map: &ReturnMap, x: [f64; 2], h: f64) -> Result<[[f64; 2]; 2]> {
    let mut jac = [[0.0f64; 2]; 2];
    for col in 0..2 {
        let mut xp = x;
        let mut xm = x;
        xp[col] += h;
        xm[col] -= h;
        let (pp, _) = map.forward(xp)?;
        let (pm, _) = map.forward(xm)?;
        let d = map.chart_diff(pp, pm);
        jac[0][col] = d[0] / (2.0 * h);
        jac[1][col] = d[1] / (2.0 * h);
    }
    Ok(jac)
}

fn classify(
    map: &ReturnMap,
    x: [f64; 2],
    residual: f64,
    opts: &NewtonOptions,
) -> Result<FixedPointRecord> {
    let jac = map_jacobian(map, x, opts.fd_step)?;
    let (eigenvalues, eigenvectors, kind) = eigen2(jac);
    Ok(FixedPointRecord {
        chart: x,
        residual,
        eigenvalues,
        eigenvectors,
        kind,
        jacobian: jac,
    })
}

/// Eigen-data of an already converged fixed point.
pub fn jacobian_eigen(map: &ReturnMap, fp: &FixedPointRecord) -> Result<FixedPointRecord> {
    classify(
        map,
        fp.chart,
        fp.residual,
        &NewtonOptions::default(),
    )
}

/// Newton from every node of a seed grid; converged points are deduplicated
/// (angle-aware) and returned sorted by chart coordinates.
pub fn scan_fixed_points(
    map: &ReturnMap,
    first_range: (f64, f64),
    second_range: (f64, f64),
    grid: (usize, usize),
    opts: &NewtonOptions,
) -> Vec<FixedPointRecord> {
    let seeds: Vec<[f64; 2]> = (0..grid.0)
        .flat_map(|i| {
            (0..grid.1).map(move |j| {
                [
                    first_range.0
                        + (first_range.1 - first_range.0) * (i as f64 + 0.5) / grid.0 as f64,
                    second_range.0
                        + (second_range.1 - second_range.0) * (j as f64 + 0.5) / grid.1 as f64,
                ]
            })
        })
        .collect();
    let mut found: Vec<FixedPointRecord> = seeds
        .par_iter()
        .filter_map(|&seed| find_fixed_point(map, seed, opts).ok())
        .filter(|rec| {
            // Keep in-window points only; Newton may wander out.
            rec.chart[0] >= first_range.0 - 1e-6
                && rec.chart[0] <= first_range.1 + 1e-6
                && rec.chart[1] >= second_range.0 - 1e-6
                && rec.chart[1] <= second_range.1 + 1e-6
        })
        .collect();
    found.sort_by(|a, b| {
        a.chart
            .partial_cmp(&b.chart)
            .expect("finite chart coordinates")
    });
    let mut unique: Vec<FixedPointRecord> = Vec::new();
    for rec in found {
        let dup = unique.iter().any(|u| {
            let d = map.chart_diff(u.chart, rec.chart);
            norm2(d) < 1e-5
        });
        if !dup {
            unique.push(rec);
        }
    }
    unique
}

/// The identity-map classification sanity double: a zero-field time-T map.
#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_residual_of_synthetic_jacobians() {
        let jac = [[1.2, 0.3], [0.4, 0.7]];
        let (vals, vecs, _) = super::super::eigen2(jac);
        for k in 0..2 {
            if vals[k].im != 0.0 {
                continue;
            }
            let l = vals[k].re;
            let v = vecs[k];
            let jv = [
                jac[0][0] * v[0] + jac[0][1] * v[1],
                jac[1][0] * v[0] + jac[1][1] * v[1],
            ];
            let res = ((jv[0] - l * v[0]).powi(2) + (jv[1] - l * v[1]).powi(2)).sqrt();
            assert!(res < 1e-12, "eigen residual {res}");
        }
    }
}
