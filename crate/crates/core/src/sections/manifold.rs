//! One-dimensional invariant manifolds of hyperbolic fixed points, grown by
//! iterating a fundamental segment along the eigenvector and inserting
//! pre-image midpoints wherever the image polyline spreads, plus polyline
//! intersection machinery for homoclinic points.

use crate::error::{Error, Result};

use super::return_map::ReturnMap;
use super::FixedPointRecord;

/// Which invariant curve, and which side of the fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Branch {
    pub stable: bool,
    /// +1 seeds along +eigenvector, -1 along the opposite side.
    pub side: i8,
}

/// Traced manifold branch.
#[derive(Debug, Clone)]
pub struct ManifoldTrace {
    pub points: Vec<[f64; 2]>,
    /// True when a segment point left the map domain and the branch was cut.
    pub truncated: bool,
}

/// Grow a manifold branch of a hyperbolic fixed point.
///
/// The seed segment spans one fundamental domain [eps, lambda eps] along the
/// eigenvector (the squared map is used when the eigenvalue is negative, so a
/// branch stays on its side). Images are refined by mapping midpoints of
/// pre-image pairs whenever consecutive image points are farther apart than
/// `max_spacing` or turn by more than `max_angle`.
pub fn trace_manifold(
    map: &ReturnMap,
    fp: &FixedPointRecord,
    branch: Branch,
    n_iter: usize,
    seed_eps: f64,
    max_points: usize,
) -> Result<ManifoldTrace> {
    trace_manifold_with(map, fp, branch, n_iter, seed_eps, max_points, &TraceOptions::default())
}

/// Refinement thresholds for the polyline growth.
#[derive(Debug, Clone, Copy)]
pub struct TraceOptions {
    pub max_spacing: f64,
    pub max_angle: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            max_spacing: 2e-3,
            max_angle: 0.3,
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn trace_manifold_with(
    map: &ReturnMap,
    fp: &FixedPointRecord,
    branch: Branch,
    n_iter: usize,
    seed_eps: f64,
    max_points: usize,
    opts: &TraceOptions,
) -> Result<ManifoldTrace> {
    let (eigvec, eigval) = if branch.stable {
        (
            fp.stable_eigenvector()
                .ok_or_else(|| Error::Degenerate("fixed point is not hyperbolic".into()))?,
            fp.stable_eigenvalue(),
        )
    } else {
        (
            fp.unstable_eigenvector()
                .ok_or_else(|| Error::Degenerate("fixed point is not hyperbolic".into()))?,
            fp.unstable_eigenvalue(),
        )
    };
    // The expansion rate of the map actually iterated: P for the unstable
    // branch, P^-1 for the stable one.
    let lambda = if branch.stable {
        1.0 / eigval
    } else {
        eigval
    };
    let doubled = lambda < 0.0;
    let stretch = if doubled { lambda * lambda } else { lambda };
    let apply = |x: [f64; 2]| -> Result<[f64; 2]> {
        let once = if branch.stable {
            map.backward(x)?.0
        } else {
            map.forward(x)?.0
        };
        if !doubled {
            return Ok(once);
        }
        Ok(if branch.stable {
            map.backward(once)?.0
        } else {
            map.forward(once)?.0
        })
    };

    // Fundamental segment along the eigenline.
    let seeds_per_domain = 16usize;
    let side = branch.side as f64;
    let mut current: Vec<[f64; 2]> = (0..=seeds_per_domain)
        .map(|j| {
            let rho = stretch.powf(j as f64 / seeds_per_domain as f64);
            [
                fp.chart[0] + side * seed_eps * rho * eigvec[0],
                fp.chart[1] + side * seed_eps * rho * eigvec[1],
            ]
        })
        .collect();
    let mut points: Vec<[f64; 2]> = current.clone();
    let mut truncated = false;

    for _ in 0..n_iter {
        // Map the previous level.
        let mut pre = Vec::with_capacity(current.len());
        let mut img = Vec::with_capacity(current.len());
        for &p in &current {
            match apply(p) {
                Ok(q) => {
                    pre.push(p);
                    img.push(q);
                }
                Err(_) => {
                    truncated = true;
                    break;
                }
            }
        }
        if img.len() < 2 {
            truncated = true;
            break;
        }
        // Midpoint insertion against spacing and turning-angle thresholds.
        let mut k = 0;
        while k + 1 < img.len() && points.len() + img.len() < max_points {
            let d = dist(img[k], img[k + 1]);
            let needs_angle = k + 2 < img.len()
                && turn_angle(img[k], img[k + 1], img[k + 2]) > opts.max_angle
                && d > 1e-9;
            if d > opts.max_spacing || needs_angle {
                let mid = [
                    0.5 * (pre[k][0] + pre[k + 1][0]),
                    0.5 * (pre[k][1] + pre[k + 1][1]),
                ];
                match apply(mid) {
                    Ok(q) => {
                        pre.insert(k + 1, mid);
                        img.insert(k + 1, q);
                        continue;
                    }
                    Err(_) => {
                        truncated = true;
                        img.truncate(k + 1);
                        break;
                    }
                }
            }
            k += 1;
        }
        points.extend_from_slice(&img);
        if truncated || points.len() >= max_points {
            break;
        }
        current = img;
    }
    Ok(ManifoldTrace { points, truncated })
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn turn_angle(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1]];
    let v = [c[0] - b[0], c[1] - b[1]];
    let dot = u[0] * v[0] + u[1] * v[1];
    let cross = u[0] * v[1] - u[1] * v[0];
    cross.atan2(dot).abs()
}

/// A transversal (or flagged tangential) intersection of two polylines.
#[derive(Debug, Clone, Copy)]
pub struct HomoclinicPoint {
    pub point: [f64; 2],
    /// Local crossing angle between the two polylines, radians in [0, pi/2].
    pub angle: f64,
    /// True when the crossing angle is below the tangency tolerance.
    pub tangency: bool,
}

/// All pairwise segment intersections between two polylines with the local
/// crossing angle; crossings with angle below `tol` are flagged tangencies.
pub fn homoclinic_points(
    stable: &[[f64; 2]],
    unstable: &[[f64; 2]],
    tol: f64,
) -> Vec<HomoclinicPoint> {
    let mut out = Vec::new();
    for sa in stable.windows(2) {
        for sb in unstable.windows(2) {
            if let Some((p, angle)) = segment_intersection(sa[0], sa[1], sb[0], sb[1]) {
                out.push(HomoclinicPoint {
                    point: p,
                    angle,
                    tangency: angle < tol,
                });
            }
        }
    }
    out
}

fn segment_intersection(
    a0: [f64; 2],
    a1: [f64; 2],
    b0: [f64; 2],
    b1: [f64; 2],
) -> Option<([f64; 2], f64)> {
    let da = [a1[0] - a0[0], a1[1] - a0[1]];
    let db = [b1[0] - b0[0], b1[1] - b0[1]];
    let denom = da[0] * db[1] - da[1] * db[0];
    if denom == 0.0 {
        return None;
    }
    let diff = [b0[0] - a0[0], b0[1] - a0[1]];
    let s = (diff[0] * db[1] - diff[1] * db[0]) / denom;
    let t = (diff[0] * da[1] - diff[1] * da[0]) / denom;
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) {
        return None;
    }
    let p = [a0[0] + s * da[0], a0[1] + s * da[1]];
    let na = da[0].hypot(da[1]);
    let nb = db[0].hypot(db[1]);
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    let cosang = ((da[0] * db[0] + da[1] * db[1]) / (na * nb)).clamp(-1.0, 1.0);
    let angle = cosang.acos();
    let angle = angle.min(std::f64::consts::PI - angle);
    Some((p, angle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn straight_polylines_intersect_analytically() {
        let a = vec![[-1.0, -1.0], [1.0, 1.0]];
        let b = vec![[-1.0, 1.0], [1.0, -1.0]];
        let hits = homoclinic_points(&a, &b, 0.01);
        assert_eq!(hits.len(), 1);
        assert_relative_eq!(hits[0].point[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(hits[0].point[1], 0.0, epsilon = 1e-12);
        assert_relative_eq!(hits[0].angle, std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
        assert!(!hits[0].tangency);
    }

    #[test]
    fn shallow_crossing_flagged_as_tangency() {
        let a = vec![[-1.0, 0.0], [1.0, 0.0]];
        let b = vec![[-1.0, -0.001], [1.0, 0.001]];
        let hits = homoclinic_points(&a, &b, 0.01);
        assert_eq!(hits.len(), 1);
        assert!(hits[0].tangency);
    }

    #[test]
    fn parallel_segments_do_not_intersect() {
        let a = vec![[0.0, 0.0], [1.0, 0.0]];
        let b = vec![[0.0, 1.0], [1.0, 1.0]];
        assert!(homoclinic_points(&a, &b, 0.01).is_empty());
    }
}
