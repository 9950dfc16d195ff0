//! First-return maps on section planes in (r, G, g)-space over a fixed energy
//! level, with fixed-point search, eigen-classification, invariant-manifold
//! tracing and homoclinic-intersection detection.

mod manifold;
mod newton;
mod orbit;
mod return_map;

pub use manifold::{
    homoclinic_points, trace_manifold, trace_manifold_with, Branch, HomoclinicPoint,
    ManifoldTrace, TraceOptions,
};
pub use newton::{
    find_fixed_point, jacobian_eigen, map_jacobian, scan_fixed_points, solve_fixed_point_of,
    NewtonOptions,
};
pub use orbit::{periodic_orbit_from_fixed_point, ClosedOrbit};
pub use return_map::{ReturnMap, ReturnMapSpec};

use num_complex::Complex64;

use crate::model::angle_diff;

/// A two-dimensional section of (r, G, g)-space.
///
/// The published sections are of two kinds: planes transverse to a generating
/// orbit (realised as level sets of a linear form; the r = const planes
/// indexed by the orbit radius are the special case used throughout) and the
/// coordinate planes g = const.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SectionPlane {
    /// Plane through `base` orthogonal to `tangent`, both in (r, G, g).
    OrthogonalToOrbit { base: [f64; 3], tangent: [f64; 3] },
    /// The plane r = const (chart (G, g)).
    CoordinateR { r: f64 },
    /// The plane g = const (chart (r, G)).
    CoordinateG { g: f64 },
}

/// Chart labelling of section points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// (G, g) projection, used whenever the plane normal has an r-component.
    MomAngle,
    /// (r, G) projection, used on the g = const planes.
    RadiusMom,
}

impl SectionPlane {
    pub fn orthogonal_to_orbit(base: [f64; 3], tangent: [f64; 3]) -> crate::Result<Self> {
        let norm = (tangent[0].powi(2) + tangent[1].powi(2) + tangent[2].powi(2)).sqrt();
        if !(norm > 0.0) {
            return Err(crate::Error::Degenerate("zero tangent vector".into()));
        }
        Ok(SectionPlane::OrthogonalToOrbit {
            base,
            tangent: [tangent[0] / norm, tangent[1] / norm, tangent[2] / norm],
        })
    }

    pub fn chart(&self) -> Chart {
        match self {
            SectionPlane::CoordinateG { .. } => Chart::RadiusMom,
            _ => Chart::MomAngle,
        }
    }

    /// Signed section function on reduced states [R, G, r, g]; angle
    /// differences are wrapped.
    pub fn sigma(&self, y: &[f64]) -> f64 {
        match *self {
            SectionPlane::OrthogonalToOrbit { base, tangent } => {
                tangent[0] * (y[2] - base[0])
                    + tangent[1] * (y[1] - base[1])
                    + tangent[2] * angle_diff(y[3], base[2])
            }
            SectionPlane::CoordinateR { r } => y[2] - r,
            SectionPlane::CoordinateG { g } => angle_diff(y[3], g),
        }
    }

    /// Largest |sigma| jump a single integration step may produce without
    /// being an angle-wrap artefact.
    pub(crate) fn jump_guard(&self) -> f64 {
        match *self {
            SectionPlane::OrthogonalToOrbit { tangent, .. } => {
                0.5 + std::f64::consts::PI * tangent[2].abs()
            }
            SectionPlane::CoordinateR { .. } => 0.5,
            SectionPlane::CoordinateG { .. } => 1.5,
        }
    }

    /// Chart coordinates of a state on (or near) the plane.
    pub fn project(&self, y: &[f64]) -> [f64; 2] {
        match self.chart() {
            Chart::MomAngle => [y[1], crate::model::wrap_angle(y[3])],
            Chart::RadiusMom => [y[2], y[1]],
        }
    }

    /// The (r, G, g) triple of a chart point on the plane.
    pub fn embed(&self, x: [f64; 2]) -> [f64; 3] {
        match *self {
            SectionPlane::OrthogonalToOrbit { base, tangent } => {
                let d_mom = x[0] - base[1];
                let d_ang = angle_diff(x[1], base[2]);
                let r = if tangent[0] != 0.0 {
                    base[0] - (tangent[1] * d_mom + tangent[2] * d_ang) / tangent[0]
                } else {
                    base[0]
                };
                [r, x[0], x[1]]
            }
            SectionPlane::CoordinateR { r } => [r, x[0], x[1]],
            SectionPlane::CoordinateG { g } => [x[0], x[1], g],
        }
    }
}

/// Linear-part classification of a fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointKind {
    /// Complex-conjugate eigenvalue pair.
    Elliptic,
    /// Real pair with moduli straddling 1.
    Hyperbolic,
    /// Near-defective or otherwise unclassifiable linear part.
    Degenerate,
}

/// Converged fixed point of a return map with its linear data.
#[derive(Debug, Clone)]
pub struct FixedPointRecord {
    pub chart: [f64; 2],
    pub residual: f64,
    pub eigenvalues: [Complex64; 2],
    /// Unit eigenvectors. For a hyperbolic point: stable first, unstable
    /// second. For an elliptic point: real and imaginary parts of the
    /// eigenvector of the first eigenvalue.
    pub eigenvectors: [[f64; 2]; 2],
    pub kind: FixedPointKind,
    /// Finite-difference Jacobian of the map at the point.
    pub jacobian: [[f64; 2]; 2],
}

impl FixedPointRecord {
    pub fn stable_eigenvector(&self) -> Option<[f64; 2]> {
        (self.kind == FixedPointKind::Hyperbolic).then_some(self.eigenvectors[0])
    }

    pub fn unstable_eigenvector(&self) -> Option<[f64; 2]> {
        (self.kind == FixedPointKind::Hyperbolic).then_some(self.eigenvectors[1])
    }

    pub fn stable_eigenvalue(&self) -> f64 {
        self.eigenvalues[0].re
    }

    pub fn unstable_eigenvalue(&self) -> f64 {
        self.eigenvalues[1].re
    }
}

/// Eigen-decomposition of a 2x2 real matrix.
pub(crate) fn eigen2(j: [[f64; 2]; 2]) -> ([Complex64; 2], [[f64; 2]; 2], FixedPointKind) {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr / 4.0 - det;
    let scale = j
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if disc < 0.0 {
        let re = tr / 2.0;
        let im = (-disc).sqrt();
        let l1 = Complex64::new(re, im);
        // Complex eigenvector of l1: columns of (J - l1 I) are dependent;
        // v = (J01, l1 - J00) unless degenerate.
        let (vr, vi) = if j[0][1].abs() > 1e-300 {
            ([j[0][1], re - j[0][0]], [0.0, im])
        } else {
            ([re - j[1][1], j[1][0]], [im, 0.0])
        };
        let nrm = (vr[0] * vr[0] + vr[1] * vr[1] + vi[0] * vi[0] + vi[1] * vi[1]).sqrt();
        (
            [l1, l1.conj()],
            [
                [vr[0] / nrm, vr[1] / nrm],
                [vi[0] / nrm, vi[1] / nrm],
            ],
            FixedPointKind::Elliptic,
        )
    } else {
        let sq = disc.sqrt();
        // Near-defective: the eigenvector basis is unusable.
        if sq < 1e-9 * scale.max(1e-300) {
            let l = Complex64::new(tr / 2.0, 0.0);
            return (
                [l, l],
                [[1.0, 0.0], [0.0, 1.0]],
                FixedPointKind::Degenerate,
            );
        }
        let l_a = tr / 2.0 - sq;
        let l_b = tr / 2.0 + sq;
        let (l_small, l_big) = if l_a.abs() <= l_b.abs() {
            (l_a, l_b)
        } else {
            (l_b, l_a)
        };
        let vec_of = |l: f64| -> [f64; 2] {
            let cand1 = [j[0][1], l - j[0][0]];
            let cand2 = [l - j[1][1], j[1][0]];
            let n1 = cand1[0].hypot(cand1[1]);
            let n2 = cand2[0].hypot(cand2[1]);
            if n1 >= n2 {
                [cand1[0] / n1, cand1[1] / n1]
            } else {
                [cand2[0] / n2, cand2[1] / n2]
            }
        };
        let kind = if l_small.abs() < 1.0 && l_big.abs() > 1.0 {
            FixedPointKind::Hyperbolic
        } else {
            FixedPointKind::Elliptic
        };
        (
            [Complex64::new(l_small, 0.0), Complex64::new(l_big, 0.0)],
            [vec_of(l_small), vec_of(l_big)],
            kind,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eigen_of_a_hyperbolic_matrix() {
        let (vals, vecs, kind) = eigen2([[3.0, 0.0], [0.0, 1.0 / 3.0]]);
        assert_eq!(kind, FixedPointKind::Hyperbolic);
        assert_relative_eq!(vals[0].re, 1.0 / 3.0);
        assert_relative_eq!(vals[1].re, 3.0);
        assert_relative_eq!(vecs[0][1].abs(), 1.0);
        assert_relative_eq!(vecs[1][0].abs(), 1.0);
    }

    #[test]
    fn eigen_of_a_rotation() {
        let th: f64 = 0.3;
        let (vals, _, kind) = eigen2([[th.cos(), -th.sin()], [th.sin(), th.cos()]]);
        assert_eq!(kind, FixedPointKind::Elliptic);
        assert_relative_eq!(vals[0].re, th.cos(), epsilon = 1e-14);
        assert_relative_eq!(vals[0].im.abs(), th.sin(), epsilon = 1e-14);
    }

    #[test]
    fn eigen_of_the_identity_is_degenerate_pair_of_ones() {
        let (vals, _, kind) = eigen2([[1.0, 0.0], [0.0, 1.0]]);
        assert_relative_eq!(vals[0].re, 1.0);
        assert_relative_eq!(vals[1].re, 1.0);
        assert_eq!(kind, FixedPointKind::Degenerate);
    }

    #[test]
    fn plane_embed_round_trip() {
        let plane = SectionPlane::orthogonal_to_orbit([0.5, 0.3, 1.0], [1.0, 2.0, 0.5]).unwrap();
        let x = [0.35, 1.2];
        let p = plane.embed(x);
        let y = [0.0, p[1], p[0], p[2]];
        assert!(plane.sigma(&y).abs() < 1e-14);
        assert_eq!(plane.project(&y), x);

        let plane = SectionPlane::CoordinateG { g: 1.0 };
        let p = plane.embed([0.4, 0.6]);
        assert_eq!(p, [0.4, 0.6, 1.0]);
        assert_eq!(plane.chart(), Chart::RadiusMom);
    }
}
