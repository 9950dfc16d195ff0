//! Canonical experiment presets: the two published parameter sets, the
//! section planes around the elliptic and hyperbolic periodic orbits, and the
//! covering-relation box data. Tests and the command-line tools share these.

use crate::model::{ModelParams, QuadratureSpec, ReducedState, ReducedSystem};
use crate::sections::{ReturnMap, ReturnMapSpec, SectionPlane};
use crate::IntegratorSpec;
use std::f64::consts::PI;

/// First worked parameter set: alpha = 100, beta = 120, C = 10.
pub fn example1_params() -> ModelParams {
    ModelParams::new(100.0, 120.0, 10.0).expect("valid parameters")
}

/// Second worked parameter set: alpha = 50, beta = 20, C = 1.6, on which all
/// section, spread and covering experiments run.
pub fn example2_params() -> ModelParams {
    ModelParams::new(50.0, 20.0, 1.6).expect("valid parameters")
}

/// The fixed energy level of the second example.
pub const ENERGY_LEVEL: f64 = -76.887;

/// Section radius: every published section seed sits at this outer radius.
pub const SECTION_RADIUS: f64 = 0.13165;

/// The elliptic periodic datum (full precision of the error-control section;
/// the four-column table rounds it for display).
pub fn gamma_s_datum() -> ReducedState {
    ReducedState::new(-11.3668, 0.992515, SECTION_RADIUS, 0.878179 * PI).expect("valid state")
}

/// Elliptic fixed point (G, g) on the negative-R sheet.
pub fn elliptic_fixed_point_chart() -> [f64; 2] {
    [0.992515, 0.878179 * PI]
}

/// Hyperbolic fixed point (G, g); it lives on the positive-R sheet of the
/// same section (its unfolded radial momentum is +10.33...).
pub fn hyperbolic_fixed_point_chart() -> [f64; 2] {
    [0.717909, 1.81405 * PI]
}

/// Published eigenvalues of the hyperbolic fixed point.
pub const HYPERBOLIC_EIGENVALUES: [f64; 2] = [-0.051632609, -19.366447];

/// Elliptic-orbit period (empirical; used only to size horizons).
pub const PERIOD_ELLIPTIC: f64 = 0.0675;
/// Hyperbolic-orbit period (empirical; used only to size horizons).
pub const PERIOD_HYPERBOLIC: f64 = 0.156;

/// Two initial data of the first example, seeded exactly on the saddle of
/// their Euler level manifold: (level, state).
pub fn example1_saddle_data() -> [(f64, ReducedState); 2] {
    [
        (0.2, ReducedState::new(0.0, 0.0, 0.2, PI).expect("valid state")),
        (
            5.0 / 6.0,
            ReducedState::new(0.0, 0.0, 5.0 / 6.0, PI).expect("valid state"),
        ),
    ]
}

/// The four backward-forward audit seeds of the error-control section.
pub fn audit_data() -> [ReducedState; 4] {
    [
        ReducedState::new(-11.3668, 0.992515, 0.13165, 0.878179 * PI).unwrap(),
        ReducedState::new(-10.6704, 0.8, 0.13165, PI).unwrap(),
        ReducedState::new(-9.07533, 0.5, 0.13165, PI).unwrap(),
        ReducedState::new(-8.94348, 0.48, 0.13165, PI).unwrap(),
    ]
}

/// Quadrature/integrator pairing tuned for the published 2.5e-12 drift.
pub fn audit_integrator() -> IntegratorSpec {
    IntegratorSpec {
        dense: false,
        ..IntegratorSpec::default().with_tol(3e-15)
    }
}

pub fn audit_quadrature() -> QuadratureSpec {
    QuadratureSpec::default().with_rel_tol(1e-15)
}

/// Default working tolerances for section machinery: accurate enough for
/// 1e-10 fixed-point residuals at a fraction of the audit cost.
pub fn section_integrator() -> IntegratorSpec {
    IntegratorSpec {
        dense: false,
        ..IntegratorSpec::default().with_tol(1e-12)
    }
}

pub fn section_system() -> ReducedSystem {
    ReducedSystem::new(
        example2_params(),
        QuadratureSpec::default().with_rel_tol(1e-13),
    )
}

/// The section through the elliptic datum, negative-R sheet (the branch of
/// the elliptic orbit): first-return map with inward crossings.
pub fn pi_s_map() -> ReturnMap {
    let spec = ReturnMapSpec::new(
        SectionPlane::CoordinateR { r: SECTION_RADIUS },
        ENERGY_LEVEL,
        -1.0,
        -1.0,
    )
    .with_max_time(0.6)
    .with_integ(section_integrator());
    ReturnMap::new(section_system(), spec)
}

/// The positive-R sheet of the same section (the branch carrying the
/// hyperbolic fixed point), outward crossings.
pub fn pi_s_map_plus() -> ReturnMap {
    let spec = ReturnMapSpec::new(
        SectionPlane::CoordinateR { r: SECTION_RADIUS },
        ENERGY_LEVEL,
        1.0,
        1.0,
    )
    .with_max_time(0.6)
    .with_integ(section_integrator());
    ReturnMap::new(section_system(), spec)
}

/// Radius of the section transverse to the hyperbolic orbit near its
/// closest approach to the singular envelope.
pub const PI_STAR_RADIUS: f64 = 0.26987;

/// Chart point at which the quasi-tangency is measured: (G, g) of the
/// hyperbolic orbit on the r = 0.26987 section.
pub fn pi_star_orbit_chart() -> [f64; 2] {
    [0.345986, 1.27 * PI]
}

/// Section transverse to the hyperbolic orbit at r = 0.26987 (ascending
/// crossings, positive-R sheet), chart (G, g).
pub fn pi_star_orbit_map() -> ReturnMap {
    let spec = ReturnMapSpec::new(
        SectionPlane::CoordinateR { r: PI_STAR_RADIUS },
        ENERGY_LEVEL,
        1.0,
        1.0,
    )
    .with_max_time(0.6)
    .with_integ(section_integrator());
    ReturnMap::new(section_system(), spec)
}

/// The angle of the coordinate plane used for the covering relations.
pub const G_STAR: f64 = 1.27 * PI;

/// The g = 1.27 pi coordinate section with chart (r, G): the covering-relation
/// map. The hyperbolic orbit crosses it on the positive-R sheet with g
/// decreasing.
pub fn pi_star_g_map() -> ReturnMap {
    let spec = ReturnMapSpec::new(
        SectionPlane::CoordinateG { g: G_STAR },
        ENERGY_LEVEL,
        1.0,
        -1.0,
    )
    .with_max_time(0.6)
    .with_integ(section_integrator());
    ReturnMap::new(section_system(), spec)
}

/// Published fixed point of the covering map in the (r, G) chart.
pub fn covering_fixed_point_chart() -> [f64; 2] {
    [0.26987, 0.345986]
}

/// Published box data of the covering relations: stable/unstable directions
/// and the three parallelograms (centres relative to q0, interval pairs).
pub mod boxes {
    /// Stable direction of the covering map at q0, (r, G) chart.
    pub const V_S: [f64; 2] = [-0.556268, 0.831003];
    /// Perturbed stable direction used for the middle box.
    pub const V_S_TILDE: [f64; 2] = [-0.556143, 0.831003];
    /// Unstable direction at q0.
    pub const V_U: [f64; 2] = [-0.998774, 0.0495113];

    pub const Q0: [f64; 2] = [0.26987, 0.345986];
    pub const Q1: [f64; 2] = [0.269552, 0.34598];
    pub const Q2: [f64; 2] = [0.27124, 0.343432];

    pub const A0: [f64; 2] = [-0.000719075, 0.000719075];
    pub const B0: [f64; 2] = [-0.0000400491, 0.0000400491];
    pub const A1: [f64; 2] = [-0.000028763, 0.000208532];
    pub const B1: [f64; 2] = [-0.000144177, 0.00000400491];
    pub const A2: [f64; 2] = [-0.000179769, 0.000107861];
    pub const B2: [f64; 2] = [-0.00000400491, 0.000200246];
}

use crate::sections::{find_fixed_point, solve_fixed_point_of, FixedPointRecord, NewtonOptions};
use crate::Result;

/// Polish a seed on a symmetric periodic orbit using the reversal symmetry
/// (R, G, r, g) -> (-R, G, r, 2 pi - g): from a negative-sheet chart point,
/// follow the flow to the next positive-sheet crossing and mirror it back.
/// Symmetric orbits are fixed points of this composite, which never follows
/// the long hyperbolic excursion and is therefore numerically tame even from
/// display-rounded seeds.
pub fn polish_symmetric_fixed_point(map_minus: &ReturnMap, seed: [f64; 2]) -> Result<[f64; 2]> {
    let residual = |x: [f64; 2]| -> Result<[f64; 2]> {
        let state = map_minus.unfold(x)?;
        let raw = map_minus.propagate_custom(&state.to_array(), 1.0, 1.0, 1.0)?;
        let mirrored = [
            raw.state[1],
            crate::model::wrap_angle(-raw.state[3]),
        ];
        Ok(map_minus.chart_diff(mirrored, x))
    };
    let opts = NewtonOptions {
        tol: 1e-12,
        ..NewtonOptions::default()
    };
    let (x, _) = solve_fixed_point_of(residual, seed, &opts)?;
    Ok(x)
}

/// The elliptic fixed point of the section map, Newton-refined.
pub fn elliptic_fixed_point(map: &ReturnMap) -> Result<FixedPointRecord> {
    find_fixed_point(map, elliptic_fixed_point_chart(), &NewtonOptions::default())
}

/// The hyperbolic fixed point of the section map. The display-rounded seed is
/// polished through the reversal symmetry first; the published coordinates
/// are only accurate to ~1e-5 and the full-period map is too unstable to
/// iterate from that far out.
pub fn hyperbolic_fixed_point(map: &ReturnMap) -> Result<FixedPointRecord> {
    let polished = polish_symmetric_fixed_point(map, hyperbolic_fixed_point_chart())?;
    find_fixed_point(map, polished, &NewtonOptions::default())
}
