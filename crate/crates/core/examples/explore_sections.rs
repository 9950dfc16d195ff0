//! End-to-end probe of the section machinery against the published tables.

use euler3b::scenarios as sc;
use euler3b::sections::{find_fixed_point, periodic_orbit_from_fixed_point, NewtonOptions};
use std::f64::consts::PI;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let map = sc::pi_s_map();

    // One application at the elliptic datum.
    let x_s = sc::elliptic_fixed_point_chart();
    match map.forward(x_s) {
        Ok((img, t)) => eprintln!(
            "P(elliptic datum) = ({:.8}, {:.8} pi), T = {:.7}  [seed ({:.8}, {:.8} pi)]",
            img[0],
            img[1] / PI,
            t,
            x_s[0],
            x_s[1] / PI
        ),
        Err(e) => eprintln!("elliptic forward failed: {e}"),
    }

    let opts = NewtonOptions::default();
    match find_fixed_point(&map, x_s, &opts) {
        Ok(fp) => {
            eprintln!(
                "elliptic fp: ({:.8}, {:.8} pi) residual {:.2e} kind {:?}",
                fp.chart[0],
                fp.chart[1] / PI,
                fp.residual,
                fp.kind
            );
            eprintln!(
                "  eigenvalues: {:.8} + {:.8}i / {:.8} - {:.8}i   |lambda| = {:.8}",
                fp.eigenvalues[0].re,
                fp.eigenvalues[0].im,
                fp.eigenvalues[1].re,
                -fp.eigenvalues[1].im,
                fp.eigenvalues[0].norm()
            );
        }
        Err(e) => eprintln!("elliptic newton failed: {e}"),
    }

    // The hyperbolic point: symmetry-polished seed, then plain Newton.
    let map_plus = map.clone();
    let x_u = sc::polish_symmetric_fixed_point(&map, sc::hyperbolic_fixed_point_chart()).unwrap();
    eprintln!(
        "\npolished hyperbolic seed: ({:.9}, {:.9} pi)",
        x_u[0],
        x_u[1] / PI
    );
    let fp_u = match find_fixed_point(&map_plus, x_u, &opts) {
        Ok(fp) => {
            eprintln!(
                "hyperbolic fp: ({:.8}, {:.8} pi) residual {:.2e} kind {:?}",
                fp.chart[0],
                fp.chart[1] / PI,
                fp.residual,
                fp.kind
            );
            eprintln!(
                "  eigenvalues: {:.9} , {:.7}   (paper: -0.051632609, -19.366447) det {:.6}",
                fp.eigenvalues[0].re,
                fp.eigenvalues[1].re,
                fp.eigenvalues[0].re * fp.eigenvalues[1].re
            );
            Some(fp)
        }
        Err(e) => {
            eprintln!("hyperbolic newton failed: {e}");
            None
        }
    };

    if let Some(fp) = &fp_u {
        match periodic_orbit_from_fixed_point(&map_plus, fp, 32768) {
            Ok(orbit) => {
                eprintln!(
                    "\nGamma_u: T = {:.6} closure {:.2e}",
                    orbit.period, orbit.closure_gap
                );
                eprintln!(
                    "  E min/mid/max = {:.6} / {:.6} / {:.6}  (paper 0.276991 / 0.438944 / 0.530668)",
                    orbit.euler_min(),
                    orbit.euler_mid(),
                    orbit.euler_max()
                );
                eprintln!(
                    "  r in [{:.6}, {:.6}]  (paper r_max 0.274496), rho0 = {:.4} (paper 0.991)",
                    orbit.r_min(),
                    orbit.r_max(),
                    orbit.r_max() / orbit.euler_min()
                );
            }
            Err(e) => eprintln!("orbit extraction failed: {e}"),
        }
    }

    // Covering plane map at the published fixed point.
    let gmap = sc::pi_star_g_map();
    let q0 = sc::covering_fixed_point_chart();
    match gmap.forward(q0) {
        Ok((img, t)) => eprintln!(
            "\nP*(q0) = ({:.7}, {:.7}), T = {:.6}  [q0 = ({:.7}, {:.7})]",
            img[0], img[1], t, q0[0], q0[1]
        ),
        Err(e) => eprintln!("covering map at q0 failed: {e}"),
    }
    match find_fixed_point(&gmap, q0, &opts) {
        Ok(fp) => {
            eprintln!(
                "covering fp: ({:.7}, {:.7}) residual {:.2e} kind {:?}",
                fp.chart[0], fp.chart[1], fp.residual, fp.kind
            );
            eprintln!(
                "  eigenvalues {:.7}, {:.6}; v_s = ({:.6}, {:.6}), v_u = ({:.6}, {:.6})",
                fp.eigenvalues[0].re,
                fp.eigenvalues[1].re,
                fp.eigenvectors[0][0],
                fp.eigenvectors[0][1],
                fp.eigenvectors[1][0],
                fp.eigenvectors[1][1]
            );
            eprintln!("  paper: v_s = (-0.556268, 0.831003), v_u = (-0.998774, 0.0495113)");
        }
        Err(e) => eprintln!("covering newton failed: {e}"),
    }

    // Orbit-transverse section near closest approach: the quasi-tangency.
    let omap = sc::pi_star_orbit_map();
    let x_star = sc::pi_star_orbit_chart();
    match find_fixed_point(&omap, x_star, &opts) {
        Ok(fp) => {
            eprintln!(
                "\npi_star fp: ({:.7}, {:.7} pi) residual {:.2e} kind {:?}",
                fp.chart[0],
                fp.chart[1] / PI,
                fp.residual,
                fp.kind
            );
            if let (Some(vs), Some(vu)) = (fp.stable_eigenvector(), fp.unstable_eigenvector()) {
                let dot = (vs[0] * vu[0] + vs[1] * vu[1]).abs();
                let angle = dot.clamp(-1.0, 1.0).acos();
                eprintln!(
                    "  v_s = ({:.6}, {:.6}) v_u = ({:.6}, {:.6}) angle = {:.7} rad (paper 0.0074651)",
                    vs[0], vs[1], vu[0], vu[1], angle
                );
            }
        }
        Err(e) => eprintln!("pi_star newton failed: {e}"),
    }

    eprintln!("\ntotal wall: {:.1} s", t0.elapsed().as_secs_f64());
}
