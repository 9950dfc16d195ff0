//! Enumerate the section crossings of the hyperbolic orbit over one period.

use euler3b::flow::{integrate, IntegratorSpec};
use euler3b::model::euler_integral;
use euler3b::scenarios as sc;
use std::f64::consts::PI;

fn main() {
    let sys = sc::section_system();
    // Unfold the hyperbolic chart point on the negative sheet (the branch the
    // short-leg symmetry test validated).
    let x = sc::hyperbolic_fixed_point_chart();
    let mom_r = sys
        .mom_r_from_energy(sc::ENERGY_LEVEL, sc::SECTION_RADIUS, x[0], x[1], -1.0)
        .unwrap();
    println!("seed: R = {mom_r:.6}, G = {:.6}, r = {:.5}, g = {:.6} pi", x[0], sc::SECTION_RADIUS, x[1] / PI);
    let y0 = [mom_r, x[0], sc::SECTION_RADIUS, x[1]];
    let spec = IntegratorSpec { dense: true, ..IntegratorSpec::default().with_tol(1e-12) };
    let traj = integrate(&sys, &y0, (0.0, 0.2), &spec).unwrap();
    println!("complete: {} ({} steps)", traj.complete, traj.samples.len());

    // Scan r = 0.13165 and g = 1.27 pi crossings from dense samples.
    let n = 20000;
    let t_end = traj.end_time();
    let mut prev: Option<(f64, Vec<f64>)> = None;
    for k in 0..=n {
        let t = t_end * k as f64 / n as f64;
        let Some(y) = traj.state_at(t) else { continue };
        if let Some((tp, yp)) = &prev {
            let s_old = yp[2] - sc::SECTION_RADIUS;
            let s_new = y[2] - sc::SECTION_RADIUS;
            if s_old * s_new < 0.0 {
                println!(
                    "r-crossing  t ~ {:.5}: R = {:+.4}, G = {:.6}, g = {:.6} pi (dir {})",
                    0.5 * (tp + t), y[0], y[1], y[3].rem_euclid(2.0 * PI) / PI,
                    if s_new > s_old { "+" } else { "-" }
                );
            }
            let w_old = euler3b::model::angle_diff(yp[3], sc::G_STAR);
            let w_new = euler3b::model::angle_diff(y[3], sc::G_STAR);
            if w_old * w_new < 0.0 && (w_new - w_old).abs() < 1.0 {
                println!(
                    "g*-crossing t ~ {:.5}: R = {:+.4}, G = {:.6}, r = {:.6}  (E = {:.6})",
                    0.5 * (tp + t), y[0], y[1], y[2],
                    euler_integral(y[2], y[1], y[3]).unwrap()
                );
            }
        }
        prev = Some((t, y));
    }
    // extremes of r and E
    let mut r_min = f64::INFINITY;
    let mut r_max = f64::NEG_INFINITY;
    let mut tr_min = 0.0;
    let mut tr_max = 0.0;
    for k in 0..=n {
        let t = t_end * k as f64 / n as f64;
        let Some(y) = traj.state_at(t) else { continue };
        if y[2] < r_min { r_min = y[2]; tr_min = t; }
        if y[2] > r_max { r_max = y[2]; tr_max = t; }
    }
    let g_at = |t: f64| traj.state_at(t).unwrap()[3].rem_euclid(2.0 * PI) / PI;
    println!("r_min = {:.6} at t = {:.5} (g = {:.4} pi); r_max = {:.6} at t = {:.5} (g = {:.4} pi)",
             r_min, tr_min, g_at(tr_min), r_max, tr_max, g_at(tr_max));
}
