//! Tolerance calibration for the energy audit: integrate the elliptic
//! periodic orbit over many returns and report the relative energy drift.

use euler3b::flow::{energy_audit, integrate, IntegratorSpec};
use euler3b::model::{ModelParams, QuadratureSpec, ReducedState, ReducedSystem};
use std::f64::consts::PI;
use std::time::Instant;

fn main() {
    let params = ModelParams::new(50.0, 20.0, 1.6).unwrap();
    let s0 = ReducedState::new(-11.3668, 0.992515, 0.13165, 0.878179 * PI).unwrap();
    let t_s = 0.06748;
    for (itol, qtol, periods) in [
        (1e-14, 1e-15, 200.0),
        (3e-15, 1e-15, 200.0),
        (1e-15, 1e-15, 200.0),
    ] {
        let sys = ReducedSystem::new(params, QuadratureSpec::default().with_rel_tol(qtol));
        let spec = IntegratorSpec {
            dense: false,
            ..IntegratorSpec::default().with_tol(itol)
        };
        let t0 = Instant::now();
        let traj = integrate(&sys, &s0.to_array(), (0.0, periods * t_s), &spec).unwrap();
        let wall = t0.elapsed().as_secs_f64();
        let audit_sys = ReducedSystem::new(params, QuadratureSpec::default().with_rel_tol(1e-14));
        let (drift, _) = energy_audit(&traj, |y| {
            audit_sys.hamiltonian(&ReducedState::from_array([y[0], y[1], y[2], y[3]]))
        })
        .unwrap();
        println!(
            "itol={itol:.0e} qtol={qtol:.0e} periods={periods:>5}: drift={drift:.3e} steps={} wall={wall:.2}s  ({:.2} ms/period)",
            traj.samples.len() - 1,
            1e3 * wall / periods
        );
        if !traj.complete {
            println!("   INCOMPLETE: {:?}", traj.diagnostic);
        }
    }
}
