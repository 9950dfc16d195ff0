use euler3b::flow::{energy_audit, integrate, IntegratorSpec};
use euler3b::kepler::{cartesian_from_reduced, CartesianState, FullSystem, ReducedFull};
use euler3b::model::params_from_masses;

fn main() {
    let masses = params_from_masses(0.06814254, 0.02725702).unwrap();
    let sys = FullSystem::new(masses);
    let rf = ReducedFull {
        cee: 9.99, mom_g: 0.99, lambda: 1.0, mom_r: -0.5,
        node_c: 0.3, g: 2.1, ell: 4.0, r: 3.0,
    };
    let cs = cartesian_from_reduced(&rf).unwrap();
    for tol in [1e-11, 1e-12, 1e-13] {
        let spec = IntegratorSpec { dense: false, ..IntegratorSpec::default().with_tol(tol) };
        let traj = integrate(&sys, &cs.to_array(), (0.0, 100.0), &spec).unwrap();
        let (drift, series) = energy_audit(&traj, |y| {
            sys.hamiltonian(&CartesianState::from_array(y.try_into().unwrap()))
        }).unwrap();
        let mid = series[series.len()/2];
        println!("tol={tol:.0e}: steps={} drift={drift:.3e}  half-time drift={:.3e} at t={:.1}",
                 traj.samples.len()-1, mid.1, mid.0);
    }
    // minimum pair distance along the run
    let spec = IntegratorSpec { dense: false, ..IntegratorSpec::default().with_tol(1e-12) };
    let traj = integrate(&sys, &cs.to_array(), (0.0, 100.0), &spec).unwrap();
    let mut dmin = f64::INFINITY;
    for (_, y) in &traj.samples {
        let cs = CartesianState::from_array(y.as_slice().try_into().unwrap());
        dmin = dmin.min(cs.collision_margin());
    }
    println!("min collision margin: {dmin:.4}");
}
