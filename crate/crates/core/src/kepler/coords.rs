//! The planar coordinate map between Cartesian variables and the
//! rotation-reduced set (C, G, Lambda, R, c, g, ell, r), in both directions,
//! plus the Lambda-rescaling to the normalised chart.

use crate::error::{Error, Result};
use crate::model::wrap_angle;

use super::solve::solve_kepler;
use super::{cross_z, dot, norm, CartesianState, ReducedFull};

/// Rebuild the Cartesian state from reduced coordinates.
pub fn cartesian_from_reduced(rf: &ReducedFull) -> Result<CartesianState> {
    rf.validate()?;
    let (sin_c, cos_c) = rf.node_c.sin_cos();
    let xhat = [cos_c, sin_c];
    let khat_x = [-sin_c, cos_c];
    let x_prime = [rf.r * xhat[0], rf.r * xhat[1]];
    let transverse = (rf.cee - rf.mom_g) / rf.r;
    let y_prime = [
        rf.mom_r * xhat[0] + transverse * khat_x[0],
        rf.mom_r * xhat[1] + transverse * khat_x[1],
    ];

    let a = rf.lambda * rf.lambda;
    let e = (1.0 - (rf.mom_g / rf.lambda).powi(2)).sqrt();
    let (sin_p, cos_p) = (rf.node_c + rf.g).sin_cos();
    let p_dir = [cos_p, sin_p];
    let q_dir = [-sin_p, cos_p];
    let xi = solve_kepler(rf.ell, e, 1e-14)?;
    let (sin_xi, cos_xi) = xi.sin_cos();
    let root = (1.0 - e * e).sqrt();
    let x = [
        a * ((cos_xi - e) * p_dir[0] + root * sin_xi * q_dir[0]),
        a * ((cos_xi - e) * p_dir[1] + root * sin_xi * q_dir[1]),
    ];
    let scale = 1.0 / (rf.lambda * (1.0 - e * cos_xi));
    let y = [
        scale * (-sin_xi * p_dir[0] + root * cos_xi * q_dir[0]),
        scale * (-sin_xi * p_dir[1] + root * cos_xi * q_dir[1]),
    ];
    Ok(CartesianState {
        y_prime,
        y,
        x_prime,
        x,
    })
}

/// Reduce a Cartesian state; fails off the elliptic prograde domain.
pub fn reduced_from_cartesian(cs: &CartesianState) -> Result<ReducedFull> {
    cs.check_off_collision()?;
    let mom_g = cross_z(cs.x, cs.y);
    let outer = cross_z(cs.x_prime, cs.y_prime);
    if mom_g <= 0.0 || outer < 0.0 {
        return Err(Error::domain(format!(
            "prograde convention requires G > 0 and C - G >= 0 (got {mom_g}, {outer})"
        )));
    }
    let cee = mom_g + outer;
    let r = norm(cs.x_prime);
    let mom_r = dot(cs.y_prime, cs.x_prime) / r;
    let node_c = cs.x_prime[1].atan2(cs.x_prime[0]);

    let rx = norm(cs.x);
    let energy = 0.5 * dot(cs.y, cs.y) - 1.0 / rx;
    if energy >= 0.0 {
        return Err(Error::NotElliptic { energy });
    }
    let a = -0.5 / energy;
    let lambda = a.sqrt();

    // Laplace-Runge-Lenz vector: A = y x (x x y) - x/|x|.
    let lrl = [
        mom_g * cs.y[1] - cs.x[0] / rx,
        -mom_g * cs.y[0] - cs.x[1] / rx,
    ];
    let ecc = norm(lrl);
    if ecc < 1e-12 {
        return Err(Error::PerihelionUndefined { ecc });
    }
    let p_dir = [lrl[0] / ecc, lrl[1] / ecc];
    let xhat = [cs.x_prime[0] / r, cs.x_prime[1] / r];
    let g = cross_z(xhat, p_dir).atan2(dot(xhat, p_dir));

    let q_dir = [-p_dir[1], p_dir[0]];
    let cos_xi = dot(cs.x, p_dir) / a + ecc;
    let sin_xi = dot(cs.x, q_dir) / (a * (1.0 - ecc * ecc).sqrt());
    let xi = sin_xi.atan2(cos_xi);
    let ell = xi - ecc * xi.sin();

    Ok(ReducedFull {
        cee,
        mom_g,
        lambda,
        mom_r,
        node_c: wrap_angle(node_c),
        g: wrap_angle(g),
        ell: wrap_angle(ell),
        r,
    })
}

/// Rescale to the a-dimensional chart with Lambda' = 1:
/// R' = R Lambda, G' = G / Lambda, r' = r / Lambda^2, g' = g, C' = C / Lambda.
/// Energies scale by Lambda^-2 and the Euler integral by Lambda^2.
pub fn rescale_to_unit_lambda(rf: &ReducedFull) -> ReducedFull {
    let l = rf.lambda;
    ReducedFull {
        cee: rf.cee / l,
        mom_g: rf.mom_g / l,
        lambda: 1.0,
        mom_r: rf.mom_r * l,
        node_c: rf.node_c,
        g: rf.g,
        ell: rf.ell,
        r: rf.r / (l * l),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn sample_reduced(rng: &mut impl Rng) -> ReducedFull {
        let lambda = rng.gen_range(0.5..1.8);
        ReducedFull {
            cee: 0.0, // set below so that C - G >= 0
            mom_g: rng.gen_range(0.05..0.95) * lambda,
            lambda,
            mom_r: rng.gen_range(-8.0..8.0),
            node_c: rng.gen_range(0.0..std::f64::consts::TAU),
            g: rng.gen_range(0.0..std::f64::consts::TAU),
            ell: rng.gen_range(0.0..std::f64::consts::TAU),
            r: rng.gen_range(0.05..2.5),
        }
    }

    #[test]
    fn round_trip_on_a_grid_of_valid_states() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let mut rf = sample_reduced(&mut rng);
            rf.cee = rf.mom_g + rng.gen_range(0.0..3.0);
            let cs = cartesian_from_reduced(&rf).unwrap();
            let back = reduced_from_cartesian(&cs).unwrap();
            assert_relative_eq!(back.cee, rf.cee, epsilon = 1e-10, max_relative = 1e-10);
            assert_relative_eq!(back.mom_g, rf.mom_g, epsilon = 1e-10, max_relative = 1e-10);
            assert_relative_eq!(back.lambda, rf.lambda, epsilon = 1e-10, max_relative = 1e-10);
            assert_relative_eq!(back.mom_r, rf.mom_r, epsilon = 1e-9, max_relative = 1e-9);
            assert_relative_eq!(back.node_c, rf.node_c, epsilon = 1e-10);
            assert!(crate::model::angle_diff(back.g, rf.g).abs() < 1e-9);
            assert!(crate::model::angle_diff(back.ell, rf.ell).abs() < 1e-9);
            assert_relative_eq!(back.r, rf.r, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn defining_relations_of_the_reduction() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let mut rf = sample_reduced(&mut rng);
            rf.cee = rf.mom_g + rng.gen_range(0.0..2.0);
            let cs = cartesian_from_reduced(&rf).unwrap();
            assert_relative_eq!(cross_z(cs.x, cs.y), rf.mom_g, epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(
                cross_z(cs.x_prime, cs.y_prime),
                rf.cee - rf.mom_g,
                epsilon = 1e-12,
                max_relative = 1e-11
            );
            let r = norm(cs.x_prime);
            assert_relative_eq!(dot(cs.y_prime, cs.x_prime) / r, rf.mom_r, epsilon = 1e-12, max_relative = 1e-11);
            // vis-viva of the constructed inner ellipse
            let kep = 0.5 * dot(cs.y, cs.y) - 1.0 / norm(cs.x);
            assert_relative_eq!(kep, -0.5 / (rf.lambda * rf.lambda), epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn rotation_shifts_only_the_node_angle() {
        let rf = ReducedFull {
            cee: 1.6,
            mom_g: 0.9,
            lambda: 1.0,
            mom_r: -3.0,
            node_c: 0.7,
            g: 2.0,
            ell: 1.1,
            r: 0.4,
        };
        let cs = cartesian_from_reduced(&rf).unwrap();
        let phi: f64 = 0.9;
        let rot = |v: [f64; 2]| {
            [
                phi.cos() * v[0] - phi.sin() * v[1],
                phi.sin() * v[0] + phi.cos() * v[1],
            ]
        };
        let rotated = CartesianState {
            y_prime: rot(cs.y_prime),
            y: rot(cs.y),
            x_prime: rot(cs.x_prime),
            x: rot(cs.x),
        };
        let back = reduced_from_cartesian(&rotated).unwrap();
        assert_relative_eq!(back.cee, rf.cee, epsilon = 1e-12);
        assert_relative_eq!(back.mom_g, rf.mom_g, epsilon = 1e-12);
        assert_relative_eq!(back.lambda, rf.lambda, epsilon = 1e-12);
        assert_relative_eq!(back.mom_r, rf.mom_r, epsilon = 1e-12);
        assert!(crate::model::angle_diff(back.g, rf.g).abs() < 1e-12);
        assert!(crate::model::angle_diff(back.ell, rf.ell).abs() < 1e-12);
        assert_relative_eq!(back.r, rf.r, epsilon = 1e-12);
        assert!(crate::model::angle_diff(back.node_c, rf.node_c + phi).abs() < 1e-12);
    }

    #[test]
    fn retrograde_states_rejected() {
        let rf = ReducedFull {
            cee: 1.6,
            mom_g: 0.9,
            lambda: 1.0,
            mom_r: 0.0,
            node_c: 0.0,
            g: 1.0,
            ell: 0.5,
            r: 0.4,
        };
        let mut cs = cartesian_from_reduced(&rf).unwrap();
        // Flip the inner momentum: G becomes negative.
        cs.y = [-cs.y[0], -cs.y[1]];
        assert!(reduced_from_cartesian(&cs).is_err());
    }

    #[test]
    fn coordinate_singularity_reported() {
        let rf = ReducedFull {
            cee: 2.0,
            mom_g: 1.0,
            lambda: 1.0,
            mom_r: 0.0,
            node_c: 0.0,
            g: 0.0,
            ell: 0.0,
            r: 1.0,
        };
        assert!(matches!(
            cartesian_from_reduced(&rf),
            Err(Error::CoordinateSingularity { .. })
        ));
    }

    #[test]
    fn unit_lambda_rescaling_identities() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let mut rf = sample_reduced(&mut rng);
            rf.cee = rf.mom_g + rng.gen_range(0.0..2.0);
            let hat = rescale_to_unit_lambda(&rf);
            assert_relative_eq!(hat.lambda, 1.0);
            // Euler integral scales by Lambda^2.
            let e_full = {
                let gg = rf.mom_g / rf.lambda;
                let level = crate::model::euler_integral(rf.r / (rf.lambda * rf.lambda), gg, rf.g)
                    .unwrap();
                rf.lambda * rf.lambda * level
            };
            let e_hat = crate::model::euler_integral(hat.r, hat.mom_g, hat.g).unwrap();
            assert_relative_eq!(
                e_full,
                rf.lambda * rf.lambda * e_hat,
                epsilon = 1e-12,
                max_relative = 1e-12
            );
            // Identity on a Lambda = 1 input.
            let same = rescale_to_unit_lambda(&hat);
            assert_relative_eq!(same.mom_r, hat.mom_r);
            assert_relative_eq!(same.r, hat.r);
        }
    }
}
