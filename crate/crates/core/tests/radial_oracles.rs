use strip_core::radial::{closed_form_1d, discrete_ground_state, shoot_ground_state, trivial_branch_energy, ShootingOptions};
use strip_core::{Error, ProblemParams, RadialGrid};

#[test]
fn shooting_matches_sech_profiles() {
    for p in [2.0, 3.0, 5.0] {
        let grid = RadialGrid::new(1, 0.01, 25.0).unwrap();
        let w = shoot_ground_state(1, p, grid, &ShootingOptions::default()).unwrap();
        let err = grid.nodes().iter().zip(&w.values).map(|(r, v)| (v - closed_form_1d(p, *r)).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "p = {p}: {err:e}");
        assert!(w.decay_ok);
    }
}

#[test]
fn discrete_amplitude_converges_at_second_order() {
    for d in [1, 2] {
        let a: Vec<f64> =
            [0.16, 0.08, 0.04, 0.02].iter().map(|&h| discrete_ground_state(d, 3.0, RadialGrid::new(d, h, 20.0).unwrap()).unwrap().amplitude).collect();
        for k in 0..2 {
            let ratio = (a[k] - a[k + 1]) / (a[k + 1] - a[k + 2]);
            assert!((3.5..=4.5).contains(&ratio), "d = {d}: refinement ratio {ratio}");
        }
    }
}

#[test]
fn planar_ground_state_amplitude() {
    // Known value of the positive radial solution of Δw - w + w³ = 0 in the plane.
    let w = shoot_ground_state(2, 3.0, RadialGrid::new(2, 0.005, 25.0).unwrap(), &ShootingOptions::default()).unwrap();
    assert!((w.amplitude - 2.206_2).abs() < 1e-3, "{}", w.amplitude);
}

#[test]
fn cubic_line_trivial_constant() {
    // ∫ (√2 sech x)⁴ dx = 16/3, so γ₀ = (16/3)^{1/2}.
    let params = ProblemParams::new(2, 3.0, 1.0).unwrap();
    let w = shoot_ground_state(1, 3.0, RadialGrid::new(1, 0.01, 25.0).unwrap(), &ShootingOptions::default()).unwrap();
    let b = trivial_branch_energy(&params, &w).unwrap();
    assert!((b.gamma0 - (16.0f64 / 3.0).sqrt()).abs() < 1e-6, "{}", b.gamma0);
    assert!((b.exponent - 1.5).abs() < 1e-15);
}

#[test]
fn supercritical_exponent_rejected() {
    let grid = RadialGrid::new(3, 0.01, 20.0).unwrap();
    assert!(matches!(shoot_ground_state(3, 5.5, grid, &ShootingOptions::default()), Err(Error::Supercritical { .. })));
}
