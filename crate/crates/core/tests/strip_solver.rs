use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use strip_core::radial::{discrete_trivial_field, extend_trivial_to_strip, shoot_ground_state, trivial_branch_energy, ShootingOptions};
use strip_core::strip::{
    el_residual, large_l_asymptote, minimize_quotient, multistart, quotient, rearrange_monotone, rescale_between_formulations, Formulation,
    SolverOptions, Status,
};
use strip_core::validation::smooth_random_field;
use strip_core::{ProblemParams, RadialGrid, StripField, StripGrid};

fn grid(l: f64) -> StripGrid {
    StripGrid::new(RadialGrid::new(1, 0.04, (20.0 / l).min(40.0)).unwrap(), 24).unwrap()
}

fn line_profile() -> strip_core::RadialProfile {
    shoot_ground_state(1, 3.0, RadialGrid::new(1, 0.01, 25.0).unwrap(), &ShootingOptions::default()).unwrap()
}

#[test]
fn extension_at_unit_length_copies_the_profile() {
    let w0 = line_profile();
    let params = ProblemParams::new(2, 3.0, 1.0).unwrap();
    let g = grid(1.0);
    let u = extend_trivial_to_strip(&w0, &params, g).unwrap();
    for i in 0..g.radial.n {
        for j in 0..g.m {
            assert_eq!(u.at(i, j), u.at(i, 0));
        }
        assert!((u.at(i, 0) - w0.value_at(g.radial.r(i))).abs() < 1e-14);
    }
    assert_eq!(u.transverse_derivative_norm(), 0.0);
    let cstar = trivial_branch_energy(&params, &w0).unwrap().cstar(1.0);
    assert!((quotient(&u, &params) - cstar).abs() / cstar < 2e-3);
}

#[test]
fn trivial_start_below_critical_length() {
    let params = ProblemParams::new(2, 3.0, 1.0).unwrap();
    let g = grid(1.0);
    let init = discrete_trivial_field(&params, g).unwrap();
    let m = minimize_quotient(&params, g, &init, &SolverOptions::default()).unwrap();
    assert_eq!(m.status, Status::Converged);
    assert!(m.iterations <= 5);
    assert!((m.energy.quotient - (16.0f64 / 3.0).sqrt()).abs() < 1e-3, "{}", m.energy.quotient);
    assert!(m.field.transverse_derivative_norm() < 1e-6);
    assert!(el_residual(&m.field, &params) < SolverOptions::default().tol);
}

#[test]
fn multistart_breaks_symmetry_above_critical_length() {
    let params = ProblemParams::new(2, 3.0, 2.5).unwrap();
    let g = grid(2.5);
    let run = multistart(&params, g, &SolverOptions::default()).unwrap();
    let ctriv = quotient(&run.trivial, &params);
    assert!(run.best.energy.quotient < ctriv * (1.0 - 1e-3));
    assert!(run.best.field.transverse_derivative_norm() > 1e-2);
}

#[test]
fn residual_separates_solutions_from_generic_fields() {
    let params = ProblemParams::new(2, 3.0, 1.0).unwrap();
    let g = grid(1.0);
    let trivial = discrete_trivial_field(&params, g).unwrap();
    assert!(el_residual(&trivial, &params) < 1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let phi = smooth_random_field(g, 1.0, &mut rng);
    let positive = StripField::new(g, phi.values.iter().map(|x| x.abs() + 0.01).collect()).unwrap();
    assert!(el_residual(&positive, &params) > 1e-2);
}

#[test]
fn rearrangement_of_monotone_field_is_identity() {
    let g = grid(1.0);
    let u = StripField::from_fn(g, |r, t| (-r).exp() * (1.0 + t));
    assert_eq!(rearrange_monotone(&u), u);
    let flipped = StripField::from_fn(g, |r, t| (-r).exp() * (2.0 - t));
    let back = rearrange_monotone(&flipped);
    let params = ProblemParams::new(2, 3.0, 1.0).unwrap();
    assert!((quotient(&back, &params) - quotient(&flipped, &params)).abs() < 1e-10 * quotient(&back, &params));
}

#[test]
fn trivial_field_stays_trivial_under_rescaling() {
    let params = ProblemParams::new(2, 3.0, 1.7).unwrap();
    let trivial = discrete_trivial_field(&params, grid(1.7)).unwrap();
    let wide = rescale_between_formulations(&trivial, &params, Formulation::WidthL);
    assert!(wide.is_transverse_constant(0.0));
    assert!((wide.grid.height - 1.7).abs() < 1e-12);
}

#[test]
fn large_l_prediction_for_the_cubic_line() {
    let params = ProblemParams::new(2, 3.0, 12.0).unwrap();
    let w2 = shoot_ground_state(2, 3.0, RadialGrid::new(2, 0.01, 25.0).unwrap(), &ShootingOptions::default()).unwrap();
    let w2_fine = shoot_ground_state(2, 3.0, RadialGrid::new(2, 0.005, 25.0).unwrap(), &ShootingOptions::default()).unwrap();
    let a = large_l_asymptote(&params, &w2).unwrap();
    let b = large_l_asymptote(&params, &w2_fine).unwrap();
    assert!((a.exponent - 1.0).abs() < 1e-15);
    assert!((a.limit - b.limit).abs() < 1e-4 * b.limit);
}

#[test]
fn quotient_converges_at_second_order() {
    for l in [1.0, 2.5] {
        let params = ProblemParams::new(2, 3.0, l).unwrap();
        let q: Vec<f64> = [(0.08, 9), (0.04, 17), (0.02, 33)]
            .iter()
            .map(|&(h, m)| {
                let g = StripGrid::new(RadialGrid::new(1, h, 20.0 / l).unwrap(), m).unwrap();
                multistart(&params, g, &SolverOptions::default()).unwrap().best.energy.quotient
            })
            .collect();
        let ratio = (q[0] - q[1]) / (q[1] - q[2]);
        assert!((3.5..=4.5).contains(&ratio), "L = {l}: {ratio}");
    }
}
