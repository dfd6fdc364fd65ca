use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use strip_core::critical::{sobolev_constants, strip_integrals};
use strip_core::linalg::quad::gauss_until_converged;
use strip_core::radial::{discrete_trivial_field, trivial_branch_energy, trivial_exponent};
use strip_core::spectral::{stability_terms, transverse_second_eigenvalue};
use strip_core::strip::{quotient, rescale_between_formulations, Formulation};
use strip_core::validation::smooth_random_field;
use strip_core::{ProblemParams, RadialGrid, StripField, StripGrid};

fn small_grid(l: f64) -> StripGrid {
    StripGrid::new(RadialGrid::new(1, 0.05, (15.0 / l).min(30.0)).unwrap(), 12).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quotient_is_scale_invariant(a in 0.01f64..100.0, l in 0.3f64..3.0, k in 0usize..3) {
        let params = ProblemParams::new(2, 3.0, l).unwrap();
        let g = small_grid(l);
        let u = StripField::from_fn(g, |r, t| (-(l * r).powi(2)).exp() * (1.5 + (k as f64 * std::f64::consts::PI * t).cos()));
        let v = StripField::new(g, u.values.iter().map(|x| a * x).collect()).unwrap();
        let (q1, q2) = (quotient(&u, &params), quotient(&v, &params));
        prop_assert!((q1 - q2).abs() <= 1e-12 * q1);
    }

    #[test]
    fn formulation_rescaling_round_trips(l in 0.2f64..5.0, p in 1.5f64..5.0) {
        let params = ProblemParams::new(2, p, l).unwrap();
        let g = small_grid(1.0);
        let u = StripField::from_fn(g, |r, t| 1.0 / (1.0 + r * r + t));
        let wide = rescale_between_formulations(&u, &params, Formulation::WidthL);
        let back = rescale_between_formulations(&wide, &params, Formulation::UnitStrip);
        prop_assert!((back.grid.height - 1.0).abs() < 1e-12);
        prop_assert!((back.grid.radial.h - g.radial.h).abs() < 1e-12 * g.radial.h);
        for (x, y) in back.values.iter().zip(&u.values) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn trivial_energy_follows_power_law(l in 0.2f64..10.0, s in 0.5f64..2.0, p in 1.5f64..6.0) {
        let params = ProblemParams::new(2, p, l).unwrap();
        let grid = RadialGrid::new(1, 0.01, 30.0).unwrap();
        let w0 = strip_core::radial::shoot_ground_state(1, p, grid, &Default::default()).unwrap();
        let branch = trivial_branch_energy(&params, &w0).unwrap();
        let ratio = branch.cstar(s * l) / branch.cstar(l);
        prop_assert!((ratio - s.powf(trivial_exponent(2, p))).abs() < 1e-12 * ratio);
    }

    #[test]
    fn strip_integrals_grow_towards_half_space(e in 0.02f64..0.2) {
        let k = sobolev_constants(5).unwrap();
        let (g1, _, d1) = strip_integrals(e, 5).unwrap();
        let (g2, _, d2) = strip_integrals(0.8 * e, 5).unwrap();
        prop_assert!(g1 < g2 && g2 < k.a0);
        prop_assert!(d1 < d2 && d2 < k.d0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    // Below the critical length the trivial solution minimizes the quotient, so
    // the second variation is nonnegative in every direction.
    #[test]
    fn second_variation_nonnegative_at_stable_trivial(l in 0.4f64..1.6, seed in any::<u64>()) {
        let params = ProblemParams::new(2, 3.0, l).unwrap();
        let g = small_grid(l);
        let u = discrete_trivial_field(&params, g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = smooth_random_field(g, l, &mut rng);
        let t = stability_terms(&u, &phi, &params).unwrap();
        prop_assert!(t.value() >= -1e-6 * t.scale(), "{t:?}");
    }

    #[test]
    fn sobolev_quotient_is_dilation_invariant(eps in 0.1f64..10.0, n in 3usize..7) {
        // Radial quotient of U_{eps,0} over R^N with r = eps tan(theta).
        let nf = n as f64;
        let c = strip_core::critical::instanton_amplitude(n);
        let crit = 2.0 * nf / (nf - 2.0);
        let integral = |f: &dyn Fn(f64) -> f64| {
            gauss_until_converged(
                |th: f64| {
                    let r = eps * th.tan();
                    f(r) * r.powi(n as i32 - 1) * eps * (1.0 + th.tan().powi(2))
                },
                0.0,
                std::f64::consts::FRAC_PI_2,
                1e-12,
            )
            .0
        };
        let u = |r: f64| c * (eps / (eps * eps + r * r)).powf((nf - 2.0) / 2.0);
        let du = |r: f64| c * (nf - 2.0) * eps.powf((nf - 2.0) / 2.0) * r * (eps * eps + r * r).powf(-nf / 2.0);
        let grad = integral(&|r| du(r).powi(2));
        let pow = integral(&|r| u(r).powf(crit));
        let q = grad / pow.powf((nf - 2.0) / nf);
        let s = sobolev_constants(n).unwrap().s;
        // Both integrals above omit the sphere area.
        let omega = strip_core::grid::sphere_area(n);
        let q = q * omega.powf(1.0 - (nf - 2.0) / nf);
        prop_assert!((q / s - 1.0).abs() < 1e-9, "{q} vs {s}");
    }
}

#[test]
fn second_eigenvalue_formula_changes_sign_at_critical_length() {
    let l_star = std::f64::consts::PI / 3f64.sqrt();
    assert!(transverse_second_eigenvalue(3.0, l_star).abs() < 1e-12);
    assert!(transverse_second_eigenvalue(3.0, 0.99 * l_star) > 0.0);
    assert!(transverse_second_eigenvalue(3.0, 1.01 * l_star) < 0.0);
}
