use strip_core::critical::{
    fit_log_mass, instanton_amplitude, instanton_residual, instanton_value, sobolev_constants, test_function_quotient, INSTANTON_STEP,
};

#[test]
fn instanton_centre_and_dilation() {
    for n in [3, 4, 5] {
        let a = vec![0.3; n];
        for eps in [0.1, 1.0, 4.0] {
            let centre = instanton_value(eps, &a, n, &a);
            assert!((centre - instanton_amplitude(n) * eps.powf(-(n as f64 - 2.0) / 2.0)).abs() < 1e-12 * centre);
            let origin = vec![0.0; n];
            let x: Vec<f64> = (0..n).map(|k| 0.2 + 0.37 * k as f64).collect();
            let scaled: Vec<f64> = x.iter().map(|v| v / eps).collect();
            let lhs = instanton_value(eps, &origin, n, &x);
            let rhs = eps.powf(-(n as f64 - 2.0) / 2.0) * instanton_value(1.0, &origin, n, &scaled);
            assert!((lhs - rhs).abs() < 1e-12 * lhs);
        }
    }
    assert!((instanton_value(1.0, &[0.0; 4], 4, &[0.0; 4]) - 2.828_43).abs() < 1e-5);
}

#[test]
fn instanton_residual_at_ten_radii() {
    for n in 3..=6 {
        for k in 0..10 {
            let r = 0.5 * k as f64;
            assert!(instanton_residual(n, r, INSTANTON_STEP).abs() < 1e-8, "N = {n}, r = {r}");
        }
    }
}

#[test]
fn half_space_constants() {
    for n in 3..=8 {
        let k = sobolev_constants(n).unwrap();
        assert!((k.s_half / k.s - 0.5f64.powf(2.0 / n as f64)).abs() < 1e-14);
        let nf = n as f64;
        // D₀ is half of the full-space integral, and S = ∫|∇U|² / (∫U^{2N/(N-2)})^{(N-2)/N}.
        assert!((2.0 * k.a0 / (2.0 * k.d0).powf((nf - 2.0) / nf) / k.s - 1.0).abs() < 1e-12);
        // At a solution ∫|∇U|² = ∫U^{2N/(N-2)}.
        assert!((k.a0 / k.d0 - 1.0).abs() < 1e-10);
    }
}

#[test]
fn quotient_tends_to_half_space_value() {
    let s_half = sobolev_constants(5).unwrap().s_half;
    let gaps: Vec<f64> =
        [0.1, 0.05, 0.02].iter().map(|&e| (test_function_quotient(e, 0.1, 5).unwrap().0 - s_half).abs()).collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    assert!(gaps[2] < 1e-4 * s_half);
}

#[test]
fn expansion_coefficients_settle() {
    let (_, e) = test_function_quotient(0.01, 0.1, 5).unwrap();
    let k = e.constants;
    assert!((e.grad_deficit_coefficient / (3.0 * k.b0) - 1.0).abs() < 1e-3);
    assert!((e.mass_coefficient / k.c0.unwrap() - 1.0).abs() < 1e-2);
    assert!(e.denom_deficit_coefficient > 0.0);
}

#[test]
fn four_dimensional_mass_is_logarithmic() {
    let fit = fit_log_mass(&[0.02, 0.01, 0.005]).unwrap();
    assert!((fit.slope / fit.predicted_slope - 1.0).abs() < 0.15);
    assert!((fit.predicted_slope - 8.0 * std::f64::consts::PI.powi(2)).abs() < 1e-8);
}

#[test]
fn deficit_grows_with_eps_once_gradient_loss_dominates() {
    // At L = 0.1 the -(N-2)B₀ε³ term outweighs L²C₀ε² for ε above about 0.016.
    let q: Vec<f64> = [0.03, 0.05, 0.1, 0.2].iter().map(|&e| test_function_quotient(e, 0.1, 5).unwrap().0).collect();
    assert!(q.windows(2).all(|w| w[1] < w[0]), "{q:?}");
}
