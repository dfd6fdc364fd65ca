//! Critical exponent `p = (N+2)/(N-2)`: the instanton
//! `U_{ε,a}(x) = c_N (ε / (ε² + |x-a|²))^{(N-2)/2}`, the Sobolev quotient `S`,
//! its half-space value `S_half = 2^{-2/N} S`, and the quotient of the instanton
//! centred on the boundary face of the unit strip.
//!
//! All integrands decay only polynomially. Radial integrals use `r = tan θ`;
//! slab integrals over `R^{N-1} x (0, T)` use `τ = tan θ` and
//! `ρ = √(1+τ²) tan φ`, both with composite Gauss-Legendre refinement.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::sphere_area;
use crate::linalg::quad::gauss_until_converged;

/// Relative refinement tolerance of every quadrature in this module.
pub const QUAD_TOL: f64 = 1e-12;

/// Difference step for [`instanton_residual`]; smaller steps are dominated by rounding.
pub const INSTANTON_STEP: f64 = 8e-3;

/// `(N(N-2))^{(N-2)/4}`, fixed by requiring `ΔU + U^{(N+2)/(N-2)} = 0`.
pub fn instanton_amplitude(n: usize) -> f64 {
    let nf = n as f64;
    (nf * (nf - 2.0)).powf((nf - 2.0) / 4.0)
}

/// `U_{ε,a}(x)`.
pub fn instanton_value(eps: f64, a: &[f64], n: usize, x: &[f64]) -> f64 {
    let r2: f64 = x.iter().zip(a).map(|(x, a)| (x - a).powi(2)).sum();
    instanton_amplitude(n) * (eps / (eps * eps + r2)).powf((n as f64 - 2.0) / 2.0)
}

/// `ΔU + U^{(N+2)/(N-2)}` for `U = U_{1,0}` at radius `r`. The radial Laplacian
/// `U'' + (N-1)/r U'` uses fourth-order central differences at steps `h` and `h/2`,
/// combined by Richardson extrapolation.
pub fn instanton_residual(n: usize, r: f64, h: f64) -> f64 {
    let nf = n as f64;
    let u = |r: f64| instanton_amplitude(n) * (1.0 + r * r).powf(-(nf - 2.0) / 2.0);
    let lap = |h: f64| {
        let (m2, m1, z, p1, p2) = (u(r - 2.0 * h), u(r - h), u(r), u(r + h), u(r + 2.0 * h));
        let d2 = (-p2 + 16.0 * p1 - 30.0 * z + 16.0 * m1 - m2) / (12.0 * h * h);
        let d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
        if r == 0.0 { nf * d2 } else { d2 + (nf - 1.0) / r * d1 }
    };
    let lap = (16.0 * lap(0.5 * h) - lap(h)) / 15.0;
    lap + u(r).powf((nf + 2.0) / (nf - 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalConstants {
    #[serde(rename = "N")]
    pub n: usize,
    pub c_n: f64,
    pub s: f64,
    pub s_half: f64,
    /// `∫_{R^N_+} |∇U_{1,0}|²`
    pub a0: f64,
    /// `c_N² ∫_{R^{N-1}} (1+|y'|²)^{-(N-1)}`
    pub b0: f64,
    /// `∫_{R^N_+} U_{1,0}²`, finite for `N ≥ 5` only.
    pub c0: Option<f64>,
    /// `∫_{R^N_+} U_{1,0}^{2N/(N-2)}`
    pub d0: f64,
}

/// `ω_d ∫_0^∞ f(r) r^{d-1} dr` with `r = tan θ`.
fn radial_integral<F: Fn(f64) -> f64>(d: usize, f: F) -> f64 {
    let g = |th: f64| {
        let r = th.tan();
        let sec2 = 1.0 + r * r;
        f(r) * r.powi(d as i32 - 1) * sec2
    };
    sphere_area(d) * gauss_until_converged(g, 0.0, FRAC_PI_2, QUAD_TOL).0
}

fn check_dim(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("critical exponent needs N >= 3, got {n}")));
    }
    Ok(())
}

/// `∫_{R^N_+} U_{1,0}²`; diverges logarithmically for `N = 4` and worse for `N = 3`.
pub fn half_space_mass(n: usize) -> Result<f64> {
    check_dim(n)?;
    if n <= 4 {
        return Err(Error::DivergentMass);
    }
    let c = instanton_amplitude(n);
    let k = n as f64 - 2.0;
    Ok(0.5 * radial_integral(n, |r| c * c * (1.0 + r * r).powf(-k)))
}

pub fn sobolev_constants(n: usize) -> Result<CriticalConstants> {
    check_dim(n)?;
    let nf = n as f64;
    let c = instanton_amplitude(n);
    let crit = 2.0 * nf / (nf - 2.0);
    let grad = radial_integral(n, |r| {
        let du = c * (nf - 2.0) * r * (1.0 + r * r).powf(-nf / 2.0);
        du * du
    });
    let pow = radial_integral(n, |r| c.powf(crit) * (1.0 + r * r).powf(-nf));
    let s = grad / pow.powf((nf - 2.0) / nf);
    let b0 = c * c * radial_integral(n - 1, |r| (1.0 + r * r).powf(-(nf - 1.0)));
    let c0 = match half_space_mass(n) {
        Ok(v) => Some(v),
        Err(Error::DivergentMass) => None,
        Err(e) => return Err(e),
    };
    Ok(CriticalConstants { n, c_n: c, s, s_half: 0.5f64.powf(2.0 / nf) * s, a0: 0.5 * grad, b0, c0, d0: 0.5 * pow })
}

/// `∫_{R^{N-1} x (0, T)} G(1 + |y|²) dy` for a radial integrand written in `q = 1 + |y|²`.
///
/// `G(q) = O(q^{-k})` with `k > (N-1)/2` is required for the inner integral to converge.
pub fn slab_integral<G: Fn(f64, f64) -> f64>(n: usize, t: f64, g: G) -> f64 {
    let d = n - 1;
    let inner = |tau: f64| {
        let s = (1.0 + tau * tau).sqrt();
        let f = |ph: f64| {
            let tp = ph.tan();
            let rho = s * tp;
            let r2 = tau * tau + rho * rho;
            g(1.0 + r2, r2) * rho.powi(d as i32 - 1) * s * (1.0 + tp * tp)
        };
        gauss_until_converged(f, 0.0, FRAC_PI_2, QUAD_TOL).0
    };
    let outer = |th: f64| {
        let tau = th.tan();
        inner(tau) * (1.0 + tau * tau)
    };
    sphere_area(d) * gauss_until_converged(outer, 0.0, t.atan(), QUAD_TOL).0
}

/// Energy pieces of `U_{ε,0}` restricted to the unit strip and the quotient at `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionExpansion {
    #[serde(rename = "N")]
    pub n: usize,
    pub eps: f64,
    #[serde(rename = "L")]
    pub l: f64,
    /// `∫_Σ |∇U_ε|²`
    pub grad: f64,
    /// `∫_Σ U_ε²`
    pub mass: f64,
    /// `∫_Σ U_ε^{2N/(N-2)}`
    pub denom: f64,
    pub constants: CriticalConstants,
    /// `(A₀ - ∫_Σ|∇U_ε|²) / ε^{N-2}`; tends to `(N-2) B₀`.
    pub grad_deficit_coefficient: f64,
    /// `(D₀ - ∫_Σ U_ε^{2N/(N-2)}) / ε^N`
    pub denom_deficit_coefficient: f64,
    /// `∫_Σ U_ε² / ε²` for `N ≥ 5` (tends to `C₀`), `∫_Σ U_ε² / (ε² log(1/ε))` for `N = 4`.
    pub mass_coefficient: f64,
    /// `(A₀ - (N-2) B₀ ε^{N-2} + L² ∫_Σ U_ε²) / D₀^{(N-2)/N}`.
    pub leading_order_quotient: f64,
}

/// Gradient, mass and critical-power integrals of `U_{ε,0}` over `R^{N-1} x (0, 1)`.
///
/// With `y = x/ε` these reduce to integrals of `U_{1,0}` over the slab of height `1/ε`.
pub fn strip_integrals(eps: f64, n: usize) -> Result<(f64, f64, f64)> {
    check_dim(n)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let nf = n as f64;
    let c = instanton_amplitude(n);
    let t = 1.0 / eps;
    let grad = slab_integral(n, t, |q, r2| c * c * (nf - 2.0).powi(2) * r2 * q.powf(-nf));
    let mass = eps * eps * slab_integral(n, t, |q, _| c * c * q.powf(-(nf - 2.0)));
    let denom = slab_integral(n, t, |q, _| c.powf(2.0 * nf / (nf - 2.0)) * q.powf(-nf));
    Ok((grad, mass, denom))
}

/// Rayleigh quotient of `U_{ε,0}` on the unit strip at parameter `L` by direct
/// quadrature, with the coefficients of its small-`ε` expansion.
pub fn test_function_quotient(eps: f64, l: f64, n: usize) -> Result<(f64, TestFunctionExpansion)> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!("test-function expansion needs N >= 4, got {n}")));
    }
    if eps > 0.2 {
        return Err(Error::EpsTooLarge(eps));
    }
    let nf = n as f64;
    let k = sobolev_constants(n)?;
    let (grad, mass, denom) = strip_integrals(eps, n)?;
    let quotient = (grad + l * l * mass) / denom.powf((nf - 2.0) / nf);
    let mass_coefficient = if n == 4 { mass / (eps * eps * (1.0 / eps).ln()) } else { mass / (eps * eps) };
    let leading = (k.a0 - (nf - 2.0) * k.b0 * eps.powf(nf - 2.0) + l * l * mass) / k.d0.powf((nf - 2.0) / nf);
    Ok((
        quotient,
        TestFunctionExpansion {
            n,
            eps,
            l,
            grad,
            mass,
            denom,
            constants: k,
            grad_deficit_coefficient: (k.a0 - grad) / eps.powf(nf - 2.0),
            denom_deficit_coefficient: (k.d0 - denom) / eps.powf(nf),
            mass_coefficient,
            leading_order_quotient: leading,
        },
    ))
}

/// Least-squares fit of `∫_Σ U_ε² / ε² = a log(1/ε) + b` for `N = 4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogMassFit {
    pub eps: Vec<f64>,
    /// `∫_Σ U_ε² / (ε² log(1/ε))` per `ε`.
    pub coefficients: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// `c_N² ∫_{R³} (1+|y'|²)^{-2} = c_N² π²`.
    pub predicted_slope: f64,
    pub max_residual: f64,
}

pub fn fit_log_mass(eps: &[f64]) -> Result<LogMassFit> {
    if eps.len() < 2 {
        return Err(Error::InsufficientPoints { needed: 2, found: eps.len() });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut coefficients = Vec::new();
    for &e in eps {
        let (_, mass, _) = strip_integrals(e, 4)?;
        let lg = (1.0 / e).ln();
        xs.push(lg);
        ys.push(mass / (e * e));
        coefficients.push(mass / (e * e * lg));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).abs()).fold(0.0, f64::max);
    let c = instanton_amplitude(4);
    let y_int = c * c * radial_integral(3, |r| (1.0 + r * r).powi(-2));
    Ok(LogMassFit { eps: eps.to_vec(), coefficients, slope, intercept, predicted_slope: y_int, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;
    use std::f64::consts::PI;

    fn sobolev_oracle(n: usize) -> f64 {
        let nf = n as f64;
        PI * nf * (nf - 2.0) * (gamma(nf / 2.0) / gamma(nf)).powf(2.0 / nf)
    }

    #[test]
    fn amplitude_values() {
        assert!((instanton_amplitude(4) - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert!((instanton_amplitude(3) - 3f64.powf(0.25)).abs() < 1e-14);
    }

    #[test]
    fn sobolev_constant_matches_closed_form() {
        for n in 3..=7 {
            let k = sobolev_constants(n).unwrap();
            assert!((k.s / sobolev_oracle(n) - 1.0).abs() < 1e-10, "N = {n}");
            assert!((k.s_half / k.s - 0.5f64.powf(2.0 / n as f64)).abs() < 1e-15);
            let nf = n as f64;
            assert!((k.a0 / k.d0.powf((nf - 2.0) / nf) / k.s_half - 1.0).abs() < 1e-10);
        }
        assert!((sobolev_constants(3).unwrap().s - 5.4779).abs() < 1e-4);
    }

    #[test]
    fn mass_diverges_in_four_dimensions() {
        assert_eq!(half_space_mass(4), Err(Error::DivergentMass));
        assert!(sobolev_constants(4).unwrap().c0.is_none());
        assert!(sobolev_constants(5).unwrap().c0.unwrap() > 0.0);
    }

    // `∫_{R^{N-1} x (0,T)} q^{-k}` with the ρ integral in closed form:
    // `ω_{N-1} B((N-1)/2, k-(N-1)/2)/2 ∫_0^T (1+τ²)^{(N-1)/2-k} dτ`.
    fn slab_oracle(n: usize, k: f64, t: f64) -> f64 {
        let a = (n as f64 - 1.0) / 2.0;
        let beta = gamma(a) * gamma(k - a) / gamma(k);
        let tail = crate::linalg::quad::composite_gauss(|x| (1.0 + x * x).powf(a - k), 0.0, t, 2000, 10);
        sphere_area(n - 1) * 0.5 * beta * tail
    }

    #[test]
    fn slab_integral_matches_separated_form() {
        for (n, k, t) in [(4, 2.0, 50.0), (5, 3.0, 100.0), (5, 5.0, 20.0), (6, 6.0, 7.0)] {
            let num = slab_integral(n, t, |q, _| q.powf(-k));
            let exact = slab_oracle(n, k, t);
            assert!((num / exact - 1.0).abs() < 1e-10, "N={n} k={k}: {num} vs {exact}");
        }
    }

    #[test]
    fn four_dimensional_mass_is_inverse_sinh() {
        // ∫_Σ U_ε² = c_4² π² ε² asinh(1/ε)
        let eps = 0.05;
        let (_, mass, _) = strip_integrals(eps, 4).unwrap();
        let exact = 8.0 * PI * PI * eps * eps * (1.0 / eps).asinh();
        assert!((mass / exact - 1.0).abs() < 1e-10);
    }

    #[test]
    fn instanton_solves_critical_equation() {
        for n in 3..=6 {
            for r in [0.0, 0.3, 1.0, 2.5, 7.0] {
                let res = instanton_residual(n, r, INSTANTON_STEP);
                assert!(res.abs() < 1e-8, "N={n} r={r}: {res}");
            }
        }
    }

    #[test]
    fn instanton_is_centred_and_scaled() {
        let a = [0.5, -1.0, 0.0];
        assert!((instanton_value(0.2, &a, 3, &a) - instanton_amplitude(3) * 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn strip_integrals_approach_half_space_values() {
        let k = sobolev_constants(5).unwrap();
        let (g, m, d) = strip_integrals(0.01, 5).unwrap();
        assert!(k.a0 - g > 0.0 && k.d0 - d > 0.0);
        assert!(((k.a0 - g) / 1e-6 / (3.0 * k.b0) - 1.0).abs() < 0.02);
        assert!((m / 1e-4 / k.c0.unwrap() - 1.0).abs() < 0.05);
    }

    #[test]
    fn expansion_rejects_large_eps() {
        assert_eq!(test_function_quotient(0.3, 1.0, 5).unwrap_err(), Error::EpsTooLarge(0.3));
    }
}
