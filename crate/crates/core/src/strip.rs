//! Minimization of the Rayleigh quotient
//! `c(L) = inf (∫|∇u|² + L²∫u²) / (∫u^{p+1})^{2/(p+1)}`
//! over axisymmetric fields on the strip grid, and measures on the result.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{StripField, StripGrid};
use crate::linalg::{pcg, wdot, LdlFactor, SymBanded};
use crate::params::ProblemParams;
use crate::radial::{discrete_trivial_field, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Target for the relative Euler-Lagrange residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative tolerance of the inner conjugate-gradient solve.
    pub cg_tol: f64,
    pub cg_max_iter: usize,
    /// Iterations without a new best residual before the run is declared stalled.
    pub stall_window: usize,
    /// Apply the monotone rearrangement between iterations.
    pub rearrange: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 2000, cg_tol: 1e-10, cg_max_iter: 200, stall_window: 400, rearrange: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Converged,
    /// Residual plateaued above the tolerance or the iteration cap was hit; the best iterate is returned.
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub grad_term: f64,
    pub mass_term: f64,
    pub denom: f64,
    pub quotient: f64,
    pub el_residual: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimization {
    /// Minimizer scaled to solve `Δu - L²u + u^p = 0` (multiplier one).
    pub field: StripField,
    pub energy: EnergyBreakdown,
    pub status: Status,
    pub iterations: usize,
    /// Quotient after every iteration, starting with the initial field.
    pub history: Vec<f64>,
}

/// `K + L² D` together with its banded factorization.
pub struct HelmholtzOperator {
    grid: StripGrid,
    l2: f64,
    weights: Vec<f64>,
    factor: LdlFactor,
}

impl HelmholtzOperator {
    pub fn new(grid: StripGrid, l: f64) -> Result<Self> {
        let weights = grid.weights();
        let mut a: SymBanded = grid.stiffness();
        let diag: Vec<f64> = weights.iter().map(|w| l * l * w).collect();
        a.add_diagonal(&diag);
        let factor = a.factor()?;
        Ok(Self { grid, l2: l * l, weights, factor })
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.grid.apply_stiffness(x, out);
        for i in 0..x.len() {
            out[i] += self.l2 * self.weights[i] * x[i];
        }
    }

    /// Solves `(K + L² D) x = b` by conjugate gradients preconditioned with the
    /// banded factorization; `x` carries the initial guess.
    pub fn solve(&self, b: &[f64], x: &mut [f64], opts: &SolverOptions) -> Result<()> {
        pcg(
            |v, out| self.apply(v, out),
            |r, z| {
                z.copy_from_slice(r);
                self.factor.solve_in_place(z);
            },
            b,
            x,
            opts.cg_tol,
            opts.cg_max_iter,
        )?;
        Ok(())
    }
}

fn pow_field(u: &[f64], q: f64) -> Vec<f64> {
    u.iter().map(|x| x.max(0.0).powf(q)).collect()
}

fn integral_pow(w: &[f64], u: &[f64], q: f64) -> f64 {
    w.iter().zip(u).map(|(w, x)| w * x.max(0.0).powf(q)).sum()
}

/// Energy terms, quotient and optimal-multiplier residual of `u` for mass coefficient `m2`.
fn breakdown(grid: &StripGrid, u: &[f64], p: f64, m2: f64) -> EnergyBreakdown {
    let w = grid.weights();
    let mut ku = vec![0.0; u.len()];
    grid.apply_stiffness(u, &mut ku);
    let grad = crate::linalg::dot(&ku, u);
    let mass = m2 * wdot(&w, u, u);
    let denom = integral_pow(&w, u, p + 1.0);
    let (res, mu) = residual_parts(&w, &ku, u, p, m2);
    EnergyBreakdown {
        grad_term: grad,
        mass_term: mass,
        denom,
        quotient: (grad + mass) / denom.powf(2.0 / (p + 1.0)),
        el_residual: res,
        mu,
    }
}

/// `||Δ_h u - m2 u + μ u^p||_D / ||Δ_h u - m2 u||_D` minimized over `μ`.
fn residual_parts(w: &[f64], ku: &[f64], u: &[f64], p: f64, m2: f64) -> (f64, f64) {
    // a = D^{-1}(K + m2 D) u, b = u^p; residual = μ b - a.
    let a: Vec<f64> = (0..u.len()).map(|i| ku[i] / w[i] + m2 * u[i]).collect();
    let b = pow_field(u, p);
    let ab = wdot(w, &a, &b);
    let bb = wdot(w, &b, &b);
    let aa = wdot(w, &a, &a);
    if bb == 0.0 || aa == 0.0 {
        return (f64::INFINITY, 0.0);
    }
    let mu = ab / bb;
    let r: Vec<f64> = a.iter().zip(&b).map(|(a, b)| mu * b - a).collect();
    ((wdot(w, &r, &r) / aa).sqrt(), mu)
}

/// Relative Euler-Lagrange residual of `Δu - L²u + μu^p = 0` with the best `μ`.
///
/// The norm is the quadrature-weighted L² norm, divided by `||Δ_h u - L²u||` so
/// that the value does not depend on the amplitude of `u`.
pub fn el_residual(u: &StripField, params: &ProblemParams) -> f64 {
    el_residual_with_mass(u, params.p, params.l * params.l)
}

/// As [`el_residual`] for `Δu - m2 u + μ u^p = 0`.
pub fn el_residual_with_mass(u: &StripField, p: f64, m2: f64) -> f64 {
    let w = u.grid.weights();
    let mut ku = vec![0.0; u.values.len()];
    u.grid.apply_stiffness(&u.values, &mut ku);
    residual_parts(&w, &ku, &u.values, p, m2).0
}

pub fn energy(u: &StripField, params: &ProblemParams) -> EnergyBreakdown {
    breakdown(&u.grid, &u.values, params.p, params.l * params.l)
}

/// Rayleigh quotient of `u` at parameter `L`.
pub fn quotient(u: &StripField, params: &ProblemParams) -> f64 {
    energy(u, params).quotient
}

fn normalize(w: &[f64], u: &mut [f64], p: f64) -> Result<()> {
    let s = integral_pow(w, u, p + 1.0);
    if !(s > 0.0) {
        return Err(Error::ZeroField);
    }
    let f = s.powf(-1.0 / (p + 1.0));
    u.iter_mut().for_each(|x| *x *= f);
    Ok(())
}

/// Minimizes the quotient from `init` by the normalized inverse iteration
/// `v = (K + L²D)^{-1} D u^p`, `∫ v^{p+1} = 1`.
///
/// Each step does not increase the quotient (Hölder and Cauchy-Schwarz), and
/// the inverse of the M-matrix `K + L²D` keeps iterates nonnegative.
pub fn minimize_quotient(
    params: &ProblemParams,
    grid: StripGrid,
    init: &StripField,
    opts: &SolverOptions,
) -> Result<Minimization> {
    let op = HelmholtzOperator::new(grid, params.l)?;
    minimize_with(&op, params, init, opts)
}

fn minimize_with(
    op: &HelmholtzOperator,
    params: &ProblemParams,
    init: &StripField,
    opts: &SolverOptions,
) -> Result<Minimization> {
    let grid = op.grid;
    if init.grid != grid {
        return Err(Error::GridMismatch);
    }
    let p = params.p;
    let m2 = params.l * params.l;
    let w = &op.weights;
    let mut u = init.values.clone();
    if u.iter().any(|&x| x < 0.0) {
        log::warn!("initial field has negative values; clamping to zero");
        u.iter_mut().for_each(|x| *x = x.max(0.0));
    }
    if u.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroField);
    }
    normalize(w, &mut u, p)?;
    if opts.rearrange {
        u = rearrange_values(&grid, &u);
    }

    let mut e = breakdown(&grid, &u, p, m2);
    let mut history = vec![e.quotient];
    let mut best = (e.el_residual, u.clone(), e);
    let mut since_best = 0;
    let mut status = Status::Stalled;
    let mut iterations = 0;
    let mut v = u.clone();
    while iterations < opts.max_iter {
        if e.el_residual < opts.tol {
            status = Status::Converged;
            break;
        }
        let rhs: Vec<f64> = (0..u.len()).map(|i| w[i] * u[i].max(0.0).powf(p)).collect();
        op.solve(&rhs, &mut v, opts)?;
        v.iter_mut().for_each(|x| *x = x.max(0.0));
        normalize(w, &mut v, p)?;
        if opts.rearrange {
            v = rearrange_values(&grid, &v);
        }
        std::mem::swap(&mut u, &mut v);
        iterations += 1;
        e = breakdown(&grid, &u, p, m2);
        history.push(e.quotient);
        if e.el_residual < best.0 {
            best = (e.el_residual, u.clone(), e);
            since_best = 0;
        } else {
            since_best += 1;
            if since_best > opts.stall_window {
                break;
            }
        }
    }
    if status == Status::Stalled {
        log::warn!(
            "quotient minimization at L = {} stalled after {iterations} iterations (residual {:e})",
            params.l,
            best.0
        );
        u = best.1;
    }
    // Rescale so the multiplier is one: u -> μ^{1/(p-1)} u.
    let mu = breakdown(&grid, &u, p, m2).mu;
    let s = mu.powf(1.0 / (p - 1.0));
    u.iter_mut().for_each(|x| *x *= s);
    let field = StripField { grid, values: u };
    let energy = breakdown(&grid, &field.values, p, m2);
    Ok(Minimization { field, energy, status, iterations, history })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Seed {
    /// Exact discrete trivial solution.
    Trivial,
    /// Trivial solution times `1 + 0.3 cos(πt)`.
    TransversePerturbation,
    /// `exp(-L · dist((r, t), (0, 1)))`.
    CornerBump,
}

impl Seed {
    pub const ALL: [Seed; 3] = [Seed::Trivial, Seed::TransversePerturbation, Seed::CornerBump];
}

pub fn seed_field(seed: Seed, params: &ProblemParams, grid: StripGrid, trivial: &StripField) -> StripField {
    let l = params.l;
    match seed {
        Seed::Trivial => trivial.clone(),
        Seed::TransversePerturbation => {
            let mut f = trivial.clone();
            for i in 0..grid.radial.n {
                for j in 0..grid.m {
                    let k = grid.index(i, j);
                    f.values[k] *= 1.0 + 0.3 * (std::f64::consts::PI * grid.t(j) / grid.height).cos();
                }
            }
            f
        }
        Seed::CornerBump => StripField::from_fn(grid, |r, t| (-l * (r * r + (grid.height - t).powi(2)).sqrt()).exp()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: Seed,
    pub quotient: f64,
    pub status: Status,
    pub iterations: usize,
    pub el_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultistartResult {
    pub best: Minimization,
    pub best_seed: Seed,
    pub seeds: Vec<SeedOutcome>,
    /// Exact discrete trivial solution on the same grid.
    pub trivial: StripField,
}

/// Runs the three seeds and keeps the lowest quotient.
pub fn multistart(params: &ProblemParams, grid: StripGrid, opts: &SolverOptions) -> Result<MultistartResult> {
    let trivial = discrete_trivial_field(params, grid)?;
    let op = HelmholtzOperator::new(grid, params.l)?;
    let runs: Vec<Result<(Seed, Minimization)>> = Seed::ALL
        .par_iter()
        .map(|&seed| {
            let init = seed_field(seed, params, grid, &trivial);
            minimize_with(&op, params, &init, opts).map(|m| (seed, m))
        })
        .collect();
    let mut done = Vec::with_capacity(runs.len());
    for r in runs {
        done.push(r?);
    }
    let seeds = done
        .iter()
        .map(|(s, m)| SeedOutcome {
            seed: *s,
            quotient: m.energy.quotient,
            status: m.status,
            iterations: m.iterations,
            el_residual: m.energy.el_residual,
        })
        .collect();
    let (best_seed, best) = done
        .into_iter()
        .min_by(|a, b| a.1.energy.quotient.total_cmp(&b.1.energy.quotient))
        .expect("three seeds");
    Ok(MultistartResult { best, best_seed, seeds, trivial })
}

/// `δ = ∫(u - trivial) Φ₀` and `s = ||∂_t u||`.
pub fn symmetry_breaking_measure(u: &StripField, trivial: &StripField, phi0: &StripField) -> Result<(f64, f64)> {
    u.same_grid(trivial)?;
    u.same_grid(phi0)?;
    let w = u.grid.weights();
    let diff: Vec<f64> = u.values.iter().zip(&trivial.values).map(|(a, b)| a - b).collect();
    Ok((wdot(&w, &diff, &phi0.values), u.transverse_derivative_norm()))
}

fn rearrange_values(grid: &StripGrid, u: &[f64]) -> Vec<f64> {
    let (n, m) = (grid.radial.n, grid.m);
    let mut out = u.to_vec();
    for row in out.chunks_mut(m) {
        row.sort_by(|a, b| a.total_cmp(b));
    }
    let mut col = vec![0.0; n];
    for j in 0..m {
        for i in 0..n {
            col[i] = out[i * m + j];
        }
        col.sort_by(|a, b| b.total_cmp(a));
        for i in 0..n {
            out[i * m + j] = col[i];
        }
    }
    out
}

/// Discrete monotone rearrangement: each radial row is sorted increasing in `t`
/// (maximum on the face `t = height`), then each transverse column is sorted
/// decreasing in `r`. The column pass keeps rows sorted.
pub fn rearrange_monotone(u: &StripField) -> StripField {
    StripField { grid: u.grid, values: rearrange_values(&u.grid, &u.values) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Formulation {
    /// `Δu - L²u + u^p = 0` on `R^{N-1} x (0, 1)`.
    UnitStrip,
    /// `Δu - u + u^p = 0` on `R^{N-1} x (0, L)`.
    WidthL,
}

/// Maps solutions between the two formulations: `U(X) = L^{-2/(p-1)} u(X/L)`.
/// The grid is stretched by `L` and the values rescaled; the discrete residual
/// maps exactly.
pub fn rescale_between_formulations(u: &StripField, params: &ProblemParams, to: Formulation) -> StripField {
    let (factor, amp) = match to {
        Formulation::WidthL => (params.l, params.l.powf(-2.0 / (params.p - 1.0))),
        Formulation::UnitStrip => (1.0 / params.l, params.l.powf(2.0 / (params.p - 1.0))),
    };
    StripField { grid: u.grid.scaled(factor), values: u.values.iter().map(|v| v * amp).collect() }
}

/// Predicted limit of `c(L) L^{-(2 - N(p-1)/(p+1))}` as `L → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LargeLAsymptote {
    pub limit: f64,
    pub exponent: f64,
}

/// `(½ ∫_{R^N} w^{p+1})^{(p-1)/(p+1)}` with `w` the ground state in R^N.
pub fn large_l_asymptote(params: &ProblemParams, w_n: &RadialProfile) -> Result<LargeLAsymptote> {
    if w_n.grid.d != params.n || (w_n.p - params.p).abs() > 1e-14 {
        return Err(Error::InvalidParameter("profile must be the ground state in R^N for the same p".into()));
    }
    let p = params.p;
    let integral = crate::radial::radial_power_integral(w_n, p + 1.0, 1e-10)?;
    Ok(LargeLAsymptote {
        limit: (0.5 * integral).powf((p - 1.0) / (p + 1.0)),
        exponent: 2.0 - params.n as f64 * (p - 1.0) / (p + 1.0),
    })
}
