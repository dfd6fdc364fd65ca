//! Parameter sweeps over `L`, trivial/nontrivial classification, the location of
//! the symmetry-breaking transition, and the pitchfork expansion
//! `u_L = w + δΦ₀ + δ²Φ₁ + ...` near the critical length.
//!
//! All comparisons near the transition use the critical length of the
//! discretization: the root in `L` of the lowest `cos(πt)`-sector eigenvalue at
//! the discrete trivial solution. It differs from `π/√λ₁` by the discretization
//! error only, and makes the kernel relation `L₀Φ₀ = 0` exact on the grid.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RadialGrid, StripField, StripGrid};
use crate::linalg::{wdot, Pencil};
use crate::params::ProblemParams;
use crate::radial::{discrete_ground_state, shoot_ground_state, RadialProfile, ShootingOptions, TrivialBranch};
use crate::spectral::{critical_length, principal_eigenvalue, radial_operator, EIGEN_TOL};
use crate::strip::{multistart, symmetry_breaking_measure, SolverOptions, Status};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOptions {
    pub solver: SolverOptions,
    pub grid: GridSpec,
    /// Trivial iff `s < trivial_s_tol * ||u||` ...
    pub trivial_s_tol: f64,
    /// ... and `|c - c*_h| / c*_h < trivial_c_tol`.
    pub trivial_c_tol: f64,
    /// Bracket width at which transition bisection stops.
    pub l_tol: f64,
    /// Step of the reference ground-state profile.
    pub profile_h: f64,
    /// Relative tolerance for the monotonicity and ordering checks.
    pub order_tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            grid: GridSpec::default(),
            trivial_s_tol: 1e-4,
            trivial_c_tol: 1e-4,
            l_tol: 0.01,
            profile_h: 0.01,
            order_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Trivial,
    Nontrivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationPoint {
    #[serde(rename = "L")]
    pub l: f64,
    pub c: f64,
    /// `γ₀ L^{exponent}` from the reference profile.
    pub cstar: f64,
    /// Quotient of the exact discrete trivial solution on this grid.
    pub cstar_discrete: f64,
    pub delta: f64,
    pub s: f64,
    pub u_norm: f64,
    pub classification: Option<Classification>,
    pub attained: bool,
    pub status: Option<Status>,
    pub iterations: usize,
    /// Failure message or diagnostic note.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationDiagram {
    pub params: ProblemParams,
    pub points: Vec<BifurcationPoint>,
    pub l_star_measured: Option<f64>,
    pub l_star_predicted: f64,
    pub l_star_discrete: f64,
    pub l_double_star: Option<f64>,
    /// Violations of the phase structure, monotonicity or ordering.
    pub anomalies: Vec<String>,
}

impl BifurcationDiagram {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("L,c,cstar,delta,s,classification\n");
        for pt in &self.points {
            let class = match pt.classification {
                Some(Classification::Trivial) => "trivial",
                Some(Classification::Nontrivial) => "nontrivial",
                None => "failed",
            };
            let f = crate::io::fmt_f64;
            out.push_str(&format!("{},{},{},{},{},{}\n", f(pt.l), f(pt.c), f(pt.cstar), f(pt.delta), f(pt.s), class));
        }
        out
    }

    pub fn nontrivial(&self) -> impl Iterator<Item = &BifurcationPoint> {
        self.points.iter().filter(|p| p.classification == Some(Classification::Nontrivial))
    }
}

/// Reference quantities shared by every point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchContext {
    pub params: ProblemParams,
    pub w0: RadialProfile,
    pub trivial: TrivialBranch,
    pub lambda1: f64,
    pub l_star_predicted: f64,
    pub l_star_discrete: f64,
}

impl BranchContext {
    pub fn new(params: &ProblemParams, opts: &SweepOptions) -> Result<Self> {
        params.validate()?;
        let d = params.cross_dim();
        let grid = RadialGrid::new(d, opts.profile_h, 25.0)?;
        let w0 = shoot_ground_state(d, params.p, grid, &ShootingOptions::default())?;
        let trivial = crate::radial::trivial_branch_energy(params, &w0)?;
        let lambda1 = principal_eigenvalue(&w0, params.p)?.eigenvalue;
        let l_star_predicted = critical_length(lambda1, params.n, params.p)?.l_star_predicted;
        let sgrid = opts.grid.grid_for(d, l_star_predicted)?;
        let l_star_discrete = discrete_critical_length(params, sgrid, l_star_predicted)?;
        Ok(Self { params: *params, w0, trivial, lambda1, l_star_predicted, l_star_discrete })
    }
}

/// Radial values of the discrete trivial solution at parameter `l` on `grid`.
fn trivial_radial(p: f64, grid: &RadialGrid, l: f64) -> Result<Vec<f64>> {
    let prof = discrete_ground_state(grid.d, p, grid.scaled(l))?;
    let s = l.powf(2.0 / (p - 1.0));
    Ok(prof.values.iter().map(|v| s * v).collect())
}

fn potential(u: &[f64], p: f64) -> Vec<f64> {
    u.iter().map(|x| p * x.max(0.0).powf(p - 1.0)).collect()
}

/// Lowest `cos(πt)`-sector eigenvalue of the linearization at the discrete trivial solution.
pub fn first_transverse_eigenvalue(params: &ProblemParams, grid: StripGrid, l: f64) -> Result<f64> {
    let (value, _) = first_transverse_mode(params.p, &grid, l)?;
    Ok(value)
}

fn first_transverse_mode(p: f64, grid: &StripGrid, l: f64) -> Result<(f64, Vec<f64>)> {
    let u = trivial_radial(p, &grid.radial, l)?;
    let b = radial_operator(&grid.radial, &potential(&u, p), l * l + grid.transverse_eigenvalue(1));
    let w = grid.radial.cell_volumes();
    let pair = Pencil::new(&b, &w).eigenpair(0, &[], EIGEN_TOL)?;
    let mut phi = pair.vector;
    if phi.iter().sum::<f64>() < 0.0 {
        phi.iter_mut().for_each(|x| *x = -*x);
    }
    Ok((pair.value, phi))
}

/// Root in `L` of [`first_transverse_eigenvalue`] by the secant method from `guess`.
pub fn discrete_critical_length(params: &ProblemParams, grid: StripGrid, guess: f64) -> Result<f64> {
    let f = |l: f64| first_transverse_eigenvalue(params, grid, l);
    let (mut a, mut b) = (guess, guess * 1.01);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    for it in 0..50 {
        if fb == fa {
            break;
        }
        let c = b - fb * (b - a) / (fb - fa);
        a = b;
        fa = fb;
        b = c;
        fb = f(b)?;
        if (b - a).abs() < 1e-12 * b {
            return Ok(b);
        }
        if it == 49 {
            return Err(Error::NotConverged { iterations: 50, residual: fb });
        }
    }
    Ok(b)
}

/// `Φ₀ = φ₀(r) cos(πt)`, `∫Φ₀² = 1`, from the kernel of the linearization at
/// the discrete trivial solution with parameter `l_star`.
pub fn kernel_mode(p: f64, grid: StripGrid, l_star: f64) -> Result<StripField> {
    let (_, phi) = first_transverse_mode(p, &grid, l_star)?;
    let cosine: Vec<f64> = (0..grid.m).map(|j| (PI * grid.t(j) / grid.height).cos()).collect();
    let mut f = StripField::from_fn(grid, |_, _| 0.0);
    for i in 0..grid.radial.n {
        for j in 0..grid.m {
            f.values[grid.index(i, j)] = phi[i] * cosine[j];
        }
    }
    let nrm = f.l2_norm();
    f.values.iter_mut().for_each(|x| *x /= nrm);
    Ok(f)
}

fn classify(pt: &BifurcationPoint, opts: &SweepOptions) -> Classification {
    let trivial_s = pt.s < opts.trivial_s_tol * pt.u_norm;
    let trivial_c = ((pt.c - pt.cstar_discrete) / pt.cstar_discrete).abs() < opts.trivial_c_tol;
    if trivial_s && trivial_c {
        Classification::Trivial
    } else {
        Classification::Nontrivial
    }
}

/// Solves one sweep point on `grid`.
pub fn solve_point(ctx: &BranchContext, l: f64, grid: StripGrid, opts: &SweepOptions) -> Result<BifurcationPoint> {
    let params = ctx.params.with_l(l);
    let run = multistart(&params, grid, &opts.solver)?;
    let phi0 = kernel_mode(params.p, grid, ctx.l_star_discrete)?;
    let u = &run.best.field;
    let (delta, s) = symmetry_breaking_measure(u, &run.trivial, &phi0)?;
    let mut pt = BifurcationPoint {
        l,
        c: run.best.energy.quotient,
        cstar: ctx.trivial.cstar(l),
        cstar_discrete: crate::strip::quotient(&run.trivial, &params),
        delta,
        s,
        u_norm: u.l2_norm(),
        classification: None,
        attained: run.best.status == Status::Converged,
        status: Some(run.best.status),
        iterations: run.best.iterations,
        note: None,
    };
    pt.classification = Some(classify(&pt, opts));
    Ok(pt)
}

fn failed_point(ctx: &BranchContext, l: f64, err: &Error) -> BifurcationPoint {
    BifurcationPoint {
        l,
        c: f64::NAN,
        cstar: ctx.trivial.cstar(l),
        cstar_discrete: f64::NAN,
        delta: f64::NAN,
        s: f64::NAN,
        u_norm: f64::NAN,
        classification: None,
        attained: false,
        status: None,
        iterations: 0,
        note: Some(format!("solver failure: {err}")),
    }
}

/// One point per `L`, each on the grid built by `opts.grid` for that `L`.
pub fn sweep(params: &ProblemParams, l_values: &[f64], opts: &SweepOptions) -> Result<BifurcationDiagram> {
    let ctx = BranchContext::new(params, opts)?;
    sweep_with_context(&ctx, l_values, opts)
}

/// As [`sweep`], reusing the reference quantities in `ctx`.
pub fn sweep_with_context(ctx: &BranchContext, l_values: &[f64], opts: &SweepOptions) -> Result<BifurcationDiagram> {
    let d = ctx.params.cross_dim();
    sweep_with(ctx, l_values, opts, |l| opts.grid.grid_for(d, l))
}

/// As [`sweep`], with every point on the same `grid`.
pub fn sweep_on_grid(ctx: &BranchContext, l_values: &[f64], grid: StripGrid, opts: &SweepOptions) -> Result<BifurcationDiagram> {
    sweep_with(ctx, l_values, opts, |_| Ok(grid))
}

fn sweep_with<G>(ctx: &BranchContext, l_values: &[f64], opts: &SweepOptions, grid_for: G) -> Result<BifurcationDiagram>
where
    G: Fn(f64) -> Result<StripGrid> + Sync,
{
    if l_values.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::InvalidParameter("every L must be positive".into()));
    }
    let s_half = if ctx.params.is_critical() {
        Some(crate::critical::sobolev_constants(ctx.params.n)?.s_half)
    } else {
        None
    };
    let mut points: Vec<BifurcationPoint> = l_values
        .par_iter()
        .map(|&l| match grid_for(l).and_then(|g| solve_point(ctx, l, g, opts)) {
            Ok(pt) => pt,
            Err(e) => {
                log::warn!("sweep point L = {l} failed: {e}");
                failed_point(ctx, l, &e)
            }
        })
        .collect();
    points.sort_by(|a, b| a.l.total_cmp(&b.l));

    let mut l_double_star = None;
    if let Some(s_half) = s_half {
        let mut all_attained = true;
        for pt in points.iter_mut() {
            if pt.attained && pt.c < s_half {
                if all_attained {
                    l_double_star = Some(pt.l);
                }
            } else {
                all_attained = false;
                pt.attained = false;
                let note = format!("non-attainment indicator: c = {} vs S_half = {s_half}", pt.c);
                log::warn!("L = {}: {note}", pt.l);
                pt.note = Some(note);
            }
        }
    }
    let anomalies = check_structure(&points, opts);
    for a in &anomalies {
        log::warn!("sweep anomaly: {a}");
    }
    let l_star_measured = measured_transition(&points);
    Ok(BifurcationDiagram {
        params: ctx.params,
        points,
        l_star_measured,
        l_star_predicted: ctx.l_star_predicted,
        l_star_discrete: ctx.l_star_discrete,
        l_double_star,
        anomalies,
    })
}

fn measured_transition(points: &[BifurcationPoint]) -> Option<f64> {
    let classified: Vec<&BifurcationPoint> = points.iter().filter(|p| p.classification.is_some()).collect();
    classified.windows(2).find_map(|w| {
        (w[0].classification == Some(Classification::Trivial) && w[1].classification == Some(Classification::Nontrivial))
            .then(|| 0.5 * (w[0].l + w[1].l))
    })
}

/// Phase partition, strict increase of `c` over attained points, and `c ≤ c*`.
pub fn check_structure(points: &[BifurcationPoint], opts: &SweepOptions) -> Vec<String> {
    let mut out = Vec::new();
    let mut seen_nontrivial: Option<f64> = None;
    for pt in points {
        match pt.classification {
            Some(Classification::Nontrivial) => {
                seen_nontrivial.get_or_insert(pt.l);
            }
            Some(Classification::Trivial) => {
                if let Some(l0) = seen_nontrivial {
                    out.push(format!("trivial point at L = {} after nontrivial point at L = {l0}", pt.l));
                }
            }
            None => {}
        }
        if pt.c.is_finite() && pt.c > pt.cstar * (1.0 + opts.trivial_c_tol) {
            out.push(format!("c = {} exceeds c* = {} at L = {}", pt.c, pt.cstar, pt.l));
        }
        let sym = pt.s < opts.trivial_s_tol * pt.u_norm;
        let flat = pt.delta.abs() < opts.trivial_s_tol * pt.u_norm;
        if pt.classification.is_some() && sym != flat {
            out.push(format!("s = {:e} and delta = {:e} disagree at L = {}", pt.s, pt.delta, pt.l));
        }
    }
    let attained: Vec<&BifurcationPoint> = points.iter().filter(|p| p.attained && p.c.is_finite()).collect();
    for w in attained.windows(2) {
        if w[1].c - w[0].c <= opts.order_tol * w[0].c.abs() {
            out.push(format!("c not increasing: c({}) = {} vs c({}) = {}", w[0].l, w[0].c, w[1].l, w[1].c));
        }
    }
    out
}

/// Bisection on the classification between `bracket.0` and `bracket.1`.
pub fn locate_transition(ctx: &BranchContext, bracket: (f64, f64), opts: &SweepOptions) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    let d = ctx.params.cross_dim();
    let class = |l: f64| -> Result<Classification> {
        let pt = solve_point(ctx, l, opts.grid.grid_for(d, l)?, opts)?;
        Ok(pt.classification.expect("solved point is classified"))
    };
    let (c_lo, c_hi) = rayon::join(|| class(lo), || class(hi));
    let (c_lo, c_hi) = (c_lo?, c_hi?);
    if c_lo == c_hi {
        return Err(Error::NoBracket { lo, hi });
    }
    while hi - lo > opts.l_tol {
        let mid = 0.5 * (lo + hi);
        if class(mid)? == c_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Second-order data of the pitchfork at the discrete critical length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PitchforkExpansion {
    pub l_star: f64,
    pub p: f64,
    pub phi0: StripField,
    pub psi_a: StripField,
    pub psi_b: StripField,
    /// `(L*² - L²) / δ²`.
    pub mu: f64,
    /// `∫ w^{p-2} Φ₀² Ψa`, `∫ w^{p-2} Φ₀² Ψb`, `∫ w^{p-3} Φ₀⁴`.
    pub kappa_terms: [f64; 3],
    pub solvability_residual: f64,
    /// `∫ Φ₀²` and `∫ Φ₀ w`.
    pub phi0_norm: f64,
    pub phi0_dot_trivial: f64,
    /// `∫ Ψa Φ₀` and `∫ Ψb Φ₀`.
    pub kernel_components: [f64; 2],
}

impl PitchforkExpansion {
    /// `√((L*² - L²)/μ)` on the side where the radicand is positive.
    pub fn predicted_delta(&self, l: f64) -> Option<f64> {
        let r = (self.l_star * self.l_star - l * l) / self.mu;
        (r >= 0.0).then(|| r.sqrt())
    }
}

fn sector_solve(grid: &StripGrid, v: &[f64], shift: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let b = radial_operator(&grid.radial, v, shift);
    let w = grid.radial.cell_volumes();
    let f: Vec<f64> = rhs.iter().zip(&w).map(|(r, w)| r * w).collect();
    Ok(b.factor()?.solve(&f))
}

/// Builds `Φ₀`, solves `L₀Ψa = -w` and `L₀Ψb = -(p(p-1)/2) w^{p-2} Φ₀²` with
/// `L₀ = Δ - L*² + p w^{p-1}`, and determines `μ` from the solvability condition
/// `μ(1 + p(p-1)∫w^{p-2}Φ₀²Ψa) + p(p-1)∫w^{p-2}Φ₀²Ψb + p(p-1)(p-2)/6 ∫w^{p-3}Φ₀⁴ = 0`.
///
/// The right-hand sides live in the `1` and `cos(2πt)` sectors, where `L₀` is
/// invertible; the kernel `Φ₀` sits in the `cos(πt)` sector.
pub fn pitchfork_expansion(params: &ProblemParams, grid: StripGrid, l_star: f64) -> Result<PitchforkExpansion> {
    let p = params.p;
    if p < 2.0 {
        return Err(Error::InvalidParameter(format!(
            "pitchfork expansion needs p >= 2 (w^(p-3) terms diverge at infinity), got p = {p}"
        )));
    }
    let rg = grid.radial;
    let w_r = trivial_radial(p, &rg, l_star)?;
    let w_star = StripField::from_radial(grid, &w_r)?;
    let phi0 = kernel_mode(p, grid, l_star)?;
    let v = potential(&w_r, p);
    let l2 = l_star * l_star;
    let weights = grid.weights();

    // Φ₀² = φ₀(r)² cos²(πt) = φ₀(r)² (1 + cos(2πt)) / 2 pointwise.
    let j_mid = 0;
    let cos0 = (PI * grid.t(j_mid) / grid.height).cos();
    let phi_r: Vec<f64> = (0..rg.n).map(|i| phi0.at(i, j_mid) / cos0).collect();
    let coef = 0.5 * p * (p - 1.0);
    let g: Vec<f64> = (0..rg.n).map(|i| coef * w_r[i].max(0.0).powf(p - 2.0) * phi_r[i] * phi_r[i]).collect();

    let psi_a_r = sector_solve(&grid, &v, l2, &w_r)?;
    let half_g: Vec<f64> = g.iter().map(|x| 0.5 * x).collect();
    let psi_b0 = sector_solve(&grid, &v, l2, &half_g)?;
    let psi_b2 = sector_solve(&grid, &v, l2 + grid.transverse_eigenvalue(2), &half_g)?;

    let psi_a = StripField::from_radial(grid, &psi_a_r)?;
    let mut psi_b = StripField::zeros(grid);
    for i in 0..rg.n {
        for j in 0..grid.m {
            let c2 = (2.0 * PI * grid.t(j) / grid.height).cos();
            psi_b.values[grid.index(i, j)] = psi_b0[i] + psi_b2[i] * c2;
        }
    }

    // Kernel components of the right-hand sides.
    let rhs_b: Vec<f64> = (0..grid.len()).map(|k| coef * w_star.values[k].max(0.0).powf(p - 2.0) * phi0.values[k].powi(2)).collect();
    for rhs in [&w_star.values, &rhs_b] {
        let comp = wdot(&weights, rhs, &phi0.values);
        let scale = wdot(&weights, rhs, rhs).sqrt();
        if comp.abs() > 1e-8 * scale {
            return Err(Error::SingularProjection { component: comp / scale, tol: 1e-8 });
        }
    }

    let wp2: Vec<f64> = w_star.values.iter().map(|x| x.max(0.0).powf(p - 2.0)).collect();
    let wp3: Vec<f64> = w_star.values.iter().map(|x| if p == 3.0 { 1.0 } else { x.max(0.0).powf(p - 3.0) }).collect();
    let phi2: Vec<f64> = phi0.values.iter().map(|x| x * x).collect();
    let mut kappa = [0.0; 3];
    for k in 0..grid.len() {
        kappa[0] += weights[k] * wp2[k] * phi2[k] * psi_a.values[k];
        kappa[1] += weights[k] * wp2[k] * phi2[k] * psi_b.values[k];
        kappa[2] += weights[k] * wp3[k] * phi2[k] * phi2[k];
    }
    let pp = p * (p - 1.0);
    let cubic = pp * (p - 2.0) / 6.0;
    let norm = wdot(&weights, &phi0.values, &phi0.values);
    let mu = -(pp * kappa[1] + cubic * kappa[2]) / (norm + pp * kappa[0]);
    if !mu.is_finite() || mu == 0.0 {
        return Err(Error::NegativeRadicandBothSides { mu });
    }
    let phi1: Vec<f64> = (0..grid.len()).map(|k| mu * psi_a.values[k] + psi_b.values[k]).collect();
    let mut middle = 0.0;
    for k in 0..grid.len() {
        middle += weights[k] * wp2[k] * phi2[k] * phi1[k];
    }
    let solvability_residual = mu * norm + pp * middle + cubic * kappa[2];
    Ok(PitchforkExpansion {
        l_star,
        p,
        kernel_components: [wdot(&weights, &psi_a.values, &phi0.values), wdot(&weights, &psi_b.values, &phi0.values)],
        phi0_norm: norm,
        phi0_dot_trivial: wdot(&weights, &phi0.values, &w_star.values),
        phi0,
        psi_a,
        psi_b,
        mu,
        kappa_terms: kappa,
        solvability_residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PitchforkPoint {
    #[serde(rename = "L")]
    pub l: f64,
    pub delta_measured: f64,
    pub delta_predicted: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PitchforkReport {
    pub l_star: f64,
    pub mu: f64,
    pub points: Vec<PitchforkPoint>,
    /// Least-squares slope of `δ²` against `L² - L*²` through the origin.
    pub fitted_inverse_mu: f64,
    /// `|fitted · |μ| - 1|`.
    pub fit_relative_error: f64,
    /// Linear coefficient of the fit `δ² = a x + b x²`, `x = L² - L*²`.
    pub fitted_inverse_mu_quadratic: Option<f64>,
    /// Slope of `log|δ|` against `log(L - L*)`.
    pub loglog_slope: f64,
}

/// Compares measured `δ` of nontrivial diagram points with `L/L* ≤ 1.05` against the expansion.
pub fn validate_pitchfork(expansion: &PitchforkExpansion, diagram: &BifurcationDiagram) -> Result<PitchforkReport> {
    let ls = expansion.l_star;
    let pts: Vec<&BifurcationPoint> = diagram
        .nontrivial()
        .filter(|p| p.l > ls && p.l / ls <= 1.05 + 1e-9 && p.delta.is_finite())
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientPoints { needed: 3, found: pts.len() });
    }
    let mut points = Vec::with_capacity(pts.len());
    let (mut sxy, mut sxx) = (0.0, 0.0);
    let mut logs = Vec::with_capacity(pts.len());
    let mut quad = Vec::with_capacity(pts.len());
    for pt in &pts {
        let x = pt.l * pt.l - ls * ls;
        let d = pt.delta.abs();
        let pred = expansion.predicted_delta(pt.l).unwrap_or(f64::NAN);
        points.push(PitchforkPoint { l: pt.l, delta_measured: d, delta_predicted: pred, relative_error: (d - pred).abs() / pred });
        sxy += x * d * d;
        sxx += x * x;
        logs.push(((pt.l - ls).ln(), d.ln()));
        quad.push((x, d * d));
    }
    let fitted = sxy / sxx;
    Ok(PitchforkReport {
        l_star: ls,
        mu: expansion.mu,
        points,
        fitted_inverse_mu: fitted,
        fit_relative_error: (fitted * expansion.mu.abs() - 1.0).abs(),
        fitted_inverse_mu_quadratic: quadratic_through_origin(&quad),
        loglog_slope: line_slope(&logs),
    })
}

fn line_slope(xy: &[(f64, f64)]) -> f64 {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Linear coefficient `a` of the least-squares fit `y = a x + b x²`.
fn quadratic_through_origin(xy: &[(f64, f64)]) -> Option<f64> {
    let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y) in xy {
        s11 += x * x;
        s12 += x * x * x;
        s22 += x * x * x * x;
        t1 += x * y;
        t2 += x * x * y;
    }
    let det = s11 * s22 - s12 * s12;
    (det.abs() > 1e-300).then(|| (t1 * s22 - t2 * s12) / det)
}
