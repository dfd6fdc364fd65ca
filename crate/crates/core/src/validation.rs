//! End-to-end acceptance checks. Each criterion returns a pass/fail record with a
//! one-line summary of the measured numbers.

use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bifurcation::{
    locate_transition, pitchfork_expansion, sweep_on_grid, sweep_with_context, validate_pitchfork, BifurcationDiagram,
    BranchContext, Classification, SweepOptions,
};
use crate::critical::{fit_log_mass, instanton_residual, sobolev_constants, test_function_quotient, INSTANTON_STEP};
use crate::error::{Error, Result};
use crate::grid::{RadialGrid, StripField, StripGrid};
use crate::params::ProblemParams;
use crate::radial::{closed_form_1d, discrete_trivial_field, shoot_ground_state, ShootingOptions};
use crate::spectral::{lambda1_closed_form, linearized_spectrum, principal_eigenvalue, stability_terms, transverse_second_eigenvalue};
use crate::strip::{large_l_asymptote, multistart};

pub const CRITERIA: [(usize, &str); 10] = [
    (1, "principal eigenvalue closed form"),
    (2, "one-dimensional ground state"),
    (3, "transition location"),
    (4, "energy ordering"),
    (5, "second eigenvalue law"),
    (6, "stability at minimizers"),
    (7, "large-L asymptote"),
    (8, "pitchfork scaling"),
    (9, "critical constants"),
    (10, "monotonicity of c(L)"),
];

/// `L` values of the shared sweep used by the transition, ordering and monotonicity checks.
pub const SWEEP_L: [f64; 8] = [0.5, 1.0, 1.5, 1.75, 1.9, 2.2, 2.5, 3.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {}: {} ({:.1} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    pub sweep: SweepOptions,
    /// Seed of the random test fields of the stability check.
    pub seed: u64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self { sweep: SweepOptions::default(), seed: 0 }
    }
}

/// Runs criteria on demand, sharing the `N = 2, p = 3` branch data between them.
pub struct Validator {
    opts: ValidationOptions,
    context: OnceLock<Result<BranchContext>>,
    diagram: OnceLock<Result<BifurcationDiagram>>,
}

fn cubic_line(l: f64) -> ProblemParams {
    ProblemParams { n: 2, p: 3.0, l }
}

impl Validator {
    pub fn new(opts: ValidationOptions) -> Self {
        Self { opts, context: OnceLock::new(), diagram: OnceLock::new() }
    }

    fn context(&self) -> Result<&BranchContext> {
        self.context
            .get_or_init(|| BranchContext::new(&cubic_line(1.0), &self.opts.sweep))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Sweep of `N = 2, p = 3` over [`SWEEP_L`].
    pub fn diagram(&self) -> Result<&BifurcationDiagram> {
        self.diagram
            .get_or_init(|| {
                let ctx = self.context()?;
                sweep_with_context(ctx, &SWEEP_L, &self.opts.sweep)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn run(&self, id: usize) -> CriterionOutcome {
        let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1).to_string();
        let start = Instant::now();
        let result = match id {
            1 => self.principal_eigenvalue(),
            2 => self.ground_state_1d(),
            3 => self.transition(),
            4 => self.ordering(),
            5 => self.second_eigenvalue_law(),
            6 => self.stability(),
            7 => self.large_l(),
            8 => self.pitchfork(),
            9 => self.critical(),
            10 => self.monotonicity(),
            _ => Err(Error::InvalidParameter(format!("no criterion {id}"))),
        };
        let seconds = start.elapsed().as_secs_f64();
        let (passed, detail) = match result {
            Ok((passed, detail)) => (passed, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        CriterionOutcome { id, name, passed, detail, seconds }
    }

    pub fn run_all(&self, ids: &[usize]) -> Vec<CriterionOutcome> {
        ids.iter().map(|&id| self.run(id)).collect()
    }

    fn principal_eigenvalue(&self) -> Result<(bool, String)> {
        let start = Instant::now();
        let mut ok = true;
        let mut parts = Vec::new();
        for p in [2.0, 3.0, 4.0] {
            let grid = RadialGrid::new(1, 0.01, 25.0)?;
            let w0 = shoot_ground_state(1, p, grid, &ShootingOptions::default())?;
            let l1 = principal_eigenvalue(&w0, p)?.eigenvalue;
            let exact = lambda1_closed_form(p);
            let rel = (l1 - exact).abs() / exact;
            ok &= rel < 1e-3;
            parts.push(format!("p={p}: {l1:.6} vs {exact} (rel {rel:.1e})"));
        }
        let secs = start.elapsed().as_secs_f64();
        ok &= secs < 5.0;
        Ok((ok, format!("{}; {secs:.2} s < 5 s", parts.join(", "))))
    }

    fn ground_state_1d(&self) -> Result<(bool, String)> {
        let start = Instant::now();
        let grid = RadialGrid::new(1, 0.01, 25.0)?;
        let w = shoot_ground_state(1, 3.0, grid, &ShootingOptions::default())?;
        let err = grid.nodes().iter().zip(&w.values).map(|(r, v)| (v - closed_form_1d(3.0, *r)).abs()).fold(0.0, f64::max);
        let secs = start.elapsed().as_secs_f64();
        Ok((err < 1e-6 && secs < 1.0, format!("max error {err:.2e} < 1e-6 at h = 0.01; {secs:.3} s < 1 s")))
    }

    fn transition(&self) -> Result<(bool, String)> {
        let diagram = self.diagram()?;
        let ctx = self.context()?;
        let class_of = |l: f64| diagram.points.iter().find(|p| (p.l - l).abs() < 1e-12).and_then(|p| p.classification);
        let mut ok = true;
        let mut wrong = Vec::new();
        for (l, want) in [
            (1.0, Classification::Trivial),
            (1.5, Classification::Trivial),
            (1.75, Classification::Trivial),
            (1.9, Classification::Nontrivial),
            (2.5, Classification::Nontrivial),
            (3.0, Classification::Nontrivial),
        ] {
            let got = class_of(l);
            if got != Some(want) {
                ok = false;
                wrong.push(format!("L={l}: {got:?}"));
            }
        }
        let measured = locate_transition(ctx, (1.75, 1.9), &self.opts.sweep)?;
        let exact = PI / 3f64.sqrt();
        ok &= measured > 1.76 && measured < 1.87;
        let classes = if wrong.is_empty() { "classifications as expected".to_string() } else { format!("misclassified {}", wrong.join(", ")) };
        Ok((ok, format!("transition at {measured:.4} in (1.76, 1.87), pi/sqrt(3) = {exact:.4}; {classes}")))
    }

    fn ordering(&self) -> Result<(bool, String)> {
        let diagram = self.diagram()?;
        let at = |l: f64| {
            diagram
                .points
                .iter()
                .find(|p| (p.l - l).abs() < 1e-12)
                .ok_or_else(|| Error::InvalidParameter(format!("sweep has no point at L = {l}")))
        };
        let (a, b) = (at(2.5)?, at(1.5)?);
        let gap = (a.cstar - a.c) / a.cstar;
        let dev = (b.c - b.cstar).abs() / b.cstar;
        Ok((
            a.c < a.cstar && gap > 1e-3 && dev < 1e-4,
            format!("c(2.5) = {:.6} vs c* = {:.6} (gap {gap:.2e} > 1e-3); |c(1.5) - c*|/c* = {dev:.2e} < 1e-4", a.c, a.cstar),
        ))
    }

    fn second_eigenvalue(&self, l: f64) -> Result<f64> {
        let params = cubic_line(l);
        let grid = self.opts.sweep.grid.grid_for(1, l)?;
        let u = discrete_trivial_field(&params, grid)?;
        Ok(linearized_spectrum(&u, &params, 2)?.eigen[1].eigenvalue)
    }

    fn second_eigenvalue_law(&self) -> Result<(bool, String)> {
        let lambda1 = self.context()?.lambda1;
        let mut ok = true;
        let mut parts = Vec::new();
        for l in [0.5, 1.0, 1.5] {
            let got = self.second_eigenvalue(l)?;
            let want = transverse_second_eigenvalue(lambda1, l);
            let err = (got - want).abs();
            ok &= err < 5e-3;
            parts.push(format!("L={l}: {got:.5} vs {want:.5} (err {err:.1e})"));
        }
        let (mut lo, mut hi) = (1.5, 2.2);
        let (f_lo, f_hi) = (self.second_eigenvalue(lo)?, self.second_eigenvalue(hi)?);
        if f_lo.signum() == f_hi.signum() {
            return Err(Error::NoBracket { lo, hi });
        }
        while hi - lo > 0.02 {
            let mid = 0.5 * (lo + hi);
            if self.second_eigenvalue(mid)?.signum() == f_lo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let l_star = PI / lambda1.sqrt();
        let bracket_ok = lo - 0.02 <= l_star && l_star <= hi + 0.02;
        ok &= bracket_ok;
        parts.push(format!("sign change in [{lo:.4}, {hi:.4}], L* = {l_star:.4}"));
        Ok((ok, parts.join("; ")))
    }

    fn stability(&self) -> Result<(bool, String)> {
        let mut ok = true;
        let mut parts = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed);
        for l in [1.0, 2.5] {
            let params = cubic_line(l);
            let grid = self.opts.sweep.grid.grid_for(1, l)?;
            let run = multistart(&params, grid, &self.opts.sweep.solver)?;
            let u = &run.best.field;
            let mut worst = f64::INFINITY;
            for _ in 0..20 {
                let phi = smooth_random_field(grid, l, &mut rng);
                let t = stability_terms(u, &phi, &params)?;
                worst = worst.min(t.value() / t.scale());
            }
            let lambda2 = linearized_spectrum(u, &params, 2)?.eigen[1].eigenvalue;
            ok &= worst >= -1e-6 && lambda2 >= -1e-6;
            parts.push(format!("L={l}: min form/scale {worst:.3e}, lambda2 {lambda2:.4e}"));
        }
        Ok((ok, parts.join("; ")))
    }

    fn large_l(&self) -> Result<(bool, String)> {
        let l = 12.0;
        let params = cubic_line(l);
        let w2 = shoot_ground_state(2, 3.0, RadialGrid::new(2, 0.01, 25.0)?, &ShootingOptions::default())?;
        let limit = large_l_asymptote(&params, &w2)?.limit;
        let grid = self.opts.sweep.grid.grid_for(1, l)?;
        let c = multistart(&params, grid, &self.opts.sweep.solver)?.best.energy.quotient;
        let rel = (c / l - limit).abs() / limit;
        Ok((rel < 0.03, format!("c(12)/12 = {:.5} vs {limit:.5} (rel {rel:.2e} < 3e-2)", c / l)))
    }

    fn pitchfork(&self) -> Result<(bool, String)> {
        let ctx = self.context()?;
        let ls = ctx.l_star_discrete;
        let grid = self.opts.sweep.grid.grid_for(1, ls)?;
        let expansion = pitchfork_expansion(&ctx.params, grid, ls)?;
        let l_values: Vec<f64> = [1.01, 1.02, 1.05].iter().map(|r| r * ls).collect();
        let diagram = sweep_on_grid(ctx, &l_values, grid, &self.opts.sweep)?;
        let report = validate_pitchfork(&expansion, &diagram)?;
        let slope_ok = (0.4..=0.6).contains(&report.loglog_slope);
        Ok((
            report.fit_relative_error < 0.1 && slope_ok,
            format!(
                "mu = {:.5}, fitted delta^2/(L^2-L*^2) = {:.5} vs 1/|mu| = {:.5} (rel {:.2e} < 0.1); log-log slope {:.4} in [0.4, 0.6]",
                report.mu,
                report.fitted_inverse_mu,
                1.0 / report.mu.abs(),
                report.fit_relative_error,
                report.loglog_slope
            ),
        ))
    }

    fn critical(&self) -> Result<(bool, String)> {
        let mut ratio_err: f64 = 0.0;
        for n in 3..=7 {
            let k = sobolev_constants(n)?;
            ratio_err = ratio_err.max((k.s_half / k.s - 0.5f64.powf(2.0 / n as f64)).abs());
        }
        let mut residual: f64 = 0.0;
        for n in 3..=6 {
            for r in [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
                residual = residual.max(instanton_residual(n, r, INSTANTON_STEP).abs());
            }
        }
        let (q, exp) = test_function_quotient(0.01, 0.1, 5)?;
        let s_half = exp.constants.s_half;
        let fit = fit_log_mass(&[0.02, 0.01, 0.005])?;
        let slope_err = (fit.slope / fit.predicted_slope - 1.0).abs();
        let cmax = fit.coefficients.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let cmin = fit.coefficients.iter().cloned().fold(f64::INFINITY, f64::min);
        let spread = (cmax - cmin) / cmin;
        let parts = [
            (ratio_err < 1e-14, format!("S_half/S - 2^(-2/N) max {ratio_err:.1e}")),
            (residual < 1e-8, format!("instanton residual {residual:.1e} < 1e-8")),
            (q < s_half, format!("N=5 eps=0.01 L=0.1 quotient {q:.10} vs S_half {s_half:.10} (diff {:+.3e})", q - s_half)),
            (
                slope_err < 0.15 && spread < 0.15,
                format!(
                    "N=4 log-mass slope {:.4} vs {:.4} (rel {slope_err:.1e}), coefficient spread {spread:.2e}",
                    fit.slope, fit.predicted_slope
                ),
            ),
        ];
        let ok = parts.iter().all(|p| p.0);
        let detail = parts.iter().map(|(ok, s)| format!("{}{s}", if *ok { "" } else { "FAILED " })).collect::<Vec<_>>().join("; ");
        Ok((ok, detail))
    }

    fn monotonicity(&self) -> Result<(bool, String)> {
        let diagram = self.diagram()?;
        let tol = self.opts.sweep.trivial_c_tol;
        let pts: Vec<_> = diagram.points.iter().filter(|p| p.c.is_finite()).collect();
        if pts.len() != diagram.points.len() {
            return Ok((false, format!("{} of {} sweep points failed", diagram.points.len() - pts.len(), diagram.points.len())));
        }
        let mut violations = Vec::new();
        for w in pts.windows(2) {
            if w[1].c - w[0].c <= self.opts.sweep.order_tol * w[0].c.abs() {
                violations.push(format!("c({}) >= c({})", w[0].l, w[1].l));
            }
        }
        for p in &pts {
            if p.c > p.cstar * (1.0 + tol) {
                violations.push(format!("c({}) = {} > c* = {}", p.l, p.c, p.cstar));
            }
        }
        let detail = if violations.is_empty() {
            format!("{} points, c strictly increasing and c <= c*(1 + {tol:e})", pts.len())
        } else {
            violations.join(", ")
        };
        Ok((violations.is_empty(), detail))
    }
}

/// `Σ a_{kj} cos(kπt) exp(-(L r / ρ_j)²)` with uniform random `a_{kj} ∈ [-1, 1]`,
/// `k < 4`, and three random widths `ρ_j ∈ [0.3, 3]`.
pub fn smooth_random_field<R: Rng>(grid: StripGrid, l: f64, rng: &mut R) -> StripField {
    let widths: Vec<f64> = (0..3).map(|_| rng.gen_range(0.3..3.0)).collect();
    let coef: Vec<[f64; 3]> = (0..4).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
    StripField::from_fn(grid, |r, t| {
        let mut v = 0.0;
        for (k, a) in coef.iter().enumerate() {
            let c = (k as f64 * PI * t).cos();
            for (aj, rho) in a.iter().zip(&widths) {
                v += aj * c * (-(l * r / rho).powi(2)).exp();
            }
        }
        v
    })
}
