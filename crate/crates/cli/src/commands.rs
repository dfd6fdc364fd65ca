use std::f64::consts::PI;

use anyhow::{Context, Result};
use serde_json::{json, Value};
use strip_core::bifurcation::{pitchfork_expansion, sweep, sweep_on_grid, validate_pitchfork, BranchContext};
use strip_core::config::RunConfig;
use strip_core::critical::{fit_log_mass, sobolev_constants, test_function_quotient};
use strip_core::radial::{discrete_trivial_field, shoot_ground_state, trivial_branch_energy, ShootingOptions};
use strip_core::spectral::{critical_length, linearized_spectrum, principal_eigenvalue, strip_csv};
use strip_core::strip::multistart;
use strip_core::validation::{ValidationOptions, Validator, CRITERIA};
use strip_core::{RadialGrid, RadialProfile};

use crate::artifacts::Output;
use crate::Command;

/// Runs one subcommand; `Ok(false)` reports a completed run whose checks failed.
pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<bool> {
    match cmd {
        Command::GroundState => ground_state(cfg),
        Command::Eigen => eigen(cfg),
        Command::SolveStrip => solve_strip(cfg),
        Command::Sweep => run_sweep(cfg),
        Command::Pitchfork => pitchfork(cfg),
        Command::CriticalConstants => critical_constants(cfg),
        Command::Validate { criteria } => validate(cfg, criteria),
        Command::Template => unreachable!("handled before the configuration is loaded"),
    }
}

fn profile(cfg: &RunConfig) -> Result<RadialProfile> {
    let d = cfg.problem.cross_dim();
    let grid = RadialGrid::new(d, cfg.eigen.h, cfg.eigen.r_max)?;
    shoot_ground_state(d, cfg.problem.p, grid, &ShootingOptions::default()).context("shooting the ground state")
}

fn ground_state(cfg: &RunConfig) -> Result<bool> {
    let mut out = Output::new(cfg, "ground-state")?;
    let w0 = profile(cfg)?;
    let branch = trivial_branch_energy(&cfg.problem, &w0)?;
    let mut record = w0.to_json();
    record["gamma0"] = json!(branch.gamma0);
    record["cstar_exponent"] = json!(branch.exponent);
    record["L"] = json!(cfg.problem.l);
    record["cstar"] = json!(branch.cstar(cfg.problem.l));
    out.write_text("ground_state.csv", &w0.to_csv())?;
    out.write_json("ground_state.json", record)?;
    println!("amplitude w(0) = {:.12}, c*(L = {}) = {:.12}", w0.amplitude, cfg.problem.l, branch.cstar(cfg.problem.l));
    out.finish()?;
    Ok(true)
}

fn eigen(cfg: &RunConfig) -> Result<bool> {
    let mut out = Output::new(cfg, "eigen")?;
    let params = &cfg.problem;
    let w0 = profile(cfg)?;
    let principal = principal_eigenvalue(&w0, params.p)?;
    let report = critical_length(principal.eigenvalue, params.n, params.p)?;
    let grid = cfg.sweep.grid.grid_for(params.cross_dim(), params.l)?;
    let trivial = discrete_trivial_field(params, grid)?;
    let spectrum = linearized_spectrum(&trivial, params, cfg.eigen.count)?;
    let record = json!({
        "N": params.n,
        "p": params.p,
        "lambda1": principal.eigenvalue,
        "lambda1_residual": principal.residual,
        "L_star": report.l_star_predicted,
        "closed_form_available": report.closed_form_available,
        "closed_form_value": report.closed_form_value,
        "L": params.l,
        "second_eigenvalue_law": PI * PI - params.l * params.l * principal.eigenvalue,
        "linearized_spectrum": spectrum.eigen.iter().map(|e| e.to_json()).collect::<Vec<Value>>(),
        "degenerate_cluster": spectrum.degenerate_cluster,
    });
    out.write_json("eigen.json", record)?;
    out.write_text("principal_eigenfunction.csv", &principal.eigenfunction_csv())?;
    println!("lambda1 = {:.10}, L* = {:.10}", principal.eigenvalue, report.l_star_predicted);
    out.finish()?;
    Ok(true)
}

fn solve_strip(cfg: &RunConfig) -> Result<bool> {
    let mut out = Output::new(cfg, "solve-strip")?;
    let params = &cfg.problem;
    let grid = cfg.sweep.grid.grid_for(params.cross_dim(), params.l)?;
    let run = multistart(params, grid, &cfg.sweep.solver)?;
    let record = json!({
        "problem": params,
        "energy": run.best.energy,
        "status": run.best.status,
        "iterations": run.best.iterations,
        "best_seed": run.best_seed,
        "seeds": run.seeds,
        "trivial_quotient": strip_core::strip::quotient(&run.trivial, params),
    });
    out.write_text("solution.csv", &strip_csv(&run.best.field, "u"))?;
    out.write_json("solve.json", record)?;
    println!("c(L = {}) = {:.12} ({:?}, seed {:?})", params.l, run.best.energy.quotient, run.best.status, run.best_seed);
    out.finish()?;
    Ok(true)
}

fn run_sweep(cfg: &RunConfig) -> Result<bool> {
    let l_values = cfg.schedule.values()?;
    let mut out = Output::new(cfg, "sweep")?;
    let diagram = sweep(&cfg.problem, &l_values, &cfg.sweep)?;
    out.write_text("diagram.csv", &diagram.to_csv())?;
    out.write_json("diagram.json", serde_json::to_value(&diagram)?)?;
    for a in &diagram.anomalies {
        println!("anomaly: {a}");
    }
    match diagram.l_star_measured {
        Some(l) => println!("transition between schedule points at L = {l:.4} (predicted {:.4})", diagram.l_star_predicted),
        None => println!("no trivial-to-nontrivial transition in the schedule (predicted {:.4})", diagram.l_star_predicted),
    }
    out.finish()?;
    Ok(true)
}

fn pitchfork(cfg: &RunConfig) -> Result<bool> {
    let mut out = Output::new(cfg, "pitchfork")?;
    let ctx = BranchContext::new(&cfg.problem, &cfg.sweep)?;
    let ls = ctx.l_star_discrete;
    let grid = cfg.sweep.grid.grid_for(cfg.problem.cross_dim(), ls)?;
    let expansion = pitchfork_expansion(&cfg.problem, grid, ls)?;
    let l_values: Vec<f64> = cfg.pitchfork.ratios.iter().map(|r| r * ls).collect();
    let diagram = sweep_on_grid(&ctx, &l_values, grid, &cfg.sweep)?;
    let report = validate_pitchfork(&expansion, &diagram)?;
    let record = json!({
        "L_star_predicted": ctx.l_star_predicted,
        "L_star_discrete": ls,
        "mu": expansion.mu,
        "kappa_terms": expansion.kappa_terms,
        "solvability_residual": expansion.solvability_residual,
        "kernel_components": expansion.kernel_components,
        "report": report,
    });
    out.write_text("pitchfork.csv", &diagram.to_csv())?;
    out.write_json("pitchfork.json", record)?;
    println!(
        "mu = {:.8}; fitted delta^2/(L^2 - L*^2) = {:.6} vs 1/|mu| = {:.6}; log-log slope {:.4}",
        expansion.mu,
        report.fitted_inverse_mu,
        1.0 / expansion.mu.abs(),
        report.loglog_slope
    );
    out.finish()?;
    Ok(true)
}

fn critical_constants(cfg: &RunConfig) -> Result<bool> {
    let mut out = Output::new(cfg, "critical-constants")?;
    let constants = (3..=7).map(sobolev_constants).collect::<Result<Vec<_>, _>>()?;
    let c = cfg.critical;
    let (quotient, expansion) = test_function_quotient(c.eps, c.l, c.n)?;
    let fit = fit_log_mass(&[0.02, 0.01, 0.005])?;
    let record = json!({
        "constants": constants,
        "test_function": { "quotient": quotient, "below_s_half": quotient < expansion.constants.s_half, "expansion": expansion },
        "log_mass_fit": fit,
    });
    out.write_json("constants.json", record)?;
    println!(
        "N = {}, eps = {}, L = {}: quotient {:.12} vs S_half {:.12}",
        c.n, c.eps, c.l, quotient, expansion.constants.s_half
    );
    out.finish()?;
    Ok(true)
}

fn validate(cfg: &RunConfig, criteria: &[usize]) -> Result<bool> {
    let mut out = Output::new(cfg, "validate")?;
    let ids: Vec<usize> = if criteria.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { criteria.to_vec() };
    let validator = Validator::new(ValidationOptions { sweep: cfg.sweep, seed: cfg.seed });
    let mut outcomes = Vec::with_capacity(ids.len());
    for id in ids {
        let o = validator.run(id);
        println!("{}", o.line());
        outcomes.push(o);
    }
    let passed = outcomes.iter().all(|o| o.passed);
    out.write_json("validation.json", json!({ "all_passed": passed, "criteria": outcomes }))?;
    out.finish()?;
    Ok(passed)
}
