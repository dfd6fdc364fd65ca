//! Linearized spectra about ground states and strip solutions.
//!
//! Two sign conventions are used, each matching the formula it feeds:
//! * [`principal_eigenvalue`] returns the *largest* eigenvalue `λ₁` of
//!   `Δ - 1 + p w₀^{p-1}` on R^{N-1}, so that `L* = π/√λ₁`.
//! * [`linearized_spectrum`] returns the *smallest* `λ` of
//!   `-Δφ + L²φ - p u^{p-1} φ = λ φ` on the strip, i.e. the negatives of the
//!   spectrum of `Δ - L² + p u^{p-1}`. Stability of a minimizer reads `λ₂ ≥ 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{RadialGrid, StripField};
use crate::linalg::{wdot, Eigenpair, Pencil, SymBanded};
use crate::params::ProblemParams;
use crate::radial::RadialProfile;

/// Target for `||A φ - λ φ|| / ||φ||`.
pub const EIGEN_TOL: f64 = 1e-9;

/// Radial eigenfunctions with more than this fraction of their mass in the outer
/// half of the grid are treated as box (continuum) states, not bound states.
pub const LOCALIZATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Eigenfunction {
    Radial(RadialProfile),
    Strip(StripField),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub eigenvalue: f64,
    pub eigenfunction: Eigenfunction,
    pub residual: f64,
    pub index: usize,
}

impl EigenResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "eigenvalue": self.eigenvalue, "residual": self.residual, "index": self.index })
    }

    pub fn eigenfunction_csv(&self) -> String {
        match &self.eigenfunction {
            Eigenfunction::Radial(p) => crate::io::csv_table(&["r", "phi"], &[&p.grid.nodes(), &p.values]),
            Eigenfunction::Strip(f) => strip_csv(f, "phi"),
        }
    }

    pub fn strip(&self) -> Option<&StripField> {
        match &self.eigenfunction {
            Eigenfunction::Strip(f) => Some(f),
            Eigenfunction::Radial(_) => None,
        }
    }

    pub fn radial(&self) -> Option<&RadialProfile> {
        match &self.eigenfunction {
            Eigenfunction::Radial(p) => Some(p),
            Eigenfunction::Strip(_) => None,
        }
    }
}

/// `(r, t, value)` table of a strip field.
pub fn strip_csv(f: &StripField, name: &str) -> String {
    let g = f.grid;
    let mut r = Vec::with_capacity(g.len());
    let mut t = Vec::with_capacity(g.len());
    for i in 0..g.radial.n {
        for j in 0..g.m {
            r.push(g.radial.r(i));
            t.push(g.t(j));
        }
    }
    crate::io::csv_table(&["r", "t", name], &[&r, &t, &f.values])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalLengthReport {
    pub lambda1: f64,
    pub l_star_predicted: f64,
    pub closed_form_available: bool,
    pub closed_form_value: Option<f64>,
}

/// `S + diag(W (shift - V))` on a radial grid.
pub fn radial_operator(grid: &RadialGrid, potential: &[f64], shift: f64) -> SymBanded {
    let w = grid.cell_volumes();
    let mut b = grid.stiffness();
    let diag: Vec<f64> = w.iter().zip(potential).map(|(w, v)| w * (shift - v)).collect();
    b.add_diagonal(&diag);
    b
}

fn potential(values: &[f64], p: f64) -> Vec<f64> {
    values.iter().map(|u| p * u.max(0.0).powf(p - 1.0)).collect()
}

fn outer_mass_fraction(grid: &RadialGrid, w: &[f64], phi: &[f64]) -> f64 {
    let half = grid.n / 2;
    let total = wdot(w, phi, phi);
    wdot(&w[half..], &phi[half..], &phi[half..]) / total
}

/// Largest eigenvalue `λ₁` of the discretized `Δ - 1 + p w₀^{p-1}` (Neumann at
/// `r = 0` and `r_max`) with its positive eigenfunction, `Σ W φ² = 1`.
pub fn principal_eigenvalue(w0: &RadialProfile, p: f64) -> Result<EigenResult> {
    let grid = w0.grid;
    let b = radial_operator(&grid, &potential(&w0.values, p), 1.0);
    let w = grid.cell_volumes();
    let pair = Pencil::new(&b, &w).eigenpair(0, &[], EIGEN_TOL)?;
    let mut phi = pair.vector;
    if phi.iter().sum::<f64>() < 0.0 {
        phi.iter_mut().for_each(|x| *x = -*x);
    }
    let max = crate::linalg::max_abs(&phi);
    let min = phi.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-8 * max {
        return Err(Error::NonPositiveMode(format!("min {min:e} vs max {max:e}")));
    }
    let profile = RadialProfile { grid, p, amplitude: phi[0], decay_ok: phi[grid.n - 1] < 1e-6 * max, values: phi };
    Ok(EigenResult { eigenvalue: -pair.value, eigenfunction: Eigenfunction::Radial(profile), residual: pair.residual, index: 0 })
}

/// `L* = π/√λ₁`; for `N = 2` also the closed form with `λ₁ = (p-1)(p+3)/4`.
pub fn critical_length(lambda1: f64, n: usize, p: f64) -> Result<CriticalLengthReport> {
    if !(lambda1 > 0.0) {
        return Err(Error::NonPositive(lambda1));
    }
    let closed = (n == 2).then(|| PI / ((p - 1.0) * (p + 3.0) / 4.0).sqrt());
    Ok(CriticalLengthReport {
        lambda1,
        l_star_predicted: PI / lambda1.sqrt(),
        closed_form_available: closed.is_some(),
        closed_form_value: closed,
    })
}

/// `λ₁ = (p-1)(p+3)/4`, the principal eigenvalue on the line.
pub fn lambda1_closed_form(p: f64) -> f64 {
    (p - 1.0) * (p + 3.0) / 4.0
}

/// `π² - L² λ₁`.
pub fn transverse_second_eigenvalue(lambda1: f64, l: f64) -> f64 {
    PI * PI - l * l * lambda1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigen: Vec<EigenResult>,
    /// The requested count would have split a numerically coincident cluster;
    /// the whole cluster is returned.
    pub degenerate_cluster: bool,
}

impl Spectrum {
    pub fn values(&self) -> Vec<f64> {
        self.eigen.iter().map(|e| e.eigenvalue).collect()
    }
}

fn cluster_gap(lambda: f64) -> f64 {
    1e-8 * lambda.abs().max(1.0)
}

/// Bound states of the radial sector operator `-Δ_r + L² + κ - V` below its
/// continuum threshold `L² + κ`.
pub fn sector_bound_states(grid: &RadialGrid, v: &[f64], l: f64, kappa: f64) -> Result<Vec<Eigenpair>> {
    let shift = l * l + kappa;
    let b = radial_operator(grid, v, shift);
    let w = grid.cell_volumes();
    let pencil = Pencil::new(&b, &w);
    let below = pencil.count_below(shift);
    let mut out: Vec<Eigenpair> = Vec::new();
    let mut found: Vec<Vec<f64>> = Vec::new();
    for j in 0..below {
        let pair = pencil.eigenpair(j, &found, EIGEN_TOL)?;
        found.push(pair.vector.clone());
        if outer_mass_fraction(grid, &w, &pair.vector) < LOCALIZATION_TOL {
            out.push(pair);
        }
    }
    Ok(out)
}

/// The `k` smallest eigenvalues of `-Δφ + L²φ - p u^{p-1}φ = λφ` on the strip grid.
///
/// For a transverse-independent `u` the problem separates into cosine sectors
/// `cos(kπt)`; each sector contributes its radial bound states, so eigenvalues
/// embedded in another sector's continuum (such as `π² - L²λ₁` at small `L`)
/// are resolved. Otherwise the full banded pencil is used.
pub fn linearized_spectrum(u: &StripField, params: &ProblemParams, k: usize) -> Result<Spectrum> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("need k >= 2 eigenvalues, got {k}")));
    }
    if u.values.iter().any(|&x| x < -1e-12) {
        return Err(Error::InvalidParameter("field must be nonnegative".into()));
    }
    if u.is_transverse_constant(1e-12) {
        separated_spectrum(u, params, k)
    } else {
        full_spectrum(u, params, k)
    }
}

fn separated_spectrum(u: &StripField, params: &ProblemParams, k: usize) -> Result<Spectrum> {
    let g = u.grid;
    let l = params.l;
    let v = potential(&u.column(0), params.p);
    let vmax = v.iter().cloned().fold(0.0, f64::max);
    let tau = g.transverse_weights();
    let mut states: Vec<(f64, usize, Eigenpair)> = Vec::new();
    for sector in 0..g.m {
        let kappa = g.transverse_eigenvalue(sector);
        if states.len() > k && l * l + kappa - vmax > states[k].0 {
            break;
        }
        for pair in sector_bound_states(&g.radial, &v, l, kappa)? {
            states.push((pair.value, sector, pair));
        }
        states.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let mut take = k.min(states.len());
    let mut cluster = false;
    while take > 0 && take < states.len() && states[take].0 - states[take - 1].0 < cluster_gap(states[take - 1].0) {
        take += 1;
        cluster = true;
    }
    if take < k {
        return Err(Error::NotConverged { iterations: 0, residual: f64::NAN });
    }
    let mut eigen = Vec::with_capacity(take);
    for (index, (value, sector, pair)) in states.into_iter().take(take).enumerate() {
        let cosine: Vec<f64> = (0..g.m).map(|j| (sector as f64 * PI * g.t(j) / g.height).cos()).collect();
        let cn = wdot(&tau, &cosine, &cosine).sqrt();
        let mut values = Vec::with_capacity(g.len());
        for phi in &pair.vector {
            values.extend(cosine.iter().map(|c| phi * c / cn));
        }
        let field = StripField::new(g, values)?;
        let residual = strip_residual(u, params, &field, value);
        eigen.push(EigenResult { eigenvalue: value, eigenfunction: Eigenfunction::Strip(field), residual, index });
    }
    Ok(Spectrum { eigen, degenerate_cluster: cluster })
}

fn strip_operator(u: &StripField, params: &ProblemParams) -> SymBanded {
    let g = u.grid;
    let d = g.weights();
    let v = potential(&u.values, params.p);
    let mut b = g.stiffness();
    let diag: Vec<f64> = d.iter().zip(&v).map(|(d, v)| d * (params.l * params.l - v)).collect();
    b.add_diagonal(&diag);
    b
}

fn strip_residual(u: &StripField, params: &ProblemParams, phi: &StripField, lambda: f64) -> f64 {
    let g = u.grid;
    let d = g.weights();
    let v = potential(&u.values, params.p);
    let mut kx = vec![0.0; g.len()];
    g.apply_stiffness(&phi.values, &mut kx);
    let l2 = params.l * params.l;
    let r2: f64 = (0..g.len())
        .map(|i| (kx[i] + d[i] * (l2 - v[i] - lambda) * phi.values[i]).powi(2) / d[i])
        .sum();
    (r2 / wdot(&d, &phi.values, &phi.values)).sqrt()
}

fn full_spectrum(u: &StripField, params: &ProblemParams, k: usize) -> Result<Spectrum> {
    let g = u.grid;
    let b = strip_operator(u, params);
    let d = g.weights();
    let pencil = Pencil::new(&b, &d);
    let mut pairs = pencil.lowest(k, EIGEN_TOL)?;
    let mut cluster = false;
    loop {
        let last = pairs[pairs.len() - 1].value;
        if pencil.count_below(last + cluster_gap(last)) <= pairs.len() || pairs.len() >= g.len() {
            break;
        }
        cluster = true;
        let found: Vec<Vec<f64>> = pairs.iter().map(|e| e.vector.clone()).collect();
        pairs.push(pencil.eigenpair(pairs.len(), &found, EIGEN_TOL)?);
    }
    let eigen = pairs
        .into_iter()
        .enumerate()
        .map(|(index, e)| {
            let field = StripField { grid: g, values: e.vector };
            EigenResult { eigenvalue: e.value, residual: e.residual, eigenfunction: Eigenfunction::Strip(field), index }
        })
        .collect();
    Ok(Spectrum { eigen, degenerate_cluster: cluster })
}

/// The three pieces of the second-variation form at a solution `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityTerms {
    /// `∫ |∇φ|² + L² φ²`
    pub quadratic: f64,
    /// `p ∫ u^{p-1} φ²`
    pub potential: f64,
    /// `(p-1) (∫ u^p φ)² / ∫ u^{p+1}`
    pub correction: f64,
}

impl StabilityTerms {
    pub fn value(&self) -> f64 {
        self.quadratic - self.potential + self.correction
    }

    /// Magnitude used to judge a value as zero.
    pub fn scale(&self) -> f64 {
        self.quadratic.abs() + self.potential.abs() + self.correction.abs()
    }
}

pub fn stability_terms(u: &StripField, phi: &StripField, params: &ProblemParams) -> Result<StabilityTerms> {
    u.same_grid(phi)?;
    let p = params.p;
    let d = u.grid.weights();
    let grad = phi.gradient_energy();
    let mass = wdot(&d, &phi.values, &phi.values);
    let mut pot = 0.0;
    let mut up_phi = 0.0;
    let mut up1 = 0.0;
    for i in 0..d.len() {
        let ui = u.values[i].max(0.0);
        pot += d[i] * ui.powf(p - 1.0) * phi.values[i] * phi.values[i];
        up_phi += d[i] * ui.powf(p) * phi.values[i];
        up1 += d[i] * ui.powf(p + 1.0);
    }
    Ok(StabilityTerms {
        quadratic: grad + params.l * params.l * mass,
        potential: p * pot,
        correction: (p - 1.0) * up_phi * up_phi / up1,
    })
}

/// `∫(|∇φ|² + L²φ²) - p∫u^{p-1}φ² + (p-1)(∫u^pφ)²/∫u^{p+1}`.
pub fn stability_form(u: &StripField, phi: &StripField, params: &ProblemParams) -> Result<f64> {
    Ok(stability_terms(u, phi, params)?.value())
}
