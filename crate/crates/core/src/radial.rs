//! Radial ground states of `Δw - w + w^p = 0` in R^d and the trivial strip branch.
//!
//! Two discretizations are provided:
//! * [`shoot_ground_state`] integrates the radial ODE with fixed-step RK4 and
//!   bisects on the amplitude `w(0)`. It is fourth-order accurate and serves as
//!   the reference profile.
//! * [`discrete_ground_state`] solves the second-order finite-volume system by
//!   Newton's method. This is the exact trivial solution of the strip
//!   discretization, so the strip solver and the spectral code see a true
//!   discrete fixed point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{RadialGrid, StripField, StripGrid};
use crate::linalg::quad::composite_gauss;
use crate::params::{critical_exponent, ProblemParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingOptions {
    /// Maximum admissible width of the final amplitude bracket.
    pub amp_tol: f64,
    /// Tail value below which the profile counts as decayed.
    pub tail_tol: f64,
    /// Divergence of the two bracketing trajectories at which the exponential tail takes over.
    pub splice_tol: f64,
    /// Max discrete ODE residual, relative to `w(0)^p`, before the grid is declared too coarse.
    pub residual_tol: f64,
    /// Optional explicit amplitude bracket `(too small, too big)`.
    pub bracket: Option<(f64, f64)>,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self { amp_tol: 1e-12, tail_tol: 1e-10, splice_tol: 1e-10, residual_tol: 1e-3, bracket: None }
    }
}

/// Radially symmetric profile sampled on a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub grid: RadialGrid,
    pub p: f64,
    pub values: Vec<f64>,
    pub amplitude: f64,
    pub decay_ok: bool,
}

#[derive(Serialize)]
struct ProfileRecord<'a> {
    d: usize,
    p: f64,
    h: f64,
    r_max: f64,
    amplitude: f64,
    values: &'a [f64],
}

impl RadialProfile {
    /// Linear interpolation inside the grid, decaying-mode extrapolation beyond it.
    pub fn value_at(&self, r: f64) -> f64 {
        let r = r.abs();
        let g = &self.grid;
        let x = r / g.h;
        let i = x.floor() as usize;
        if i + 1 < g.n {
            let f = x - i as f64;
            return (1.0 - f) * self.values[i] + f * self.values[i + 1];
        }
        let last = self.values[g.n - 1];
        last * decaying_mode_ratio(g.d, g.r_max(), r)
    }

    pub fn to_csv(&self) -> String {
        crate::io::csv_table(&["r", "w"], &[&self.grid.nodes(), &self.values])
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ProfileRecord {
            d: self.grid.d,
            p: self.p,
            h: self.grid.h,
            r_max: self.grid.r_max(),
            amplitude: self.amplitude,
            values: &self.values,
        })
        .expect("profile record serializes")
    }

    /// Central-difference residual of `w'' + (d-1)/r w' - w + w^p` at interior nodes `1..upto`,
    /// with the regularized `d w''(0)` row at the origin.
    pub fn ode_residual(&self, upto: usize) -> f64 {
        let g = &self.grid;
        let (h, d, w) = (g.h, g.d as f64, &self.values);
        let upto = upto.min(g.n - 1);
        let nl = |x: f64| x.abs().powf(self.p - 1.0) * x;
        let mut res = (d * 2.0 * (w[1] - w[0]) / (h * h) - w[0] + nl(w[0])).abs();
        for i in 1..upto {
            let r = g.r(i);
            let lap = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h) + (d - 1.0) / r * (w[i + 1] - w[i - 1]) / (2.0 * h);
            res = res.max((lap - w[i] + nl(w[i])).abs());
        }
        res
    }
}

/// `((p+1)/2)^{1/(p-1)} cosh((p-1)x/2)^{-2/(p-1)}`, the ground state on the line.
pub fn closed_form_1d(p: f64, x: f64) -> f64 {
    ((p + 1.0) / 2.0).powf(1.0 / (p - 1.0)) * ((p - 1.0) * x / 2.0).cosh().powf(-2.0 / (p - 1.0))
}

/// `g(r) e^r` where `g = r^{-ν} K_ν(r)`, `ν = (d-2)/2`, is the decaying radial
/// solution of `Δg = g` in R^d.
fn decaying_mode_scaled(d: usize, r: f64) -> f64 {
    match d {
        1 => 1.0,
        3 => 1.0 / r,
        _ => {
            let nu = (d as f64 - 2.0) / 2.0;
            let upper = (1.0 + 60.0 / r).acosh();
            let k = composite_gauss(|t| (-r * (t.cosh() - 1.0)).exp() * (nu * t).cosh(), 0.0, upper, 16, 10);
            r.powf(-nu) * k
        }
    }
}

/// `g(r) / g(r0)` for the decaying radial mode.
pub fn decaying_mode_ratio(d: usize, r0: f64, r: f64) -> f64 {
    decaying_mode_scaled(d, r) / decaying_mode_scaled(d, r0) * (-(r - r0)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shot {
    /// `w` went negative: amplitude too large.
    Crossing,
    /// `w'` turned positive beyond `r = 1` while `w > 0`: amplitude too small.
    DecayFailure,
}

struct Trajectory {
    values: Vec<f64>,
    kind: Shot,
}

fn rhs(d: f64, p: f64, r: f64, w: f64, v: f64) -> (f64, f64) {
    let source = w - w.abs().powf(p - 1.0) * w;
    if r == 0.0 {
        (v, source / d)
    } else {
        (v, -(d - 1.0) / r * v + source)
    }
}

/// RK4 from `w(0) = a`, `w'(0) = 0`. Values are stored on the first `keep` nodes; the
/// integration itself runs until the trajectory is classified.
fn integrate(d: usize, p: f64, a: f64, h: f64, keep: usize) -> Trajectory {
    let df = d as f64;
    let limit = ((keep as f64 - 1.0) * h).max(80.0);
    let mut values = Vec::with_capacity(keep);
    let (mut r, mut w, mut v) = (0.0, a, 0.0);
    values.push(w);
    loop {
        let (k1w, k1v) = rhs(df, p, r, w, v);
        let (k2w, k2v) = rhs(df, p, r + 0.5 * h, w + 0.5 * h * k1w, v + 0.5 * h * k1v);
        let (k3w, k3v) = rhs(df, p, r + 0.5 * h, w + 0.5 * h * k2w, v + 0.5 * h * k2v);
        let (k4w, k4v) = rhs(df, p, r + h, w + h * k3w, v + h * k3v);
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        r += h;
        if w < 0.0 {
            return Trajectory { values, kind: Shot::Crossing };
        }
        if r > 1.0 && v > 0.0 {
            return Trajectory { values, kind: Shot::DecayFailure };
        }
        if values.len() < keep {
            values.push(w);
        }
        if r > limit {
            // Indistinguishable from the ground state at double precision.
            return Trajectory { values, kind: Shot::DecayFailure };
        }
    }
}

fn check_subcritical(d: usize, p: f64) -> Result<()> {
    if d == 0 || !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("need d >= 1 and p > 1, got d = {d}, p = {p}")));
    }
    if let Some(bound) = critical_exponent(d) {
        if p >= bound {
            return Err(Error::Supercritical { d, p, bound });
        }
    }
    Ok(())
}

/// Ground state of `w'' + (d-1)/r w' - w + w^p = 0` by RK4 shooting on `grid`.
///
/// The amplitude is bisected down to the last representable bracket. Beyond the
/// radius where the two bracketing trajectories separate by `splice_tol`, the
/// profile is continued by the decaying linear mode `r^{-ν} K_ν(r)` matched in value.
pub fn shoot_ground_state(d: usize, p: f64, grid: RadialGrid, opts: &ShootingOptions) -> Result<RadialProfile> {
    check_subcritical(d, p)?;
    if grid.d != d {
        return Err(Error::InvalidParameter(format!("grid dimension {} differs from d = {d}", grid.d)));
    }
    let h = grid.h;
    let n = grid.n;
    let shoot = |a: f64| integrate(d, p, a, h, n);

    let (mut lo, mut hi) = match opts.bracket {
        Some((lo, hi)) => {
            if shoot(lo).kind != Shot::DecayFailure || shoot(hi).kind != Shot::Crossing {
                return Err(Error::NoBracket { lo, hi });
            }
            (lo, hi)
        }
        None => {
            let lo = 1.0 + 1e-3;
            if shoot(lo).kind != Shot::DecayFailure {
                return Err(Error::NoBracket { lo, hi: lo });
            }
            let mut hi = 2.0;
            while shoot(hi).kind != Shot::Crossing {
                hi *= 2.0;
                if hi > 1e6 {
                    return Err(Error::NoBracket { lo, hi });
                }
            }
            (lo, hi)
        }
    };
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shoot(mid).kind {
            Shot::Crossing => hi = mid,
            Shot::DecayFailure => lo = mid,
        }
    }
    if hi - lo > opts.amp_tol {
        return Err(Error::NotConverged { iterations: 0, residual: hi - lo });
    }

    let below = shoot(lo).values;
    let above = shoot(hi).values;
    let mut splice = below.len().min(above.len()).min(n);
    if let Some(i) = below.iter().zip(&above).position(|(a, b)| (a - b).abs() > opts.splice_tol) {
        splice = splice.min(i);
    }
    if splice < 2 || grid.r(splice - 1) < 1.0 {
        return Err(Error::GridTooCoarse(format!("trajectories separate before r = 1 (at r = {})", grid.r(splice))));
    }
    let mut values: Vec<f64> = below[..splice].iter().zip(&above[..splice]).map(|(a, b)| 0.5 * (a + b)).collect();
    let r0 = grid.r(splice - 1);
    let w0 = values[splice - 1];
    for i in splice..n {
        values.push(w0 * decaying_mode_ratio(d, r0, grid.r(i)));
    }

    let amplitude = 0.5 * (lo + hi);
    let profile = RadialProfile {
        grid,
        p,
        decay_ok: values[n - 1] < opts.tail_tol,
        values,
        amplitude,
    };
    let residual = profile.ode_residual(splice);
    if residual > opts.residual_tol * amplitude.powf(p) {
        return Err(Error::GridTooCoarse(format!(
            "ODE residual {residual:e} exceeds {:e} at h = {h}",
            opts.residual_tol * amplitude.powf(p)
        )));
    }
    Ok(profile)
}

/// Positive solution of the finite-volume system `Δ_h w - w + w^p = 0` on `grid`.
///
/// Newton's method started from the shooting profile interpolated onto `grid`.
/// The amplitude converges at second order in `h`.
pub fn discrete_ground_state(d: usize, p: f64, grid: RadialGrid) -> Result<RadialProfile> {
    check_subcritical(d, p)?;
    let fine = RadialGrid::new(d, grid.h.min(0.01), grid.r_max().max(25.0))?;
    let reference = shoot_ground_state(d, p, fine, &ShootingOptions::default())?;
    let mut w: Vec<f64> = grid.nodes().iter().map(|&r| reference.value_at(r)).collect();
    newton_polish(p, &grid, &mut w)?;
    let amplitude = w[0];
    let decay_ok = w[grid.n - 1] < ShootingOptions::default().tail_tol;
    if w.iter().any(|&x| x < 0.0) {
        let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -1e-14 * amplitude {
            return Err(Error::GridTooCoarse(format!("discrete ground state changes sign (min {min:e})")));
        }
        w.iter_mut().for_each(|x| *x = x.max(0.0));
    }
    Ok(RadialProfile { grid, p, values: w, amplitude, decay_ok })
}

fn newton_polish(p: f64, grid: &RadialGrid, w: &mut [f64]) -> Result<()> {
    let vol = grid.cell_volumes();
    let stiff = grid.stiffness();
    let n = grid.n;
    let mut sw = vec![0.0; n];
    let mut last = f64::INFINITY;
    let mut last_step = f64::INFINITY;
    for it in 0..60 {
        stiff.matvec(w, &mut sw);
        let f: Vec<f64> = (0..n)
            .map(|i| -sw[i] + vol[i] * (-w[i] + w[i].abs().powf(p - 1.0) * w[i]))
            .collect();
        let res = (0..n).map(|i| (f[i] / vol[i]).abs()).fold(0.0, f64::max);
        let scale = w[0].abs().powf(p).max(1.0);
        // The residual divides by cell volumes and bottoms out near eps/h²;
        // a roundoff-sized update is accepted as convergence there.
        if res < 1e-12 * scale || (res < 1e-8 * scale && last_step < 1e-13 * w[0].abs()) {
            return Ok(());
        }
        if it > 8 && res > 0.5 * last {
            return Err(Error::NotConverged { iterations: it, residual: res });
        }
        last = res;
        let mut jac = stiff.clone();
        let diag: Vec<f64> = (0..n).map(|i| vol[i] * (1.0 - p * w[i].abs().powf(p - 1.0))).collect();
        jac.add_diagonal(&diag);
        // jac = S + W - pW|w|^{p-1} = -J, so solve jac * dw = f.
        let dw = jac.factor()?.solve(&f);
        last_step = crate::linalg::max_abs(&dw);
        w.iter_mut().zip(&dw).for_each(|(x, d)| *x += d);
    }
    Err(Error::NotConverged { iterations: 60, residual: last })
}

/// Trivial-branch energy `c*(L) = γ₀ L^{exponent}`.
///
/// `γ₀ = (∫_{R^{N-1}} w₀^{p+1})^{(p-1)/(p+1)}` is derived from the quotient at the
/// trivial solution: for any solution of the Euler-Lagrange equation the quotient
/// equals `(∫ u^{p+1})^{(p-1)/(p+1)}`, and the trivial solution at parameter `L`
/// is `L^{2/(p-1)} w₀(L |x'|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrivialBranch {
    pub gamma0: f64,
    pub exponent: f64,
}

impl TrivialBranch {
    pub fn cstar(&self, l: f64) -> f64 {
        self.gamma0 * l.powf(self.exponent)
    }
}

/// `2 - (N-1)(p-1)/(p+1)`.
pub fn trivial_exponent(n: usize, p: f64) -> f64 {
    2.0 - (n as f64 - 1.0) * (p - 1.0) / (p + 1.0)
}

/// `ω_d ∫ w^q r^{d-1} dr` by the trapezoid rule, with the tail beyond `r_max`
/// estimated from the decaying mode. Fails if the tail exceeds `tail_tol` relative.
pub fn radial_power_integral(w: &RadialProfile, q: f64, tail_tol: f64) -> Result<f64> {
    let g = &w.grid;
    let body: f64 = g.trapezoid_weights().iter().zip(&w.values).map(|(wt, v)| wt * v.abs().powf(q)).sum();
    let r = g.r_max();
    let tail = crate::grid::sphere_area(g.d) * r.powi(g.d as i32 - 1) * w.values[g.n - 1].abs().powf(q) / q;
    if !(body > 0.0) || tail > tail_tol * body {
        return Err(Error::QuadratureTailLoss { tail: tail / body.max(f64::MIN_POSITIVE), tol: tail_tol });
    }
    Ok(body + tail)
}

pub fn trivial_branch_energy(params: &ProblemParams, w0: &RadialProfile) -> Result<TrivialBranch> {
    check_profile(params, w0, params.cross_dim())?;
    let p = params.p;
    let integral = radial_power_integral(w0, p + 1.0, 1e-10)?;
    Ok(TrivialBranch { gamma0: integral.powf((p - 1.0) / (p + 1.0)), exponent: trivial_exponent(params.n, p) })
}

fn check_profile(params: &ProblemParams, w: &RadialProfile, d: usize) -> Result<()> {
    if w.grid.d != d || (w.p - params.p).abs() > 1e-14 {
        return Err(Error::InvalidParameter(format!(
            "profile (d = {}, p = {}) does not match expected (d = {d}, p = {})",
            w.grid.d, w.p, params.p
        )));
    }
    Ok(())
}

/// Samples the trivial solution `L^{2/(p-1)} w₀(L r)` onto `sgrid` by interpolation.
pub fn extend_trivial_to_strip(w0: &RadialProfile, params: &ProblemParams, sgrid: StripGrid) -> Result<StripField> {
    check_profile(params, w0, params.cross_dim())?;
    if sgrid.radial.d != params.cross_dim() {
        return Err(Error::GridMismatch);
    }
    let l = params.l;
    let needed = l * sgrid.radial.r_max();
    let available = 4.0 * w0.grid.r_max();
    if needed > available {
        return Err(Error::RangeMismatch { needed, available });
    }
    let scale = l.powf(2.0 / (params.p - 1.0));
    let radial: Vec<f64> = sgrid.radial.nodes().iter().map(|&r| scale * w0.value_at(l * r)).collect();
    StripField::from_radial(sgrid, &radial)
}

/// Exact discrete trivial solution on `sgrid`: the finite-volume ground state on
/// the radial grid scaled by `L`, rescaled by `L^{2/(p-1)}`.
pub fn discrete_trivial_field(params: &ProblemParams, sgrid: StripGrid) -> Result<StripField> {
    let profile = discrete_ground_state(params.cross_dim(), params.p, sgrid.radial.scaled(params.l))?;
    let scale = params.l.powf(2.0 / (params.p - 1.0));
    let radial: Vec<f64> = profile.values.iter().map(|v| scale * v).collect();
    StripField::from_radial(sgrid, &radial)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(d: usize, h: f64) -> RadialGrid {
        RadialGrid::new(d, h, 25.0).unwrap()
    }

    #[test]
    fn closed_form_satisfies_ode() {
        for &p in &[2.0, 3.0, 4.5] {
            for &x in &[0.0, 0.3, 1.0, 2.5, 6.0] {
                let e = 1e-3;
                let w = |x| closed_form_1d(p, x);
                let w2 = (w(x + e) - 2.0 * w(x) + w(x - e)) / (e * e);
                let res = w2 - w(x) + w(x).powf(p);
                assert!(res.abs() < 1e-5, "p = {p}, x = {x}: {res}");
            }
        }
        assert!((closed_form_1d(3.0, 0.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!((closed_form_1d(2.0, 0.0) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn decaying_mode_matches_bessel_cases() {
        // d = 3 closed form vs the general integral path (d = 5: g = (1 + r) e^{-r} / r^3).
        let r0 = 3.0;
        for &r in &[4.0, 7.0, 12.0] {
            let g5 = |r: f64| (1.0 + r) * (-r).exp() / r.powi(3);
            let want = g5(r) / g5(r0);
            assert!((decaying_mode_ratio(5, r0, r) / want - 1.0).abs() < 1e-10);
        }
        // K_0(1) = 0.42102443824070834
        let k0 = decaying_mode_scaled(2, 1.0) * (-1.0f64).exp();
        assert!((k0 - 0.421_024_438_240_708_34).abs() < 1e-12);
    }

    #[test]
    fn shooting_matches_closed_form_line() {
        let prof = shoot_ground_state(1, 3.0, grid(1, 0.01), &ShootingOptions::default()).unwrap();
        assert!((prof.amplitude - 2f64.sqrt()).abs() < 1e-8);
        assert!(prof.decay_ok);
        let err = prof
            .grid
            .nodes()
            .iter()
            .zip(&prof.values)
            .map(|(r, w)| (w - closed_form_1d(3.0, *r)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "max error {err:e}");
    }

    #[test]
    fn supercritical_rejected() {
        let r = shoot_ground_state(3, 6.0, grid(3, 0.01), &ShootingOptions::default());
        assert!(matches!(r, Err(Error::Supercritical { .. })));
    }

    #[test]
    fn bad_bracket_rejected() {
        let opts = ShootingOptions { bracket: Some((1.5, 1.6)), ..Default::default() };
        let r = shoot_ground_state(1, 3.0, grid(1, 0.01), &opts);
        assert!(matches!(r, Err(Error::NoBracket { .. })));
    }

    #[test]
    fn discrete_ground_state_is_second_order_close() {
        let prof = discrete_ground_state(1, 3.0, grid(1, 0.02)).unwrap();
        let err = (prof.amplitude - 2f64.sqrt()).abs();
        assert!(err < 1e-3 && err > 1e-7, "{err:e}");
    }

    #[test]
    fn gamma0_line_cubic() {
        let params = ProblemParams::new(2, 3.0, 1.0).unwrap();
        let w0 = shoot_ground_state(1, 3.0, grid(1, 0.01), &ShootingOptions::default()).unwrap();
        let tb = trivial_branch_energy(&params, &w0).unwrap();
        assert!((tb.exponent - 1.5).abs() < 1e-15);
        assert!((tb.gamma0 - (16.0f64 / 3.0).sqrt()).abs() < 1e-5, "{}", tb.gamma0);
    }
}
