//! Uniform radial and strip grids with their finite-volume weights.
//!
//! The radial direction carries the measure `omega_d r^{d-1} dr`, with `omega_d`
//! the area of the unit sphere in R^d (`omega_1 = 2` accounts for the even
//! extension to the whole line). Discrete operators are derived from a discrete
//! energy, so the stiffness matrix is symmetric and the strong-form Laplacian is
//! `-(mass)^{-1} stiffness`. At `r = 0` this reduces to the regularized
//! Laplacian `d * w''(0)`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::linalg::SymBanded;

/// Area of the unit sphere in R^d.
pub fn sphere_area(d: usize) -> f64 {
    let half = d as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / gamma(half)
}

/// Uniform grid `r_i = i h`, `i = 0..n`, on `[0, r_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub d: usize,
    pub h: f64,
    pub n: usize,
}

impl RadialGrid {
    pub fn new(d: usize, h: f64, r_max: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("radial dimension must be >= 1".into()));
        }
        if !(h > 0.0) || !(r_max > h) {
            return Err(Error::InvalidParameter(format!("need 0 < h < r_max, got h = {h}, r_max = {r_max}")));
        }
        let n = (r_max / h).round() as usize + 1;
        Ok(Self { d, h, n })
    }

    pub fn r_max(&self) -> f64 {
        (self.n - 1) as f64 * self.h
    }

    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.r(i)).collect()
    }

    /// Same grid with every length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { d: self.d, h: self.h * factor, n: self.n }
    }

    /// Finite-volume cell measures `omega_d * |[r_{i-1/2}, r_{i+1/2}] ∩ [0, r_max]|`.
    pub fn cell_volumes(&self) -> Vec<f64> {
        let d = self.d as i32;
        let om = sphere_area(self.d) / self.d as f64;
        let rmax = self.r_max();
        (0..self.n)
            .map(|i| {
                let lo = (self.r(i) - 0.5 * self.h).max(0.0);
                let hi = (self.r(i) + 0.5 * self.h).min(rmax);
                om * (hi.powi(d) - lo.powi(d))
            })
            .collect()
    }

    /// Edge coefficients `omega_d r_{i+1/2}^{d-1} / h` of the radial stiffness.
    pub fn face_coefficients(&self) -> Vec<f64> {
        let om = sphere_area(self.d);
        (0..self.n - 1)
            .map(|i| om * ((i as f64 + 0.5) * self.h).powi(self.d as i32 - 1) / self.h)
            .collect()
    }

    /// Trapezoid weights for `omega_d ∫ f(r) r^{d-1} dr`.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let om = sphere_area(self.d);
        (0..self.n)
            .map(|i| {
                let end = if i == 0 || i == self.n - 1 { 0.5 } else { 1.0 };
                end * self.h * om * self.r(i).powi(self.d as i32 - 1)
            })
            .collect()
    }

    /// Radial stiffness (tridiagonal, symmetric).
    pub fn stiffness(&self) -> SymBanded {
        let mut s = SymBanded::zeros(self.n, 1);
        for (i, c) in self.face_coefficients().into_iter().enumerate() {
            s.add(i, i, c);
            s.add(i + 1, i + 1, c);
            s.add(i + 1, i, -c);
        }
        s
    }

    /// Strong-form discrete Laplacian `Δ_h u` on this grid.
    pub fn laplacian(&self, u: &[f64]) -> Vec<f64> {
        let w = self.cell_volumes();
        let c = self.face_coefficients();
        let mut out = vec![0.0; self.n];
        for i in 0..self.n - 1 {
            let flux = c[i] * (u[i + 1] - u[i]);
            out[i] += flux;
            out[i + 1] -= flux;
        }
        out.iter_mut().zip(&w).for_each(|(o, w)| *o /= w);
        out
    }
}

/// Axisymmetric strip grid: radial nodes times `m` transverse nodes on `[0, height]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripGrid {
    pub radial: RadialGrid,
    pub m: usize,
    pub height: f64,
}

impl StripGrid {
    pub fn new(radial: RadialGrid, m: usize) -> Result<Self> {
        if m < 8 {
            return Err(Error::InvalidParameter(format!("transverse node count must be >= 8, got {m}")));
        }
        Ok(Self { radial, m, height: 1.0 })
    }

    /// Grid of the unscaled strip `R^{N-1} x (0, height)`.
    pub fn with_height(radial: RadialGrid, m: usize, height: f64) -> Result<Self> {
        let mut g = Self::new(radial, m)?;
        g.height = height;
        Ok(g)
    }

    /// Strip grid for parameter `L` with the default radial extent.
    pub fn for_length(d: usize, l: f64, h: f64, m: usize) -> Result<Self> {
        GridSpec { h, m, ..GridSpec::default() }.grid_for(d, l)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { radial: self.radial.scaled(factor), m: self.m, height: self.height * factor }
    }

    pub fn len(&self) -> usize {
        self.radial.n * self.m
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.m + j
    }

    pub fn dt(&self) -> f64 {
        self.height / (self.m - 1) as f64
    }

    pub fn t(&self, j: usize) -> f64 {
        j as f64 * self.dt()
    }

    pub fn transverse_weights(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..self.m).map(|j| if j == 0 || j == self.m - 1 { 0.5 * dt } else { dt }).collect()
    }

    /// Quadrature weights `W_i tau_j` (the lumped mass matrix).
    pub fn weights(&self) -> Vec<f64> {
        let w = self.radial.cell_volumes();
        let tau = self.transverse_weights();
        let mut out = Vec::with_capacity(self.len());
        for wi in &w {
            out.extend(tau.iter().map(|t| wi * t));
        }
        out
    }

    /// Eigenvalue of the discrete Neumann transverse operator for `cos(k pi t / height)`.
    pub fn transverse_eigenvalue(&self, k: usize) -> f64 {
        let dt = self.dt();
        let s = (k as f64 * std::f64::consts::PI * dt / (2.0 * self.height)).sin();
        4.0 * s * s / (dt * dt)
    }

    /// Stiffness matrix of `∫ |∇u|^2` in banded form (bandwidth `m`).
    pub fn stiffness(&self) -> SymBanded {
        let n = self.radial.n;
        let m = self.m;
        let mut k = SymBanded::zeros(self.len(), m);
        let c = self.radial.face_coefficients();
        let w = self.radial.cell_volumes();
        let tau = self.transverse_weights();
        let inv_dt = 1.0 / self.dt();
        for i in 0..n {
            for j in 0..m {
                let a = self.index(i, j);
                if i + 1 < n {
                    let b = self.index(i + 1, j);
                    let v = c[i] * tau[j];
                    k.add(a, a, v);
                    k.add(b, b, v);
                    k.add(b, a, -v);
                }
                if j + 1 < m {
                    let b = self.index(i, j + 1);
                    let v = w[i] * inv_dt;
                    k.add(a, a, v);
                    k.add(b, b, v);
                    k.add(b, a, -v);
                }
            }
        }
        k
    }

    /// Matrix-free `K u`.
    pub fn apply_stiffness(&self, u: &[f64], out: &mut [f64]) {
        let n = self.radial.n;
        let m = self.m;
        let c = self.radial.face_coefficients();
        let w = self.radial.cell_volumes();
        let tau = self.transverse_weights();
        let inv_dt = 1.0 / self.dt();
        out.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            let row = i * m;
            if i + 1 < n {
                let next = row + m;
                for j in 0..m {
                    let f = c[i] * tau[j] * (u[next + j] - u[row + j]);
                    out[row + j] -= f;
                    out[next + j] += f;
                }
            }
            let wt = w[i] * inv_dt;
            for j in 0..m - 1 {
                let f = wt * (u[row + j + 1] - u[row + j]);
                out[row + j] -= f;
                out[row + j + 1] += f;
            }
        }
    }

    /// Transverse part `∫ |∂_t u|^2` of the gradient energy.
    pub fn transverse_energy(&self, u: &[f64]) -> f64 {
        let w = self.radial.cell_volumes();
        let inv_dt = 1.0 / self.dt();
        let mut e = 0.0;
        for (i, wi) in w.iter().enumerate() {
            let row = &u[i * self.m..(i + 1) * self.m];
            e += wi * inv_dt * row.windows(2).map(|p| (p[1] - p[0]).powi(2)).sum::<f64>();
        }
        e
    }
}

/// Rule for building the strip grid at a given `L`: `r_max = min(factor / L, cap)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub h: f64,
    pub m: usize,
    pub r_max_factor: f64,
    pub r_max_cap: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { h: 0.02, m: 64, r_max_factor: 25.0, r_max_cap: 60.0 }
    }
}

impl GridSpec {
    pub fn r_max(&self, l: f64) -> f64 {
        (self.r_max_factor / l).min(self.r_max_cap)
    }

    pub fn grid_for(&self, d: usize, l: f64) -> Result<StripGrid> {
        StripGrid::new(RadialGrid::new(d, self.h, self.r_max(l))?, self.m)
    }
}

/// A sampled function `u(r_i, t_j)` on a strip grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripField {
    pub grid: StripGrid,
    pub values: Vec<f64>,
}

impl StripField {
    pub fn new(grid: StripGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: StripGrid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: StripGrid, f: F) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.radial.n {
            let r = grid.radial.r(i);
            for j in 0..grid.m {
                values.push(f(r, grid.t(j)));
            }
        }
        Self { grid, values }
    }

    /// Extends a radial profile constantly across the strip.
    pub fn from_radial(grid: StripGrid, radial: &[f64]) -> Result<Self> {
        if radial.len() != grid.radial.n {
            return Err(Error::GridMismatch);
        }
        let values = radial.iter().flat_map(|&v| std::iter::repeat(v).take(grid.m)).collect();
        Ok(Self { grid, values })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn same_grid(&self, other: &StripField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `∫ u v` by strip quadrature.
    pub fn inner(&self, other: &StripField) -> Result<f64> {
        self.same_grid(other)?;
        Ok(crate::linalg::wdot(&self.grid.weights(), &self.values, &other.values))
    }

    pub fn integral_pow(&self, q: f64) -> f64 {
        self.grid.weights().iter().zip(&self.values).map(|(w, u)| w * u.abs().powf(q)).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.integral_pow(2.0).sqrt()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `∫ |∇u|^2` on the discrete grid.
    pub fn gradient_energy(&self) -> f64 {
        let mut ku = vec![0.0; self.values.len()];
        self.grid.apply_stiffness(&self.values, &mut ku);
        crate::linalg::dot(&ku, &self.values)
    }

    /// Discrete transverse-derivative norm `||∂_t u||`.
    pub fn transverse_derivative_norm(&self) -> f64 {
        self.grid.transverse_energy(&self.values).sqrt()
    }

    /// Strong-form Laplacian `Δ_h u`.
    pub fn laplacian(&self) -> Vec<f64> {
        let mut ku = vec![0.0; self.values.len()];
        self.grid.apply_stiffness(&self.values, &mut ku);
        ku.iter().zip(self.grid.weights()).map(|(k, w)| -k / w).collect()
    }

    /// Radial profile at transverse node `j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.grid.radial.n).map(|i| self.at(i, j)).collect()
    }

    /// True when every radial row is constant in `t` up to `tol * max|u|`.
    pub fn is_transverse_constant(&self, tol: f64) -> bool {
        let scale = crate::linalg::max_abs(&self.values).max(f64::MIN_POSITIVE);
        self.values.chunks(self.grid.m).all(|row| {
            let (lo, hi) = row.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            hi - lo <= tol * scale
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn cell_volumes_sum_to_ball_volume() {
        for d in 1..=4 {
            let g = RadialGrid::new(d, 0.01, 3.0).unwrap();
            let total: f64 = g.cell_volumes().iter().sum();
            let exact = sphere_area(d) / d as f64 * 3.0f64.powi(d as i32);
            assert!((total - exact).abs() < 1e-10 * exact, "d = {d}");
        }
    }

    #[test]
    fn origin_row_is_regularized_laplacian() {
        // u = 1 + r^2 has Laplacian 2d in R^d; at the origin the FV row gives d * u''(0).
        for d in 1..=3 {
            let g = RadialGrid::new(d, 0.01, 1.0).unwrap();
            let u: Vec<f64> = g.nodes().iter().map(|r| 1.0 + r * r).collect();
            let lap = g.laplacian(&u);
            assert!((lap[0] - 2.0 * d as f64).abs() < 1e-8, "d = {d}: {}", lap[0]);
            assert!((lap[50] - 2.0 * d as f64).abs() < 1e-6, "d = {d}: {}", lap[50]);
        }
    }

    #[test]
    fn laplacian_is_second_order() {
        // u = exp(-r^2) in d = 2: Δu = (4 r^2 - 4) exp(-r^2).
        let err = |h: f64| {
            let g = RadialGrid::new(2, h, 4.0).unwrap();
            let u: Vec<f64> = g.nodes().iter().map(|r| (-r * r).exp()).collect();
            let lap = g.laplacian(&u);
            (1..g.n - 1)
                .map(|i| {
                    let r = g.r(i);
                    (lap[i] - (4.0 * r * r - 4.0) * (-r * r).exp()).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(0.02) / err(0.01);
        assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
    }

    #[test]
    fn banded_stiffness_matches_matrix_free() {
        let g = StripGrid::new(RadialGrid::new(2, 0.1, 2.0).unwrap(), 9).unwrap();
        let u: Vec<f64> = (0..g.len()).map(|k| ((k * 7 % 13) as f64).sin()).collect();
        let mut a = vec![0.0; g.len()];
        let mut b = vec![0.0; g.len()];
        g.stiffness().matvec(&u, &mut a);
        g.apply_stiffness(&u, &mut b);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn transverse_eigenvalue_matches_cosine_mode() {
        let g = StripGrid::new(RadialGrid::new(1, 0.5, 2.0).unwrap(), 17).unwrap();
        for k in 0..4 {
            let f = StripField::from_fn(g, |_, t| (k as f64 * PI * t).cos());
            let lap = f.laplacian();
            let lam = g.transverse_eigenvalue(k);
            for (l, v) in lap.iter().zip(&f.values) {
                assert!((l + lam * v).abs() < 1e-9);
            }
        }
        assert!((g.transverse_eigenvalue(1) - PI * PI).abs() < 0.04);
    }
}
