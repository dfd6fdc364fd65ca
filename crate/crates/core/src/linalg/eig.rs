//! Eigenpairs of the symmetric pencil `B x = λ W x` with banded `B` and a positive
//! diagonal `W`. Eigenvalues are isolated by Sylvester inertia counts of
//! `B - σW` and refined by shift-and-invert iteration.

use super::{wdot, LdlFactor, SymBanded};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    /// Normalized to `x^T W x = 1`.
    pub vector: Vec<f64>,
    /// `||W^{-1} B x - λ x||_W`.
    pub residual: f64,
}

pub struct Pencil<'a> {
    pub b: &'a SymBanded,
    pub w: &'a [f64],
}

impl<'a> Pencil<'a> {
    pub fn new(b: &'a SymBanded, w: &'a [f64]) -> Self {
        Self { b, w }
    }

    fn shifted(&self, sigma: f64) -> Result<LdlFactor> {
        let mut a = self.b.clone();
        let diag: Vec<f64> = self.w.iter().map(|w| -sigma * w).collect();
        a.add_diagonal(&diag);
        a.factor()
    }

    /// Factorization of `B - σW`, nudging the shift off an exact singularity.
    fn factor_near(&self, sigma: f64) -> LdlFactor {
        let mut s = sigma;
        let mut bump = 1e-13 * sigma.abs().max(1.0);
        loop {
            match self.shifted(s) {
                Ok(f) => return f,
                Err(_) => {
                    s += bump;
                    bump *= 4.0;
                }
            }
        }
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        self.factor_near(sigma).negative_count()
    }

    /// Gershgorin interval of the symmetrically scaled pencil.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.b.dim();
        let bw = self.b.bandwidth();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let c = self.b.get(i, i) / self.w[i];
            let mut rad = 0.0;
            for j in i.saturating_sub(bw)..(i + bw + 1).min(n) {
                if j != i {
                    rad += self.b.get(i, j).abs() / (self.w[i] * self.w[j]).sqrt();
                }
            }
            lo = lo.min(c - rad);
            hi = hi.max(c + rad);
        }
        let pad = 1e-9 * (hi - lo).abs().max(1.0);
        (lo - pad, hi + pad)
    }

    fn residual(&self, x: &[f64], lambda: f64) -> f64 {
        let mut bx = vec![0.0; x.len()];
        self.b.matvec(x, &mut bx);
        let r2: f64 = bx.iter().zip(self.w).zip(x).map(|((b, w), x)| (b - lambda * w * x).powi(2) / w).sum();
        (r2 / wdot(self.w, x, x)).sqrt()
    }

    fn rayleigh(&self, x: &[f64]) -> f64 {
        let mut bx = vec![0.0; x.len()];
        self.b.matvec(x, &mut bx);
        super::dot(x, &bx) / wdot(self.w, x, x)
    }

    fn orthonormalize(&self, x: &mut [f64], against: &[Vec<f64>]) {
        for q in against {
            let c = wdot(self.w, x, q);
            x.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
        }
        let nrm = wdot(self.w, x, x).sqrt();
        if nrm > 0.0 {
            x.iter_mut().for_each(|a| *a /= nrm);
        }
    }

    fn inverse_step(&self, f: &LdlFactor, x: &mut Vec<f64>, against: &[Vec<f64>]) {
        let rhs: Vec<f64> = x.iter().zip(self.w).map(|(a, w)| a * w).collect();
        *x = f.solve(&rhs);
        self.orthonormalize(x, against);
    }

    /// The `j`-th smallest eigenpair (0-based). `found` holds already converged
    /// eigenvectors that are projected out during the iteration.
    pub fn eigenpair(&self, j: usize, found: &[Vec<f64>], tol: f64) -> Result<Eigenpair> {
        let n = self.b.dim();
        if j >= n {
            return Err(Error::InvalidParameter(format!("eigenvalue index {j} exceeds dimension {n}")));
        }
        let (mut lo, mut hi) = self.bounds();
        let mut c_hi = n;
        let mut c_lo = 0;
        // Bisect until the j-th eigenvalue is the only one inside (lo, hi)
        // and the bracket is narrow compared to the neighbours.
        let mut narrowing = 0;
        let mut steps = 0;
        while narrowing < 8 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let c = self.count_below(mid);
            steps += 1;
            if c <= j {
                lo = mid;
                c_lo = c;
            } else {
                hi = mid;
                c_hi = c;
            }
            if c_lo == j && c_hi == j + 1 {
                narrowing += 1;
            }
            if steps > 200 {
                break;
            }
        }
        let cluster = c_hi > j + 1 || c_lo < j;
        let sigma = 0.5 * (lo + hi);

        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (1.3 * (i * (j + 1)) as f64 + j as f64).sin()).collect();
        self.orthonormalize(&mut x, found);
        let f = self.factor_near(sigma);
        for _ in 0..4 {
            self.inverse_step(&f, &mut x, found);
        }
        let mut lambda = self.rayleigh(&x);
        let mut res = self.residual(&x, lambda);
        let mut it = 0;
        while res > tol && it < 40 {
            // Keep the shift inside the isolating bracket unless the eigenvalue is clustered.
            let shift = if cluster || (lambda > lo && lambda < hi) { lambda } else { sigma };
            let f = self.factor_near(shift);
            self.inverse_step(&f, &mut x, found);
            lambda = self.rayleigh(&x);
            res = self.residual(&x, lambda);
            it += 1;
        }
        if res > tol {
            return Err(Error::NotConverged { iterations: it, residual: res });
        }
        Ok(Eigenpair { value: lambda, vector: x, residual: res })
    }

    /// The `k` smallest eigenpairs in nondecreasing order.
    pub fn lowest(&self, k: usize, tol: f64) -> Result<Vec<Eigenpair>> {
        let mut out: Vec<Eigenpair> = Vec::with_capacity(k);
        for j in 0..k {
            let found: Vec<Vec<f64>> = out.iter().map(|e| e.vector.clone()).collect();
            out.push(self.eigenpair(j, &found, tol)?);
        }
        out.sort_by(|a, b| a.value.total_cmp(&b.value));
        Ok(out)
    }
}
