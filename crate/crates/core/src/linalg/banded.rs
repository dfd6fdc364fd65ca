use crate::error::{Error, Result};

/// Symmetric matrix stored as its lower band, column by column.
///
/// Entry `(i, j)` with `j <= i <= j + bw` lives at `data[j * (bw + 1) + (i - j)]`.
#[derive(Debug, Clone)]
pub struct SymBanded {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl SymBanded {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self { n, bw, data: vec![0.0; n * (bw + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        debug_assert!(i - j <= self.bw, "entry ({i}, {j}) outside band {}", self.bw);
        j * (self.bw + 1) + (i - j)
    }

    /// Adds `v` to entry `(i, j)` (and implicitly to `(j, i)`).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        if hi - lo > self.bw {
            return 0.0;
        }
        self.data[self.slot(i, j)]
    }

    pub fn add_diagonal(&mut self, diag: &[f64]) {
        for (j, v) in diag.iter().enumerate() {
            self.data[j * (self.bw + 1)] += v;
        }
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let w = self.bw + 1;
        y.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..self.n {
            let col = &self.data[j * w..(j + 1) * w];
            let end = (j + self.bw).min(self.n - 1);
            y[j] += col[0] * x[j];
            let xj = x[j];
            let mut acc = 0.0;
            for i in j + 1..=end {
                let a = col[i - j];
                y[i] += a * xj;
                acc += a * x[i];
            }
            y[j] += acc;
        }
    }

    /// LDL^T factorization without pivoting.
    ///
    /// Works for indefinite matrices as long as no leading minor vanishes; the
    /// number of negative pivots is the number of negative eigenvalues.
    pub fn factor(&self) -> Result<LdlFactor> {
        let n = self.n;
        let bw = self.bw;
        let w = bw + 1;
        let mut data = self.data.clone();
        let scale = self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let mut negative = 0;
        for j in 0..n {
            let (head, tail) = data.split_at_mut((j + 1) * w);
            let col_j = &mut head[j * w..];
            let d = col_j[0];
            if d.abs() <= 1e-15 * scale {
                return Err(Error::Breakdown { row: j, pivot: d });
            }
            if d < 0.0 {
                negative += 1;
            }
            let end = (j + bw).min(n - 1);
            for k in j + 1..=end {
                let f = col_j[k - j] / d;
                if f == 0.0 {
                    continue;
                }
                let off = (k - j - 1) * w;
                let col_k = &mut tail[off..off + w];
                for i in k..=end {
                    col_k[i - k] -= col_j[i - j] * f;
                }
            }
            let inv = 1.0 / d;
            for v in col_j[1..=end - j].iter_mut() {
                *v *= inv;
            }
        }
        Ok(LdlFactor { n, bw, data, negative })
    }
}

/// Result of [`SymBanded::factor`].
#[derive(Debug, Clone)]
pub struct LdlFactor {
    n: usize,
    bw: usize,
    data: Vec<f64>,
    negative: usize,
}

impl LdlFactor {
    /// Number of negative pivots (Sylvester inertia).
    pub fn negative_count(&self) -> usize {
        self.negative
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let w = self.bw + 1;
        let n = self.n;
        for j in 0..n {
            let col = &self.data[j * w..(j + 1) * w];
            let end = (j + self.bw).min(n - 1);
            let bj = b[j];
            if bj != 0.0 {
                for i in j + 1..=end {
                    b[i] -= col[i - j] * bj;
                }
            }
        }
        for j in 0..n {
            b[j] /= self.data[j * w];
        }
        for j in (0..n).rev() {
            let col = &self.data[j * w..(j + 1) * w];
            let end = (j + self.bw).min(n - 1);
            let mut acc = 0.0;
            for i in j + 1..=end {
                acc += col[i - j] * b[i];
            }
            b[j] -= acc;
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(a: &SymBanded) -> Vec<Vec<f64>> {
        let n = a.dim();
        (0..n).map(|i| (0..n).map(|j| a.get(i, j)).collect()).collect()
    }

    fn sample(n: usize, bw: usize, shift: f64) -> SymBanded {
        let mut a = SymBanded::zeros(n, bw);
        for i in 0..n {
            a.add(i, i, 4.0 + shift + (i as f64 * 0.37).sin());
            for k in 1..=bw {
                if i + k < n {
                    a.add(i + k, i, -1.0 / k as f64 + 0.1 * ((i * k) as f64).cos());
                }
            }
        }
        a
    }

    #[test]
    fn solve_matches_matvec() {
        let a = sample(40, 3, 0.0);
        let x: Vec<f64> = (0..40).map(|i| (i as f64).sqrt() - 2.0).collect();
        let mut b = vec![0.0; 40];
        a.matvec(&x, &mut b);
        let f = a.factor().unwrap();
        let y = f.solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn matvec_matches_dense() {
        let a = sample(12, 2, 0.5);
        let d = dense(&a);
        let x: Vec<f64> = (0..12).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let mut y = vec![0.0; 12];
        a.matvec(&x, &mut y);
        for i in 0..12 {
            let r: f64 = (0..12).map(|j| d[i][j] * x[j]).sum();
            assert!((r - y[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn inertia_counts_eigenvalues_below_shift() {
        // Path-graph Laplacian: eigenvalues 2 - 2 cos(k pi / (n + 1)).
        let n = 30;
        let mut a = SymBanded::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i + 1 < n {
                a.add(i + 1, i, -1.0);
            }
        }
        let eig: Vec<f64> = (1..=n)
            .map(|k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        for shift in [0.05, 0.7, 1.3, 2.9, 3.99] {
            let mut s = a.clone();
            s.add_diagonal(&vec![-shift; n]);
            let expected = eig.iter().filter(|&&e| e < shift).count();
            assert_eq!(s.factor().unwrap().negative_count(), expected);
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let mut a = SymBanded::zeros(2, 1);
        a.add(1, 0, 1.0);
        a.add(1, 1, 1.0);
        assert!(matches!(a.factor(), Err(Error::Breakdown { row: 0, .. })));
    }
}
