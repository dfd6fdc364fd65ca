use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension `N`, exponent `p` and strip parameter `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemParams {
    #[serde(rename = "N")]
    pub n: usize,
    pub p: f64,
    #[serde(rename = "L")]
    pub l: f64,
}

impl Default for ProblemParams {
    fn default() -> Self {
        Self { n: 2, p: 3.0, l: 1.0 }
    }
}

impl ProblemParams {
    pub fn new(n: usize, p: f64, l: f64) -> Result<Self> {
        let params = Self { n, p, l };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("N must be >= 2, got {}", self.n)));
        }
        if !(self.p > 1.0) || !self.p.is_finite() {
            return Err(Error::InvalidParameter(format!("p must be > 1, got {}", self.p)));
        }
        if !(self.l > 0.0) || !self.l.is_finite() {
            return Err(Error::InvalidParameter(format!("L must be > 0, got {}", self.l)));
        }
        if let Some(bound) = critical_exponent(self.n) {
            if self.p > bound + 1e-12 {
                return Err(Error::Supercritical { d: self.n, p: self.p, bound });
            }
        }
        Ok(())
    }

    pub fn with_l(&self, l: f64) -> Self {
        Self { l, ..*self }
    }

    /// Dimension of the cross-section `R^{N-1}`.
    pub fn cross_dim(&self) -> usize {
        self.n - 1
    }

    pub fn is_critical(&self) -> bool {
        critical_exponent(self.n).map_or(false, |b| (self.p - b).abs() <= 1e-12)
    }
}

/// `(d + 2) / (d - 2)` for `d >= 3`.
pub fn critical_exponent(d: usize) -> Option<f64> {
    (d >= 3).then(|| (d as f64 + 2.0) / (d as f64 - 2.0))
}
