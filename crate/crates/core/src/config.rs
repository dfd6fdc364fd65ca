//! Run configuration shared by the command-line front end and the validation suite.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::bifurcation::SweepOptions;
use crate::error::{Error, Result};
use crate::params::ProblemParams;

/// Values of `L` to visit: an explicit list or `count` equally spaced values in `[min, max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LSchedule {
    List { values: Vec<f64> },
    Range { min: f64, max: f64, count: usize },
}

impl LSchedule {
    pub fn values(&self) -> Result<Vec<f64>> {
        let out = match *self {
            LSchedule::List { ref values } => values.clone(),
            LSchedule::Range { min, max, count } => {
                if count == 1 {
                    vec![min]
                } else {
                    (0..count).map(|k| min + (max - min) * k as f64 / (count - 1) as f64).collect()
                }
            }
        };
        if out.is_empty() {
            return Err(bad("schedule", "empty L schedule"));
        }
        if let Some(l) = out.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return Err(bad("schedule", &format!("L = {l} is not a positive number")));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PitchforkConfig {
    /// Sample points as ratios `L / L*`.
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CriticalConfig {
    #[serde(rename = "N")]
    pub n: usize,
    pub eps: f64,
    #[serde(rename = "L")]
    pub l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EigenConfig {
    /// Number of linearized eigenvalues to report on the strip.
    pub count: usize,
    /// Step of the radial grid for the ground state.
    pub h: f64,
    pub r_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemParams,
    pub schedule: LSchedule,
    pub sweep: SweepOptions,
    pub eigen: EigenConfig,
    pub pitchfork: PitchforkConfig,
    pub critical: CriticalConfig,
    /// Seed for random test fields.
    pub seed: u64,
    pub workers: usize,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemParams::default(),
            schedule: LSchedule::List { values: vec![1.0, 1.5, 1.75, 1.9, 2.5, 3.0] },
            sweep: SweepOptions::default(),
            eigen: EigenConfig::default(),
            pitchfork: PitchforkConfig::default(),
            critical: CriticalConfig::default(),
            seed: 0,
            workers: 4,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl Default for PitchforkConfig {
    fn default() -> Self {
        Self { ratios: vec![1.01, 1.02, 1.05] }
    }
}

impl Default for CriticalConfig {
    fn default() -> Self {
        Self { n: 5, eps: 0.01, l: 0.1 }
    }
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self { count: 4, h: 0.01, r_max: 25.0 }
    }
}

fn bad(path: &str, reason: &str) -> Error {
    Error::BadConfig { path: path.to_string(), reason: reason.to_string() }
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(path, &format!("must be a positive number, got {v}")))
    }
}

impl RunConfig {
    /// Checks every field; the schedule is checked where it is used.
    pub fn validate(&self) -> Result<()> {
        self.problem.validate().map_err(|e| bad("problem", &e.to_string()))?;
        let s = &self.sweep;
        for (path, v) in [
            ("sweep.solver.tol", s.solver.tol),
            ("sweep.solver.cg_tol", s.solver.cg_tol),
            ("sweep.trivial_s_tol", s.trivial_s_tol),
            ("sweep.trivial_c_tol", s.trivial_c_tol),
            ("sweep.l_tol", s.l_tol),
            ("sweep.profile_h", s.profile_h),
            ("sweep.order_tol", s.order_tol),
            ("sweep.grid.h", s.grid.h),
            ("sweep.grid.r_max_factor", s.grid.r_max_factor),
            ("sweep.grid.r_max_cap", s.grid.r_max_cap),
            ("eigen.h", self.eigen.h),
            ("eigen.r_max", self.eigen.r_max),
            ("critical.eps", self.critical.eps),
            ("critical.L", self.critical.l),
        ] {
            positive(path, v)?;
        }
        for (path, v) in [
            ("sweep.solver.max_iter", s.solver.max_iter),
            ("sweep.solver.cg_max_iter", s.solver.cg_max_iter),
            ("sweep.solver.stall_window", s.solver.stall_window),
            ("workers", self.workers),
        ] {
            if v == 0 {
                return Err(bad(path, "must be at least 1"));
            }
        }
        if s.grid.m < 8 {
            return Err(bad("sweep.grid.m", "needs at least 8 transverse nodes"));
        }
        if self.eigen.count < 2 {
            return Err(bad("eigen.count", "needs at least 2 eigenvalues"));
        }
        if self.critical.n < 4 {
            return Err(bad("critical.N", "test-function expansion needs N >= 4"));
        }
        if let Some(r) = self.pitchfork.ratios.iter().find(|r| !(**r > 1.0)) {
            return Err(bad("pitchfork.ratios", &format!("ratio {r} must exceed 1")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn range_schedule() {
        let s = LSchedule::Range { min: 1.0, max: 2.0, count: 5 };
        assert_eq!(s.values().unwrap(), vec![1.0, 1.25, 1.5, 1.75, 2.0]);
    }

    #[test]
    fn empty_schedule_is_rejected() {
        let s = LSchedule::List { values: vec![] };
        assert!(matches!(s.values(), Err(Error::BadConfig { .. })));
        assert!(LSchedule::Range { min: 1.0, max: 2.0, count: 0 }.values().is_err());
    }

    #[test]
    fn bad_fields_name_their_path() {
        let mut c = RunConfig::default();
        c.sweep.solver.tol = 0.0;
        match c.validate() {
            Err(Error::BadConfig { path, .. }) => assert_eq!(path, "sweep.solver.tol"),
            other => panic!("{other:?}"),
        }
        let mut c = RunConfig::default();
        c.workers = 0;
        assert!(matches!(c.validate(), Err(Error::BadConfig { path, .. }) if path == "workers"));
    }

    #[test]
    fn missing_keys_take_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"problem": {"N": 3}, "sweep": {"grid": {"m": 32}}}"#).unwrap();
        let mut want = RunConfig::default();
        want.problem.n = 3;
        want.sweep.grid.m = 32;
        assert_eq!(c, want);
    }

    #[test]
    fn json_round_trip() {
        let c = RunConfig::default();
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
