//! Experiment configuration: one JSON document drives every CLI command.
//!
//! ```json
//! {
//!   "kernel": {
//!     "name": "wave",
//!     "params": { "a": 0.25, "b": 0.75 },
//!     "design": { "mode": "continuous" },
//!     "custom": null
//!   },
//!   "truth": { "kind": "besov_dense", "max_level": 12,
//!              "s": 2.0, "p": 2.0, "q": 2.0, "radius": 1.0 },
//!   "estimator": { "regime": "auto", "d": null, "j0": null, "j_upper": null,
//!                  "loglog_inflation": false, "basis_j_max": 10 },
//!   "n": 65536,
//!   "n_grid": [1024, 4096, 16384, 65536, 262144],
//!   "replicates": 200,
//!   "seed": 20260810,
//!   "grid_points": 1024,
//!   "out_dir": "out"
//! }
//! ```
//!
//! `design.mode` is `"continuous"` (the kernel's own interval), or
//! `"discrete"` with either explicit `"points": [..]` or `"channels": M`
//! (equispaced over the kernel interval). Custom kernels use
//! `"name": "custom"` and a `custom` block with per-channel tables:
//! `{ "mmax": 2, "points": [u...], "rows": [[[re, im], ...], ...] }`,
//! rows ordered `m = -mmax ..= mmax`.
//!
//! Command-line flags override config keys; flags win.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::estimator::{PlanSpec, Regime};
use crate::kernels::{make_kernel, ConvolutionKernel, KernelDecay, SamplingDesign};
use crate::risk::{BesovParams, TestFunctionKind};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kernel: KernelConfig,
    pub truth: TruthConfig,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    /// Sample size for single-shot commands (simulate, estimate).
    #[serde(default)]
    pub n: Option<f64>,
    /// Sample-size grid for risk curves.
    #[serde(default)]
    pub n_grid: Vec<f64>,
    #[serde(default = "default_replicates")]
    pub replicates: u64,
    pub seed: u64,
    /// Points of the time-grid evaluation written by `estimate`.
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_out_dir")]
    pub out_dir: String,
}

fn default_replicates() -> u64 {
    200
}

fn default_grid_points() -> usize {
    1024
}

fn default_out_dir() -> String {
    "out".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub design: DesignConfig,
    #[serde(default)]
    pub custom: Option<CustomKernelConfig>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum DesignConfig {
    #[default]
    Continuous,
    Discrete {
        #[serde(default)]
        points: Option<Vec<f64>>,
        #[serde(default)]
        channels: Option<usize>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomKernelConfig {
    pub mmax: i64,
    pub points: Vec<f64>,
    /// `rows[l][m + mmax] = [re, im]` of `g_m(u_l)`.
    pub rows: Vec<Vec<[f64; 2]>>,
    pub nu: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
}

fn default_beta() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthConfig {
    pub kind: String,
    #[serde(default)]
    pub degree: Option<i64>,
    #[serde(default)]
    pub max_level: Option<u32>,
    #[serde(default)]
    pub mmax: Option<i64>,
    pub s: f64,
    pub p: f64,
    pub q: f64,
    #[serde(default = "default_radius")]
    pub radius: f64,
}

fn default_radius() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    #[serde(default = "default_regime")]
    pub regime: String,
    #[serde(default)]
    pub d: Option<f64>,
    #[serde(default)]
    pub j0: Option<u32>,
    #[serde(default)]
    pub j_upper: Option<u32>,
    #[serde(default)]
    pub loglog_inflation: bool,
    #[serde(default = "default_basis_j_max")]
    pub basis_j_max: u32,
}

fn default_regime() -> String {
    "auto".into()
}

fn default_basis_j_max() -> u32 {
    10
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            regime: default_regime(),
            d: None,
            j0: None,
            j_upper: None,
            loglog_inflation: false,
            basis_j_max: default_basis_j_max(),
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates a config document. Parse errors carry line and
    /// column positions.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
            Error::Parameter(format!(
                "config parse error at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.besov_params()?;
        self.build_kernel()?;
        self.plan_spec()?;
        if self.replicates < 2 {
            return Err(Error::Parameter("replicates must be >= 2".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON serialization of the resolved config.
    /// The output directory is excluded: it names where results land, not
    /// what was computed, and reruns into different directories must hash
    /// identically.
    pub fn sha256(&self) -> String {
        let mut scientific = self.clone();
        scientific.out_dir = String::new();
        let canonical = serde_json::to_string(&scientific).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        hex_string(&hasher.finalize())
    }

    pub fn besov_params(&self) -> Result<BesovParams> {
        BesovParams::new(self.truth.s, self.truth.p, self.truth.q, self.truth.radius)
    }

    pub fn test_function_kind(&self) -> Result<TestFunctionKind> {
        match self.truth.kind.as_str() {
            "trigpoly" => Ok(TestFunctionKind::Trigpoly {
                degree: self.truth.degree.unwrap_or(8),
            }),
            "besov_dense" => Ok(TestFunctionKind::BesovDense {
                max_level: self.truth.max_level.unwrap_or(12),
            }),
            "besov_sparse" => Ok(TestFunctionKind::BesovSparse {
                max_level: self.truth.max_level.unwrap_or(12),
            }),
            "bumps" => Ok(TestFunctionKind::Bumps {
                mmax: self.truth.mmax.unwrap_or(512),
            }),
            other => Err(Error::Parameter(format!("unknown truth kind '{other}'"))),
        }
    }

    pub fn build_kernel(&self) -> Result<ConvolutionKernel> {
        let kernel = if self.kernel.name == "custom" {
            let c = self.kernel.custom.as_ref().ok_or_else(|| {
                Error::Parameter("kernel 'custom' needs a 'custom' block".into())
            })?;
            let rows: Vec<Vec<Complex64>> = c
                .rows
                .iter()
                .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                .collect();
            let decay = KernelDecay::new(c.nu, c.alpha, c.beta)?;
            return ConvolutionKernel::tabulated("custom", c.points.clone(), c.mmax, rows, decay);
        } else {
            make_kernel(&self.kernel.name, &self.kernel.params)?
        };
        match &self.kernel.design {
            DesignConfig::Continuous => Ok(kernel),
            DesignConfig::Discrete { points, channels } => {
                let design = if let Some(points) = points {
                    SamplingDesign::Discrete {
                        points: points.clone(),
                    }
                } else if let Some(m) = channels {
                    let SamplingDesign::Continuous { a, b } = *kernel.design() else {
                        return Err(Error::Parameter(
                            "equispaced channels need an interval kernel".into(),
                        ));
                    };
                    SamplingDesign::equispaced(a, b, *m)?
                } else {
                    return Err(Error::Parameter(
                        "discrete design needs 'points' or 'channels'".into(),
                    ));
                };
                kernel.with_design(design)
            }
        }
    }

    pub fn plan_spec(&self) -> Result<PlanSpec> {
        let regime = match self.estimator.regime.as_str() {
            "auto" => Regime::Auto,
            "regular" => Regime::Regular,
            "super" => Regime::Super,
            "adaptive" => Regime::Adaptive,
            other => {
                return Err(Error::Parameter(format!(
                    "unknown regime '{other}' (expected auto|regular|super|adaptive)"
                )))
            }
        };
        Ok(PlanSpec {
            regime,
            d: self.estimator.d,
            j0_override: self.estimator.j0,
            j_upper_override: self.estimator.j_upper,
            loglog_inflation: self.estimator.loglog_inflation,
        })
    }
}

fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = std::fmt::Write::write_fmt(&mut s, format_args!("{b:02x}"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const EXAMPLE: &str = r#"{
        "kernel": { "name": "wave", "params": { "a": 0.25, "b": 0.75 } },
        "truth": { "kind": "besov_dense", "max_level": 8,
                   "s": 2.0, "p": 2.0, "q": 2.0, "radius": 1.0 },
        "estimator": { "regime": "adaptive" },
        "n_grid": [1024, 4096, 16384],
        "replicates": 16,
        "seed": 12345
    }"#;

    #[test]
    fn example_config_parses_and_resolves() {
        let cfg = ExperimentConfig::from_json(EXAMPLE).unwrap();
        assert_eq!(cfg.replicates, 16);
        let kernel = cfg.build_kernel().unwrap();
        assert_eq!(kernel.name(), "wave");
        assert!(matches!(cfg.plan_spec().unwrap().regime, Regime::Adaptive));
        assert_eq!(cfg.sha256().len(), 64);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let bad = "{\n  \"kernel\": { \"name\": wave }\n}";
        match ExperimentConfig::from_json(bad) {
            Err(Error::Parameter(msg)) => assert!(msg.contains("line 2"), "{msg}"),
            other => panic!("expected parameter error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let bad = r#"{
            "kernel": { "name": "delta" },
            "truth": { "kind": "trigpoly", "s": 1.0, "p": 2.0, "q": 2.0 },
            "seed": 1,
            "bogus": true
        }"#;
        assert!(ExperimentConfig::from_json(bad).is_err());
    }

    #[test]
    fn discrete_design_with_channel_count() {
        let text = r#"{
            "kernel": { "name": "heat", "params": { "a": 0.1, "b": 0.2 },
                        "design": { "mode": "discrete", "channels": 8 } },
            "truth": { "kind": "besov_dense", "s": 2.0, "p": 2.0, "q": 2.0 },
            "seed": 3
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let kernel = cfg.build_kernel().unwrap();
        let SamplingDesign::Discrete { points } = kernel.design() else {
            panic!("expected a discrete design");
        };
        assert_eq!(points.len(), 8);
        assert_eq!(points[0], 0.1);
        assert_eq!(points[7], 0.2);
    }

    #[test]
    fn custom_kernel_block_resolves() {
        let text = r#"{
            "kernel": { "name": "custom", "custom": {
                "mmax": 1, "points": [0.5],
                "rows": [[[0.5, 0.0], [1.0, 0.0], [0.5, 0.0]]],
                "nu": 0.0
            } },
            "truth": { "kind": "trigpoly", "degree": 4, "s": 1.0, "p": 2.0, "q": 2.0 },
            "seed": 9
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let kernel = cfg.build_kernel().unwrap();
        assert_eq!(kernel.name(), "custom");
        assert_eq!(kernel.g_channel(0, 1).unwrap().re, 0.5);
    }
}
