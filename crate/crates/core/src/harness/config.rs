//! Experiment configuration and its JSON form.

use serde::{Deserialize, Serialize};

use crate::covolume::{Method, MethodKind};
use crate::error::{Error, Result};
use crate::orthant::GeneratorSet;
use crate::toric::ReinhardtSpec;

pub const DEFAULT_T_COUNT: usize = 11;
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_INEQ_SLACK: f64 = 1e-9;
pub const DEFAULT_EXACT_EQ: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weights {
    Explicit(f64, f64),
    Equilibrated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default = "default_ineq_slack")]
    pub ineq_slack: f64,
    #[serde(default = "default_exact_eq")]
    pub exact_eq: f64,
}

fn default_ineq_slack() -> f64 {
    DEFAULT_INEQ_SLACK
}

fn default_exact_eq() -> f64 {
    DEFAULT_EXACT_EQ
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ineq_slack: DEFAULT_INEQ_SLACK,
            exact_eq: DEFAULT_EXACT_EQ,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub set0: ReinhardtSpec,
    pub set1: ReinhardtSpec,
    pub weights: Weights,
    pub t_grid: Vec<f64>,
    pub method: MethodKind,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

/// `count` equally spaced points from 0 to 1.
pub fn uniform_grid(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count).map(|i| i as f64 / (count - 1) as f64).collect(),
    }
}

impl ExperimentConfig {
    /// Explicit weights, default grid, exact method.
    pub fn new(set0: ReinhardtSpec, set1: ReinhardtSpec, weights: Weights) -> Result<Self> {
        let cfg = Self {
            set0,
            set1,
            weights,
            t_grid: uniform_grid(DEFAULT_T_COUNT),
            method: MethodKind::Exact,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            tolerances: Tolerances::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_grid(mut self, t_grid: Vec<f64>) -> Result<Self> {
        self.t_grid = t_grid;
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.set0.dim()
    }

    pub fn method(&self) -> Method {
        match self.method {
            MethodKind::Exact => Method::Exact,
            MethodKind::MonteCarlo => Method::MonteCarlo {
                samples: self.samples,
                seed: self.seed,
            },
        }
    }

    /// Monte Carlo method with the configured sample count and a given seed.
    pub fn mc_method(&self, seed: u64) -> Method {
        Method::MonteCarlo {
            samples: self.samples,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.set0.dim();
        if self.set1.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.set1.dim(),
            });
        }
        self.set0.log_image()?;
        self.set1.log_image()?;
        if let Weights::Explicit(c0, c1) = self.weights {
            if !(c0 > 0.0 && c1 > 0.0 && c0.is_finite() && c1.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "weights must be positive, got ({c0}, {c1})"
                )));
            }
        }
        if self.t_grid.is_empty() {
            return Err(Error::InvalidInput("t grid is empty".into()));
        }
        if self.t_grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::InvalidInput("t grid must lie in [0, 1]".into()));
        }
        if self.t_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput(
                "t grid must be strictly increasing".into(),
            ));
        }
        for v in [self.tolerances.ineq_slack, self.tolerances.exact_eq] {
            if !(v >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "tolerance must be >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ConfigFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        file.into_config()
    }

    pub fn to_json(&self) -> String {
        let file = ConfigFile {
            n: Some(self.dim()),
            set0: SetFile::from_spec(&self.set0),
            set1: SetFile::from_spec(&self.set1),
            weights: match self.weights {
                Weights::Explicit(c0, c1) => WeightsFile::Explicit([c0, c1]),
                Weights::Equilibrated => WeightsFile::Mode("equilibrated".into()),
            },
            t_grid: Some(self.t_grid.clone()),
            t_count: None,
            method: Some(
                match self.method {
                    MethodKind::Exact => "exact",
                    MethodKind::MonteCarlo => "mc",
                }
                .into(),
            ),
            samples: Some(self.samples),
            seed: Some(self.seed),
            tolerances: Some(self.tolerances),
        };
        serde_json::to_string_pretty(&file).expect("config serializes")
    }
}

pub fn parse_method(name: &str) -> Result<MethodKind> {
    match name {
        "exact" => Ok(MethodKind::Exact),
        "mc" | "monte_carlo" => Ok(MethodKind::MonteCarlo),
        other => Err(Error::InvalidInput(format!("unknown method {other:?}"))),
    }
}

/// A toric set as written in JSON: `{"polydisk": [..]}` or
/// `{"generators": [[..], ..]}`, optionally with `"n"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polydisk: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<f64>>>,
}

impl SetFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    pub fn from_spec(spec: &ReinhardtSpec) -> Self {
        match spec {
            ReinhardtSpec::Polydisk(r) => Self {
                n: None,
                polydisk: Some(r.clone()),
                generators: None,
            },
            ReinhardtSpec::LogGenerators(q) => Self {
                n: None,
                polydisk: None,
                generators: Some(q.generators().to_vec()),
            },
        }
    }

    pub fn to_spec(&self) -> Result<ReinhardtSpec> {
        let spec = match (&self.polydisk, &self.generators) {
            (Some(r), None) => ReinhardtSpec::polydisk(r.clone())?,
            (None, Some(g)) => ReinhardtSpec::LogGenerators(GeneratorSet::new(g.clone())?),
            _ => {
                return Err(Error::InvalidInput(
                    "set needs exactly one of \"polydisk\" or \"generators\"".into(),
                ))
            }
        };
        if let Some(n) = self.n {
            if n != spec.dim() {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: spec.dim(),
                });
            }
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum WeightsFile {
    Explicit([f64; 2]),
    Mode(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    n: Option<usize>,
    set0: SetFile,
    set1: SetFile,
    weights: WeightsFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t_count: Option<usize>,
    #[serde(default)]
    method: Option<String>,
    #[serde(default)]
    samples: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    tolerances: Option<Tolerances>,
}

impl ConfigFile {
    fn into_config(self) -> Result<ExperimentConfig> {
        let set0 = self.set0.to_spec()?;
        let set1 = self.set1.to_spec()?;
        if let Some(n) = self.n {
            for d in [set0.dim(), set1.dim()] {
                if d != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: d,
                    });
                }
            }
        }
        let weights = match self.weights {
            WeightsFile::Explicit([c0, c1]) => Weights::Explicit(c0, c1),
            WeightsFile::Mode(m) if m == "equilibrated" => Weights::Equilibrated,
            WeightsFile::Mode(m) => {
                return Err(Error::InvalidInput(format!("unknown weights mode {m:?}")))
            }
        };
        let t_grid = match (self.t_grid, self.t_count) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidInput("give either t_grid or t_count".into()))
            }
            (Some(g), None) => g,
            (None, Some(c)) => uniform_grid(c),
            (None, None) => uniform_grid(DEFAULT_T_COUNT),
        };
        let method = match self.method {
            Some(m) => parse_method(&m)?,
            None => MethodKind::Exact,
        };
        let cfg = ExperimentConfig {
            set0,
            set1,
            weights,
            t_grid,
            method,
            samples: self.samples.unwrap_or(DEFAULT_SAMPLES),
            seed: self.seed.unwrap_or(0),
            tolerances: self.tolerances.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
