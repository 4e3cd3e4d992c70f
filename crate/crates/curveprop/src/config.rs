//! Experiment configuration documents (JSON).
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "symbol": { "kind": "elliptic", "dim": 1 },
//!   "curve":  { "kind": "shift", "alpha": 0.5 },
//!   "data":   { "kind": "graded", "s": 0.0, "delta": 0.5, "seed": 7 },
//!   "params": { "samples": 64, "dyadic": [5, 12] }
//! }
//! ```
//!
//! Every fragment except `symbol` has a default. Unknown fields are errors.

use std::collections::BTreeMap;
use std::fmt;

use curveprop_core::curve::AffineKnot;
use curveprop_core::{Ball, Curve, FrequencyGrid, Symbol, SymbolKind};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Propagate,
    RateFit,
    Maximal,
    LowerBound,
    Decompose,
    KernelDecay,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Propagate => "propagate",
            ExperimentKind::RateFit => "rate-fit",
            ExperimentKind::Maximal => "maximal",
            ExperimentKind::LowerBound => "lower-bound",
            ExperimentKind::Decompose => "decompose",
            ExperimentKind::KernelDecay => "kernel-decay",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SymbolConfig {
    Elliptic {
        dim: usize,
    },
    Nonelliptic {
        dim: usize,
        #[serde(default)]
        signs: Vec<i8>,
    },
    Fractional {
        dim: usize,
        exponent: f64,
    },
    Polynomial2d {
        m1: u32,
        m2: u32,
        sigma: i8,
    },
    Polynomial {
        dim: usize,
        terms: Vec<TermConfig>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub powers: Vec<u32>,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CurveConfig {
    #[default]
    Vertical,
    /// `x − v t^α`; `v` defaults to `e₁`.
    Shift {
        #[serde(default)]
        direction: Option<Vec<f64>>,
        alpha: f64,
    },
    LinearDrift {
        velocity: Vec<f64>,
    },
    Tabulated {
        alpha: f64,
        knots: Vec<KnotConfig>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnotConfig {
    pub t: f64,
    pub matrix: Vec<f64>,
    pub offset: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataConfig {
    Gaussian {
        #[serde(default = "one")]
        width: f64,
    },
    BandLimited {
        lambda: f64,
        seed: u64,
    },
    Graded {
        s: f64,
        delta: f64,
        seed: u64,
    },
    SobolevProfile {
        s: f64,
        seed: u64,
    },
    /// A binary field file.
    File {
        path: String,
    },
}

fn one() -> f64 {
    1.0
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig::Gaussian { width: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallConfig {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveEvaluation {
    Direct,
    Interpolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TilingKind {
    Dyadic,
    Anisotropic,
}

/// Experiment parameters; each command reads the ones it needs and applies
/// its own defaults to the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Evaluation times (`propagate`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    /// Explicit base points; otherwise `samples` points are drawn from `ball`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball: Option<BallConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<CurveEvaluation>,
    /// Dyadic exponents `[j₀, j₁]`: times `2^{-j}`, `j = j₀ … j₁`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dyadic: Option<[u32; 2]>,
    /// Fit window as dyadic exponents; chosen automatically when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[u32; 2]>,
    /// Extra regularity assumed by the predicted rate; defaults to the
    /// graded data's `δ`, and to the smooth limit for Gaussian and
    /// band-limited data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_count: Option<usize>,
    /// Sobolev exponent of the `hs_energy` column (`decompose`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiling: Option<TilingKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separations: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    /// When present, must match the command being run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    pub symbol: SymbolConfig,
    #[serde(default)]
    pub curve: CurveConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub params: Params,
    /// Output directory used when `--out` is not given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
}

/// A configuration problem, located by a dotted field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "invalid config: {}", self.message)
        } else {
            write!(f, "invalid config at `{}`: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

fn at(path: &str, e: impl fmt::Display) -> ConfigError {
    ConfigError {
        path: path.to_string(),
        message: e.to_string(),
    }
}

/// Parses a config document, reporting the path of the first bad field.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        // a missing field is reported against its parent; name it directly
        let msg = inner.to_string();
        let path = match msg.strip_prefix("missing field `").and_then(|r| r.split('`').next()) {
            Some(field) if path == "." => field.to_string(),
            Some(field) => format!("{path}.{field}"),
            None => path,
        };
        ConfigError { path, message: msg }
    })?;
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(at(
            "schema_version",
            format!("unsupported schema version {} (expected {SCHEMA_VERSION})", cfg.schema_version),
        ));
    }
    Ok(cfg)
}

impl SymbolConfig {
    pub fn build(&self) -> Result<Symbol, ConfigError> {
        let r = match self {
            SymbolConfig::Elliptic { dim } => Symbol::elliptic(*dim),
            SymbolConfig::Nonelliptic { dim, signs } => Symbol::nonelliptic(*dim, signs.clone()),
            SymbolConfig::Fractional { dim, exponent } => Symbol::fractional(*dim, *exponent),
            SymbolConfig::Polynomial2d { m1, m2, sigma } => Symbol::polynomial2d(*m1, *m2, *sigma),
            SymbolConfig::Polynomial { dim, terms } => {
                let mut map = BTreeMap::new();
                for t in terms {
                    *map.entry(t.powers.clone()).or_insert(0.0) += t.coefficient;
                }
                Symbol::polynomial(*dim, map)
            }
        };
        r.map_err(|e| at("symbol", e))
    }
}

impl CurveConfig {
    pub fn build(&self, dim: usize) -> Result<Curve, ConfigError> {
        let r = match self {
            CurveConfig::Vertical => Curve::vertical(dim),
            CurveConfig::Shift { direction, alpha } => match direction {
                Some(v) if v.len() != dim => {
                    return Err(at(
                        "curve.direction",
                        format!("needs {dim} components, got {}", v.len()),
                    ))
                }
                Some(v) => Curve::shift(v.clone(), *alpha),
                None => Curve::shift_e1(dim, *alpha),
            },
            CurveConfig::LinearDrift { velocity } => {
                if velocity.len() != dim {
                    return Err(at(
                        "curve.velocity",
                        format!("needs {dim} components, got {}", velocity.len()),
                    ));
                }
                Curve::linear_drift(velocity.clone())
            }
            CurveConfig::Tabulated { alpha, knots } => Curve::tabulated(
                dim,
                knots
                    .iter()
                    .map(|k| AffineKnot {
                        t: k.t,
                        matrix: k.matrix.clone(),
                        offset: k.offset.clone(),
                    })
                    .collect(),
                *alpha,
            ),
        };
        r.map_err(|e| at("curve", e))
    }
}

impl ExperimentConfig {
    pub fn grid(&self, dim: usize) -> Result<FrequencyGrid, ConfigError> {
        match &self.grid {
            Some(g) => FrequencyGrid::new(dim, g.half_width, g.points).map_err(|e| at("grid", e)),
            None => FrequencyGrid::default_for(dim).map_err(|e| at("grid", e)),
        }
    }

    pub fn ball(&self, dim: usize) -> Result<Ball, ConfigError> {
        match &self.params.ball {
            Some(b) if b.center.len() != dim => Err(at(
                "params.ball.center",
                format!("needs {dim} components, got {}", b.center.len()),
            )),
            Some(b) => Ball::new(b.center.clone(), b.radius).map_err(|e| at("params.ball", e)),
            None => Ok(Ball::unit(dim)),
        }
    }

    /// Base points: explicit `params.points`, or `params.samples` (default
    /// `default_count`) uniform draws from the ball, flattened.
    pub fn base_points(&self, dim: usize, default_count: usize) -> Result<Vec<f64>, ConfigError> {
        if let Some(pts) = &self.params.points {
            if pts.is_empty() {
                return Err(at("params.points", "must not be empty"));
            }
            if let Some(i) = pts.iter().position(|p| p.len() != dim) {
                return Err(at(&format!("params.points[{i}]"), format!("needs {dim} coordinates")));
            }
            return Ok(pts.concat());
        }
        let count = self.params.samples.unwrap_or(default_count);
        if count == 0 {
            return Err(at("params.samples", "must be positive"));
        }
        Ok(self.ball(dim)?.sample(count, self.params.sample_seed.unwrap_or(0)))
    }

    /// Builds and cross-checks symbol and curve for `kind`.
    pub fn validate(&self, kind: ExperimentKind) -> Result<(Symbol, Curve), ConfigError> {
        if let Some(k) = self.experiment {
            if k != kind {
                return Err(at(
                    "experiment",
                    format!("config is for `{}` but `{}` was requested", k.name(), kind.name()),
                ));
            }
        }
        let symbol = self.symbol.build()?;
        let curve = self.curve.build(symbol.dim())?;
        if let SymbolKind::Polynomial2d { m1, .. } = symbol.kind() {
            // the mixed-degree maximal estimate needs |γ(x,t) − γ(x,t′)| ≲ |t − t′|^{1/(m₁−1)}
            let need = 1.0 / (*m1 as f64 - 1.0);
            if matches!(kind, ExperimentKind::RateFit | ExperimentKind::Maximal)
                && curve.alpha() < need - 1e-12
            {
                return Err(at(
                    "curve.alpha",
                    format!(
                        "ξ₁^{m1} ± ξ₂^m₂ experiments need a curve of Hölder order ≥ 1/(m₁−1) = {need}, got {}",
                        curve.alpha()
                    ),
                ));
            }
        }
        match kind {
            ExperimentKind::KernelDecay => {
                if !matches!(symbol.kind(), SymbolKind::Polynomial2d { .. }) {
                    return Err(at("symbol.kind", "kernel-decay needs a polynomial2d symbol"));
                }
            }
            ExperimentKind::LowerBound => {
                let ok = match &self.curve {
                    CurveConfig::Shift { direction, .. } => direction.as_ref().is_none_or(|v| {
                        v.iter().enumerate().all(|(i, &c)| c == if i == 0 { 1.0 } else { 0.0 })
                    }),
                    _ => false,
                };
                if !ok {
                    return Err(at("curve", "lower-bound needs the shift curve x − e₁t^α"));
                }
            }
            ExperimentKind::Decompose
                if self.params.tiling == Some(TilingKind::Anisotropic)
                    && !matches!(symbol.kind(), SymbolKind::Polynomial2d { .. })
                => {
                    return Err(at("params.tiling", "anisotropic tiling needs a polynomial2d symbol"));
                }
            _ => {}
        }
        if let Some(t) = &self.params.times {
            if let Some(i) = t.iter().position(|v| !(0.0..=1.0).contains(v)) {
                return Err(at(&format!("params.times[{i}]"), "times must lie in [0, 1]"));
            }
        }
        if let Some([a, b]) = self.params.dyadic {
            if a > b || b > 60 {
                return Err(at("params.dyadic", "need j₀ <= j₁ <= 60"));
            }
        }
        Ok((symbol, curve))
    }
}
