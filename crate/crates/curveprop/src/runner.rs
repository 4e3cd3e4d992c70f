//! Command dispatch: config → experiment → CSV tables and JSON summary.

use std::path::{Path, PathBuf};

use curveprop_core::decomp::{
    anisotropic_decompose, dyadic_decompose, AnisotropicTiling, KernelSpec,
};
use curveprop_core::experiments::{
    dyadic_times, fit_rate, lower_bound_check, predicted_rate, select_window, RateKind, SweepSpec,
};
use curveprop_core::{Curve, FrequencyGrid, Propagator, SpectralField, Symbol, SymbolKind};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::{
    parse_config, ConfigError, CurveEvaluation, DataConfig, ExperimentConfig, ExperimentKind, TilingKind,
};
use crate::fast::{evolve_along_curve_with, CurveMethod, DEFAULT_INTERPOLATION};
use crate::io::{load_field, FieldFileError};
use crate::parallel;
use crate::report::{emit_report, json_number, Cell, CsvTable, ReportError, Summary};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("cannot read config {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {}", .0.name(), .0)]
    Numerical(#[from] curveprop_core::Error),
    #[error("{}: {}", .0.name(), .0)]
    Report(#[from] ReportError),
    #[error("field file: {0}")]
    FieldFile(#[from] FieldFileError),
}

impl RunError {
    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::ConfigRead { .. } => 2,
            _ => 1,
        }
    }
}

/// What a command produced, before anything is written.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: Summary,
    pub tables: Vec<(String, CsvTable)>,
}

impl RunOutput {
    pub fn emit(&self, dir: &Path) -> Result<PathBuf, ReportError> {
        emit_report(dir, &self.summary, &self.tables)
    }
}

/// Reads `config_path`, runs `kind` on a pool of `threads` workers (0 = one
/// per core) and writes the report into `out` (default: the config's
/// `out_dir`, else `./<command>`). Returns the summary path.
pub fn run(kind: ExperimentKind, config_path: &Path, out: Option<&Path>, threads: usize) -> Result<PathBuf, RunError> {
    let text = std::fs::read_to_string(config_path).map_err(|source| RunError::ConfigRead {
        path: config_path.to_path_buf(),
        source,
    })?;
    let cfg = parse_config(&text)?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let pool = parallel::thread_pool(threads)?;
    let output = pool.install(|| execute(kind, &cfg, base))?;
    let dir = match (out, &cfg.out_dir) {
        (Some(d), _) => d.to_path_buf(),
        (None, Some(d)) => base.join(d),
        (None, None) => PathBuf::from(kind.name()),
    };
    Ok(output.emit(&dir)?)
}

fn blob_hash(hasher: &mut Sha256, bytes: &[u8]) {
    hasher.update(format!("blob {}\0", bytes.len()).as_bytes());
    hasher.update(bytes);
}

/// Config echo (defaults filled in) and the content hash of all inputs:
/// the git blob hash of the canonical (key-sorted) config JSON, chained with
/// the blob of the data file when there is one.
pub fn echo_and_hash(cfg: &ExperimentConfig, base: &Path) -> Result<(Value, String), RunError> {
    let echo = serde_json::to_value(cfg).expect("config serializes");
    let canonical = serde_json::to_string(&echo).expect("value serializes");
    let mut hasher = Sha256::new();
    blob_hash(&mut hasher, canonical.as_bytes());
    if let DataConfig::File { path } = &cfg.data {
        let p = base.join(path);
        let bytes = std::fs::read(&p).map_err(FieldFileError::Io)?;
        blob_hash(&mut hasher, &bytes);
    }
    Ok((echo, hex::encode(hasher.finalize())))
}

fn data_err(e: impl std::fmt::Display) -> ConfigError {
    ConfigError {
        path: "data".into(),
        message: e.to_string(),
    }
}

fn build_field(cfg: &ExperimentConfig, grid: FrequencyGrid, base: &Path) -> Result<SpectralField, RunError> {
    let f = match &cfg.data {
        DataConfig::Gaussian { width } => SpectralField::gaussian(grid, *width),
        DataConfig::BandLimited { lambda, seed } => SpectralField::band_limited_random(grid, *lambda, *seed),
        DataConfig::Graded { s, delta, seed } => SpectralField::graded(grid, *s, *delta, *seed),
        DataConfig::SobolevProfile { s, seed } => SpectralField::sobolev_profile(grid, *s, *seed),
        DataConfig::File { path } => {
            let f = load_field(&base.join(path))?;
            if f.dim() != grid.dim() {
                return Err(data_err(format!("field file is {}-dimensional, symbol is {}", f.dim(), grid.dim())).into());
            }
            if cfg.grid.is_some() && f.grid() != &grid {
                return Err(ConfigError {
                    path: "grid".into(),
                    message: "grid disagrees with the field file's grid".into(),
                }
                .into());
            }
            return Ok(f);
        }
    };
    Ok(f.map_err(data_err)?)
}

fn obj(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

fn param_err(path: &str, message: impl Into<String>) -> RunError {
    RunError::Config(ConfigError {
        path: path.into(),
        message: message.into(),
    })
}

/// Runs `kind` without touching the filesystem (except to read a data file).
pub fn execute(kind: ExperimentKind, cfg: &ExperimentConfig, base: &Path) -> Result<RunOutput, RunError> {
    let (symbol, curve) = cfg.validate(kind)?;
    let (echo, input_hash) = echo_and_hash(cfg, base)?;
    let (results, tables) = match kind {
        ExperimentKind::Propagate => propagate(cfg, &symbol, &curve, base)?,
        ExperimentKind::RateFit => rate_fit(cfg, &symbol, &curve, base)?,
        ExperimentKind::Maximal => maximal(cfg, &symbol, &curve)?,
        ExperimentKind::LowerBound => lower_bound(cfg, &symbol, &curve, base)?,
        ExperimentKind::Decompose => decompose(cfg, &symbol, base)?,
        ExperimentKind::KernelDecay => kernel_decay(cfg, &symbol, &curve)?,
    };
    let summary = Summary {
        schema_version: crate::config::SCHEMA_VERSION,
        command: kind.name().to_string(),
        input_hash,
        config: echo,
        results,
        csv: tables.iter().map(|(n, _)| n.clone()).collect(),
    };
    Ok(RunOutput { summary, tables })
}

type Produced = (Vec<Value>, Vec<(String, CsvTable)>);

fn propagate(cfg: &ExperimentConfig, symbol: &Symbol, curve: &Curve, base: &Path) -> Result<Produced, RunError> {
    let n = symbol.dim();
    let field = build_field(cfg, cfg.grid(n)?, base)?;
    let points = cfg.base_points(n, 16)?;
    let times = cfg.params.times.clone().unwrap_or_else(|| vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    let method = match cfg.params.method.unwrap_or(CurveEvaluation::Direct) {
        CurveEvaluation::Direct => CurveMethod::Direct,
        CurveEvaluation::Interpolated => DEFAULT_INTERPOLATION,
    };
    let prop = Propagator::new(&field, symbol)?;
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    header.extend(["t", "re", "im"].map(String::from));
    let mut table = CsvTable::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    let mut max_abs: f64 = 0.0;
    for &t in &times {
        let values = match method {
            CurveMethod::Direct => parallel::evolve_along_curve(&prop, curve, &points, t)?,
            m => evolve_along_curve_with(&field, symbol, curve, &points, t, m)?,
        };
        for (x, v) in points.chunks(n).zip(&values) {
            let mut row: Vec<Cell> = x.iter().map(|&c| c.into()).collect();
            row.extend([Cell::from(t), v.re.into(), v.im.into()]);
            table.push(row);
            max_abs = max_abs.max(v.norm());
        }
    }
    let result = obj(vec![
        ("points", json!(points.len() / n)),
        ("times", json!(times.len())),
        ("method", json!(method.name())),
        ("max_abs", json_number("max_abs", max_abs)?),
    ]);
    Ok((vec![result], vec![("propagate.csv".into(), table)]))
}

/// The rate the theory predicts for this symbol, curve and data.
fn prediction(cfg: &ExperimentConfig, symbol: &Symbol, curve: &Curve) -> Result<f64, RunError> {
    let kind = match symbol.kind() {
        SymbolKind::Polynomial2d { m1, m2, .. } => RateKind::Polynomial2d { m1: *m1, m2: *m2 },
        _ => RateKind::General {
            alpha: curve.alpha(),
            m: symbol.growth_order(),
        },
    };
    let delta = match (cfg.params.delta, &cfg.data) {
        (Some(d), _) => Some(d),
        (None, DataConfig::Graded { delta, .. }) => Some(*delta),
        // smooth data: the δ → m limit
        (None, DataConfig::Gaussian { .. } | DataConfig::BandLimited { .. }) => None,
        (None, _) => return Err(param_err("params.delta", "needed to predict the rate for this data")),
    };
    Ok(match (delta, kind) {
        (Some(d), k) => predicted_rate(k, d)?,
        (None, RateKind::General { alpha, .. }) => alpha,
        (None, RateKind::Polynomial2d { m1, .. }) => 1.0 / (m1 as f64 - 1.0),
    })
}

fn rate_fit(cfg: &ExperimentConfig, symbol: &Symbol, curve: &Curve, base: &Path) -> Result<Produced, RunError> {
    let n = symbol.dim();
    let field = build_field(cfg, cfg.grid(n)?, base)?;
    let points = cfg.base_points(n, 64)?;
    let [j0, j1] = cfg.params.dyadic.unwrap_or([3, 12]);
    let times = dyadic_times(j0, j1);
    let prop = Propagator::new(&field, symbol)?;
    let ec = parallel::error_curve(&prop, curve, &points, &times)?;
    let window = match cfg.params.window {
        Some([a, b]) => {
            if a < j0 || b > j1 || a > b {
                return Err(param_err("params.window", format!("must lie within dyadic range [{j0}, {j1}]")));
            }
            (a - j0) as usize..(b - j0 + 1) as usize
        }
        None => select_window(&ec, None),
    };
    let predicted = prediction(cfg, symbol, curve)?;
    let fit = fit_rate(&ec, window)?;
    let mut table = CsvTable::new(&["t", "E"]);
    for (t, e) in ec.times().iter().zip(ec.values()) {
        table.push(vec![(*t).into(), (*e).into()]);
    }
    table.footer("theta", fit.theta);
    table.footer("residual", fit.residual);
    table.footer("predicted", predicted);
    let result = obj(vec![
        ("theta", json_number("theta", fit.theta)?),
        ("residual", json_number("residual", fit.residual)?),
        ("predicted", json_number("predicted", predicted)?),
        ("alpha", json_number("alpha", curve.alpha())?),
        ("window", json!([ec.times()[fit.window.start], ec.times()[fit.window.end - 1]])),
    ]);
    Ok((vec![result], vec![("rate_fit.csv".into(), table)]))
}

fn maximal(cfg: &ExperimentConfig, symbol: &Symbol, curve: &Curve) -> Result<Produced, RunError> {
    let n = symbol.dim();
    let grid = cfg.grid(n)?;
    let ball = cfg.ball(n)?;
    let defaults = SweepSpec::default();
    let spec = SweepSpec {
        p: cfg.params.p.unwrap_or(defaults.p),
        per_axis: cfg.params.per_axis.unwrap_or(if n == 1 { defaults.per_axis } else { 24 }),
        t_count: cfg.params.t_count.unwrap_or(defaults.t_count),
    };
    let lambdas = cfg.params.lambdas.clone().unwrap_or_else(|| vec![8.0, 16.0, 32.0]);
    let seeds = cfg.params.seeds.clone().unwrap_or_else(|| (0..8).collect());
    let sweep = parallel::exponent_sweep(&grid, symbol, curve, &ball, &spec, &lambdas, &seeds)?;
    let mut table = CsvTable::new(&["lambda", "seed", "ratio"]);
    for p in &sweep.points {
        table.push(vec![p.lambda.into(), p.seed.into(), p.ratio.into()]);
    }
    table.footer("slope", sweep.slope);
    let result = obj(vec![
        ("slope", json_number("slope", sweep.slope)?),
        ("p", json_number("p", spec.p)?),
        ("lambdas", json!(lambdas.len())),
        ("seeds", json!(seeds.len())),
    ]);
    Ok((vec![result], vec![("maximal.csv".into(), table)]))
}

fn lower_bound(cfg: &ExperimentConfig, symbol: &Symbol, curve: &Curve, base: &Path) -> Result<Produced, RunError> {
    let n = symbol.dim();
    let field = build_field(cfg, cfg.grid(n)?, base)?;
    let points = cfg.base_points(n, 32)?;
    let [j0, j1] = cfg.params.dyadic.unwrap_or([8, 14]);
    let lb = lower_bound_check(&field, symbol, curve.alpha(), &points, &dyadic_times(j0, j1))?;
    let mut table = CsvTable::new(&["t", "ratio", "floor"]);
    for (t, r) in lb.times.iter().zip(&lb.ratios) {
        table.push(vec![(*t).into(), (*r).into(), lb.floor.into()]);
    }
    let result = obj(vec![
        ("liminf_ratio", json_number("liminf_ratio", lb.liminf_ratio)?),
        ("floor", json_number("floor", lb.floor)?),
        ("passed", json!(lb.passed)),
    ]);
    Ok((vec![result], vec![("lower_bound.csv".into(), table)]))
}

fn decompose(cfg: &ExperimentConfig, symbol: &Symbol, base: &Path) -> Result<Produced, RunError> {
    let n = symbol.dim();
    let field = build_field(cfg, cfg.grid(n)?, base)?;
    let s = cfg.params.s.unwrap_or(1.0);
    let tiling = cfg.params.tiling.unwrap_or(TilingKind::Dyadic);
    let pieces: Vec<(u32, SpectralField)> = match tiling {
        TilingKind::Dyadic => dyadic_decompose(&field)?.into_iter().map(|p| (p.k, p.field)).collect(),
        TilingKind::Anisotropic => {
            let SymbolKind::Polynomial2d { m1, m2, .. } = symbol.kind() else {
                unreachable!("validated")
            };
            anisotropic_decompose(&field, *m1, *m2)?.into_iter().map(|p| (p.k, p.field)).collect()
        }
    };
    let mut table = CsvTable::new(&["k", "l2_energy", "hs_energy"]);
    let mut total = 0.0;
    for (k, f) in &pieces {
        let l2 = f.l2_norm().powi(2);
        total += l2;
        table.push(vec![(*k as u64).into(), l2.into(), f.sobolev_norm(s).powi(2).into()]);
    }
    let energy = field.l2_norm().powi(2);
    let ratio = if energy > 0.0 { total / energy } else { 0.0 };
    let result = obj(vec![
        ("tiling", json!(match tiling { TilingKind::Dyadic => "dyadic", TilingKind::Anisotropic => "anisotropic" })),
        ("pieces", json!(pieces.len())),
        ("energy_ratio", json_number("energy_ratio", ratio)?),
    ]);
    Ok((vec![result], vec![("decompose.csv".into(), table)]))
}

fn kernel_decay(cfg: &ExperimentConfig, symbol: &Symbol, curve: &Curve) -> Result<Produced, RunError> {
    let SymbolKind::Polynomial2d { m1, m2, sigma } = *symbol.kind() else {
        unreachable!("validated")
    };
    let lambda = cfg.params.lambda.unwrap_or(16.0);
    let k = match cfg.params.k {
        Some(k) => k,
        None => {
            let active = AnisotropicTiling::new(m1, m2, lambda)?.active_indices();
            *active.get(active.len() / 2).ok_or_else(|| param_err("params.k", "no active tile at this λ"))?
        }
    };
    let spec = KernelSpec::new(m1, m2, sigma, lambda, k, curve.clone())?;
    let origin = vec![0.0; 2];
    let point = |p: &Option<Vec<f64>>, path: &str| match p {
        Some(v) if v.len() != 2 => Err(param_err(path, "needs 2 coordinates")),
        Some(v) => Ok(v.clone()),
        None => Ok(origin.clone()),
    };
    let x = point(&cfg.params.x, "params.x")?;
    let y = point(&cfg.params.y, "params.y")?;
    let separations = cfg.params.separations.clone().unwrap_or_else(|| {
        let near = spec.near_zone();
        [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|f| f * near).collect()
    });
    let decay = parallel::kernel_decay(&spec, &x, &y, &separations)?;
    let mut table = CsvTable::new(&["separation", "abs_K"]);
    for (s, v) in decay.separations.iter().zip(&decay.abs_values) {
        table.push(vec![(*s).into(), (*v).into()]);
    }
    // an underflowed tail has slope −inf: `-inf` in the footer, null in JSON
    let slope = if decay.slope.is_finite() { json_number("fitted_slope", decay.slope)? } else { Value::Null };
    table.footer("fitted_slope", decay.slope);
    let result = obj(vec![
        ("fitted_slope", slope),
        ("k", json!(k)),
        ("lambda", json_number("lambda", lambda)?),
        ("underflow", json!(decay.underflow)),
        ("at_noise_floor", json!(decay.at_noise_floor)),
        ("resolved", json!(decay.resolved)),
    ]);
    Ok((vec![result], vec![("kernel_decay.csv".into(), table)]))
}
