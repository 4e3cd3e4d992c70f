//! Data-parallel drivers over the core primitives. Work is split into
//! fixed chunks and results are gathered in input order, and every
//! reduction runs serially afterwards, so outputs do not depend on the
//! number of threads.

use curveprop_core::decomp::{
    check_separations, kernel_decay_from_values, kernel_eval, KernelDecay, KernelSpec, KernelValue,
};
use curveprop_core::error::{Error, Result};
use curveprop_core::experiments::{
    check_sweep, error_values, rms, sweep_ratio, sweep_slope, ErrorCurve, Sweep, SweepSpec,
};
use curveprop_core::{Ball, Curve, FrequencyGrid, Propagator, Symbol, C64};
use rayon::prelude::*;

/// Points per parallel task.
const CHUNK: usize = 32;

/// A rayon pool with `threads` workers (`0` = rayon's default).
pub fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build thread pool: {e}")))
}

/// [`Propagator::evolve_points`] over chunks of points.
pub fn evolve_points(prop: &Propagator, points: &[f64], t: f64) -> Result<Vec<C64>> {
    let n = prop.field().dim();
    let chunks: Vec<Result<Vec<C64>>> = points
        .par_chunks(CHUNK * n)
        .map(|c| prop.evolve_points(c, t))
        .collect();
    let mut out = Vec::with_capacity(points.len() / n);
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// [`Propagator::evolve_along_curve`] over chunks of base points.
pub fn evolve_along_curve(prop: &Propagator, curve: &Curve, base: &[f64], t: f64) -> Result<Vec<C64>> {
    let n = prop.field().dim();
    let chunks: Vec<Result<Vec<C64>>> = base
        .par_chunks(CHUNK * n)
        .map(|c| prop.evolve_along_curve(curve, c, t))
        .collect();
    let mut out = Vec::with_capacity(base.len() / n);
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// Same values as `curveprop_core::experiments::error_curve`, with the
/// per-point errors computed in parallel.
pub fn error_curve(prop: &Propagator, curve: &Curve, base: &[f64], times: &[f64]) -> Result<ErrorCurve> {
    if base.is_empty() {
        return Err(Error::InvalidArgument("need at least one base point".into()));
    }
    let n = prop.field().dim();
    let per_time: Vec<Result<Vec<f64>>> = times
        .par_iter()
        .map(|&t| {
            let parts: Vec<Result<Vec<f64>>> = base
                .par_chunks(CHUNK * n)
                .map(|c| error_values(prop, curve, c, t))
                .collect();
            let mut all = Vec::with_capacity(base.len() / n);
            for p in parts {
                all.extend(p?);
            }
            Ok(all)
        })
        .collect();
    let mut values = Vec::with_capacity(times.len());
    for v in per_time {
        values.push(rms(&v?));
    }
    ErrorCurve::new(times.to_vec(), values)
}

/// `curveprop_core::experiments::exponent_sweep` with the `(λ, seed)`
/// ensemble evaluated in parallel.
pub fn exponent_sweep(
    grid: &FrequencyGrid,
    symbol: &Symbol,
    curve: &Curve,
    ball: &Ball,
    spec: &SweepSpec,
    lambdas: &[f64],
    seeds: &[u64],
) -> Result<Sweep> {
    check_sweep(lambdas, seeds)?;
    let jobs: Vec<(f64, u64)> = lambdas
        .iter()
        .flat_map(|&l| seeds.iter().map(move |&s| (l, s)))
        .collect();
    let points = jobs
        .par_iter()
        .map(|&(l, s)| sweep_ratio(grid, symbol, curve, ball, spec, l, s))
        .collect::<Result<Vec<_>>>()?;
    let slope = sweep_slope(&points)?;
    Ok(Sweep { points, slope })
}

/// Kernel values for many `(t, t′)` pairs.
pub fn kernel_values(spec: &KernelSpec, x: &[f64], y: &[f64], pairs: &[(f64, f64)]) -> Result<Vec<KernelValue>> {
    pairs
        .par_iter()
        .map(|&(t, tp)| kernel_eval(spec, x, y, t, tp))
        .collect()
}

/// `curveprop_core::decomp::kernel_decay_fit` with the separations
/// evaluated in parallel.
pub fn kernel_decay(spec: &KernelSpec, x: &[f64], y: &[f64], separations: &[f64]) -> Result<KernelDecay> {
    check_separations(spec, separations)?;
    let pairs: Vec<(f64, f64)> = separations.iter().map(|&s| (s, 0.0)).collect();
    let values = kernel_values(spec, x, y, &pairs)?;
    kernel_decay_from_values(separations, &values)
}
