#[allow(unused_imports)] // float math is a trait on bare-metal targets
use num_traits::Float as _;
use alloc::vec::Vec;

use crate::curve::{Ball, Curve};
use crate::decomp::{time_intervals, TimeTiling};
use crate::error::{invalid, Result};
use crate::field::SpectralField;
use crate::fit::fit_log_log;
use crate::grid::FrequencyGrid;
use crate::propagator::Propagator;
use crate::symbol::{Symbol, SymbolKind};
use crate::C64;

/// Fewest `λ` values accepted by [`exponent_sweep`].
pub const SWEEP_MIN_LAMBDAS: usize = 3;
/// Fewest seeds per `λ` accepted by [`exponent_sweep`].
pub const SWEEP_MIN_SEEDS: usize = 8;

const GRID_T_MIN: f64 = 1e-4;
const GRID_T_MAX: f64 = 0.999;
/// Bound on cached multiplier entries per time block.
const BLOCK_ENTRIES: usize = 1 << 22;

/// Discretized `‖sup_{t∈T} |e^{itP(D)}f(γ(·,t))|‖_{L^p(B)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalEstimate {
    pub p: f64,
    pub value: f64,
    pub t_points: usize,
    pub t_min: f64,
    pub t_max: f64,
    /// Largest ratio between consecutive grid times.
    pub t_ratio: f64,
    pub sample_points: usize,
    /// Measure of one spatial cell.
    pub cell: f64,
}

/// `count` log-spaced times in `[10⁻⁴, 0.999]`, merged with the interior
/// endpoints of `tiling` when given; sorted increasing, duplicates removed.
pub fn maximal_time_grid(count: usize, tiling: Option<&TimeTiling>) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(invalid!("time grid needs at least two log-spaced points"));
    }
    let (a, b) = (GRID_T_MIN.ln(), GRID_T_MAX.ln());
    let mut ts: Vec<f64> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect();
    if let Some(tl) = tiling {
        for (_, end) in tl.intervals() {
            if end > 0.0 && end < 1.0 {
                ts.push(end);
            }
        }
    }
    ts.sort_by(|x, y| x.total_cmp(y));
    ts.dedup();
    Ok(ts)
}

fn check_lp(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid!("need 1 <= p < ∞, got {p}"));
    }
    Ok(())
}

/// `sup_t |e^{itP(D)}f(γ(x,t))|` at each sample point.
fn pointwise_sup(prop: &Propagator, curve: &Curve, points: &[f64], times: &[f64]) -> Result<Vec<f64>> {
    let n = prop.field().dim();
    let npts = points.len() / n;
    let mut sup = alloc::vec![0.0f64; npts];
    if !curve.is_time_independent() {
        for &t in times {
            let v = prop.evolve_along_curve(curve, points, t)?;
            for (s, z) in sup.iter_mut().zip(&v) {
                *s = s.max(z.norm());
            }
        }
        return Ok(sup);
    }
    // γ(x,t) = γ(x): the spatial factor w f̂ e^{ix·ξ} is shared by all times
    let field = prop.field();
    let grid = field.grid();
    let nz: Vec<usize> = (0..grid.len())
        .filter(|&i| field.samples()[i] != C64::new(0.0, 0.0))
        .collect();
    if nz.is_empty() {
        return Ok(sup);
    }
    let coeff: Vec<C64> = nz.iter().map(|&i| field.samples()[i] * grid.weight(i)).collect();
    let xi: Vec<f64> = nz.iter().flat_map(|&i| grid.point(i)).collect();
    let phase: Vec<f64> = nz.iter().map(|&i| prop.symbol_samples()[i]).collect();
    let block = (BLOCK_ENTRIES / nz.len()).max(1);
    let mut y = alloc::vec![0.0; n];
    let mut spatial = alloc::vec![C64::new(0.0, 0.0); nz.len()];
    for chunk in times.chunks(block) {
        let mults: Vec<Vec<C64>> = chunk
            .iter()
            .map(|&t| phase.iter().map(|&p| C64::cis(t * p)).collect())
            .collect();
        for (j, x) in points.chunks(n).enumerate() {
            curve.position_into(x, chunk[0], &mut y);
            for (k, a) in spatial.iter_mut().enumerate() {
                let dot: f64 = y.iter().zip(&xi[k * n..(k + 1) * n]).map(|(p, q)| p * q).sum();
                *a = coeff[k] * C64::cis(dot);
            }
            for m in &mults {
                let v: C64 = spatial.iter().zip(m).map(|(a, b)| a * b).sum();
                sup[j] = sup[j].max(v.norm());
            }
        }
    }
    Ok(sup)
}

/// Maximal function over `times`, then the midpoint-rule `L^p` norm over a
/// `per_axis`-cell grid of `ball`.
pub fn maximal_lp(
    prop: &Propagator,
    curve: &Curve,
    ball: &Ball,
    p: f64,
    times: &[f64],
    per_axis: usize,
) -> Result<MaximalEstimate> {
    check_lp(p)?;
    if times.is_empty() {
        return Err(invalid!("time grid is empty"));
    }
    if times.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
        return Err(invalid!("grid times must lie in (0, 1)"));
    }
    let n = prop.field().dim();
    if curve.dim() != n || ball.dim() != n {
        return Err(invalid!("curve, ball and field dimensions differ"));
    }
    if per_axis < 2 {
        return Err(invalid!("need at least two cells per axis"));
    }
    let (points, cell) = ball.grid(per_axis);
    let sup = pointwise_sup(prop, curve, &points, times)?;
    let total: f64 = sup.iter().map(|s| cell * s.powf(p)).sum();
    let t_min = times.iter().cloned().fold(f64::INFINITY, f64::min);
    let t_max = times.iter().cloned().fold(0.0, f64::max);
    let mut sorted = times.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let t_ratio = sorted.windows(2).map(|w| w[1] / w[0]).fold(1.0, f64::max);
    Ok(MaximalEstimate {
        p,
        value: total.powf(1.0 / p),
        t_points: times.len(),
        t_min,
        t_max,
        t_ratio,
        sample_points: sup.len(),
        cell,
    })
}

/// `‖e^{itP(D)}f(γ(·,t))‖_{L^p(B)}` on the same spatial grid and with the
/// same arithmetic as [`maximal_lp`].
pub fn fixed_time_lp(prop: &Propagator, curve: &Curve, ball: &Ball, p: f64, t: f64, per_axis: usize) -> Result<f64> {
    Ok(maximal_lp(prop, curve, ball, p, &[t], per_axis)?.value)
}

/// Sampling parameters shared by every `(λ, seed)` of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub p: f64,
    pub per_axis: usize,
    /// Log-spaced times before the tiling endpoints are merged in.
    pub t_count: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            p: 2.0,
            per_axis: 64,
            t_count: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub lambda: f64,
    pub seed: u64,
    /// Maximal norm over spectral `L²` norm.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub points: Vec<SweepPoint>,
    pub slope: f64,
}

/// Degree used for the time tiling `λ^{1−m₁}` of a symbol, if it has one.
fn tiling_order(symbol: &Symbol) -> Option<u32> {
    match symbol.kind() {
        SymbolKind::Polynomial2d { m1, .. } => Some(*m1),
        SymbolKind::Fractional { .. } => None,
        _ => {
            let m = symbol.growth_order();
            (m >= 2.0).then_some(m as u32)
        }
    }
}

/// One ensemble member: the maximal ratio for a unit band-limited field.
#[allow(clippy::too_many_arguments)]
pub fn sweep_ratio(
    grid: &FrequencyGrid,
    symbol: &Symbol,
    curve: &Curve,
    ball: &Ball,
    spec: &SweepSpec,
    lambda: f64,
    seed: u64,
) -> Result<SweepPoint> {
    let f = SpectralField::band_limited_random(grid.clone(), lambda, seed)?;
    let prop = Propagator::new(&f, symbol)?;
    let tiling = match tiling_order(symbol) {
        Some(m1) => Some(time_intervals(lambda, m1)?),
        None => None,
    };
    let times = maximal_time_grid(spec.t_count, tiling.as_ref())?;
    let est = maximal_lp(&prop, curve, ball, spec.p, &times, spec.per_axis)?;
    Ok(SweepPoint {
        lambda,
        seed,
        ratio: est.value / f.l2_norm(),
    })
}

/// Slope of `log(mean ratio)` against `log λ`, grouping points by `λ`.
pub fn sweep_slope(points: &[SweepPoint]) -> Result<f64> {
    let mut lambdas: Vec<f64> = points.iter().map(|p| p.lambda).collect();
    lambdas.sort_by(|a, b| a.total_cmp(b));
    lambdas.dedup();
    let means: Vec<f64> = lambdas
        .iter()
        .map(|&l| {
            let rs: Vec<f64> = points.iter().filter(|p| p.lambda == l).map(|p| p.ratio).collect();
            rs.iter().sum::<f64>() / rs.len() as f64
        })
        .collect();
    Ok(fit_log_log(&lambdas, &means)?.slope)
}

/// Validates the `λ` list (dyadic, at least [`SWEEP_MIN_LAMBDAS`] distinct) and
/// the seed list (at least [`SWEEP_MIN_SEEDS`]).
pub fn check_sweep(lambdas: &[f64], seeds: &[u64]) -> Result<()> {
    let mut ls = lambdas.to_vec();
    ls.sort_by(|a, b| a.total_cmp(b));
    ls.dedup();
    if ls.len() < SWEEP_MIN_LAMBDAS {
        return Err(invalid!("need at least {SWEEP_MIN_LAMBDAS} distinct λ values"));
    }
    if let Some(l) = ls.iter().find(|l| !(**l >= 1.0) || l.log2().fract() != 0.0) {
        return Err(invalid!("λ = {l} is not a power of two"));
    }
    if seeds.len() < SWEEP_MIN_SEEDS {
        return Err(invalid!("need at least {SWEEP_MIN_SEEDS} seeds per λ"));
    }
    Ok(())
}

/// Mean maximal ratio per `λ` over `seeds`, and its log-log slope: an
/// empirical lower estimate of the growth exponent of the maximal operator
/// on band-limited data.
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
    let mut points = Vec::with_capacity(lambdas.len() * seeds.len());
    for &l in lambdas {
        for &s in seeds {
            points.push(sweep_ratio(grid, symbol, curve, ball, spec, l, s)?);
        }
    }
    let slope = sweep_slope(&points)?;
    Ok(Sweep { points, slope })
}
