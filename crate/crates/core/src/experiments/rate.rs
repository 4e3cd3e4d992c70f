#[allow(unused_imports)] // float math is a trait on bare-metal targets
use num_traits::Float as _;
use alloc::vec::Vec;
use core::ops::Range;

use crate::curve::Curve;
use crate::error::{invalid, Error, Result};
use crate::fit::fit_log_log;
use crate::propagator::Propagator;

/// Values at or below this are refused by [`fit_rate`].
pub const FIT_NOISE_FLOOR: f64 = 1e-14;
/// Values below this are dropped by [`select_window`].
pub const WINDOW_NOISE_FLOOR: f64 = 1e-12;

/// `2^{-j}` for `j = first … last`, decreasing.
pub fn dyadic_times(first: u32, last: u32) -> Vec<f64> {
    (first..=last).map(|j| 0.5f64.powi(j as i32)).collect()
}

/// `(Σ v²/len)^{1/2}`, summed in order.
pub fn rms(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
}

/// `E(t)` sampled at strictly decreasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl ErrorCurve {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(invalid!("{} times but {} values", times.len(), values.len()));
        }
        if times.is_empty() {
            return Err(invalid!("error curve needs at least one time"));
        }
        if times.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
            return Err(invalid!("times must lie in (0, 1]"));
        }
        if times.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(invalid!("times must be strictly decreasing"));
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(invalid!("values must be finite and nonnegative"));
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `|e^{itP(D)}f(γ(x_j,t)) − f(x_j)|` for each base point.
pub fn error_values(prop: &Propagator, curve: &Curve, base: &[f64], t: f64) -> Result<Vec<f64>> {
    let moved = prop.evolve_along_curve(curve, base, t)?;
    let start = prop.evolve_points(base, 0.0)?;
    Ok(moved.iter().zip(&start).map(|(a, b)| (a - b).norm()).collect())
}

/// RMS over base points of `|e^{itP(D)}f(γ(x,t)) − f(x)|` at each time.
pub fn error_curve(prop: &Propagator, curve: &Curve, base: &[f64], times: &[f64]) -> Result<ErrorCurve> {
    if base.is_empty() {
        return Err(invalid!("need at least one base point"));
    }
    let start = prop.evolve_points(base, 0.0)?;
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let moved = prop.evolve_along_curve(curve, base, t)?;
        let errs: Vec<f64> = moved.iter().zip(&start).map(|(a, b)| (a - b).norm()).collect();
        values.push(rms(&errs));
    }
    ErrorCurve::new(times.to_vec(), values)
}

/// Slope of `log E` against `log t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub theta: f64,
    /// RMS misfit in log space.
    pub residual: f64,
    pub window: Range<usize>,
}

pub fn fit_rate(ec: &ErrorCurve, window: Range<usize>) -> Result<RateFit> {
    if window.end > ec.len() || window.len() < 4 {
        return Err(invalid!(
            "fit window {window:?} must hold at least 4 of the {} points",
            ec.len()
        ));
    }
    let ts = &ec.times[window.clone()];
    let es = &ec.values[window.clone()];
    if let Some((t, v)) = ts.iter().zip(es).find(|(_, v)| **v <= FIT_NOISE_FLOOR) {
        return Err(Error::NoiseFloor { t: *t, value: *v });
    }
    let fit = fit_log_log(ts, es)?;
    Ok(RateFit {
        theta: fit.slope,
        residual: fit.rms_residual,
        window,
    })
}

/// Longest run of consecutive points with `E ≥ 10⁻¹²` and, when `regime` is
/// given as `λ^{−m/α}`, `t` below it.
pub fn select_window(ec: &ErrorCurve, regime: Option<f64>) -> Range<usize> {
    let ok = |i: usize| {
        ec.values[i] >= WINDOW_NOISE_FLOOR && regime.is_none_or(|r| ec.times[i] < r)
    };
    let mut best = 0..0;
    let mut start = None;
    for i in 0..=ec.len() {
        if i < ec.len() && ok(i) {
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            if i - s > best.len() {
                best = s..i;
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateKind {
    /// Symbol of order `m` along an `α`-Hölder curve: `αδ/m`.
    General { alpha: f64, m: f64 },
    /// `ξ₁^{m₁} + σξ₂^{m₂}`: `δ/((m₁−1)m₂)`.
    Polynomial2d { m1: u32, m2: u32 },
}

pub fn predicted_rate(kind: RateKind, delta: f64) -> Result<f64> {
    match kind {
        RateKind::General { alpha, m } => {
            if !(m > 0.0) || !(alpha > 0.0 && alpha <= 1.0) {
                return Err(invalid!("need m > 0 and α in (0, 1]"));
            }
            if !(0.0..m).contains(&delta) {
                return Err(invalid!("δ = {delta} outside [0, m) = [0, {m})"));
            }
            Ok(alpha * delta / m)
        }
        RateKind::Polynomial2d { m1, m2 } => {
            if !(2 <= m1 && m1 <= m2) {
                return Err(invalid!("need 2 <= m₁ <= m₂"));
            }
            if !(0.0..m2 as f64).contains(&delta) {
                return Err(invalid!("δ = {delta} outside [0, m₂) = [0, {m2})"));
            }
            Ok(delta / ((m1 - 1) as f64 * m2 as f64))
        }
    }
}
