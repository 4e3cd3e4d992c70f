#[allow(unused_imports)] // float math is a trait on bare-metal targets
use num_traits::Float as _;
use alloc::vec::Vec;

use super::rate::{error_curve, rms};
use crate::curve::Curve;
use crate::error::{invalid, Result};
use crate::field::SpectralField;
use crate::propagator::Propagator;
use crate::symbol::Symbol;

/// The check passes when `liminf_ratio ≥ LOWER_BOUND_FACTOR · floor`.
pub const LOWER_BOUND_FACTOR: f64 = 0.9;

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBound {
    pub times: Vec<f64>,
    /// RMS error over the samples divided by `t^α`, per time.
    pub ratios: Vec<f64>,
    /// Minimum of `ratios`.
    pub liminf_ratio: f64,
    /// `½ · RMS_x |∫ e^{ix·ξ} ξ₁ f̂(ξ) dξ|`.
    pub floor: f64,
    pub passed: bool,
}

/// For the shift `γ(x,t) = x − e₁t^α`, compares `E(t)/t^α` at small dyadic
/// `times` with half the size of `∂₁f`, which it must approach from above.
pub fn lower_bound_check(
    field: &SpectralField,
    symbol: &Symbol,
    alpha: f64,
    x_samples: &[f64],
    times: &[f64],
) -> Result<LowerBound> {
    if field.is_zero() || !(field.l2_norm() > 1e-300) {
        return Err(invalid!("lower-bound check needs a nonzero field"));
    }
    let n = field.dim();
    let curve = Curve::shift_e1(n, alpha)?;
    let prop = Propagator::new(field, symbol)?;
    let ec = error_curve(&prop, &curve, x_samples, times)?;
    let ratios: Vec<f64> = ec
        .times()
        .iter()
        .zip(ec.values())
        .map(|(t, e)| e / t.powf(alpha))
        .collect();
    let liminf_ratio = ratios.iter().cloned().fold(f64::INFINITY, f64::min);

    let grid = field.grid();
    let xi1: Vec<f64> = (0..grid.len()).map(|i| grid.point(i)[0]).collect();
    let derivs: Vec<f64> = x_samples
        .chunks(n)
        .map(|x| field.modulated_sum(x, |i| xi1[i].into()).norm())
        .collect();
    let floor = 0.5 * rms(&derivs);
    Ok(LowerBound {
        times: ec.times().to_vec(),
        ratios,
        liminf_ratio,
        floor,
        passed: floor > 0.0 && liminf_ratio >= LOWER_BOUND_FACTOR * floor,
    })
}
