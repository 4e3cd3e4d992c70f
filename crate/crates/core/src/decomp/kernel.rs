#[allow(unused_imports)] // float math is a trait on bare-metal targets
use num_traits::Float as _;
use alloc::vec::Vec;

use super::bump::annular_bump;
use crate::curve::Curve;
use crate::error::{invalid, Error, Result};
use crate::fit::fit_log_log;
use crate::C64;

/// Coarsest kernel grid (points per axis).
const KERNEL_BASE_POINTS: usize = 256;
/// Finest kernel grid; beyond this a value is reported as under-resolved.
pub const KERNEL_MAX_POINTS: usize = 4096;
/// `|K|` below this fraction of `∫Ψ²` is indistinguishable from rounding.
pub const KERNEL_NOISE_FLOOR: f64 = 1e-11;
/// `|K|` below this counts as underflow.
pub const KERNEL_UNDERFLOW: f64 = 1e-300;
/// Slope reported when every kernel value underflows.
pub const KERNEL_UNDERFLOW_SLOPE: f64 = f64::NEG_INFINITY;

/// Parameters of `K(x,y,t,t′) = ∫ e^{i[γ(x,t)−γ(y,t′)]·ξ + i(t−t′)P(ξ)} Ψ²(ξ) dξ`
/// with `P = ξ₁^{m₁} + σξ₂^{m₂}` and
/// `Ψ(ξ) = ψ(ξ₁/2^{m₂k/m₁}, ξ₂/2^k) ψ(ξ/λ)`, `ψ` the annular bump.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    m1: u32,
    m2: u32,
    sigma: i8,
    lambda: f64,
    k: u32,
    curve: Curve,
}

impl KernelSpec {
    pub fn new(m1: u32, m2: u32, sigma: i8, lambda: f64, k: u32, curve: Curve) -> Result<Self> {
        crate::symbol::Symbol::polynomial2d(m1, m2, sigma)?;
        if !(lambda >= 1.0) || !lambda.is_finite() {
            return Err(invalid!("λ must be >= 1, got {lambda}"));
        }
        if curve.dim() != 2 {
            return Err(Error::UnsupportedDimension(curve.dim()));
        }
        Ok(Self {
            m1,
            m2,
            sigma,
            lambda,
            k,
            curve,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn m1(&self) -> u32 {
        self.m1
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    /// `Ψ(ξ)`.
    pub fn cutoff(&self, xi: &[f64]) -> f64 {
        let a = 2f64.powf(self.m2 as f64 * self.k as f64 / self.m1 as f64);
        let b = 2f64.powi(self.k as i32);
        let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        let outer = annular_bump(r / self.lambda);
        if outer == 0.0 {
            return 0.0;
        }
        let u = xi[0] / a;
        let v = xi[1] / b;
        outer * annular_bump((u * u + v * v).sqrt())
    }

    /// Smallest separation allowed for decay fits, `100 λ^{1−m₁}`.
    pub fn near_zone(&self) -> f64 {
        100.0 * self.lambda.powi(1 - self.m1 as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: C64,
    /// `∫Ψ²` on the same grid; an upper bound for `|K|`.
    pub mass: f64,
    pub points_per_axis: usize,
    /// False when the phase needed a grid finer than [`KERNEL_MAX_POINTS`].
    pub resolved: bool,
    /// True when `Ψ` vanishes on the grid; `value` is then zero.
    pub empty_support: bool,
}

/// Quadrature of the kernel on `[-2λ, 2λ]²`, refined by doubling until the
/// phase changes by at most `π/4` across a cell.
pub fn kernel_eval(spec: &KernelSpec, x: &[f64], y: &[f64], t: f64, t_prime: f64) -> Result<KernelValue> {
    if x.len() != 2 || y.len() != 2 {
        return Err(invalid!("kernel points must lie in ℝ²"));
    }
    if !(t >= 0.0 && t_prime >= 0.0) || !t.is_finite() || !t_prime.is_finite() {
        return Err(invalid!("kernel times must be finite and nonnegative"));
    }
    let gx = spec.curve.position(x, t);
    let gy = spec.curve.position(y, t_prime);
    let delta = [gx[0] - gy[0], gx[1] - gy[1]];
    let tau = t - t_prime;
    let half = 2.0 * spec.lambda;

    let grad = |d: f64, m: u32| d.abs() + tau.abs() * m as f64 * half.powi(m as i32 - 1);
    let g = grad(delta[0], spec.m1).max(grad(delta[1], spec.m2));
    let needed = 2.0 * half * 4.0 * g / core::f64::consts::PI + 1.0;
    let mut npts = KERNEL_BASE_POINTS;
    while (npts as f64) < needed && npts < KERNEL_MAX_POINTS {
        npts *= 2;
    }
    let resolved = npts as f64 >= needed;

    // even N: nodes symmetric about 0 with none at 0
    let h = 2.0 * half / (npts - 1) as f64;
    let nodes: Vec<f64> = (0..npts / 2).map(|i| half - i as f64 * h).collect();
    let sigma = spec.sigma as f64;
    let pair = |xi: f64, d: f64, m: u32, c: f64| {
        let even = tau * c * xi.powi(m as i32);
        C64::cis(d * xi + even) + C64::cis(-d * xi + even * if m.is_multiple_of(2) { 1.0 } else { -1.0 })
    };
    let a: Vec<C64> = nodes.iter().map(|&s| pair(s, delta[0], spec.m1, 1.0)).collect();
    let b: Vec<C64> = nodes.iter().map(|&s| pair(s, delta[1], spec.m2, sigma)).collect();

    let mut value = C64::new(0.0, 0.0);
    let mut mass = 0.0;
    for (i, &u) in nodes.iter().enumerate() {
        let mut row = C64::new(0.0, 0.0);
        let mut row_mass = 0.0;
        for (j, &v) in nodes.iter().enumerate() {
            let psi = spec.cutoff(&[u, v]);
            if psi != 0.0 {
                let w = psi * psi;
                row += b[j] * w;
                row_mass += w;
            }
        }
        value += a[i] * row;
        mass += 4.0 * row_mass;
    }
    let cell = h * h;
    Ok(KernelValue {
        value: value * cell,
        mass: mass * cell,
        points_per_axis: npts,
        resolved,
        empty_support: mass == 0.0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelDecay {
    pub separations: Vec<f64>,
    pub abs_values: Vec<f64>,
    /// Least-squares slope of `log|K|` against `log|t − t′|`.
    pub slope: f64,
    /// Every value fell below [`KERNEL_UNDERFLOW`]; `slope` is the sentinel.
    pub underflow: bool,
    /// Some value is below `KERNEL_NOISE_FLOOR · ∫Ψ²`, so its size reflects
    /// rounding rather than the integral.
    pub at_noise_floor: bool,
    pub resolved: bool,
}

/// Checks that separations avoid the near zone `100 λ^{1−m₁}` and span at
/// least three octaves.
pub fn check_separations(spec: &KernelSpec, separations: &[f64]) -> Result<()> {
    if separations.len() < 2 {
        return Err(invalid!("need at least two separations"));
    }
    let near = spec.near_zone();
    if let Some(s) = separations.iter().find(|&&s| !(s >= near) || !s.is_finite()) {
        return Err(Error::PreconditionViolation(alloc::format!(
            "separation {s} lies inside the near zone 100 λ^(1−m₁) = {near}"
        )));
    }
    let lo = separations.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = separations.iter().cloned().fold(0.0, f64::max);
    if hi < 8.0 * lo {
        return Err(invalid!("separations must span at least three octaves"));
    }
    Ok(())
}

/// Fits the decay exponent from kernel values `K(x, y, s, 0)` already
/// evaluated at each separation `s`.
pub fn kernel_decay_from_values(separations: &[f64], values: &[KernelValue]) -> Result<KernelDecay> {
    if separations.len() != values.len() {
        return Err(invalid!("one kernel value per separation required"));
    }
    let abs_values: Vec<f64> = values.iter().map(|v| v.value.norm()).collect();
    let at_noise_floor = values
        .iter()
        .any(|v| v.value.norm() <= KERNEL_NOISE_FLOOR * v.mass);
    let resolved = values.iter().all(|v| v.resolved);
    let (xs, ys): (Vec<f64>, Vec<f64>) = separations
        .iter()
        .zip(&abs_values)
        .filter(|(_, &a)| a >= KERNEL_UNDERFLOW)
        .map(|(s, a)| (*s, *a))
        .unzip();
    let (slope, underflow) = if xs.len() < 2 {
        (KERNEL_UNDERFLOW_SLOPE, true)
    } else {
        (fit_log_log(&xs, &ys)?.slope, false)
    };
    Ok(KernelDecay {
        separations: separations.to_vec(),
        abs_values,
        slope,
        underflow,
        at_noise_floor,
        resolved,
    })
}

/// Evaluates `|K(x, y, s, 0)|` for each separation `s` and fits the decay
/// exponent. Separations must be at least `100 λ^{1−m₁}` and span three octaves.
pub fn kernel_decay_fit(spec: &KernelSpec, x: &[f64], y: &[f64], separations: &[f64]) -> Result<KernelDecay> {
    check_separations(spec, separations)?;
    let values = separations
        .iter()
        .map(|&s| kernel_eval(spec, x, y, s, 0.0))
        .collect::<Result<Vec<_>>>()?;
    kernel_decay_from_values(separations, &values)
}
