//! Domination of `|e^{itP(D)}f(γ(x,t))|` by a weighted lattice sum of
//! `|e^{itP(D)}f(x + l/λ)|`, for `f̂` supported in `|ξ| ≤ λ` and
//! `0 < t < λ^{-1/α}`.
//!
//! With a cutoff `φ` equal to one on `[-2, 2]^n` and supported in
//! `(-π, π)^n`, `e^{id·η} φ(η) = Σ_l c_l(d) e^{il·η}`; substituting
//! `η = ξ/λ` and `d = λ(γ(x,t) − x)` expresses the value on the curve as
//! `Σ_l c_l(d) e^{itP(D)}f(x + l/λ)`.

#[allow(unused_imports)] // float math is a trait on bare-metal targets
use num_traits::Float as _;
use alloc::vec::Vec;

use super::Propagator;
use crate::curve::{Ball, Curve};
use crate::error::{invalid, Error, Result};
use crate::rng::CounterRng;

/// `φ₁ = 1` on `[-CUTOFF_PLATEAU, CUTOFF_PLATEAU]`.
pub const CUTOFF_PLATEAU: f64 = 2.0;
/// `supp φ₁ ⊂ (-CUTOFF_EDGE, CUTOFF_EDGE)`.
pub const CUTOFF_EDGE: f64 = 3.0;

const QUAD_POINTS: usize = 4096;

fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / u).exp();
    let b = (-1.0 / (1.0 - u)).exp();
    a / (a + b)
}

/// One-dimensional factor of the cutoff.
pub fn cutoff_1d(eta: f64) -> f64 {
    smooth_step((CUTOFF_EDGE - eta.abs()) / (CUTOFF_EDGE - CUTOFF_PLATEAU))
}

/// `φ(η) = Π φ₁(η_i)`.
pub fn cutoff(eta: &[f64]) -> f64 {
    eta.iter().map(|&e| cutoff_1d(e)).product()
}

/// Samples of `φ₁` on `[0, CUTOFF_EDGE]` with trapezoid weights.
struct CutoffTable {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl CutoffTable {
    fn new() -> Self {
        let h = CUTOFF_EDGE / QUAD_POINTS as f64;
        let mut nodes = Vec::with_capacity(QUAD_POINTS + 1);
        let mut weights = Vec::with_capacity(QUAD_POINTS + 1);
        for i in 0..=QUAD_POINTS {
            let eta = i as f64 * h;
            let w = if i == 0 || i == QUAD_POINTS { 0.5 } else { 1.0 };
            nodes.push(eta);
            weights.push(w * h * cutoff_1d(eta));
        }
        Self { nodes, weights }
    }

    /// `(1/π) ∫_0^π φ₁(η) cos(aη) dη`. The integrand extends evenly and
    /// smoothly through `η = 0`, so the trapezoid rule converges fast.
    fn coefficient(&self, a: f64) -> f64 {
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(eta, w)| w * (a * eta).cos())
            .sum();
        s / core::f64::consts::PI
    }
}

/// `c_l(d) = (2π)^{-n} ∫ φ(η) e^{i(d−l)·η} dη`, which is real and factorizes
/// over coordinates.
pub fn fourier_coefficient(d: &[f64], l: &[i64]) -> f64 {
    let table = CutoffTable::new();
    d.iter()
        .zip(l)
        .map(|(&di, &li)| table.coefficient(di - li as f64))
        .product()
}

/// Per-axis coefficient tables `c₁_l(d_i)` for `|l| ≤ search`.
fn coefficient_rows(table: &CutoffTable, d: &[f64], search: i64) -> Vec<Vec<f64>> {
    d.iter()
        .map(|&di| {
            (-search..=search)
                .map(|l| table.coefficient(di - l as f64))
                .collect()
        })
        .collect()
}

fn lattice_norm(l: &[i64]) -> f64 {
    l.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt()
}

/// Visits every `l ∈ [-r, r]^n`.
fn for_each_cube_point(dim: usize, r: i64, mut f: impl FnMut(&[i64])) {
    let side = (2 * r + 1) as usize;
    let total = side.pow(dim as u32);
    let mut l = alloc::vec![0i64; dim];
    for idx in 0..total {
        let mut rest = idx;
        for d in (0..dim).rev() {
            l[d] = (rest % side) as i64 - r;
            rest /= side;
        }
        f(&l);
    }
}

/// `t` values spread over `(0, λ^{-1/α})` (including the last tenth of the
/// window) paired with points of `ball`.
pub fn lattice_probes(ball: &Ball, alpha: f64, lambda: f64, count: usize, seed: u64) -> Vec<(Vec<f64>, f64)> {
    let n = ball.dim();
    let xs = ball.sample(count, seed);
    let t_max = lambda.powf(-1.0 / alpha);
    let mut stream = CounterRng::new(seed).stream(1);
    (0..count)
        .map(|j| {
            let frac = if j % 4 == 3 {
                0.9 + 0.1 * stream.next_f64()
            } else {
                stream.next_f64()
            };
            let t = (t_max * frac).max(t_max * 1e-6).min(t_max * (1.0 - 1e-9));
            (xs[j * n..(j + 1) * n].to_vec(), t)
        })
        .collect()
}

/// `C_n = 1.1 · max_probes max_{|l|∞ ≤ search} (1 + |l|)^{n+1} |c_l(d)|` with
/// `d = λ(γ(x,t) − x)`.
pub fn calibrate_lattice_constant(
    curve: &Curve,
    lambda: f64,
    probes: &[(Vec<f64>, f64)],
    search: i64,
) -> Result<f64> {
    if probes.is_empty() {
        return Err(invalid!("calibration needs at least one probe"));
    }
    if search < 1 {
        return Err(invalid!("calibration search radius must be at least 1"));
    }
    let n = curve.dim();
    let table = CutoffTable::new();
    let mut best: f64 = 0.0;
    for (x, t) in probes {
        if x.len() != n {
            return Err(invalid!("probe point has dimension {}, curve has {n}", x.len()));
        }
        let g = curve.position(x, *t);
        let d: Vec<f64> = g.iter().zip(x).map(|(a, b)| lambda * (a - b)).collect();
        let rows = coefficient_rows(&table, &d, search);
        for_each_cube_point(n, search, |l| {
            let c: f64 = l
                .iter()
                .enumerate()
                .map(|(i, &li)| rows[i][(li + search) as usize])
                .product();
            let w = (1.0 + lattice_norm(l)).powi(n as i32 + 1);
            best = best.max(w * c.abs());
        });
    }
    Ok(1.1 * best)
}

/// Lattice weights `C_n (1 + |l|)^{-(n+1)}`
/// for `|l|∞ ≤ L`, and the weight mass left out beyond `L`.
#[derive(Debug, Clone)]
pub struct LatticeWeights {
    dim: usize,
    truncation: i64,
    constant: f64,
    offsets: Vec<(Vec<i64>, f64)>,
    tail: f64,
}

impl LatticeWeights {
    pub fn new(dim: usize, truncation: i64, constant: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid!("lattice dimension must be positive"));
        }
        if truncation < 0 {
            return Err(invalid!("lattice truncation must be nonnegative"));
        }
        if !(constant > 0.0) || !constant.is_finite() {
            return Err(invalid!("lattice constant must be positive, got {constant}"));
        }
        let p = dim as i32 + 1;
        let mut offsets = Vec::new();
        for_each_cube_point(dim, truncation, |l| {
            offsets.push((l.to_vec(), constant / (1.0 + lattice_norm(l)).powi(p)));
        });
        Ok(Self {
            dim,
            truncation,
            constant,
            offsets,
            tail: constant * shell_tail(dim, truncation),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn offsets(&self) -> &[(Vec<i64>, f64)] {
        &self.offsets
    }

    /// `C_n Σ_{|l|∞ > L} (1 + |l|)^{-(n+1)}` (estimated).
    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Total weight kept, `C_n Σ_{|l|∞ ≤ L} (1 + |l|)^{-(n+1)}`.
    pub fn kept(&self) -> f64 {
        self.offsets.iter().map(|(_, w)| w).sum()
    }
}

/// `Σ_{|l|∞ > L} (1 + |l|)^{-(n+1)}`: shells up to radius `R` summed exactly,
/// the rest bounded by the shell count `(2r+1)^n − (2r−1)^n` times `(1+r)^{-(n+1)}`.
fn shell_tail(dim: usize, truncation: i64) -> f64 {
    const EXACT: i64 = 256;
    let p = dim as i32 + 1;
    let r_max = (truncation + EXACT).max(EXACT);
    let mut sum = 0.0;
    if dim <= 2 {
        for r in truncation + 1..=r_max {
            sum += exact_shell(dim, r, p);
        }
    } else {
        for r in truncation + 1..=r_max {
            sum += shell_count(dim, r) / (1.0 + r as f64).powi(p);
        }
    }
    // remainder ≈ ∫_R^∞ 2n (2r)^{n-1} r^{-(n+1)} dr
    sum + 2.0 * dim as f64 * 2f64.powi(dim as i32 - 1) / r_max as f64
}

fn shell_count(dim: usize, r: i64) -> f64 {
    let a = (2 * r + 1) as f64;
    let b = (2 * r - 1) as f64;
    a.powi(dim as i32) - b.powi(dim as i32)
}

fn exact_shell(dim: usize, r: i64, p: i32) -> f64 {
    let w = |l: &[i64]| 1.0 / (1.0 + lattice_norm(l)).powi(p);
    match dim {
        1 => 2.0 * w(&[r]),
        _ => {
            let mut s = 0.0;
            for j in -r..=r {
                s += 2.0 * w(&[r, j]);
            }
            for j in -(r - 1)..=(r - 1) {
                s += 2.0 * w(&[j, r]);
            }
            s
        }
    }
}

/// Outcome of one lattice comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeBound {
    /// `|e^{itP(D)}f(γ(x,t))|`.
    pub lhs: f64,
    /// `Σ_{|l|∞≤L} C_n (1+|l|)^{-(n+1)} |e^{itP(D)}f(x + l/λ)|`.
    pub rhs: f64,
    /// `rhs − lhs`.
    pub margin: f64,
    /// Weight mass left out beyond `L`: `C_n Σ_{|l|∞>L}(1+|l|)^{-(n+1)}`.
    pub truncation_tail: f64,
}

impl Propagator<'_> {
    /// Compares the value on the curve with the weighted lattice sum.
    /// Requires a declared support `λ` and `0 < t < λ^{-1/α}`.
    pub fn lattice_translate_bound(
        &self,
        curve: &Curve,
        x: &[f64],
        t: f64,
        weights: &LatticeWeights,
    ) -> Result<LatticeBound> {
        let n = self.field.dim();
        if curve.dim() != n || weights.dim() != n || x.len() != n {
            return Err(invalid!("dimension mismatch between field, curve, point and weights"));
        }
        let lambda = self.field.support().ok_or_else(|| {
            invalid!("lattice comparison needs a field with declared support")
        })?;
        let t_max = lambda.powf(-1.0 / curve.alpha());
        if !(t > 0.0 && t < t_max) {
            return Err(Error::PreconditionViolation(alloc::format!(
                "t = {t} outside (0, λ^(-1/α)) = (0, {t_max})"
            )));
        }
        let m = self.multiplier(t);
        let g = curve.position(x, t);
        let lhs = self.field.modulated_sum(&g, |i| m[i]).norm();
        let mut y = alloc::vec![0.0; n];
        let mut rhs = 0.0;
        for (l, w) in weights.offsets() {
            for i in 0..n {
                y[i] = x[i] + l[i] as f64 / lambda;
            }
            rhs += w * self.field.modulated_sum(&y, |i| m[i]).norm();
        }
        Ok(LatticeBound {
            lhs,
            rhs,
            margin: rhs - lhs,
            truncation_tail: weights.tail(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SpectralField;
    use crate::grid::FrequencyGrid;
    use crate::symbol::Symbol;

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff_1d(0.0), 1.0);
        assert_eq!(cutoff_1d(2.0), 1.0);
        assert_eq!(cutoff_1d(-1.5), 1.0);
        assert_eq!(cutoff_1d(3.0), 0.0);
        assert!(cutoff_1d(2.5) > 0.0 && cutoff_1d(2.5) < 1.0);
        assert!((cutoff_1d(2.5) - 0.5).abs() < 1e-15);
        assert_eq!(cutoff(&[1.0, 3.5]), 0.0);
    }

    #[test]
    fn coefficients_reproduce_cutoff() {
        // Σ_l c_l(d) e^{ilη} = e^{idη} φ(η) for η ∈ (-π, π)
        let d = 0.37;
        for eta in [0.0, 1.0, 2.6, -2.9] {
            let mut re = 0.0;
            let mut im = 0.0;
            for l in -200i64..=200 {
                let c = fourier_coefficient(&[d], &[l]);
                re += c * (l as f64 * eta).cos();
                im += c * (l as f64 * eta).sin();
            }
            let phi = cutoff_1d(eta);
            assert!((re - phi * (d * eta).cos()).abs() < 1e-6, "{eta}");
            assert!((im - phi * (d * eta).sin()).abs() < 1e-6, "{eta}");
        }
    }

    #[test]
    fn shell_tail_one_dim() {
        // 2 Σ_{l>L} (1+l)^{-2} = 2 (π²/6 − Σ_{j=1}^{L+1} j^{-2})
        let l = 8;
        let partial: f64 = (1..=l + 1).map(|j| 1.0 / (j * j) as f64).sum();
        let want = 2.0 * (core::f64::consts::PI.powi(2) / 6.0 - partial);
        let got = shell_tail(1, l);
        assert!((got - want).abs() < 0.01 * want, "{got} {want}");
    }

    #[test]
    fn bound_holds_for_vertical_curve() {
        let lambda = 8.0;
        let g = FrequencyGrid::default_for(1).unwrap();
        let f = SpectralField::band_limited_random(g, lambda, 3).unwrap();
        let p = Symbol::elliptic(1).unwrap();
        let prop = Propagator::new(&f, &p).unwrap();
        let curve = Curve::vertical(1).unwrap();
        let ball = Ball::unit(1);
        let probes = lattice_probes(&ball, 1.0, lambda, 16, 5);
        let c = calibrate_lattice_constant(&curve, lambda, &probes, 16).unwrap();
        let w = LatticeWeights::new(1, 8, c).unwrap();
        for (x, t) in &probes {
            let b = prop.lattice_translate_bound(&curve, x, *t, &w).unwrap();
            assert!(b.margin >= 0.0, "{b:?}");
        }
        let err = prop
            .lattice_translate_bound(&curve, &[0.0], 1.0 / lambda, &w)
            .unwrap_err();
        assert_eq!(err.name(), "precondition-violation");
    }
}
