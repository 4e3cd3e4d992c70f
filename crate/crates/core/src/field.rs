//! Functions represented by samples of `f̂` on a [`FrequencyGrid`].

#[allow(unused_imports)] // float math is a trait on bare-metal targets
use num_traits::Float as _;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::grid::FrequencyGrid;
use crate::rng::CounterRng;
use crate::C64;

/// Relative threshold below which samples outside a declared annulus count as zero.
pub const SUPPORT_TOLERANCE: f64 = 1e-14;

/// Exponent offset `ε` of [`SpectralField::sobolev_profile`].
pub const PROFILE_EPSILON: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: FrequencyGrid,
    fhat: Vec<C64>,
    /// `λ` when `f̂` is supported in `λ/2 ≤ |ξ| ≤ 2λ`.
    support: Option<f64>,
}

/// `λ/2 ≤ |ξ| ≤ 2λ`.
pub fn in_annulus(xi: &[f64], lambda: f64) -> bool {
    let r = crate::grid::norm(xi);
    r >= 0.5 * lambda && r <= 2.0 * lambda
}

impl SpectralField {
    pub fn new(grid: FrequencyGrid, fhat: Vec<C64>, support: Option<f64>) -> Result<Self> {
        if fhat.len() != grid.len() {
            return Err(invalid!(
                "{} samples for a grid of {} points",
                fhat.len(),
                grid.len()
            ));
        }
        if fhat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid!("field samples must be finite"));
        }
        if let Some(lambda) = support {
            if !(lambda > 0.0) || !lambda.is_finite() {
                return Err(invalid!("support scale must be positive, got {lambda}"));
            }
            let peak = fhat.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let mut xi = alloc::vec![0.0; grid.dim()];
            for (idx, z) in fhat.iter().enumerate() {
                grid.point_into(idx, &mut xi);
                if !in_annulus(&xi, lambda) && z.norm() > SUPPORT_TOLERANCE * peak {
                    return Err(invalid!(
                        "sample at {xi:?} lies outside the declared annulus λ = {lambda}"
                    ));
                }
            }
        }
        Ok(Self {
            grid,
            fhat,
            support,
        })
    }

    pub fn zeros(grid: FrequencyGrid) -> Self {
        let fhat = alloc::vec![C64::new(0.0, 0.0); grid.len()];
        Self {
            grid,
            fhat,
            support: None,
        }
    }

    /// Builds `f̂(ξ) = g(ξ)` sample by sample.
    pub fn from_fn(grid: FrequencyGrid, mut g: impl FnMut(&[f64]) -> C64) -> Self {
        let mut fhat = Vec::with_capacity(grid.len());
        let mut xi = alloc::vec![0.0; grid.dim()];
        for idx in 0..grid.len() {
            grid.point_into(idx, &mut xi);
            fhat.push(g(&xi));
        }
        Self {
            grid,
            fhat,
            support: None,
        }
    }

    /// `f̂(ξ) = exp(−|ξ|²/w²)`.
    pub fn gaussian(grid: FrequencyGrid, width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(invalid!("Gaussian width must be positive, got {width}"));
        }
        let w2 = width * width;
        Ok(Self::from_fn(grid, |xi| {
            let r2: f64 = xi.iter().map(|v| v * v).sum();
            C64::new((-r2 / w2).exp(), 0.0)
        }))
    }

    /// One nonzero sample `value` at flat index `idx`.
    pub fn spike(grid: FrequencyGrid, idx: usize, value: C64) -> Result<Self> {
        if idx >= grid.len() {
            return Err(invalid!("spike index {idx} out of range"));
        }
        let mut f = Self::zeros(grid);
        f.fhat[idx] = value;
        Ok(f)
    }

    /// Pseudo-random complex samples with real and imaginary parts uniform in
    /// `[-1, 1)` on the annulus `λ/2 ≤ |ξ| ≤ 2λ`, zero elsewhere, scaled to
    /// unit spectral `L²` norm.
    pub fn band_limited_random(grid: FrequencyGrid, lambda: f64, seed: u64) -> Result<Self> {
        Self::band_limited_random_stream(grid, lambda, seed, 0)
    }

    /// As [`band_limited_random`](Self::band_limited_random), drawing from an
    /// explicit stream of the seed.
    pub fn band_limited_random_stream(
        grid: FrequencyGrid,
        lambda: f64,
        seed: u64,
        stream: u64,
    ) -> Result<Self> {
        if !(lambda >= 1.0) {
            return Err(invalid!("band scale λ must be >= 1, got {lambda}"));
        }
        if 2.0 * lambda > grid.half_width() {
            return Err(invalid!(
                "annulus up to 2λ = {} exceeds the grid half-width {}",
                2.0 * lambda,
                grid.half_width()
            ));
        }
        let mut s = CounterRng::new(seed).stream(stream);
        let mut pair = [0.0; 2];
        let mut idx = 0u64;
        let mut f = Self::from_fn(grid, |xi| {
            let z = if in_annulus(xi, lambda) {
                s.block_at(idx, &mut pair);
                C64::new(2.0 * pair[0] - 1.0, 2.0 * pair[1] - 1.0)
            } else {
                C64::new(0.0, 0.0)
            };
            idx += 1;
            z
        });
        let norm = f.l2_norm();
        if norm == 0.0 {
            return Err(invalid!("annulus at λ = {lambda} contains no grid points"));
        }
        f.scale(1.0 / norm);
        f.support = Some(lambda);
        Ok(f)
    }

    /// `|f̂(ξ)| = (1+|ξ|²)^{−(s+n/2+ε)/2}` with pseudo-random phases, so the
    /// field sits just inside `H^s`.
    pub fn sobolev_profile(grid: FrequencyGrid, s: f64, seed: u64) -> Result<Self> {
        if !s.is_finite() {
            return Err(invalid!("regularity must be finite"));
        }
        let exponent = -(s + 0.5 * grid.dim() as f64 + PROFILE_EPSILON) / 2.0;
        let mut stream = CounterRng::new(seed).stream(0);
        let mut u = [0.0];
        let mut idx = 0u64;
        Ok(Self::from_fn(grid, |xi| {
            let r2: f64 = xi.iter().map(|v| v * v).sum();
            stream.block_at(idx, &mut u);
            idx += 1;
            C64::from_polar((1.0 + r2).powf(exponent), 2.0 * core::f64::consts::PI * u[0])
        }))
    }

    /// Sum of unit-`L²` band-limited pieces at `λ = 2^k`, `k = 0 … K`, weighted
    /// `2^{−(s+δ)k}`, with `2^{K+1} ≤ Ξ`.
    pub fn graded(grid: FrequencyGrid, s: f64, delta: f64, seed: u64) -> Result<Self> {
        let top = graded_top_level(&grid)?;
        let mut out = Self::zeros(grid.clone());
        for k in 0..=top {
            let lambda = 2f64.powi(k as i32);
            let piece = Self::band_limited_random_stream(grid.clone(), lambda, seed, k as u64)?;
            let w = 2f64.powf(-(s + delta) * k as f64);
            for (o, p) in out.fhat.iter_mut().zip(&piece.fhat) {
                *o += p * w;
            }
        }
        Ok(out)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn samples(&self) -> &[C64] {
        &self.fhat
    }

    pub fn support(&self) -> Option<f64> {
        self.support
    }

    /// Declares the annulus `λ`, validating that `f̂` vanishes outside it.
    pub fn with_support(self, lambda: f64) -> Result<Self> {
        Self::new(self.grid, self.fhat, Some(lambda))
    }

    pub fn into_parts(self) -> (FrequencyGrid, Vec<C64>, Option<f64>) {
        (self.grid, self.fhat, self.support)
    }

    pub fn scale(&mut self, c: f64) {
        self.fhat.iter_mut().for_each(|z| *z *= c);
    }

    /// `f̂ + ĝ` on a common grid. The result carries no declared support
    /// unless both operands declare the same one.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(invalid!("fields live on different grids"));
        }
        let fhat = self.fhat.iter().zip(&other.fhat).map(|(a, b)| a + b).collect();
        let support = if self.support == other.support {
            self.support
        } else {
            None
        };
        Ok(Self {
            grid: self.grid.clone(),
            fhat,
            support,
        })
    }

    /// `∫ e^{ix·ξ} f̂(ξ) dξ` by the trapezoidal rule.
    ///
    /// # Panics
    /// If `x` does not have the field's dimension.
    pub fn point_eval(&self, x: &[f64]) -> C64 {
        self.modulated_sum(x, |_| C64::new(1.0, 0.0))
    }

    /// `Σ_i w_i f̂_i m(i) e^{ix·ξ_i}` over nonzero samples, with `e^{ix·ξ}`
    /// assembled from per-axis phase tables.
    pub(crate) fn modulated_sum(&self, x: &[f64], mut m: impl FnMut(usize) -> C64) -> C64 {
        let n = self.dim();
        assert_eq!(x.len(), n, "point dimension does not match the field");
        let npts = self.grid.points_per_axis();
        let axis = self.grid.axis();
        let h = self.grid.spacing();
        let tables: Vec<Vec<C64>> = x
            .iter()
            .map(|&xd| {
                axis.iter()
                    .enumerate()
                    .map(|(i, &k)| {
                        let w = if i == 0 || i + 1 == npts { 0.5 * h } else { h };
                        C64::from_polar(w, xd * k)
                    })
                    .collect()
            })
            .collect();
        let mut acc = C64::new(0.0, 0.0);
        match n {
            1 => {
                for (i, z) in self.fhat.iter().enumerate() {
                    if *z != C64::new(0.0, 0.0) {
                        acc += z * tables[0][i] * m(i);
                    }
                }
            }
            2 => {
                for (i0, row) in self.fhat.chunks(npts).enumerate() {
                    let t0 = tables[0][i0];
                    for (i1, z) in row.iter().enumerate() {
                        if *z != C64::new(0.0, 0.0) {
                            acc += z * (t0 * tables[1][i1]) * m(i0 * npts + i1);
                        }
                    }
                }
            }
            _ => {
                let mut multi = alloc::vec![0usize; n];
                for (idx, z) in self.fhat.iter().enumerate() {
                    if *z != C64::new(0.0, 0.0) {
                        let mut rest = idx;
                        for d in (0..n).rev() {
                            multi[d] = rest % npts;
                            rest /= npts;
                        }
                        let ph = multi
                            .iter()
                            .enumerate()
                            .fold(C64::new(1.0, 0.0), |p, (d, &i)| p * tables[d][i]);
                        acc += z * ph * m(idx);
                    }
                }
            }
        }
        acc
    }

    /// `(∫ (1+|ξ|²)^s |f̂|² dξ)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let mut total = 0.0;
        self.grid.for_each_point(|idx, xi, w| {
            let a = self.fhat[idx].norm_sqr();
            if a != 0.0 {
                let weight = if s == 0.0 {
                    1.0
                } else {
                    let r2: f64 = xi.iter().map(|v| v * v).sum();
                    (1.0 + r2).powf(s)
                };
                total += w * weight * a;
            }
        });
        total.sqrt()
    }

    /// Spectral `L²` norm.
    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    /// `∫ g(ξ) |f̂(ξ)| dξ`.
    pub fn weighted_l1(&self, mut g: impl FnMut(&[f64]) -> f64) -> f64 {
        let mut total = 0.0;
        self.grid.for_each_point(|idx, xi, w| {
            let a = self.fhat[idx].norm();
            if a != 0.0 {
                total += w * g(xi) * a;
            }
        });
        total
    }

    /// `‖f̂‖_{L¹}`.
    pub fn l1_norm(&self) -> f64 {
        self.weighted_l1(|_| 1.0)
    }

    /// True when every sample is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.fhat.iter().all(|z| *z == C64::new(0.0, 0.0))
    }

    /// Pointwise product `f̂(ξ) · g(ξ)` with a real multiplier.
    pub fn multiply(&self, mut g: impl FnMut(&[f64]) -> f64) -> Self {
        let mut fhat = self.fhat.clone();
        self.grid.for_each_point(|idx, xi, _| {
            if fhat[idx] != C64::new(0.0, 0.0) {
                fhat[idx] *= g(xi);
            }
        });
        Self {
            grid: self.grid.clone(),
            fhat,
            support: None,
        }
    }
}

/// Largest `K` with `2^{K+1} ≤ Ξ`.
pub fn graded_top_level(grid: &FrequencyGrid) -> Result<u32> {
    let xi = grid.half_width();
    if xi < 2.0 {
        return Err(invalid!("graded data need a grid half-width of at least 2"));
    }
    let mut k = 0u32;
    while 2f64.powi(k as i32 + 2) <= xi {
        k += 1;
    }
    Ok(k)
}
