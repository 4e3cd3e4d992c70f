#[allow(unused_imports)] // float math is a trait on bare-metal targets
use num_traits::Float as _;
use alloc::vec::Vec;

use super::bump::annular_bump;
use crate::error::{invalid, Error, Result};
use crate::field::SpectralField;
use crate::grid::norm;
use crate::C64;

/// Tiles `A_k = {ξ : ρ_k(ξ) ∈ [1/2, 2]}` with
/// `ρ_k(ξ) = |ξ₁|/2^{m₂k/m₁} + |ξ₂|/2^k`, and the smooth partition
/// `θ_k = b(ρ_k) / Σ_j b(ρ_j)` on the annulus `λ/2 ≤ |ξ| ≤ 2λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnisotropicTiling {
    m1: u32,
    m2: u32,
    lambda: f64,
    /// Candidate indices `0 … k_max`.
    k_max: u32,
}

impl AnisotropicTiling {
    pub fn new(m1: u32, m2: u32, lambda: f64) -> Result<Self> {
        if !(2 <= m1 && m1 <= m2) {
            return Err(invalid!("need 2 <= m₁ <= m₂, got m₁ = {m1}, m₂ = {m2}"));
        }
        if !(lambda >= 1.0) || !lambda.is_finite() {
            return Err(invalid!("λ must be >= 1, got {lambda}"));
        }
        // ρ_k ≤ |ξ|/2^k + |ξ|/2^k < 1/2 once 2^k > 8λ
        let k_max = (8.0 * lambda).log2().ceil() as u32 + 1;
        Ok(Self {
            m1,
            m2,
            lambda,
            k_max,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn rho(&self, k: u32, xi: &[f64]) -> f64 {
        let kf = k as f64;
        xi[0].abs() / 2f64.powf(self.m2 as f64 * kf / self.m1 as f64) + xi[1].abs() / 2f64.powf(kf)
    }

    fn raw(&self, k: u32, xi: &[f64]) -> f64 {
        annular_bump(self.rho(k, xi))
    }

    /// `Σ_j b(ρ_j(ξ))`; zero means `ξ` lies in no tile.
    pub fn coverage(&self, xi: &[f64]) -> f64 {
        (0..=self.k_max).map(|j| self.raw(j, xi)).sum()
    }

    /// `θ_k(ξ)`, or `None` if `ξ` is uncovered.
    pub fn weight(&self, k: u32, xi: &[f64]) -> Option<f64> {
        let total = self.coverage(xi);
        if total == 0.0 {
            return None;
        }
        Some(if k > self.k_max { 0.0 } else { self.raw(k, xi) / total })
    }

    /// Indices `k` whose partition weight `θ_k` exceeds machine epsilon
    /// somewhere on the annulus `λ/2 ≤ |ξ| ≤ 2λ`, found by dense polar
    /// sampling. Tiles that only graze the annulus, with weight far below
    /// rounding, are not counted.
    pub fn active_indices(&self) -> Vec<u32> {
        const RADII: usize = 257;
        const ANGLES: usize = 2048;
        let mut hit = alloc::vec![false; self.k_max as usize + 1];
        for i in 0..RADII {
            let r = self.lambda * 0.5 * 4f64.powf(i as f64 / (RADII - 1) as f64);
            for j in 0..ANGLES {
                let th = core::f64::consts::FRAC_PI_2 * j as f64 / (ANGLES - 1) as f64;
                let xi = [r * th.cos(), r * th.sin()];
                let total = self.coverage(&xi);
                if total == 0.0 {
                    continue;
                }
                for k in 0..=self.k_max {
                    if self.raw(k, &xi) > f64::EPSILON * total {
                        hit[k as usize] = true;
                    }
                }
            }
        }
        (0..=self.k_max).filter(|&k| hit[k as usize]).collect()
    }
}

/// One anisotropic piece `f̂_k = θ_k f̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct TilePiece {
    pub k: u32,
    pub field: SpectralField,
}

/// Splits a field band-limited at `λ` over the tiles `A_k`; only nonzero
/// pieces are returned, and each keeps the annulus `λ`.
pub fn anisotropic_decompose(field: &SpectralField, m1: u32, m2: u32) -> Result<Vec<TilePiece>> {
    if field.dim() != 2 {
        return Err(Error::UnsupportedDimension(field.dim()));
    }
    let lambda = field
        .support()
        .ok_or_else(|| invalid!("anisotropic decomposition needs a band-limited field"))?;
    let tiling = AnisotropicTiling::new(m1, m2, lambda)?;
    let grid = field.grid();
    let mut pieces: Vec<Vec<C64>> = (0..=tiling.k_max)
        .map(|_| alloc::vec![C64::new(0.0, 0.0); grid.len()])
        .collect();
    let mut used = alloc::vec![false; tiling.k_max as usize + 1];
    let mut uncovered = None;
    grid.for_each_point(|idx, xi, _| {
        let z = field.samples()[idx];
        if z == C64::new(0.0, 0.0) || uncovered.is_some() {
            return;
        }
        let total = tiling.coverage(xi);
        if total == 0.0 {
            uncovered = Some((xi[0], xi[1], norm(xi)));
            return;
        }
        for k in 0..=tiling.k_max {
            let b = tiling.raw(k, xi);
            if b > 0.0 {
                pieces[k as usize][idx] = z * (b / total);
                used[k as usize] = true;
            }
        }
    });
    if let Some((a, b, r)) = uncovered {
        return Err(invalid!(
            "ξ = ({a}, {b}) (|ξ| = {r}) lies in no tile for m₁ = {m1}, m₂ = {m2}"
        ));
    }
    let mut out = Vec::new();
    for (k, fhat) in pieces.into_iter().enumerate() {
        if used[k] {
            out.push(TilePiece {
                k: k as u32,
                field: SpectralField::new(grid.clone(), fhat, Some(lambda))?,
            });
        }
    }
    Ok(out)
}
