#[allow(unused_imports)] // float math is a trait on bare-metal targets
use num_traits::Float as _;
use alloc::vec::Vec;

use super::bump::{annular_bump, ball_bump};
use crate::error::Result;
use crate::field::SpectralField;
use crate::grid::{norm, FrequencyGrid};

/// Radial partition of unity `ψ_k = b_k / Σ_j b_j` with `b_0` a ball bump
/// on `|ξ| < 2` and `b_k(ξ) = annular_bump(|ξ|/2^k)` on
/// `2^{k−1} < |ξ| < 2^{k+1}`, `k = 1 … K`. `K` is chosen so the family
/// covers the whole grid; at most two `ψ_k` are nonzero at any `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    top: u32,
}

impl FilterBank {
    /// Smallest bank covering `|ξ| ≤ radius`.
    pub fn covering(radius: f64) -> Self {
        let mut top = 0u32;
        while 2f64.powi(top as i32 + 1) <= radius * (1.0 + 1e-12) {
            top += 1;
        }
        Self { top }
    }

    /// Bank covering every point of `grid` (corners included).
    pub fn for_grid(grid: &FrequencyGrid) -> Self {
        Self::covering(grid.half_width() * (grid.dim() as f64).sqrt())
    }

    /// Largest index `K`.
    pub fn top(&self) -> u32 {
        self.top
    }

    fn raw(&self, k: u32, r: f64) -> f64 {
        if k == 0 {
            ball_bump(r)
        } else {
            annular_bump(r / 2f64.powi(k as i32))
        }
    }

    /// `ψ_k(ξ)` for `|ξ| = r`.
    pub fn value(&self, k: u32, r: f64) -> f64 {
        if k > self.top {
            return 0.0;
        }
        let bk = self.raw(k, r);
        if bk == 0.0 {
            return 0.0;
        }
        bk / self.total(r)
    }

    fn total(&self, r: f64) -> f64 {
        // only the two scales around r can be nonzero
        let lo = if r < 1.0 { 0 } else { r.log2().floor() as u32 };
        (lo.saturating_sub(1)..=(lo + 2).min(self.top))
            .map(|j| self.raw(j, r))
            .sum()
    }

    /// `Σ_k ψ_k` at radius `r`; exactly representable as one up to rounding
    /// wherever the bank covers.
    pub fn sum(&self, r: f64) -> f64 {
        (0..=self.top).map(|k| self.value(k, r)).sum()
    }
}

/// One Littlewood–Paley piece `f̂_k = ψ_k f̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicPiece {
    pub k: u32,
    pub field: SpectralField,
}

/// Splits `field` into `f̂_k = ψ_k f̂` for `k = 0 … K`. Pieces with `k ≥ 1`
/// declare the annulus `2^k`; the low piece lives in `|ξ| < 2` and carries no
/// annulus.
pub fn dyadic_decompose(field: &SpectralField) -> Result<Vec<DyadicPiece>> {
    let grid = field.grid();
    let bank = FilterBank::for_grid(grid);
    let mut out = Vec::with_capacity(bank.top() as usize + 1);
    for k in 0..=bank.top() {
        let mut fhat = field.samples().to_vec();
        grid.for_each_point(|idx, xi, _| {
            if fhat[idx] != crate::C64::new(0.0, 0.0) {
                fhat[idx] *= bank.value(k, norm(xi));
            }
        });
        let support = if k == 0 { None } else { Some(2f64.powi(k as i32)) };
        out.push(DyadicPiece {
            k,
            field: SpectralField::new(grid.clone(), fhat, support)?,
        });
    }
    Ok(out)
}
