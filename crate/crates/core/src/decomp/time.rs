#[allow(unused_imports)] // float math is a trait on bare-metal targets
use num_traits::Float as _;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// Abutting half-open intervals `[jℓ, (j+1)ℓ)`, `ℓ = λ^{1−m₁}`, with the last
/// one clipped to end at 1 (and closed there).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTiling {
    lambda: f64,
    m1: u32,
    length: f64,
    count: usize,
}

pub fn time_intervals(lambda: f64, m1: u32) -> Result<TimeTiling> {
    if !(lambda >= 1.0) || !lambda.is_finite() {
        return Err(invalid!("λ must be >= 1, got {lambda}"));
    }
    if m1 < 2 {
        return Err(invalid!("m₁ must be at least 2, got {m1}"));
    }
    let length = lambda.powi(1 - m1 as i32);
    let count = ((1.0 / length) - 1e-12).ceil().max(1.0) as usize;
    Ok(TimeTiling {
        lambda,
        m1,
        length,
        count,
    })
}

impl TimeTiling {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn m1(&self) -> u32 {
        self.m1
    }

    /// `ℓ = λ^{1−m₁}`.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// `(start, end)` of interval `j`.
    pub fn interval(&self, j: usize) -> (f64, f64) {
        let a = j as f64 * self.length;
        let b = if j + 1 == self.count {
            1.0
        } else {
            (j + 1) as f64 * self.length
        };
        (a, b.min(1.0))
    }

    pub fn intervals(&self) -> Vec<(f64, f64)> {
        (0..self.count).map(|j| self.interval(j)).collect()
    }

    /// Number of intervals containing `t`.
    pub fn multiplicity(&self, t: f64) -> usize {
        (0..self.count)
            .filter(|&j| {
                let (a, b) = self.interval(j);
                (a <= t && t < b) || (j + 1 == self.count && t == 1.0)
            })
            .count()
    }

    /// Total length minus pairwise overlaps.
    pub fn covered_measure(&self) -> f64 {
        let iv = self.intervals();
        let total: f64 = iv.iter().map(|(a, b)| b - a).sum();
        let overlap: f64 = iv
            .windows(2)
            .map(|w| (w[0].1 - w[1].0).max(0.0))
            .sum();
        total - overlap
    }
}
