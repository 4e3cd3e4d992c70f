#[allow(unused_imports)] // float math is a trait on bare-metal targets
use num_traits::Float as _;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// Uniform tensor grid on `[-Ξ, Ξ]ⁿ` with `N` points per axis.
///
/// Samples are stored row-major with axis 0 varying slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    dim: usize,
    half_width: f64,
    points: usize,
    axis: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(dim: usize, half_width: f64, points: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid!("grid dimension must be positive"));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(invalid!("grid half-width must be positive, got {half_width}"));
        }
        if points < 8 {
            return Err(invalid!("need at least 8 points per axis, got {points}"));
        }
        let h = 2.0 * half_width / (points - 1) as f64;
        // Mirror the two halves so the grid is exactly symmetric about 0.
        let mut axis = alloc::vec![0.0; points];
        for i in 0..points {
            let j = points - 1 - i;
            if i <= j {
                let v = -half_width + i as f64 * h;
                axis[i] = v;
                axis[j] = -v;
            }
        }
        if points % 2 == 1 {
            axis[points / 2] = 0.0;
        }
        Ok(Self {
            dim,
            half_width,
            points,
            axis,
        })
    }

    /// Default resolution per dimension: `Ξ = 64` with 2048 points in 1-D
    /// and 256 points per axis otherwise.
    pub fn default_for(dim: usize) -> Result<Self> {
        match dim {
            1 => Self::new(1, 64.0, 2048),
            2 => Self::new(2, 64.0, 256),
            _ => Self::new(dim, 64.0, 32),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    /// Coordinates along one axis.
    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    /// Total number of samples, `Nⁿ`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Weight of an interior cell, `hⁿ`.
    pub fn cell_weight(&self) -> f64 {
        let h = self.spacing();
        (0..self.dim).fold(1.0, |w, _| w * h)
    }

    fn axis_weight(&self, i: usize) -> f64 {
        let h = self.spacing();
        if i == 0 || i + 1 == self.points {
            0.5 * h
        } else {
            h
        }
    }

    /// Trapezoidal weight of the sample at flat index `idx`.
    pub fn weight(&self, idx: usize) -> f64 {
        let mut rest = idx;
        let mut w = 1.0;
        for _ in 0..self.dim {
            w *= self.axis_weight(rest % self.points);
            rest /= self.points;
        }
        w
    }

    /// Writes the coordinates of sample `idx` into `out` (length `dim`).
    pub fn point_into(&self, idx: usize, out: &mut [f64]) {
        let mut rest = idx;
        for d in (0..self.dim).rev() {
            out[d] = self.axis[rest % self.points];
            rest /= self.points;
        }
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut p = alloc::vec![0.0; self.dim];
        self.point_into(idx, &mut p);
        p
    }

    /// Per-axis indices of sample `idx`.
    pub fn multi_index(&self, idx: usize) -> Vec<usize> {
        let mut m = alloc::vec![0; self.dim];
        let mut rest = idx;
        for d in (0..self.dim).rev() {
            m[d] = rest % self.points;
            rest /= self.points;
        }
        m
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    /// Calls `f(idx, ξ, weight)` for every sample in storage order.
    pub fn for_each_point(&self, mut f: impl FnMut(usize, &[f64], f64)) {
        let mut xi = alloc::vec![0.0; self.dim];
        for idx in 0..self.len() {
            self.point_into(idx, &mut xi);
            f(idx, &xi, self.weight(idx));
        }
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_axis() {
        for n in [8, 9, 2048] {
            let g = FrequencyGrid::new(1, 64.0, n).unwrap();
            let a = g.axis();
            for i in 0..n {
                assert_eq!(a[i], -a[n - 1 - i]);
            }
            assert_eq!(a[0], -64.0);
            assert_eq!(a[n - 1], 64.0);
        }
    }

    #[test]
    fn weights_integrate_constant() {
        let g = FrequencyGrid::new(2, 3.0, 17).unwrap();
        let total: f64 = (0..g.len()).map(|i| g.weight(i)).sum();
        assert!((total - 36.0).abs() < 1e-12);
    }

    #[test]
    fn index_roundtrip() {
        let g = FrequencyGrid::new(3, 1.0, 8).unwrap();
        for idx in [0, 1, 7, 8, 63, 64, 511] {
            assert_eq!(g.flat_index(&g.multi_index(idx)), idx);
        }
        let p = g.point(1);
        assert_eq!(p, alloc::vec![-1.0, -1.0, -1.0 + g.spacing()]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(FrequencyGrid::new(0, 1.0, 16).is_err());
        assert!(FrequencyGrid::new(1, 0.0, 16).is_err());
        assert!(FrequencyGrid::new(1, 1.0, 7).is_err());
    }
}
