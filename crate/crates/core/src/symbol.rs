//! Real phase functions `P(ξ)` with polynomial growth `|P(ξ)| ≲ |ξ|^m`.

#[allow(unused_imports)] // float math is a trait on bare-metal targets
use num_traits::Float as _;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::fit::fit_log_log;
use crate::rng::CounterRng;

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolKind {
    /// `|ξ|²`.
    Elliptic,
    /// `ξ₁² − ξ₂² ± ξ₃² ± … ± ξₙ²`; `signs` holds the signs of `ξ₃ … ξₙ`.
    NonElliptic { signs: Vec<i8> },
    /// `|ξ|^a` with `a > 1`.
    Fractional { exponent: f64 },
    /// `ξ₁^{m₁} + σ ξ₂^{m₂}` on `ℝ²`, `2 ≤ m₁ ≤ m₂`, `σ = ±1`.
    Polynomial2d { m1: u32, m2: u32, sigma: i8 },
    /// Sparse monomial table: exponent vector → coefficient.
    Polynomial { terms: BTreeMap<Vec<u32>, f64> },
}

/// A validated phase function on `ℝⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    dim: usize,
    kind: SymbolKind,
}

impl Symbol {
    pub fn new(dim: usize, kind: SymbolKind) -> Result<Self> {
        if dim == 0 {
            return Err(invalid!("symbol dimension must be positive"));
        }
        match &kind {
            SymbolKind::Elliptic => {}
            SymbolKind::NonElliptic { signs } => {
                if dim < 2 {
                    return Err(invalid!("non-elliptic symbol needs n >= 2"));
                }
                if signs.len() != dim - 2 {
                    return Err(invalid!(
                        "non-elliptic symbol in n = {dim} needs {} signs, got {}",
                        dim - 2,
                        signs.len()
                    ));
                }
                if signs.iter().any(|&s| s != 1 && s != -1) {
                    return Err(invalid!("signs must be +1 or -1"));
                }
            }
            SymbolKind::Fractional { exponent } => {
                if !(*exponent > 1.0) || !exponent.is_finite() {
                    return Err(invalid!("fractional exponent must exceed 1, got {exponent}"));
                }
            }
            SymbolKind::Polynomial2d { m1, m2, sigma } => {
                if dim != 2 {
                    return Err(Error::UnsupportedDimension(dim));
                }
                if !(2 <= *m1 && m1 <= m2) {
                    return Err(invalid!("need 2 <= m1 <= m2, got m1 = {m1}, m2 = {m2}"));
                }
                if *sigma != 1 && *sigma != -1 {
                    return Err(invalid!("sigma must be +1 or -1, got {sigma}"));
                }
            }
            SymbolKind::Polynomial { terms } => {
                for (powers, c) in terms {
                    if powers.len() != dim {
                        return Err(invalid!(
                            "monomial {powers:?} does not have {dim} exponents"
                        ));
                    }
                    if !c.is_finite() {
                        return Err(invalid!("non-finite coefficient for {powers:?}"));
                    }
                }
            }
        }
        Ok(Self { dim, kind })
    }

    pub fn elliptic(dim: usize) -> Result<Self> {
        Self::new(dim, SymbolKind::Elliptic)
    }

    pub fn nonelliptic(dim: usize, signs: Vec<i8>) -> Result<Self> {
        Self::new(dim, SymbolKind::NonElliptic { signs })
    }

    pub fn fractional(dim: usize, exponent: f64) -> Result<Self> {
        Self::new(dim, SymbolKind::Fractional { exponent })
    }

    pub fn polynomial2d(m1: u32, m2: u32, sigma: i8) -> Result<Self> {
        Self::new(2, SymbolKind::Polynomial2d { m1, m2, sigma })
    }

    pub fn polynomial(dim: usize, terms: BTreeMap<Vec<u32>, f64>) -> Result<Self> {
        Self::new(dim, SymbolKind::Polynomial { terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    /// `P(ξ)`, checking the dimension.
    pub fn eval(&self, xi: &[f64]) -> Result<f64> {
        if xi.len() != self.dim {
            return Err(invalid!(
                "point has dimension {}, symbol has {}",
                xi.len(),
                self.dim
            ));
        }
        if xi.iter().any(|v| !v.is_finite()) {
            return Err(invalid!("non-finite frequency"));
        }
        Ok(self.value(xi))
    }

    /// `P(ξ)` without the dimension check.
    pub fn value(&self, xi: &[f64]) -> f64 {
        debug_assert_eq!(xi.len(), self.dim);
        match &self.kind {
            SymbolKind::Elliptic => xi.iter().map(|v| v * v).sum(),
            SymbolKind::NonElliptic { signs } => {
                let mut p = xi[0] * xi[0] - xi[1] * xi[1];
                for (v, &s) in xi[2..].iter().zip(signs) {
                    p += f64::from(s) * v * v;
                }
                p
            }
            SymbolKind::Fractional { exponent } => {
                let r2: f64 = xi.iter().map(|v| v * v).sum();
                r2.powf(0.5 * exponent)
            }
            SymbolKind::Polynomial2d { m1, m2, sigma } => {
                xi[0].powi(*m1 as i32) + f64::from(*sigma) * xi[1].powi(*m2 as i32)
            }
            SymbolKind::Polynomial { terms } => terms
                .iter()
                .map(|(powers, c)| {
                    powers
                        .iter()
                        .zip(xi)
                        .fold(*c, |acc, (&p, &v)| acc * v.powi(p as i32))
                })
                .sum(),
        }
    }

    /// The declared growth order `m` in `|P(ξ)| ≲ |ξ|^m`.
    pub fn growth_order(&self) -> f64 {
        match &self.kind {
            SymbolKind::Elliptic | SymbolKind::NonElliptic { .. } => 2.0,
            SymbolKind::Fractional { exponent } => *exponent,
            SymbolKind::Polynomial2d { m2, .. } => f64::from(*m2),
            SymbolKind::Polynomial { terms } => terms
                .iter()
                .filter(|(_, &c)| c != 0.0)
                .map(|(p, _)| p.iter().sum::<u32>())
                .max()
                .map_or(0.0, f64::from),
        }
    }

    /// Maximum of `|P|` over sample directions on the sphere `|ξ| = radius`.
    pub fn sphere_max(&self, radius: f64, samples_per_sphere: usize) -> f64 {
        let dirs = sphere_directions(self.dim, samples_per_sphere);
        let mut xi = alloc::vec![0.0; self.dim];
        dirs.chunks(self.dim)
            .map(|d| {
                for (x, u) in xi.iter_mut().zip(d) {
                    *x = radius * u;
                }
                self.value(&xi).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Empirical growth exponent: slope of `log max_{|ξ|=R} |P|` against `log R`.
    pub fn fit_growth(&self, radii: &[f64], samples_per_sphere: usize) -> Result<f64> {
        if radii.len() < 4 {
            return Err(invalid!("need at least 4 radii, got {}", radii.len()));
        }
        if radii.iter().any(|&r| !(r >= 1.0)) || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid!("radii must be increasing and >= 1"));
        }
        if samples_per_sphere < 16 {
            return Err(invalid!("need at least 16 samples per sphere"));
        }
        let maxima: Vec<f64> = radii
            .iter()
            .map(|&r| self.sphere_max(r, samples_per_sphere))
            .collect();
        if maxima.iter().all(|&m| m == 0.0) {
            return Err(Error::DegenerateData("symbol vanishes on every sphere".into()));
        }
        if maxima.contains(&0.0) {
            return Err(Error::DegenerateData("symbol vanishes on some sphere".into()));
        }
        Ok(fit_log_log(radii, &maxima)?.slope)
    }
}

/// Unit directions, flattened. Always includes `±eᵢ`; in 2-D the directions
/// are equally spaced angles, in higher dimensions pairwise diagonals and
/// deterministic pseudo-random directions fill the remaining budget.
fn sphere_directions(dim: usize, count: usize) -> Vec<f64> {
    let mut out = Vec::new();
    match dim {
        1 => out.extend_from_slice(&[1.0, -1.0]),
        2 => {
            for j in 0..count {
                let a = 2.0 * core::f64::consts::PI * j as f64 / count as f64;
                out.push(a.cos());
                out.push(a.sin());
            }
        }
        _ => {
            let mut e = alloc::vec![0.0; dim];
            for i in 0..dim {
                for s in [1.0, -1.0] {
                    e.iter_mut().for_each(|v| *v = 0.0);
                    e[i] = s;
                    out.extend_from_slice(&e);
                }
            }
            let d = 1.0 / 2.0f64.sqrt();
            for i in 0..dim {
                for j in i + 1..dim {
                    for (si, sj) in [(d, d), (d, -d), (-d, d), (-d, -d)] {
                        e.iter_mut().for_each(|v| *v = 0.0);
                        e[i] = si;
                        e[j] = sj;
                        out.extend_from_slice(&e);
                    }
                }
            }
            let mut stream = CounterRng::new(0x5eed).stream(0);
            while out.len() / dim < count {
                for v in e.iter_mut() {
                    *v = stream.next_symmetric();
                }
                let r = crate::grid::norm(&e);
                if r > 0.1 && r <= 1.0 {
                    out.extend(e.iter().map(|v| v / r));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        assert_eq!(Symbol::elliptic(2).unwrap().eval(&[3.0, 4.0]).unwrap(), 25.0);
        let p = Symbol::polynomial2d(2, 3, 1).unwrap();
        assert_eq!(p.eval(&[2.0, 1.0]).unwrap(), 5.0);
        let q = Symbol::nonelliptic(2, alloc::vec![]).unwrap();
        assert_eq!(q.eval(&[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn eval_errors() {
        let e = Symbol::elliptic(2).unwrap();
        assert!(matches!(e.eval(&[1.0]), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            Symbol::fractional(1, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(Symbol::fractional(1, 0.5).is_err());
        assert!(Symbol::polynomial2d(3, 2, 1).is_err());
        assert!(Symbol::polynomial2d(2, 3, 0).is_err());
        assert!(Symbol::nonelliptic(1, alloc::vec![]).is_err());
    }

    #[test]
    fn declared_growth() {
        assert_eq!(Symbol::elliptic(3).unwrap().growth_order(), 2.0);
        assert_eq!(Symbol::polynomial2d(2, 3, 1).unwrap().growth_order(), 3.0);
        assert_eq!(Symbol::fractional(1, 1.5).unwrap().growth_order(), 1.5);
        let mut t = BTreeMap::new();
        t.insert(alloc::vec![1, 2], 1.0);
        t.insert(alloc::vec![4, 0], 0.0);
        t.insert(alloc::vec![0, 0], 3.0);
        assert_eq!(Symbol::polynomial(2, t).unwrap().growth_order(), 3.0);
    }

    #[test]
    fn fit_growth_examples() {
        let e = Symbol::elliptic(2).unwrap();
        let s = e.fit_growth(&[2.0, 4.0, 8.0, 16.0], 64).unwrap();
        assert!((s - 2.0).abs() < 1e-6, "{s}");

        let p = Symbol::polynomial2d(2, 3, 1).unwrap();
        let s = p.fit_growth(&[4.0, 8.0, 16.0, 32.0], 64).unwrap();
        assert!((2.9..=3.0).contains(&s), "{s}");

        let mut t = BTreeMap::new();
        t.insert(alloc::vec![0], 1.0);
        let c = Symbol::polynomial(1, t).unwrap();
        let s = c.fit_growth(&[2.0, 4.0, 8.0, 16.0], 16).unwrap();
        assert!(s.abs() < 1e-6);
    }

    #[test]
    fn fit_growth_errors() {
        let zero = Symbol::polynomial(1, BTreeMap::new()).unwrap();
        assert!(matches!(
            zero.fit_growth(&[1.0, 2.0, 3.0, 4.0], 16),
            Err(Error::DegenerateData(_))
        ));
        let e = Symbol::elliptic(1).unwrap();
        assert!(e.fit_growth(&[1.0, 2.0, 3.0], 16).is_err());
        assert!(e.fit_growth(&[1.0, 2.0, 3.0, 4.0], 8).is_err());
        assert!(e.fit_growth(&[0.5, 2.0, 3.0, 4.0], 16).is_err());
    }

    #[test]
    fn higher_dim_directions_are_unit() {
        let d = sphere_directions(3, 40);
        assert!(d.len() / 3 >= 40);
        for u in d.chunks(3) {
            assert!((crate::grid::norm(u) - 1.0).abs() < 1e-12);
        }
    }
}
