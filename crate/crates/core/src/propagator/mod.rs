//! Evaluation of `e^{itP(D)} f` at points and along curves by direct
//! quadrature of `∫ e^{ix·ξ + itP(ξ)} f̂(ξ) dξ`, plus the small-time
//! bounds used to control `e^{itP(D)} f(γ(x,t)) − f(x)`.

mod lattice;

pub use lattice::{
    calibrate_lattice_constant, cutoff, cutoff_1d, fourier_coefficient, lattice_probes,
    LatticeBound, LatticeWeights, CUTOFF_EDGE, CUTOFF_PLATEAU,
};

use alloc::vec::Vec;

use crate::curve::Curve;
use crate::error::{invalid, Result};
use crate::field::SpectralField;
use crate::symbol::Symbol;
use crate::C64;

fn check_time(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(invalid!("time {t} outside [0, 1]"));
    }
    Ok(())
}

/// A field paired with a symbol, with `P(ξ)` tabulated on the field's grid.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    field: &'a SpectralField,
    symbol: &'a Symbol,
    phase: Vec<f64>,
}

impl<'a> Propagator<'a> {
    pub fn new(field: &'a SpectralField, symbol: &'a Symbol) -> Result<Self> {
        if field.dim() != symbol.dim() {
            return Err(invalid!(
                "field has dimension {}, symbol has {}",
                field.dim(),
                symbol.dim()
            ));
        }
        let mut phase = alloc::vec![0.0; field.grid().len()];
        field.grid().for_each_point(|idx, xi, _| phase[idx] = symbol.value(xi));
        Ok(Self {
            field,
            symbol,
            phase,
        })
    }

    pub fn field(&self) -> &SpectralField {
        self.field
    }

    pub fn symbol(&self) -> &Symbol {
        self.symbol
    }

    /// `P(ξ_i)` for every grid sample.
    pub fn symbol_samples(&self) -> &[f64] {
        &self.phase
    }

    /// The Fourier multiplier `e^{itP(ξ_i)}` on the grid.
    pub fn multiplier(&self, t: f64) -> Vec<C64> {
        self.phase.iter().map(|&p| C64::cis(t * p)).collect()
    }

    /// `e^{itP(ξ)} f̂(ξ)` as a field; the declared support is kept.
    pub fn evolved_field(&self, t: f64) -> Result<SpectralField> {
        check_time(t)?;
        let fhat: Vec<C64> = self
            .field
            .samples()
            .iter()
            .zip(&self.phase)
            .map(|(z, &p)| if t == 0.0 { *z } else { z * C64::cis(t * p) })
            .collect();
        SpectralField::new(self.field.grid().clone(), fhat, self.field.support())
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.field.dim() {
            return Err(invalid!(
                "point has dimension {}, field has {}",
                x.len(),
                self.field.dim()
            ));
        }
        Ok(())
    }

    /// `e^{itP(D)} f(x)`. At `t = 0` this is exactly [`SpectralField::point_eval`].
    pub fn evolve_at(&self, x: &[f64], t: f64) -> Result<C64> {
        check_time(t)?;
        self.check_point(x)?;
        if t == 0.0 {
            return Ok(self.field.point_eval(x));
        }
        Ok(self.field.modulated_sum(x, |i| C64::cis(t * self.phase[i])))
    }

    /// `e^{itP(D)} f` at many points sharing one time; `points` is flattened.
    pub fn evolve_points(&self, points: &[f64], t: f64) -> Result<Vec<C64>> {
        check_time(t)?;
        let n = self.field.dim();
        if !points.len().is_multiple_of(n) {
            return Err(invalid!("flattened point list is not a multiple of n = {n}"));
        }
        if t == 0.0 {
            return Ok(points.chunks(n).map(|x| self.field.point_eval(x)).collect());
        }
        let m = self.multiplier(t);
        Ok(points
            .chunks(n)
            .map(|x| self.field.modulated_sum(x, |i| m[i]))
            .collect())
    }

    /// `e^{itP(D)} f(γ(x_j, t))` for each base point `x_j` (flattened), by
    /// direct quadrature.
    pub fn evolve_along_curve(&self, curve: &Curve, base: &[f64], t: f64) -> Result<Vec<C64>> {
        check_time(t)?;
        if curve.dim() != self.field.dim() {
            return Err(invalid!(
                "curve has dimension {}, field has {}",
                curve.dim(),
                self.field.dim()
            ));
        }
        let n = self.field.dim();
        let mut moved = alloc::vec![0.0; base.len()];
        for (x, y) in base.chunks(n).zip(moved.chunks_mut(n)) {
            curve.position_into(x, t, y);
        }
        self.evolve_points(&moved, t)
    }

    /// Truncated Taylor expansion of the multiplier,
    /// `Σ_{j≤J} (it)^j/j! ∫ e^{ix·ξ} P(ξ)^j f̂(ξ) dξ`, with the bound
    /// `Σ_{j>J} (tM)^j/j! ‖f̂‖_{L¹}` on the remainder, `M = max_{supp f̂} |P|`.
    pub fn taylor_evolve(&self, x: &[f64], t: f64, order: usize) -> Result<(C64, f64)> {
        check_time(t)?;
        self.check_point(x)?;
        if order < 1 {
            return Err(invalid!("truncation order must be at least 1"));
        }
        if self.field.support().is_none() {
            return Err(invalid!(
                "Taylor evaluation needs a field with declared support"
            ));
        }
        if t == 0.0 {
            return Ok((self.field.point_eval(x), 0.0));
        }
        let value = self.field.modulated_sum(x, |i| {
            let z = C64::new(0.0, t * self.phase[i]);
            let mut term = C64::new(1.0, 0.0);
            let mut sum = term;
            for j in 1..=order {
                term = term * z / j as f64;
                sum += term;
            }
            sum
        });
        let max_p = self
            .field
            .samples()
            .iter()
            .zip(&self.phase)
            .filter(|(z, _)| **z != C64::new(0.0, 0.0))
            .map(|(_, p)| p.abs())
            .fold(0.0, f64::max);
        let tail = exp_tail(t * max_p, order) * self.field.l1_norm();
        Ok((value, tail))
    }

    /// `(osc, shift)` with `osc = t ∫|P||f̂|` bounding
    /// `|e^{itP(D)}f(γ) − f(γ)|` and `shift = |γ(x,t) − x| ∫|ξ||f̂|` bounding
    /// `|f(γ) − f(x)|`.
    pub fn small_time_error_bounds(&self, curve: &Curve, x: &[f64], t: f64) -> Result<(f64, f64)> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(invalid!("time {t} outside (0, 1]"));
        }
        self.check_point(x)?;
        let mut p_moment = 0.0;
        let mut xi_moment = 0.0;
        self.field.grid().for_each_point(|i, xi, w| {
            let a = self.field.samples()[i].norm();
            if a != 0.0 {
                p_moment += w * self.phase[i].abs() * a;
                xi_moment += w * crate::grid::norm(xi) * a;
            }
        });
        Ok((t * p_moment, curve.displacement(x, t) * xi_moment))
    }
}

/// `Σ_{j>J} z^j / j!` for `z ≥ 0`, summed directly.
pub fn exp_tail(z: f64, order: usize) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    // first omitted term z^{J+1}/(J+1)!
    let mut term = 1.0;
    for j in 1..=order + 1 {
        term *= z / j as f64;
    }
    let mut sum = 0.0;
    let mut j = order + 1;
    loop {
        sum += term;
        j += 1;
        term *= z / j as f64;
        if (j as f64 > z && term <= sum * 1e-17) || term == 0.0 {
            break;
        }
    }
    sum
}

/// Free-function form of [`Propagator::evolve_at`].
pub fn evolve_at(field: &SpectralField, symbol: &Symbol, x: &[f64], t: f64) -> Result<C64> {
    Propagator::new(field, symbol)?.evolve_at(x, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Curve;
    use crate::grid::FrequencyGrid;

    fn gaussian1() -> SpectralField {
        SpectralField::gaussian(FrequencyGrid::default_for(1).unwrap(), 1.0).unwrap()
    }

    /// `∫ e^{−(1−it)ξ² + ixξ} dξ = √(π/(1−it)) e^{−x²/(4(1−it))}`.
    fn gaussian_oracle(x: f64, t: f64) -> C64 {
        let a = C64::new(1.0, -t);
        (C64::new(core::f64::consts::PI, 0.0) / a).sqrt() * (-(x * x) / (a * 4.0)).exp()
    }

    #[test]
    fn t_zero_is_point_eval() {
        let f = gaussian1();
        let p = Symbol::elliptic(1).unwrap();
        let prop = Propagator::new(&f, &p).unwrap();
        for x in [0.0, 0.3, -2.7] {
            let a = prop.evolve_at(&[x], 0.0).unwrap();
            let b = f.point_eval(&[x]);
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn gaussian_closed_form() {
        let f = gaussian1();
        let p = Symbol::elliptic(1).unwrap();
        let prop = Propagator::new(&f, &p).unwrap();
        for (x, t) in [(0.0, 0.5), (1.3, 0.1), (-2.0, 1.0), (0.7, 0.9)] {
            let got = prop.evolve_at(&[x], t).unwrap();
            let want = gaussian_oracle(x, t);
            assert!((got - want).norm() <= 1e-6 * want.norm(), "{x} {t}");
        }
    }

    #[test]
    fn spike_is_one_term() {
        let g = FrequencyGrid::default_for(1).unwrap();
        let f = SpectralField::spike(g.clone(), 1234, C64::new(1.0, 0.0)).unwrap();
        let p = Symbol::elliptic(1).unwrap();
        let xi0 = g.axis()[1234];
        let got = evolve_at(&f, &p, &[0.4], 0.3).unwrap();
        let want = C64::from_polar(g.cell_weight(), 0.4 * xi0 + 0.3 * xi0 * xi0);
        assert!((got - want).norm() < 1e-13);
    }

    #[test]
    fn errors() {
        let f = gaussian1();
        let p2 = Symbol::elliptic(2).unwrap();
        assert!(Propagator::new(&f, &p2).is_err());
        let p = Symbol::elliptic(1).unwrap();
        let prop = Propagator::new(&f, &p).unwrap();
        assert!(prop.evolve_at(&[0.0, 0.0], 0.1).is_err());
        assert!(prop.evolve_at(&[0.0], 1.1).is_err());
        assert!(prop.taylor_evolve(&[0.0], 0.1, 3).is_err());
    }

    #[test]
    fn curve_evaluation() {
        let f = gaussian1();
        let p = Symbol::elliptic(1).unwrap();
        let prop = Propagator::new(&f, &p).unwrap();
        let base = [0.1, -0.4, 0.9];
        let v = Curve::vertical(1).unwrap();
        let along = prop.evolve_along_curve(&v, &base, 0.3).unwrap();
        for (x, z) in base.iter().zip(&along) {
            assert_eq!(*z, prop.evolve_at(&[*x], 0.3).unwrap());
        }
        let s = Curve::shift_e1(1, 0.5).unwrap();
        let at0 = prop.evolve_along_curve(&s, &base, 0.0).unwrap();
        for (x, z) in base.iter().zip(&at0) {
            assert_eq!(*z, f.point_eval(&[*x]));
        }
        let t = 0.36;
        let moved = prop.evolve_along_curve(&s, &base, t).unwrap();
        for (x, z) in base.iter().zip(&moved) {
            let want = gaussian_oracle(x - t.sqrt(), t);
            assert!((z - want).norm() < 1e-6);
        }
    }

    #[test]
    fn taylor_examples() {
        let g = FrequencyGrid::default_for(1).unwrap();
        let f = SpectralField::band_limited_random(g, 4.0, 11).unwrap();
        let p = Symbol::elliptic(1).unwrap();
        let prop = Propagator::new(&f, &p).unwrap();
        let (v0, tail0) = prop.taylor_evolve(&[0.2], 0.0, 3).unwrap();
        assert_eq!(v0, f.point_eval(&[0.2]));
        assert_eq!(tail0, 0.0);

        let t = 1e-3;
        let (v, tail) = prop.taylor_evolve(&[0.2], t, 30).unwrap();
        assert!(tail < 1e-10);
        assert!((v - prop.evolve_at(&[0.2], t).unwrap()).norm() < 1e-8);

        // M = max |P| on the support; pick t with tM = 0.1
        let m = prop
            .symbol_samples()
            .iter()
            .zip(f.samples())
            .filter(|(_, z)| z.norm() > 0.0)
            .map(|(p, _)| p.abs())
            .fold(0.0, f64::max);
        let (_, tail) = prop.taylor_evolve(&[0.0], 0.1 / m, 1).unwrap();
        assert!(tail <= 0.01 / 2.0 * 0.1f64.exp() * f.l1_norm());
    }

    #[test]
    fn exp_tail_matches_closed_form() {
        for (z, j) in [(0.5, 1usize), (2.0, 3), (10.0, 5)] {
            let mut partial = 0.0;
            let mut term = 1.0;
            for k in 0..=j {
                if k > 0 {
                    term *= z / k as f64;
                }
                partial += term;
            }
            let want = z.exp() - partial;
            assert!((exp_tail(z, j) - want).abs() <= 1e-12 * z.exp());
        }
    }

    #[test]
    fn small_time_bounds() {
        let f = gaussian1();
        let p = Symbol::elliptic(1).unwrap();
        let prop = Propagator::new(&f, &p).unwrap();
        let v = Curve::vertical(1).unwrap();
        let (o1, s1) = prop.small_time_error_bounds(&v, &[0.0], 0.1).unwrap();
        assert_eq!(s1, 0.0);
        let (o2, _) = prop.small_time_error_bounds(&v, &[0.0], 0.2).unwrap();
        assert!((o2 / o1 - 2.0).abs() < 1e-12);

        let t = 1e-3;
        let err = (prop.evolve_at(&[0.0], t).unwrap() - f.point_eval(&[0.0])).norm();
        let (osc, _) = prop.small_time_error_bounds(&v, &[0.0], t).unwrap();
        assert!(err <= osc);
        assert!(prop.small_time_error_bounds(&v, &[0.0], 0.0).is_err());
    }
}
