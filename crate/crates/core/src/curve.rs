//! Curve families `γ(x, t)` with `γ(x, 0) = x`, and empirical estimates of
//! their Hölder regularity in `t` and bilipschitz constants in `x`.

#[allow(unused_imports)] // float math is a trait on bare-metal targets
use num_traits::Float as _;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::fit::fit_log_log;
use crate::grid::norm;
use crate::rng::CounterRng;

/// One knot of a tabulated curve: `γ(x, t_k) = A_k x + b_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineKnot {
    pub t: f64,
    /// Row-major `n × n` matrix.
    pub matrix: Vec<f64>,
    pub offset: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind {
    /// `γ(x, t) = x`.
    Vertical,
    /// `γ(x, t) = x − v t^α`.
    Shift { direction: Vec<f64>, alpha: f64 },
    /// `γ(x, t) = x + t v`.
    LinearDrift { velocity: Vec<f64> },
    /// Affine maps at knots `0 = t_0 < … < t_K = 1`, linear in `t` between them.
    Tabulated { knots: Vec<AffineKnot> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    dim: usize,
    kind: CurveKind,
    alpha: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid!("Hölder exponent must lie in (0, 1], got {alpha}"));
    }
    Ok(())
}

impl Curve {
    pub fn vertical(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid!("curve dimension must be positive"));
        }
        Ok(Self {
            dim,
            kind: CurveKind::Vertical,
            alpha: 1.0,
        })
    }

    pub fn shift(direction: Vec<f64>, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if direction.is_empty() || direction.iter().any(|v| !v.is_finite()) {
            return Err(invalid!("shift direction must be a finite nonempty vector"));
        }
        Ok(Self {
            dim: direction.len(),
            kind: CurveKind::Shift { direction, alpha },
            alpha,
        })
    }

    /// `γ(x, t) = x − e₁ t^α` in dimension `dim`.
    pub fn shift_e1(dim: usize, alpha: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid!("curve dimension must be positive"));
        }
        let mut v = alloc::vec![0.0; dim];
        v[0] = 1.0;
        Self::shift(v, alpha)
    }

    pub fn linear_drift(velocity: Vec<f64>) -> Result<Self> {
        if velocity.is_empty() || velocity.iter().any(|v| !v.is_finite()) {
            return Err(invalid!("drift velocity must be a finite nonempty vector"));
        }
        Ok(Self {
            dim: velocity.len(),
            kind: CurveKind::LinearDrift { velocity },
            alpha: 1.0,
        })
    }

    pub fn tabulated(dim: usize, knots: Vec<AffineKnot>, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if dim == 0 {
            return Err(invalid!("curve dimension must be positive"));
        }
        if knots.len() < 2 {
            return Err(invalid!("tabulated curve needs at least two knots"));
        }
        for k in &knots {
            if k.matrix.len() != dim * dim || k.offset.len() != dim {
                return Err(invalid!("knot at t = {} has wrong shape", k.t));
            }
            if k.matrix.iter().chain(&k.offset).any(|v| !v.is_finite()) {
                return Err(invalid!("knot at t = {} is not finite", k.t));
            }
        }
        if knots[0].t != 0.0 || knots[knots.len() - 1].t != 1.0 {
            return Err(invalid!("knots must start at t = 0 and end at t = 1"));
        }
        if knots.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(invalid!("knot times must be strictly increasing"));
        }
        let first = &knots[0];
        let identity = (0..dim * dim).all(|i| {
            let want = if i / dim == i % dim { 1.0 } else { 0.0 };
            first.matrix[i] == want
        });
        if !identity || first.offset.iter().any(|&b| b != 0.0) {
            return Err(invalid!("tabulated curve must satisfy γ(x, 0) = x"));
        }
        Ok(Self {
            dim,
            kind: CurveKind::Tabulated { knots },
            alpha,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    /// Declared Hölder exponent in `t`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// True when `γ(x, t)` does not depend on `t`.
    pub fn is_time_independent(&self) -> bool {
        match &self.kind {
            CurveKind::Vertical => true,
            CurveKind::Shift { direction, .. } => direction.iter().all(|&v| v == 0.0),
            CurveKind::LinearDrift { velocity } => velocity.iter().all(|&v| v == 0.0),
            CurveKind::Tabulated { .. } => false,
        }
    }

    /// `γ(x, t)` for `t ∈ [0, 1]`.
    pub fn eval(&self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&t) {
            return Err(invalid!("time {t} outside [0, 1]"));
        }
        if x.len() != self.dim {
            return Err(invalid!(
                "point has dimension {}, curve has {}",
                x.len(),
                self.dim
            ));
        }
        let mut out = alloc::vec![0.0; self.dim];
        self.position_into(x, t, &mut out);
        Ok(out)
    }

    /// `γ(x, t)` without validation. The closed-form families extend to any
    /// `t ≥ 0`; tabulated curves hold their last knot past `t = 1`.
    pub fn position_into(&self, x: &[f64], t: f64, out: &mut [f64]) {
        out.copy_from_slice(x);
        if t == 0.0 {
            return;
        }
        match &self.kind {
            CurveKind::Vertical => {}
            CurveKind::Shift { direction, alpha } => {
                let s = t.powf(*alpha);
                for (o, v) in out.iter_mut().zip(direction) {
                    *o -= v * s;
                }
            }
            CurveKind::LinearDrift { velocity } => {
                for (o, v) in out.iter_mut().zip(velocity) {
                    *o += t * v;
                }
            }
            CurveKind::Tabulated { knots } => {
                let n = self.dim;
                let k = knots
                    .windows(2)
                    .position(|w| t <= w[1].t)
                    .unwrap_or(knots.len() - 2);
                let (a, b) = (&knots[k], &knots[k + 1]);
                let s = ((t - a.t) / (b.t - a.t)).min(1.0);
                for (i, o) in out.iter_mut().enumerate().take(n) {
                    let mut ya = a.offset[i];
                    let mut yb = b.offset[i];
                    for (j, xj) in x.iter().enumerate().take(n) {
                        ya += a.matrix[i * n + j] * xj;
                        yb += b.matrix[i * n + j] * xj;
                    }
                    *o = (1.0 - s) * ya + s * yb;
                }
            }
        }
    }

    pub fn position(&self, x: &[f64], t: f64) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.dim];
        self.position_into(x, t, &mut out);
        out
    }

    /// `|γ(x, t) − x|`.
    pub fn displacement(&self, x: &[f64], t: f64) -> f64 {
        let p = self.position(x, t);
        let d: Vec<f64> = p.iter().zip(x).map(|(a, b)| a - b).collect();
        norm(&d)
    }

    /// Fits `α̂` from `sup_x |γ(x, t+g) − γ(x, t)|` over dyadic gaps `g = 2^{-k}`,
    /// `k = 1 … t_samples`.
    pub fn estimate_holder(
        &self,
        ball: &Ball,
        x_samples: usize,
        t_samples: usize,
        seed: u64,
    ) -> Result<HolderEstimate> {
        if x_samples < 8 || t_samples < 8 {
            return Err(invalid!("need at least 8 space and 8 time samples"));
        }
        self.check_ball(ball)?;
        let xs = ball.sample(x_samples, seed);
        let mut a = alloc::vec![0.0; self.dim];
        let mut b = alloc::vec![0.0; self.dim];
        let mut gaps = Vec::new();
        let mut sups = Vec::new();
        for k in 1..=t_samples {
            let g = 0.5f64.powi(k as i32);
            let mut sup = 0.0f64;
            for x in xs.chunks(self.dim) {
                for j in 0..t_samples {
                    let t = (1.0 - g) * j as f64 / (t_samples - 1) as f64;
                    self.position_into(x, t, &mut a);
                    self.position_into(x, t + g, &mut b);
                    let d: f64 = a.iter().zip(&b).map(|(p, q)| (p - q) * (p - q)).sum();
                    sup = sup.max(d.sqrt());
                }
            }
            if sup > 0.0 {
                gaps.push(g);
                sups.push(sup);
            }
        }
        if gaps.len() < 2 {
            return Ok(HolderEstimate {
                alpha: 1.0,
                constant: 0.0,
                no_variation: true,
            });
        }
        let fit = fit_log_log(&gaps, &sups)?;
        Ok(HolderEstimate {
            alpha: fit.slope,
            constant: fit.intercept.exp(),
            no_variation: false,
        })
    }

    /// Minimum and maximum of `|γ(x,t) − γ(y,t)| / |x − y|` over sampled pairs
    /// in the ball. Pairs are offset along coordinate axes and along random
    /// directions.
    pub fn estimate_bilipschitz(
        &self,
        ball: &Ball,
        t: f64,
        x_pairs: usize,
        seed: u64,
    ) -> Result<(f64, f64)> {
        if x_pairs < 32 {
            return Err(invalid!("need at least 32 pairs, got {x_pairs}"));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(invalid!("time {t} outside [0, 1]"));
        }
        self.check_ball(ball)?;
        let n = self.dim;
        let bases = ball.sample(x_pairs, seed);
        let mut stream = CounterRng::new(seed).stream(1);
        let mut y = alloc::vec![0.0; n];
        let mut u = alloc::vec![0.0; n];
        let mut gx = alloc::vec![0.0; n];
        let mut gy = alloc::vec![0.0; n];
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        let mut used = 0usize;
        for (p, x) in bases.chunks(n).enumerate() {
            let axis = p % (n + 1);
            if axis < n {
                u.iter_mut().for_each(|v| *v = 0.0);
                u[axis] = 1.0;
            } else {
                loop {
                    u.iter_mut().for_each(|v| *v = stream.next_symmetric());
                    let r = norm(&u);
                    if r > 0.1 && r <= 1.0 {
                        u.iter_mut().for_each(|v| *v /= r);
                        break;
                    }
                }
            }
            let rho = ball.radius * (0.05 + 0.45 * stream.next_f64());
            for (yi, (xi, ui)) in y.iter_mut().zip(x.iter().zip(&u)) {
                *yi = xi + rho * ui;
            }
            if !ball.contains(&y) {
                for (yi, (xi, ui)) in y.iter_mut().zip(x.iter().zip(&u)) {
                    *yi = xi - rho * ui;
                }
            }
            let dx: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
            if dx == 0.0 {
                continue;
            }
            self.position_into(x, t, &mut gx);
            self.position_into(&y, t, &mut gy);
            let dg: f64 = gx.iter().zip(&gy).map(|(a, b)| (a - b) * (a - b)).sum();
            let ratio = (dg / dx).sqrt();
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            used += 1;
        }
        if used == 0 {
            return Err(Error::DegenerateData("all sampled pairs coincide".into()));
        }
        Ok((lo, hi))
    }

    fn check_ball(&self, ball: &Ball) -> Result<()> {
        if ball.dim() != self.dim {
            return Err(invalid!(
                "ball has dimension {}, curve has {}",
                ball.dim(),
                self.dim
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderEstimate {
    pub alpha: f64,
    /// Fitted constant `C` in `sup |γ(x,t) − γ(x,t')| ≈ C |t − t'|^α`.
    pub constant: f64,
    /// Set when the curve does not move in `t`; `alpha` is then reported as 1.
    pub no_variation: bool,
}

/// Closed ball `B(center, radius)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(invalid!("ball center must be nonempty"));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid!("ball radius must be positive, got {radius}"));
        }
        Ok(Self { center, radius })
    }

    /// The unit ball about the origin.
    pub fn unit(dim: usize) -> Self {
        Self {
            center: alloc::vec![0.0; dim],
            radius: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let d: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        d <= self.radius * self.radius
    }

    /// Lebesgue measure of the ball.
    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.radius.powi(self.dim() as i32)
    }

    /// `count` points uniform in the ball, flattened.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let n = self.dim();
        let mut stream = CounterRng::new(seed).stream(0);
        let mut out = Vec::with_capacity(count * n);
        let mut u = alloc::vec![0.0; n];
        while out.len() < count * n {
            u.iter_mut().for_each(|v| *v = stream.next_symmetric());
            if norm(&u) <= 1.0 {
                out.extend(u.iter().zip(&self.center).map(|(a, c)| c + self.radius * a));
            }
        }
        out
    }

    /// Midpoints of a `per_axis`-cell tensor grid over the bounding cube that
    /// fall inside the ball, flattened, with the common cell measure.
    pub fn grid(&self, per_axis: usize) -> (Vec<f64>, f64) {
        let n = self.dim();
        let h = 2.0 * self.radius / per_axis as f64;
        let total = per_axis.pow(n as u32);
        let mut out = Vec::new();
        let mut p = alloc::vec![0.0; n];
        for idx in 0..total {
            let mut rest = idx;
            for d in (0..n).rev() {
                let i = rest % per_axis;
                rest /= per_axis;
                p[d] = self.center[d] - self.radius + (i as f64 + 0.5) * h;
            }
            if self.contains(&p) {
                out.extend_from_slice(&p);
            }
        }
        (out, h.powi(n as i32))
    }
}

// V_0 = 1, V_1 = 2, V_n = (2π / n) V_{n-2}
fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * core::f64::consts::PI / n as f64 * unit_ball_volume(n - 2),
    }
}
