//! FFT evaluation of `e^{itP(D)}f` on uniform spatial grids dual to the
//! frequency grid, and interpolation from such grids to arbitrary points.
//!
//! With `ξ_i = −Ξ + ih` and `x_j = x₀ + jΔx`, `Δx h M = 2π`, the quadrature
//! sum factors as
//!
//! ```text
//! Σ_i w_i ĝ_i e^{i x_j ξ_i} = e^{−iΞx_j} Σ_i (w_i ĝ_i e^{i x₀ i h}) e^{2πi ij/M},
//! ```
//!
//! an unnormalized inverse DFT of length `M ≥ N`.

use curveprop_core::error::{Error, Result};
use curveprop_core::{Curve, FrequencyGrid, Propagator, SpectralField, Symbol, C64};
use rustfft::FftPlanner;

const DUALITY_TOLERANCE: f64 = 1e-12;

/// `M` points per axis at `x₀ + jΔx`, `j = 0 … M−1`, in every coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    dim: usize,
    origin: f64,
    spacing: f64,
    points: usize,
}

impl SpatialGrid {
    pub fn new(dim: usize, origin: f64, spacing: f64, points: usize) -> Result<Self> {
        if dim == 0 || points == 0 {
            return Err(Error::InvalidArgument("spatial grid must be nonempty".into()));
        }
        if !(spacing > 0.0) || !spacing.is_finite() || !origin.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "invalid spatial grid origin {origin} / spacing {spacing}"
            )));
        }
        Ok(Self {
            dim,
            origin,
            spacing,
            points,
        })
    }

    /// The grid with `M = points` and `Δx = 2π/(hM)` for `freq`'s spacing `h`.
    pub fn dual(freq: &FrequencyGrid, points: usize, origin: f64) -> Result<Self> {
        let spacing = 2.0 * std::f64::consts::PI / (freq.spacing() * points as f64);
        Self::new(freq.dim(), origin, spacing, points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        self.origin + j as f64 * self.spacing
    }

    /// Point with flat row-major index `idx`.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        let mut rest = idx;
        for d in (0..self.dim).rev() {
            out[d] = self.coordinate(rest % self.points);
            rest /= self.points;
        }
        out
    }

    fn check_dual(&self, freq: &FrequencyGrid) -> Result<()> {
        if self.dim != freq.dim() {
            return Err(Error::InvalidArgument(format!(
                "spatial grid has dimension {}, frequency grid {}",
                self.dim,
                freq.dim()
            )));
        }
        if self.points < freq.points_per_axis() {
            return Err(Error::InvalidArgument(format!(
                "spatial grid needs at least {} points per axis, has {}",
                freq.points_per_axis(),
                self.points
            )));
        }
        let product = self.spacing * freq.spacing() * self.points as f64;
        let two_pi = 2.0 * std::f64::consts::PI;
        if (product - two_pi).abs() > DUALITY_TOLERANCE * two_pi {
            return Err(Error::InvalidArgument(format!(
                "grids are not dual: Δx·h·M = {product}, expected 2π"
            )));
        }
        Ok(())
    }
}

/// `Σ_i w_i ĝ_i e^{i x·ξ_i}` at every point of `sgrid`, row-major.
pub fn synthesize(freq: &FrequencyGrid, ghat: &[C64], sgrid: &SpatialGrid) -> Result<Vec<C64>> {
    sgrid.check_dual(freq)?;
    let n = freq.dim();
    if n > 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    let npts = freq.points_per_axis();
    let m = sgrid.points;
    let h = freq.spacing();
    let xi0 = -freq.half_width();
    let x0 = sgrid.origin;
    let pre: Vec<C64> = (0..npts).map(|i| C64::cis(x0 * i as f64 * h)).collect();
    let post: Vec<C64> = (0..m).map(|j| C64::cis(xi0 * sgrid.coordinate(j))).collect();
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(m);

    let mut buf = vec![C64::new(0.0, 0.0); sgrid.len()];
    match n {
        1 => {
            for i in 0..npts {
                buf[i] = ghat[i] * freq.weight(i) * pre[i];
            }
            fft.process(&mut buf);
            for (v, p) in buf.iter_mut().zip(&post) {
                *v *= p;
            }
        }
        _ => {
            for i0 in 0..npts {
                for i1 in 0..npts {
                    let idx = i0 * npts + i1;
                    buf[i0 * m + i1] = ghat[idx] * freq.weight(idx) * pre[i0] * pre[i1];
                }
            }
            // rows (second axis), then columns
            for row in buf.chunks_mut(m).take(npts) {
                fft.process(row);
            }
            let mut col = vec![C64::new(0.0, 0.0); m];
            for j1 in 0..m {
                for j0 in 0..m {
                    col[j0] = buf[j0 * m + j1];
                }
                fft.process(&mut col);
                for j0 in 0..m {
                    buf[j0 * m + j1] = col[j0] * post[j0] * post[j1];
                }
            }
        }
    }
    Ok(buf)
}

/// `e^{itP(D)}f` on a dual spatial grid by FFT; `n ∈ {1, 2}`.
pub fn evolve_uniform_fast(field: &SpectralField, symbol: &Symbol, sgrid: &SpatialGrid, t: f64) -> Result<Vec<C64>> {
    let prop = Propagator::new(field, symbol)?;
    let evolved = prop.evolved_field(t)?;
    synthesize(field.grid(), evolved.samples(), sgrid)
}

/// How curve values were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveMethod {
    Direct,
    /// Local Lagrange interpolation of `order` nodes per axis from an FFT grid
    /// oversampled `oversample` times.
    Interpolated { oversample: usize, order: usize },
}

impl CurveMethod {
    pub fn name(&self) -> &'static str {
        match self {
            CurveMethod::Direct => "direct",
            CurveMethod::Interpolated { .. } => "interpolated",
        }
    }
}

/// Default interpolation settings: 8× oversampling, 10-point stencils.
pub const DEFAULT_INTERPOLATION: CurveMethod = CurveMethod::Interpolated {
    oversample: 8,
    order: 10,
};

fn lagrange_weights(offset: f64, order: usize, out: &mut [f64]) {
    // nodes 0 … order−1, evaluation at `offset`
    for (k, w) in out.iter_mut().enumerate().take(order) {
        let mut v = 1.0;
        for j in 0..order {
            if j != k {
                v *= (offset - j as f64) / (k as f64 - j as f64);
            }
        }
        *w = v;
    }
}

/// `e^{itP(D)}f(γ(x_j,t))` for base points `x_j` (flattened), either by
/// direct quadrature or by interpolation from an oversampled FFT grid that
/// covers the moved points.
pub fn evolve_along_curve_with(
    field: &SpectralField,
    symbol: &Symbol,
    curve: &Curve,
    base: &[f64],
    t: f64,
    method: CurveMethod,
) -> Result<Vec<C64>> {
    let prop = Propagator::new(field, symbol)?;
    let (oversample, order) = match method {
        CurveMethod::Direct => return prop.evolve_along_curve(curve, base, t),
        CurveMethod::Interpolated { oversample, order } => (oversample, order),
    };
    let n = field.dim();
    if n > 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if oversample < 2 || order < 2 {
        return Err(Error::InvalidArgument("interpolation needs oversample >= 2 and order >= 2".into()));
    }
    if curve.dim() != n || !base.len().is_multiple_of(n) {
        return Err(Error::InvalidArgument("curve and base points must match the field dimension".into()));
    }
    let mut moved = vec![0.0; base.len()];
    for (x, y) in base.chunks(n).zip(moved.chunks_mut(n)) {
        curve.position_into(x, t, y);
    }
    if moved.is_empty() {
        return Ok(Vec::new());
    }
    let freq = field.grid();
    let m = oversample * freq.points_per_axis();
    let lo = moved.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = moved.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let probe = SpatialGrid::dual(freq, m, 0.0)?;
    let dx = probe.spacing();
    let margin = order as f64 * dx;
    if hi - lo + 2.0 * margin > m as f64 * dx {
        return Err(Error::InvalidArgument(format!(
            "points span {} exceeds the interpolation grid extent {}",
            hi - lo,
            m as f64 * dx
        )));
    }
    let sgrid = SpatialGrid::dual(freq, m, lo - margin)?;
    let values = evolve_uniform_fast(field, symbol, &sgrid, t)?;

    let mut out = Vec::with_capacity(moved.len() / n);
    let mut w = vec![vec![0.0; order]; n];
    let mut start = vec![0usize; n];
    for y in moved.chunks(n) {
        for d in 0..n {
            let u = (y[d] - sgrid.origin()) / dx;
            let s = (u.floor() as isize - (order as isize / 2 - 1)).clamp(0, (m - order) as isize) as usize;
            start[d] = s;
            lagrange_weights(u - s as f64, order, &mut w[d]);
        }
        let v = match n {
            1 => (0..order).map(|k| values[start[0] + k] * w[0][k]).sum(),
            _ => {
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..order {
                    let row = (start[0] + a) * m + start[1];
                    let inner: C64 = (0..order).map(|b| values[row + b] * w[1][b]).sum();
                    acc += inner * w[0][a];
                }
                acc
            }
        };
        out.push(v);
    }
    Ok(out)
}
