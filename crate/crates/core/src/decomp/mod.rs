//! Frequency and time decompositions: dyadic Littlewood–Paley pieces,
//! anisotropic tiles adapted to `ξ₁^{m₁} + σξ₂^{m₂}`, the time tiling by
//! intervals of length `λ^{1−m₁}`, and the oscillatory kernel between two
//! points of a curve.

mod aniso;
mod bump;
mod filter;
mod kernel;
mod time;

pub use aniso::{anisotropic_decompose, AnisotropicTiling, TilePiece};
pub use bump::{annular_bump, ball_bump};
pub use filter::{dyadic_decompose, DyadicPiece, FilterBank};
pub use kernel::{
    check_separations, kernel_decay_fit, kernel_decay_from_values, kernel_eval, KernelDecay, KernelSpec, KernelValue, KERNEL_MAX_POINTS,
    KERNEL_NOISE_FLOOR, KERNEL_UNDERFLOW, KERNEL_UNDERFLOW_SLOPE,
};
pub use time::{time_intervals, TimeTiling};
