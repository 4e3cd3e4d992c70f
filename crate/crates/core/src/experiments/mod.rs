//! Desk-scale experiments: convergence-rate fits along curves, maximal
//! `L^p` estimates and their growth in `λ`, and the `t^α` lower bound for
//! the shifted curve.

mod lower;
mod maximal;
mod rate;

pub use lower::{lower_bound_check, LowerBound, LOWER_BOUND_FACTOR};
pub use maximal::{
    exponent_sweep, fixed_time_lp, maximal_lp, maximal_time_grid, sweep_ratio, sweep_slope,
    check_sweep, MaximalEstimate, Sweep, SweepPoint, SweepSpec, SWEEP_MIN_LAMBDAS, SWEEP_MIN_SEEDS,
};
pub use rate::{
    dyadic_times, error_curve, error_values, fit_rate, predicted_rate, rms, select_window,
    ErrorCurve, RateFit, RateKind, FIT_NOISE_FLOOR, WINDOW_NOISE_FLOOR,
};
