#[allow(unused_imports)] // float math is a trait on bare-metal targets
use num_traits::Float as _;

/// `exp(1 − 1/(1 − u²))` for `|u| < 1`, zero otherwise; equals 1 at `u = 0`.
fn profile(u: f64) -> f64 {
    let v = 1.0 - u * u;
    if v <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / v).exp()
    }
}

/// Smooth bump in `r > 0`, positive exactly on `1/2 < r < 2`, with value 1 at `r = 1`.
pub fn annular_bump(r: f64) -> f64 {
    if !(r > 0.0) {
        return 0.0;
    }
    profile(r.log2())
}

/// Smooth radial bump positive exactly on `|ξ| < 2`, with value 1 at the origin.
pub fn ball_bump(r: f64) -> f64 {
    profile(0.5 * r)
}
