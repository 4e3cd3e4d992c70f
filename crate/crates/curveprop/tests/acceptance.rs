//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.
//!
//! Run with `cargo test -p curveprop --test acceptance`.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use curveprop::fast::{evolve_uniform_fast, SpatialGrid};
use curveprop::parallel;
use curveprop_core::decomp::{
    dyadic_decompose, time_intervals, AnisotropicTiling, KernelSpec, KERNEL_NOISE_FLOOR,
};
use curveprop_core::experiments::{
    dyadic_times, error_values, exponent_sweep, fit_rate, lower_bound_check, SweepSpec, LOWER_BOUND_FACTOR,
};
use curveprop_core::propagator::{calibrate_lattice_constant, lattice_probes, LatticeWeights};
use curveprop_core::rng::CounterRng;
use curveprop_core::{Ball, Curve, FrequencyGrid, Propagator, SpectralField, Symbol, C64};

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

// ∫ e^{ixξ + itξ² − ξ²} dξ = √(π/(1−it)) · exp(−x²/(4(1−it)))
fn gaussian_exact(x: f64, t: f64) -> C64 {
    let a = C64::new(1.0, -t);
    (C64::from(std::f64::consts::PI) / a).sqrt() * (-(x * x) / (4.0 * a)).exp()
}

fn gaussian_oracle() -> Outcome {
    let grid = FrequencyGrid::default_for(1).unwrap();
    let f = SpectralField::gaussian(grid, 1.0).unwrap();
    let p = Symbol::elliptic(1).unwrap();
    let prop = Propagator::new(&f, &p).unwrap();
    let mut rng = CounterRng::new(20).stream(0);
    let mut worst: f64 = 0.0;
    for _ in 0..32 {
        let x = 3.0 * rng.next_symmetric();
        let t = rng.next_f64();
        let exact = gaussian_exact(x, t);
        let v = prop.evolve_at(&[x], t).unwrap();
        worst = worst.max((v - exact).norm() / exact.norm());
    }
    outcome(worst <= 1e-6, format!("max relative error {worst:.2e} over 32 (x,t) (tol 1e-6)"))
}

fn conservation() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut identical = true;
    for n in [1usize, 2] {
        let grid = FrequencyGrid::default_for(n).unwrap();
        let f = SpectralField::band_limited_random(grid, 8.0, 4).unwrap();
        let p = Symbol::elliptic(n).unwrap();
        let prop = Propagator::new(&f, &p).unwrap();
        let l2 = f.l2_norm();
        for t in [1e-6, 0.1, 0.5, 1.0] {
            let e = prop.evolved_field(t).unwrap().l2_norm();
            worst = worst.max((e - l2).abs() / l2);
        }
        for x in Ball::unit(n).sample(8, 1).chunks(n) {
            identical &= prop.evolve_at(x, 0.0).unwrap() == f.point_eval(x);
        }
    }
    outcome(
        worst <= 1e-12 && identical,
        format!("max relative L² drift {worst:.2e} (tol 1e-12); t=0 bit-identical: {identical}"),
    )
}

fn fast_path() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in [1usize, 2] {
        let (grid, m) = if n == 1 {
            (FrequencyGrid::new(1, 16.0, 512).unwrap(), 1024)
        } else {
            (FrequencyGrid::new(2, 8.0, 48).unwrap(), 64)
        };
        let f = SpectralField::gaussian(grid.clone(), 1.0).unwrap();
        let sg = SpatialGrid::dual(&grid, m, -4.0).unwrap();
        let pts: Vec<f64> = (0..sg.len()).flat_map(|i| sg.point(i)).collect();
        let mut syms = vec![Symbol::elliptic(n).unwrap(), Symbol::fractional(n, 1.5).unwrap()];
        let mut terms = BTreeMap::new();
        if n == 2 {
            syms.push(Symbol::nonelliptic(2, vec![]).unwrap());
            syms.push(Symbol::polynomial2d(2, 3, 1).unwrap());
            syms.push(Symbol::polynomial2d(3, 4, -1).unwrap());
            terms.insert(vec![1, 2], 1.0);
        } else {
            terms.insert(vec![3], 1.0);
        }
        syms.push(Symbol::polynomial(n, terms).unwrap());
        for p in &syms {
            let t = 0.05;
            let fast = evolve_uniform_fast(&f, p, &sg, t).unwrap();
            let direct = Propagator::new(&f, p).unwrap().evolve_points(&pts, t).unwrap();
            let scale = direct.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let err = fast.iter().zip(&direct).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            worst = worst.max(err / scale);
            count += 1;
        }
    }
    outcome(worst <= 1e-9, format!("max relative deviation {worst:.2e} over {count} symbols in n=1,2 (tol 1e-9)"))
}

fn rate_fit() -> Outcome {
    let grid = FrequencyGrid::default_for(1).unwrap();
    let p = Symbol::elliptic(1).unwrap();
    let alpha = 0.5;
    let curve = Curve::shift_e1(1, alpha).unwrap();
    let base = Ball::unit(1).sample(64, 3);
    let times = dyadic_times(5, 12);
    let mut pass = true;
    let mut parts = Vec::new();
    for delta in [0.0, 0.5, 1.0] {
        let f = SpectralField::graded(grid.clone(), 0.0, delta, 7).unwrap();
        let prop = Propagator::new(&f, &p).unwrap();
        let ec = parallel::error_curve(&prop, &curve, &base, &times).unwrap();
        let target = (alpha * delta / 2.0).min(alpha);
        match fit_rate(&ec, 0..times.len()) {
            Ok(fit) => {
                pass &= (fit.theta - target).abs() <= 0.1;
                parts.push(format!("δ={delta}: θ={:.3} vs {target:.3}", fit.theta));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("δ={delta}: {e}"));
            }
        }
    }
    outcome(pass, format!("{} (tol ±0.1, t ∈ [2⁻¹², 2⁻⁵])", parts.join("; ")))
}

fn lower_bound() -> Outcome {
    let grid = FrequencyGrid::default_for(1).unwrap();
    let f = SpectralField::gaussian(grid, 1.0).unwrap();
    let p = Symbol::elliptic(1).unwrap();
    let xs = Ball::unit(1).sample(32, 5);
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [0.5, 1.0] {
        let lb = lower_bound_check(&f, &p, alpha, &xs, &dyadic_times(8, 14)).unwrap();
        pass &= lb.passed && lb.floor > 0.0 && lb.liminf_ratio >= LOWER_BOUND_FACTOR * lb.floor;
        parts.push(format!("α={alpha}: liminf {:.4} vs floor {:.4}", lb.liminf_ratio, lb.floor));
    }
    outcome(pass, format!("{} (need liminf ≥ 0.9·floor, floor > 0)", parts.join("; ")))
}

fn lattice() -> Outcome {
    let grid = FrequencyGrid::default_for(1).unwrap();
    let p = Symbol::elliptic(1).unwrap();
    let alpha = 0.5;
    let curve = Curve::shift_e1(1, alpha).unwrap();
    let ball = Ball::unit(1);
    let mut violations = 0;
    let mut tested = 0;
    let mut parts = Vec::new();
    for lambda in [8.0, 16.0] {
        let f = SpectralField::band_limited_random(grid.clone(), lambda, 13).unwrap();
        let prop = Propagator::new(&f, &p).unwrap();
        let calibration = lattice_probes(&ball, alpha, lambda, 200, 100);
        let c = calibrate_lattice_constant(&curve, lambda, &calibration, 16).unwrap();
        let w = LatticeWeights::new(1, 16, c).unwrap();
        let mut min_margin = f64::INFINITY;
        for (x, t) in lattice_probes(&ball, alpha, lambda, 100, 200) {
            let b = prop.lattice_translate_bound(&curve, &x, t, &w).unwrap();
            tested += 1;
            if b.lhs > b.rhs {
                violations += 1;
            }
            min_margin = min_margin.min(b.margin / b.rhs);
        }
        parts.push(format!("λ={lambda}: C={c:.3}, min relative margin {min_margin:.3}, tail {:.3}", w.tail()));
    }
    outcome(violations == 0, format!("{violations} violations in {tested} (x,t); {}", parts.join("; ")))
}

fn decomposition() -> Outcome {
    let grid = FrequencyGrid::default_for(1).unwrap();
    let f = SpectralField::sobolev_profile(grid, 0.5, 3).unwrap();
    let pieces = dyadic_decompose(&f).unwrap();
    let mut sum = vec![C64::new(0.0, 0.0); f.samples().len()];
    for piece in &pieces {
        for (s, v) in sum.iter_mut().zip(piece.field.samples()) {
            *s += v;
        }
    }
    let scale = f.samples().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let recon = sum.iter().zip(f.samples()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;

    let count = |lambda: f64| AnisotropicTiling::new(2, 3, lambda).unwrap().active_indices().len();
    let counts: Vec<usize> = [32.0, 64.0, 128.0, 256.0].iter().map(|&l| count(l)).collect();
    let growth_ok = counts.windows(2).all(|w| w[1] <= w[0] + 2);
    let c64 = counts[1];

    let tiling = time_intervals(64.0, 2).unwrap();
    let exact_len = tiling.length() == 64f64.powi(-1);
    let max_overlap = (0..=10_000).map(|i| tiling.multiplicity(i as f64 / 10_000.0)).max().unwrap();
    let min_overlap = (0..=10_000).map(|i| tiling.multiplicity(i as f64 / 10_000.0)).min().unwrap();
    let covered = (tiling.covered_measure() - 1.0).abs() < 1e-12;

    let pass = recon <= 1e-12
        && (3..=5).contains(&c64)
        && growth_ok
        && exact_len
        && covered
        && min_overlap >= 1
        && max_overlap <= 2;
    outcome(
        pass,
        format!(
            "reconstruction {recon:.1e} (tol 1e-12); active tiles λ=32..256: {counts:?} (λ=64 in 3..=5, growth ≤ 2); \
             intervals: {} of length λ^(1-m₁) exact={exact_len}, overlap {min_overlap}..={max_overlap}",
            tiling.len()
        ),
    )
}

fn kernel_decay() -> Outcome {
    let lambda = 16.0;
    let mut pass = true;
    let mut parts = Vec::new();
    for (m1, m2) in [(2u32, 2u32), (2, 3)] {
        let curve = Curve::shift_e1(2, 1.0 / (m1 as f64 - 1.0)).unwrap();
        let active = AnisotropicTiling::new(m1, m2, lambda).unwrap().active_indices();
        let k = active[active.len() / 2];
        let spec = KernelSpec::new(m1, m2, 1, lambda, k, curve).unwrap();
        let near = spec.near_zone();
        let seps: Vec<f64> = [1.0, 2.0, 4.0, 8.0].iter().map(|f| f * near).collect();
        let d = parallel::kernel_decay(&spec, &[0.0, 0.0], &[0.0, 0.0], &seps).unwrap();
        let ratio = d.abs_values[d.abs_values.len() - 1] / d.abs_values[0];
        let ok = d.slope <= -1.0 && ratio <= 0.25 && d.resolved && !d.at_noise_floor;
        pass &= ok;
        parts.push(format!(
            "({m1},{m2}) k={k}: slope {:.3}, last/first {ratio:.3}, resolved {}, at noise floor ({KERNEL_NOISE_FLOOR:.0e}) {}",
            d.slope, d.resolved, d.at_noise_floor
        ));
    }
    outcome(pass, format!("{} (need slope ≤ −1, ratio ≤ 1/4)", parts.join("; ")))
}

fn exponent() -> Outcome {
    let grid = FrequencyGrid::default_for(1).unwrap();
    let p = Symbol::elliptic(1).unwrap();
    let curve = Curve::vertical(1).unwrap();
    let ball = Ball::unit(1);
    let spec = SweepSpec::default();
    let lambdas = [8.0, 16.0, 32.0];
    let seeds: Vec<u64> = (0..8).collect();
    let a = parallel::exponent_sweep(&grid, &p, &curve, &ball, &spec, &lambdas, &seeds).unwrap();
    let b = exponent_sweep(&grid, &p, &curve, &ball, &spec, &lambdas, &seeds).unwrap();
    let deterministic = a == b;
    outcome(
        a.slope <= 0.75 && deterministic,
        format!("exponent {:.4} (tol ≤ 0.75); parallel == serial rerun: {deterministic}", a.slope),
    )
}

fn small_time() -> Outcome {
    let grid = FrequencyGrid::default_for(1).unwrap();
    let p = Symbol::elliptic(1).unwrap();
    let lambda: f64 = 8.0;
    let mut rng = CounterRng::new(77).stream(0);
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for seed in 0..10u64 {
        let f = SpectralField::band_limited_random(grid.clone(), lambda, seed).unwrap();
        let prop = Propagator::new(&f, &p).unwrap();
        // rounding of the quadrature sums themselves
        let slack = 8.0 * f64::EPSILON * f.l1_norm();
        for j in 0..100 {
            let alpha = [0.25, 0.5, 1.0][j % 3];
            let curve = Curve::shift_e1(1, alpha).unwrap();
            let t = (rng.next_f64() * lambda.powf(-2.0 / alpha)).max(1e-300);
            let x = 2.0 * rng.next_symmetric();
            let e = error_values(&prop, &curve, &[x], t).unwrap()[0];
            let (osc, shift) = prop.small_time_error_bounds(&curve, &[x], t).unwrap();
            if e > osc + shift + slack {
                violations += 1;
            }
            if osc + shift > 0.0 {
                worst = worst.max(e / (osc + shift));
            }
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations in 1000 samples, max E/(osc+shift) = {worst:.3}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("gaussian oracle", gaussian_oracle),
        ("conservation and identity", conservation),
        ("fast-path equivalence", fast_path),
        ("rate fit", rate_fit),
        ("lower bound", lower_bound),
        ("lattice inequality", lattice),
        ("decomposition suite", decomposition),
        ("kernel decay", kernel_decay),
        ("exponent sweep", exponent),
        ("small-time bounds", small_time),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "{} {:>2} {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
