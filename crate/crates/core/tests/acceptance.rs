//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Run with `cargo test -p slab-core --test acceptance`.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use slab_core::abc::{
    abc10_operator_1d, abc11_corner_operator, abc11_edge_operator, abc11_operator_1d, fj_operator_1d, AbcFamily,
    PdeOperator,
};
use slab_core::grid::{AxisSpec, Corner, Edge, GridSpec, Side1d};
use slab_core::linsolve::KrylovConfig;
use slab_core::metrics::{
    bright_soliton, l1_error, misprinted_soliton, pde_residual, reference_run, reflection_ratio,
    soliton_superposition, Enlargement, SolitonParams,
};
use slab_core::slab::{
    nonlinear_phase_step, simulate, BoundaryConfig, InitialCondition, Nonlinearity, ParamMode, PhysicsSpec,
    Potential, SimConfig, Simulation,
};
use slab_core::spectral::{
    pick_k0_weighted, windowed_dft, AdaptiveConfig, KGrid, SpectrumSample, Transform, WindowRule,
};

/// Outcome of one criterion: verdict plus the measured numbers.
struct Verdict {
    pass: bool,
    detail: String,
}

fn check(cond: bool, what: String, failures: &mut Vec<String>) {
    if !cond {
        failures.push(what);
    }
}

// ---------------------------------------------------------------------------
// Configurations

fn adaptive(length: f64, dx: f64, transform: Transform, p: f64, window: WindowRule) -> AdaptiveConfig {
    AdaptiveConfig { transform, p, window, k_grid: KGrid::for_domain(length, dx), k_floor: 0.05, refresh_every: 1 }
}

const TWO_SOLITONS: [SolitonParams; 2] = [
    SolitonParams { amplitude: 1.0, velocity: 2.0, center: 10.0 },
    SolitonParams { amplitude: 1.0, velocity: 5.0, center: 30.0 },
];

/// Two solitons on [0, 40], g = -2; the left side is fixed at k0 = 0.
fn two_solitons(dx: f64, right: ParamMode, adaptive_cfg: AdaptiveConfig) -> SimConfig {
    let grid = GridSpec::new_1d(AxisSpec::with_spacing(0.0, 40.0, dx).unwrap(), dx * dx).unwrap();
    let mut boundary = BoundaryConfig::uniform(AbcFamily::Abc11, right);
    boundary.set_mode(Edge::West, ParamMode::Fixed(0.0));
    SimConfig {
        grid,
        physics: PhysicsSpec { nonlinearity: Nonlinearity::Cubic { g: -2.0 }, potential: Potential::Constant(0.0) },
        initial: InitialCondition::Solitons(TWO_SOLITONS.to_vec()),
        boundary,
        adaptive: adaptive_cfg,
        solver: KrylovConfig::default(),
    }
}

struct Final {
    e1: f64,
    r: f64,
    seconds: f64,
}

fn run_two_solitons(dx: f64, right: ParamMode, transform: Transform, p: f64, window: WindowRule) -> Final {
    let start = Instant::now();
    let cfg = two_solitons(dx, right, adaptive(40.0, dx, transform, p, window));
    let grid = cfg.grid;
    let mut initial = Vec::new();
    let sim = simulate(cfg, 10.0, |s, d| {
        if d.is_none() {
            initial = s.field().current.clone();
        }
    })
    .expect("run completes");
    let exact = soliton_superposition(&TWO_SOLITONS, -2.0).unwrap();
    Final {
        e1: l1_error(&sim.field().current, &grid, |x, _| exact(x, 10.0)),
        r: reflection_ratio(&sim.field().current, &initial).unwrap(),
        seconds: start.elapsed().as_secs_f64(),
    }
}

// ---------------------------------------------------------------------------
// Criteria

fn table1_adaptive() -> Verdict {
    let quarter = WindowRule::Fixed(10.0);
    let gabor4 = run_two_solitons(0.1, ParamMode::Adaptive, Transform::Gabor, 4.0, quarter);
    let fourier4 = run_two_solitons(0.1, ParamMode::Adaptive, Transform::Fourier, 4.0, quarter);
    let gabor1 = run_two_solitons(0.1, ParamMode::Adaptive, Transform::Gabor, 1.0, quarter);
    let mut f = Vec::new();
    check((0.6e-3..=6e-3).contains(&gabor4.e1), format!("E1 {:.3e} outside [6e-4, 6e-3]", gabor4.e1), &mut f);
    check((2e-5..=3e-4).contains(&gabor4.r), format!("r {:.3e} outside [2e-5, 3e-4]", gabor4.r), &mut f);
    check(gabor4.seconds <= 30.0, format!("runtime {:.1}s > 30s", gabor4.seconds), &mut f);
    check(gabor4.e1 < fourier4.e1, "Gabor E1 not below Fourier E1".into(), &mut f);
    check(gabor1.r >= 5.0 * gabor4.r, format!("r(p=1)/r(p=4) = {:.2} < 5", gabor1.r / gabor4.r), &mut f);
    Verdict {
        pass: f.is_empty(),
        detail: format!(
            "gabor p4 E1={:.3e} r={:.3e} ({:.1}s); fourier p4 E1={:.3e}; gabor p1 r={:.3e} (ratio {:.1}){}",
            gabor4.e1,
            gabor4.r,
            gabor4.seconds,
            fourier4.e1,
            gabor1.r,
            gabor1.r / gabor4.r,
            failures_suffix(&f)
        ),
    }
}

fn table2_fixed() -> Verdict {
    let quarter = WindowRule::Fixed(10.0);
    let adaptive4 = run_two_solitons(0.1, ParamMode::Adaptive, Transform::Gabor, 4.0, quarter);
    let fixed5 = run_two_solitons(0.1, ParamMode::Fixed(5.0), Transform::Gabor, 4.0, quarter);
    let fixed2 = run_two_solitons(0.1, ParamMode::Fixed(2.0), Transform::Gabor, 4.0, quarter);
    let mut f = Vec::new();
    let ratio = fixed5.r / adaptive4.r;
    check(ratio >= 10.0, format!("r(k0=5)/r(adaptive) = {ratio:.1} < 10"), &mut f);
    check((1e-3..=1e-2).contains(&fixed2.e1), format!("E1(k0=2) {:.3e} outside [1e-3, 1e-2]", fixed2.e1), &mut f);
    Verdict {
        pass: f.is_empty(),
        detail: format!(
            "k0=5 r={:.3e} ({ratio:.0}x adaptive {:.3e}); k0=2 E1={:.3e}{}",
            fixed5.r,
            adaptive4.r,
            fixed2.e1,
            failures_suffix(&f)
        ),
    }
}

fn table3_window() -> Verdict {
    let betas = [0.5, 1.0, 2.0, 3.0, 4.0];
    let r: Vec<f64> = betas
        .iter()
        .map(|&b| run_two_solitons(0.05, ParamMode::Adaptive, Transform::Gabor, 4.0, WindowRule::Proportional(b)).r)
        .collect();
    let plateau = &r[1..];
    let hi = plateau.iter().copied().fold(0.0, f64::max);
    let lo = plateau.iter().copied().fold(f64::INFINITY, f64::min);
    let mut f = Vec::new();
    check(r[0] >= 2.0 * r[1], format!("r(0.5)/r(1) = {:.2} < 2", r[0] / r[1]), &mut f);
    check(hi <= 2.0 * lo, format!("plateau spread {:.2} > 2", hi / lo), &mut f);
    let listed: Vec<String> = betas.iter().zip(&r).map(|(b, r)| format!("b={b}: {r:.3e}")).collect();
    Verdict { pass: f.is_empty(), detail: format!("{}{}", listed.join(", "), failures_suffix(&f)) }
}

fn soliton_convergence() -> Verdict {
    let start = Instant::now();
    let soliton = SolitonParams { amplitude: 1.0, velocity: 2.0, center: 20.0 };
    let dxs = [0.2, 0.1, 0.05];
    let errors: Vec<f64> = dxs
        .iter()
        .map(|&dx| {
            let mut cfg = two_solitons(dx, ParamMode::Adaptive, adaptive(40.0, dx, Transform::Gabor, 4.0, WindowRule::Fixed(10.0)));
            cfg.initial = InitialCondition::Solitons(vec![soliton]);
            let grid = cfg.grid;
            let sim = simulate(cfg, 1.0, |_, _| {}).unwrap();
            l1_error(&sim.field().current, &grid, |x, _| bright_soliton(x, 1.0, &soliton, -2.0).unwrap())
        })
        .collect();
    let seconds = start.elapsed().as_secs_f64();
    // Least-squares slope of log E against log dx.
    let xs: Vec<f64> = dxs.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
    let order = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let pairwise: Vec<String> = errors.windows(2).map(|w| format!("{:.2}", (w[0] / w[1]).log2())).collect();
    let mut f = Vec::new();
    check(errors.windows(2).all(|w| w[1] < w[0]), "error does not decrease".into(), &mut f);
    check((1.7..=2.2).contains(&order), format!("order {order:.2} outside [1.7, 2.2]"), &mut f);
    check(seconds <= 60.0, format!("runtime {seconds:.1}s > 60s"), &mut f);
    Verdict {
        pass: f.is_empty(),
        detail: format!(
            "E1 = {:.3e}, {:.3e}, {:.3e}; fitted order {order:.2} (pairwise {}) in {seconds:.1}s{}",
            errors[0],
            errors[1],
            errors[2],
            pairwise.join(", "),
            failures_suffix(&f)
        ),
    }
}

fn random_field(rng: &mut StdRng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// Independent trapezoid sum in absolute coordinates.
fn dft_oracle(samples: &[Complex64], axis: &AxisSpec, a: usize, b: usize, k: f64) -> Complex64 {
    (a..=b)
        .map(|m| {
            let w = if m == a || m == b { 0.5 } else { 1.0 } * axis.spacing();
            samples[m] * Complex64::new(0.0, -k * axis.coord(m)).exp() * w
        })
        .sum()
}

fn dft_matches_oracle(rng: &mut StdRng) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let intervals = rng.gen_range(40..200);
        let lo = rng.gen_range(-20.0..20.0);
        let axis = AxisSpec::new(lo, lo + rng.gen_range(5.0..40.0), intervals).unwrap();
        let psi = random_field(rng, axis.points());
        let a = rng.gen_range(0..axis.points() / 2);
        let b = rng.gen_range(a + 4..axis.points());
        let k_grid = KGrid::new(rng.gen_range(0.05..0.5), PI / axis.spacing()).unwrap();
        let spec = windowed_dft(&psi, &axis, (axis.coord(a), axis.coord(b)), &k_grid).map_err(|e| e.to_string())?;
        let oracle: Vec<Complex64> = spec.k_values.iter().map(|&k| dft_oracle(&psi, &axis, a, b, k)).collect();
        let scale = oracle.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (v, o) in spec.values.iter().zip(&oracle) {
            worst = worst.max((v - o).norm() / scale);
        }
    }
    Ok(worst)
}

fn k0_picker_properties(rng: &mut StdRng) -> f64 {
    let mut worst = 0.0f64;
    for p in [1.0, 2.0, 4.0, 64.0] {
        for _ in 0..25 {
            let n = rng.gen_range(8..300);
            let step = rng.gen_range(0.01..0.5);
            let mags: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let base = pick_k0_weighted(&SpectrumSample::from_magnitudes(step, mags.clone()), p).unwrap();
            let c = 10f64.powf(rng.gen_range(-6.0..6.0));
            let scaled = mags.iter().map(|m| m * c).collect();
            let k = pick_k0_weighted(&SpectrumSample::from_magnitudes(step, scaled), p).unwrap();
            worst = worst.max((k - base).abs() / base.max(step));
            let spike = rng.gen_range(0..n);
            let mut delta = vec![0.0; n];
            delta[spike] = rng.gen_range(0.1..5.0);
            let k = pick_k0_weighted(&SpectrumSample::from_magnitudes(step, delta), p).unwrap();
            worst = worst.max((k - spike as f64 * step).abs());
        }
    }
    worst
}

/// `|symbol| / sum |term|` on the plane wave `(xi, eta, omega)`.
fn annihilation(op: &PdeOperator, xi: f64, eta: f64, omega: f64) -> f64 {
    let scale: f64 = op
        .terms
        .iter()
        .map(|t| {
            t.coeff.norm() * xi.abs().powi(t.x_order as i32) * eta.abs().powi(t.y_order as i32)
                * omega.abs().powi(t.t_order as i32)
        })
        .sum();
    op.symbol(xi, eta, omega).norm() / scale.max(1.0)
}

fn plane_wave_residuals() -> f64 {
    let mut worst = 0.0f64;
    let mut track = |r: f64| worst = worst.max(r);
    for (k0, v) in [(0.5, 0.0), (2.0, 0.3), (5.0, -1.2), (7.3, 2.0)] {
        let w = k0 * k0 + v;
        track(annihilation(&abc11_operator_1d(Side1d::Right, k0, v), k0, 0.0, w));
        track(annihilation(&abc11_operator_1d(Side1d::Left, k0, v), -k0, 0.0, w));
        for (a1, a2) in [(k0, k0), (k0, 1.5 * k0)] {
            for k in [a1, a2] {
                track(annihilation(&abc10_operator_1d(Side1d::Right, a1, a2, v).unwrap(), k, 0.0, k * k + v));
                track(annihilation(&abc10_operator_1d(Side1d::Left, a1, a2, v).unwrap(), -k, 0.0, k * k + v));
            }
        }
        let velocities = [2.0 * k0, 3.0 * k0, 0.5 * k0];
        for order in 1..=3 {
            let cs = &velocities[..order];
            for &c in cs {
                let k = c / 2.0;
                track(annihilation(&fj_operator_1d(Side1d::Right, cs).unwrap(), k, 0.0, k * k));
                track(annihilation(&fj_operator_1d(Side1d::Left, cs).unwrap(), -k, 0.0, k * k));
            }
        }
        for eta in [-3.0, -0.7, 0.0, 1.1, 4.0] {
            let w = k0 * k0 + eta * eta + v;
            track(annihilation(&abc11_edge_operator(Edge::East, k0, v), k0, eta, w));
            track(annihilation(&abc11_edge_operator(Edge::West, k0, v), -k0, eta, w));
            track(annihilation(&abc11_edge_operator(Edge::North, k0, v), eta, k0, w));
            track(annihilation(&abc11_edge_operator(Edge::South, k0, v), eta, -k0, w));
        }
        for eta0 in [0.4, k0, 3.3] {
            let w = k0 * k0 + eta0 * eta0 + v;
            for corner in Corner::ALL {
                let xi = if corner.x_edge() == Edge::East { k0 } else { -k0 };
                let eta = if corner.y_edge() == Edge::North { eta0 } else { -eta0 };
                track(annihilation(&abc11_corner_operator(corner, k0, eta0, v), xi, eta, w));
            }
        }
    }
    worst
}

fn phase_step_modulus(rng: &mut StdRng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let psi: Vec<Complex64> = random_field(rng, 64).iter().map(|z| z * 3.0).collect();
        let g = rng.gen_range(-10.0..10.0);
        let dt = rng.gen_range(1e-4..1.0);
        let out = nonlinear_phase_step(&psi, Nonlinearity::Cubic { g }, dt);
        for (a, b) in psi.iter().zip(&out) {
            worst = worst.max((a.norm() - b.norm()).abs());
        }
    }
    worst
}

fn dirichlet_mass_drift() -> (f64, f64) {
    let a = AxisSpec::with_spacing(0.0, 10.0, 0.1).unwrap();
    let cfg = SimConfig {
        grid: GridSpec::new_2d(a, a, 0.01).unwrap(),
        physics: PhysicsSpec { nonlinearity: Nonlinearity::Cubic { g: -1.0 }, potential: Potential::Constant(0.0) },
        initial: InitialCondition::Gaussian { amplitude: 1.0, rate: 2.0, x0: 5.0, kx: 1.0, y0: 5.0, ky: -0.5 },
        boundary: BoundaryConfig::uniform(AbcFamily::Dirichlet, ParamMode::Adaptive),
        adaptive: adaptive(10.0, 0.1, Transform::Gabor, 4.0, WindowRule::Fixed(2.5)),
        solver: KrylovConfig::default(),
    };
    let tol = cfg.solver.tol;
    let mut prev = None;
    let mut worst = 0.0f64;
    simulate(cfg, 1.0, |s, _| {
        let m = s.mass();
        if let Some(p) = prev {
            worst = worst.max((m - p) / p).max((p - m) / p);
        }
        prev = Some(m);
    })
    .unwrap();
    (worst, tol)
}

fn soliton_residuals() -> (f64, f64) {
    let physics = PhysicsSpec { nonlinearity: Nonlinearity::Cubic { g: -2.0 }, potential: Potential::Constant(0.0) };
    let s = SolitonParams { amplitude: 1.0, velocity: 2.0, center: 20.0 };
    let samples: Vec<(f64, f64, f64)> =
        [(18.0, 0.0), (20.0, 0.0), (21.3, 0.4), (22.5, 1.0), (25.0, 1.5)].iter().map(|&(x, t)| (x, 0.0, t)).collect();
    let good = pde_residual(|x, _, t| bright_soliton(x, t, &s, -2.0).unwrap(), &physics, 1, &samples);
    let centred: Vec<(f64, f64, f64)> = [(-1.0, 0.0), (0.0, 0.0), (0.5, 0.2), (2.0, 0.5)].iter().map(|&(x, t)| (x, 0.0, t)).collect();
    let printed = pde_residual(|x, _, t| misprinted_soliton(x, t, 1.0, 2.0, -2.0), &physics, 1, &centred);
    (good, printed)
}

fn property_suites() -> Verdict {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut f = Vec::new();
    let dft = dft_matches_oracle(&mut rng);
    match &dft {
        Ok(e) => check(*e <= 1e-12, format!("(a) dft error {e:.2e}"), &mut f),
        Err(e) => f.push(format!("(a) {e}")),
    }
    let picker = k0_picker_properties(&mut rng);
    check(picker <= 1e-12, format!("(b) picker error {picker:.2e}"), &mut f);
    let plane = plane_wave_residuals();
    check(plane <= 1e-12, format!("(c) plane-wave residual {plane:.2e}"), &mut f);
    let phase = phase_step_modulus(&mut rng);
    check(phase <= 1e-14, format!("(d) modulus change {phase:.2e}"), &mut f);
    let (drift, tol) = dirichlet_mass_drift();
    check(drift <= 10.0 * tol, format!("(e) mass drift {drift:.2e} per step"), &mut f);
    let (good, printed) = soliton_residuals();
    check(good <= 1e-8, format!("(f) soliton residual {good:.2e}"), &mut f);
    check(printed >= 1e-1, format!("(f) printed-phase residual {printed:.2e}"), &mut f);
    Verdict {
        pass: f.is_empty(),
        detail: format!(
            "(a) {:.1e} (b) {picker:.1e} (c) {plane:.1e} (d) {phase:.1e} (e) {drift:.1e}/step (f) {good:.1e} vs printed {printed:.1e}{}",
            dft.unwrap_or(f64::NAN),
            failures_suffix(&f)
        ),
    }
}

fn example2() -> Verdict {
    let start = Instant::now();
    let dx = 0.1;
    let cfg = SimConfig {
        grid: GridSpec::new_1d(AxisSpec::with_spacing(0.0, 30.0, dx).unwrap(), 0.01).unwrap(),
        physics: PhysicsSpec {
            nonlinearity: Nonlinearity::Cubic { g: 2.0 },
            potential: Potential::Gaussian { amplitude: 1.0, sigma: 1.0, x0: 15.0, y0: 0.0 },
        },
        initial: InitialCondition::Gaussian { amplitude: 1.0, rate: 0.1, x0: 15.0, kx: 0.0, y0: 0.0, ky: 0.0 },
        boundary: BoundaryConfig::uniform(AbcFamily::Abc11, ParamMode::Adaptive),
        adaptive: adaptive(30.0, dx, Transform::Gabor, 4.0, WindowRule::Fixed(7.5)),
        solver: KrylovConfig::default(),
    };
    let k_step = cfg.adaptive.k_grid.step;
    let reference = reference_run(&cfg, Enlargement::Symmetric(2.0), 6.0, &[6.0]).unwrap();
    let mut peak0 = 0.0;
    let mut contact: Option<f64> = None;
    // Running minimum after contact, per side, and the worst rise above it.
    let mut floor = [f64::INFINITY; 2];
    let mut worst_rise = 0.0f64;
    let sim = simulate(cfg, 6.0, |s, d| {
        let psi = &s.field().current;
        if d.is_none() {
            peak0 = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
            return;
        }
        let edge = psi[0].norm().max(psi[psi.len() - 1].norm());
        if contact.is_none() && edge > 1e-2 * peak0 {
            contact = Some(s.time());
        }
        if contact.is_some() {
            for (side, f) in floor.iter_mut().enumerate() {
                let k = s.profiles()[side][0];
                worst_rise = worst_rise.max(k - *f);
                *f = f.min(k);
            }
        }
    })
    .unwrap();
    let seconds = start.elapsed().as_secs_f64();
    let err = sim
        .field()
        .current
        .iter()
        .zip(reference.at(6.0).unwrap())
        .map(|(a, b)| (a.norm() - b.norm()).abs())
        .fold(0.0, f64::max);
    let mut f = Vec::new();
    check(err <= 5e-2, format!("max | |psi| - |ref| | = {err:.3e} > 5e-2"), &mut f);
    check(contact.is_some(), "no boundary contact".into(), &mut f);
    check(worst_rise <= k_step, format!("k0 rose by {worst_rise:.3e} > {k_step:.3e}"), &mut f);
    check(seconds <= 120.0, format!("runtime {seconds:.1}s > 120s"), &mut f);
    Verdict {
        pass: f.is_empty(),
        detail: format!(
            "max |psi| error {err:.3e}; contact at t={:.2}; worst k0 rise {worst_rise:.2e} (spacing {k_step:.3e}); final k0 {:.2}/{:.2}; {seconds:.1}s{}",
            contact.unwrap_or(f64::NAN),
            sim.profiles()[0][0],
            sim.profiles()[1][0],
            failures_suffix(&f)
        ),
    }
}

fn example3_config(h: f64) -> SimConfig {
    let a = AxisSpec::with_spacing(0.0, 10.0, h).unwrap();
    SimConfig {
        grid: GridSpec::new_2d(a, a, h * h).unwrap(),
        physics: PhysicsSpec { nonlinearity: Nonlinearity::Cubic { g: -1.0 }, potential: Potential::Constant(0.0) },
        initial: InitialCondition::Gaussian { amplitude: 2f64.sqrt(), rate: 1.0, x0: 5.0, kx: 2.0, y0: 5.0, ky: 2.0 },
        boundary: BoundaryConfig::uniform(AbcFamily::Abc11, ParamMode::Adaptive),
        adaptive: adaptive(10.0, h, Transform::Gabor, 4.0, WindowRule::Fixed(2.5)),
        solver: KrylovConfig::default(),
    }
}

const PROBES: [(f64, f64); 2] = [(10.0, 10.0), (10.0, 5.0)];

fn example3() -> Verdict {
    let fine = 0.05;
    let record: Vec<f64> = (1..=40).map(|k| 0.05 * k as f64).collect();
    let ref_start = Instant::now();
    let reference = reference_run(&example3_config(fine), Enlargement::Upper(2.0), 2.0, &record).unwrap();
    let ref_seconds = ref_start.elapsed().as_secs_f64();
    let rg = reference.grid;
    let ref_ids: Vec<usize> =
        PROBES.iter().map(|&(x, y)| rg.id(rg.x.nearest_index(x), rg.y.unwrap().nearest_index(y))).collect();

    let mut rows = Vec::new();
    for h in [0.1, fine] {
        let start = Instant::now();
        let cfg = example3_config(h);
        let g = cfg.grid;
        let ids: Vec<usize> =
            PROBES.iter().map(|&(x, y)| g.id(g.x.nearest_index(x), g.y.unwrap().nearest_index(y))).collect();
        let mut errs = [0.0f64; 2];
        let sim: Simulation = simulate(cfg, 2.0, |s, _| {
            let t = s.time();
            let on_record = ((t / 0.05).round() - t / 0.05).abs() < 1e-6 && t > 0.0;
            if let (true, Some(snap)) = (on_record, reference.at(t)) {
                for k in 0..2 {
                    let here = s.field().current[ids[k]].norm();
                    errs[k] = errs[k].max((here - snap[ref_ids[k]].norm()).abs());
                }
            }
        })
        .unwrap();
        rows.push((h, sim.mass() / sim.initial_mass(), errs, start.elapsed().as_secs_f64()));
    }
    let (coarse, fine_row) = (&rows[0], &rows[1]);
    let mut f = Vec::new();
    check(coarse.1 <= 0.05, format!("r(2) at h=0.1 = {:.3e} > 0.05", coarse.1), &mut f);
    check(coarse.3 <= 60.0, format!("h=0.1 runtime {:.1}s > 60s", coarse.3), &mut f);
    check(fine_row.3 <= 600.0, format!("h=0.05 runtime {:.1}s > 600s", fine_row.3), &mut f);
    for k in 0..2 {
        check(
            fine_row.2[k] < coarse.2[k],
            format!("probe {:?} error did not decrease ({:.2e} -> {:.2e})", PROBES[k], coarse.2[k], fine_row.2[k]),
            &mut f,
        );
    }
    let listed: Vec<String> = rows
        .iter()
        .map(|(h, r, e, s)| format!("h={h}: r(2)={r:.3e} probe errors {:.2e}/{:.2e} ({s:.1}s)", e[0], e[1]))
        .collect();
    Verdict {
        pass: f.is_empty(),
        detail: format!("{}; reference {ref_seconds:.0}s{}", listed.join("; "), failures_suffix(&f)),
    }
}

fn failures_suffix(f: &[String]) -> String {
    if f.is_empty() {
        String::new()
    } else {
        format!(" -- {}", f.join("; "))
    }
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 7] = [
        ("1 table 1, adaptive parameters", table1_adaptive),
        ("2 table 2, fixed parameters", table2_fixed),
        ("3 table 3, proportional window", table3_window),
        ("4 soliton convergence", soliton_convergence),
        ("5 oracle and invariant suites", property_suites),
        ("6 example 2, Gaussian pulse", example2),
        ("7 example 3, two-dimensional packet", example3),
    ];
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (name, f) in criteria {
        if filter.as_deref().is_some_and(|p| !name.contains(p)) {
            continue;
        }
        let v = f();
        if !v.pass {
            failed += 1;
        }
        println!("{} criterion {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
