//! Acceptance run: one PASS/FAIL line per criterion, then a single assertion.
//!
//! Run with `cargo test -p layerwave --test acceptance -- --nocapture` to see the lines.

use std::f64::consts::PI;
use std::time::Instant;

use layerwave::analysis::{
    amplitude_ratios, decay_bound_check, default_eps, existence_condition, existence_verify, monotone_checks,
    nonconcentration_floor, three_layer_ratios, threshold_recipe, zero_gap_bound, zeros, bv_convergence,
};
use layerwave::cross_section::CrossSection;
use layerwave::general_solver::{
    fd_oracle, liouville_residual, liouville_transform, numerov_solve, pruefer_count, pruefer_eigenvalues, StepControl,
};
use layerwave::layer_solver::{
    build_eigenfunction, dispersion, eigenpair, eigenvalues_in_window, Channel, Eigenfunction1D, Eigenpair,
};
use layerwave::profile::{find_well, Coefficient, Interpolation, LayeredProfile, SampleRule, SampledProfile};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

const REL_TOL: f64 = 1e-13;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(n: usize, title: &str, o: &Outcome) {
    let tag = if o.pass { "PASS" } else { "FAIL" };
    println!("criterion {n:>2} [{title}]: {tag}  {}", o.detail);
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn modes(pairs: &[Eigenpair], p: &LayeredProfile) -> Vec<Eigenfunction1D> {
    pairs.iter().map(|e| build_eigenfunction(e, p).unwrap()).collect()
}

// 1. c ≡ c₀ on (0, π) with L = π: λ = c₀(k² + ℓ²), u = √(2c₀/π) sin ℓy.
fn constant_profile() -> Outcome {
    let start = Instant::now();
    let c0 = 1.7;
    let p = LayeredProfile::constant(PI, c0).unwrap();
    let (mut worst_lambda, mut worst_u, mut count_ok) = (0.0f64, 0.0f64, true);
    for k in 1..=20u32 {
        let kf = k as f64;
        let ch = Channel::new(k as usize, kf);
        let pairs = eigenvalues_in_window(ch, c0 * (kf * kf + 0.25), c0 * (kf * kf + 20.25 * 20.25), &p, REL_TOL)
            .unwrap();
        count_ok &= pairs.len() == 20;
        for e in &pairs {
            let l = e.ell as f64;
            let exact = c0 * (kf * kf + l * l);
            worst_lambda = worst_lambda.max((e.lambda - exact).abs() / exact);
            let ef = build_eigenfunction(e, &p).unwrap();
            let amp = (2.0 * c0 / PI).sqrt();
            for i in 0..=1000 {
                let y = PI * i as f64 / 1000.0;
                let (u, _) = ef.evaluate(y).unwrap();
                worst_u = worst_u.max((u - amp * (l * y).sin()).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: count_ok && worst_lambda < 1e-10 && worst_u < 1e-9 && secs < 1.0,
        detail: format!("max rel eigenvalue error {worst_lambda:.2e} (< 1e-10), max sup error {worst_u:.2e} (< 1e-9), {secs:.3} s (< 1 s)"),
    }
}

enum TestProfile {
    Layered(LayeredProfile),
    Sampled(SampledProfile),
}

fn oracle_profiles() -> Vec<(&'static str, TestProfile)> {
    let ten = vec![1.0, 1.8, 1.3, 2.6, 2.1, 3.0, 1.5, 2.4, 1.1, 2.0];
    vec![
        ("2-layer", TestProfile::Layered(LayeredProfile::new(vec![0.0, 0.375, 1.0], vec![1.0, 3.0]).unwrap())),
        (
            "3-layer",
            TestProfile::Layered(LayeredProfile::new(vec![0.0, 0.25, 0.625, 1.0], vec![2.0, 1.0, 3.5]).unwrap()),
        ),
        ("10-layer", TestProfile::Layered(LayeredProfile::uniform(1.0, ten).unwrap())),
        (
            "linear",
            TestProfile::Sampled(
                SampledProfile::from_fn(1.0, 256, Interpolation::PiecewiseLinear, |y| 1.0 + y).unwrap(),
            ),
        ),
        (
            "quadratic",
            TestProfile::Sampled(
                SampledProfile::from_fn(1.0, 256, Interpolation::PiecewiseLinear, |y| 1.5 + 2.0 * (y - 0.5).powi(2))
                    .unwrap(),
            ),
        ),
    ]
}

// A λ with exactly `n` eigenvalues at or below it, by bisection on the phase count.
fn window_top(ch: Channel, p: &SampledProfile, control: &StepControl, lo: f64, n: u32) -> f64 {
    let count = |l: f64| pruefer_count(l, ch, p, control).unwrap().zero_count;
    let (mut a, mut b) = (lo, 2.0 * lo);
    while count(b) <= n {
        b *= 2.0;
    }
    loop {
        let mid = 0.5 * (a + b);
        match count(mid) {
            c if c == n => return mid,
            c if c < n => a = mid,
            _ => b = mid,
        }
    }
}

// 2. Layered and Prüfer eigenvalues against the finite-difference oracle.
fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let ch = Channel::new(2, 2.0 * PI);
    let control = StepControl::default();
    let grid_n = 5120;
    let mut pass = true;
    let mut notes = Vec::new();
    let mut worst_ratio = 0.0f64;
    for (name, tp) in oracle_profiles() {
        let (c_m, _) = match &tp {
            TestProfile::Layered(p) => p.extremes(),
            TestProfile::Sampled(p) => p.extremes(),
        };
        let lo = 0.999 * c_m * ch.mu2();
        let mut lists: Vec<Vec<Eigenpair>> = Vec::new();
        let fd = match &tp {
            TestProfile::Layered(p) => {
                let l30 = eigenpair(ch, 30, p, REL_TOL).unwrap().lambda;
                let l31 = eigenpair(ch, 31, p, REL_TOL).unwrap().lambda;
                let hi = 0.5 * (l30 + l31);
                lists.push(eigenvalues_in_window(ch, lo, hi, p, REL_TOL).unwrap());
                let s = SampledProfile::from_layered(p);
                lists.push(pruefer_eigenvalues(ch, lo, hi, &s, &control, REL_TOL).unwrap());
                fd_oracle(ch, p, lo, hi, grid_n).unwrap()
            }
            TestProfile::Sampled(p) => {
                let hi = window_top(ch, p, &control, lo, 30);
                lists.push(pruefer_eigenvalues(ch, lo, hi, p, &control, REL_TOL).unwrap());
                fd_oracle(ch, p, lo, hi, grid_n).unwrap()
            }
        };
        for list in &lists {
            let counts_match = list.len() == 30 && fd.count() == 30;
            let indices_match = list.iter().zip(&fd.eigenvalues).all(|(a, b)| a.ell as usize == b.index);
            let mut within = true;
            for (a, b) in list.iter().zip(&fd.eigenvalues) {
                let err = (a.lambda - b.lambda).abs();
                worst_ratio = worst_ratio.max(err / b.error_band);
                within &= err <= b.error_band;
            }
            if !(counts_match && indices_match && within) {
                pass = false;
                notes.push(format!("{name}: counts {} vs {}, within band {within}", list.len(), fd.count()));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 30.0;
    Outcome {
        pass,
        detail: format!(
            "5 profiles x 30 eigenvalues, max |solver - oracle| / band = {worst_ratio:.3} (<= 1), counts equal, {secs:.2} s (< 30 s) {}",
            notes.join("; ")
        ),
    }
}

// 3. Two-layer (1, 4) guided modes, k = 5..80.
fn guided_decay() -> Outcome {
    let p = LayeredProfile::new(vec![0.0, 0.5, 1.0], vec![1.0, 4.0]).unwrap();
    let well = find_well(&p, 4.0).unwrap().unwrap();
    let eps = default_eps(&p);
    let band = (0.75, 1.0);
    let cs = CrossSection::interval(1.0).unwrap();
    let (mut all_hold, mut total) = (true, 0usize);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for mode in cs.mu_values(80).iter().skip(4) {
        let ch = Channel::from(mode);
        let pairs = eigenvalues_in_window(ch, ch.mu2(), (4.0 - eps) * ch.mu2(), &p, REL_TOL).unwrap();
        for (i, ef) in modes(&pairs, &p).iter().enumerate() {
            let v = decay_bound_check(ef, &well, band, 0.5).unwrap();
            all_hold &= v.holds;
            total += 1;
            if i == 0 {
                xs.push(v.xi * v.d);
                ys.push(v.lhs.ln());
            }
        }
    }
    let s = slope(&xs, &ys);
    Outcome {
        pass: all_hold && s <= -0.95,
        detail: format!("{total} guided modes, bound holds for all: {all_hold}; slope of ln(mass) on xi*d = {s:.3} (<= -0.95)"),
    }
}

fn random_profile(rng: &mut ChaCha8Rng) -> LayeredProfile {
    loop {
        let layers = rng.random_range(2..=10usize);
        let mut cuts: Vec<f64> = (0..layers - 1).map(|_| rng.random_range(0.05..0.95)).collect();
        cuts.sort_by(f64::total_cmp);
        let mut bp = vec![0.0];
        bp.extend(cuts);
        bp.push(1.0);
        if bp.windows(2).any(|w| w[1] - w[0] < 0.02) {
            continue;
        }
        let budget = rng.random_range(1.5..3.0);
        let jumps: Vec<f64> = (0..layers - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
        let scale = budget / jumps.iter().map(|j| j.abs()).sum::<f64>();
        let mut values = vec![rng.random_range(1.0..2.5)];
        for j in jumps {
            values.push(values.last().unwrap() + j * scale);
        }
        if values.iter().any(|&v| v < 0.5) {
            continue;
        }
        let p = LayeredProfile::new(bp, values).unwrap();
        let (c_m, c_max) = p.extremes();
        if c_max - c_m >= 0.5 && p.total_variation() <= 3.0 {
            return p;
        }
    }
}

struct SweepStats {
    floor_ok: bool,
    floor_worst: f64,
    r2_slope_worst: f64,
    gap_ok: bool,
    gap_worst: f64,
    modes: usize,
    ratio_residual: f64,
    cumulative_ok: bool,
}

// Non-guided modes above the floor threshold, up to 10⁴ μ₁², on a thin cross-section.
fn nonguided_sweep() -> SweepStats {
    let mut rng = ChaCha8Rng::seed_from_u64(20_261_019);
    let mut profiles: Vec<LayeredProfile> = (0..20).map(|_| random_profile(&mut rng)).collect();
    profiles.push(LayeredProfile::uniform(1.0, vec![1.0, 2.0, 4.0]).unwrap());
    let cs = CrossSection::interval(0.02).unwrap();
    let mu1_sq = cs.mode(1).mu2;
    let lambda_max = 1e4 * mu1_sq;
    let bands: Vec<(f64, f64)> = (0..10).map(|i| (i as f64 / 10.0, (i + 1) as f64 / 10.0)).collect();
    let mut stats = SweepStats {
        floor_ok: true,
        floor_worst: f64::INFINITY,
        r2_slope_worst: 0.0,
        gap_ok: true,
        gap_worst: 0.0,
        modes: 0,
        ratio_residual: 0.0,
        cumulative_ok: true,
    };
    for p in &profiles {
        let eps = default_eps(p);
        let (_, c_max) = p.extremes();
        let threshold = threshold_recipe(c_max, eps, PI / (0.1 / 6.0)).lambda;
        for mode in cs.mu_values(2) {
            let ch = Channel::from(&mode);
            let lo = threshold.max((c_max + eps) * ch.mu2()) * (1.0 + 1e-9);
            let n_lo = dispersion(lo, ch, p).unwrap().zero_count;
            let n_hi = dispersion(lambda_max, ch, p).unwrap().zero_count;
            let picks = 240;
            let mut ells: Vec<u32> = (0..picks)
                .map(|i| {
                    let t = i as f64 / (picks - 1) as f64;
                    ((n_lo as f64 + 1.0).ln() * (1.0 - t) + (n_hi as f64).ln() * t).exp().round() as u32
                })
                .collect();
            ells.dedup();
            let efs: Vec<Eigenfunction1D> = ells
                .iter()
                .map(|&l| build_eigenfunction(&eigenpair(ch, l, p, REL_TOL).unwrap(), p).unwrap())
                .collect();
            stats.modes += efs.len();
            let mut r2 = Vec::new();
            for (i, band) in bands.iter().enumerate() {
                let f = nonconcentration_floor(&efs, *band, eps).unwrap();
                stats.floor_ok &= f.holds;
                stats.floor_worst = stats.floor_worst.min(f.min_mass / f.floor);
                if i == 0 {
                    r2 = f.r2_values.clone();
                }
            }
            let ln_l: Vec<f64> = efs.iter().map(|e| e.lambda.ln()).collect();
            let ln_r: Vec<f64> = r2.iter().map(|r| r.ln()).collect();
            let s = slope(&ln_l, &ln_r);
            if s.abs() > stats.r2_slope_worst.abs() {
                stats.r2_slope_worst = s;
            }
            for ef in &efs {
                let z = zeros(ef);
                let bound = zero_gap_bound(ef.mu, c_max, eps);
                stats.gap_ok &= z.max_gap <= bound;
                stats.gap_worst = stats.gap_worst.max(z.max_gap / bound);
                let r = amplitude_ratios(ef).unwrap();
                stats.ratio_residual = stats.ratio_residual.max(r.max_residual);
                stats.cumulative_ok &= r.cumulative_holds;
            }
        }
    }
    stats
}

// 7. c = 1 + y² on (0, 1), non-guided window, μ ∈ {20, 40, 80, 160}.
fn liouville() -> Outcome {
    let p = SampledProfile::from_fn_with_derivatives(1.0, 8192, |y| 1.0 + y * y, |y| 2.0 * y, |_| 2.0).unwrap();
    let (c_m, c_max) = p.extremes();
    let (eps, big_lambda) = (0.5, 2.0);
    let mus = [20.0, 40.0, 80.0, 160.0];
    // η² integrates to ∫ p u² dy with p between p_lo and p_hi and ∫ u² between c_m and c_M
    let p_lo = eps / c_max;
    let p_hi = (c_max + big_lambda) / c_m - 1.0;
    let r1 = 0.9 * (2.0 * p_lo * c_m / p_hi.sqrt()).sqrt();
    let r2 = 1.1 * (2.0 * p_hi * c_max / p_lo.sqrt()).sqrt();
    // per μ: (λ/μ², sup deviation) for every mode in the window
    let mut curves: Vec<Vec<(f64, f64)>> = Vec::new();
    let (mut alpha_lo, mut alpha_hi) = (f64::INFINITY, 0.0f64);
    for &mu in &mus {
        let ch = Channel::new(1, mu);
        let pairs = pruefer_eigenvalues(
            ch,
            (c_max + eps) * mu * mu,
            (c_max + big_lambda) * mu * mu,
            &p,
            &StepControl::default(),
            REL_TOL,
        )
        .unwrap();
        let mut curve = Vec::new();
        for e in &pairs {
            let u = numerov_solve(e.lambda, ch, &p, 16384).unwrap();
            let frame = liouville_transform(&p, e.lambda, ch, &u).unwrap();
            let r = liouville_residual(&frame, mu);
            curve.push((e.lambda / (mu * mu), r.sup_dev));
            alpha_lo = alpha_lo.min(r.alpha.abs());
            alpha_hi = alpha_hi.max(r.alpha.abs());
        }
        curves.push(curve);
    }
    // The deviation depends on λ/μ², so each mode is compared with the next μ's
    // deviation interpolated at the same λ/μ².
    let mut ratios = Vec::new();
    for w in curves.windows(2) {
        for &(kappa, dev) in &w[0] {
            if let Some(j) = w[1].windows(2).position(|q| q[0].0 <= kappa && kappa <= q[1].0) {
                let (a, b) = (w[1][j], w[1][j + 1]);
                let next = a.1 + (b.1 - a.1) * (kappa - a.0) / (b.0 - a.0);
                ratios.push(next / dev);
            }
        }
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let halves = !ratios.is_empty() && lo >= 0.4 && hi <= 0.6;
    let alpha_ok = alpha_lo >= r1 && alpha_hi <= r2;
    let worst: Vec<String> = curves
        .iter()
        .map(|c| format!("{:.3e}", c.iter().map(|m| m.1).fold(0.0, f64::max)))
        .collect();
    Outcome {
        pass: halves && alpha_ok,
        detail: format!(
            "{} matched ratios in [{lo:.3}, {hi:.3}] (in [0.4, 0.6]); max deviation per mu {worst:?}; \
             alpha in [{alpha_lo:.4}, {alpha_hi:.4}] within [{r1:.4}, {r2:.4}]",
            ratios.len()
        ),
    }
}

struct ExistenceStats {
    outcome: Outcome,
    identity_residual: f64,
    three_layer_modes: usize,
}

// 8. Three increasing values (1, 1.2, 4), h₀ = 0.1, h₁ = 0.6, H = 1.
fn existence() -> ExistenceStats {
    let eps = 0.05;
    let cond = existence_condition([1.0, 1.2, 4.0], 0.1, 0.6, 1.0, eps).unwrap();
    let p = LayeredProfile::new(vec![0.0, 0.1, 0.6, 1.0], vec![1.0, 1.2, 4.0]).unwrap();
    let cs = CrossSection::interval(1.0).unwrap();
    let mu_t = cond.mu_threshold.unwrap_or(f64::INFINITY);
    let k0 = (mu_t / PI).ceil().max(1.0) as usize;
    let verdicts = existence_verify(&p, eps, &cs, k0..=60, REL_TOL).unwrap();
    let nonempty = verdicts.iter().all(|v| v.nonempty);
    let above_trial = verdicts.iter().all(|v| v.count as u64 >= v.guaranteed);
    let mus: Vec<f64> = verdicts.iter().map(|v| v.mu).collect();
    let counts: Vec<f64> = verdicts.iter().map(|v| v.count as f64).collect();
    let s = slope(&mus, &counts);
    let growth = s > 0.0 && above_trial && verdicts.last().unwrap().guaranteed > verdicts[0].guaranteed;
    let first_ok = verdicts.iter().all(|v| v.first.holds);

    let mut identity_residual = 0.0f64;
    let mut three_layer_modes = 0;
    for v in &verdicts {
        let ch = Channel::new(v.k, v.mu);
        let pairs = eigenvalues_in_window(ch, v.window.0, v.window.1, &p, REL_TOL).unwrap();
        for ef in modes(&pairs, &p) {
            let r = three_layer_ratios(&ef, eps).unwrap();
            identity_residual = identity_residual.max(r.max_identity_residual());
            three_layer_modes += 1;
        }
    }
    let pass = cond.holds && (cond.lhs - 0.2928).abs() < 1e-4 && (cond.rhs - 0.5556).abs() < 1e-4 && nonempty && growth && first_ok;
    ExistenceStats {
        outcome: Outcome {
            pass,
            detail: format!(
                "condition {:.4} < {:.4}; mu threshold {mu_t:.2} (k >= {k0}); windows nonempty for k = {k0}..60: {nonempty}; \
                 counts {}..{} with slope {s:.3} per unit mu, never below the trial-function bound: {above_trial}",
                cond.lhs,
                cond.rhs,
                verdicts[0].count,
                verdicts.last().unwrap().count
            ),
        },
        identity_residual,
        three_layer_modes,
    }
}

// 9. c = 1 + y, k = 3, first non-guided eigenvalue, cⁿ on n = 8..512 cells.
fn bv() -> Outcome {
    let p = SampledProfile::from_fn(1.0, 512, Interpolation::PiecewiseLinear, |y| 1.0 + y).unwrap();
    let eps = default_eps(&p);
    let mu = 3.0 * PI;
    let ch = Channel::new(3, mu);
    let lo = (2.0 + eps) * mu * mu;
    let reference = pruefer_eigenvalues(ch, lo, 2.0 * lo, &p, &StepControl::default(), REL_TOL).unwrap()[0];
    let fd = fd_oracle(ch, &p, lo, reference.lambda * (1.0 + 1e-6), 8192).unwrap();
    let fd_agrees = (fd.eigenvalues[0].lambda - reference.lambda).abs() <= fd.eigenvalues[0].error_band;
    let ns: Vec<usize> = (3..=9).map(|e| 1usize << e).collect();
    let r = bv_convergence(&p, reference.lambda, ch, &ns, SampleRule::Midpoint, 1e-4, REL_TOL).unwrap();
    let errors: Vec<String> = r.steps.iter().map(|s| format!("{:.1e}", s.rel_error)).collect();
    let sups: Vec<String> = r.steps.iter().map(|s| format!("{:.1e}", s.sup_u)).collect();
    Outcome {
        pass: r.holds && fd_agrees,
        detail: format!(
            "lambda {:.6} (oracle agrees: {fd_agrees}); rel errors {errors:?}; sup|u - u_n| {sups:?}; TV bounded: {}; final {:.2e} (< 1e-4)",
            reference.lambda, r.tv_bounded, r.final_rel_error
        ),
    }
}

// 10. Two-layer increasing profile: peaks nondecreasing, ratios below the constant.
fn monotone() -> Outcome {
    let p = LayeredProfile::new(vec![0.0, 0.4, 1.0], vec![1.0, 2.0]).unwrap();
    let eps = default_eps(&p);
    let cs = CrossSection::interval(1.0).unwrap();
    let (mut ok, mut n, mut worst) = (true, 0, 0.0f64);
    let mut constant = 0.0;
    for mode in cs.mu_values(6) {
        let ch = Channel::from(&mode);
        let pairs = eigenvalues_in_window(ch, (2.0 + eps) * ch.mu2(), 40.0 * ch.mu2(), &p, REL_TOL).unwrap();
        for ef in modes(&pairs, &p) {
            let r = monotone_checks(&ef, eps).unwrap();
            ok &= r.peaks_nondecreasing && r.ratio_holds;
            worst = worst.max(r.max_peak_ratio);
            constant = r.constant;
            n += 1;
        }
    }
    Outcome {
        pass: ok && n > 0,
        detail: format!("{n} non-guided modes; peaks nondecreasing, max peak ratio {worst:.3} <= {constant:.3}"),
    }
}

// Runs without the libtest harness so the report is always printed.
fn main() {
    let mut results = Vec::new();
    let mut record = |n: usize, title: &str, o: Outcome| {
        report(n, title, &o);
        results.push((n, o.pass));
    };

    record(1, "constant-profile exactness", constant_profile());
    record(2, "oracle equivalence", oracle_equivalence());
    record(3, "guided decay", guided_decay());

    let sweep = nonguided_sweep();
    let ex = existence();
    record(
        4,
        "non-guided floor",
        Outcome {
            pass: sweep.floor_ok && sweep.r2_slope_worst.abs() <= 0.02,
            detail: format!(
                "{} modes on 21 profiles x 10 bands; min mass / floor = {:.3} (>= 1); worst ln r2 vs ln lambda slope {:.4} (|.| <= 0.02)",
                sweep.modes, sweep.floor_worst, sweep.r2_slope_worst
            ),
        },
    );
    record(
        5,
        "zero-gap bound",
        Outcome {
            pass: sweep.gap_ok,
            detail: format!("{} modes; max gap / bound = {:.3} (<= 1)", sweep.modes, sweep.gap_worst),
        },
    );
    record(
        6,
        "transmission algebra",
        Outcome {
            pass: sweep.ratio_residual < 1e-9 && ex.identity_residual < 1e-9 && sweep.cumulative_ok,
            detail: format!(
                "ratio identity residual {:.1e} over {} modes, three-layer identity residual {:.1e} over {} modes (< 1e-9); cumulative bound holds: {}",
                sweep.ratio_residual, sweep.modes, ex.identity_residual, ex.three_layer_modes, sweep.cumulative_ok
            ),
        },
    );
    record(7, "Liouville asymptotics", liouville());
    record(8, "existence", ex.outcome);
    record(9, "BV convergence", bv());
    record(10, "monotone structure", monotone());

    let failed: Vec<usize> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
