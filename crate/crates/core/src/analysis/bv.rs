use serde::Serialize;

use crate::error::AnalysisError;
use crate::general_solver::{numerov_solve, GridEigenfunction};
use crate::layer_solver::{build_eigenfunction, eigenvalues_in_window, Channel, Eigenfunction1D};
use crate::profile::{Coefficient, LayeredProfile, SampleRule, SampledProfile};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BvStep {
    pub n: usize,
    pub lambda_n: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    /// `sup |u − uⁿ|` on the reference grid.
    pub sup_u: f64,
    /// `sup |u′ − uⁿ′|` on the reference grid.
    pub sup_du: f64,
    /// `sup |c − cⁿ|`.
    pub sup_c: f64,
    pub window: (f64, f64),
    pub tv_n: f64,
    pub tv_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub lambda: f64,
    pub k: usize,
    pub rule: SampleRule,
    pub total_variation: f64,
    pub steps: Vec<BvStep>,
    pub eigenvalue_decreasing: bool,
    pub eigenfunction_decreasing: bool,
    pub tv_bounded: bool,
    pub final_rel_error: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// `(sup |u − v|, sup |u′ − v′|)` over the nodes of `reference`.
pub fn sup_distance(reference: &GridEigenfunction, ef: &Eigenfunction1D) -> (f64, f64) {
    reference.sup_distance(|y| ef.evaluate(y).unwrap_or((f64::NAN, f64::NAN)))
}

// Sup of |c − cⁿ|, attained at nodes of either grid or one-sided limits there.
fn sup_difference(profile: &SampledProfile, pc: &LayeredProfile) -> f64 {
    let h = profile.height();
    let nudge = 1e-12 * h;
    let mut worst: f64 = 0.0;
    for l in pc.layers() {
        let inner = profile.grid().iter().cloned().filter(|&y| y > l.lo && y < l.hi);
        for y in [l.lo, l.lo + nudge, l.hi - nudge, l.hi].into_iter().chain(inner) {
            let y = y.clamp(l.lo, l.hi);
            worst = worst.max((profile.value_at(y) - l.c).abs());
        }
    }
    worst
}

fn decreasing(values: impl Iterator<Item = f64>) -> bool {
    let v: Vec<f64> = values.collect();
    v.windows(2).all(|w| w[1] < w[0])
}

/// Convergence of layered approximants `cⁿ` of a sampled profile.
///
/// `lambda` must be an eigenvalue of the sampled-profile operator on `channel`.
/// For each `n` the approximant's eigenvalue nearest `lambda` is taken from the
/// window `[(1 − r)λ, (1 + r)λ]`, `r = ‖c − cⁿ‖∞ / c_m`, which must contain it.
pub fn bv_convergence(
    profile: &SampledProfile,
    lambda: f64,
    channel: Channel,
    n_list: &[usize],
    rule: SampleRule,
    tolerance: f64,
    rel_tol: f64,
) -> Result<ConvergenceReport, AnalysisError> {
    let (c_m, _) = profile.extremes();
    let tv = profile.total_variation();
    let reference = numerov_solve(lambda, channel, profile, 20_000)?;
    let mut steps = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let pc = profile.pc_approximate_with(n, rule);
        let sup_c = sup_difference(profile, &pc);
        let r = sup_c / c_m + 1e-12;
        let window = ((1.0 - r) * lambda, (1.0 + r) * lambda);
        let pairs = eigenvalues_in_window(channel, window.0, window.1, &pc, rel_tol)?;
        let pair = pairs
            .into_iter()
            .min_by(|a, b| (a.lambda - lambda).abs().total_cmp(&(b.lambda - lambda).abs()))
            .ok_or(AnalysisError::NoNearbyEigenvalue { lambda, n })?;
        let ef = build_eigenfunction(&pair, &pc)?;
        let (sup_u, sup_du) = sup_distance(&reference, &ef);
        let tv_n = pc.total_variation();
        steps.push(BvStep {
            n,
            lambda_n: pair.lambda,
            abs_error: (pair.lambda - lambda).abs(),
            rel_error: (pair.lambda - lambda).abs() / lambda,
            sup_u,
            sup_du,
            sup_c,
            window,
            tv_n,
            tv_ok: tv_n <= tv * (1.0 + 1e-12),
        });
    }
    let eigenvalue_decreasing = decreasing(steps.iter().map(|s| s.abs_error));
    let eigenfunction_decreasing = decreasing(steps.iter().map(|s| s.sup_u.max(s.sup_du / channel.mu.max(1.0))));
    let tv_bounded = steps.iter().all(|s| s.tv_ok);
    let final_rel_error = steps.last().map_or(f64::NAN, |s| s.rel_error);
    Ok(ConvergenceReport {
        lambda,
        k: channel.k,
        rule,
        total_variation: tv,
        holds: eigenvalue_decreasing && eigenfunction_decreasing && tv_bounded && final_rel_error < tolerance,
        steps,
        eigenvalue_decreasing,
        eigenfunction_decreasing,
        tv_bounded,
        final_rel_error,
        tolerance,
    })
}
