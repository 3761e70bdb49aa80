//! Modified Prüfer phase: `u = r sin θ`, `u′ = α r cos θ` with a per-cell
//! frequency `α > 0`, so that
//!
//! ```text
//! θ′ = α cos²θ + (q/α) sin²θ,   (ln r)′ = (α − q/α) sin θ cos θ,   q = λ/c − μ².
//! ```
//!
//! With `α ≈ √q` the phase advances almost linearly, which keeps step control
//! cheap at large `μ`. Each zero of `u` is a crossing of `θ` through a multiple
//! of `π`, always upward.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::SolverError;
use crate::layer_solver::{Channel, Eigenpair};
use crate::profile::{Coefficient, Interpolation, SampledProfile};

/// Step-size control for cells where `q` varies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    /// Absolute tolerance on the phase per step (step doubling estimate).
    pub tol: f64,
    /// Largest step as a fraction of the local wavelength `2π / rate`.
    pub max_fraction: f64,
    /// Smallest step relative to `H` before giving up.
    pub min_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { tol: 1e-11, max_fraction: 0.05, min_step: 1e-12 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrueferState {
    pub theta: f64,
    pub log_r: f64,
    pub y: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrueferCount {
    /// Zeros of `u` in `(0, H]`: `⌊θ(H)/π⌋`.
    pub zero_count: u32,
    /// Zeros in the open interval `(0, H)`.
    pub interior_zeros: u32,
    pub theta_end: f64,
    /// Sign of `u(H)`: `-1`, `0` or `1`.
    pub endpoint_sign: i8,
    /// `u(H)` vanishes to within round-off: `λ` is (numerically) an eigenvalue.
    pub boundary_zero: bool,
}

fn wrap_pi(x: f64) -> f64 {
    let mut d = x % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

/// Re-expresses the phase for a new scaling `α_new` without changing `(u, u′)`.
fn rescale(state: &mut PrueferState, a_old: f64, a_new: f64) {
    if a_old == a_new {
        return;
    }
    let (s, c) = state.theta.sin_cos();
    let phi_old = s.atan2(c);
    let phi_new = (a_new * s).atan2(a_old * c);
    state.theta += phi_new - phi_old;
    state.log_r += 0.5 * (s * s + (a_old / a_new * c).powi(2)).ln();
}

/// Exact transfer over a cell with constant `q` and scaling `α`.
fn constant_cell(state: &mut PrueferState, q: f64, alpha: f64, t: f64) {
    if q > 0.0 && (alpha - q.sqrt()).abs() <= 1e-15 * alpha {
        state.theta += alpha * t;
        return;
    }
    let (s, c) = state.theta.sin_cos();
    let (u, du) = (s, alpha * c);
    let (nu, ndu, log_grow) = if q < 0.0 {
        let k = (-q).sqrt();
        let damp = (-2.0 * k * t).exp();
        let (g, d) = (u + du / k, u - du / k);
        (0.5 * (g + d * damp), 0.5 * k * (g - d * damp), k * t)
    } else if q > 0.0 {
        let w = q.sqrt();
        let (sn, cs) = (w * t).sin_cos();
        (u * cs + du / w * sn, -u * w * sn + du * cs, 0.0)
    } else {
        (u + du * t, du, 0.0)
    };
    let phi_new = nu.atan2(ndu / alpha);
    let phi_old = s.atan2(c);
    state.theta += wrap_pi(phi_new - phi_old);
    state.log_r += log_grow + nu.hypot(ndu / alpha).ln();
}

fn rhs(theta: f64, q: f64, alpha: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (alpha * c * c + q / alpha * s * s, (alpha - q / alpha) * s * c)
}

fn rk4(theta: f64, log_r: f64, y: f64, h: f64, q: &impl Fn(f64) -> f64, alpha: f64) -> (f64, f64) {
    let (k1, l1) = rhs(theta, q(y), alpha);
    let (k2, l2) = rhs(theta + 0.5 * h * k1, q(y + 0.5 * h), alpha);
    let (k3, l3) = rhs(theta + 0.5 * h * k2, q(y + 0.5 * h), alpha);
    let (k4, l4) = rhs(theta + h * k3, q(y + h), alpha);
    (theta + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), log_r + h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4))
}

fn varying_cell(
    state: &mut PrueferState,
    y1: f64,
    q: &impl Fn(f64) -> f64,
    alpha: f64,
    control: &StepControl,
    height: f64,
) -> Result<(), SolverError> {
    let rate = |y: f64| alpha.max(q(y).abs() / alpha);
    let cap = |y: f64| control.max_fraction * 2.0 * PI / rate(y);
    let mut step = cap(state.y);
    while state.y < y1 {
        step = step.min(cap(state.y));
        let h = step;
        if h < control.min_step * height {
            return Err(SolverError::StepFailure { y: state.y });
        }
        let remaining = y1 - state.y;
        let last = remaining <= h * (1.0 + 1e-9);
        let h = if last { remaining } else { h };
        let (full, _) = rk4(state.theta, state.log_r, state.y, h, q, alpha);
        let (t1, r1) = rk4(state.theta, state.log_r, state.y, 0.5 * h, q, alpha);
        let (t2, r2) = rk4(t1, r1, state.y + 0.5 * h, 0.5 * h, q, alpha);
        let err = (full - t2).abs();
        if !err.is_finite() {
            return Err(SolverError::StepFailure { y: state.y });
        }
        if err > control.tol {
            step = h * 0.5;
            continue;
        }
        state.theta = t2 + (t2 - full) / 15.0;
        state.log_r = r2;
        state.y = if last { y1 } else { state.y + h };
        if err < control.tol / 64.0 {
            step = h * 2.0;
        }
    }
    Ok(())
}

/// Integrates the phase from `θ(0) = 0` to `y = H`.
pub fn pruefer_phase(
    lambda: f64,
    channel: Channel,
    profile: &SampledProfile,
    control: &StepControl,
) -> Result<PrueferState, SolverError> {
    let height = profile.height();
    let mu2 = channel.mu2();
    let tol_q = channel.tol_q();
    let floor_alpha = PI / height;
    let grid = profile.grid();
    let mut state = PrueferState { theta: 0.0, log_r: 0.0, y: 0.0 };
    let mut alpha = floor_alpha;
    for i in 0..grid.len() - 1 {
        let (y0, y1) = (grid[i], grid[i + 1]);
        match profile.interpolation() {
            Interpolation::LeftConstant => {
                let q = lambda / profile.samples()[i] - mu2;
                let q = if q.abs() <= tol_q { 0.0 } else { q };
                let a_new = if q == 0.0 { floor_alpha } else { q.abs().sqrt() };
                rescale(&mut state, alpha, a_new);
                alpha = a_new;
                constant_cell(&mut state, q, alpha, y1 - y0);
                state.y = y1;
            }
            Interpolation::PiecewiseLinear => {
                let qf = |y: f64| lambda / profile.value_at(y) - mu2;
                let a_new = qf(0.5 * (y0 + y1)).abs().sqrt().max(floor_alpha);
                rescale(&mut state, alpha, a_new);
                alpha = a_new;
                state.y = y0;
                varying_cell(&mut state, y1, &qf, alpha, control, height)?;
            }
        }
    }
    Ok(state)
}

/// Oscillation count of the shooting solution at `λ`.
pub fn pruefer_count(
    lambda: f64,
    channel: Channel,
    profile: &SampledProfile,
    control: &StepControl,
) -> Result<PrueferCount, SolverError> {
    let st = pruefer_phase(lambda, channel, profile, control)?;
    let turns = st.theta / PI;
    let nearest = turns.round();
    let boundary_zero = (turns - nearest).abs() < 1e-8 * nearest.max(1.0);
    let zero_count = turns.floor().max(0.0) as u32;
    let interior_zeros = if boundary_zero { (nearest as u32).saturating_sub(1) } else { zero_count };
    let s = st.theta.sin();
    let endpoint_sign = if boundary_zero { 0 } else if s > 0.0 { 1 } else { -1 };
    Ok(PrueferCount { zero_count, interior_zeros, theta_end: st.theta, endpoint_sign, boundary_zero })
}

/// Eigenvalues in `(lambda_lo, lambda_hi)` by bisection on `θ(H; λ) − ℓπ`,
/// which is continuous and increasing in `λ`.
pub fn pruefer_eigenvalues(
    channel: Channel,
    lambda_lo: f64,
    lambda_hi: f64,
    profile: &SampledProfile,
    control: &StepControl,
    rel_tol: f64,
) -> Result<Vec<Eigenpair>, SolverError> {
    if !(lambda_lo > 0.0 && lambda_hi > lambda_lo && lambda_hi.is_finite()) {
        return Err(SolverError::InvalidWindow { lo: lambda_lo, hi: lambda_hi });
    }
    let theta = |l: f64| pruefer_phase(l, channel, profile, control).map(|s| s.theta);
    let t_lo = theta(lambda_lo)?;
    let t_hi = theta(lambda_hi)?;
    let first = (t_lo / PI).floor() as u32 + 1;
    let last = (t_hi / PI).floor() as u32;
    let mut out = Vec::new();
    let mut lo_bound = lambda_lo;
    for ell in first..=last {
        let target = ell as f64 * PI;
        let (mut lo, mut hi) = (lo_bound, lambda_hi);
        let mut t_at_hi = t_hi;
        for _ in 0..200 {
            if hi - lo <= rel_tol * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let t = theta(mid)?;
            if t >= target {
                hi = mid;
                t_at_hi = t;
            } else {
                lo = mid;
            }
        }
        let lambda = 0.5 * (lo + hi);
        out.push(Eigenpair { lambda, k: channel.k, mu: channel.mu, ell, residual: (t_at_hi - target).abs() });
        lo_bound = lambda;
    }
    Ok(out)
}
