//! Exact solver for `c(y)(μ² − d²/dy²) u = λ u`, `u(0) = u(H) = 0`, with
//! piecewise-constant `c`.
//!
//! Inside each layer the equation is `u″ = −q u` with `q = λ/c − μ²`, so the
//! transfer over a layer is a closed-form 2×2 map. Eigenvalues are located by
//! bisection on the oscillation count `N(λ) = #{zeros of the shooting solution in (0, H]}`,
//! which equals the number of eigenvalues `≤ λ`.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::cross_section::TransverseMode;
use crate::error::SolverError;
use crate::profile::{Coefficient, LayeredProfile};

/// Default bisection tolerance (relative width of the final bracket).
pub const DEFAULT_REL_TOL: f64 = 1e-12;

/// Eigenvalue candidates whose dimensionless residual exceeds this are rejected
/// by [`build_eigenfunction`].
pub const RESIDUAL_TOL: f64 = 1e-6;

/// A transverse channel: the index `k` and the frequency `μ_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Channel {
    pub k: usize,
    pub mu: f64,
}

impl Channel {
    pub fn new(k: usize, mu: f64) -> Self {
        Self { k, mu }
    }

    pub fn mu2(&self) -> f64 {
        self.mu * self.mu
    }

    /// Default half-width of the linear band: `1e-9 μ²`.
    pub fn tol_q(&self) -> f64 {
        1e-9 * self.mu2()
    }
}

impl From<&TransverseMode> for Channel {
    fn from(m: &TransverseMode) -> Self {
        Self { k: m.k, mu: m.mu() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    Oscillatory,
    Evanescent,
    Linear,
}

/// Behaviour of one layer at a given `(λ, μ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LayerRegime {
    pub regime: Regime,
    /// `q = λ/c − μ²`.
    pub q: f64,
}

impl LayerRegime {
    /// `√|q|`: the wavenumber (oscillatory) or decay rate (evanescent).
    pub fn wavenumber(&self) -> f64 {
        self.q.abs().sqrt()
    }
}

pub fn layer_regime(lambda: f64, mu: f64, c: f64, tol_q: f64) -> LayerRegime {
    let q = lambda / c - mu * mu;
    let regime = if q > tol_q {
        Regime::Oscillatory
    } else if q < -tol_q {
        Regime::Evanescent
    } else {
        Regime::Linear
    };
    LayerRegime { regime, q }
}

/// `(u, u′) · 2^exponent`, kept with `max(|u|, |du|)` in `[½, 2]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector {
    pub u: f64,
    pub du: f64,
    pub exponent: i64,
}

impl StateVector {
    /// Dirichlet shooting start `(0, 1)`.
    pub fn dirichlet() -> Self {
        Self { u: 0.0, du: 1.0, exponent: 0 }
    }

    pub fn new(u: f64, du: f64) -> Result<Self, SolverError> {
        Self { u, du, exponent: 0 }.renormalized()
    }

    fn renormalized(mut self) -> Result<Self, SolverError> {
        let m = self.u.abs().max(self.du.abs());
        if m == 0.0 || !m.is_finite() {
            return Err(SolverError::DegenerateState);
        }
        let e = m.log2().round() as i32;
        let f = 2f64.powi(-e);
        self.u *= f;
        self.du *= f;
        self.exponent += e as i64;
        Ok(self)
    }

    /// Natural log of `sqrt(u² + (du/s)²)` including the exponent.
    pub fn log_norm(&self, s: f64) -> f64 {
        self.u.hypot(self.du / s).ln() + self.exponent as f64 * LN_2
    }

    /// The pair as plain floats multiplied by `2^(exponent − reference)`.
    pub fn relative_to(&self, reference: i64) -> (f64, f64) {
        let shift = (self.exponent - reference).clamp(-2000, 2000) as i32;
        (ldexp(self.u, shift), ldexp(self.du, shift))
    }
}

fn ldexp(x: f64, e: i32) -> f64 {
    // split so intermediate powers stay representable
    let half = e / 2;
    x * 2f64.powi(half) * 2f64.powi(e - half)
}

/// Exact transfer over thickness `t` (negative `t` integrates backwards).
/// Returns the new state and, for `t > 0`, the zeros of `u` in `(0, t]`.
// floor(φ/π) for φ = atan2(u, u′/ω) ∈ (−π, π], read from the signs alone.
fn half_turns(u: f64, du: f64) -> i64 {
    if u > 0.0 {
        0
    } else if u < 0.0 {
        -1
    } else if du >= 0.0 {
        0
    } else {
        1
    }
}

// Zeros in (0, t] of β sin(φ + ω y). The phase estimate fixes the count up to
// rounding; the signs at both ends fix its parity, so a zero lying on an
// interface is counted by exactly one of the two layers.
fn oscillatory_zeros(u: f64, du: f64, u_end: f64, w: f64, turn: f64) -> u32 {
    let start = half_turns(u, du);
    let phi = if u == 0.0 { start as f64 * PI } else { u.atan2(du / w) };
    let f = (phi + turn) / PI;
    let mut n = f.floor() as i64 - start;
    let end = if u_end == 0.0 { None } else { Some(half_turns(u_end, 0.0)) };
    if let Some(end) = end {
        if (n - (end - start)).rem_euclid(2) != 0 {
            n += if f - f.floor() < 0.5 { -1 } else { 1 };
        }
    }
    n.max(0) as u32
}

fn step_layer(state: StateVector, regime: LayerRegime, t: f64) -> Result<(StateVector, u32), SolverError> {
    let (u, du) = (state.u, state.du);
    match regime.regime {
        Regime::Oscillatory => {
            let w = regime.wavenumber();
            let (s, c) = (w * t).sin_cos();
            let next = StateVector { u: u * c + du / w * s, du: -u * w * s + du * c, exponent: state.exponent };
            let zeros = if t > 0.0 { oscillatory_zeros(u, du, next.u, w, w * t) } else { 0 };
            Ok((next.renormalized()?, zeros))
        }
        Regime::Evanescent => {
            let k = regime.wavenumber();
            let a = k * t.abs();
            let grow = u + du / k;
            let decay = u - du / k;
            let damp = (-2.0 * a).exp();
            let (gu, gd) = if t >= 0.0 {
                (0.5 * (grow + decay * damp), 0.5 * k * (grow - decay * damp))
            } else {
                (0.5 * (grow * damp + decay), 0.5 * k * (grow * damp - decay))
            };
            // factor e^a = 2^(a / ln 2) carried in the exponent
            let bits = a / LN_2;
            let whole = bits.floor();
            let frac = 2f64.powf(bits - whole);
            let next = StateVector { u: gu * frac, du: gd * frac, exponent: state.exponent + whole as i64 };
            let next = next.renormalized()?;
            let zeros = u32::from(t > 0.0 && u != 0.0 && next.u * u <= 0.0);
            Ok((next, zeros))
        }
        Regime::Linear => {
            let next = StateVector { u: u + du * t, du, exponent: state.exponent }.renormalized()?;
            let zeros = u32::from(t > 0.0 && u != 0.0 && next.u * u <= 0.0);
            Ok((next, zeros))
        }
    }
}

/// Bound on how much a layer can amplify a perturbation, in the `(u, du/s)` norm.
fn amplification_bound(regime: LayerRegime, t: f64, s: f64) -> f64 {
    let w = regime.wavenumber();
    match regime.regime {
        Regime::Oscillatory => (w / s).max(s / w),
        Regime::Evanescent => (w * t.abs()).exp() * (w / s).max(s / w),
        Regime::Linear => 1.0 + t.abs() * s,
    }
}

fn norm_scale(lambda: f64, mu: f64, profile: &LayeredProfile) -> f64 {
    let (c_m, _) = profile.extremes();
    (mu * mu).max(lambda / c_m).sqrt()
}

/// Shoots from `state` at `y = 0` to `y = H`; returns the final state and the
/// number of zeros of `u` in `(0, H]`.
pub fn propagate(
    lambda: f64,
    channel: Channel,
    profile: &LayeredProfile,
    state: StateVector,
) -> Result<(StateVector, u32), SolverError> {
    let tol_q = channel.tol_q();
    let mut s = state.renormalized()?;
    let mut zeros = 0;
    for layer in profile.layers() {
        let regime = layer_regime(lambda, channel.mu, layer.c, tol_q);
        let (next, z) = step_layer(s, regime, layer.thickness())?;
        s = next;
        zeros += z;
    }
    Ok((s, zeros))
}

/// The shooting map `λ ↦ u(H; λ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dispersion {
    /// `u(H) / ‖(u(H), u′(H)/s)‖`: signed, dimensionless, in `[−1, 1]`.
    pub value: f64,
    pub state: StateVector,
    pub zero_count: u32,
}

pub fn dispersion(lambda: f64, channel: Channel, profile: &LayeredProfile) -> Result<Dispersion, SolverError> {
    let (state, zero_count) = propagate(lambda, channel, profile, StateVector::dirichlet())?;
    let s = norm_scale(lambda, channel.mu, profile);
    let value = state.u / state.u.hypot(state.du / s);
    Ok(Dispersion { value, state, zero_count })
}

/// A Dirichlet eigenvalue of the reduced operator in channel `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Eigenpair {
    pub lambda: f64,
    pub k: usize,
    pub mu: f64,
    /// Oscillation count: the eigenfunction has `ell − 1` interior zeros.
    pub ell: u32,
    /// [`eigen_residual`] at `lambda`.
    pub residual: f64,
}

impl Eigenpair {
    pub fn channel(&self) -> Channel {
        Channel { k: self.k, mu: self.mu }
    }
}

/// Sorted record of `(λ, N(λ))` evaluations used to seed brackets.
struct CountTable<'a> {
    channel: Channel,
    profile: &'a LayeredProfile,
    points: Vec<(f64, u32)>,
}

impl<'a> CountTable<'a> {
    fn count(&mut self, lambda: f64) -> Result<u32, SolverError> {
        let n = dispersion(lambda, self.channel, self.profile)?.zero_count;
        let i = self.points.partition_point(|p| p.0 < lambda);
        self.points.insert(i, (lambda, n));
        Ok(n)
    }

    /// Smallest `λ` with `N(λ) ≥ ell`, to relative width `rel_tol`.
    fn locate(&mut self, ell: u32, rel_tol: f64) -> Result<f64, SolverError> {
        let lo_i = self.points.iter().rposition(|p| p.1 < ell);
        let hi_i = self.points.iter().position(|p| p.1 >= ell);
        let (Some(lo_i), Some(hi_i)) = (lo_i, hi_i) else {
            unreachable!("table always brackets the requested index")
        };
        let (mut lo, mut hi) = (self.points[lo_i].0, self.points[hi_i].0);
        for _ in 0..200 {
            if hi - lo <= rel_tol * hi.abs() {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count(mid)? >= ell {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        self.polish(lo, hi)
    }

    /// Refines a bracket holding exactly one eigenvalue by bisection on the sign
    /// of the matched Wronskian, down to adjacent floating-point numbers.
    fn polish(&self, mut lo: f64, mut hi: f64) -> Result<f64, SolverError> {
        let mid = 0.5 * (lo + hi);
        let m = matched_sweep(mid, self.channel, self.profile)?.match_at;
        let w = |l: f64| wronskian_at(l, self.channel, self.profile, m);
        let w_lo = w(lo)?;
        if w_lo * w(hi)? >= 0.0 {
            return Ok(mid);
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let wm = w(mid)?;
            if wm == 0.0 {
                return Ok(mid);
            }
            if (wm > 0.0) == (w_lo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// All eigenvalues in `(lambda_lo, lambda_hi)` in increasing order.
///
/// The number returned always equals `N(λ_hi) − N(λ_lo)`.
pub fn eigenvalues_in_window(
    channel: Channel,
    lambda_lo: f64,
    lambda_hi: f64,
    profile: &LayeredProfile,
    rel_tol: f64,
) -> Result<Vec<Eigenpair>, SolverError> {
    if !(lambda_lo > 0.0 && lambda_hi > lambda_lo && lambda_hi.is_finite()) {
        return Err(SolverError::InvalidWindow { lo: lambda_lo, hi: lambda_hi });
    }
    let mut table = CountTable { channel, profile, points: Vec::new() };
    let n_lo = table.count(lambda_lo)?;
    let n_hi = table.count(lambda_hi)?;
    let mut out: Vec<Eigenpair> = Vec::with_capacity((n_hi.saturating_sub(n_lo)) as usize);
    for ell in n_lo + 1..=n_hi {
        let lambda = table.locate(ell, rel_tol)?;
        if let Some(prev) = out.last() {
            if lambda - prev.lambda <= rel_tol * lambda {
                return Err(SolverError::BracketFailure { ell, lo: prev.lambda, hi: lambda });
            }
        }
        let residual = eigen_residual(lambda, channel, profile)?;
        out.push(Eigenpair { lambda, k: channel.k, mu: channel.mu, ell, residual });
    }
    Ok(out)
}

/// The `ell`-th eigenvalue (one-based) of channel `k`.
pub fn eigenpair(channel: Channel, ell: u32, profile: &LayeredProfile, rel_tol: f64) -> Result<Eigenpair, SolverError> {
    let (c_m, c_max) = profile.extremes();
    let h = profile.height();
    // N = 0 at or below c_m μ²; comparison with the constant c_M gives the upper bracket
    let lo = c_m * channel.mu2();
    let hi = 1.01 * c_max * (channel.mu2() + (ell as f64 * PI / h).powi(2));
    let mut table = CountTable { channel, profile, points: Vec::new() };
    table.count(lo)?;
    table.count(hi)?;
    let lambda = table.locate(ell, rel_tol)?;
    let residual = eigen_residual(lambda, channel, profile)?;
    Ok(Eigenpair { lambda, k: channel.k, mu: channel.mu, ell, residual })
}

/// Closed form of `u` on one layer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Piece {
    /// `u = β sin(ω (y − γ))`, `β ≥ 0`.
    Oscillatory { omega: f64, beta: f64, gamma: f64 },
    /// `u = p e^{−κ(y − lo)} + q e^{−κ(hi − y)}`.
    Evanescent { kappa: f64, p: f64, q: f64 },
    /// `u = u0 + slope (y − lo)`.
    Linear { u0: f64, slope: f64 },
}

/// A normalized eigenfunction (`∫₀ᴴ u² / c = 1`) in per-layer closed form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Eigenfunction1D {
    pub lambda: f64,
    pub k: usize,
    pub mu: f64,
    pub ell: u32,
    profile: LayeredProfile,
    pieces: Vec<Piece>,
}

fn piece_from_states(regime: LayerRegime, lo: f64, hi: f64, left: (f64, f64), right: (f64, f64)) -> Piece {
    let w = regime.wavenumber();
    match regime.regime {
        Regime::Oscillatory => {
            // prefer the larger end for the phase fit
            let (y0, (u, du)) =
                if left.0.hypot(left.1 / w) >= right.0.hypot(right.1 / w) { (lo, left) } else { (hi, right) };
            let beta = u.hypot(du / w);
            let phi = u.atan2(du / w);
            Piece::Oscillatory { omega: w, beta, gamma: y0 - phi / w }
        }
        Regime::Evanescent => {
            Piece::Evanescent { kappa: w, p: 0.5 * (left.0 - left.1 / w), q: 0.5 * (right.0 + right.1 / w) }
        }
        Regime::Linear => {
            let slope = if left.0.hypot(left.1) >= right.0.hypot(right.1) { left.1 } else { right.1 };
            let u0 = if left.0.abs() >= right.0.abs() { left.0 } else { right.0 - slope * (hi - lo) };
            Piece::Linear { u0, slope }
        }
    }
}

impl Piece {
    fn scale(&mut self, f: f64) {
        match self {
            Piece::Oscillatory { beta, gamma, omega } => {
                *beta *= f.abs();
                if f < 0.0 {
                    *gamma += PI / *omega;
                }
            }
            Piece::Evanescent { p, q, .. } => {
                *p *= f;
                *q *= f;
            }
            Piece::Linear { u0, slope } => {
                *u0 *= f;
                *slope *= f;
            }
        }
    }

    /// `(u, u′)` at `y` for a layer spanning `[lo, hi]`.
    pub fn eval(&self, lo: f64, hi: f64, y: f64) -> (f64, f64) {
        match *self {
            Piece::Oscillatory { omega, beta, gamma } => {
                let (s, c) = (omega * (y - gamma)).sin_cos();
                (beta * s, beta * omega * c)
            }
            Piece::Evanescent { kappa, p, q } => {
                let a = p * (-kappa * (y - lo)).exp();
                let b = q * (-kappa * (hi - y)).exp();
                (a + b, kappa * (b - a))
            }
            Piece::Linear { u0, slope } => (u0 + slope * (y - lo), slope),
        }
    }

    /// `∫_{y0}^{y1} u²` for `lo ≤ y0 ≤ y1 ≤ hi`.
    pub fn integral_u2(&self, lo: f64, hi: f64, y0: f64, y1: f64) -> f64 {
        if y1 <= y0 {
            return 0.0;
        }
        match *self {
            Piece::Oscillatory { omega, beta, gamma } => {
                let lin = 0.5 * (y1 - y0);
                let osc = -((2.0 * omega * (y1 - gamma)).sin() - (2.0 * omega * (y0 - gamma)).sin()) / (4.0 * omega);
                (beta * beta * (lin + osc)).max(0.0)
            }
            Piece::Evanescent { kappa, p, q } => {
                let (x0, x1, t) = (y0 - lo, y1 - lo, hi - lo);
                let span = -(-2.0 * kappa * (x1 - x0)).exp_m1() / (2.0 * kappa);
                let pp = p * p * (-2.0 * kappa * x0).exp() * span;
                let qq = q * q * (-2.0 * kappa * (t - x1)).exp() * span;
                let pq = 2.0 * p * q * (-kappa * t).exp() * (x1 - x0);
                (pp + qq + pq).max(0.0)
            }
            Piece::Linear { u0, slope } => {
                let (x0, x1) = (y0 - lo, y1 - lo);
                (u0 * u0 * (x1 - x0) + u0 * slope * (x1 * x1 - x0 * x0) + slope * slope * (x1.powi(3) - x0.powi(3)) / 3.0)
                    .max(0.0)
            }
        }
    }
}

/// Forward and backward sweeps joined at the most trustworthy interface.
struct Matched {
    layers: Vec<crate::profile::Layer>,
    regimes: Vec<LayerRegime>,
    /// States at every breakpoint, in the forward sweep's frame.
    states: Vec<StateVector>,
    /// Sine of the angle between the two sweeps at the match point.
    residual: f64,
    match_at: usize,
}

fn matched_sweep(lambda: f64, channel: Channel, profile: &LayeredProfile) -> Result<Matched, SolverError> {
    let s = norm_scale(lambda, channel.mu, profile);
    let tol_q = channel.tol_q();
    let layers: Vec<_> = profile.layers().collect();
    let regimes: Vec<LayerRegime> = layers.iter().map(|l| layer_regime(lambda, channel.mu, l.c, tol_q)).collect();
    let n = layers.len();
    let eps = f64::EPSILON.ln();

    // log of an estimated relative round-off error carried by each sweep
    let mut fwd = vec![StateVector::dirichlet()];
    let mut fwd_err = vec![eps];
    for j in 0..n {
        let t = layers[j].thickness();
        let (next, _) = step_layer(fwd[j], regimes[j], t)?;
        let grow = next.log_norm(s) - fwd[j].log_norm(s);
        fwd_err.push(ln_add(fwd_err[j], eps) + amplification_bound(regimes[j], t, s).ln() - grow);
        fwd.push(next);
    }
    let mut bwd = vec![StateVector::dirichlet(); n + 1];
    let mut bwd_err = vec![eps; n + 1];
    for j in (0..n).rev() {
        let t = layers[j].thickness();
        let (prev, _) = step_layer(bwd[j + 1], regimes[j], -t)?;
        let grow = prev.log_norm(s) - bwd[j + 1].log_norm(s);
        bwd_err[j] = ln_add(bwd_err[j + 1], eps) + amplification_bound(regimes[j], t, s).ln() - grow;
        bwd[j] = prev;
    }
    let m = (0..=n)
        .min_by(|&a, &b| fwd_err[a].max(bwd_err[a]).total_cmp(&fwd_err[b].max(bwd_err[b])))
        .unwrap_or(0);

    let (f, b) = (fwd[m], bwd[m]);
    let (fu, fd, bu, bd) = (f.u, f.du / s, b.u, b.du / s);
    let residual = (fu * bd - fd * bu).abs() / (fu.hypot(fd) * bu.hypot(bd));
    let factor = (fu * bu + fd * bd) / (bu * bu + bd * bd);
    let shift = f.exponent - b.exponent;
    let states = (0..=n)
        .map(|i| {
            if i <= m {
                fwd[i]
            } else {
                let b = bwd[i];
                StateVector { u: b.u * factor, du: b.du * factor, exponent: b.exponent + shift }
            }
        })
        .collect();
    Ok(Matched { layers, regimes, states, residual, match_at: m })
}

/// Signed cross product of the forward and backward solutions at breakpoint `m`.
fn wronskian_at(lambda: f64, channel: Channel, profile: &LayeredProfile, m: usize) -> Result<f64, SolverError> {
    let s = norm_scale(lambda, channel.mu, profile);
    let tol_q = channel.tol_q();
    let bp = profile.breakpoints();
    let mut f = StateVector::dirichlet();
    for layer in profile.layers().take(m) {
        f = step_layer(f, layer_regime(lambda, channel.mu, layer.c, tol_q), layer.thickness())?.0;
    }
    let mut b = StateVector::dirichlet();
    for j in (m..bp.len() - 1).rev() {
        let layer = profile.layer(j);
        b = step_layer(b, layer_regime(lambda, channel.mu, layer.c, tol_q), -layer.thickness())?.0;
    }
    let (fu, fd, bu, bd) = (f.u, f.du / s, b.u, b.du / s);
    Ok((fu * bd - fd * bu) / (fu.hypot(fd) * bu.hypot(bd)))
}

/// Mismatch between the solutions satisfying the left and right boundary
/// conditions, measured where both are computed most accurately. Zero exactly
/// at an eigenvalue; dimensionless.
pub fn eigen_residual(lambda: f64, channel: Channel, profile: &LayeredProfile) -> Result<f64, SolverError> {
    Ok(matched_sweep(lambda, channel, profile)?.residual)
}

/// Assembles and normalizes the eigenfunction of `pair`.
///
/// A forward sweep from `y = 0` and a backward sweep from `y = H` are matched at
/// the interface where the estimated round-off amplification of both is smallest,
/// so deep evanescent tails are reconstructed from the side where they grow.
pub fn build_eigenfunction(pair: &Eigenpair, profile: &LayeredProfile) -> Result<Eigenfunction1D, SolverError> {
    let lambda = pair.lambda;
    let sweep = matched_sweep(lambda, pair.channel(), profile)?;
    if !(sweep.residual <= RESIDUAL_TOL) {
        return Err(SolverError::NotAnEigenvalue { lambda, residual: sweep.residual });
    }
    let Matched { layers, regimes, states, .. } = sweep;
    let n = layers.len();
    let top = states.iter().map(|st| st.exponent).max().unwrap_or(0);
    let plain: Vec<(f64, f64)> = states.iter().map(|st| st.relative_to(top)).collect();

    let mut pieces: Vec<Piece> = (0..n)
        .map(|j| {
            let (lo, hi) = (layers[j].lo, layers[j].hi);
            piece_from_states(regimes[j], lo, hi, plain[j], plain[j + 1])
        })
        .collect();

    let weighted: f64 = pieces.iter().zip(&layers).map(|(p, l)| p.integral_u2(l.lo, l.hi, l.lo, l.hi) / l.c).sum();
    if !(weighted > 0.0 && weighted.is_finite()) {
        return Err(SolverError::DegenerateState);
    }
    let mut scale = weighted.sqrt().recip();
    // sign convention: u′(0) > 0
    let (_, du0) = pieces[0].eval(layers[0].lo, layers[0].hi, 0.0);
    if du0 < 0.0 {
        scale = -scale;
    }
    for p in &mut pieces {
        p.scale(scale);
    }
    Ok(Eigenfunction1D { lambda, k: pair.k, mu: pair.mu, ell: pair.ell, profile: profile.clone(), pieces })
}

fn ln_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

impl Eigenfunction1D {
    pub fn profile(&self) -> &LayeredProfile {
        &self.profile
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn height(&self) -> f64 {
        self.profile.height()
    }

    pub fn pair(&self) -> Eigenpair {
        Eigenpair { lambda: self.lambda, k: self.k, mu: self.mu, ell: self.ell, residual: 0.0 }
    }

    fn check(&self, y: f64) -> Result<(), SolverError> {
        let h = self.height();
        if !(y >= 0.0 && y <= h) {
            return Err(SolverError::OutOfDomain { y, height: h });
        }
        Ok(())
    }

    /// `(u, u′)` at `y`; at an interface the layer above is used.
    pub fn evaluate(&self, y: f64) -> Result<(f64, f64), SolverError> {
        self.check(y)?;
        let j = self.profile.layer_index(y);
        let l = self.profile.layer(j);
        Ok(self.pieces[j].eval(l.lo, l.hi, y))
    }

    /// `(u, u′)` at `y` from the layer on the given side (`from_below = true`
    /// uses the layer ending at `y`).
    pub fn evaluate_one_sided(&self, y: f64, from_below: bool) -> Result<(f64, f64), SolverError> {
        self.check(y)?;
        let mut j = self.profile.layer_index(y);
        if from_below && j > 0 && self.profile.layer(j).lo == y {
            j -= 1;
        }
        let l = self.profile.layer(j);
        Ok(self.pieces[j].eval(l.lo, l.hi, y))
    }

    /// `∫ₐᵇ u²` or, if `weighted`, `∫ₐᵇ u²/c`.
    pub fn mass(&self, a: f64, b: f64, weighted: bool) -> Result<f64, SolverError> {
        self.check(a)?;
        self.check(b)?;
        if b < a {
            return Err(SolverError::OutOfDomain { y: a, height: self.height() });
        }
        let mut total = 0.0;
        for (piece, l) in self.pieces.iter().zip(self.profile.layers()) {
            let (y0, y1) = (a.max(l.lo), b.min(l.hi));
            if y1 > y0 {
                let m = piece.integral_u2(l.lo, l.hi, y0, y1);
                total += if weighted { m / l.c } else { m };
            }
        }
        Ok(total)
    }

    /// Largest `|u⁺ − u⁻| + |u′⁺ − u′⁻|/s` over interior interfaces, relative to
    /// the local amplitude `‖(u, u′/s)‖` with `s = max(μ, √(λ/c_m))`.
    pub fn transmission_residual(&self) -> f64 {
        let s = norm_scale(self.lambda, self.mu, &self.profile);
        let bp = self.profile.breakpoints();
        let mut worst: f64 = 0.0;
        for (j, &y) in bp.iter().enumerate().take(bp.len() - 1).skip(1) {
            let lo = self.profile.layer(j - 1);
            let hi = self.profile.layer(j);
            let a = self.pieces[j - 1].eval(lo.lo, lo.hi, y);
            let b = self.pieces[j].eval(hi.lo, hi.hi, y);
            let amp = a.0.hypot(a.1 / s).max(b.0.hypot(b.1 / s));
            if amp > 0.0 {
                worst = worst.max(((a.0 - b.0).abs() + (a.1 - b.1).abs() / s) / amp);
            }
        }
        worst
    }

    /// `|u(0)| + |u(H)|` relative to the largest `|u′|/s` at the two ends.
    pub fn boundary_residual(&self) -> f64 {
        let s = norm_scale(self.lambda, self.mu, &self.profile);
        let (u0, d0) = self.evaluate(0.0).unwrap();
        let (uh, dh) = self.evaluate(self.height()).unwrap();
        (u0.abs() + uh.abs()) / (d0.abs() / s).max(dh.abs() / s)
    }

    /// Regime of layer `j` at this eigenvalue.
    pub fn regime(&self, j: usize) -> LayerRegime {
        let c = self.profile.values()[j];
        layer_regime(self.lambda, self.mu, c, 1e-9 * self.mu * self.mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn regime_examples() {
        let r = layer_regime(2.0, 1.0, 1.0, 1e-9);
        assert_eq!(r.regime, Regime::Oscillatory);
        assert!(approx(r.wavenumber(), 1.0, 1e-15));
        let r = layer_regime(1.0, 2.0, 1.0, 1e-9);
        assert_eq!(r.regime, Regime::Evanescent);
        assert!(approx(r.wavenumber(), 3f64.sqrt(), 1e-15));
        assert_eq!(layer_regime(4.0, 2.0, 1.0, 1e-9).regime, Regime::Linear);
    }

    #[test]
    fn single_layer_shooting() {
        let p = LayeredProfile::constant(PI, 1.0).unwrap();
        let ch = Channel::new(1, 1.0);
        let (s, _) = propagate(5.0, ch, &p, StateVector::dirichlet()).unwrap();
        assert!(s.u.abs() < 1e-14);
        assert_eq!(propagate(5.0 - 1e-9, ch, &p, StateVector::dirichlet()).unwrap().1, 1);
        assert_eq!(propagate(5.0 + 1e-9, ch, &p, StateVector::dirichlet()).unwrap().1, 2);
        let unit = LayeredProfile::constant(1.0, 1.0).unwrap();
        let (s, z) = propagate(1.0, Channel::new(1, 2.0), &unit, StateVector::dirichlet()).unwrap();
        let r3 = 3f64.sqrt();
        let (u, _) = s.relative_to(0);
        assert!(approx(u, r3.sinh() / r3, 1e-14));
        assert_eq!(z, 0);
    }

    #[test]
    fn zero_on_interface_counted_once() {
        // λ = 7.25 μ² puts a zero of the first layer exactly on y = 1/2
        let p = LayeredProfile::uniform(1.0, vec![1.0, 2.0]).unwrap();
        let mu = 4.0 * PI;
        let ch = Channel::new(4, mu);
        let at = 0.5 * (2.5 * mu * mu + 12.0 * mu * mu);
        let n = dispersion(at, ch, &p).unwrap().zero_count;
        assert_eq!(n, dispersion(at * (1.0 - 1e-9), ch, &p).unwrap().zero_count);
        let pairs = eigenvalues_in_window(ch, 2.5 * mu * mu, 12.0 * mu * mu, &p, 1e-13).unwrap();
        assert!(pairs.iter().all(|e| e.residual < 1e-10));
    }

    #[test]
    fn huge_evanescent_growth_stays_finite() {
        let p = LayeredProfile::constant(1.0, 1.0).unwrap();
        let (s, _) = propagate(1.0, Channel::new(1, 3000.0), &p, StateVector::dirichlet()).unwrap();
        assert!(s.exponent > 4000);
        assert!(s.u.is_finite() && s.u > 0.0);
    }

    #[test]
    fn backward_step_inverts_forward_step() {
        let st = StateVector::new(0.3, -1.7).unwrap();
        for q in [-40.0, 0.0, 25.0] {
            let reg = LayerRegime {
                q,
                regime: if q > 0.0 {
                    Regime::Oscillatory
                } else if q < 0.0 {
                    Regime::Evanescent
                } else {
                    Regime::Linear
                },
            };
            let (f, _) = step_layer(st, reg, 0.37).unwrap();
            let (b, _) = step_layer(f, reg, -0.37).unwrap();
            let (u, du) = b.relative_to(st.exponent);
            assert!((u - st.u).abs() < 1e-12 && (du - st.du).abs() < 1e-12, "q = {q}");
        }
    }

    #[test]
    fn constant_profile_window() {
        let p = LayeredProfile::constant(PI, 1.0).unwrap();
        let ev = eigenvalues_in_window(Channel::new(1, 1.0), 1.0, 11.0, &p, DEFAULT_REL_TOL).unwrap();
        let got: Vec<f64> = ev.iter().map(|e| e.lambda).collect();
        assert_eq!(got.len(), 3);
        for (g, w) in got.iter().zip([2.0, 5.0, 10.0]) {
            assert!(approx(*g, w, 1e-11));
        }
        assert_eq!(ev.iter().map(|e| e.ell).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn dispersion_signs() {
        let p = LayeredProfile::constant(PI, 1.0).unwrap();
        let d = dispersion(3.25, Channel::new(1, 1.0), &p).unwrap();
        assert!(d.value < 0.0);
        for ell in 1..=3 {
            let d = dispersion(1.0 + (ell * ell) as f64, Channel::new(1, 1.0), &p).unwrap();
            assert!(d.value.abs() < 1e-14);
        }
    }

    #[test]
    fn constant_eigenfunction_closed_form() {
        for c0 in [1.0, 2.5] {
            let p = LayeredProfile::constant(PI, c0).unwrap();
            let pair = eigenpair(Channel::new(2, 2.0), 3, &p, DEFAULT_REL_TOL).unwrap();
            assert!(approx(pair.lambda, c0 * 13.0, 1e-11));
            let ef = build_eigenfunction(&pair, &p).unwrap();
            let amp = (2.0 * c0 / PI).sqrt();
            for i in 0..=100 {
                let y = PI * i as f64 / 100.0;
                let (u, _) = ef.evaluate(y).unwrap();
                assert!((u - amp * (3.0 * y).sin()).abs() < 1e-9);
            }
            assert!(approx(ef.mass(0.0, PI, true).unwrap(), 1.0, 1e-12));
        }
    }

    #[test]
    fn half_mass_by_symmetry() {
        let p = LayeredProfile::constant(PI, 1.0).unwrap();
        let pair = eigenpair(Channel::new(1, 1.0), 1, &p, DEFAULT_REL_TOL).unwrap();
        let ef = build_eigenfunction(&pair, &p).unwrap();
        assert!(approx(ef.mass(0.0, PI / 2.0, true).unwrap(), 0.5, 1e-12));
        let (u, du) = ef.evaluate(PI / 2.0).unwrap();
        assert!(approx(u, (2.0 / PI).sqrt(), 1e-12) && du.abs() < 1e-9);
        assert!(ef.evaluate(PI + 0.1).is_err());
    }

    #[test]
    fn not_an_eigenvalue_is_rejected() {
        let p = LayeredProfile::constant(PI, 1.0).unwrap();
        let pair = Eigenpair { lambda: 3.0, k: 1, mu: 1.0, ell: 1, residual: 0.0 };
        assert!(matches!(build_eigenfunction(&pair, &p), Err(SolverError::NotAnEigenvalue { .. })));
    }

    #[test]
    fn deep_guided_mode_is_smooth_across_interfaces() {
        let p = LayeredProfile::new(vec![0.0, 0.3, 0.7, 1.0], vec![4.0, 1.0, 4.0]).unwrap();
        let ch = Channel::new(60, 60.0 * PI);
        let pair = eigenpair(ch, 1, &p, DEFAULT_REL_TOL).unwrap();
        assert!(pair.lambda < 4.0 * ch.mu2());
        let ef = build_eigenfunction(&pair, &p).unwrap();
        assert!(ef.transmission_residual() < 1e-9, "{}", ef.transmission_residual());
        assert!(ef.boundary_residual() < 1e-9);
        assert!(approx(ef.mass(0.0, 1.0, true).unwrap(), 1.0, 1e-12));
        assert!(ef.mass(0.3, 0.7, true).unwrap() > 0.999);
    }

    #[test]
    fn linear_regime_layer() {
        // λ = c₁ μ² exactly in the middle layer
        let p = LayeredProfile::new(vec![0.0, 0.4, 0.6, 1.0], vec![1.0, 2.0, 1.0]).unwrap();
        let mu = 1.0;
        let ch = Channel::new(1, mu);
        let lam = 2.0;
        let r = layer_regime(lam, mu, 2.0, ch.tol_q());
        assert_eq!(r.regime, Regime::Linear);
        let (st, _) = propagate(lam, ch, &p, StateVector::dirichlet()).unwrap();
        // independent: explicit composition
        let w = 1.0f64;
        let (mut u, mut du) = ((w * 0.4).sin() / w, (w * 0.4).cos());
        u += du * 0.2;
        let (s, c) = (w * 0.4).sin_cos();
        let (u2, du2) = (u * c + du / w * s, -u * w * s + du * c);
        u = u2;
        du = du2;
        let (gu, gdu) = st.relative_to(0);
        assert!((gu - u).abs() < 1e-13 && (gdu - du).abs() < 1e-13);
    }
}
