//! Grid solutions of `u″ = −Q(y) u`, `Q = λ/c − μ²`, by the Numerov stencil.

use serde::Serialize;

use crate::error::SolverError;
use crate::layer_solver::Channel;
use crate::profile::Coefficient;

/// A solution sampled on a uniform grid, with derivative values.
///
/// Between nodes it is evaluated by cubic Hermite interpolation of `(u, u′)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridEigenfunction {
    pub lambda: f64,
    pub k: usize,
    pub mu: f64,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
}

const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

impl GridEigenfunction {
    pub fn from_parts(lambda: f64, channel: Channel, y: Vec<f64>, u: Vec<f64>, du: Vec<f64>) -> Self {
        Self { lambda, k: channel.k, mu: channel.mu, y, u, du }
    }

    pub fn height(&self) -> f64 {
        *self.y.last().unwrap()
    }

    fn cell(&self, y: f64) -> usize {
        let h = self.y[1] - self.y[0];
        ((y / h).floor().max(0.0) as usize).min(self.y.len() - 2)
    }

    /// `(u, u′)` at `y` by Hermite interpolation.
    pub fn evaluate(&self, y: f64) -> (f64, f64) {
        let i = self.cell(y);
        let h = self.y[i + 1] - self.y[i];
        let t = (y - self.y[i]) / h;
        let (u0, u1, m0, m1) = (self.u[i], self.u[i + 1], self.du[i] * h, self.du[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let u = (2.0 * t3 - 3.0 * t2 + 1.0) * u0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * u1
            + (t3 - t2) * m1;
        let du = ((6.0 * t2 - 6.0 * t) * u0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * u1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        (u, du)
    }

    /// `∫ₐᵇ u²` (or `∫ u²/c` if `weighted`) by 3-point Gauss rules per cell.
    pub fn mass(&self, profile: &impl Coefficient, a: f64, b: f64, weighted: bool) -> f64 {
        let mut total = 0.0;
        for i in 0..self.y.len() - 1 {
            let (lo, hi) = (a.max(self.y[i]), b.min(self.y[i + 1]));
            if hi <= lo {
                continue;
            }
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for (x, w) in GAUSS3 {
                let y = mid + half * x;
                let (u, _) = self.evaluate(y);
                let f = if weighted { u * u / profile.value_at(y) } else { u * u };
                total += w * half * f;
            }
        }
        total
    }

    /// Scales so that `∫₀ᴴ u²/c = 1` and `u′(0) > 0`.
    pub fn normalize(&mut self, profile: &impl Coefficient) {
        let norm = self.mass(profile, 0.0, self.height(), true).sqrt();
        let s = if self.du[0] < 0.0 { -1.0 / norm } else { 1.0 / norm };
        self.u.iter_mut().for_each(|v| *v *= s);
        self.du.iter_mut().for_each(|v| *v *= s);
    }

    /// `max |u − v|` and `max |u′ − v′|` over this grid's nodes.
    pub fn sup_distance(&self, other: impl Fn(f64) -> (f64, f64)) -> (f64, f64) {
        self.y.iter().zip(self.u.iter().zip(&self.du)).fold((0.0, 0.0), |(a, b), (&y, (&u, &du))| {
            let (v, dv) = other(y);
            (f64::max(a, (u - v).abs()), f64::max(b, (du - dv).abs()))
        })
    }
}

/// Integrates from `(u, u′)(0) = (0, 1)` with `n` uniform steps and normalizes.
pub fn numerov_solve(
    lambda: f64,
    channel: Channel,
    profile: &impl Coefficient,
    n: usize,
) -> Result<GridEigenfunction, SolverError> {
    let n = n.max(4);
    let height = profile.height();
    let h = height / n as f64;
    let mu2 = channel.mu2();
    let qf = |y: f64| lambda / profile.value_at(y) - mu2;
    let y: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let q: Vec<f64> = y.iter().map(|&y| qf(y)).collect();

    // first step by RK4 substeps
    let sub = 32;
    let hs = h / sub as f64;
    let (mut u, mut v) = (0.0f64, 1.0f64);
    for s in 0..sub {
        let x = s as f64 * hs;
        let f = |x: f64, u: f64, v: f64| (v, -qf(x) * u);
        let (k1u, k1v) = f(x, u, v);
        let (k2u, k2v) = f(x + 0.5 * hs, u + 0.5 * hs * k1u, v + 0.5 * hs * k1v);
        let (k3u, k3v) = f(x + 0.5 * hs, u + 0.5 * hs * k2u, v + 0.5 * hs * k2v);
        let (k4u, k4v) = f(x + hs, u + hs * k3u, v + hs * k3v);
        u += hs / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += hs / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    let mut us = vec![0.0; n + 1];
    us[1] = u;
    let h2 = h * h / 12.0;
    for i in 1..n {
        let next = (2.0 * (1.0 - 5.0 * h2 * q[i]) * us[i] - (1.0 + h2 * q[i - 1]) * us[i - 1]) / (1.0 + h2 * q[i + 1]);
        if !next.is_finite() {
            return Err(SolverError::StepFailure { y: y[i] });
        }
        us[i + 1] = next;
        if next.abs() > 1e200 {
            us.iter_mut().for_each(|x| *x *= 1e-200);
        }
    }
    let scale0 = us[1] / u;
    let mut du = vec![0.0; n + 1];
    du[0] = scale0;
    let h6 = h * h / 6.0;
    for i in 1..n {
        du[i] = ((1.0 + h6 * q[i + 1]) * us[i + 1] - (1.0 + h6 * q[i - 1]) * us[i - 1]) / (2.0 * h);
    }
    // one-sided third-order formula at the top
    du[n] = (us[n] - us[n - 1]) / h - h * (2.0 * q[n] * us[n] + q[n - 1] * us[n - 1]) / 6.0;
    let mut g = GridEigenfunction::from_parts(lambda, channel, y, us, du);
    g.normalize(profile);
    Ok(g)
}
