//! Liouville normal form of `u″ + μ² p u = 0`, `p = λ/(μ²c) − 1`.
//!
//! With `ξ = ∫₀^y √p` and `η = p^{1/4} u`, the equation becomes
//! `η_ξξ + μ² η = ρ η` where `ρ = ¼ p″/p² − (5/16) p′²/p³`, so that
//! `η = α sin(μξ) + O(1/μ)` with `α = u′(0) p(0)^{−1/4} / μ`.

use serde::Serialize;

use crate::error::SolverError;
use crate::general_solver::numerov::GridEigenfunction;
use crate::layer_solver::Channel;
use crate::profile::{Coefficient, SampledProfile};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiouvilleFrame {
    pub mu: f64,
    pub lambda: f64,
    pub y: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub rho: Vec<f64>,
    pub p: Vec<f64>,
    /// `ξ(H)`.
    pub h_hat: f64,
    /// `η′(0)` in `ξ`, i.e. `u′(0) p(0)^{−1/4}`.
    pub deta0: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LiouvilleResidual {
    pub alpha: f64,
    /// `max |η(ξ) − α sin(μξ)|` over the grid.
    pub sup_dev: f64,
    /// `Ĥ · sup|ρ| · sup|η| / μ`.
    pub volterra_bound: f64,
    /// `∫₀^Ĥ η² dξ`.
    pub eta_energy: f64,
    pub sup_rho: f64,
}

/// Builds the frame from a grid solution `u` of the original equation.
pub fn liouville_transform(
    profile: &SampledProfile,
    lambda: f64,
    channel: Channel,
    u: &GridEigenfunction,
) -> Result<LiouvilleFrame, SolverError> {
    if !profile.has_derivatives() {
        return Err(SolverError::MissingDerivatives);
    }
    let mu2 = channel.mu2();
    let r = lambda / mu2;
    let mut p = Vec::with_capacity(u.y.len());
    let mut rho = Vec::with_capacity(u.y.len());
    for &y in &u.y {
        let c = profile.value_at(y);
        let dc = profile.derivative_at(y);
        let ddc = profile.second_derivative_at(y).ok_or(SolverError::MissingDerivatives)?;
        let pv = r / c - 1.0;
        let dp = -r * dc / (c * c);
        let ddp = -r * (ddc / (c * c) - 2.0 * dc * dc / (c * c * c));
        p.push(pv);
        rho.push(0.25 * ddp / (pv * pv) - 5.0 / 16.0 * dp * dp / (pv * pv * pv));
    }
    let p_min = p.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(p_min > 0.0) {
        return Err(SolverError::OutsideSpectralWindow { lambda, mu: channel.mu, p_min });
    }
    let mut xi = vec![0.0; p.len()];
    for i in 1..p.len() {
        xi[i] = xi[i - 1] + 0.5 * (u.y[i] - u.y[i - 1]) * (p[i].sqrt() + p[i - 1].sqrt());
    }
    let eta = u.u.iter().zip(&p).map(|(u, p)| p.powf(0.25) * u).collect();
    let h_hat = *xi.last().unwrap();
    let deta0 = u.du[0] * p[0].powf(-0.25);
    Ok(LiouvilleFrame { mu: channel.mu, lambda, y: u.y.clone(), xi, eta, rho, p, h_hat, deta0 })
}

pub fn liouville_residual(frame: &LiouvilleFrame, mu: f64) -> LiouvilleResidual {
    let alpha = frame.deta0 / mu;
    let sup_dev = frame
        .xi
        .iter()
        .zip(&frame.eta)
        .map(|(x, e)| (e - alpha * (mu * x).sin()).abs())
        .fold(0.0, f64::max);
    let sup_rho = frame.rho.iter().map(|r| r.abs()).fold(0.0, f64::max);
    let sup_eta = frame.eta.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let eta_energy = (1..frame.xi.len())
        .map(|i| 0.5 * (frame.xi[i] - frame.xi[i - 1]) * (frame.eta[i].powi(2) + frame.eta[i - 1].powi(2)))
        .sum();
    LiouvilleResidual { alpha, sup_dev, volterra_bound: frame.h_hat * sup_rho * sup_eta / mu, eta_energy, sup_rho }
}
