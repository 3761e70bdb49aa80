use serde::Serialize;

use crate::error::AnalysisError;
use crate::layer_solver::Eigenpair;
use crate::profile::{Coefficient, WellDescriptor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ModeTag {
    Guided,
    NonGuided,
    Residual,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeClass {
    pub tag: ModeTag,
    pub eps: f64,
    pub c1: Option<f64>,
    pub c_m: f64,
    pub c_max: f64,
    /// `√(2(μ² − λ/c₁))` for guided modes.
    pub xi: Option<f64>,
}

/// `0.05 (c_M − c_m)`, or `0.05 c_M` for a constant profile.
pub fn default_eps(profile: &impl Coefficient) -> f64 {
    let (c_m, c_max) = profile.extremes();
    if c_max > c_m {
        0.05 * (c_max - c_m)
    } else {
        0.05 * c_max
    }
}

/// Tags a mode as guided (`c_m μ² ≤ λ ≤ (c₁ − ε)μ²`, needs a well),
/// non-guided (`λ ≥ (c_M + ε)μ²`) or residual.
///
/// Without a well the guided test is skipped and such modes are residual.
pub fn classify(pair: &Eigenpair, profile: &impl Coefficient, eps: f64, well: Option<&WellDescriptor>) -> ModeClass {
    let (c_m, c_max) = profile.extremes();
    let mu2 = pair.mu * pair.mu;
    let lambda = pair.lambda;
    let c1 = well.map(|w| w.threshold);
    let mut class = ModeClass { tag: ModeTag::Residual, eps, c1, c_m, c_max, xi: None };
    if lambda >= (c_max + eps) * mu2 {
        class.tag = ModeTag::NonGuided;
    } else if let Some(c1) = c1 {
        if c_m * mu2 <= lambda && lambda <= (c1 - eps) * mu2 {
            class.tag = ModeTag::Guided;
            class.xi = Some((2.0 * (mu2 - lambda / c1)).sqrt());
        }
    }
    class
}

/// Like [`classify`], but a missing well is an error.
pub fn classify_guided(
    pair: &Eigenpair,
    profile: &impl Coefficient,
    eps: f64,
    well: Option<&WellDescriptor>,
) -> Result<ModeClass, AnalysisError> {
    let well = well.ok_or(AnalysisError::MissingWell)?;
    Ok(classify(pair, profile, eps, Some(well)))
}

/// Spectral threshold built from a target scale `γ`:
/// `μ₀ = γ√(c_M/ε)`, `λ₀ = c_M(γ² + μ₀²)`, `λ = max[(c_M + ε)μ₀², λ₀]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Threshold {
    pub gamma: f64,
    pub mu0: f64,
    pub lambda0: f64,
    pub lambda: f64,
}

/// Use `γ = π/α` for zero gaps below `α`, and `γ = 1` for the minimal-amplitude threshold.
pub fn threshold_recipe(c_max: f64, eps: f64, gamma: f64) -> Threshold {
    let mu0 = gamma * (c_max / eps).sqrt();
    let lambda0 = c_max * (gamma * gamma + mu0 * mu0);
    Threshold { gamma, mu0, lambda0, lambda: ((c_max + eps) * mu0 * mu0).max(lambda0) }
}
