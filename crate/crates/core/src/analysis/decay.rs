use serde::Serialize;

use super::classify::{threshold_recipe, Threshold};
use super::zeros::min_energy;
use crate::error::AnalysisError;
use crate::layer_solver::Eigenfunction1D;
use crate::profile::{Coefficient, WellDescriptor};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayVerdict {
    pub lambda: f64,
    pub mu: f64,
    /// `∫ₐᵇ u²`.
    pub lhs: f64,
    pub rhs: f64,
    /// `√(2(μ² − λ/c₁))`.
    pub xi: f64,
    pub d: f64,
    pub t: f64,
    /// `sup |(c₁ − c)/(c₁ c)|` over the well.
    pub contrast: f64,
    pub well_mass: f64,
    /// `−ln(lhs)/d`.
    pub observed_exponent: f64,
    pub holds: bool,
}

fn check_band(a: f64, b: f64, height: f64) -> Result<(), AnalysisError> {
    if !(a >= 0.0 && a < b && b <= height) {
        return Err(AnalysisError::BadBand { a, b, height });
    }
    Ok(())
}

/// Mass of a guided mode in a band away from the well against
/// `sup|(c₁−c)/(c₁c)| λ ξ⁻³ e^{−ξ(1−t)d} / ((1−t)d) ∫_well u²`.
pub fn decay_bound_check(
    ef: &Eigenfunction1D,
    well: &WellDescriptor,
    band: (f64, f64),
    t: f64,
) -> Result<DecayVerdict, AnalysisError> {
    let (a, b) = band;
    check_band(a, b, ef.height())?;
    let c1 = well.threshold;
    let mu2 = ef.mu * ef.mu;
    let xi2 = 2.0 * (mu2 - ef.lambda / c1);
    if !(xi2 > 0.0) {
        return Err(AnalysisError::NotGuided { xi2 });
    }
    if b > well.alpha && a < well.beta {
        return Err(AnalysisError::BandIntersectsWell { a, b, alpha: well.alpha, beta: well.beta });
    }
    let xi = xi2.sqrt();
    let d = well.distance_to(a, b);
    let contrast = ef
        .profile()
        .layers()
        .filter(|l| l.hi > well.alpha && l.lo < well.beta)
        .map(|l| ((c1 - l.c) / (c1 * l.c)).abs())
        .fold(0.0, f64::max);
    let well_mass = ef.mass(well.alpha, well.beta, false)?;
    let s = (1.0 - t) * d;
    let rhs = contrast * ef.lambda / xi.powi(3) * (-xi * s).exp() / s * well_mass;
    let lhs = ef.mass(a, b, false)?;
    Ok(DecayVerdict {
        lambda: ef.lambda,
        mu: ef.mu,
        lhs,
        rhs,
        xi,
        d,
        t,
        contrast,
        well_mass,
        observed_exponent: -lhs.ln() / d,
        holds: lhs <= rhs,
    })
}

/// Threshold below which the zero spacing of a non-guided mode may exceed a
/// sixth of the band, so the floor argument does not apply.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FloorPrecondition {
    pub eps: f64,
    pub alpha: f64,
    pub threshold: Threshold,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FloorReport {
    pub band: (f64, f64),
    pub precondition: FloorPrecondition,
    /// Smallest weighted band mass over the modes.
    pub min_mass: f64,
    pub argmin_lambda: f64,
    /// Smallest `inf (u² + u′²)` over the modes.
    pub r2: f64,
    /// `(2/9) 𝔯² (b − a) / c_M`.
    pub floor: f64,
    pub holds: bool,
    /// Every mode also clears the floor built from its own `𝔯²`.
    pub per_mode_holds: bool,
    pub masses: Vec<f64>,
    pub r2_values: Vec<f64>,
}

/// Lower bound on the weighted band mass of non-guided modes.
pub fn nonconcentration_floor(
    modes: &[Eigenfunction1D],
    band: (f64, f64),
    eps: f64,
) -> Result<FloorReport, AnalysisError> {
    let first = modes.first().ok_or(AnalysisError::ModeBelowThreshold { lambdas: vec![] })?;
    let (a, b) = band;
    check_band(a, b, first.height())?;
    let c_max = first.profile().extremes().1;
    let alpha = (b - a) / 6.0;
    let threshold = threshold_recipe(c_max, eps, std::f64::consts::PI / alpha);
    let offending: Vec<f64> = modes
        .iter()
        .filter(|m| !(m.lambda > threshold.lambda && m.lambda >= (c_max + eps) * m.mu * m.mu))
        .map(|m| m.lambda)
        .collect();
    if !offending.is_empty() {
        return Err(AnalysisError::ModeBelowThreshold { lambdas: offending });
    }
    let mut masses = Vec::with_capacity(modes.len());
    let mut r2_values = Vec::with_capacity(modes.len());
    for m in modes {
        masses.push(m.mass(a, b, true)?);
        r2_values.push(min_energy(m).1);
    }
    let factor = 2.0 / 9.0 * (b - a) / c_max;
    let (idx, &min_mass) = masses.iter().enumerate().min_by(|x, y| x.1.total_cmp(y.1)).unwrap();
    let r2 = r2_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let floor = factor * r2;
    let per_mode_holds = masses.iter().zip(&r2_values).all(|(m, r)| *m >= factor * r);
    Ok(FloorReport {
        band,
        precondition: FloorPrecondition { eps, alpha, threshold },
        min_mass,
        argmin_lambda: modes[idx].lambda,
        r2,
        floor,
        holds: min_mass >= floor,
        per_mode_holds,
        masses,
        r2_values,
    })
}

/// `r_⊥ ∫ₐᵇ u²/c`: the share of a separated mode's weighted mass in `ω′ × (a, b)`.
pub fn mass_ratio_3d(ef: &Eigenfunction1D, r_perp: f64, band: (f64, f64)) -> Result<f64, AnalysisError> {
    check_band(band.0, band.1, ef.height())?;
    Ok(r_perp * ef.mass(band.0, band.1, true)?)
}
