use serde::Serialize;

use super::zeros::{half_wave_peaks, min_amplitude, zeros};
use crate::error::{AnalysisError, SolverError};
use crate::general_solver::GridEigenfunction;
use crate::layer_solver::Eigenfunction1D;
use crate::profile::{Coefficient, SampledProfile};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub lambda: f64,
    pub mu: f64,
    /// `u² + (u′/α)²`, `α = √(λ/c − μ²)`, sampled along the height.
    pub energy: Vec<f64>,
    pub energy_nondecreasing: bool,
    pub peaks: Vec<f64>,
    pub peaks_nondecreasing: bool,
    pub max_peak_ratio: f64,
    /// `c_M (c_M + ε − c_m) / (c_m ε)`.
    pub constant: f64,
    pub ratio_holds: bool,
    pub r2: f64,
    /// `H 𝔠² 𝔯²`, compared against `c_m`.
    pub floor_lhs: f64,
    pub c_m: f64,
    pub floor_holds: bool,
}

impl MonotoneReport {
    pub fn holds(&self) -> bool {
        self.energy_nondecreasing && self.peaks_nondecreasing && self.ratio_holds && self.floor_holds
    }
}

fn nondecreasing(values: &[f64], rel: f64) -> bool {
    values.windows(2).all(|w| w[1] >= w[0] - rel * w[0].abs().max(w[1].abs()))
}

/// Energy and peak monotonicity of a mode on a nondecreasing profile.
pub fn monotone_checks(ef: &Eigenfunction1D, eps: f64) -> Result<MonotoneReport, AnalysisError> {
    let profile = ef.profile();
    if !profile.is_nondecreasing() {
        return Err(AnalysisError::NotMonotone);
    }
    let (c_m, c_max) = profile.extremes();
    let mu2 = ef.mu * ef.mu;
    let per_layer = 16;
    let mut energy = Vec::new();
    for (j, l) in profile.layers().enumerate() {
        let q = ef.lambda / l.c - mu2;
        if !(q > 0.0) {
            return Err(AnalysisError::EvanescentLayerPresent { layer: j });
        }
        let piece = ef.pieces()[j];
        for i in 0..=per_layer {
            let y = l.lo + (l.hi - l.lo) * i as f64 / per_layer as f64;
            let (u, du) = piece.eval(l.lo, l.hi, y);
            energy.push(u * u + du * du / q);
        }
    }
    let zs = zeros(ef);
    let peaks: Vec<f64> = half_wave_peaks(ef, &zs).into_iter().map(|p| p.1).collect();
    let lo = peaks.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = peaks.iter().cloned().fold(0.0, f64::max);
    let max_peak_ratio = hi / lo;
    let constant = c_max * (c_max + eps - c_m) / (c_m * eps);
    let r2 = min_amplitude(ef, 0.0).r2;
    let floor_lhs = ef.height() * constant * constant * r2;
    Ok(MonotoneReport {
        lambda: ef.lambda,
        mu: ef.mu,
        energy_nondecreasing: nondecreasing(&energy, 1e-10),
        energy,
        peaks_nondecreasing: nondecreasing(&peaks, 1e-9),
        peaks,
        max_peak_ratio,
        constant,
        ratio_holds: max_peak_ratio <= constant,
        r2,
        floor_lhs,
        c_m,
        floor_holds: floor_lhs >= c_m,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub lambda: f64,
    pub mu: f64,
    /// `((c_M + ε)/ε) sup |c′|/c`.
    pub constant: f64,
    /// Largest `|dE/dy| / E` on the grid, by centered differences of `E`.
    pub max_log_rate: f64,
    pub pointwise_holds: bool,
    /// `max E / min E`.
    pub global_ratio: f64,
    pub global_bound: f64,
    pub global_holds: bool,
}

impl LipschitzReport {
    pub fn holds(&self) -> bool {
        self.pointwise_holds && self.global_holds
    }
}

/// Growth of `E = u² + (u′/α)²` for a non-guided mode on a Lipschitz profile.
///
/// The pointwise rate is measured by differencing `E` on the grid, so it carries
/// a truncation error of order `(α h)²`; the comparison allows a relative 1e-3.
pub fn lipschitz_energy_check(
    ef: &GridEigenfunction,
    profile: &SampledProfile,
    eps: f64,
) -> Result<LipschitzReport, AnalysisError> {
    if !profile.has_derivatives() {
        return Err(SolverError::MissingDerivatives.into());
    }
    let (_, c_max) = profile.extremes();
    let mu2 = ef.mu * ef.mu;
    let lo = (c_max + eps) * mu2;
    if !(ef.lambda >= lo) {
        return Err(AnalysisError::OutsideZone { lambda: ef.lambda, lo, hi: f64::INFINITY });
    }
    let constant = (c_max + eps) / eps * profile.sup_log_derivative();
    let energy: Vec<f64> = ef
        .y
        .iter()
        .zip(ef.u.iter().zip(&ef.du))
        .map(|(&y, (&u, &du))| {
            let q = ef.lambda / profile.value_at(y) - mu2;
            u * u + du * du / q
        })
        .collect();
    let mut max_log_rate: f64 = 0.0;
    for i in 1..energy.len() - 1 {
        let rate = (energy[i + 1] - energy[i - 1]) / (ef.y[i + 1] - ef.y[i - 1]);
        max_log_rate = max_log_rate.max(rate.abs() / energy[i]);
    }
    let e_min = energy.iter().cloned().fold(f64::INFINITY, f64::min);
    let e_max = energy.iter().cloned().fold(0.0, f64::max);
    let global_bound = (constant * ef.height()).exp();
    Ok(LipschitzReport {
        lambda: ef.lambda,
        mu: ef.mu,
        constant,
        max_log_rate,
        pointwise_holds: max_log_rate <= constant * (1.0 + 1e-3) + 1e-9,
        global_ratio: e_max / e_min,
        global_bound,
        global_holds: e_max / e_min <= global_bound,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::general_solver::{numerov_solve, pruefer_eigenvalues, StepControl};
    use crate::layer_solver::{build_eigenfunction, eigenvalues_in_window, Channel};
    use crate::profile::{Interpolation, LayeredProfile};

    #[test]
    fn constant_profile_has_flat_peaks() {
        let p = LayeredProfile::constant(1.0, 2.0).unwrap();
        let ch = Channel::new(1, 3.0);
        let pair = crate::layer_solver::eigenpair(ch, 9, &p, 1e-13).unwrap();
        let r = monotone_checks(&build_eigenfunction(&pair, &p).unwrap(), 0.1).unwrap();
        assert!((r.max_peak_ratio - 1.0).abs() < 1e-10);
        assert!(r.holds());
    }

    #[test]
    fn two_layer_peaks_grow() {
        let p = LayeredProfile::uniform(1.0, vec![1.0, 2.0]).unwrap();
        let eps = 0.5;
        let mu = 4.0 * PI;
        let ch = Channel::new(4, mu);
        let pairs = eigenvalues_in_window(ch, (2.0 + eps) * mu * mu, 12.0 * mu * mu, &p, 1e-13).unwrap();
        assert!(!pairs.is_empty());
        for pair in pairs {
            let r = monotone_checks(&build_eigenfunction(&pair, &p).unwrap(), eps).unwrap();
            assert!(r.holds(), "{r:?}");
        }
        let down = LayeredProfile::uniform(1.0, vec![2.0, 1.0]).unwrap();
        let pair = crate::layer_solver::eigenpair(ch, 30, &down, 1e-13).unwrap();
        let ef = build_eigenfunction(&pair, &down).unwrap();
        assert_eq!(monotone_checks(&ef, eps).unwrap_err(), AnalysisError::NotMonotone);
    }

    #[test]
    fn linear_profile_constant() {
        let p = SampledProfile::from_fn_with_derivatives(1.0, 400, |y| 1.0 + y, |_| 1.0, |_| 0.0).unwrap();
        let eps = 0.5;
        assert!(((2.0 + eps) / eps * p.sup_log_derivative() - 5.0).abs() < 1e-12);
        let mu = 3.0 * PI;
        let ch = Channel::new(3, mu);
        let lams =
            pruefer_eigenvalues(ch, (2.0 + eps) * mu * mu, 6.0 * mu * mu, &p, &StepControl::default(), 1e-12).unwrap();
        assert!(!lams.is_empty());
        for pair in lams {
            let g = numerov_solve(pair.lambda, ch, &p, 4000).unwrap();
            let r = lipschitz_energy_check(&g, &p, eps).unwrap();
            assert!((r.constant - 5.0).abs() < 1e-12);
            assert!(r.holds(), "{r:?}");
        }
        let bare = SampledProfile::from_fn(1.0, 10, Interpolation::PiecewiseLinear, |y| 1.0 + y).unwrap();
        let g = numerov_solve(400.0, ch, &bare, 100).unwrap();
        assert!(matches!(
            lipschitz_energy_check(&g, &bare, eps),
            Err(AnalysisError::Solver(SolverError::MissingDerivatives))
        ));
    }
}
