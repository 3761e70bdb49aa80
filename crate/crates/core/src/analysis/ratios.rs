use serde::Serialize;

use crate::error::AnalysisError;
use crate::layer_solver::{Eigenfunction1D, Piece};
use crate::profile::Coefficient;

/// Amplitude ratio across one interface, lower layer `L` to upper layer `U`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterfaceRatio {
    pub y: f64,
    /// `β_L² / β_U²` read off the two layer pieces.
    pub measured: f64,
    /// `sin²B + (p_U/p_L) cos²B` with `B` the phase of the upper piece at `y`.
    pub predicted: f64,
    pub residual: f64,
    pub p_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmplitudeRatioReport {
    pub interfaces: Vec<InterfaceRatio>,
    pub max_residual: f64,
    /// Largest `max(|p_U/p_L − 1|, |p_L/p_U − 1|) / |c_U − c_L|` over interfaces.
    pub kappa: f64,
    pub total_variation: f64,
    /// `β_j² / β_0²` for every layer.
    pub cumulative: Vec<f64>,
    pub bound_lo: f64,
    pub bound_hi: f64,
    pub cumulative_holds: bool,
}

fn oscillatory(ef: &Eigenfunction1D) -> Result<Vec<(f64, f64, f64)>, AnalysisError> {
    ef.pieces()
        .iter()
        .enumerate()
        .map(|(j, p)| match *p {
            Piece::Oscillatory { omega, beta, gamma } => Ok((omega, beta, gamma)),
            _ => Err(AnalysisError::EvanescentLayerPresent { layer: j }),
        })
        .collect()
}

/// Layer-to-layer amplitude ratios of a mode that oscillates in every layer.
pub fn amplitude_ratios(ef: &Eigenfunction1D) -> Result<AmplitudeRatioReport, AnalysisError> {
    let waves = oscillatory(ef)?;
    let profile = ef.profile();
    let mu2 = ef.mu * ef.mu;
    let bp = profile.breakpoints();
    let values = profile.values();
    let p: Vec<f64> = waves.iter().map(|w| w.0 * w.0 / mu2).collect();

    let mut interfaces = Vec::new();
    let mut kappa: f64 = 0.0;
    for j in 0..waves.len().saturating_sub(1) {
        let y = bp[j + 1];
        let (_, beta_l, _) = waves[j];
        let (omega_u, beta_u, gamma_u) = waves[j + 1];
        let b = omega_u * (y - gamma_u);
        let p_ratio = p[j + 1] / p[j];
        let predicted = b.sin().powi(2) + p_ratio * b.cos().powi(2);
        let measured = (beta_l / beta_u).powi(2);
        interfaces.push(InterfaceRatio { y, measured, predicted, residual: (measured / predicted - 1.0).abs(), p_ratio });
        let dc = (values[j + 1] - values[j]).abs();
        kappa = kappa.max((p_ratio - 1.0).abs().max((1.0 / p_ratio - 1.0).abs()) / dc);
    }
    let total_variation = profile.total_variation();
    let base = waves[0].1.powi(2);
    let cumulative: Vec<f64> = waves.iter().map(|w| w.1.powi(2) / base).collect();
    let (bound_lo, bound_hi) = ((-kappa * total_variation).exp(), (kappa * total_variation).exp());
    let slack = 1e-12;
    let cumulative_holds =
        cumulative.iter().all(|&r| r >= bound_lo * (1.0 - slack) && r <= bound_hi * (1.0 + slack));
    let max_residual = interfaces.iter().map(|i| i.residual).fold(0.0, f64::max);
    Ok(AmplitudeRatioReport {
        interfaces,
        max_residual,
        kappa,
        total_variation,
        cumulative,
        bound_lo,
        bound_hi,
        cumulative_holds,
    })
}

/// Coefficients and checks for a mode of a three-layer increasing profile,
/// written as `a₀ sin ξ₀y`, `a₁ sin ξ₁y + b₁ cos ξ₁y`, `a₂ sinh ξ₂(H − y)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThreeLayerReport {
    pub lambda: f64,
    pub mu: f64,
    pub a0: f64,
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub xi: [f64; 3],
    /// Relative residuals of the two transmission identities for `a₁² + b₁²`
    /// and of their quotient for `a₂²`.
    pub identity_residuals: [f64; 3],
    /// `(a₂/a₀)² e^{2ξ₂(H−h₁)}`.
    pub scaled_tail: f64,
    pub m1: f64,
    pub m2: f64,
    pub tail_holds: bool,
    /// Unweighted mass on `(0, h₀)` over mass on `(h₀, h₁)`.
    pub mass_ratio: f64,
    pub mass_ratio_bounds: (f64, f64),
    /// Regression slope of `ln ∫ₐᴴ u²` against `a` over the lower half of the top layer.
    pub tail_slope: f64,
}

impl ThreeLayerReport {
    pub fn max_identity_residual(&self) -> f64 {
        self.identity_residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn mass_ratio_holds(&self) -> bool {
        self.mass_ratio >= self.mass_ratio_bounds.0 && self.mass_ratio <= self.mass_ratio_bounds.1
    }

    /// Relative deviation of the tail slope from `−2ξ₂`.
    pub fn tail_slope_error(&self) -> f64 {
        (self.tail_slope / (-2.0 * self.xi[2]) - 1.0).abs()
    }
}

// ln(sinh²x + r cosh²x) without overflow.
fn ln_hyperbolic(x: f64, r: f64) -> f64 {
    let e = (-2.0 * x).exp();
    2.0 * x + (((1.0 - e).powi(2) + r * (1.0 + e).powi(2)) / 4.0).ln()
}

fn rel_log(a: f64, b: f64) -> f64 {
    (a - b).exp_m1().abs()
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub(crate) fn three_layer_shape(ef: &Eigenfunction1D) -> Result<([f64; 3], f64, f64, f64), AnalysisError> {
    let p = ef.profile();
    let v = p.values();
    let bp = p.breakpoints();
    if v.len() != 3 || !(v[0] < v[1] && v[1] < v[2]) {
        return Err(AnalysisError::WrongProfileShape);
    }
    Ok(([v[0], v[1], v[2]], bp[1], bp[2], bp[3]))
}

/// Transmission identities and tail bounds for a mode with
/// `(c₁ + ε)μ² < λ < (c₂ − ε)μ²` on a profile with three increasing values.
pub fn three_layer_ratios(ef: &Eigenfunction1D, eps: f64) -> Result<ThreeLayerReport, AnalysisError> {
    let ([c0, c1, c2], h0, h1, h) = three_layer_shape(ef)?;
    let (lambda, mu) = (ef.lambda, ef.mu);
    let mu2 = mu * mu;
    let (lo, hi) = ((c1 + eps) * mu2, (c2 - eps) * mu2);
    if !(lambda > lo && lambda < hi) {
        return Err(AnalysisError::OutsideZone { lambda, lo, hi });
    }
    let xi0 = (lambda / c0 - mu2).sqrt();
    let xi1 = (lambda / c1 - mu2).sqrt();
    let xi2 = (mu2 - lambda / c2).sqrt();

    let (_, du0) = ef.evaluate(0.0)?;
    let (_, du_h) = ef.evaluate(h)?;
    let a0 = du0 / xi0;
    let a2 = -du_h / xi2;
    let (a1, b1, beta1) = match ef.pieces()[1] {
        Piece::Oscillatory { omega, beta, gamma } => {
            let g = omega * gamma;
            (beta * g.cos(), -beta * g.sin(), beta)
        }
        _ => return Err(AnalysisError::EvanescentLayerPresent { layer: 1 }),
    };

    let r0 = (xi0 / xi1).powi(2);
    let r2 = (xi2 / xi1).powi(2);
    let t = h - h1;
    let ln_beta1 = 2.0 * beta1.abs().ln();
    let ln_a0 = 2.0 * a0.abs().ln();
    let ln_a2 = 2.0 * a2.abs().ln();
    let lower = ((xi0 * h0).sin().powi(2) + r0 * (xi0 * h0).cos().powi(2)).ln();
    let upper = ln_hyperbolic(xi2 * t, r2);
    let identity_residuals =
        [rel_log(ln_beta1, ln_a0 + lower), rel_log(ln_beta1, ln_a2 + upper), rel_log(ln_a2, ln_a0 + lower - upper)];

    // ranges of the two wavenumber ratios over the zone
    let r2_lo = c1 * eps / (c2 * (c2 - c1 - eps));
    let r2_hi = c1 * (c2 - c1 - eps) / (c2 * eps);
    let r0_lo = c1 * (c2 - c0 - eps) / (c0 * (c2 - c1 - eps));
    let r0_hi = c1 * (c1 - c0 + eps) / (c0 * eps);
    let m1 = 4.0 * r0_lo.min(1.0) / (1.0 + 4.0 * r2_hi);
    let m2 = 4.0 * r0_hi.max(1.0) / r2_lo;
    let scaled_tail = (ln_a2 - ln_a0 + 2.0 * xi2 * t).exp();
    let tail_holds = scaled_tail >= m1 && scaled_tail <= m2;

    let m_low = ef.mass(0.0, h0, false)?;
    let m_mid = ef.mass(h0, h1, false)?;
    let mass_ratio = m_low / m_mid;
    // ∫ sin² over a length-ℓ interval is ℓ/2 up to 1/(2ξ); ξ₀ > ξ₁ ≥ μ√(ε/c₁)
    let xi_min = mu * (eps / c1).sqrt();
    let (w0, w1) = (0.5 * h0, 0.5 * (h1 - h0));
    let d0 = 0.25 / xi_min;
    let d1 = 0.5 / xi_min;
    let bounds = (
        (w0 - d0).max(0.0) / (r0_hi.max(1.0) * (w1 + d1)),
        if w1 > d1 { (w0 + d0) / (r0_lo.min(1.0) * (w1 - d1)) } else { f64::INFINITY },
    );

    let samples = 9;
    let xs: Vec<f64> = (0..samples).map(|i| h1 + 0.5 * t * i as f64 / (samples - 1) as f64).collect();
    let ys = xs.iter().map(|&a| ef.mass(a, h, false).map(f64::ln)).collect::<Result<Vec<_>, _>>()?;
    let tail_slope = slope(&xs, &ys);

    Ok(ThreeLayerReport {
        lambda,
        mu,
        a0,
        a1,
        b1,
        a2,
        xi: [xi0, xi1, xi2],
        identity_residuals,
        scaled_tail,
        m1,
        m2,
        tail_holds,
        mass_ratio,
        mass_ratio_bounds: bounds,
        tail_slope,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::layer_solver::{build_eigenfunction, eigenvalues_in_window, Channel};
    use crate::profile::LayeredProfile;

    #[test]
    fn ratio_formula_examples() {
        // B = 0, p ratio 4
        let b: f64 = 0.0;
        assert!((b.sin().powi(2) + 4.0 * b.cos().powi(2) - 4.0).abs() < 1e-15);
        // equal p: ratio 1 for every phase
        for b in [0.1f64, 1.0, 2.5] {
            assert!((b.sin().powi(2) + b.cos().powi(2) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ratios_on_layered_modes() {
        let p = LayeredProfile::uniform(1.0, vec![1.0, 2.0, 1.0, 1.5]).unwrap();
        let ch = Channel::new(1, PI);
        let mu2 = PI * PI;
        let pairs = eigenvalues_in_window(ch, 2.5 * mu2, 200.0 * mu2, &p, 1e-13).unwrap();
        assert!(pairs.len() > 5);
        for pair in pairs {
            let ef = build_eigenfunction(&pair, &p).unwrap();
            let r = amplitude_ratios(&ef).unwrap();
            assert!(r.max_residual < 1e-9, "{}", r.max_residual);
            assert!(r.cumulative_holds);
        }
    }

    #[test]
    fn evanescent_layer_rejected() {
        let p = LayeredProfile::uniform(1.0, vec![1.0, 4.0]).unwrap();
        let ch = Channel::new(1, 20.0);
        let pair = crate::layer_solver::eigenpair(ch, 1, &p, 1e-12).unwrap();
        let ef = build_eigenfunction(&pair, &p).unwrap();
        assert!(matches!(amplitude_ratios(&ef), Err(AnalysisError::EvanescentLayerPresent { layer: 1 })));
    }

    #[test]
    fn three_layer_identities() {
        let p = LayeredProfile::new(vec![0.0, 0.1, 0.6, 1.0], vec![1.0, 1.2, 4.0]).unwrap();
        let eps = 0.05;
        let mu = 20.0 * PI;
        let ch = Channel::new(20, mu);
        let pairs = eigenvalues_in_window(ch, (1.2 + eps) * mu * mu, (4.0 - eps) * mu * mu, &p, 1e-13).unwrap();
        assert!(!pairs.is_empty());
        for pair in pairs {
            let ef = build_eigenfunction(&pair, &p).unwrap();
            let r = three_layer_ratios(&ef, eps).unwrap();
            assert!(r.max_identity_residual() < 1e-9, "{:?}", r.identity_residuals);
            assert!(r.tail_holds, "{} not in [{}, {}]", r.scaled_tail, r.m1, r.m2);
            assert!(r.mass_ratio_holds());
        }
        let flat = LayeredProfile::uniform(1.0, vec![1.0, 2.0]).unwrap();
        let pair = crate::layer_solver::eigenpair(ch, 1, &flat, 1e-12).unwrap();
        let ef = build_eigenfunction(&pair, &flat).unwrap();
        assert_eq!(three_layer_ratios(&ef, eps).unwrap_err(), AnalysisError::WrongProfileShape);
    }
}
