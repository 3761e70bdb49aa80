use std::f64::consts::PI;

use serde::Serialize;

use crate::cross_section::CrossSection;
use crate::error::AnalysisError;
use crate::layer_solver::{eigenpair, eigenvalues_in_window, Channel};
use crate::profile::{Coefficient, LayeredProfile};

/// Sufficient condition for eigenvalues in `((c₁+ε)μ², (c₂−ε)μ²)` on a
/// three-value increasing profile, with the trial-function counts behind it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExistenceCondition {
    pub c: [f64; 3],
    pub h0: f64,
    pub h1: f64,
    pub height: f64,
    pub eps: f64,
    /// `√(c₁(c₁−c₀)/(c₀(c₂−c₁)))`.
    pub lhs: f64,
    /// `(h₁−h₀)/(H−h₀)`.
    pub rhs: f64,
    pub holds: bool,
    /// Coefficient of `μ` in the upper end of the admissible index range.
    pub upper_slope: f64,
    /// Coefficient of `μ` in the lower end.
    pub lower_slope: f64,
    /// Beyond this `μ` the index range always contains an integer.
    pub mu_threshold: Option<f64>,
    /// Smallest `μ` at which the range contains an integer at all.
    pub mu_first: Option<f64>,
}

impl ExistenceCondition {
    /// `(n, N)`: how many half-sine trial functions fit in `(0, h₀)` and `(h₀, h₁)`.
    pub fn trial_counts(&self, mu: f64) -> (u64, u64) {
        let [c0, c1, c2] = self.c;
        let n = (self.h0 / PI * ((c1 - c0) / c0).sqrt() * mu).floor();
        let big = ((self.h1 - self.h0) / PI * ((c2 - self.eps - c1) / c1).sqrt() * mu).floor();
        (n.max(0.0) as u64, big.max(0.0) as u64)
    }

    /// Indices `p` with `β_p > (c₁+ε)μ²` guaranteed by comparison with the
    /// constant profile `c₀` start above `lower_slope · μ`; indices up to `n + N`
    /// satisfy `β_p ≤ (c₂−ε)μ²`. Returns how many lie in between.
    pub fn guaranteed_count(&self, mu: f64) -> u64 {
        let (n, big) = self.trial_counts(mu);
        let above = (self.lower_slope * mu).floor() as u64;
        (n + big).saturating_sub(above)
    }
}

pub fn existence_condition(
    c: [f64; 3],
    h0: f64,
    h1: f64,
    height: f64,
    eps: f64,
) -> Result<ExistenceCondition, AnalysisError> {
    let [c0, c1, c2] = c;
    let ordered = 0.0 < c0 && c0 < c1 && c1 < c2 && 0.0 < h0 && h0 < h1 && h1 < height;
    if !ordered || !(eps > 0.0 && eps < 0.5 * (c2 - c1)) {
        return Err(AnalysisError::InvalidOrdering);
    }
    let lhs = (c1 * (c1 - c0) / (c0 * (c2 - c1))).sqrt();
    let rhs = (h1 - h0) / (height - h0);
    let upper_slope = (h0 * ((c1 - c0) / c0).sqrt() + (h1 - h0) * ((c2 - eps - c1) / c1).sqrt()) / PI;
    let lower_slope = height / PI * ((c1 + eps - c0) / c0).sqrt();
    let gap = upper_slope - lower_slope;
    let (mu_threshold, mu_first) = if gap > 0.0 {
        // need an integer p with lower·μ < p ≤ upper·μ − 2
        let p = (2.0 * lower_slope / gap).floor() + 1.0;
        (Some(3.0 / gap), Some((p + 2.0) / upper_slope))
    } else {
        (None, None)
    };
    Ok(ExistenceCondition {
        c,
        h0,
        h1,
        height,
        eps,
        lhs,
        rhs,
        holds: lhs < rhs,
        upper_slope,
        lower_slope,
        mu_threshold,
        mu_first,
    })
}

/// Bound on the lowest eigenvalue from a single half-sine on `(0, h₀)`:
/// `β₁ ≤ c₀(μ² + (π/h₀)²)`, which drops below `(c₁ − ε₀)μ²`,
/// `ε₀ = (c₁ − c₀)/2`, once `μ² ≥ c₀(π/h₀)²/ε₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FirstEigenvalueBound {
    pub lambda: f64,
    pub trial_bound: f64,
    pub guided_bound: f64,
    pub applies: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExistenceVerdict {
    pub k: usize,
    pub mu: f64,
    pub window: (f64, f64),
    pub count: usize,
    pub guaranteed: u64,
    pub past_threshold: bool,
    pub nonempty: bool,
    pub first: FirstEigenvalueBound,
}

impl ExistenceVerdict {
    pub fn holds(&self) -> bool {
        (!self.past_threshold || self.nonempty)
            && self.count as u64 >= self.guaranteed
            && self.first.holds
    }
}

/// Searches the window `((c₁+ε)μ_k², (c₂−ε)μ_k²)` for each `k` in `ks`.
pub fn existence_verify(
    profile: &LayeredProfile,
    eps: f64,
    cross_section: &CrossSection,
    ks: std::ops::RangeInclusive<usize>,
    rel_tol: f64,
) -> Result<Vec<ExistenceVerdict>, AnalysisError> {
    let v = profile.values();
    let bp = profile.breakpoints();
    if v.len() != 3 {
        return Err(AnalysisError::WrongProfileShape);
    }
    let cond = existence_condition([v[0], v[1], v[2]], bp[1], bp[2], profile.height(), eps)
        .map_err(|_| AnalysisError::WrongProfileShape)?;
    let [c0, c1, c2] = cond.c;
    let eps0 = 0.5 * (c1 - c0);
    let theta1 = (PI / cond.h0).powi(2);
    let modes = cross_section.mu_values(*ks.end());
    let mut out = Vec::new();
    for k in ks {
        let mode = &modes[k - 1];
        let mu = mode.mu();
        let mu2 = mode.mu2;
        let ch = Channel::from(mode);
        let window = ((c1 + eps) * mu2, (c2 - eps) * mu2);
        let pairs = eigenvalues_in_window(ch, window.0, window.1, profile, rel_tol)?;
        let lowest = eigenpair(ch, 1, profile, rel_tol)?.lambda;
        let trial_bound = c0 * (mu2 + theta1);
        let guided_bound = (c1 - eps0) * mu2;
        out.push(ExistenceVerdict {
            k,
            mu,
            window,
            count: pairs.len(),
            guaranteed: cond.guaranteed_count(mu),
            past_threshold: cond.mu_threshold.is_some_and(|t| mu > t),
            nonempty: !pairs.is_empty(),
            first: FirstEigenvalueBound {
                lambda: lowest,
                trial_bound,
                guided_bound,
                applies: eps0 * mu2 >= c0 * theta1,
                holds: lowest <= trial_bound && (eps0 * mu2 < c0 * theta1 || lowest <= guided_bound),
            },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_triple() {
        let c = existence_condition([1.0, 1.2, 4.0], 0.1, 0.6, 1.0, 0.05).unwrap();
        assert!((c.lhs - 0.2928).abs() < 1e-4);
        assert!((c.rhs - 0.5556).abs() < 1e-4);
        assert!(c.holds);
        let t = c.mu_threshold.unwrap();
        assert!(t > 30.0 && t < 32.0, "{t}");
        assert!(c.mu_first.unwrap() <= t);
    }

    #[test]
    fn trial_count_example() {
        let c = existence_condition([1.0, 2.0, 4.0], PI, 4.0, 5.0, 0.1).unwrap();
        assert_eq!(c.trial_counts(10.0).0, 10);
    }

    #[test]
    fn condition_fails_when_middle_value_is_large() {
        // c₁² ≥ c₀c₂
        let c = existence_condition([1.0, 3.0, 4.0], 0.1, 0.6, 1.0, 0.05).unwrap();
        assert!(!c.holds);
        assert_eq!(existence_condition([1.0, 0.5, 4.0], 0.1, 0.6, 1.0, 0.05), Err(AnalysisError::InvalidOrdering));
    }

    #[test]
    fn windows_nonempty_past_threshold() {
        let p = LayeredProfile::new(vec![0.0, 0.1, 0.6, 1.0], vec![1.0, 1.2, 4.0]).unwrap();
        let cs = CrossSection::interval(1.0).unwrap();
        let v = existence_verify(&p, 0.05, &cs, 10..=14, 1e-12).unwrap();
        for verdict in &v {
            assert!(verdict.holds(), "{verdict:?}");
            assert!(verdict.nonempty);
        }
    }
}
