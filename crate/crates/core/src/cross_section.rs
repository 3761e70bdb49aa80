//! Box cross-sections and their Dirichlet-Laplacian modes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::CrossSectionError;

/// `Ω′ = (0, L₁) × … × (0, L_d)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    lengths: Vec<f64>,
}

/// A transverse eigenpair: `φ(x) = Π sin(n_i π x_i / L_i)`, `μ² = Σ (n_i π / L_i)²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransverseMode {
    /// One-based position in the sorted sequence.
    pub k: usize,
    pub index: Vec<u32>,
    pub mu2: f64,
}

impl TransverseMode {
    pub fn mu(&self) -> f64 {
        self.mu2.sqrt()
    }
}

impl CrossSection {
    pub fn new(lengths: Vec<f64>) -> Result<Self, CrossSectionError> {
        if lengths.is_empty() {
            return Err(CrossSectionError::NoSides);
        }
        for (index, &value) in lengths.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(CrossSectionError::NonPositiveSide { index, value });
            }
        }
        Ok(Self { lengths })
    }

    pub fn interval(length: f64) -> Result<Self, CrossSectionError> {
        Self::new(vec![length])
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn dimension(&self) -> usize {
        self.lengths.len()
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    fn mu2_of(&self, index: &[u32]) -> f64 {
        index.iter().zip(&self.lengths).map(|(&n, &l)| (n as f64 * PI / l).powi(2)).sum()
    }

    /// The `k`-th mode (one-based).
    pub fn mode(&self, k: usize) -> TransverseMode {
        self.mu_values(k).pop().expect("k >= 1")
    }

    /// First `k_max` modes in nondecreasing `μ²`, counting multiplicity,
    /// ties broken lexicographically on the multi-index.
    pub fn mu_values(&self, k_max: usize) -> Vec<TransverseMode> {
        let k_max = k_max.max(1);
        if self.lengths.len() == 1 {
            return (1..=k_max)
                .map(|k| {
                    let index = vec![k as u32];
                    TransverseMode { k, mu2: self.mu2_of(&index), index }
                })
                .collect();
        }
        // Grow the cut-off until at least k_max indices fall below it; every
        // index with μ² below the cut-off is then enumerated.
        let lmax = self.lengths.iter().cloned().fold(0.0, f64::max);
        let mut bound = (PI / lmax).powi(2) * self.dimension() as f64 * 2.0;
        loop {
            let mut found = Vec::new();
            self.enumerate(bound, &mut vec![], &mut found);
            if found.len() >= k_max {
                found.sort_by(|a: &(f64, Vec<u32>), b| {
                    let scale = a.0.max(b.0);
                    if (a.0 - b.0).abs() <= 1e-12 * scale {
                        a.1.cmp(&b.1)
                    } else {
                        a.0.total_cmp(&b.0)
                    }
                });
                return found
                    .into_iter()
                    .take(k_max)
                    .enumerate()
                    .map(|(i, (mu2, index))| TransverseMode { k: i + 1, index, mu2 })
                    .collect();
            }
            bound *= 2.0;
        }
    }

    fn enumerate(&self, bound: f64, prefix: &mut Vec<u32>, out: &mut Vec<(f64, Vec<u32>)>) {
        let axis = prefix.len();
        if axis == self.lengths.len() {
            out.push((self.mu2_of(prefix), prefix.clone()));
            return;
        }
        let used = self.mu2_of(prefix);
        let rest: f64 = self.lengths[axis + 1..].iter().map(|l| (PI / l).powi(2)).sum();
        let mut n = 1u32;
        while used + (n as f64 * PI / self.lengths[axis]).powi(2) + rest <= bound {
            prefix.push(n);
            self.enumerate(bound, prefix, out);
            prefix.pop();
            n += 1;
        }
    }

    /// `∫_{ω′} φ² / ∫_{Ω′} φ²` for the sub-box `ω′ = Π (lo_i, hi_i)`.
    pub fn phi_mass_ratio(&self, mode: &TransverseMode, subbox: &[(f64, f64)]) -> Result<f64, CrossSectionError> {
        if subbox.len() != self.dimension() {
            return Err(CrossSectionError::DimensionMismatch { expected: self.dimension(), found: subbox.len() });
        }
        if mode.index.len() != self.dimension() || mode.index.contains(&0) {
            return Err(CrossSectionError::BadMultiIndex { index: mode.index.clone() });
        }
        let mut ratio = 1.0;
        for (axis, ((&(lo, hi), &length), &n)) in subbox.iter().zip(&self.lengths).zip(&mode.index).enumerate() {
            if !(0.0 <= lo && lo <= hi && hi <= length) {
                return Err(CrossSectionError::SubboxOutOfBounds { axis, lo, hi, length });
            }
            let w = n as f64 * PI / length;
            let f = |x: f64| x / 2.0 - (2.0 * w * x).sin() / (4.0 * w);
            ratio *= (f(hi) - f(lo)) / (length / 2.0);
        }
        Ok(ratio.clamp(0.0, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_modes() {
        let cs = CrossSection::interval(PI).unwrap();
        let mus: Vec<f64> = cs.mu_values(3).iter().map(|m| m.mu()).collect();
        for (m, want) in mus.iter().zip([1.0, 2.0, 3.0]) {
            assert!((m - want).abs() < 1e-14);
        }
        let unit = CrossSection::interval(1.0).unwrap();
        assert!((unit.mode(1).mu2 - PI * PI).abs() < 1e-13);
    }

    #[test]
    fn square_modes_count_multiplicity() {
        let cs = CrossSection::new(vec![PI, PI]).unwrap();
        let modes = cs.mu_values(4);
        let mu2: Vec<f64> = modes.iter().map(|m| m.mu2).collect();
        for (got, want) in mu2.iter().zip([2.0, 5.0, 5.0, 8.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(modes[1].index, vec![1, 2]);
        assert_eq!(modes[2].index, vec![2, 1]);
    }

    #[test]
    fn long_box_enumeration_matches_brute_force() {
        let cs = CrossSection::new(vec![1.0, 3.7, 0.6]).unwrap();
        let modes = cs.mu_values(60);
        let mut brute = Vec::new();
        for a in 1..40u32 {
            for b in 1..40u32 {
                for c in 1..40u32 {
                    brute.push(
                        (a as f64 * PI).powi(2) + (b as f64 * PI / 3.7).powi(2) + (c as f64 * PI / 0.6).powi(2),
                    );
                }
            }
        }
        brute.sort_by(f64::total_cmp);
        for (m, b) in modes.iter().zip(&brute) {
            assert!((m.mu2 - b).abs() < 1e-9 * b);
        }
    }

    #[test]
    fn mass_ratio_examples() {
        let cs = CrossSection::interval(PI).unwrap();
        let m1 = cs.mode(1);
        assert!((cs.phi_mass_ratio(&m1, &[(0.0, PI)]).unwrap() - 1.0).abs() < 1e-14);
        assert!((cs.phi_mass_ratio(&m1, &[(0.0, PI / 2.0)]).unwrap() - 0.5).abs() < 1e-14);
        let m2 = cs.mode(2);
        // ∫₀^{π/4} sin²(2x) dx = π/8, divided by π/2
        assert!((cs.phi_mass_ratio(&m2, &[(0.0, PI / 4.0)]).unwrap() - 0.25).abs() < 1e-14);
        assert!(matches!(cs.phi_mass_ratio(&m2, &[(0.0, 4.0)]), Err(CrossSectionError::SubboxOutOfBounds { .. })));
    }
}
