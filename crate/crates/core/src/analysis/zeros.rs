use std::f64::consts::PI;

use serde::Serialize;

use crate::layer_solver::{Eigenfunction1D, Piece};

/// Zeros of an eigenfunction, endpoints included.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroSet {
    pub zeros: Vec<f64>,
    pub max_gap: f64,
    /// Per gap: `+1` if `u` is convex on it, `−1` if concave, `0` if neither
    /// (an evanescent or linear layer meets the gap).
    pub convexity: Vec<i8>,
}

impl ZeroSet {
    pub fn gaps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.zeros.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn interior_count(&self) -> usize {
        self.zeros.len() - 2
    }
}

/// `2π μ⁻¹ √(c_M/ε)`.
pub fn zero_gap_bound(mu: f64, c_max: f64, eps: f64) -> f64 {
    2.0 * PI / mu * (c_max / eps).sqrt()
}

// Points of [lo, hi] where ω(y − γ) = offset + nπ.
fn phase_points(omega: f64, gamma: f64, offset: f64, lo: f64, hi: f64) -> Vec<f64> {
    let slack = 1e-9;
    let first = ((omega * (lo - gamma) - offset) / PI - slack).ceil() as i64;
    let last = ((omega * (hi - gamma) - offset) / PI + slack).floor() as i64;
    (first..=last).map(|n| (gamma + (offset + n as f64 * PI) / omega).clamp(lo, hi)).collect()
}

// Evanescent p e^{−κx} + q e^{−κ(T−x)} has its only root (pq < 0), extremum (pq > 0)
// and energy minimum at the point where |p e^{−κx}| = |q e^{−κ(T−x)}|.
fn balance_point(kappa: f64, p: f64, q: f64, lo: f64, hi: f64) -> Option<f64> {
    if p == 0.0 || q == 0.0 {
        return None;
    }
    let x = 0.5 * ((hi - lo) + (p / q).abs().ln() / kappa);
    (x >= 0.0 && x <= hi - lo).then_some(lo + x)
}

fn roots(piece: &Piece, lo: f64, hi: f64) -> Vec<f64> {
    match *piece {
        Piece::Oscillatory { omega, gamma, beta } if beta > 0.0 => phase_points(omega, gamma, 0.0, lo, hi),
        Piece::Evanescent { kappa, p, q } if p * q < 0.0 => balance_point(kappa, p, q, lo, hi).into_iter().collect(),
        Piece::Linear { u0, slope } if slope != 0.0 => {
            let y = lo - u0 / slope;
            if y >= lo && y <= hi {
                vec![y]
            } else {
                vec![]
            }
        }
        _ => vec![],
    }
}

fn extrema(piece: &Piece, lo: f64, hi: f64) -> Vec<f64> {
    match *piece {
        Piece::Oscillatory { omega, gamma, .. } => phase_points(omega, gamma, 0.5 * PI, lo, hi),
        Piece::Evanescent { kappa, p, q } if p * q > 0.0 => balance_point(kappa, p, q, lo, hi).into_iter().collect(),
        _ => vec![],
    }
}

// Candidates for the minimum of u² + u′² on one layer.
fn energy_candidates(piece: &Piece, lo: f64, hi: f64) -> Vec<f64> {
    let mut out = vec![lo, hi];
    match *piece {
        Piece::Oscillatory { omega, gamma, .. } => {
            out.extend(phase_points(omega, gamma, 0.0, lo, hi));
            out.extend(phase_points(omega, gamma, 0.5 * PI, lo, hi));
        }
        Piece::Evanescent { kappa, p, q } => out.extend(balance_point(kappa, p, q, lo, hi)),
        Piece::Linear { .. } => out.extend(roots(piece, lo, hi)),
    }
    out
}

/// All zeros, found per layer from the closed forms.
pub fn zeros(ef: &Eigenfunction1D) -> ZeroSet {
    let h = ef.height();
    let tol = 1e-10 * h;
    let mut all = Vec::new();
    for (piece, l) in ef.pieces().iter().zip(ef.profile().layers()) {
        all.extend(roots(piece, l.lo, l.hi));
    }
    all.retain(|&y| y > tol && y < h - tol);
    all.sort_by(f64::total_cmp);
    let mut zs = vec![0.0];
    for y in all {
        if y - zs.last().unwrap() > tol {
            zs.push(y);
        }
    }
    zs.push(h);

    let profile = ef.profile();
    let convexity = zs
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let su = ef.evaluate(mid).map(|(u, _)| u.signum()).unwrap_or(0.0);
            let mut sign = None;
            for (j, l) in profile.layers().enumerate() {
                if l.hi <= w[0] || l.lo >= w[1] {
                    continue;
                }
                // u″ = −q u
                let q = ef.regime(j).q;
                let s = if q == 0.0 { 0 } else { (-q.signum() * su) as i8 };
                match sign {
                    None => sign = Some(s),
                    Some(prev) if prev != s => sign = Some(0),
                    _ => {}
                }
            }
            sign.unwrap_or(0)
        })
        .collect();
    let max_gap = zs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    ZeroSet { zeros: zs, max_gap, convexity }
}

/// Largest `u²` on each gap between consecutive zeros, with its position.
pub(crate) fn half_wave_peaks(ef: &Eigenfunction1D, zs: &ZeroSet) -> Vec<(f64, f64)> {
    let layers: Vec<_> = ef.profile().layers().collect();
    let mut candidates: Vec<f64> = Vec::new();
    for (piece, l) in ef.pieces().iter().zip(&layers) {
        candidates.extend(extrema(piece, l.lo, l.hi));
        candidates.push(l.lo);
    }
    candidates.sort_by(f64::total_cmp);
    zs.gaps()
        .map(|(a, b)| {
            let mut best = (0.5 * (a + b), 0.0);
            for &y in candidates.iter().filter(|&&y| y > a && y < b) {
                let u = ef.evaluate(y).map(|(u, _)| u).unwrap_or(0.0);
                if u * u > best.1 {
                    best = (y, u * u);
                }
            }
            best
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinAmplitudeReport {
    /// `inf (u² + u′²)` over `[0, H]`.
    pub r2: f64,
    pub argmin: f64,
    /// `u²` at the top of each half-wave.
    pub peaks: Vec<f64>,
    pub peak_positions: Vec<f64>,
    /// The infimum equals the smallest half-wave peak.
    pub midpoint_match: bool,
    pub lambda_tilde0: f64,
    pub above_threshold: bool,
}

impl MinAmplitudeReport {
    pub fn min_peak(&self) -> f64 {
        self.peaks.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Minimum of `u² + u′²`, located from the per-layer closed forms.
/// Position and value of the smallest amplitude energy, from per-piece candidates only.
pub(crate) fn min_energy(ef: &Eigenfunction1D) -> (f64, f64) {
    let mut best = (0.0, f64::INFINITY);
    for (piece, l) in ef.pieces().iter().zip(ef.profile().layers()) {
        for y in energy_candidates(piece, l.lo, l.hi) {
            let (u, du) = piece.eval(l.lo, l.hi, y);
            let e = u * u + du * du;
            if e < best.1 {
                best = (y, e);
            }
        }
    }
    best
}

pub fn min_amplitude(ef: &Eigenfunction1D, lambda_tilde0: f64) -> MinAmplitudeReport {
    let best = min_energy(ef);
    let zs = zeros(ef);
    let peaks = half_wave_peaks(ef, &zs);
    let min_peak = peaks.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let midpoint_match = (min_peak - best.1).abs() <= 1e-9 * min_peak;
    MinAmplitudeReport {
        r2: best.1,
        argmin: best.0,
        peak_positions: peaks.iter().map(|p| p.0).collect(),
        peaks: peaks.iter().map(|p| p.1).collect(),
        midpoint_match,
        lambda_tilde0,
        above_threshold: ef.lambda > lambda_tilde0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layer_solver::{build_eigenfunction, eigenpair, Channel};
    use crate::profile::LayeredProfile;

    fn constant_mode(c0: f64, h: f64, mu: f64, ell: u32) -> Eigenfunction1D {
        let p = LayeredProfile::constant(h, c0).unwrap();
        let pair = eigenpair(Channel::new(1, mu), ell, &p, 1e-13).unwrap();
        build_eigenfunction(&pair, &p).unwrap()
    }

    #[test]
    fn constant_profile_zeros() {
        let ef = constant_mode(1.0, 1.0, 2.0, 3);
        let z = zeros(&ef);
        assert_eq!(z.zeros.len(), 4);
        for (got, want) in z.zeros.iter().zip([0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(z.convexity, vec![-1, 1, -1]);
    }

    #[test]
    fn gap_bound_formula() {
        assert!((zero_gap_bound(10.0, 2.0, 0.5) - 0.4 * PI).abs() < 1e-15);
    }

    #[test]
    fn constant_profile_amplitude() {
        // ω = 3π/π = 3 > 1: minimum at the peaks
        let ef = constant_mode(2.0, PI, 1.0, 3);
        let r = min_amplitude(&ef, 0.0);
        assert!((r.r2 - 2.0 * 2.0 / PI).abs() < 1e-10);
        assert!(r.midpoint_match);
        assert_eq!(r.peaks.len(), 3);
        // ω = π/4 < 1 on H = 4: minimum at the zeros
        let ef = constant_mode(2.0, 4.0, 1.0, 1);
        let r = min_amplitude(&ef, 0.0);
        let omega = PI / 4.0;
        assert!((r.r2 - 2.0 * 2.0 / 4.0 * omega * omega).abs() < 1e-10);
        assert!(!r.midpoint_match);
    }

    #[test]
    fn zeros_across_interfaces() {
        let p = LayeredProfile::uniform(1.0, vec![1.0, 3.0, 1.5, 2.0]).unwrap();
        let ch = Channel::new(2, 2.0 * PI);
        for ell in 1..12 {
            let pair = eigenpair(ch, ell, &p, 1e-13).unwrap();
            let ef = build_eigenfunction(&pair, &p).unwrap();
            let z = zeros(&ef);
            assert_eq!(z.interior_count(), ell as usize - 1, "ell {ell}");
            for y in &z.zeros {
                assert!(ef.evaluate(*y).unwrap().0.abs() < 1e-9);
            }
        }
    }
}
