//! Finite-difference reference: `−u″ + μ²u = λ c⁻¹ u` on a uniform grid.
//!
//! Central differences for `−u″` and a lumped weight `w_i = (1/h) ∫ c⁻¹` over
//! the dual cell of node `i` give the pencil `K u = λ W u`. Symmetrizing with
//! `W^{-1/2}` leaves a tridiagonal matrix whose eigenvalues are isolated by
//! Sturm-sequence bisection.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::SolverError;
use crate::general_solver::numerov::GridEigenfunction;
use crate::layer_solver::Channel;
use crate::profile::Coefficient;

/// Symmetric tridiagonal matrix with diagonal `d` and off-diagonal `e`.
struct Tridiagonal {
    d: Vec<f64>,
    e: Vec<f64>,
    w: Vec<f64>,
    h: f64,
}

impl Tridiagonal {
    fn assemble(channel: Channel, profile: &impl Coefficient, n: usize) -> Self {
        let height = profile.height();
        let h = height / n as f64;
        let w: Vec<f64> = (1..n)
            .map(|i| {
                let y = i as f64 * h;
                profile.integral_inverse(y - 0.5 * h, y + 0.5 * h) / h
            })
            .collect();
        let diag = 2.0 / (h * h) + channel.mu2();
        let d = w.iter().map(|wi| diag / wi).collect();
        let e = w.windows(2).map(|p| -1.0 / (h * h * (p[0] * p[1]).sqrt())).collect();
        Self { d, e, w, h }
    }

    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.d.len() {
            let off = if i == 0 { 0.0 } else { self.e[i - 1] * self.e[i - 1] / q };
            q = self.d[i] - x - off;
            if q == 0.0 {
                q = -f64::EPSILON * (self.d[i].abs() + x.abs());
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `j`-th eigenvalue (one-based) inside `[lo, hi]`.
    fn eigenvalue(&self, j: usize, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn eigenvalues_in(&self, lo: f64, hi: f64) -> Vec<(usize, f64)> {
        let (a, b) = (self.count_below(lo), self.count_below(hi));
        (a + 1..=b).map(|j| (j, self.eigenvalue(j, lo, hi))).collect()
    }

    /// Inverse iteration for the eigenvector nearest `sigma`.
    fn eigenvector(&self, sigma: f64) -> Vec<f64> {
        let n = self.d.len();
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
        let shift = sigma * (1.0 + 1e-13);
        for _ in 0..6 {
            x = self.solve_shifted(shift, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut c = vec![0.0; n];
        let mut g = vec![0.0; n];
        let mut piv = self.d[0] - shift;
        if piv == 0.0 {
            piv = 1e-300;
        }
        c[0] = if n > 1 { self.e[0] / piv } else { 0.0 };
        g[0] = rhs[0] / piv;
        for i in 1..n {
            let mut denom = self.d[i] - shift - self.e[i - 1] * c[i - 1];
            if denom == 0.0 {
                denom = 1e-300;
            }
            c[i] = if i + 1 < n { self.e[i] / denom } else { 0.0 };
            g[i] = (rhs[i] - self.e[i - 1] * g[i - 1]) / denom;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = g[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = g[i] - c[i] * x[i + 1];
        }
        x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FdEigenvalue {
    /// Global index `ℓ` (one-based) of the eigenvalue in the channel.
    pub index: usize,
    /// Richardson-extrapolated value `(4λ_n − λ_{n/2}) / 3`.
    pub lambda: f64,
    pub lambda_fine: f64,
    pub lambda_coarse: f64,
    /// `|λ_n − λ_{n/2}| / 3`: the estimated error of `λ_n`.
    pub error_band: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdReport {
    pub grid_n: usize,
    pub eigenvalues: Vec<FdEigenvalue>,
}

impl FdReport {
    pub fn count(&self) -> usize {
        self.eigenvalues.len()
    }
}

fn check_grid(channel: Channel, profile: &impl Coefficient, hi: f64, grid_n: usize) -> Result<(), SolverError> {
    let (c_m, _) = profile.extremes();
    let qmax = (hi / c_m - channel.mu2()).max(0.0);
    let needed = if qmax > 0.0 {
        let wavelength = 2.0 * PI / qmax.sqrt();
        (8.0 * profile.height() / wavelength).ceil() as usize
    } else {
        0
    }
    .max(64);
    if grid_n < needed {
        return Err(SolverError::GridTooCoarse { grid_n, needed });
    }
    Ok(())
}

/// Eigenvalues on a single grid of `n` intervals, with their global indices.
pub fn fd_eigenvalues(
    channel: Channel,
    profile: &impl Coefficient,
    lambda_lo: f64,
    lambda_hi: f64,
    n: usize,
) -> Result<Vec<(usize, f64)>, SolverError> {
    if !(lambda_hi > lambda_lo) {
        return Err(SolverError::InvalidWindow { lo: lambda_lo, hi: lambda_hi });
    }
    check_grid(channel, profile, lambda_hi, n)?;
    Ok(Tridiagonal::assemble(channel, profile, n).eigenvalues_in(lambda_lo, lambda_hi))
}

/// Eigenvalues in `(λ_lo, λ_hi)` on grids `n` and `n/2`, Richardson-extrapolated.
pub fn fd_oracle(
    channel: Channel,
    profile: &impl Coefficient,
    lambda_lo: f64,
    lambda_hi: f64,
    grid_n: usize,
) -> Result<FdReport, SolverError> {
    if !(lambda_lo >= 0.0 && lambda_hi > lambda_lo) {
        return Err(SolverError::InvalidWindow { lo: lambda_lo, hi: lambda_hi });
    }
    check_grid(channel, profile, lambda_hi, grid_n)?;
    let fine = Tridiagonal::assemble(channel, profile, grid_n);
    let coarse = Tridiagonal::assemble(channel, profile, grid_n / 2);
    let wide_hi = 2.0 * lambda_hi;
    let eigenvalues = fine
        .eigenvalues_in(lambda_lo, lambda_hi)
        .into_iter()
        .map(|(index, lambda_fine)| {
            let lambda_coarse = coarse.eigenvalue(index, 0.0, wide_hi.max(4.0 * lambda_fine));
            FdEigenvalue {
                index,
                lambda: (4.0 * lambda_fine - lambda_coarse) / 3.0,
                lambda_fine,
                lambda_coarse,
                error_band: (lambda_fine - lambda_coarse).abs() / 3.0,
            }
        })
        .collect();
    Ok(FdReport { grid_n, eigenvalues })
}

/// Discrete eigenvector for the eigenvalue nearest `lambda`, normalized so that
/// `Σ w_i u_i² h = 1` and `u′(0) > 0`.
pub fn fd_eigenvector(
    channel: Channel,
    profile: &impl Coefficient,
    lambda: f64,
    grid_n: usize,
) -> Result<(f64, GridEigenfunction), SolverError> {
    check_grid(channel, profile, lambda, grid_n)?;
    let t = Tridiagonal::assemble(channel, profile, grid_n);
    let j = t.count_below(lambda).max(1);
    let below = t.eigenvalue(j, 0.0, 4.0 * lambda);
    let above = t.eigenvalue(j + 1, 0.0, 4.0 * lambda);
    let lam = if (below - lambda).abs() <= (above - lambda).abs() { below } else { above };
    let x = t.eigenvector(lam);
    let mut u: Vec<f64> = std::iter::once(0.0).chain(x.iter().zip(&t.w).map(|(xi, wi)| xi / wi.sqrt())).collect();
    u.push(0.0);
    let norm: f64 = u[1..grid_n].iter().zip(&t.w).map(|(ui, wi)| ui * ui * wi).sum::<f64>() * t.h;
    let sign = if u[1] < 0.0 { -1.0 } else { 1.0 };
    let scale = sign / norm.sqrt();
    u.iter_mut().for_each(|v| *v *= scale);
    let y: Vec<f64> = (0..=grid_n).map(|i| i as f64 * t.h).collect();
    let du = centered_derivative(&u, t.h);
    Ok((lam, GridEigenfunction::from_parts(lambda, channel, y, u, du)))
}

fn centered_derivative(u: &[f64], h: f64) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h)
            } else {
                (u[i + 1] - u[i - 1]) / (2.0 * h)
            }
        })
        .collect()
}
