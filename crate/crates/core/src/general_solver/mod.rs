//! Solver paths for sampled (non-layered) coefficients.
//!
//! * [`pruefer`]: modified Prüfer phase integration, for oscillation counts and
//!   eigenvalues of [`SampledProfile`](crate::profile::SampledProfile)s.
//! * [`fd_oracle`]: a second-order finite-difference pencil solved by Sturm
//!   bisection, used as an independent reference.
//! * [`numerov`]: grid eigenfunctions with amplitude and sign.
//! * [`liouville`]: the Liouville normal form `η = p^{1/4} u` in `ξ = ∫√p`.

pub mod fd_oracle;
pub mod liouville;
pub mod numerov;
pub mod pruefer;

pub use fd_oracle::{fd_eigenvector, fd_oracle, FdEigenvalue, FdReport};
pub use liouville::{liouville_residual, liouville_transform, LiouvilleFrame, LiouvilleResidual};
pub use numerov::{numerov_solve, GridEigenfunction};
pub use pruefer::{pruefer_count, pruefer_eigenvalues, PrueferCount, PrueferState, StepControl};
