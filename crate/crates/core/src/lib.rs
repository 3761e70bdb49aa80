//! Eigenmodes of the layered-media operator `−c(y)Δ` on `Ω′ × (0, H)` with
//! Dirichlet conditions, where `Ω′` is a box and `c` depends only on `y`.
//!
//! Separating transverse modes `φ_k` reduces the problem to the family of
//! one-dimensional operators `A_k = c(y)(μ_k² − d²/dy²)`. This crate solves
//! them exactly for piecewise-constant `c` ([`layer_solver`]), by phase
//! integration and finite differences for sampled `c` ([`general_solver`]),
//! and checks guided/non-guided mode estimates on the computed modes
//! ([`analysis`]).
//!
//! ```
//! use layerwave::prelude::*;
//!
//! let c = LayeredProfile::constant(std::f64::consts::PI, 1.0).unwrap();
//! let modes = eigenvalues_in_window(Channel::new(1, 1.0), 1.0, 11.0, &c, DEFAULT_REL_TOL).unwrap();
//! let lambdas: Vec<f64> = modes.iter().map(|m| m.lambda).collect();
//! assert!((lambdas[0] - 2.0).abs() < 1e-10);
//! assert_eq!(lambdas.len(), 3);
//! ```

pub mod analysis;
pub mod cross_section;
pub mod general_solver;
pub mod error;
pub mod layer_solver;
pub mod profile;

pub use error::Error;

/// The types and functions most programs need.
pub mod prelude {
    pub use crate::analysis::{classify, default_eps, min_amplitude, zeros, ModeClass, ModeTag};
    pub use crate::cross_section::{CrossSection, TransverseMode};
    pub use crate::error::Error;
    pub use crate::layer_solver::{
        build_eigenfunction, dispersion, eigenpair, eigenvalues_in_window, Channel, Eigenfunction1D, Eigenpair,
        DEFAULT_REL_TOL,
    };
    pub use crate::profile::{find_well, Coefficient, Interpolation, LayeredProfile, SampledProfile, WellDescriptor};
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/profiles.md")]
    mod profiles {}
    #[doc = include_str!("../../../book/src/layer_solver.md")]
    mod layer_solver {}
    #[doc = include_str!("../../../book/src/general_solver.md")]
    mod general_solver {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
