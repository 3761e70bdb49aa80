//! Classification and quantitative checks on computed modes.
//!
//! Every check returns a report value carrying both sides of the inequality it
//! tests, so callers can print them or turn them into exit codes.

mod bv;
mod classify;
mod decay;
mod existence;
mod ratios;
mod structure;
mod zeros;

pub use bv::{bv_convergence, sup_distance, BvStep, ConvergenceReport};
pub use classify::{classify, classify_guided, default_eps, threshold_recipe, ModeClass, ModeTag, Threshold};
pub use decay::{
    decay_bound_check, mass_ratio_3d, nonconcentration_floor, DecayVerdict, FloorPrecondition, FloorReport,
};
pub use existence::{
    existence_condition, existence_verify, ExistenceCondition, ExistenceVerdict, FirstEigenvalueBound,
};
pub use ratios::{amplitude_ratios, three_layer_ratios, AmplitudeRatioReport, InterfaceRatio, ThreeLayerReport};
pub use structure::{lipschitz_energy_check, monotone_checks, LipschitzReport, MonotoneReport};
pub use zeros::{min_amplitude, zero_gap_bound, zeros, MinAmplitudeReport, ZeroSet};
