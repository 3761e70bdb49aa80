use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("height must be positive and finite, got {height}")]
    NonPositiveHeight { height: f64 },
    #[error("a profile needs at least two grid points, got {found}")]
    TooFewPoints { found: usize },
    #[error("grid must start at 0, got {found}")]
    GridStart { found: f64 },
    #[error("grid is not strictly increasing at index {index}")]
    NotIncreasing { index: usize },
    #[error("{field}[{index}] = {value} is not positive")]
    NonPositiveValue { field: &'static str, index: usize, value: f64 },
    #[error("{field}[{index}] is not finite")]
    NonFinite { field: &'static str, index: usize },
    #[error("{field} has {found} entries, expected {expected}")]
    LengthMismatch { field: &'static str, expected: usize, found: usize },
    #[error("threshold c1 = {c1} must satisfy c_m < c1 <= c_M with c_m = {c_m}, c_M = {c_max}")]
    ThresholdOutOfRange { c1: f64, c_m: f64, c_max: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CrossSectionError {
    #[error("cross-section needs at least one side length")]
    NoSides,
    #[error("side length {index} = {value} is not positive")]
    NonPositiveSide { index: usize, value: f64 },
    #[error("sub-box axis {axis} interval ({lo}, {hi}) is not inside (0, {length})")]
    SubboxOutOfBounds { axis: usize, lo: f64, hi: f64, length: f64 },
    #[error("sub-box has {found} axes, cross-section has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("multi-index {index:?} does not match the cross-section dimension")]
    BadMultiIndex { index: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("shooting state underflowed to zero")]
    DegenerateState,
    #[error("could not separate eigenvalue {ell} in ({lo}, {hi}) by counting")]
    BracketFailure { ell: u32, lo: f64, hi: f64 },
    #[error("lambda = {lambda} is not an eigenvalue (residual {residual:e})")]
    NotAnEigenvalue { lambda: f64, residual: f64 },
    #[error("position {y} is outside [0, {height}]")]
    OutOfDomain { y: f64, height: f64 },
    #[error("invalid window ({lo}, {hi})")]
    InvalidWindow { lo: f64, hi: f64 },
    #[error("step control failed at y = {y}")]
    StepFailure { y: f64 },
    #[error("grid of {grid_n} points resolves fewer than 8 points per wavelength (need {needed})")]
    GridTooCoarse { grid_n: usize, needed: usize },
    #[error("profile has no derivative samples")]
    MissingDerivatives,
    #[error("(lambda, mu) = ({lambda}, {mu}) is outside the non-guided window: min p = {p_min}")]
    OutsideSpectralWindow { lambda: f64, mu: f64, p_min: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("guided classification requested without a well")]
    MissingWell,
    #[error("profile is not piecewise constant")]
    NotPiecewiseConstant,
    #[error("layer {layer} is not oscillatory at this eigenvalue")]
    EvanescentLayerPresent { layer: usize },
    #[error("mode is not guided: xi^2 = {xi2}")]
    NotGuided { xi2: f64 },
    #[error("band ({a}, {b}) intersects the well ({alpha}, {beta})")]
    BandIntersectsWell { a: f64, b: f64, alpha: f64, beta: f64 },
    #[error("modes below the non-concentration threshold: {lambdas:?}")]
    ModeBelowThreshold { lambdas: Vec<f64> },
    #[error("profile is not nondecreasing")]
    NotMonotone,
    #[error("three-layer check needs c0 < c1 < c2 and 0 < h0 < h1 < H")]
    InvalidOrdering,
    #[error("profile must have exactly three increasing layers")]
    WrongProfileShape,
    #[error("lambda = {lambda} is outside the zone ({lo}, {hi})")]
    OutsideZone { lambda: f64, lo: f64, hi: f64 },
    #[error("no eigenvalue of the approximant near {lambda} for n = {n}")]
    NoNearbyEigenvalue { lambda: f64, n: usize },
    #[error("band ({a}, {b}) is not inside (0, {height})")]
    BadBand { a: f64, b: f64, height: f64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// Any error raised by this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    CrossSection(#[from] CrossSectionError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}
