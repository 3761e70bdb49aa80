//! Diffusion coefficients `c(y)` on `[0, H]`.
//!
//! Two representations are supported: [`LayeredProfile`] (piecewise constant,
//! the exact-solver input) and [`SampledProfile`] (grid samples with an
//! interpolation rule, optionally with derivative samples for the Liouville
//! path). Both are immutable after construction.

use serde::{Deserialize, Serialize};

use crate::error::ProfileError;

/// Geometric queries shared by every coefficient representation.
pub trait Coefficient {
    fn height(&self) -> f64;

    /// Value of the coefficient (or its interpolant) at `y`.
    fn value_at(&self, y: f64) -> f64;

    /// `(c_m, c_M)`: essential infimum and supremum.
    fn extremes(&self) -> (f64, f64);

    fn total_variation(&self) -> f64;

    /// Points where the coefficient is not smooth, including `0` and `H`.
    fn nodes(&self) -> &[f64];

    /// Minimum and maximum of `c` over the open interval `(a, b)`.
    fn range_on(&self, a: f64, b: f64) -> (f64, f64);

    /// Maximal open intervals on which `c(y) < threshold`, in increasing order.
    fn sublevel_intervals(&self, threshold: f64) -> Vec<(f64, f64)>;

    /// `∫ₐᵇ dy / c(y)`, exact for the representation.
    fn integral_inverse(&self, a: f64, b: f64) -> f64;
}

/// Piecewise-constant coefficient: `c(y) = values[j]` on
/// `(breakpoints[j], breakpoints[j + 1])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayeredProfile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

/// One constant layer of a [`LayeredProfile`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Layer {
    pub lo: f64,
    pub hi: f64,
    pub c: f64,
}

impl Layer {
    pub fn thickness(&self) -> f64 {
        self.hi - self.lo
    }
}

fn check_grid(points: &[f64]) -> Result<(), ProfileError> {
    if points.len() < 2 {
        return Err(ProfileError::TooFewPoints { found: points.len() });
    }
    if let Some(i) = points.iter().position(|v| !v.is_finite()) {
        return Err(ProfileError::NonFinite { field: "grid", index: i });
    }
    if points[0] != 0.0 {
        return Err(ProfileError::GridStart { found: points[0] });
    }
    for (i, w) in points.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(ProfileError::NotIncreasing { index: i + 1 });
        }
    }
    Ok(())
}

fn check_positive(field: &'static str, values: &[f64]) -> Result<(), ProfileError> {
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(ProfileError::NonFinite { field, index: i });
        }
        if v <= 0.0 {
            return Err(ProfileError::NonPositiveValue { field, index: i, value: v });
        }
    }
    Ok(())
}

impl LayeredProfile {
    /// Builds a profile from `N + 2` breakpoints `0 = h₋₁ < … < h_N = H`
    /// and `N + 1` layer values. Adjacent layers with equal values are merged.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, ProfileError> {
        check_grid(&breakpoints)?;
        check_positive("values", &values)?;
        if values.len() + 1 != breakpoints.len() {
            return Err(ProfileError::LengthMismatch {
                field: "values",
                expected: breakpoints.len() - 1,
                found: values.len(),
            });
        }
        let mut bp = vec![breakpoints[0]];
        let mut vals: Vec<f64> = Vec::with_capacity(values.len());
        for (j, &c) in values.iter().enumerate() {
            if vals.last() == Some(&c) {
                *bp.last_mut().unwrap() = breakpoints[j + 1];
            } else {
                vals.push(c);
                bp.push(breakpoints[j + 1]);
            }
        }
        Ok(Self { breakpoints: bp, values: vals })
    }

    /// Layers of equal thickness `height / values.len()`.
    pub fn uniform(height: f64, values: Vec<f64>) -> Result<Self, ProfileError> {
        if !(height > 0.0 && height.is_finite()) {
            return Err(ProfileError::NonPositiveHeight { height });
        }
        let n = values.len().max(1);
        let mut bp: Vec<f64> = (0..n).map(|j| height * j as f64 / n as f64).collect();
        bp.push(height);
        Self::new(bp, values)
    }

    pub fn constant(height: f64, c: f64) -> Result<Self, ProfileError> {
        Self::uniform(height, vec![c])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn layer_count(&self) -> usize {
        self.values.len()
    }

    pub fn layer(&self, j: usize) -> Layer {
        Layer { lo: self.breakpoints[j], hi: self.breakpoints[j + 1], c: self.values[j] }
    }

    pub fn layers(&self) -> impl Iterator<Item = Layer> + '_ {
        (0..self.values.len()).map(|j| self.layer(j))
    }

    /// Index of the layer containing `y`; interior breakpoints belong to the
    /// layer on their right, `H` to the last layer.
    pub fn layer_index(&self, y: f64) -> usize {
        let i = self.breakpoints.partition_point(|&b| b <= y);
        i.saturating_sub(1).min(self.values.len() - 1)
    }

    /// `s · c(y)`.
    pub fn scaled(&self, s: f64) -> Result<Self, ProfileError> {
        Self::new(self.breakpoints.clone(), self.values.iter().map(|c| c * s).collect())
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }
}

impl Coefficient for LayeredProfile {
    fn height(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    fn value_at(&self, y: f64) -> f64 {
        self.values[self.layer_index(y)]
    }

    fn extremes(&self) -> (f64, f64) {
        min_max(&self.values)
    }

    fn total_variation(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    fn nodes(&self) -> &[f64] {
        &self.breakpoints
    }

    fn range_on(&self, a: f64, b: f64) -> (f64, f64) {
        let vals: Vec<f64> = self.layers().filter(|l| l.hi > a && l.lo < b).map(|l| l.c).collect();
        min_max(&vals)
    }

    fn sublevel_intervals(&self, threshold: f64) -> Vec<(f64, f64)> {
        merge_intervals(self.layers().filter(|l| l.c < threshold).map(|l| (l.lo, l.hi)))
    }

    fn integral_inverse(&self, a: f64, b: f64) -> f64 {
        self.layers().map(|l| (b.min(l.hi) - a.max(l.lo)).max(0.0) / l.c).sum()
    }
}

/// How a [`SampledProfile`] is interpolated between grid points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    PiecewiseLinear,
    /// `c(y) = samples[i]` on `[grid[i], grid[i+1])`.
    LeftConstant,
}

/// Where each cell of [`SampledProfile::pc_approximate_with`] samples the interpolant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleRule {
    #[default]
    LeftEndpoint,
    Midpoint,
}

/// Grid-sampled coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledProfile {
    grid: Vec<f64>,
    samples: Vec<f64>,
    interpolation: Interpolation,
    dsamples: Option<Vec<f64>>,
    ddsamples: Option<Vec<f64>>,
}

impl SampledProfile {
    pub fn new(grid: Vec<f64>, samples: Vec<f64>, interpolation: Interpolation) -> Result<Self, ProfileError> {
        check_grid(&grid)?;
        check_positive("samples", &samples)?;
        if samples.len() != grid.len() {
            return Err(ProfileError::LengthMismatch { field: "samples", expected: grid.len(), found: samples.len() });
        }
        Ok(Self { grid, samples, interpolation, dsamples: None, ddsamples: None })
    }

    /// Attaches first and second derivative samples (needed by the Liouville path).
    pub fn with_derivatives(mut self, dsamples: Vec<f64>, ddsamples: Vec<f64>) -> Result<Self, ProfileError> {
        for (field, v) in [("dsamples", &dsamples), ("ddsamples", &ddsamples)] {
            if v.len() != self.grid.len() {
                return Err(ProfileError::LengthMismatch { field, expected: self.grid.len(), found: v.len() });
            }
            if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                return Err(ProfileError::NonFinite { field, index: i });
            }
        }
        self.dsamples = Some(dsamples);
        self.ddsamples = Some(ddsamples);
        Ok(self)
    }

    /// Samples `f` on a uniform grid with `intervals` cells.
    pub fn from_fn(
        height: f64,
        intervals: usize,
        interpolation: Interpolation,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, ProfileError> {
        let grid = uniform_grid(height, intervals)?;
        let samples = grid.iter().map(|&y| f(y)).collect();
        Self::new(grid, samples, interpolation)
    }

    /// Piecewise-linear samples of `f` together with exact `f'` and `f''`.
    pub fn from_fn_with_derivatives(
        height: f64,
        intervals: usize,
        f: impl Fn(f64) -> f64,
        df: impl Fn(f64) -> f64,
        ddf: impl Fn(f64) -> f64,
    ) -> Result<Self, ProfileError> {
        let p = Self::from_fn(height, intervals, Interpolation::PiecewiseLinear, f)?;
        let ds = p.grid.iter().map(|&y| df(y)).collect();
        let dds = p.grid.iter().map(|&y| ddf(y)).collect();
        p.with_derivatives(ds, dds)
    }

    /// Wraps a layered profile as left-constant samples at its breakpoints.
    pub fn from_layered(profile: &LayeredProfile) -> Self {
        let grid = profile.breakpoints().to_vec();
        let mut samples = profile.values().to_vec();
        samples.push(*profile.values().last().unwrap());
        Self { grid, samples, interpolation: Interpolation::LeftConstant, dsamples: None, ddsamples: None }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn has_derivatives(&self) -> bool {
        self.dsamples.is_some() && self.ddsamples.is_some()
    }

    pub fn dsamples(&self) -> Option<&[f64]> {
        self.dsamples.as_deref()
    }

    pub fn ddsamples(&self) -> Option<&[f64]> {
        self.ddsamples.as_deref()
    }

    fn cell(&self, y: f64) -> usize {
        let i = self.grid.partition_point(|&g| g <= y);
        i.saturating_sub(1).min(self.grid.len() - 2)
    }

    /// Cell values that define the interpolant's range and variation.
    fn effective_values(&self) -> &[f64] {
        match self.interpolation {
            Interpolation::PiecewiseLinear => &self.samples,
            Interpolation::LeftConstant => &self.samples[..self.samples.len() - 1],
        }
    }

    fn interp(&self, values: &[f64], y: f64) -> f64 {
        let i = self.cell(y);
        let (y0, y1) = (self.grid[i], self.grid[i + 1]);
        let w = ((y - y0) / (y1 - y0)).clamp(0.0, 1.0);
        values[i] + w * (values[i + 1] - values[i])
    }

    /// `c'(y)`: interpolated derivative samples when present, otherwise the
    /// slope of the interpolant (zero for left-constant).
    pub fn derivative_at(&self, y: f64) -> f64 {
        if let Some(ds) = &self.dsamples {
            return self.interp(ds, y);
        }
        match self.interpolation {
            Interpolation::PiecewiseLinear => {
                let i = self.cell(y);
                (self.samples[i + 1] - self.samples[i]) / (self.grid[i + 1] - self.grid[i])
            }
            Interpolation::LeftConstant => 0.0,
        }
    }

    /// `c''(y)` from the second-derivative samples, if present.
    pub fn second_derivative_at(&self, y: f64) -> Option<f64> {
        self.ddsamples.as_ref().map(|dds| self.interp(dds, y))
    }

    /// Piecewise-constant approximation on `n` equal cells, each taking the
    /// interpolant's value at the cell's left endpoint.
    pub fn pc_approximate(&self, n: usize) -> LayeredProfile {
        self.pc_approximate_with(n, SampleRule::LeftEndpoint)
    }

    pub fn pc_approximate_with(&self, n: usize, rule: SampleRule) -> LayeredProfile {
        let n = n.max(1);
        let h = self.height();
        let mut bp: Vec<f64> = (0..n).map(|j| h * j as f64 / n as f64).collect();
        bp.push(h);
        let values = (0..n)
            .map(|j| {
                let y = match rule {
                    SampleRule::LeftEndpoint => bp[j],
                    SampleRule::Midpoint => 0.5 * (bp[j] + bp[j + 1]),
                };
                self.value_at(y)
            })
            .collect();
        LayeredProfile::new(bp, values).expect("sampled values are positive and the grid is increasing")
    }

    /// Largest `|c'|/c` over the grid, using derivative samples when present.
    pub fn sup_log_derivative(&self) -> f64 {
        match (&self.dsamples, self.interpolation) {
            (Some(ds), _) => ds.iter().zip(&self.samples).map(|(d, c)| d.abs() / c).fold(0.0, f64::max),
            (None, Interpolation::PiecewiseLinear) => (0..self.grid.len() - 1)
                .map(|i| {
                    let slope = (self.samples[i + 1] - self.samples[i]).abs() / (self.grid[i + 1] - self.grid[i]);
                    slope / self.samples[i].min(self.samples[i + 1])
                })
                .fold(0.0, f64::max),
            (None, Interpolation::LeftConstant) => 0.0,
        }
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.effective_values().windows(2).all(|w| w[1] >= w[0])
    }
}

impl Coefficient for SampledProfile {
    fn height(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    fn value_at(&self, y: f64) -> f64 {
        match self.interpolation {
            Interpolation::PiecewiseLinear => self.interp(&self.samples, y),
            Interpolation::LeftConstant => self.samples[self.cell(y)],
        }
    }

    fn extremes(&self) -> (f64, f64) {
        min_max(self.effective_values())
    }

    fn total_variation(&self) -> f64 {
        self.effective_values().windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    fn nodes(&self) -> &[f64] {
        &self.grid
    }

    fn range_on(&self, a: f64, b: f64) -> (f64, f64) {
        let mut vals = Vec::new();
        for i in 0..self.grid.len() - 1 {
            let (y0, y1) = (self.grid[i], self.grid[i + 1]);
            if y1 <= a || y0 >= b {
                continue;
            }
            match self.interpolation {
                Interpolation::LeftConstant => vals.push(self.samples[i]),
                Interpolation::PiecewiseLinear => {
                    vals.push(self.value_at(y0.max(a)));
                    vals.push(self.value_at(y1.min(b)));
                }
            }
        }
        min_max(&vals)
    }

    fn sublevel_intervals(&self, threshold: f64) -> Vec<(f64, f64)> {
        let mut pieces = Vec::new();
        for i in 0..self.grid.len() - 1 {
            let (y0, y1) = (self.grid[i], self.grid[i + 1]);
            match self.interpolation {
                Interpolation::LeftConstant => {
                    if self.samples[i] < threshold {
                        pieces.push((y0, y1));
                    }
                }
                Interpolation::PiecewiseLinear => {
                    let (c0, c1) = (self.samples[i], self.samples[i + 1]);
                    let cross = || y0 + (threshold - c0) / (c1 - c0) * (y1 - y0);
                    match (c0 < threshold, c1 < threshold) {
                        (true, true) => pieces.push((y0, y1)),
                        (true, false) => pieces.push((y0, cross())),
                        (false, true) => pieces.push((cross(), y1)),
                        (false, false) => {}
                    }
                }
            }
        }
        merge_intervals(pieces.into_iter().filter(|(a, b)| b > a))
    }

    fn integral_inverse(&self, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        let first = self.cell(a);
        for i in first..self.grid.len() - 1 {
            let (y0, y1) = (self.grid[i], self.grid[i + 1]);
            if y0 >= b {
                break;
            }
            let (lo, hi) = (a.max(y0), b.min(y1));
            if hi <= lo {
                continue;
            }
            total += match self.interpolation {
                Interpolation::LeftConstant => (hi - lo) / self.samples[i],
                Interpolation::PiecewiseLinear => {
                    let (ca, cb) = (self.value_at(lo), self.value_at(hi));
                    let r = (cb - ca) / ca;
                    if r.abs() < 1e-8 {
                        (hi - lo) / ca * (1.0 - r / 2.0 + r * r / 3.0)
                    } else {
                        (hi - lo) * (cb / ca).ln() / (cb - ca)
                    }
                }
            };
        }
        total
    }
}

/// Either representation, as read from a profile file.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    Layered(LayeredProfile),
    Sampled(SampledProfile),
}

impl Profile {
    pub fn as_layered(&self) -> Option<&LayeredProfile> {
        match self {
            Profile::Layered(p) => Some(p),
            Profile::Sampled(_) => None,
        }
    }

    pub fn as_sampled(&self) -> Option<&SampledProfile> {
        match self {
            Profile::Sampled(p) => Some(p),
            Profile::Layered(_) => None,
        }
    }

    fn inner(&self) -> &dyn Coefficient {
        match self {
            Profile::Layered(p) => p,
            Profile::Sampled(p) => p,
        }
    }
}

impl Coefficient for Profile {
    fn height(&self) -> f64 {
        self.inner().height()
    }
    fn value_at(&self, y: f64) -> f64 {
        self.inner().value_at(y)
    }
    fn extremes(&self) -> (f64, f64) {
        self.inner().extremes()
    }
    fn total_variation(&self) -> f64 {
        self.inner().total_variation()
    }
    fn nodes(&self) -> &[f64] {
        self.inner().nodes()
    }
    fn range_on(&self, a: f64, b: f64) -> (f64, f64) {
        self.inner().range_on(a, b)
    }
    fn sublevel_intervals(&self, threshold: f64) -> Vec<(f64, f64)> {
        self.inner().sublevel_intervals(threshold)
    }
    fn integral_inverse(&self, a: f64, b: f64) -> f64 {
        self.inner().integral_inverse(a, b)
    }
}

/// A well `(α, β)` for threshold `c₁`: `c ≥ c₁` outside, `inf c < c₁` inside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WellDescriptor {
    pub alpha: f64,
    pub beta: f64,
    pub threshold: f64,
    /// Infimum of `c` on `(α, β)`.
    pub floor: f64,
    /// The sublevel set `{c < c₁}` was disconnected and `(α, β)` is its hull.
    pub enlarged: bool,
}

impl WellDescriptor {
    pub fn width(&self) -> f64 {
        self.beta - self.alpha
    }

    /// Distance from the closed band `[a, b]` to the well; zero if they meet.
    pub fn distance_to(&self, a: f64, b: f64) -> f64 {
        if a >= self.beta {
            a - self.beta
        } else if b <= self.alpha {
            self.alpha - b
        } else {
            0.0
        }
    }
}

/// Smallest interval containing `{y : c(y) < c1}`.
pub fn find_well(profile: &impl Coefficient, c1: f64) -> Result<Option<WellDescriptor>, ProfileError> {
    let (c_m, c_max) = profile.extremes();
    if !(c1 > c_m && c1 <= c_max) {
        return Err(ProfileError::ThresholdOutOfRange { c1, c_m, c_max });
    }
    let pieces = profile.sublevel_intervals(c1);
    let (Some(first), Some(last)) = (pieces.first(), pieces.last()) else {
        return Ok(None);
    };
    let (alpha, beta) = (first.0, last.1);
    let (floor, _) = profile.range_on(alpha, beta);
    Ok(Some(WellDescriptor { alpha, beta, threshold: c1, floor, enlarged: pieces.len() > 1 }))
}

pub(crate) fn uniform_grid(height: f64, intervals: usize) -> Result<Vec<f64>, ProfileError> {
    if !(height > 0.0 && height.is_finite()) {
        return Err(ProfileError::NonPositiveHeight { height });
    }
    let m = intervals.max(1);
    let mut g: Vec<f64> = (0..m).map(|i| height * i as f64 / m as f64).collect();
    g.push(height);
    Ok(g)
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

fn merge_intervals(pieces: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in pieces {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}
