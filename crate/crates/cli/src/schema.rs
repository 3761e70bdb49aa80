//! Profile documents.
//!
//! A layered profile:
//!
//! ```toml
//! kind = "layered"
//! H = 1.0
//! breakpoints = [0.0, 0.5, 1.0]
//! values = [1.0, 4.0]
//!
//! [cross_section]
//! lengths = [1.0]
//! ```
//!
//! A sampled profile replaces `breakpoints`/`values` with `grid` and `samples`,
//! plus optional `dsamples`, `ddsamples` and `interpolation`
//! (`"piecewise-linear"`, the default, or `"left-constant"`).
//! The cross-section block is optional and defaults to the interval `(0, 1)`.

use std::path::Path;

use layerwave::cross_section::CrossSection;
use layerwave::error::{CrossSectionError, ProfileError};
use layerwave::profile::{Interpolation, LayeredProfile, Profile, SampledProfile};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Layered,
    Sampled,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    kind: Kind,
    #[serde(rename = "H")]
    height: f64,
    breakpoints: Option<Vec<f64>>,
    values: Option<Vec<f64>>,
    grid: Option<Vec<f64>>,
    samples: Option<Vec<f64>>,
    dsamples: Option<Vec<f64>>,
    ddsamples: Option<Vec<f64>>,
    interpolation: Option<Interpolation>,
    cross_section: Option<CrossSectionDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CrossSectionDoc {
    lengths: Vec<f64>,
}

pub struct Loaded {
    pub profile: Profile,
    pub cross_section: CrossSection,
}

pub fn load_profile(path: &Path) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_owned(), source })?;
    parse_profile(&text, &path.display().to_string())
}

pub fn parse_profile(text: &str, file: &str) -> Result<Loaded, CliError> {
    let schema = |path: &str, message: String| CliError::Schema { file: file.to_owned(), path: path.to_owned(), message };
    let doc: ProfileDoc = toml::from_str(text).map_err(|e| {
        let message = e.message().to_owned();
        let path = e
            .span()
            .and_then(|s| key_at(text, s.start))
            .unwrap_or_else(|| "(document)".to_owned());
        schema(&path, message)
    })?;
    if !(doc.height > 0.0 && doc.height.is_finite()) {
        return Err(schema("H", format!("must be positive and finite, got {}", doc.height)));
    }

    let (nodes_field, profile) = match doc.kind {
        Kind::Layered => {
            for (name, present) in [
                ("grid", doc.grid.is_some()),
                ("samples", doc.samples.is_some()),
                ("dsamples", doc.dsamples.is_some()),
                ("ddsamples", doc.ddsamples.is_some()),
                ("interpolation", doc.interpolation.is_some()),
            ] {
                if present {
                    return Err(schema(name, "not allowed in a layered profile".into()));
                }
            }
            let bp = doc.breakpoints.ok_or_else(|| schema("breakpoints", "missing field".into()))?;
            let values = doc.values.ok_or_else(|| schema("values", "missing field".into()))?;
            check_end(&bp, doc.height).map_err(|m| schema("breakpoints", m))?;
            ("breakpoints", LayeredProfile::new(bp, values).map(Profile::Layered))
        }
        Kind::Sampled => {
            for (name, present) in [("breakpoints", doc.breakpoints.is_some()), ("values", doc.values.is_some())] {
                if present {
                    return Err(schema(name, "not allowed in a sampled profile".into()));
                }
            }
            let grid = doc.grid.ok_or_else(|| schema("grid", "missing field".into()))?;
            let samples = doc.samples.ok_or_else(|| schema("samples", "missing field".into()))?;
            check_end(&grid, doc.height).map_err(|m| schema("grid", m))?;
            let interp = doc.interpolation.unwrap_or(Interpolation::PiecewiseLinear);
            let built = match (doc.dsamples, doc.ddsamples) {
                (None, None) => SampledProfile::new(grid, samples, interp),
                (Some(d), Some(dd)) => SampledProfile::new(grid, samples, interp).and_then(|p| p.with_derivatives(d, dd)),
                (Some(_), None) => return Err(schema("ddsamples", "required when dsamples is given".into())),
                (None, Some(_)) => return Err(schema("dsamples", "required when ddsamples is given".into())),
            };
            ("grid", built.map(Profile::Sampled))
        }
    };
    let profile = profile.map_err(|e| {
        let (path, message) = profile_error_path(&e, nodes_field);
        schema(&path, message)
    })?;

    let lengths = doc.cross_section.map(|c| c.lengths).unwrap_or_else(|| vec![1.0]);
    let cross_section = CrossSection::new(lengths).map_err(|e| match e {
        CrossSectionError::NonPositiveSide { index, value } => {
            schema(&format!("cross_section.lengths[{index}]"), format!("{value} is not positive"))
        }
        other => schema("cross_section.lengths", other.to_string()),
    })?;
    Ok(Loaded { profile, cross_section })
}

fn check_end(nodes: &[f64], height: f64) -> Result<(), String> {
    match nodes.last() {
        Some(&last) if (last - height).abs() > 1e-12 * height => Err(format!("last entry {last} must equal H = {height}")),
        _ => Ok(()),
    }
}

fn profile_error_path(e: &ProfileError, nodes: &str) -> (String, String) {
    match e {
        ProfileError::NonPositiveValue { field, index, value } => {
            (format!("{field}[{index}]"), format!("{value} is not positive"))
        }
        ProfileError::NonFinite { field, index } => {
            let field = if *field == "grid" { nodes } else { field };
            (format!("{field}[{index}]"), "not finite".into())
        }
        ProfileError::LengthMismatch { field, expected, found } => {
            (field.to_string(), format!("has {found} entries, expected {expected}"))
        }
        ProfileError::NotIncreasing { index } => (format!("{nodes}[{index}]"), "not strictly increasing".into()),
        ProfileError::GridStart { found } => (format!("{nodes}[0]"), format!("must be 0, got {found}")),
        ProfileError::TooFewPoints { found } => (nodes.to_owned(), format!("needs at least two entries, got {found}")),
        other => ("(document)".to_owned(), other.to_string()),
    }
}

// Dotted path of the `key = value` line containing byte offset `at`, if any.
fn key_at(text: &str, at: usize) -> Option<String> {
    let before = &text[..at.min(text.len())];
    let start = before.rfind('\n').map_or(0, |i| i + 1);
    let line = text[start..].lines().next()?;
    let key = line.split('=').next()?.trim();
    if key.is_empty() || key.starts_with('[') {
        return None;
    }
    let table = before.lines().rev().map(str::trim).find(|l| l.starts_with('[')).map(|l| l.trim_matches(['[', ']']));
    Some(match table {
        Some(t) => format!("{t}.{key}"),
        None => key.to_owned(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LAYERED: &str = "kind = \"layered\"\nH = 1.0\nbreakpoints = [0.0, 0.5, 1.0]\nvalues = [1.0, 4.0]\n";

    fn schema_path(text: &str) -> String {
        match parse_profile(text, "p.toml") {
            Err(CliError::Schema { path, .. }) => path,
            Err(e) => panic!("unexpected error {e}"),
            Ok(_) => panic!("document accepted"),
        }
    }

    #[test]
    fn minimal_layered_document() {
        let l = parse_profile(LAYERED, "p.toml").unwrap();
        assert_eq!(l.profile.as_layered().unwrap().values(), &[1.0, 4.0]);
        assert_eq!(l.cross_section.lengths(), &[1.0]);
    }

    #[test]
    fn negative_value_names_the_index() {
        assert_eq!(schema_path(&LAYERED.replace("[1.0, 4.0]", "[1.0, -4.0]")), "values[1]");
    }

    #[test]
    fn structural_errors_carry_paths() {
        assert_eq!(schema_path(&LAYERED.replace("H = 1.0", "H = 2.0")), "breakpoints");
        assert_eq!(schema_path(&LAYERED.replace("0.5", "1.5")), "breakpoints[2]");
        assert_eq!(schema_path(&format!("{LAYERED}grid = [0.0, 1.0]\n")), "grid");
        assert_eq!(schema_path(&format!("{LAYERED}colour = 3\n")), "colour");
        assert_eq!(schema_path(&LAYERED.replace("H = 1.0", "H = \"one\"")), "H");
        assert_eq!(schema_path(&format!("{LAYERED}[cross_section]\nlengths = [1.0, 0.0]\n")), "cross_section.lengths[1]");
        assert_eq!(schema_path(&format!("{LAYERED}[cross_section]\nlengths = \"wide\"\n")), "cross_section.lengths");
    }

    #[test]
    fn sampled_document() {
        let text = "kind = \"sampled\"\nH = 1.0\ngrid = [0.0, 0.5, 1.0]\nsamples = [1.0, 1.25, 2.0]\n\
                    interpolation = \"left-constant\"\n[cross_section]\nlengths = [2.0, 3.0]\n";
        let l = parse_profile(text, "s.toml").unwrap();
        let s = l.profile.as_sampled().unwrap();
        assert_eq!(s.interpolation(), Interpolation::LeftConstant);
        assert!(!s.has_derivatives());
        assert_eq!(l.cross_section.dimension(), 2);
        assert_eq!(schema_path(&text.replace("1.25", "0.0")), "samples[1]");
        assert_eq!(schema_path(&text.replace("[1.0, 1.25, 2.0]\n", "[1.0, 1.25, 2.0]\ndsamples = [0.0, 0.0, 0.0]\n")), "ddsamples");
    }
}
