//! `layerwave`: solve and check layered-media eigenmodes from the command line.
//!
//! Exit status: 0 on success, 1 for unreadable or invalid input, 2 for a
//! numerical failure, 3 when a check command finds a violated bound.

mod commands;
mod error;
mod report;
mod schema;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use layerwave::profile::SampleRule;

use crate::error::CliError;
use crate::report::Format;

#[derive(Parser)]
#[command(name = "layerwave", version, about = "Eigenmodes of layered media: spectra, mode tables and bound checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Profile document (TOML).
    #[arg(long)]
    pub profile: PathBuf,
    /// Spectral gap ε; defaults to 0.05 (c_M − c_m).
    #[arg(long)]
    pub eps: Option<f64>,
    /// Transverse modes, as `LO..HI` or a single index.
    #[arg(long, value_parser = parse_k_range)]
    pub k: Option<(usize, usize)>,
    /// λ window as multiples of μ_k², as `LO..HI`.
    #[arg(long, value_parser = parse_range)]
    pub window_mult: Option<(f64, f64)>,
    /// Relative tolerance of eigenvalue bisection.
    #[arg(long, default_value_t = 1e-12)]
    pub rel_tol: f64,
    #[arg(long, value_enum, default_value = "structured")]
    pub format: Format,
    /// Worker threads for (k, window) sweeps; defaults to all cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Well threshold c₁ for guided classification; defaults to c_M.
    #[arg(long)]
    pub c1: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues in the window for each k.
    Spectrum(Common),
    /// Eigenvalues tagged Guided, NonGuided or Residual.
    Classify(Common),
    /// Eigenfunction table (y, u, du) for one (k, ℓ).
    Modes {
        #[command(flatten)]
        common: Common,
        /// Oscillation index ℓ.
        #[arg(long, default_value_t = 1)]
        ell: u32,
        /// Number of output points.
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Check the exponential decay bound of guided modes outside the well.
    Decay {
        #[command(flatten)]
        common: Common,
        /// Band `A..B` outside the well.
        #[arg(long, value_parser = parse_range)]
        band: (f64, f64),
        /// Split parameter t in (0, 1).
        #[arg(long, default_value_t = 0.5)]
        t: f64,
    },
    /// Check the non-guided band-mass floor.
    Floor {
        #[command(flatten)]
        common: Common,
        /// Single band `A..B`; defaults to the partition into tenths.
        #[arg(long, value_parser = parse_range)]
        band: Option<(f64, f64)>,
        /// Report the floor as a measurement only, never failing.
        #[arg(long)]
        explore: bool,
        /// Cells of the piecewise-constant approximant used for sampled profiles.
        #[arg(long, default_value_t = 1024)]
        pieces: usize,
    },
    /// Minimal half-wave amplitude of non-guided modes.
    Minamp(Common),
    /// Check amplitude ratio identities and the cumulative bound.
    Ratios {
        #[command(flatten)]
        common: Common,
        /// Use the three-layer zone (c₁ + ε, c₂ − ε) identities instead.
        #[arg(long)]
        three_layer: bool,
    },
    /// Liouville normal form deviations of a smooth sampled profile.
    Liouville {
        #[command(flatten)]
        common: Common,
        /// Numerov grid intervals.
        #[arg(long, default_value_t = 8192)]
        grid: usize,
    },
    /// Check the three-layer existence condition and the window counts.
    Existence(Common),
    /// Convergence of piecewise-constant approximants for a sampled profile.
    BvConverge {
        #[command(flatten)]
        common: Common,
        /// Target oscillation index; defaults to the first non-guided mode.
        #[arg(long)]
        ell: Option<u32>,
        /// Comma-separated cell counts.
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128,256,512")]
        n: Vec<usize>,
        #[arg(long, value_parser = parse_rule, default_value = "midpoint")]
        rule: SampleRule,
        /// Largest accepted final relative eigenvalue error.
        #[arg(long, default_value_t = 1e-4)]
        tolerance: f64,
    },
    /// Cross-check eigenvalues against the finite-difference reference.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Finite-difference grid intervals.
        #[arg(long, default_value_t = 4096)]
        grid: usize,
    },
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected LO..HI, got `{s}`"))?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad number `{a}`"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad number `{b}`"))?;
    if !(lo < hi) {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn parse_k_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").unwrap_or((s, s));
    let lo: usize = a.trim().parse().map_err(|_| format!("bad index `{a}`"))?;
    let hi: usize = b.trim().parse().map_err(|_| format!("bad index `{b}`"))?;
    if lo == 0 || hi < lo {
        return Err(format!("k range must satisfy 1 <= LO <= HI, got `{s}`"));
    }
    Ok((lo, hi))
}

fn parse_rule(s: &str) -> Result<SampleRule, String> {
    match s {
        "midpoint" => Ok(SampleRule::Midpoint),
        "left-endpoint" => Ok(SampleRule::LeftEndpoint),
        _ => Err(format!("expected `midpoint` or `left-endpoint`, got `{s}`")),
    }
}

fn run(cli: Cli) -> Result<(report::Report, Format), CliError> {
    let common = match &cli.command {
        Command::Spectrum(c) | Command::Classify(c) | Command::Minamp(c) | Command::Existence(c) => c,
        Command::Modes { common, .. }
        | Command::Decay { common, .. }
        | Command::Floor { common, .. }
        | Command::Ratios { common, .. }
        | Command::Liouville { common, .. }
        | Command::BvConverge { common, .. }
        | Command::Oracle { common, .. } => common,
    };
    let ctx = commands::Context::new(common)?;
    let report = match &cli.command {
        Command::Spectrum(_) => commands::spectrum(&ctx)?,
        Command::Classify(_) => commands::classify(&ctx)?,
        Command::Modes { ell, points, .. } => commands::modes(&ctx, *ell, *points)?,
        Command::Decay { band, t, .. } => commands::decay(&ctx, *band, *t)?,
        Command::Floor { band, explore, pieces, .. } => commands::floor(&ctx, *band, *explore, *pieces)?,
        Command::Minamp(_) => commands::minamp(&ctx)?,
        Command::Ratios { three_layer, .. } => commands::ratios(&ctx, *three_layer)?,
        Command::Liouville { grid, .. } => commands::liouville(&ctx, *grid)?,
        Command::Existence(_) => commands::existence(&ctx)?,
        Command::BvConverge { ell, n, rule, tolerance, .. } => commands::bv_converge(&ctx, *ell, n, *rule, *tolerance)?,
        Command::Oracle { grid, .. } => commands::oracle(&ctx, *grid)?,
    };
    Ok((report, common.format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((report, format)) => {
            let mut out = std::io::stdout().lock();
            match report.emit(format, &mut out).and_then(|()| Ok(out.flush()?)) {
                Err(CliError::Closed) => return ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(e.exit_code() as u8);
                }
                Ok(()) => {}
            }
            if report.failed() {
                for v in report.violations() {
                    eprintln!("violated: {} (k = {:?}, l = {:?}): lhs = {:e}, rhs = {:e}", v.check, v.k, v.l, v.lhs, v.rhs);
                }
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
