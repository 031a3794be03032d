//! Experiment drivers behind the command-line tool: configuration, record
//! generation, sweeps, moment reports, validation and purification of
//! covariance files.

mod config;
mod records;
mod sweep;
mod validate;

use std::io::Write;
use std::path::Path;

pub use config::{
    ExperimentConfig, OutputFormat, DEFAULT_EPSILON, DEFAULT_N, DEFAULT_N_GRID, DEFAULT_SAMPLES,
    DEFAULT_Z_PROFILE,
};
pub use records::{check_bound_chain, records_to_csv, run_records, CSV_HEADER};
pub use sweep::{fit_delta_slope, run_sweep, summarize_point, Aggregate, DELTA_FLOOR, SlopeFit, SweepPoint, SweepSummary};
pub use validate::{
    cmd_validate, run_validation_suite, validate_covariance_file, CheckResult, ValidationReport,
    DEFAULT_VALIDATION_SIZES,
};

use crate::error::{Error, Result};
use crate::phase_space::{
    parse_covariance_text, partial_trace, purify, symplectic_spectrum, write_covariance_text, CovarianceMatrix,
};
use crate::typicality::TypicalityRecord;
use crate::weingarten::{mc_moment, MomentQuantity, MomentReport};

/// Largest entrywise deviation accepted when reducing a purification back to
/// its input.
pub const TOL_PURIFY_ROUND_TRIP: f64 = 1e-10;
/// Largest deviation of a purification's symplectic eigenvalues from 1/2.
pub const TOL_PURIFY_PURITY: f64 = 1e-8;

/// Runs `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("cannot start {t} threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn to_json<T: serde::Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::NumericalFailure(format!("json encoding: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Writes `text` to `out`, or to standard output.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Records at `n` modes, checked against the work bound.
pub fn cmd_sample(config: &ExperimentConfig) -> Result<Vec<TypicalityRecord>> {
    config.validate()?;
    let records = with_threads(config.threads, || run_records(config, config.n_value()))??;
    check_bound_chain(&records)?;
    Ok(records)
}

pub fn render_sample(config: &ExperimentConfig, records: &[TypicalityRecord]) -> Result<String> {
    match config.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => records_to_csv(records, config),
        OutputFormat::Json => to_json(records),
    }
}

/// Sweep over the n grid, checked against the work bound.
pub fn cmd_sweep(config: &ExperimentConfig) -> Result<(Vec<Vec<TypicalityRecord>>, SweepSummary)> {
    let (records, summary) = with_threads(config.threads, || run_sweep(config))??;
    for batch in &records {
        check_bound_chain(batch)?;
    }
    Ok((records, summary))
}

/// JSON summary by default; `csv` gives the raw records of every grid point.
pub fn render_sweep(
    config: &ExperimentConfig,
    records: &[Vec<TypicalityRecord>],
    summary: &SweepSummary,
) -> Result<String> {
    match config.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => to_json(summary),
        OutputFormat::Csv => {
            let flat: Vec<TypicalityRecord> = records.iter().flatten().cloned().collect();
            records_to_csv(&flat, config)
        }
    }
}

/// One report per moment quantity at `n` modes.
pub fn cmd_moments(config: &ExperimentConfig) -> Result<Vec<MomentReport>> {
    config.validate()?;
    if config.format == Some(OutputFormat::Csv) {
        return Err(Error::InvalidConfig("moments are reported as json only".into()));
    }
    let state = config.state_config(config.n_value())?;
    with_threads(config.threads, || {
        MomentQuantity::ALL
            .into_iter()
            .map(|q| mc_moment(q, &state, config.samples))
            .collect::<Result<Vec<_>>>()
    })?
}

/// Purifies the matrix in `input` and returns the output text.
///
/// The result is reduced back and checked against the input, and its
/// symplectic spectrum is checked to be all 1/2, before anything is written.
pub fn purify_text(input: &str) -> Result<String> {
    let gamma = CovarianceMatrix::new(parse_covariance_text(input)?)?;
    let pure = purify(&gamma)?;
    let back = partial_trace(&pure, gamma.n_modes())?;
    let dev = (back.entries() - gamma.entries()).abs().max();
    if !(dev <= TOL_PURIFY_ROUND_TRIP) {
        return Err(Error::NumericalFailure(format!(
            "purification does not reduce to its input (deviation {dev:e})"
        )));
    }
    let nus = symplectic_spectrum(pure.entries())?;
    let worst = nus.iter().map(|nu| (nu - 0.5).abs()).fold(0.0, f64::max);
    if !(worst <= TOL_PURIFY_PURITY) {
        return Err(Error::NumericalFailure(format!(
            "purification is not pure (symplectic eigenvalue off 1/2 by {worst:e})"
        )));
    }
    Ok(write_covariance_text(pure.entries()))
}

pub fn cmd_purify(config: &ExperimentConfig) -> Result<String> {
    let input = config
        .input
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("purify needs --input".into()))?;
    let text = std::fs::read_to_string(input)
        .map_err(|e| Error::Parse(format!("{}: {e}", input.display())))?;
    purify_text(&text)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Sample,
    Sweep,
    Moments,
    Validate,
    Purify,
}

/// Runs a subcommand and writes its output. Validation reports are written
/// before a failure is returned.
pub fn run(command: Command, config: &ExperimentConfig) -> Result<()> {
    config.validate()?;
    let out = config.out.as_deref();
    match command {
        Command::Sample => {
            let records = cmd_sample(config)?;
            emit(out, &render_sample(config, &records)?)
        }
        Command::Sweep => {
            let (records, summary) = cmd_sweep(config)?;
            emit(out, &render_sweep(config, &records, &summary)?)
        }
        Command::Moments => emit(out, &to_json(&cmd_moments(config)?)?),
        Command::Validate => {
            let report = with_threads(config.threads, || cmd_validate(config))??;
            emit(out, &report.to_text())?;
            report.into_result().map(|_| ())
        }
        Command::Purify => emit(out, &cmd_purify(config)?),
    }
}
