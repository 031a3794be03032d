use serde::Serialize;

use super::config::ExperimentConfig;
use super::records::run_records;
use crate::error::Result;
use crate::stats::{mean_and_standard_error, ols_fit, quantile_sorted};
use crate::typicality::{beta_warnings, tail_fraction, TailEstimate, TypicalityRecord};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub mean: f64,
    pub std_error: f64,
    pub median: f64,
    pub q90: f64,
    pub q99: f64,
}

impl Aggregate {
    pub fn new(values: &[f64]) -> Self {
        let (mean, std_error) = mean_and_standard_error(values);
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self {
            mean,
            std_error,
            median: quantile_sorted(&sorted, 0.5),
            q90: quantile_sorted(&sorted, 0.9),
            q99: quantile_sorted(&sorted, 0.99),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub n_full: usize,
    pub samples: usize,
    pub nu_th: f64,
    pub work: Aggregate,
    pub delta: Aggregate,
    pub mean_stat_t: f64,
    pub mean_stat_frak_t: f64,
    pub tails: Vec<TailEstimate>,
    pub bound_violations: usize,
}

/// OLS fit of `log mean Delta` against `log n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub std_error: f64,
    pub intercept: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub z_profile: String,
    pub pipeline: String,
    pub m_sys: usize,
    pub master_seed: u64,
    pub beta: f64,
    pub points: Vec<SweepPoint>,
    pub delta_slope: Option<SlopeFit>,
    pub warnings: Vec<String>,
}

pub fn summarize_point(n_full: usize, records: &[TypicalityRecord], epsilon: &[f64]) -> Result<SweepPoint> {
    let works: Vec<f64> = records.iter().map(|r| r.reported_work()).collect();
    let deltas: Vec<f64> = records.iter().map(|r| r.stat_delta).collect();
    let ts: Vec<f64> = records.iter().map(|r| r.stat_t).collect();
    let fts: Vec<f64> = records.iter().map(|r| r.stat_frak_t).collect();
    let nus: Vec<f64> = records.iter().map(|r| r.nu_th).collect();
    let tails = epsilon
        .iter()
        .map(|&e| tail_fraction(&works, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepPoint {
        n_full,
        samples: records.len(),
        nu_th: mean_and_standard_error(&nus).0,
        work: Aggregate::new(&works),
        delta: Aggregate::new(&deltas),
        mean_stat_t: mean_and_standard_error(&ts).0,
        mean_stat_frak_t: mean_and_standard_error(&fts).0,
        tails,
        bound_violations: records.iter().filter(|r| !r.bound_holds).count(),
    })
}

/// Mean `Delta` at or below this is eigensolver round-off (a vacuum sweep
/// lands near 1e-32) and carries no scaling information.
pub const DELTA_FLOOR: f64 = 1e-20;

/// Fits the slope and collects warnings; `None` with a warning when some
/// mean `Delta` is at the round-off floor or fewer than two grid points exist.
pub fn fit_delta_slope(points: &[SweepPoint], warnings: &mut Vec<String>) -> Option<SlopeFit> {
    if points.len() < 2 {
        warnings.push("delta slope undefined: fewer than two grid points".into());
        return None;
    }
    if let Some(p) = points.iter().find(|p| !(p.delta.mean > DELTA_FLOOR)) {
        warnings.push(format!(
            "delta slope undefined: mean Delta is {} at n = {}",
            p.delta.mean, p.n_full
        ));
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.n_full as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.delta.mean.ln()).collect();
    match ols_fit(&xs, &ys) {
        Some(fit) => Some(SlopeFit {
            slope: fit.slope,
            std_error: fit.slope_std_error,
            intercept: fit.intercept,
        }),
        None => {
            warnings.push("delta slope undefined: degenerate fit".into());
            None
        }
    }
}

/// Records for every grid point, then the summary built from them.
pub fn run_sweep(config: &ExperimentConfig) -> Result<(Vec<Vec<TypicalityRecord>>, SweepSummary)> {
    config.validate()?;
    let grid = config.n_grid_value();
    let mut all = Vec::with_capacity(grid.len());
    let mut points = Vec::with_capacity(grid.len());
    for &n in &grid {
        let records = run_records(config, n)?;
        points.push(summarize_point(n, &records, &config.epsilon)?);
        all.push(records);
    }
    let mut warnings = beta_warnings(config.z_profile.beta());
    let delta_slope = fit_delta_slope(&points, &mut warnings);
    let summary = SweepSummary {
        z_profile: config.z_profile.to_string(),
        pipeline: config.pipeline.to_string(),
        m_sys: config.m,
        master_seed: config.seed,
        beta: config.z_profile.beta(),
        points,
        delta_slope,
        warnings,
    };
    Ok((all, summary))
}
