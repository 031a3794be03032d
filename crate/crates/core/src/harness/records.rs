use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::sampling::sample_with_spec;
use crate::typicality::{evaluate_record, TypicalityRecord};

pub const CSV_HEADER: &str = "sample_index,n_modes_full,n_modes_sys,beta,z_profile,master_seed,\
energy,sum_sympl,work,stat_T,stat_frakT,stat_delta,nu_th";

#[derive(Serialize)]
struct CsvRow<'a> {
    sample_index: u64,
    n_modes_full: usize,
    n_modes_sys: usize,
    beta: f64,
    z_profile: &'a str,
    master_seed: u64,
    energy: f64,
    sum_sympl: f64,
    work: f64,
    #[serde(rename = "stat_T")]
    stat_t: f64,
    #[serde(rename = "stat_frakT")]
    stat_frak_t: f64,
    stat_delta: f64,
    nu_th: f64,
}

/// Samples `0..config.samples` at `n_full` modes, in index order.
///
/// A failing sample is reported with its index; when several fail, the
/// lowest index wins so the message does not depend on scheduling.
pub fn run_records(config: &ExperimentConfig, n_full: usize) -> Result<Vec<TypicalityRecord>> {
    let state = config.state_config(n_full)?;
    let results: Vec<Result<TypicalityRecord>> = (0..config.samples as u64)
        .into_par_iter()
        .map(|i| {
            let s = sample_with_spec(&state, i)?;
            evaluate_record(i, &s.gamma_m, &s.squeezing, &state)
        })
        .collect();
    results
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| Error::Sample {
                index: i as u64,
                source: Box::new(e),
            })
        })
        .collect()
}

/// First record breaking `W <= sqrt(m Delta)`, as an error.
pub fn check_bound_chain(records: &[TypicalityRecord]) -> Result<()> {
    match records.iter().find(|r| !r.bound_holds) {
        Some(r) => Err(Error::InvariantViolated(format!(
            "work bound W <= sqrt(m Delta) fails at n = {}, sample {}: W = {}, sqrt(m Delta) = {}",
            r.n_full,
            r.sample_index,
            r.work,
            r.work_bound()
        ))),
        None => Ok(()),
    }
}

/// CSV with the fixed header; `work` is clamped at zero.
pub fn records_to_csv(records: &[TypicalityRecord], config: &ExperimentConfig) -> Result<String> {
    let profile = config.z_profile.to_string();
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in records {
        w.serialize(CsvRow {
            sample_index: r.sample_index,
            n_modes_full: r.n_full,
            n_modes_sys: r.m_sys,
            beta: r.beta,
            z_profile: &profile,
            master_seed: config.seed,
            energy: r.energy,
            sum_sympl: r.sum_sympl,
            work: r.reported_work(),
            stat_t: r.stat_t,
            stat_frak_t: r.stat_frak_t,
            stat_delta: r.stat_delta,
            nu_th: r.nu_th,
        })
        .map_err(|e| Error::NumericalFailure(format!("csv encoding: {e}")))?;
    }
    let body = w
        .into_inner()
        .map_err(|e| Error::NumericalFailure(format!("csv encoding: {e}")))?;
    let mut out = String::with_capacity(CSV_HEADER.len() + 1 + body.len());
    out.push_str(CSV_HEADER);
    out.push('\n');
    out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(out)
}
