//! Local-thermality statistics of random reduced states and the work bound
//! `W <= sqrt(m * Delta)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::phase_space::{symplectic_spectrum, CovarianceMatrix};
use crate::sampling::{hilbert_schmidt_distance, reduced_covariance, RandomStateConfig, SqueezingSpec};
use crate::stats::{compensated_sum, wilson_interval};

/// Slack on `W <= sqrt(m Delta)`.
pub const TOL_BOUND_CHAIN: f64 = 1e-9;
/// `beta` must stay below this for the eigenvalue concentration statement.
pub const BETA_LIMIT_EIGENVALUES: f64 = 0.25;
/// `beta` must stay below this for the symplectic-eigenvalue and work statements.
pub const BETA_LIMIT_WORK: f64 = 0.125;

/// Mean energy per mode of the ambient pure state, `Tr J~(z) / (4 d)`.
pub fn nu_th(z: &SqueezingSpec) -> f64 {
    z.ball_sum() / (4.0 * z.len() as f64)
}

/// `T_m = Tr[(Gamma_m - nu_th I)^2] = sum_k (lambda_k - nu_th)^2`, evaluated
/// as a Frobenius norm.
pub fn stat_t(gamma_m: &CovarianceMatrix, nu_th: f64) -> f64 {
    let g = gamma_m.entries();
    let n = g.nrows();
    compensated_sum((0..n).flat_map(|i| {
        (0..n).map(move |j| {
            let x = g[(i, j)] - if i == j { nu_th } else { 0.0 };
            x * x
        })
    }))
}

/// `2 sum_k (nu_k^2 - nu_th^2)^2` for a given symplectic spectrum.
pub fn stat_frak_t_from_spectrum(nus: &[f64], nu_th: f64) -> f64 {
    let t2 = nu_th * nu_th;
    2.0 * compensated_sum(nus.iter().map(|nu| {
        let x = nu * nu - t2;
        x * x
    }))
}

/// `Tr[((Omega Gamma_m)^2 + nu_th^2 I)^2] = 2 sum_k (nu_k^2 - nu_th^2)^2`.
pub fn stat_frak_t(gamma_m: &CovarianceMatrix, nu_th: f64) -> Result<f64> {
    let nus = symplectic_spectrum(gamma_m.entries())?;
    Ok(stat_frak_t_from_spectrum(&nus, nu_th))
}

/// Per-sample statistics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypicalityRecord {
    pub sample_index: u64,
    pub n_full: usize,
    pub m_sys: usize,
    pub beta: f64,
    /// `Tr Gamma_m / 2`.
    pub energy: f64,
    /// `sum_k nu_k`.
    pub sum_sympl: f64,
    /// Extractable work, unclamped.
    pub work: f64,
    pub stat_t: f64,
    pub stat_frak_t: f64,
    /// Always exactly `stat_t + stat_frak_t`.
    pub stat_delta: f64,
    pub nu_th: f64,
    /// Whether `work <= sqrt(m_sys * stat_delta) + TOL_BOUND_CHAIN`.
    pub bound_holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<f64>>,
}

impl TypicalityRecord {
    /// Work clamped at zero, for reporting.
    pub fn reported_work(&self) -> f64 {
        self.work.max(0.0)
    }

    pub fn work_bound(&self) -> f64 {
        (self.m_sys as f64 * self.stat_delta).sqrt()
    }
}

/// Evaluates every statistic of one sample.
pub fn evaluate_record(
    sample_index: u64,
    gamma_m: &CovarianceMatrix,
    z: &SqueezingSpec,
    config: &RandomStateConfig,
) -> Result<TypicalityRecord> {
    if gamma_m.n_modes() != config.m_sys {
        return Err(Error::DimensionMismatch {
            expected: config.m_sys,
            actual: gamma_m.n_modes(),
        });
    }
    let nu = nu_th(z);
    let nus = symplectic_spectrum(gamma_m.entries())?;
    let energy = 0.5 * gamma_m.trace();
    let sum_sympl = compensated_sum(nus.iter().copied());
    let work = energy - sum_sympl;
    let stat_t = stat_t(gamma_m, nu);
    let stat_frak_t = stat_frak_t_from_spectrum(&nus, nu);
    let stat_delta = stat_t + stat_frak_t;
    let bound_holds = work <= (config.m_sys as f64 * stat_delta).sqrt() + TOL_BOUND_CHAIN;
    Ok(TypicalityRecord {
        sample_index,
        n_full: config.n_full,
        m_sys: config.m_sys,
        beta: config.profile.beta(),
        energy,
        sum_sympl,
        work,
        stat_t,
        stat_frak_t,
        stat_delta,
        nu_th: nu,
        bound_holds,
        eigenvalues: None,
    })
}

/// Eigenvalues of `Gamma_m`, ascending, for debugging output.
pub fn covariance_eigenvalues(gamma_m: &CovarianceMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = gamma_m.entries().clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Witness `(lhs, rhs)` of a Lipschitz inequality on `U(d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LipschitzWitness {
    pub lhs: f64,
    pub rhs: f64,
}

impl LipschitzWitness {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

fn gamma_for_unitary(u: &DMatrix<Complex64>, z: &SqueezingSpec, config: &RandomStateConfig) -> Result<CovarianceMatrix> {
    let d = config.ambient_modes();
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: u.nrows().max(u.ncols()),
        });
    }
    if z.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: z.len(),
        });
    }
    reduced_covariance(&u.rows(0, config.m_sys).into_owned(), z)
}

/// `|T(U) - T(V)|` against `4 sqrt(2m) ‖J~‖_∞^2 ‖U - V‖_2`.
pub fn lipschitz_witness_t(
    u: &DMatrix<Complex64>,
    v: &DMatrix<Complex64>,
    z: &SqueezingSpec,
    config: &RandomStateConfig,
) -> Result<LipschitzWitness> {
    let nu = nu_th(z);
    let tu = stat_t(&gamma_for_unitary(u, z, config)?, nu);
    let tv = stat_t(&gamma_for_unitary(v, z, config)?, nu);
    let j = z.j_tilde_norm_inf();
    let rhs = 4.0 * (2.0 * config.m_sys as f64).sqrt() * j * j * hilbert_schmidt_distance(u, v);
    Ok(LipschitzWitness {
        lhs: (tu - tv).abs(),
        rhs,
    })
}

/// `|𝔗(U) - 𝔗(V)|` against `10 sqrt(2m) ‖J~‖_∞^4 ‖U - V‖_2`.
pub fn lipschitz_witness_frak_t(
    u: &DMatrix<Complex64>,
    v: &DMatrix<Complex64>,
    z: &SqueezingSpec,
    config: &RandomStateConfig,
) -> Result<LipschitzWitness> {
    let nu = nu_th(z);
    let tu = stat_frak_t(&gamma_for_unitary(u, z, config)?, nu)?;
    let tv = stat_frak_t(&gamma_for_unitary(v, z, config)?, nu)?;
    let j = z.j_tilde_norm_inf();
    let rhs = 10.0 * (2.0 * config.m_sys as f64).sqrt() * j.powi(4) * hilbert_schmidt_distance(u, v);
    Ok(LipschitzWitness {
        lhs: (tu - tv).abs(),
        rhs,
    })
}

/// Empirical `Pr[W > epsilon]` with its 95% Wilson interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailEstimate {
    pub epsilon: f64,
    pub exceed: usize,
    pub total: usize,
    pub fraction: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

/// Tail estimate over raw work values.
pub fn tail_fraction(works: &[f64], epsilon: f64) -> Result<TailEstimate> {
    if works.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidConfig(format!("epsilon must be >= 0, got {epsilon}")));
    }
    let exceed = works.iter().filter(|&&w| w > epsilon).count();
    let total = works.len();
    let (wilson_low, wilson_high) = wilson_interval(exceed, total);
    Ok(TailEstimate {
        epsilon,
        exceed,
        total,
        fraction: exceed as f64 / total as f64,
        wilson_low,
        wilson_high,
    })
}

pub fn tail_probability(records: &[TypicalityRecord], epsilon: f64) -> Result<TailEstimate> {
    let works: Vec<f64> = records.iter().map(|r| r.work).collect();
    tail_fraction(&works, epsilon)
}

/// Warnings for `beta` outside the ranges where the concentration
/// statements are proven.
pub fn beta_warnings(beta: f64) -> Vec<String> {
    let mut out = Vec::new();
    if beta >= BETA_LIMIT_EIGENVALUES {
        out.push(format!(
            "beta = {beta} >= 1/4: eigenvalue concentration bound not asserted"
        ));
    }
    if beta >= BETA_LIMIT_WORK {
        out.push(format!(
            "beta = {beta} >= 1/8: symplectic-spectrum and work concentration bounds not asserted"
        ));
    }
    out
}
