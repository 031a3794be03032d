//! Random reduced covariance matrices
//! `Gamma_m = 1/2 Pi O J~(z) O^T Pi` with `O` Haar-distributed in `K_d`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::haar::{haar_rows, passive_rows};
use super::rng::stream_rng;
use super::squeezing::{sample_squeezing, SqueezingSpec, ZProfile};
use crate::error::{Error, Result};
use crate::phase_space::CovarianceMatrix;

/// How the ambient pure state relates to the `n_full`-mode system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    /// Random pure state on `n_full` modes.
    Direct,
    /// Random pure state on `2 n_full` modes (the Gaussian purification of an
    /// `n_full`-mode mixed state).
    Purified,
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pipeline::Direct => "direct",
            Pipeline::Purified => "purified",
        })
    }
}

impl FromStr for Pipeline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "direct" => Ok(Pipeline::Direct),
            "purified" => Ok(Pipeline::Purified),
            other => Err(Error::InvalidConfig(format!("unknown pipeline {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomStateConfig {
    pub n_full: usize,
    pub m_sys: usize,
    pub pipeline: Pipeline,
    pub profile: ZProfile,
    pub master_seed: u64,
}

impl RandomStateConfig {
    pub fn new(
        n_full: usize,
        m_sys: usize,
        pipeline: Pipeline,
        profile: ZProfile,
        master_seed: u64,
    ) -> Result<Self> {
        let config = Self {
            n_full,
            m_sys,
            pipeline,
            profile,
            master_seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_sys == 0 || self.m_sys > self.n_full {
            return Err(Error::BadModeCount {
                requested: self.m_sys,
                available: self.n_full,
            });
        }
        Ok(())
    }

    /// Mode count `d` of the random pure state, which is also the dimension
    /// of the Haar unitary.
    pub fn ambient_modes(&self) -> usize {
        match self.pipeline {
            Pipeline::Direct => self.n_full,
            Pipeline::Purified => 2 * self.n_full,
        }
    }
}

/// One draw: the squeezing vector and the reduced covariance matrix.
#[derive(Clone, Debug)]
pub struct RandomSample {
    pub sample_index: u64,
    pub squeezing: SqueezingSpec,
    pub gamma_m: CovarianceMatrix,
}

/// `1/2 R J~ R^T` where `R` are the phase-space rows of the kept modes.
///
/// `u_rows` holds the first `m` rows of the ambient unitary. For the vacuum
/// (`J~ = I`) the orthonormality of the rows makes the result exactly `I/2`,
/// which is returned without round-off.
pub fn reduced_covariance(u_rows: &DMatrix<Complex64>, squeezing: &SqueezingSpec) -> Result<CovarianceMatrix> {
    let (m, d) = u_rows.shape();
    if squeezing.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: squeezing.len(),
        });
    }
    if squeezing.is_vacuum() {
        return Ok(CovarianceMatrix::vacuum(m));
    }
    let r = passive_rows(u_rows);
    let j = squeezing.j_tilde_diagonal();
    let mut weighted = r.clone();
    for (c, &jc) in j.iter().enumerate() {
        weighted.column_mut(c).scale_mut(0.5 * jc);
    }
    let g = weighted * r.transpose();
    Ok(CovarianceMatrix::from_trusted((&g + g.transpose()) * 0.5))
}

/// Draws sample `sample_index`; fully determined by
/// `(config.master_seed, sample_index)`.
pub fn sample_with_spec(config: &RandomStateConfig, sample_index: u64) -> Result<RandomSample> {
    config.validate()?;
    let d = config.ambient_modes();
    let mut rng = stream_rng(config.master_seed, sample_index);
    let squeezing = sample_squeezing(&config.profile, d, &mut rng)?;
    let rows = haar_rows(d, config.m_sys, &mut rng)?;
    let gamma_m = reduced_covariance(&rows, &squeezing)?;
    Ok(RandomSample {
        sample_index,
        squeezing,
        gamma_m,
    })
}

/// Reduced covariance matrix of sample `sample_index`.
pub fn sample_random_state(config: &RandomStateConfig, sample_index: u64) -> Result<CovarianceMatrix> {
    Ok(sample_with_spec(config, sample_index)?.gamma_m)
}
