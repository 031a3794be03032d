//! Degree-2 Weingarten calculus on `U(d)` and closed-form Haar moments of
//! the reduced covariance matrix, with Monte Carlo estimates to compare
//! against.
//!
//! The moments are written in the complex mode basis: with
//! `b_k = (z_k^2 + z_k^-2) / 2` and `a_k = (z_k^2 - z_k^-2) / 2` over the `d`
//! ambient modes, `Tr B = 2 d nu_th`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::phase_space::{symplectic_form, CovarianceMatrix};
use crate::sampling::{sample_squeezing, sample_with_spec, stream_rng, RandomStateConfig, SqueezingSpec};
use crate::stats::{compensated_sum, mean_and_standard_error};
use crate::typicality::nu_th;

/// Element of the symmetric group `S_2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Permutation2 {
    Identity,
    Swap,
}

impl Permutation2 {
    pub fn apply(self, k: usize) -> usize {
        match self {
            Permutation2::Identity => k,
            Permutation2::Swap => 1 - k,
        }
    }

    pub fn compose(self, other: Permutation2) -> Permutation2 {
        if self == other {
            Permutation2::Identity
        } else {
            Permutation2::Swap
        }
    }

    pub const ALL: [Permutation2; 2] = [Permutation2::Identity, Permutation2::Swap];
}

/// `Wg(d, id) = 1/(d^2 - 1)`, `Wg(d, (12)) = -1/(d (d^2 - 1))`.
pub fn weingarten_d2(d: usize, perm: Permutation2) -> Result<f64> {
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    let d = d as f64;
    let den = d * d - 1.0;
    Ok(match perm {
        Permutation2::Identity => 1.0 / den,
        Permutation2::Swap => -1.0 / (d * den),
    })
}

/// `E[U_{i1 j1} U_{i2 j2} conj(U_{k1 l1}) conj(U_{k2 l2})]` over Haar `U(d)`:
/// the sum over `sigma, tau` in `S_2` of
/// `delta(i, k∘sigma) delta(j, l∘tau) Wg(sigma tau^-1)`.
pub fn degree2_moment(d: usize, i: [usize; 2], j: [usize; 2], k: [usize; 2], l: [usize; 2]) -> Result<f64> {
    let mut total = 0.0;
    for sigma in Permutation2::ALL {
        if (0..2).any(|a| i[a] != k[sigma.apply(a)]) {
            continue;
        }
        for tau in Permutation2::ALL {
            if (0..2).any(|a| j[a] != l[tau.apply(a)]) {
                continue;
            }
            // every element of S_2 is its own inverse
            total += weingarten_d2(d, sigma.compose(tau))?;
        }
    }
    Ok(total)
}

/// Diagonals of `A = (J - J^-1)/2` and `B = (J + J^-1)/2` in the complex
/// mode basis, with the traces the moment formulas need.
#[derive(Clone, Debug, PartialEq)]
pub struct AbDecomposition {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub tr_b: f64,
    pub tr_b2: f64,
    pub tr_a2: f64,
}

impl AbDecomposition {
    pub fn new(z: &SqueezingSpec) -> Self {
        let (a, b): (Vec<f64>, Vec<f64>) = z
            .z()
            .iter()
            .map(|&zk| {
                let (s, t) = (zk * zk, 1.0 / (zk * zk));
                ((s - t) / 2.0, (s + t) / 2.0)
            })
            .unzip();
        let tr_b = compensated_sum(b.iter().copied());
        let tr_b2 = compensated_sum(b.iter().map(|x| x * x));
        let tr_a2 = compensated_sum(a.iter().map(|x| x * x));
        Self {
            a,
            b,
            tr_b,
            tr_b2,
            tr_a2,
        }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `sum_k (b_k - mean b)^2`, the fluctuating part of `Tr B^2`.
    pub fn b_spread(&self) -> f64 {
        let mean = self.tr_b / self.dim() as f64;
        compensated_sum(self.b.iter().map(|x| (x - mean) * (x - mean)))
    }
}

/// Coefficient of `Tr B^2` in the `Omega Gamma` second moment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OmegaCoefficient {
    /// `(d m - 1)`, the same coefficient as in the `Gamma` second moment.
    /// Confirmed by Monte Carlo at `d = 4` and by the vacuum value `-m/2`.
    #[default]
    Derived,
    /// `(d m / 2 - 1)`. Kept for comparison; it misses the vacuum value.
    AsPrinted,
}

fn check_dims(z: &SqueezingSpec, config: &RandomStateConfig) -> Result<usize> {
    config.validate()?;
    let d = config.ambient_modes();
    if z.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: z.len(),
        });
    }
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    Ok(d)
}

/// `E Tr Gamma_m = 2 m nu_th`.
pub fn analytic_first_moment(z: &SqueezingSpec, config: &RandomStateConfig) -> Result<f64> {
    check_dims(z, config)?;
    Ok(2.0 * config.m_sys as f64 * nu_th(z))
}

/// `E Tr Gamma_m^2`.
pub fn analytic_second_moment(z: &SqueezingSpec, config: &RandomStateConfig) -> Result<f64> {
    let d = check_dims(z, config)? as f64;
    let m = config.m_sys as f64;
    let ab = AbDecomposition::new(z);
    let den = d * (d * d - 1.0);
    Ok(m / 2.0
        * ((d - m) * ab.tr_b * ab.tr_b / den
            + (d * m - 1.0) * ab.tr_b2 / den
            + (m + 1.0) * ab.tr_a2 / (d * (d + 1.0))))
}

/// `E Tr (Omega Gamma_m)^2` with the chosen `Tr B^2` coefficient.
pub fn analytic_omega_second_moment(
    z: &SqueezingSpec,
    config: &RandomStateConfig,
    coefficient: OmegaCoefficient,
) -> Result<f64> {
    let d = check_dims(z, config)? as f64;
    let m = config.m_sys as f64;
    let ab = AbDecomposition::new(z);
    let den = d * (d * d - 1.0);
    let c = match coefficient {
        OmegaCoefficient::Derived => d * m - 1.0,
        OmegaCoefficient::AsPrinted => d * m / 2.0 - 1.0,
    };
    Ok(-m / 2.0
        * ((d - m) * ab.tr_b * ab.tr_b / den + c * ab.tr_b2 / den
            - (m + 1.0) * ab.tr_a2 / (d * (d + 1.0))))
}

/// `E T_m = E Tr Gamma_m^2 - 2 m nu_th^2`, written without the cancelling
/// leading terms.
pub fn analytic_mean_stat_t(z: &SqueezingSpec, config: &RandomStateConfig) -> Result<f64> {
    let d = check_dims(z, config)? as f64;
    let m = config.m_sys as f64;
    let ab = AbDecomposition::new(z);
    Ok(m * (d * m - 1.0) * ab.b_spread() / (2.0 * d * (d * d - 1.0))
        + m * (m + 1.0) * ab.tr_a2 / (2.0 * d * (d + 1.0)))
}

/// Functional of `Gamma_m` estimated by [`mc_moment`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentQuantity {
    TraceGamma,
    TraceGammaSquared,
    TraceOmegaGammaSquared,
}

impl MomentQuantity {
    pub const ALL: [MomentQuantity; 3] = [
        MomentQuantity::TraceGamma,
        MomentQuantity::TraceGammaSquared,
        MomentQuantity::TraceOmegaGammaSquared,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MomentQuantity::TraceGamma => "tr_gamma",
            MomentQuantity::TraceGammaSquared => "tr_gamma_sq",
            MomentQuantity::TraceOmegaGammaSquared => "tr_omega_gamma_sq",
        }
    }

    pub fn evaluate(self, gamma_m: &CovarianceMatrix) -> f64 {
        let g = gamma_m.entries();
        match self {
            MomentQuantity::TraceGamma => g.trace(),
            MomentQuantity::TraceGammaSquared => compensated_sum(g.iter().map(|x| x * x)),
            MomentQuantity::TraceOmegaGammaSquared => {
                let og = symplectic_form(gamma_m.n_modes()) * g;
                // Tr(X X) = sum_ij X_ij X_ji
                let n = og.nrows();
                compensated_sum((0..n).flat_map(|i| {
                    let og = &og;
                    (0..n).map(move |j| og[(i, j)] * og[(j, i)])
                }))
            }
        }
    }

    pub fn analytic(self, z: &SqueezingSpec, config: &RandomStateConfig) -> Result<f64> {
        match self {
            MomentQuantity::TraceGamma => analytic_first_moment(z, config),
            MomentQuantity::TraceGammaSquared => analytic_second_moment(z, config),
            MomentQuantity::TraceOmegaGammaSquared => {
                analytic_omega_second_moment(z, config, OmegaCoefficient::default())
            }
        }
    }
}

impl fmt::Display for MomentQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MomentQuantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MomentQuantity::ALL
            .into_iter()
            .find(|q| q.name() == s.trim())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown moment quantity {s:?}")))
    }
}

/// Analytic value against a Monte Carlo estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub quantity: String,
    pub analytic: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
    /// `|analytic - estimate| / max(std_error, 1e-12 * max(1, |analytic|))`.
    /// The floor matters when the functional is constant over the Haar
    /// measure (vacuum, or `Tr Gamma_m` under uniform squeezing) and the
    /// standard error is pure round-off.
    pub z_ratio: f64,
}

/// Relative size below which a standard error is treated as round-off.
pub const SE_FLOOR: f64 = 1e-12;

impl MomentReport {
    pub fn new(quantity: MomentQuantity, analytic: f64, samples: &[f64]) -> Self {
        let (estimate, std_error) = mean_and_standard_error(samples);
        let scale = std_error.max(SE_FLOOR * analytic.abs().max(1.0));
        let z_ratio = (analytic - estimate).abs() / scale;
        Self {
            quantity: quantity.name().to_string(),
            analytic,
            estimate,
            std_error,
            n_samples: samples.len(),
            z_ratio,
        }
    }
}

/// Values of `quantity` on samples `0..n_samples`, in index order.
pub fn mc_samples(quantity: MomentQuantity, config: &RandomStateConfig, n_samples: usize) -> Result<Vec<f64>> {
    (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            sample_with_spec(config, i)
                .map(|s| quantity.evaluate(&s.gamma_m))
                .map_err(|e| Error::Sample {
                    index: i,
                    source: Box::new(e),
                })
        })
        .collect()
}

/// Monte Carlo estimate of `quantity` compared with its closed form.
/// Requires a deterministic squeezing profile.
pub fn mc_moment(quantity: MomentQuantity, config: &RandomStateConfig, n_samples: usize) -> Result<MomentReport> {
    if n_samples < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 samples, got {n_samples}")));
    }
    if config.profile.is_random() {
        return Err(Error::InvalidConfig(format!(
            "moment formulas need a fixed squeezing vector; profile {} is random",
            config.profile
        )));
    }
    // deterministic profiles ignore the generator
    let z = sample_squeezing(&config.profile, config.ambient_modes(), &mut stream_rng(config.master_seed, 0))?;
    let analytic = quantity.analytic(&z, config)?;
    let values = mc_samples(quantity, config, n_samples)?;
    Ok(MomentReport::new(quantity, analytic, &values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{Pipeline, ZProfile};

    fn config(n: usize, m: usize, profile: ZProfile) -> RandomStateConfig {
        RandomStateConfig::new(n, m, Pipeline::Purified, profile, 7).unwrap()
    }

    #[test]
    fn weingarten_values() {
        assert!((weingarten_d2(2, Permutation2::Identity).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((weingarten_d2(2, Permutation2::Swap).unwrap() + 1.0 / 6.0).abs() < 1e-15);
        assert!((weingarten_d2(3, Permutation2::Swap).unwrap() + 1.0 / 24.0).abs() < 1e-15);
        assert!(matches!(weingarten_d2(1, Permutation2::Identity), Err(Error::BadDimension(1))));
        assert!(matches!(weingarten_d2(0, Permutation2::Swap), Err(Error::BadDimension(0))));
    }

    #[test]
    fn weingarten_inverts_gram_matrix() {
        // Gram matrix of S_2 acting on (C^d)^{⊗2}: G(s, t) = d^{#cycles(s t^-1)}
        for d in [2usize, 3, 5, 10] {
            let df = d as f64;
            let gram = |s: Permutation2, t: Permutation2| match s.compose(t) {
                Permutation2::Identity => df * df,
                Permutation2::Swap => df,
            };
            for s in Permutation2::ALL {
                for t in Permutation2::ALL {
                    let entry: f64 = Permutation2::ALL
                        .iter()
                        .map(|&u| gram(s, u) * weingarten_d2(d, u.compose(t)).unwrap())
                        .sum();
                    let expected = if s == t { 1.0 } else { 0.0 };
                    assert!((entry - expected).abs() < 1e-13, "d={d}");
                }
            }
        }
    }

    #[test]
    fn degree2_moments_known_values() {
        let d = 4;
        let df = d as f64;
        let m = |i, j, k, l| degree2_moment(d, i, j, k, l).unwrap();
        assert!((m([0, 0], [0, 0], [0, 0], [0, 0]) - 2.0 / (df * (df + 1.0))).abs() < 1e-15);
        assert!((m([0, 1], [0, 1], [0, 1], [0, 1]) - 1.0 / (df * df - 1.0)).abs() < 1e-15);
        assert!((m([0, 1], [0, 1], [0, 1], [1, 0]) + 1.0 / (df * (df * df - 1.0))).abs() < 1e-15);
        assert_eq!(m([0, 1], [0, 1], [0, 2], [0, 1]), 0.0);
    }

    #[test]
    fn vacuum_moments_are_forced_values() {
        for (n, m) in [(2, 1), (3, 2), (8, 5), (64, 1)] {
            let c = config(n, m, ZProfile::Vacuum);
            let z = SqueezingSpec::vacuum(2 * n);
            let mf = m as f64;
            assert!((analytic_first_moment(&z, &c).unwrap() - mf).abs() < 1e-12);
            assert!((analytic_second_moment(&z, &c).unwrap() - mf / 2.0).abs() < 1e-12);
            let omega = analytic_omega_second_moment(&z, &c, OmegaCoefficient::Derived).unwrap();
            assert!((omega + mf / 2.0).abs() < 1e-12);
            assert!(analytic_mean_stat_t(&z, &c).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn printed_coefficient_misses_vacuum() {
        let c = config(2, 1, ZProfile::Vacuum);
        let z = SqueezingSpec::vacuum(4);
        let printed = analytic_omega_second_moment(&z, &c, OmegaCoefficient::AsPrinted).unwrap();
        assert!((printed + 13.0 / 30.0).abs() < 1e-14);
    }

    #[test]
    fn uniform_first_moment() {
        let c = config(5, 2, ZProfile::Uniform(1.2));
        let z = SqueezingSpec::new(vec![1.2; 10], None).unwrap();
        let expected = 1.44 + 1.0 / 1.44;
        assert!((analytic_first_moment(&z, &c).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn stable_mean_t_matches_difference() {
        let c = config(3, 2, ZProfile::Uniform(1.0));
        let z = SqueezingSpec::new(vec![1.3, 1.0, 2.0, 1.1, 1.7, 1.0], None).unwrap();
        let nu = nu_th(&z);
        let direct = analytic_second_moment(&z, &c).unwrap() - 2.0 * nu * analytic_first_moment(&z, &c).unwrap()
            + 2.0 * c.m_sys as f64 * nu * nu;
        assert!((direct - analytic_mean_stat_t(&z, &c).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn dimension_checks() {
        let c = config(3, 1, ZProfile::Vacuum);
        assert!(matches!(
            analytic_first_moment(&SqueezingSpec::vacuum(3), &c),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mc_vacuum_is_exact() {
        let c = config(4, 2, ZProfile::Vacuum);
        let r = mc_moment(MomentQuantity::TraceGamma, &c, 10).unwrap();
        assert_eq!((r.estimate, r.std_error, r.z_ratio), (2.0, 0.0, 0.0));
        let r = mc_moment(MomentQuantity::TraceGammaSquared, &c, 10).unwrap();
        assert_eq!((r.estimate, r.std_error, r.z_ratio), (1.0, 0.0, 0.0));
        assert_eq!(r.n_samples, 10);
        let r = mc_moment(MomentQuantity::TraceOmegaGammaSquared, &c, 10).unwrap();
        assert_eq!(r.estimate, -1.0);
    }

    #[test]
    fn mc_rejects_bad_requests() {
        let c = config(4, 1, ZProfile::Uniform(1.2));
        assert!(mc_moment(MomentQuantity::TraceGamma, &c, 1).is_err());
        let c = config(4, 1, ZProfile::Flat(5.0));
        assert!(mc_moment(MomentQuantity::TraceGamma, &c, 10).is_err());
    }

    #[test]
    fn quantity_names_round_trip() {
        for q in MomentQuantity::ALL {
            assert_eq!(q.name().parse::<MomentQuantity>().unwrap(), q);
        }
    }
}
