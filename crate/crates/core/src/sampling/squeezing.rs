//! Squeezing vectors `z` and the diagonal matrix `J~(z) = diag(z^2) ⊕ diag(z^-2)`.

use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};

/// Upper bound on rejection draws for the flat energy-ball measure.
pub const MAX_REJECTION_ATTEMPTS: u64 = 2_000_000;

/// Single-mode squeezings `z_i >= 1`, with the energy bound they were drawn
/// under (if any).
#[derive(Clone, Debug, PartialEq)]
pub struct SqueezingSpec {
    z: Vec<f64>,
    energy_bound: Option<f64>,
}

impl SqueezingSpec {
    /// Checks `z_i >= 1` and, when `energy_bound` is given, membership of the
    /// energy ball `sum(z_i^2 + z_i^-2) <= 4E`.
    pub fn new(z: Vec<f64>, energy_bound: Option<f64>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(bad) = z.iter().find(|x| !(x.is_finite() && **x >= 1.0)) {
            return Err(Error::InvalidConfig(format!("squeezing values must be >= 1, got {bad}")));
        }
        let spec = Self { z, energy_bound };
        if let Some(e) = energy_bound {
            if spec.ball_sum() > 4.0 * e {
                return Err(Error::InvalidConfig(format!(
                    "squeezing vector leaves the energy ball: {} > 4E = {}",
                    spec.ball_sum(),
                    4.0 * e
                )));
            }
        }
        Ok(spec)
    }

    pub fn vacuum(n: usize) -> Self {
        Self {
            z: vec![1.0; n],
            energy_bound: None,
        }
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn energy_bound(&self) -> Option<f64> {
        self.energy_bound
    }

    /// `sum(z_i^2 + z_i^-2) = Tr J~(z)`.
    pub fn ball_sum(&self) -> f64 {
        self.z.iter().map(|z| z * z + 1.0 / (z * z)).sum()
    }

    pub fn is_vacuum(&self) -> bool {
        self.z.iter().all(|&z| z == 1.0)
    }

    /// Diagonal of `J~(z)`: `(z_1^2, .., z_n^2, z_1^-2, .., z_n^-2)`.
    pub fn j_tilde_diagonal(&self) -> Vec<f64> {
        let sq = self.z.iter().map(|z| z * z);
        let inv = self.z.iter().map(|z| 1.0 / (z * z));
        sq.chain(inv).collect()
    }

    /// `‖J~(z)‖_∞ = max z_i^2`.
    pub fn j_tilde_norm_inf(&self) -> f64 {
        self.z.iter().map(|z| z * z).fold(1.0, f64::max)
    }
}

/// `J~(z)` as a dense diagonal matrix.
pub fn build_j_tilde(spec: &SqueezingSpec) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_vec(spec.j_tilde_diagonal()))
}

/// Family of squeezing vectors, parameterized by the mode count.
#[derive(Clone, Debug, PartialEq)]
pub enum ZProfile {
    /// All `z_i = 1`.
    Vacuum,
    /// All `z_i = z0`.
    Uniform(f64),
    /// `ceil(n/4)` modes at `n^(beta/2)`, the rest at 1, so that
    /// `‖J~‖_∞ = n^beta`.
    Power(f64),
    /// Flat Lebesgue measure on the energy ball with bound `E`.
    Flat(f64),
    /// Explicit values read from a file (one per line).
    File { path: String, values: Vec<f64> },
}

impl ZProfile {
    /// Parses `vacuum | uniform:<z0> | power:<beta> | flat:<E> | file:<path>`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let number = |a: Option<&str>| -> Result<f64> {
            let a = a.ok_or_else(|| Error::InvalidConfig(format!("z profile {s:?} needs a value")))?;
            a.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::InvalidConfig(format!("bad number in z profile {s:?}")))
        };
        let profile = match kind {
            "vacuum" if arg.is_none() => ZProfile::Vacuum,
            "uniform" => ZProfile::Uniform(number(arg)?),
            "power" => ZProfile::Power(number(arg)?),
            "flat" => ZProfile::Flat(number(arg)?),
            "file" => {
                let path = arg
                    .filter(|p| !p.is_empty())
                    .ok_or_else(|| Error::InvalidConfig("file profile needs a path".into()))?;
                let values = read_z_file(Path::new(path))?;
                ZProfile::File {
                    path: path.to_string(),
                    values,
                }
            }
            _ => return Err(Error::InvalidConfig(format!("unknown z profile {s:?}"))),
        };
        profile.validate()?;
        Ok(profile)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ZProfile::Uniform(z0) if z0 < 1.0 => {
                Err(Error::InvalidConfig(format!("uniform z0 must be >= 1, got {z0}")))
            }
            ZProfile::Power(beta) if beta < 0.0 => {
                Err(Error::InvalidConfig(format!("power beta must be >= 0, got {beta}")))
            }
            ZProfile::Flat(e) if e <= 0.0 => {
                Err(Error::InvalidConfig(format!("energy bound must be positive, got {e}")))
            }
            _ => Ok(()),
        }
    }

    /// Whether `z` depends on the random stream.
    pub fn is_random(&self) -> bool {
        matches!(self, ZProfile::Flat(_))
    }

    /// Nominal polynomial degree `beta`: the profile parameter for `power`,
    /// zero for every other profile.
    pub fn beta(&self) -> f64 {
        match *self {
            ZProfile::Power(beta) => beta,
            _ => 0.0,
        }
    }
}

impl fmt::Display for ZProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZProfile::Vacuum => write!(f, "vacuum"),
            ZProfile::Uniform(z0) => write!(f, "uniform:{z0}"),
            ZProfile::Power(beta) => write!(f, "power:{beta}"),
            ZProfile::Flat(e) => write!(f, "flat:{e}"),
            ZProfile::File { path, .. } => write!(f, "file:{path}"),
        }
    }
}

fn read_z_file(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let values = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.parse::<f64>()
                .map_err(|_| Error::Parse(format!("{}: bad z value {l:?}", path.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::Parse(format!("{}: no z values", path.display())));
    }
    Ok(values)
}

/// Largest admissible single squeezing: root of `z^2 + z^-2 = 4E`.
pub fn flat_z_max(energy: f64) -> f64 {
    let e2 = 2.0 * energy;
    (e2 + (e2 * e2 - 1.0).max(0.0).sqrt()).sqrt()
}

/// Draws (or constructs) a squeezing vector of length `n` for `profile`.
///
/// Only the flat profile consumes randomness: each `z_i` is uniform on the
/// box `[1, z_max]` and the vector is kept iff it lies in the energy ball.
/// The box uses the per-coordinate bound left after the other `n - 1`
/// coordinates sit at 1, which contains the ball and gives the same flat
/// measure with fewer rejections.
pub fn sample_squeezing<R: Rng + ?Sized>(profile: &ZProfile, n: usize, rng: &mut R) -> Result<SqueezingSpec> {
    if n == 0 {
        return Err(Error::BadModeCount {
            requested: 0,
            available: 0,
        });
    }
    match profile {
        ZProfile::Vacuum => Ok(SqueezingSpec::vacuum(n)),
        ZProfile::Uniform(z0) => SqueezingSpec::new(vec![*z0; n], None),
        ZProfile::Power(beta) => {
            let big = (n as f64).powf(beta / 2.0);
            let count = n.div_ceil(4);
            let z = (0..n).map(|i| if i < count { big } else { 1.0 }).collect();
            SqueezingSpec::new(z, None)
        }
        ZProfile::File { values, path } => {
            if values.len() != n {
                return Err(Error::InvalidConfig(format!(
                    "{path}: {} z values but the state has {n} modes",
                    values.len()
                )));
            }
            SqueezingSpec::new(values.clone(), None)
        }
        ZProfile::Flat(energy) => {
            let four_e = 4.0 * energy;
            let two_n = 2.0 * n as f64;
            if four_e < two_n {
                return Err(Error::EmptyConstraintSet { four_e, two_n });
            }
            let spare = (four_e - two_n + 2.0) / 4.0;
            let z_max = flat_z_max(spare);
            let mut z = vec![1.0; n];
            for _ in 0..MAX_REJECTION_ATTEMPTS {
                let mut total = 0.0;
                let mut inside = true;
                for zi in z.iter_mut() {
                    *zi = if z_max > 1.0 { rng.random_range(1.0..=z_max) } else { 1.0 };
                    total += *zi * *zi + 1.0 / (*zi * *zi);
                    if total > four_e {
                        inside = false;
                        break;
                    }
                }
                if inside {
                    return SqueezingSpec::new(z, Some(*energy));
                }
            }
            Err(Error::RejectionTimeout {
                attempts: MAX_REJECTION_ATTEMPTS,
            })
        }
    }
}
