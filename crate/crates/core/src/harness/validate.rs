use std::path::Path;

use rand_chacha::ChaCha8Rng;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::phase_space::{
    extractable_work, orthogonality_residual, parse_covariance_text, partial_trace, purify,
    symplectic_residual, symplectic_spectrum, symplectic_spectrum_from_omega_gamma, symplectic_trace,
    williamson, CovarianceMatrix,
};
use crate::sampling::{
    derived_seed, embed_unitary, haar_unitary, nearby_unitary, random_physical_covariance, random_symplectic,
    sample_with_spec, stream_rng, unitarity_residual, Pipeline, RandomStateConfig, SqueezingSpec, ZProfile,
};
use crate::typicality::{evaluate_record, lipschitz_witness_frak_t, lipschitz_witness_t};

pub const DEFAULT_VALIDATION_SIZES: [usize; 6] = [1, 2, 3, 4, 6, 8];
const DRAWS_PER_SIZE: usize = 20;
const LIPSCHITZ_PAIRS: usize = 1000;
const BOUND_SAMPLES: u64 = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed value of the checked quantity (residual, ratio, ...).
    pub worst: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{tag} {} worst={:e}", c.name, c.worst));
            if !c.detail.is_empty() {
                out.push(' ');
                out.push_str(&c.detail);
            }
            out.push('\n');
        }
        out
    }

    pub fn into_result(self) -> Result<Self> {
        match self.first_failure() {
            Some(c) => Err(Error::InvariantViolated(format!("{}: {}", c.name, c.detail))),
            None => Ok(self),
        }
    }
}

/// Tracks the worst value of a quantity against a threshold.
struct Check {
    name: &'static str,
    limit: f64,
    worst: f64,
    detail: String,
}

impl Check {
    fn new(name: &'static str, limit: f64) -> Self {
        Self {
            name,
            limit,
            worst: f64::NEG_INFINITY,
            detail: String::new(),
        }
    }

    fn observe(&mut self, value: f64, context: impl FnOnce() -> String) {
        if self.worst.is_nan() {
            return;
        }
        if !(value <= self.worst) {
            self.worst = value;
            if !(value <= self.limit) {
                self.detail = format!("{} (limit {:e})", context(), self.limit);
            }
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name,
            passed: self.worst <= self.limit,
            worst: self.worst,
            detail: self.detail,
        }
    }
}

fn rng_for(seed: u64, tag: u64, size: usize) -> ChaCha8Rng {
    stream_rng(derived_seed(seed, tag), size as u64)
}

fn fail(name: &'static str, e: Error) -> CheckResult {
    CheckResult {
        name,
        passed: false,
        worst: f64::INFINITY,
        detail: e.to_string(),
    }
}

fn passive_checks(seed: u64, sizes: &[usize]) -> Result<Vec<CheckResult>> {
    let mut unitary = Check::new("haar_unitarity", 1e-10);
    let mut orth = Check::new("passive_orthogonality", 1e-10);
    let mut sympl = Check::new("passive_symplecticity", 1e-10);
    let mut squeezed = Check::new("random_symplecticity", 1e-10);
    for &k in sizes {
        let mut rng = rng_for(seed, 1, k);
        for _ in 0..DRAWS_PER_SIZE {
            let u = haar_unitary(k, &mut rng)?;
            unitary.observe(unitarity_residual(&u), || format!("d = {k}"));
            let o = match embed_unitary(&u) {
                Ok(o) => o,
                Err(e) => return Ok(vec![fail("passive_symplecticity", e)]),
            };
            orth.observe(orthogonality_residual(o.entries()), || format!("n = {k}"));
            sympl.observe(symplectic_residual(o.entries()), || format!("n = {k}"));
            let s = random_symplectic(k, 2.0, &mut rng)?;
            squeezed.observe(s.residual(), || format!("n = {k}"));
        }
    }
    Ok(vec![unitary.finish(), orth.finish(), sympl.finish(), squeezed.finish()])
}

fn spectrum_checks(seed: u64, sizes: &[usize]) -> Result<Vec<CheckResult>> {
    let mut cross = Check::new("eigensolver_cross_check", 1e-9);
    let mut recon = Check::new("williamson_reconstruction", 1e-8);
    let mut invariance = Check::new("symplectic_trace_invariance", 1e-8);
    let mut nullity = Check::new("thermal_nullity", 1e-10);
    for &k in sizes {
        let mut rng = rng_for(seed, 2, k);
        for _ in 0..DRAWS_PER_SIZE {
            let g = random_physical_covariance(k, 3.0, 2.0, &mut rng)?;
            let a = symplectic_spectrum(g.entries())?;
            let b = symplectic_spectrum_from_omega_gamma(g.entries())?;
            let scale = a[0].max(1.0);
            let diff = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            cross.observe(diff / scale, || format!("n = {k}"));

            let w = williamson(&g)?;
            let s = w.symplectic_factor.as_ref().expect("factor requested").entries();
            let rebuilt = s * w.normal_form() * s.transpose();
            let norm = g.entries().norm();
            recon.observe((rebuilt - g.entries()).norm() / norm, || format!("n = {k}"));

            let moved = random_symplectic(k, 2.0, &mut rng)?.act(&g)?;
            let str0 = symplectic_trace(&g)?;
            let str1 = symplectic_trace(&moved)?;
            invariance.observe((str0 - str1).abs() / str0, || format!("n = {k}"));

            let nu = a[0];
            nullity.observe(extractable_work(&CovarianceMatrix::thermal(k, nu))?.abs(), || {
                format!("n = {k}, nu = {nu}")
            });
        }
    }
    Ok(vec![cross.finish(), recon.finish(), invariance.finish(), nullity.finish()])
}

fn purification_checks(seed: u64, sizes: &[usize]) -> Result<Vec<CheckResult>> {
    let mut round_trip = Check::new("purification_round_trip", 1e-10);
    let mut purity = Check::new("purification_purity", 1e-8);
    let mut energy = Check::new("purification_energy", 1e-9);
    for &k in sizes {
        let mut rng = rng_for(seed, 3, k);
        for _ in 0..DRAWS_PER_SIZE {
            let g = random_physical_covariance(k, 3.0, 2.0, &mut rng)?;
            let p = purify(&g)?;
            let back = partial_trace(&p, k)?;
            round_trip.observe((back.entries() - g.entries()).abs().max(), || format!("m = {k}"));
            let nus = symplectic_spectrum(p.entries())?;
            let dev = nus.iter().map(|nu| (nu - 0.5).abs()).fold(0.0, f64::max);
            purity.observe(dev, || format!("m = {k}"));
            energy.observe(p.trace() - 2.0 * g.trace(), || format!("m = {k}"));
        }
    }
    Ok(vec![round_trip.finish(), purity.finish(), energy.finish()])
}

fn lipschitz_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut t = Check::new("lipschitz_T", 1.0);
    let mut ft = Check::new("lipschitz_frakT", 1.0);
    let n = 8;
    let config = RandomStateConfig::new(n, 2, Pipeline::Purified, ZProfile::Uniform(1.5), seed)?;
    let d = config.ambient_modes();
    let z = SqueezingSpec::new(vec![1.5; d], None)?;
    let mut rng = rng_for(seed, 4, n);
    for i in 0..LIPSCHITZ_PAIRS {
        let u = haar_unitary(d, &mut rng)?;
        // half independent pairs, half close pairs
        let v = if i % 2 == 0 {
            haar_unitary(d, &mut rng)?
        } else {
            nearby_unitary(&u, 1e-3, &mut rng)?
        };
        let w = lipschitz_witness_t(&u, &v, &z, &config)?;
        t.observe(w.lhs / w.rhs, || format!("pair {i}: {} > {}", w.lhs, w.rhs));
        let w = lipschitz_witness_frak_t(&u, &v, &z, &config)?;
        ft.observe(w.lhs / w.rhs, || format!("pair {i}: {} > {}", w.lhs, w.rhs));
    }
    Ok(vec![t.finish(), ft.finish()])
}

fn bound_chain_check(seed: u64, sizes: &[usize]) -> Result<CheckResult> {
    let mut slack = Check::new("work_bound_chain", 1e-9);
    for &k in sizes {
        for m in 1..=k.min(2) {
            let config = RandomStateConfig::new(k, m, Pipeline::Purified, ZProfile::Uniform(2.5), seed)?;
            for i in 0..BOUND_SAMPLES {
                let s = sample_with_spec(&config, i)?;
                let r = evaluate_record(i, &s.gamma_m, &s.squeezing, &config)?;
                slack.observe(r.work - r.work_bound(), || format!("n = {k}, m = {m}, sample {i}"));
            }
        }
    }
    Ok(slack.finish())
}

/// Runs every invariant suite. Sizes are mode counts; `sizes` defaults to
/// [`DEFAULT_VALIDATION_SIZES`].
pub fn run_validation_suite(seed: u64, sizes: &[usize]) -> Result<ValidationReport> {
    let mut checks = passive_checks(seed, sizes)?;
    checks.extend(spectrum_checks(seed, sizes)?);
    checks.extend(purification_checks(seed, sizes)?);
    checks.extend(lipschitz_checks(seed)?);
    checks.push(bound_chain_check(seed, sizes)?);
    Ok(ValidationReport { checks })
}

/// Validates a covariance file. Parse problems are input errors; a matrix
/// that parses but breaks an invariant is a validation failure.
pub fn validate_covariance_file(path: &Path) -> Result<ValidationReport> {
    let text = std::fs::read_to_string(path)?;
    let m = parse_covariance_text(&text)?;
    let name = "covariance_file";
    let check = match CovarianceMatrix::new(m) {
        Ok(g) => CheckResult {
            name,
            passed: true,
            worst: 0.0,
            detail: format!("{} modes, symmetric, positive definite, physical", g.n_modes()),
        },
        Err(e @ (Error::NotSymmetric { .. } | Error::NonPositiveDefinite { .. } | Error::NotPhysical { .. })) => {
            CheckResult {
                name,
                passed: false,
                worst: f64::INFINITY,
                detail: e.to_string(),
            }
        }
        Err(e) => return Err(e),
    };
    Ok(ValidationReport { checks: vec![check] })
}

pub fn cmd_validate(config: &ExperimentConfig) -> Result<ValidationReport> {
    config.validate()?;
    match &config.input {
        Some(path) => validate_covariance_file(path),
        None => {
            let sizes = config
                .n_grid
                .clone()
                .unwrap_or_else(|| DEFAULT_VALIDATION_SIZES.to_vec());
            run_validation_suite(config.seed, &sizes)
        }
    }
}
