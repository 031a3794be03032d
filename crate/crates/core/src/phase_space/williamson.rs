use nalgebra::linalg::{Schur, SymmetricEigen};
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{max_asymmetry, symmetrize, symplectic_form, CovarianceMatrix, SymplecticMatrix};
use crate::error::{Error, Result};

const EIG_EPS: f64 = f64::EPSILON;
const EIG_MAX_ITER: usize = 10_000;

/// Symplectic spectrum, optionally with the diagonalizing symplectic matrix.
#[derive(Clone, Debug)]
pub struct WilliamsonResult {
    /// `nu_1 >= nu_2 >= ... >= nu_n > 0`.
    pub nus: Vec<f64>,
    /// `S` with `Gamma = S D S^T`, `D = diag(nus) ⊕ diag(nus)`.
    pub symplectic_factor: Option<SymplecticMatrix>,
}

impl WilliamsonResult {
    /// `D = diag(nus) ⊕ diag(nus)`.
    pub fn normal_form(&self) -> DMatrix<f64> {
        let n = self.nus.len();
        DMatrix::from_fn(2 * n, 2 * n, |i, j| if i == j { self.nus[i % n] } else { 0.0 })
    }
}

/// `Gamma^{1/2}` through a symmetric eigendecomposition; rejects matrices
/// with a nonpositive eigenvalue.
fn sqrt_positive_definite(gamma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::try_new(symmetrize(gamma), EIG_EPS, EIG_MAX_ITER)
        .ok_or_else(|| Error::NumericalFailure("symmetric eigensolver did not converge".into()))?;
    let min_eigenvalue = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_eigenvalue > 0.0) {
        return Err(Error::NonPositiveDefinite { min_eigenvalue });
    }
    let roots = eig.eigenvalues.map(f64::sqrt);
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose())
}

/// The Hermitian matrix `i Gamma^{1/2} Omega Gamma^{1/2}`, whose spectrum is
/// `{±nu_k}`.
fn hermitian_kernel(sqrt_gamma: &DMatrix<f64>) -> DMatrix<Complex64> {
    let omega = symplectic_form(sqrt_gamma.nrows() / 2);
    let k = sqrt_gamma * omega * sqrt_gamma;
    // exact antisymmetrization so that i*K is exactly Hermitian
    let k = (&k - k.transpose()) * 0.5;
    k.map(|x| Complex64::new(0.0, x))
}

fn check_shape(gamma: &DMatrix<f64>) -> Result<usize> {
    let (rows, cols) = gamma.shape();
    if rows != cols || rows == 0 || rows % 2 != 0 {
        return Err(Error::BadShape { rows, cols });
    }
    Ok(rows / 2)
}

/// Symplectic eigenvalues of a symmetric positive-definite matrix, sorted
/// descending. Does not require physicality.
pub fn symplectic_spectrum(gamma: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = check_shape(gamma)?;
    let root = sqrt_positive_definite(gamma)?;
    let h = hermitian_kernel(&root);
    let eig = SymmetricEigen::try_new(h, EIG_EPS, EIG_MAX_ITER)
        .ok_or_else(|| Error::NumericalFailure("hermitian eigensolver did not converge".into()))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values.truncate(n);
    if values.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::NumericalFailure(
            "symplectic spectrum is not split into ±nu pairs".into(),
        ));
    }
    Ok(values)
}

/// Independent route: moduli of the imaginary parts of the eigenvalues of the
/// non-normal matrix `Omega Gamma`, via a real Schur form.
pub fn symplectic_spectrum_from_omega_gamma(gamma: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = check_shape(gamma)?;
    let m = symplectic_form(n) * gamma;
    let schur = Schur::try_new(m, EIG_EPS, EIG_MAX_ITER)
        .ok_or_else(|| Error::NumericalFailure("Schur decomposition did not converge".into()))?;
    let mut values: Vec<f64> = schur.complex_eigenvalues().iter().map(|c| c.im.abs()).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    // each nu appears twice (as +i nu and -i nu)
    Ok(values.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect())
}

/// Symplectic eigenvalues of a covariance matrix (no factor).
pub fn symplectic_eigenvalues(gamma: &CovarianceMatrix) -> Result<WilliamsonResult> {
    Ok(WilliamsonResult {
        nus: symplectic_spectrum(gamma.entries())?,
        symplectic_factor: None,
    })
}

/// Full Williamson decomposition `Gamma = S D S^T`.
///
/// With `K = Gamma^{1/2} Omega Gamma^{1/2}` and a unit eigenvector `v = a + i b`
/// of `iK` for `+nu_k`, the real vectors `e_k = sqrt(2) b` and `f_k = sqrt(2) a`
/// satisfy `K f_k = nu_k e_k`, `K e_k = -nu_k f_k` and are orthonormal across all
/// `k`, also inside degenerate eigenspaces. Stacking them as the `q_k` and `p_k`
/// columns of an orthogonal `Q` gives `Q^T K Q = D Omega` and therefore
/// `S = Gamma^{1/2} Q D^{-1/2}`.
///
/// Each eigenvector phase is chosen so that `Q` is as close to the identity as
/// possible on the mode carrying most of its weight; a Williamson-diagonal
/// input then returns `S = I`.
pub fn williamson(gamma: &CovarianceMatrix) -> Result<WilliamsonResult> {
    let g = gamma.entries();
    let n = check_shape(g)?;
    if max_asymmetry(g) > super::TOL_SYMMETRY {
        return Err(Error::NotSymmetric {
            max_asymmetry: max_asymmetry(g),
        });
    }
    let root = sqrt_positive_definite(g)?;
    let h = hermitian_kernel(&root);
    let eig = SymmetricEigen::try_new(h, EIG_EPS, EIG_MAX_ITER)
        .ok_or_else(|| Error::NumericalFailure("hermitian eigensolver did not converge".into()))?;

    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    order.truncate(n);

    let mut nus = Vec::with_capacity(n);
    let mut q = DMatrix::<f64>::zeros(2 * n, 2 * n);
    let sqrt2 = std::f64::consts::SQRT_2;
    for (k, &col) in order.iter().enumerate() {
        let nu = eig.eigenvalues[col];
        if !(nu > 0.0) {
            return Err(Error::NumericalFailure(
                "symplectic spectrum is not split into ±nu pairs".into(),
            ));
        }
        nus.push(nu);
        let mut v = eig.eigenvectors.column(col).into_owned();

        let home = (0..n)
            .max_by(|&i, &j| {
                let wi = v[i].norm_sqr() + v[n + i].norm_sqr();
                let wj = v[j].norm_sqr() + v[n + j].norm_sqr();
                wi.total_cmp(&wj)
            })
            .unwrap_or(0);
        let w = v[n + home] - Complex64::i() * v[home];
        if w.norm() > 1e-12 {
            let phase = w.conj() / w.norm();
            v *= phase;
        }

        for r in 0..2 * n {
            q[(r, k)] = sqrt2 * v[r].im;
            q[(r, n + k)] = sqrt2 * v[r].re;
        }
    }

    let inv_sqrt_d = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i == j {
            1.0 / nus[i % n].sqrt()
        } else {
            0.0
        }
    });
    let s = root * q * inv_sqrt_d;
    Ok(WilliamsonResult {
        nus,
        symplectic_factor: Some(SymplecticMatrix::from_trusted(s)),
    })
}
