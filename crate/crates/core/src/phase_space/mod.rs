//! Covariance-matrix algebra for zero-mean Gaussian states.
//!
//! Every matrix in this crate uses the quadrature ordering
//! `(q_1, ..., q_n, p_1, ..., p_n)`, under which the symplectic form is
//! `Omega = [[0, I_n], [-I_n, 0]]`. The vacuum has covariance `I / 2`.

mod format;
mod purify;
mod williamson;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use format::{parse_covariance_text, write_covariance_text};
pub use purify::purify;
pub use williamson::{
    symplectic_eigenvalues, symplectic_spectrum, symplectic_spectrum_from_omega_gamma, williamson,
    WilliamsonResult,
};

/// Max absolute asymmetry accepted for a covariance matrix.
pub const TOL_SYMMETRY: f64 = 1e-10;
/// Max entrywise residual of `S Omega S^T - Omega` (and `S^T S - I`).
pub const TOL_SYMPLECTIC: f64 = 1e-10;
/// Slack on the uncertainty relation `nu_k >= 1/2`.
pub const TOL_PHYSICAL: f64 = 1e-9;

/// `Omega = [[0, I_n], [-I_n, 0]]`.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(k, n_modes + k)] = 1.0;
        omega[(n_modes + k, k)] = -1.0;
    }
    omega
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub(crate) fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn modes_of(m: &DMatrix<f64>) -> Result<usize> {
    let (rows, cols) = m.shape();
    if rows != cols || rows == 0 || rows % 2 != 0 {
        return Err(Error::BadShape { rows, cols });
    }
    Ok(rows / 2)
}

/// Symmetry check against [`TOL_SYMMETRY`].
pub fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let max_asymmetry = max_asymmetry(m);
    if max_asymmetry > TOL_SYMMETRY || !max_asymmetry.is_finite() {
        return Err(Error::NotSymmetric { max_asymmetry });
    }
    Ok(())
}

/// Second-moment matrix of a zero-mean Gaussian state.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    n_modes: usize,
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validates shape, symmetry, positive definiteness and the uncertainty
    /// relation before accepting `entries`.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n_modes = modes_of(&entries)?;
        check_symmetric(&entries)?;
        let nus = symplectic_spectrum(&entries)?;
        let min_nu = nus.iter().copied().fold(f64::INFINITY, f64::min);
        if min_nu < 0.5 - TOL_PHYSICAL {
            return Err(Error::NotPhysical { min_nu });
        }
        Ok(Self { n_modes, entries })
    }

    /// Wraps a matrix that is physical by construction (sampled states,
    /// principal submatrices, congruences by symplectic matrices).
    pub(crate) fn from_trusted(entries: DMatrix<f64>) -> Self {
        debug_assert!(entries.nrows() == entries.ncols() && entries.nrows() % 2 == 0);
        Self {
            n_modes: entries.nrows() / 2,
            entries,
        }
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self::thermal(n_modes, 0.5)
    }

    /// `nu * I_{2n}`; physical for `nu >= 1/2`.
    pub fn thermal(n_modes: usize, nu: f64) -> Self {
        Self::from_trusted(DMatrix::identity(2 * n_modes, 2 * n_modes) * nu)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }
}

/// Real `2n x 2n` matrix with `S Omega S^T = Omega`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMatrix {
    n_modes: usize,
    entries: DMatrix<f64>,
}

impl SymplecticMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n_modes = modes_of(&entries)?;
        let residual = symplectic_residual(&entries);
        if residual > TOL_SYMPLECTIC || !residual.is_finite() {
            return Err(Error::NotSymplectic { residual });
        }
        Ok(Self { n_modes, entries })
    }

    pub(crate) fn from_trusted(entries: DMatrix<f64>) -> Self {
        Self {
            n_modes: entries.nrows() / 2,
            entries,
        }
    }

    pub fn identity(n_modes: usize) -> Self {
        Self::from_trusted(DMatrix::identity(2 * n_modes, 2 * n_modes))
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// `max |S Omega S^T - Omega|`.
    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.entries)
    }

    /// Phase-space action `Gamma -> S Gamma S^T`.
    pub fn act(&self, gamma: &CovarianceMatrix) -> Result<CovarianceMatrix> {
        if gamma.n_modes() != self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                actual: gamma.n_modes(),
            });
        }
        let out = &self.entries * gamma.entries() * self.entries.transpose();
        Ok(CovarianceMatrix::from_trusted(symmetrize(&out)))
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        Self::from_trusted(&self.entries * &other.entries)
    }
}

pub fn symplectic_residual(s: &DMatrix<f64>) -> f64 {
    let omega = symplectic_form(s.nrows() / 2);
    max_abs(&(s * &omega * s.transpose() - &omega))
}

pub fn orthogonality_residual(s: &DMatrix<f64>) -> f64 {
    let n = s.nrows();
    max_abs(&(s.transpose() * s - DMatrix::<f64>::identity(n, n)))
}

/// Element of `Sp(2n, R) ∩ O(2n)`: the phase-space action of a passive
/// (energy-conserving) Gaussian unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalSymplectic(SymplecticMatrix);

impl OrthogonalSymplectic {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let residual = orthogonality_residual(&entries);
        if residual > TOL_SYMPLECTIC || !residual.is_finite() {
            return Err(Error::NotOrthogonal { residual });
        }
        Ok(Self(SymplecticMatrix::new(entries)?))
    }

    pub fn as_symplectic(&self) -> &SymplecticMatrix {
        &self.0
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        self.0.entries()
    }

    pub fn n_modes(&self) -> usize {
        self.0.n_modes()
    }
}

/// Mean energy `Tr[Gamma] / 2` of a zero-mean state.
pub fn energy(gamma: &CovarianceMatrix) -> f64 {
    0.5 * gamma.trace()
}

/// `2 * sum_k nu_k`: the symplectic eigenvalues counted with the doubled
/// multiplicity they have in the spectrum of `|i Omega Gamma|`.
pub fn symplectic_trace(gamma: &CovarianceMatrix) -> Result<f64> {
    let nus = symplectic_spectrum(gamma.entries())?;
    Ok(2.0 * nus.iter().sum::<f64>())
}

/// Gaussian extractable work `Tr[Gamma]/2 - sum_k nu_k`.
///
/// Not clamped: round-off can leave a value of order `-1e-15` for passive
/// states. Clamp only when reporting.
pub fn extractable_work(gamma: &CovarianceMatrix) -> Result<f64> {
    let nus = symplectic_spectrum(gamma.entries())?;
    Ok(energy(gamma) - nus.iter().sum::<f64>())
}

/// Reduced state on the first `keep_modes` modes: rows and columns
/// `{0..m} ∪ {n..n+m}`.
pub fn partial_trace(gamma: &CovarianceMatrix, keep_modes: usize) -> Result<CovarianceMatrix> {
    let n = gamma.n_modes();
    if keep_modes == 0 || keep_modes > n {
        return Err(Error::BadModeCount {
            requested: keep_modes,
            available: n,
        });
    }
    let idx: Vec<usize> = (0..keep_modes).chain(n..n + keep_modes).collect();
    let sub = gamma.entries().select_rows(&idx).select_columns(&idx);
    Ok(CovarianceMatrix::from_trusted(sub))
}

/// Single-mode squeezer `diag(z, 1/z)` acting on `target_mode`.
pub fn single_mode_squeezer(z: f64, n_modes: usize, target_mode: usize) -> Result<SymplecticMatrix> {
    if target_mode >= n_modes {
        return Err(Error::BadModeCount {
            requested: target_mode + 1,
            available: n_modes,
        });
    }
    if !(z.is_finite() && z >= 1.0) {
        return Err(Error::InvalidConfig(format!("squeezing z must be >= 1, got {z}")));
    }
    let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
    s[(target_mode, target_mode)] = z;
    s[(n_modes + target_mode, n_modes + target_mode)] = 1.0 / z;
    Ok(SymplecticMatrix::from_trusted(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(v))
    }

    #[test]
    fn omega_conventions() {
        let o1 = symplectic_form(1);
        assert_eq!(o1, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));

        let o2 = symplectic_form(2);
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(4, 4, &[
             0.0,  0.0, 1.0, 0.0,
             0.0,  0.0, 0.0, 1.0,
            -1.0,  0.0, 0.0, 0.0,
             0.0, -1.0, 0.0, 0.0,
        ]);
        assert_eq!(o2, expected);

        let o3 = symplectic_form(3);
        assert_eq!(&o3 * o3.transpose(), DMatrix::identity(6, 6));
        assert_eq!(&o3 * &o3, -DMatrix::<f64>::identity(6, 6));
        assert_eq!(o3.transpose(), -&o3);
    }

    #[test]
    fn energy_values() {
        assert_eq!(energy(&CovarianceMatrix::vacuum(1)), 0.5);
        assert_eq!(energy(&CovarianceMatrix::thermal(1, 1.5)), 1.5);
        let sq = CovarianceMatrix::new(diag(&[2.0, 0.125])).unwrap();
        assert!(close(energy(&sq), 1.0625, 1e-15));
    }

    #[test]
    fn symplectic_trace_values() {
        assert!(close(symplectic_trace(&CovarianceMatrix::vacuum(1)).unwrap(), 1.0, 1e-12));
        assert!(close(
            symplectic_trace(&CovarianceMatrix::thermal(2, 1.5)).unwrap(),
            6.0,
            1e-12
        ));
        let g = CovarianceMatrix::new(diag(&[2.0, 0.5])).unwrap();
        assert!(close(symplectic_trace(&g).unwrap(), 2.0, 1e-12));
    }

    #[test]
    fn work_values() {
        for nu in [0.5, 0.9, 2.0] {
            let w = extractable_work(&CovarianceMatrix::thermal(3, nu)).unwrap();
            assert!(w.abs() < 1e-12, "{w}");
        }
        let z: f64 = 2.0;
        let sq = CovarianceMatrix::new(diag(&[z * z / 2.0, 0.5 / (z * z)])).unwrap();
        assert!(close(extractable_work(&sq).unwrap(), 0.5625, 1e-12));

        let two = CovarianceMatrix::new(diag(&[2.0, 2.0, 0.5, 0.5])).unwrap();
        assert!(close(extractable_work(&two).unwrap(), 0.5, 1e-12));
    }

    #[test]
    fn partial_trace_selects_q_and_p_blocks() {
        let g = CovarianceMatrix::new(diag(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        let r = partial_trace(&g, 1).unwrap();
        assert_eq!(r.entries(), &diag(&[1.0, 3.0]));
        assert_eq!(partial_trace(&g, 2).unwrap(), g);
        assert!(matches!(partial_trace(&g, 0), Err(Error::BadModeCount { .. })));
        assert!(matches!(partial_trace(&g, 3), Err(Error::BadModeCount { .. })));
    }

    #[test]
    fn squeezer_matrix() {
        assert_eq!(single_mode_squeezer(1.0, 3, 1).unwrap(), SymplecticMatrix::identity(3));
        let s = single_mode_squeezer(2.0, 1, 0).unwrap();
        assert_eq!(s.entries(), &diag(&[2.0, 0.5]));
        let g = s.act(&CovarianceMatrix::vacuum(1)).unwrap();
        assert_eq!(g.entries(), &diag(&[2.0, 0.125]));

        let s = single_mode_squeezer(3.5, 4, 2).unwrap();
        assert!(s.residual() < 1e-14);
        assert!(matches!(
            single_mode_squeezer(2.0, 2, 2),
            Err(Error::BadModeCount { .. })
        ));
        assert!(single_mode_squeezer(0.5, 2, 0).is_err());
    }

    #[test]
    fn covariance_validation_errors() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(CovarianceMatrix::new(asym), Err(Error::NotSymmetric { .. })));

        let indefinite = diag(&[1.0, -1.0]);
        assert!(matches!(
            CovarianceMatrix::new(indefinite),
            Err(Error::NonPositiveDefinite { .. })
        ));

        let unphysical = diag(&[0.2, 0.2]);
        assert!(matches!(CovarianceMatrix::new(unphysical), Err(Error::NotPhysical { .. })));

        let odd = DMatrix::identity(3, 3);
        assert!(matches!(CovarianceMatrix::new(odd), Err(Error::BadShape { .. })));
    }

    #[test]
    fn orthogonal_symplectic_rejects_squeezer() {
        let s = single_mode_squeezer(2.0, 1, 0).unwrap();
        assert!(matches!(
            OrthogonalSymplectic::new(s.entries().clone()),
            Err(Error::NotOrthogonal { .. })
        ));
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!(OrthogonalSymplectic::new(rot).is_ok());
    }
}
