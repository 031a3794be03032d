//! Haar-random unitaries and their phase-space action.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::phase_space::{
    CovarianceMatrix, OrthogonalSymplectic, SymplecticMatrix,
};

/// Residual tolerance for accepting a matrix as unitary.
pub const TOL_UNITARY: f64 = 1e-10;
/// Largest imaginary part tolerated in the real embedding.
pub const TOL_EMBED_IMAG: f64 = 1e-12;

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// First `rows` rows of a Haar-random `dim x dim` unitary.
///
/// Rows are drawn as iid complex standard Gaussian vectors and orthonormalized
/// in order (classical Gram-Schmidt, two passes). This is the QR construction
/// applied to the transposed Ginibre matrix: `R` comes out with a real positive
/// diagonal, so the usual phase correction `R_ii / |R_ii|` is the identity.
/// Row `k` depends only on the first `k + 1` Gaussian rows, so
/// `haar_rows(d, k, rng)` is exactly the top of `haar_unitary(d, rng)` for the
/// same generator state.
pub fn haar_rows<R: Rng + ?Sized>(dim: usize, rows: usize, rng: &mut R) -> Result<DMatrix<Complex64>> {
    if dim == 0 || rows > dim {
        return Err(Error::InvalidConfig(format!(
            "cannot draw {rows} orthonormal rows in dimension {dim}"
        )));
    }
    let g = gaussian_rows(rows, dim, rng);
    orthonormalize_rows(g)
}

// Filled row by row, so a prefix of rows only consumes a prefix of the stream.
fn gaussian_rows<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex64> {
    let values: Vec<Complex64> = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    DMatrix::from_row_iterator(rows, cols, values)
}

// Gram-Schmidt on the rows, in order.
fn orthonormalize_rows(mut g: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let (rows, dim) = g.shape();
    for k in 0..rows {
        for _pass in 0..2 {
            for j in 0..k {
                let coef: Complex64 = (0..dim).map(|l| g[(j, l)].conj() * g[(k, l)]).sum();
                for l in 0..dim {
                    let v = g[(j, l)];
                    g[(k, l)] -= coef * v;
                }
            }
        }
        let r_kk = g.row(k).iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if !(r_kk > 1e-300) {
            return Err(Error::NumericalFailure("Gram-Schmidt breakdown in Haar sampler".into()));
        }
        for l in 0..dim {
            g[(k, l)] /= r_kk;
        }
    }
    Ok(g)
}

/// Haar-random element of `U(dim)`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DMatrix<Complex64>> {
    haar_rows(dim, dim, rng)
}

/// Unitary near `u`: the row orthonormalization of `u + scale * G` with `G`
/// complex Gaussian.
pub fn nearby_unitary<R: Rng + ?Sized>(
    u: &DMatrix<Complex64>,
    scale: f64,
    rng: &mut R,
) -> Result<DMatrix<Complex64>> {
    let g = gaussian_rows(u.nrows(), u.ncols(), rng);
    orthonormalize_rows(u + g * Complex64::new(scale, 0.0))
}

/// `max |U^H U - I|`.
pub fn unitarity_residual(u: &DMatrix<Complex64>) -> f64 {
    let n = u.ncols();
    let gram = u.adjoint() * u;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// The isomorphism `U(d) -> K_d`, `O = P diag(U, U*) P^{-1}` with
/// `P = [[I, iI], [iI, I]] / sqrt(2)`.
///
/// Evaluated literally in complex arithmetic; the result is checked to be real
/// and then validated as orthogonal and symplectic. It equals the closed form
/// `[[Re U, Im U], [-Im U, Re U]]` used by [`passive_rows`].
pub fn embed_unitary(u: &DMatrix<Complex64>) -> Result<OrthogonalSymplectic> {
    let (rows, cols) = u.shape();
    if rows != cols || rows == 0 {
        return Err(Error::DimensionMismatch {
            expected: rows,
            actual: cols,
        });
    }
    let residual = unitarity_residual(u);
    if residual > TOL_UNITARY || !residual.is_finite() {
        return Err(Error::NotUnitary { residual });
    }
    let d = rows;
    // unnormalized P; the two 1/sqrt(2) factors are applied at the end as an
    // exact 1/2
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut p = DMatrix::<Complex64>::zeros(2 * d, 2 * d);
    for k in 0..d {
        p[(k, k)] = one;
        p[(k, d + k)] = i;
        p[(d + k, k)] = i;
        p[(d + k, d + k)] = one;
    }
    let mut block = DMatrix::<Complex64>::zeros(2 * d, 2 * d);
    block.view_mut((0, 0), (d, d)).copy_from(u);
    block.view_mut((d, d), (d, d)).copy_from(&u.map(|x| x.conj()));
    let o = (&p * block * p.adjoint()).map(|x| x * 0.5);

    let max_imag = o.iter().fold(0.0_f64, |acc, x| acc.max(x.im.abs()));
    if max_imag > TOL_EMBED_IMAG {
        return Err(Error::NumericalFailure(format!(
            "embedding has imaginary residue {max_imag:e}"
        )));
    }
    OrthogonalSymplectic::new(o.map(|x| x.re))
}

/// Rows of `F(U)` belonging to the first `k` modes, where `u_rows` holds the
/// first `k` rows of `U`: a `2k x 2d` real matrix laid out as
/// `[[X, Y], [-Y, X]]` with `X + iY = u_rows`.
pub fn passive_rows(u_rows: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (k, d) = u_rows.shape();
    let mut r = DMatrix::<f64>::zeros(2 * k, 2 * d);
    for i in 0..k {
        for l in 0..d {
            let x = u_rows[(i, l)].re;
            let y = u_rows[(i, l)].im;
            r[(i, l)] = x;
            r[(i, d + l)] = y;
            r[(k + i, l)] = -y;
            r[(k + i, d + l)] = x;
        }
    }
    r
}

/// Random symplectic `O_1 Z O_2` with Haar passive factors and squeezings
/// drawn uniformly in `[1, max_squeeze]`.
pub fn random_symplectic<R: Rng + ?Sized>(
    n_modes: usize,
    max_squeeze: f64,
    rng: &mut R,
) -> Result<SymplecticMatrix> {
    let o1 = embed_unitary(&haar_unitary(n_modes, rng)?)?;
    let o2 = embed_unitary(&haar_unitary(n_modes, rng)?)?;
    let mut z = DMatrix::<f64>::identity(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        let s = rng.random_range(1.0..=max_squeeze.max(1.0));
        z[(k, k)] = s;
        z[(n_modes + k, n_modes + k)] = 1.0 / s;
    }
    let s = o1.entries() * z * o2.entries();
    Ok(SymplecticMatrix::from_trusted(s))
}

/// Random physical covariance matrix `S (diag(nu) ⊕ diag(nu)) S^T` with
/// `nu_k` uniform in `[1/2, max_nu]` and `S` from [`random_symplectic`].
pub fn random_physical_covariance<R: Rng + ?Sized>(
    n_modes: usize,
    max_nu: f64,
    max_squeeze: f64,
    rng: &mut R,
) -> Result<CovarianceMatrix> {
    let s = random_symplectic(n_modes, max_squeeze, rng)?;
    let nus: Vec<f64> = (0..n_modes)
        .map(|_| rng.random_range(0.5..=max_nu.max(0.5)))
        .collect();
    let d = DMatrix::from_fn(2 * n_modes, 2 * n_modes, |i, j| {
        if i == j {
            nus[i % n_modes]
        } else {
            0.0
        }
    });
    let g = s.entries() * d * s.entries().transpose();
    Ok(CovarianceMatrix::from_trusted((&g + g.transpose()) * 0.5))
}

/// `‖A - B‖_2` in the entrywise (Hilbert-Schmidt) sense.
pub fn hilbert_schmidt_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
