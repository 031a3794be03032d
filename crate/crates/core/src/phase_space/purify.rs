use nalgebra::DMatrix;

use super::{williamson, CovarianceMatrix};
use crate::error::{Error, Result};

const PURE_MODE_SLACK: f64 = 1e-12;

/// Gaussian purification of an `m`-mode state into a pure `2m`-mode state.
///
/// Writes `Gamma_m = S D S^T`, purifies each thermal factor `nu_k I` with a
/// two-mode squeezed vacuum (cross block `sqrt(nu_k^2 - 1/4) sigma_z`) on an
/// ancilla mode `R_k`, then applies `S ⊕ I` on the system side. Modes are laid
/// out as `(A_1..A_m, R_1..R_m)`, so the output ordering is
/// `(qA.., qR.., pA.., pR..)` and keeping the first `m` modes returns the input.
pub fn purify(gamma_m: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    let m = gamma_m.n_modes();
    let w = williamson(gamma_m)?;
    let s = w
        .symplectic_factor
        .as_ref()
        .ok_or_else(|| Error::NumericalFailure("missing Williamson factor".into()))?
        .entries();

    // V = diag(c) ⊕ diag(-c) in the (q.., p..) layout of m modes
    let mut v = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for (k, &nu) in w.nus.iter().enumerate() {
        // below this, nu - 1/2 is eigensolver round-off and its square root
        // would put a spurious ~1e-8 correlation on a pure mode
        let c = if nu - 0.5 <= PURE_MODE_SLACK {
            0.0
        } else {
            (nu * nu - 0.25).sqrt()
        };
        v[(k, k)] = c;
        v[(m + k, m + k)] = -c;
    }
    let cross = s * v;
    let d = w.normal_form();

    let sys = |a: usize| if a < m { a } else { a + m };
    let anc = |r: usize| if r < m { m + r } else { 2 * m + r };

    let mut out = DMatrix::<f64>::zeros(4 * m, 4 * m);
    for i in 0..2 * m {
        for j in 0..2 * m {
            out[(sys(i), sys(j))] = gamma_m.entries()[(i, j)];
            out[(sys(i), anc(j))] = cross[(i, j)];
            out[(anc(j), sys(i))] = cross[(i, j)];
            out[(anc(i), anc(j))] = d[(i, j)];
        }
    }
    Ok(CovarianceMatrix::from_trusted(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{partial_trace, symplectic_spectrum};

    #[test]
    fn vacuum_purifies_to_vacuum() {
        let p = purify(&CovarianceMatrix::vacuum(1)).unwrap();
        assert!((p.entries() - DMatrix::<f64>::identity(4, 4) * 0.5).abs().max() < 1e-12);
    }

    #[test]
    fn thermal_purifies_to_two_mode_squeezed_vacuum() {
        let p = purify(&CovarianceMatrix::thermal(1, 1.0)).unwrap();
        let c = 0.75_f64.sqrt();
        let g = p.entries();
        // ordering (qA, qR, pA, pR)
        for i in 0..4 {
            assert!((g[(i, i)] - 1.0).abs() < 1e-12);
        }
        assert!((g[(0, 1)] - c).abs() < 1e-12);
        assert!((g[(2, 3)] + c).abs() < 1e-12);
        assert!(g[(0, 2)].abs() < 1e-12 && g[(0, 3)].abs() < 1e-12);
        let nus = symplectic_spectrum(g).unwrap();
        assert!(nus.iter().all(|nu| (nu - 0.5).abs() < 1e-8));
    }

    #[test]
    fn energy_at_most_doubles() {
        let g = CovarianceMatrix::new(DMatrix::from_row_slice(
            2,
            2,
            &[3.0, 0.4, 0.4, 1.0],
        ))
        .unwrap();
        assert!((g.trace() - 4.0).abs() < 1e-15);
        let p = purify(&g).unwrap();
        assert!(p.trace() <= 8.0 + 1e-9);
        let back = partial_trace(&p, 1).unwrap();
        assert_eq!(back.entries(), g.entries());
    }
}
