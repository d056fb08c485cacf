//! Explicit Hamiltonian construction and full diagonalization (validation oracle).

use nalgebra::DMatrix;

use crate::linalg::symmetric_eigen;

use super::spin::{multiplicity_from_s2, s_squared};
use super::{hamiltonian_element, CiState};
use crate::detspace::CasSpace;
use crate::error::{CasqError, Result};
use crate::ingest::IntegralSet;
use crate::par;

pub const DEFAULT_DENSE_CAP: usize = 20_000;

/// `H[i][j] = <D_i|H|D_j>` from the Slater–Condon rules.
pub fn dense_hamiltonian(space: &CasSpace, ints: &IntegralSet, cap: usize) -> Result<DMatrix<f64>> {
    let n = space.len();
    if n > cap {
        return Err(CasqError::TooLarge { size: n, cap });
    }
    let dets: Vec<_> = space.dets().collect();
    let rows = par::map_range(n, par::DEFAULT_PARALLEL, |i| {
        (0..n)
            .map(|j| hamiltonian_element(&dets[i], &dets[j], ints))
            .collect::<Vec<f64>>()
    });
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Lowest `n_roots` eigenpairs of the explicit Hamiltonian.
pub fn dense_solve(
    space: &CasSpace,
    ints: &IntegralSet,
    n_roots: usize,
    cap: usize,
) -> Result<Vec<CiState>> {
    if n_roots > space.len() {
        return Err(CasqError::Invalid(format!(
            "{n_roots} roots requested from a space of {} determinants",
            space.len()
        )));
    }
    let h = dense_hamiltonian(space, ints, cap)?;
    let (values, vectors) = symmetric_eigen(&h)?;
    (0..n_roots)
        .map(|i| {
            let coeffs: Vec<f64> = vectors.column(i).iter().copied().collect();
            let s2 = s_squared(space, &coeffs)?;
            Ok(CiState {
                energy: values[i],
                multiplicity: multiplicity_from_s2(s2),
                s2_expect: s2,
                ms2: space.ms2(),
                coeffs,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one() {
        let mut ints = IntegralSet::zeros(1);
        ints.set_h(0, 0, -0.5);
        ints.core_energy = 0.25;
        let space = CasSpace::new(1, 1, 1).unwrap();
        let s = dense_solve(&space, &ints, 1, DEFAULT_DENSE_CAP).unwrap();
        assert_eq!(s[0].energy, -0.25);
        assert_eq!(s[0].multiplicity, 2);
    }

    #[test]
    fn cap_enforced() {
        let ints = IntegralSet::zeros(6);
        let space = CasSpace::new(6, 6, 0).unwrap();
        assert!(matches!(
            dense_solve(&space, &ints, 1, 100),
            Err(CasqError::TooLarge {
                size: 400,
                cap: 100
            })
        ));
    }
}
