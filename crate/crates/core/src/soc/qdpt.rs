//! Diagonalization of `diag(E) + H_SO` and Kramers pairing.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SocStateBasis;
use crate::error::{CasqError, Result};
use crate::linalg::hermitian_eigen;

/// Eigenvalues closer than this (Hartree) form one degenerate group.
pub const KRAMERS_DEGENERACY_TOL: f64 = 1e-8;
/// Allowed loss of norm when projecting a time-reversed state into its group.
pub const KRAMERS_PAIR_THRESHOLD: f64 = 1e-8;

/// Spin-orbit eigenstates, ascending in energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoEigenstates {
    /// Hartree.
    pub energies: Vec<f64>,
    /// Column `k` holds the expansion of state `k` over the basis entries.
    pub vectors: DMatrix<Complex64>,
    /// Index pairs `(a, b)` with `b = Θa` up to phase; empty for integer spin.
    pub kramers_pairs: Vec<(usize, usize)>,
}

impl SoEigenstates {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Lowest Kramers pair, if the spectrum is paired.
    pub fn ground_pair(&self) -> Option<(usize, usize)> {
        self.kramers_pairs.first().copied()
    }
}

/// `Θ e(m,S,M) = (−1)^(S−M) e(m,S,−M)` followed by complex conjugation.
pub fn time_reverse(basis: &SocStateBasis, v: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let mut out = DVector::from_element(v.len(), Complex64::new(0.0, 0.0));
    for (i, e) in basis.entries.iter().enumerate() {
        let j = basis.position(e.multiplet, -e.ms2).ok_or_else(|| {
            CasqError::Kramers(format!(
                "basis lacks the 2M_S = {} partner of multiplet {}",
                -e.ms2, e.multiplet
            ))
        })?;
        let phase = if ((e.twice_s as i32 - e.ms2) / 2) % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        out[j] = v[i].conj() * phase;
    }
    Ok(out)
}

fn orthonormalize(vs: Vec<DVector<Complex64>>, drop_below: f64) -> Vec<DVector<Complex64>> {
    let mut out: Vec<DVector<Complex64>> = Vec::new();
    for mut v in vs {
        for _ in 0..2 {
            for u in &out {
                let c = u.dotc(&v);
                v -= u * c;
            }
        }
        let n = v.norm();
        if n > drop_below {
            out.push(v / Complex64::new(n, 0.0));
        }
    }
    out
}

/// Diagonalize `diag(energies) + soc`.
///
/// For half-integer spin each degenerate group is rebuilt as explicit Kramers
/// pairs; a group of odd size or a time-reversed state that leaks out of its
/// group is reported as [`CasqError::Kramers`].
pub fn qdpt(
    basis: &SocStateBasis,
    energies: &[f64],
    soc: &DMatrix<Complex64>,
) -> Result<SoEigenstates> {
    let n = basis.len();
    if energies.len() != n || soc.nrows() != n || soc.ncols() != n {
        return Err(CasqError::Dimension {
            expected: n,
            got: energies.len().min(soc.nrows()),
        });
    }
    let mut h = soc.clone();
    for (i, e) in energies.iter().enumerate() {
        h[(i, i)] += Complex64::new(*e, 0.0);
    }
    let (values, mut vectors) = hermitian_eigen(&h)?;

    let mut pairs = Vec::new();
    if basis.is_half_integer() {
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && values[end] - values[end - 1] < KRAMERS_DEGENERACY_TOL {
                end += 1;
            }
            let size = end - start;
            if size % 2 != 0 {
                return Err(CasqError::Kramers(format!(
                    "degenerate group at {:.10} Eh has odd size {size}",
                    values[start]
                )));
            }
            let group: Vec<DVector<Complex64>> = (start..end)
                .map(|k| vectors.column(k).into_owned())
                .collect();
            let mut remaining = group.clone();
            let mut paired = Vec::with_capacity(size);
            while let Some(v) = remaining.first().cloned() {
                let w = time_reverse(basis, &v)?;
                let mut proj = DVector::from_element(n, Complex64::new(0.0, 0.0));
                for g in &group {
                    proj += g * g.dotc(&w);
                }
                let kept = proj.norm();
                if (1.0 - kept).abs() > KRAMERS_PAIR_THRESHOLD || v.dotc(&proj).norm() > 1e-6 {
                    return Err(CasqError::Kramers(format!(
                        "time-reversed state retains norm {kept:.3e} in its group at {:.10} Eh",
                        values[start]
                    )));
                }
                let w = proj / Complex64::new(kept, 0.0);
                let rest: Vec<DVector<Complex64>> = remaining[1..]
                    .iter()
                    .map(|u| {
                        let mut u = u.clone();
                        u -= &v * v.dotc(&u);
                        u -= &w * w.dotc(&u);
                        u
                    })
                    .collect();
                remaining = orthonormalize(rest, 1e-6);
                paired.push(v);
                paired.push(w);
            }
            if paired.len() != size {
                return Err(CasqError::Kramers(format!(
                    "paired {} of {size} states at {:.10} Eh",
                    paired.len(),
                    values[start]
                )));
            }
            for (k, v) in paired.into_iter().enumerate() {
                vectors.set_column(start + k, &v);
                if k % 2 == 1 {
                    pairs.push((start + k - 1, start + k));
                }
            }
            start = end;
        }
    }
    Ok(SoEigenstates {
        energies: values,
        vectors,
        kramers_pairs: pairs,
    })
}
