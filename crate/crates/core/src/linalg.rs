//! Dense self-adjoint eigensolvers on nalgebra matrices, backed by faer.

use faer::{Mat, Side};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{CasqError, Result};

/// Eigenvalues (ascending) and eigenvectors (columns) of a real symmetric matrix.
/// Only the lower triangle is read.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(CasqError::Dimension {
            expected: n,
            got: m.ncols(),
        });
    }
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let a = Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| CasqError::Invariant(format!("symmetric eigensolver failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let values = (0..n).map(|i| s[i]).collect();
    Ok((values, DMatrix::from_fn(n, n, |i, j| u[(i, j)])))
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a complex Hermitian matrix.
/// Only the lower triangle is read.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(CasqError::Dimension {
            expected: n,
            got: m.ncols(),
        });
    }
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let a = Mat::<faer::c64>::from_fn(n, n, |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re, z.im)
    });
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| CasqError::Invariant(format!("Hermitian eigensolver failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let values = (0..n).map(|i| s[i].re).collect();
    Ok((
        values,
        DMatrix::from_fn(n, n, |i, j| {
            let z = u[(i, j)];
            Complex64::new(z.re, z.im)
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearly_diagonal_matrix_keeps_its_axes() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                -2.191895, -4.97e-14, -1.87e-16, -4.97e-14, -1.851120, -1.14e-16, -1.87e-16,
                -1.14e-16, -1.085443,
            ],
        );
        let (vals, vecs) = symmetric_eigen(&m).unwrap();
        let r = &m * &vecs - &vecs * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals));
        assert!(r.amax() < 1e-14);
        assert!((vecs[(0, 0)].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_residual() {
        let i = Complex64::new(0.0, 1.0);
        let o = Complex64::new(1.0, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[o * 2.0, i * 0.5, -i * 0.5, o]);
        let (vals, vecs) = hermitian_eigen(&m).unwrap();
        assert!(vals[0] <= vals[1]);
        for k in 0..2 {
            let v = vecs.column(k);
            let r = &m * v - v * Complex64::new(vals[k], 0.0);
            assert!(r.norm() < 1e-14);
        }
    }
}
