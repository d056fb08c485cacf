//! Block Davidson–Liu eigensolver for the lowest roots of a symmetric operator.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{axpy, dot, normalize};
use crate::error::{CasqError, Result};
use crate::linalg::symmetric_eigen;

/// Denominator floor of the diagonal preconditioner (Hartree).
pub const PRECONDITIONER_SHIFT: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DavidsonConfig {
    pub max_subspace: usize,
    /// Residual-norm convergence threshold (Hartree).
    pub tol: f64,
    pub max_iter: usize,
    /// Number of lowest-diagonal determinants whose Hamiltonian block is
    /// diagonalized exactly to seed the iteration.
    pub guess_dim: usize,
}

impl Default for DavidsonConfig {
    fn default() -> Self {
        DavidsonConfig {
            max_subspace: 80,
            tol: 1e-7,
            max_iter: 200,
            guess_dim: 400,
        }
    }
}

/// A real symmetric operator with cheap diagonal and small explicit blocks.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn diagonal(&self) -> Vec<f64>;
    /// Explicit matrix restricted to the basis vectors `idx`.
    fn subspace_matrix(&self, idx: &[usize]) -> DMatrix<f64>;
    /// Map a vector onto an invariant subspace of the operator; every new
    /// search direction passes through this. The default keeps it unchanged.
    fn project(&self, _v: &mut [f64]) {}
}

#[derive(Debug, Clone)]
pub struct DavidsonOutcome {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub matvecs: usize,
}

fn sorted_eigen(m: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    symmetric_eigen(&m)
}

fn combine(basis: &[Vec<f64>], coeffs: impl Iterator<Item = f64>, dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (b, c) in basis.iter().zip(coeffs) {
        if c != 0.0 {
            axpy(c, b, &mut out);
        }
    }
    out
}

/// Orthogonalize `t` against `basis` twice; return its remaining norm.
fn orthogonalize(t: &mut [f64], basis: &[Vec<f64>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, t);
            axpy(-c, b, t);
        }
    }
    normalize(t)
}

/// As [`orthogonalize`], applying the same combination to `at = A t` so the
/// image stays consistent without another operator application.
fn orthogonalize_with_image(
    t: &mut [f64],
    at: &mut [f64],
    basis: &[Vec<f64>],
    images: &[Vec<f64>],
) -> f64 {
    for _ in 0..2 {
        for (b, ab) in basis.iter().zip(images) {
            let c = dot(b, t);
            axpy(-c, b, t);
            axpy(-c, ab, at);
        }
    }
    let n = normalize(t);
    if n > 0.0 {
        at.iter_mut().for_each(|v| *v /= n);
    }
    n
}

/// Lowest `n_roots` eigenpairs of `op`.
pub fn davidson(
    op: &dyn LinearOperator,
    n_roots: usize,
    cfg: &DavidsonConfig,
) -> Result<DavidsonOutcome> {
    let n = op.dim();
    if n_roots == 0 {
        return Ok(DavidsonOutcome {
            eigenvalues: vec![],
            eigenvectors: vec![],
            residuals: vec![],
            iterations: 0,
            matvecs: 0,
        });
    }
    if n_roots > n {
        return Err(CasqError::Invalid(format!(
            "{n_roots} roots requested from a space of {n} determinants"
        )));
    }
    if cfg.guess_dim < n_roots {
        return Err(CasqError::Invalid(format!(
            "guess_dim {} smaller than {n_roots} roots",
            cfg.guess_dim
        )));
    }
    if cfg.tol <= 0.0 {
        return Err(CasqError::Invalid(
            "Davidson tolerance must be positive".into(),
        ));
    }

    let diag = op.diagonal();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)));
    let g = cfg.guess_dim.min(n);
    let guess_idx = &order[..g];
    let (_, guess_vecs) = sorted_eigen(op.subspace_matrix(guess_idx))?;
    let n_start = (n_roots + 2).min(g);
    let max_sub = cfg.max_subspace.max(3 * n_roots + 2).min(n);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    for c in 0..g {
        if basis.len() == n_start {
            break;
        }
        let mut v = vec![0.0; n];
        for (r, &k) in guess_idx.iter().enumerate() {
            v[k] = guess_vecs[(r, c)];
        }
        op.project(&mut v);
        if orthogonalize(&mut v, &basis) > 1e-8 {
            basis.push(v);
        }
    }
    // projection may have removed guess vectors; top up with unit vectors
    for &k in &order {
        if basis.len() >= n_roots.max(n_start.min(n)) {
            break;
        }
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        op.project(&mut v);
        if orthogonalize(&mut v, &basis) > 1e-8 {
            basis.push(v);
        }
    }
    let mut images: Vec<Vec<f64>> = Vec::new();
    let mut matvecs = 0;
    for b in &basis {
        let mut y = vec![0.0; n];
        op.apply(b, &mut y);
        matvecs += 1;
        images.push(y);
    }

    let mut residual_norms = vec![f64::INFINITY; n_roots];
    // Ritz vectors and their images from the previous iteration, kept across
    // restarts (GD+k)
    let mut previous: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    // projected matrix, valid for the first `known` basis vectors
    let mut proj = DMatrix::<f64>::zeros(0, 0);
    let mut known = 0;
    for iter in 1..=cfg.max_iter {
        let m = basis.len();
        let mut grown = DMatrix::zeros(m, m);
        grown
            .view_mut((0, 0), (known, known))
            .copy_from(&proj.view((0, 0), (known, known)));
        for j in known..m {
            for i in 0..=j {
                let v = dot(&basis[i], &images[j]);
                grown[(i, j)] = v;
                grown[(j, i)] = v;
            }
        }
        proj = grown;
        known = m;
        let (theta, y) = sorted_eigen(proj.clone())?;
        let k = n_roots.min(m);

        let mut ritz = Vec::with_capacity(k);
        let mut residuals = Vec::with_capacity(k);
        for i in 0..k {
            let x = combine(&basis, y.column(i).iter().copied(), n);
            let mut r = combine(&images, y.column(i).iter().copied(), n);
            axpy(-theta[i], &x, &mut r);
            residual_norms[i] = dot(&r, &r).sqrt();
            ritz.push(x);
            residuals.push(r);
        }

        if k == n_roots && residual_norms.iter().all(|&r| r <= cfg.tol) {
            let mut vecs = ritz;
            for v in vecs.iter_mut() {
                normalize(v);
            }
            return Ok(DavidsonOutcome {
                eigenvalues: theta[..n_roots].to_vec(),
                eigenvectors: vecs,
                residuals: residual_norms,
                iterations: iter,
                matvecs,
            });
        }

        // correction vectors for the unconverged roots
        let mut corrections = Vec::new();
        for i in 0..k {
            if residual_norms[i] <= cfg.tol {
                continue;
            }
            let t: Vec<f64> = residuals[i]
                .iter()
                .zip(&diag)
                .map(|(r, d)| {
                    let mut den = theta[i] - d;
                    if den.abs() < PRECONDITIONER_SHIFT {
                        den = if den < 0.0 {
                            -PRECONDITIONER_SHIFT
                        } else {
                            PRECONDITIONER_SHIFT
                        };
                    }
                    r / den
                })
                .collect();
            corrections.push((t, i));
        }

        if basis.len() + corrections.len() > max_sub {
            // collapse onto the current Ritz vectors plus the previous ones
            let keep = (n_roots + 2).min(m);
            let mut new_basis = Vec::with_capacity(keep + previous.len());
            let mut new_images = Vec::with_capacity(keep + previous.len());
            for i in 0..keep {
                let mut x = combine(&basis, y.column(i).iter().copied(), n);
                let mut ax = combine(&images, y.column(i).iter().copied(), n);
                let before = normalize(&mut x);
                ax.iter_mut().for_each(|v| *v /= before);
                new_basis.push(x);
                new_images.push(ax);
            }
            for (mut x, mut ax) in std::mem::take(&mut previous) {
                if new_basis.len() + corrections.len() >= max_sub {
                    break;
                }
                if orthogonalize_with_image(&mut x, &mut ax, &new_basis, &new_images) > 1e-3 {
                    new_basis.push(x);
                    new_images.push(ax);
                }
            }
            basis = new_basis;
            images = new_images;
            known = 0;
        }
        previous = ritz
            .into_iter()
            .zip(&residuals)
            .zip(&theta)
            .map(|((x, r), &t)| {
                let mut ax = r.clone();
                axpy(t, &x, &mut ax);
                (x, ax)
            })
            .collect();

        let mut added = 0;
        for (mut t, root) in corrections {
            op.project(&mut t);
            normalize(&mut t);
            let mut norm = orthogonalize(&mut t, &basis);
            if norm < 1e-8 {
                // preconditioned direction collapsed; fall back to the raw residual
                t = residuals[root].clone();
                op.project(&mut t);
                normalize(&mut t);
                norm = orthogonalize(&mut t, &basis);
            }
            if norm < 1e-8 || basis.len() >= n {
                continue;
            }
            let mut y = vec![0.0; n];
            op.apply(&t, &mut y);
            matvecs += 1;
            basis.push(t);
            images.push(y);
            added += 1;
        }
        if added == 0 {
            if basis.len() >= n {
                // the subspace spans the whole space; one more Rayleigh–Ritz is exact
                continue;
            }
            let max_residual = residual_norms.iter().copied().fold(0.0, f64::max);
            return Err(CasqError::NotConverged {
                iterations: iter,
                residuals: residual_norms,
                max_residual,
            });
        }
    }
    let max_residual = residual_norms.iter().copied().fold(0.0, f64::max);
    Err(CasqError::NotConverged {
        iterations: cfg.max_iter,
        residuals: residual_norms,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Dense(DMatrix<f64>);

    impl LinearOperator for Dense {
        fn dim(&self) -> usize {
            self.0.nrows()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for i in 0..self.dim() {
                y[i] = (0..self.dim()).map(|j| self.0[(i, j)] * x[j]).sum();
            }
        }
        fn diagonal(&self) -> Vec<f64> {
            self.0.diagonal().iter().copied().collect()
        }
        fn subspace_matrix(&self, idx: &[usize]) -> DMatrix<f64> {
            DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.0[(idx[i], idx[j])])
        }
    }

    #[test]
    fn diagonal_matrix() {
        let op = Dense(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            3.0, 1.0, 2.0,
        ])));
        let out = davidson(&op, 1, &DavidsonConfig::default()).unwrap();
        assert!((out.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((out.eigenvectors[0][1].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn small_guess_space_still_converges() {
        let n = 120;
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                i as f64 * 0.1
            } else {
                0.01 / (1.0 + (i as f64 - j as f64).abs())
            }
        });
        let exact = sorted_eigen(m.clone()).unwrap().0;
        let cfg = DavidsonConfig {
            guess_dim: 4,
            max_subspace: 12,
            tol: 1e-9,
            max_iter: 500,
        };
        let out = davidson(&Dense(m), 3, &cfg).unwrap();
        for i in 0..3 {
            assert!((out.eigenvalues[i] - exact[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_too_many_roots() {
        let op = Dense(DMatrix::identity(2, 2));
        assert!(davidson(&op, 3, &DavidsonConfig::default()).is_err());
    }

    #[test]
    fn reports_non_convergence() {
        let n = 60;
        let m = DMatrix::from_fn(n, n, |i, j| if i == j { i as f64 } else { 0.3 });
        let cfg = DavidsonConfig {
            guess_dim: 2,
            max_subspace: 8,
            tol: 1e-14,
            max_iter: 1,
        };
        match davidson(&Dense(m), 2, &cfg) {
            Err(CasqError::NotConverged { residuals, .. }) => assert_eq!(residuals.len(), 2),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
