//! g-tensors from the effective Hamiltonian over the ground Kramers pair and
//! from second-order sum over states.

use nalgebra::{DMatrix, Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{time_reverse, zeeman_matrices, SoEigenstates, SocStateBasis, KRAMERS_PAIR_THRESHOLD};
use crate::casci::{transition_density, transition_density_spin_traced, Multiplet};
use crate::detspace::{CasSpace, Spin};
use crate::error::{CasqError, Result};
use crate::ingest::PropertyIntegrals;
use crate::linalg::symmetric_eigen;
use crate::units::G_ELECTRON;

/// Excitation energies below this (Hartree) make the perturbation sum singular.
pub const SOS_DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GMethod {
    /// Effective Hamiltonian over the ground Kramers pair.
    Eha,
    /// Second-order sum over spin-free excited states.
    Sos,
}

impl GMethod {
    pub fn name(self) -> &'static str {
        match self {
            GMethod::Eha => "EHA",
            GMethod::Sos => "SOS",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GTensor {
    /// Row index is the field direction, column index the pseudo-spin direction.
    pub matrix: Matrix3<f64>,
    /// Principal values labelled x, y, z by alignment of their axes.
    pub principal: [f64; 3],
    /// Column k is the axis of `principal[k]`.
    pub axes: Matrix3<f64>,
    pub method: GMethod,
}

impl GTensor {
    /// Principal values are `sqrt(eig(g gᵀ))`; axes are the eigenvectors.
    pub fn from_matrix(matrix: Matrix3<f64>, method: GMethod) -> Self {
        let gg = matrix * matrix.transpose();
        let gg = (gg + gg.transpose()) * 0.5;
        let (vals, vecs) = symmetric_eigen(&DMatrix::from_fn(3, 3, |i, j| gg[(i, j)]))
            .expect("3x3 symmetric eigenproblem");
        let values: Vec<f64> = vals.iter().map(|v| v.max(0.0).sqrt()).collect();
        let vecs: Vec<Vector3<f64>> = (0..3)
            .map(|k| Vector3::new(vecs[(0, k)], vecs[(1, k)], vecs[(2, k)]))
            .collect();
        // greedy assignment of eigenvectors to Cartesian axes by |component|
        let mut slot = [usize::MAX; 3];
        let mut used = [false; 3];
        let mut cand: Vec<(f64, usize, usize)> = Vec::new();
        for (k, v) in vecs.iter().enumerate() {
            for axis in 0..3 {
                cand.push((v[axis].abs(), k, axis));
            }
        }
        cand.sort_by(|a, b| b.0.total_cmp(&a.0));
        for (_, k, axis) in cand {
            if !used[k] && slot[axis] == usize::MAX {
                used[k] = true;
                slot[axis] = k;
            }
        }
        let mut principal = [0.0; 3];
        let mut axes = Matrix3::zeros();
        for axis in 0..3 {
            let k = slot[axis];
            principal[axis] = values[k];
            let mut v = vecs[k];
            if v[axis] < 0.0 {
                v = -v;
            }
            axes.set_column(axis, &v);
        }
        GTensor {
            matrix,
            principal,
            axes,
            method,
        }
    }

    /// `g − g_e` per principal value.
    pub fn shifts(&self) -> [f64; 3] {
        self.principal.map(|g| g - G_ELECTRON)
    }
}

fn pauli() -> [Matrix2<Complex64>; 3] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        Matrix2::new(z, o, o, z),
        Matrix2::new(z, -i, i, z),
        Matrix2::new(o, z, z, -o),
    ]
}

/// g-tensor from the Zeeman operator projected onto the ground Kramers pair.
///
/// With `Λ_k = <a|L_k + g_e S_k|b>` over the pair (a, Θa), `g_kl = Tr(Λ_k σ_l)`.
pub fn g_tensor_eha(
    basis: &SocStateBasis,
    multiplets: &[Multiplet],
    states: &SoEigenstates,
    props: &PropertyIntegrals,
    n_elec: usize,
    n_orb: usize,
) -> Result<GTensor> {
    let (a, b) = states
        .ground_pair()
        .ok_or_else(|| CasqError::Kramers("no Kramers pair available (integer spin?)".into()))?;
    let va = states.vectors.column(a).into_owned();
    let vb = states.vectors.column(b).into_owned();
    let theta_a = time_reverse(basis, &va)?;
    let overlap = vb.dotc(&theta_a).norm();
    if (1.0 - overlap).abs() > KRAMERS_PAIR_THRESHOLD.max(1e-6) {
        return Err(CasqError::Kramers(format!(
            "ground pair is not time-reversal related (|<b|Θa>| = {overlap:.8})"
        )));
    }
    let z = zeeman_matrices(basis, multiplets, props, n_elec, n_orb)?;
    let u = DMatrix::from_columns(&[va, vb]);
    let sigma = pauli();
    let mut g = Matrix3::zeros();
    for k in 0..3 {
        let lam = u.adjoint() * &z[k] * &u;
        let lam = Matrix2::new(lam[(0, 0)], lam[(0, 1)], lam[(1, 0)], lam[(1, 1)]);
        for l in 0..3 {
            g[(k, l)] = (lam * sigma[l]).trace().re;
        }
    }
    Ok(GTensor::from_matrix(g, GMethod::Eha))
}

/// Second-order g-shift from spin-free states at M_S = S.
///
/// `Δg_kl = (1/S) Σ_b [a_k(0b) c_l(b0) + c_k(0b) a_l(b0)] / (E_b − E_0)` with
/// `a_k = Σ L_k[p,q] γ_pq` (spin-traced) and `c_l = Σ Z_l[p,q] (γ^α − γ^β)_pq / 2`.
/// Only excited multiplets with the ground spin contribute.
pub fn g_tensor_sos(
    ground: &Multiplet,
    excited: &[Multiplet],
    props: &PropertyIntegrals,
    n_elec: usize,
    n_orb: usize,
) -> Result<GTensor> {
    if ground.twice_s == 0 {
        return Err(CasqError::Invalid(
            "g-tensor needs a ground state with S > 0".into(),
        ));
    }
    let s = ground.spin();
    let ms2 = ground.twice_s as i32;
    let space = CasSpace::new(n_elec, n_orb, ms2)?;
    let g0 = &ground.top().coeffs;
    let mut dg = Matrix3::zeros();
    for b in excited.iter().filter(|b| b.twice_s == ground.twice_s) {
        let delta = b.energy - ground.energy;
        if delta < SOS_DEGENERACY_TOL {
            return Err(CasqError::DegenerateGround(delta));
        }
        let gb = &b.top().coeffs;
        let spin_density = |bra: &[f64], ket: &[f64]| {
            (transition_density(&space, bra, &space, ket, Spin::Alpha, Spin::Alpha)
                - transition_density(&space, bra, &space, ket, Spin::Beta, Spin::Beta))
                * 0.5
        };
        let t0b = transition_density_spin_traced(&space, g0, gb);
        let tb0 = transition_density_spin_traced(&space, gb, g0);
        let s0b = spin_density(g0, gb);
        let sb0 = spin_density(gb, g0);
        let a0b: [f64; 3] = std::array::from_fn(|k| props.l[k].component_mul(&t0b).sum());
        let ab0: [f64; 3] = std::array::from_fn(|k| props.l[k].component_mul(&tb0).sum());
        let c0b: [f64; 3] = std::array::from_fn(|k| props.z[k].component_mul(&s0b).sum());
        let cb0: [f64; 3] = std::array::from_fn(|k| props.z[k].component_mul(&sb0).sum());
        for k in 0..3 {
            for l in 0..3 {
                dg[(k, l)] += (a0b[k] * cb0[l] + c0b[k] * ab0[l]) / delta;
            }
        }
    }
    let g = Matrix3::identity() * G_ELECTRON + dg / s;
    Ok(GTensor::from_matrix(g, GMethod::Sos))
}
