//! Complete-active-space CI: Hamiltonian action, eigensolvers, spin, multiplets
//! and wave-function analysis.

mod davidson;
mod decompose;
mod dense;
mod hamiltonian;
mod multiplet;
mod rdm;
mod sigma;
mod solver;
mod spin;

pub use davidson::{davidson, DavidsonConfig, DavidsonOutcome, LinearOperator};
pub use decompose::{decompose, format_decomposition, DecompositionLine};
pub use dense::{dense_hamiltonian, dense_solve, DEFAULT_DENSE_CAP};
pub use hamiltonian::{diagonal_energy, hamiltonian_element, HamiltonianOperator};
pub use multiplet::{assemble_multiplets, solve_multiplets, Multiplet, MULTIPLET_ENERGY_TOL};
pub use rdm::{
    natural_occupations, one_rdm, transition_density, transition_density_spin_traced, RdmOne,
};
pub use sigma::{sigma, sigma_sequential, SigmaEngine};
pub use solver::{available_states, solve_davidson, solve_spin_states, SpinProjectedOperator};
pub use spin::{
    apply_s_minus, apply_s_plus, apply_s_squared, max_twice_s, multiplicity_from_s2, project_spin,
    s_squared,
};

use serde::{Deserialize, Serialize};

/// One CI eigenvector in a fixed-M_S determinant space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CiState {
    /// Hartree.
    pub energy: f64,
    pub coeffs: Vec<f64>,
    pub ms2: i32,
    pub s2_expect: f64,
    /// 2S+1 nearest to `s2_expect`.
    pub multiplicity: u32,
}

impl CiState {
    /// Twice the spin quantum number implied by the multiplicity label.
    pub fn twice_s(&self) -> u32 {
        self.multiplicity - 1
    }

    /// |<S²> − S(S+1)| for the labelled S.
    pub fn spin_contamination(&self) -> f64 {
        let s = self.twice_s() as f64 / 2.0;
        (self.s2_expect - s * (s + 1.0)).abs()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}
