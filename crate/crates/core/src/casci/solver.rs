//! CI root solvers built on the Davidson kernel.

use nalgebra::DMatrix;

use super::davidson::{davidson, DavidsonConfig, LinearOperator};
use super::hamiltonian::HamiltonianOperator;
use super::spin::{multiplicity_from_s2, project_spin, s_squared};
use super::{dot, CiState};
use crate::detspace::{count_determinants, CasSpace};
use crate::error::{CasqError, Result};
use crate::ingest::IntegralSet;

fn to_states(
    space: &CasSpace,
    ints: &IntegralSet,
    vectors: Vec<Vec<f64>>,
    energies: Option<&[f64]>,
) -> Result<Vec<CiState>> {
    let op = HamiltonianOperator::new(space, ints);
    vectors
        .into_iter()
        .enumerate()
        .map(|(i, coeffs)| {
            let energy = match energies {
                Some(e) => e[i],
                None => {
                    let mut hv = vec![0.0; coeffs.len()];
                    op.apply(&coeffs, &mut hv);
                    dot(&coeffs, &hv)
                }
            };
            let s2 = s_squared(space, &coeffs)?;
            Ok(CiState {
                energy,
                ms2: space.ms2(),
                multiplicity: multiplicity_from_s2(s2),
                s2_expect: s2,
                coeffs,
            })
        })
        .collect()
}

/// Lowest `n_roots` eigenstates of H in `space`, whatever their spin.
pub fn solve_davidson(
    space: &CasSpace,
    ints: &IntegralSet,
    n_roots: usize,
    cfg: &DavidsonConfig,
) -> Result<Vec<CiState>> {
    let op = HamiltonianOperator::new(space, ints);
    let out = davidson(&op, n_roots, cfg)?;
    to_states(space, ints, out.eigenvectors, Some(&out.eigenvalues))
}

/// The Hamiltonian on the M_S = S block with every search direction projected
/// onto spin S. H commutes with S², so the Davidson subspace never leaves the
/// spin-S sector.
pub struct SpinProjectedOperator<'a> {
    inner: HamiltonianOperator<'a>,
    twice_s: u32,
}

impl<'a> SpinProjectedOperator<'a> {
    pub fn new(space: &'a CasSpace, ints: &'a IntegralSet, twice_s: u32) -> Self {
        SpinProjectedOperator {
            inner: HamiltonianOperator::new(space, ints),
            twice_s,
        }
    }
}

impl LinearOperator for SpinProjectedOperator<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.inner.apply(x, y);
    }

    fn diagonal(&self) -> Vec<f64> {
        self.inner.diagonal()
    }

    fn subspace_matrix(&self, idx: &[usize]) -> DMatrix<f64> {
        self.inner.subspace_matrix(idx)
    }

    fn project(&self, v: &mut [f64]) {
        project_spin(self.inner.space, v, self.twice_s)
            .expect("vector lives in the operator space");
    }
}

/// Number of spin-S states available in CAS(n_elec, n_orb).
pub fn available_states(n_elec: usize, n_orb: usize, multiplicity: u32) -> usize {
    let ms2 = multiplicity as i32 - 1;
    let top = count_determinants(n_elec, n_orb, ms2).unwrap_or(0);
    let above = count_determinants(n_elec, n_orb, ms2 + 2).unwrap_or(0);
    top.saturating_sub(above) as usize
}

/// Lowest `n_roots` states of spin multiplicity `multiplicity`, solved in the
/// M_S = S block with a spin penalty that removes higher-spin components.
///
/// Energies are Rayleigh quotients of the bare Hamiltonian.
pub fn solve_spin_states(
    n_elec: usize,
    n_orb: usize,
    ints: &IntegralSet,
    multiplicity: u32,
    n_roots: usize,
    cfg: &DavidsonConfig,
) -> Result<Vec<CiState>> {
    if multiplicity == 0 {
        return Err(CasqError::Invalid("multiplicity must be at least 1".into()));
    }
    let space = CasSpace::new(n_elec, n_orb, multiplicity as i32 - 1)?;
    let available = available_states(n_elec, n_orb, multiplicity);
    if n_roots > available {
        return Err(CasqError::Invalid(format!(
            "{n_roots} states of multiplicity {multiplicity} requested, only {available} exist"
        )));
    }
    if n_roots == 0 {
        return Ok(Vec::new());
    }
    let has_higher = count_determinants(n_elec, n_orb, multiplicity as i32 + 1).unwrap_or(0) > 0;
    if !has_higher {
        return solve_davidson(&space, ints, n_roots, cfg);
    }

    let op = SpinProjectedOperator::new(&space, ints, multiplicity - 1);
    let out = davidson(&op, n_roots, cfg)?;
    let mut states = to_states(&space, ints, out.eigenvectors, Some(&out.eigenvalues))?;
    let s = (multiplicity - 1) as f64 / 2.0;
    if let Some(bad) = states
        .iter()
        .find(|st| (st.s2_expect - s * (s + 1.0)).abs() > 1e-6)
    {
        return Err(CasqError::Invariant(format!(
            "spin projection left <S^2> = {} for multiplicity {multiplicity}",
            bad.s2_expect
        )));
    }
    states.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::casci::dense::{dense_solve, DEFAULT_DENSE_CAP};
    use crate::ingest::random_integrals;

    #[test]
    fn davidson_matches_dense_on_small_space() {
        let ints = random_integrals(5, 9);
        let space = CasSpace::new(4, 5, 0).unwrap();
        let cfg = DavidsonConfig {
            guess_dim: 10,
            tol: 1e-8,
            ..DavidsonConfig::default()
        };
        let d = solve_davidson(&space, &ints, 6, &cfg).unwrap();
        let e = dense_solve(&space, &ints, 6, DEFAULT_DENSE_CAP).unwrap();
        for (a, b) in d.iter().zip(&e) {
            assert!((a.energy - b.energy).abs() < 1e-10);
        }
    }

    #[test]
    fn spin_targeted_doublets_skip_quartets() {
        let ints = random_integrals(6, 4);
        let cfg = DavidsonConfig {
            guess_dim: 30,
            tol: 1e-8,
            ..DavidsonConfig::default()
        };
        let doublets = solve_spin_states(5, 6, &ints, 2, 6, &cfg).unwrap();
        let quartets = solve_spin_states(5, 6, &ints, 4, 3, &cfg).unwrap();
        for st in &doublets {
            assert!((st.s2_expect - 0.75).abs() < 1e-6);
            assert_eq!(st.multiplicity, 2);
        }
        for st in &quartets {
            assert!((st.s2_expect - 3.75).abs() < 1e-6);
        }
        // dense reference in the M_S = 1/2 block, labelled by spin
        let space = CasSpace::new(5, 6, 1).unwrap();
        let all = dense_solve(&space, &ints, space.len(), DEFAULT_DENSE_CAP).unwrap();
        let ref_d: Vec<f64> = all
            .iter()
            .filter(|s| s.multiplicity == 2)
            .map(|s| s.energy)
            .take(6)
            .collect();
        let ref_q: Vec<f64> = all
            .iter()
            .filter(|s| s.multiplicity == 4)
            .map(|s| s.energy)
            .take(3)
            .collect();
        for (a, b) in doublets.iter().zip(&ref_d) {
            assert!((a.energy - b).abs() < 1e-9, "{} vs {b}", a.energy);
        }
        for (a, b) in quartets.iter().zip(&ref_q) {
            assert!((a.energy - b).abs() < 1e-9);
        }
    }

    #[test]
    fn too_many_states_of_a_multiplicity() {
        let ints = random_integrals(5, 1);
        assert_eq!(available_states(1, 5, 2), 5);
        assert!(solve_spin_states(1, 5, &ints, 2, 6, &DavidsonConfig::default()).is_err());
        assert!(solve_spin_states(1, 5, &ints, 4, 1, &DavidsonConfig::default()).is_err());
    }
}
