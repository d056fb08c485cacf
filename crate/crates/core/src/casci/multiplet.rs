//! Spin multiplets assembled from top-M_S roots by repeated lowering.
//!
//! Lowering with `S⁻ / √(S(S+1) − M(M−1))` gives every component the
//! Condon–Shortley phase relative to the M_S = S root, which is what the
//! spin-orbit matrix and the Zeeman matrices assume.

use serde::{Deserialize, Serialize};

use super::davidson::{DavidsonConfig, LinearOperator};
use super::hamiltonian::HamiltonianOperator;
use super::solver::solve_spin_states;
use super::spin::apply_s_minus;
use super::{dot, CiState};
use crate::detspace::CasSpace;
use crate::error::{CasqError, Result};
use crate::ingest::IntegralSet;

/// Default agreement required between component energies (Hartree).
pub const MULTIPLET_ENERGY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multiplet {
    pub id: usize,
    /// 2S.
    pub twice_s: u32,
    /// Hartree.
    pub energy: f64,
    /// Components ordered M_S = S, S−1, …, −S.
    pub components: Vec<CiState>,
}

impl Multiplet {
    pub fn multiplicity(&self) -> u32 {
        self.twice_s + 1
    }

    pub fn spin(&self) -> f64 {
        self.twice_s as f64 / 2.0
    }

    /// Component with the given 2·M_S.
    pub fn component(&self, ms2: i32) -> Option<&CiState> {
        let k = (self.twice_s as i32 - ms2) / 2;
        if (self.twice_s as i32 - ms2) % 2 != 0 || k < 0 {
            return None;
        }
        self.components.get(k as usize)
    }

    pub fn top(&self) -> &CiState {
        &self.components[0]
    }
}

/// Build multiplets from states solved at M_S = S.
///
/// Each lower component is produced with [`apply_s_minus`] and normalized;
/// its Rayleigh quotient must reproduce the top energy within `tol`.
pub fn assemble_multiplets(
    n_elec: usize,
    n_orb: usize,
    ints: &IntegralSet,
    top_states: &[CiState],
    tol: f64,
) -> Result<Vec<Multiplet>> {
    let mut sorted: Vec<&CiState> = top_states.iter().collect();
    sorted.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let mut out = Vec::with_capacity(sorted.len());
    for (id, state) in sorted.into_iter().enumerate() {
        let twice_s = state.twice_s();
        if state.ms2 != twice_s as i32 {
            return Err(CasqError::Multiplet(format!(
                "state at 2M_S = {} is not the top component of 2S+1 = {}",
                state.ms2, state.multiplicity
            )));
        }
        let mut components = vec![state.clone()];
        let mut space = CasSpace::new(n_elec, n_orb, state.ms2)?;
        let mut current = state.coeffs.clone();
        for _ in 0..twice_s {
            let m = space.ms2() as f64 / 2.0;
            let s = twice_s as f64 / 2.0;
            let expected = s * (s + 1.0) - m * (m - 1.0);
            let (down, mut w) = apply_s_minus(&space, &current)?;
            let norm2 = dot(&w, &w);
            if (norm2 - expected).abs() > 1e-6 * expected.max(1.0) {
                return Err(CasqError::Multiplet(format!(
                    "|S⁻ψ|² = {norm2:.8} but S(S+1) − M(M−1) = {expected:.8}; state is not a pure spin eigenfunction"
                )));
            }
            let n = norm2.sqrt();
            w.iter_mut().for_each(|x| *x /= n);
            let op = HamiltonianOperator::new(&down, ints);
            let mut hw = vec![0.0; w.len()];
            op.apply(&w, &mut hw);
            let e = dot(&w, &hw);
            if (e - state.energy).abs() > tol {
                return Err(CasqError::Multiplet(format!(
                    "component 2M_S = {} has energy {e:.12} vs {:.12} (root mixing?)",
                    down.ms2(),
                    state.energy
                )));
            }
            components.push(CiState {
                energy: e,
                coeffs: w.clone(),
                ms2: down.ms2(),
                s2_expect: state.s2_expect,
                multiplicity: state.multiplicity,
            });
            current = w;
            space = down;
        }
        out.push(Multiplet {
            id,
            twice_s,
            energy: state.energy,
            components,
        });
    }
    Ok(out)
}

/// Solve every requested multiplicity at M_S = S and assemble the multiplets,
/// sorted by energy with ids in that order.
pub fn solve_multiplets(
    n_elec: usize,
    n_orb: usize,
    ints: &IntegralSet,
    roots_per_multiplicity: &std::collections::BTreeMap<u32, usize>,
    cfg: &DavidsonConfig,
) -> Result<Vec<Multiplet>> {
    let mut tops = Vec::new();
    for (&mult, &n) in roots_per_multiplicity {
        tops.extend(solve_spin_states(n_elec, n_orb, ints, mult, n, cfg)?);
    }
    assemble_multiplets(n_elec, n_orb, ints, &tops, MULTIPLET_ENERGY_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::casci::{solve_spin_states, DavidsonConfig};
    use crate::ingest::random_integrals;

    #[test]
    fn doublet_and_quartet_components() {
        let ints = random_integrals(5, 21);
        let cfg = DavidsonConfig {
            tol: 1e-9,
            ..DavidsonConfig::default()
        };
        let mut tops = solve_spin_states(3, 5, &ints, 2, 2, &cfg).unwrap();
        tops.extend(solve_spin_states(3, 5, &ints, 4, 1, &cfg).unwrap());
        let mults = assemble_multiplets(3, 5, &ints, &tops, MULTIPLET_ENERGY_TOL).unwrap();
        assert_eq!(mults.len(), 3);
        for m in &mults {
            assert_eq!(m.components.len(), m.multiplicity() as usize);
            let ms: Vec<i32> = m.components.iter().map(|c| c.ms2).collect();
            let expect: Vec<i32> = (0..=m.twice_s as i32)
                .map(|k| m.twice_s as i32 - 2 * k)
                .collect();
            assert_eq!(ms, expect);
            for c in &m.components {
                assert!((c.energy - m.energy).abs() < 1e-8);
                assert!((c.norm() - 1.0).abs() < 1e-12);
            }
            assert!(m.component(-(m.twice_s as i32)).is_some());
        }
        assert!(mults.windows(2).all(|w| w[0].energy <= w[1].energy));
    }

    #[test]
    fn rejects_non_top_state() {
        let ints = random_integrals(3, 2);
        let space = CasSpace::new(3, 3, 1).unwrap();
        let st =
            crate::casci::solve_davidson(&space, &ints, 1, &DavidsonConfig::default()).unwrap();
        let mut bad = st[0].clone();
        bad.multiplicity = 4;
        assert!(assemble_multiplets(3, 3, &ints, &[bad], 1e-8).is_err());
    }
}
