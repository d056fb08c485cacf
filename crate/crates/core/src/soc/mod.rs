//! Spin-orbit coupling over multiplet components, QDPT, Kramers pairing and
//! g-tensor extraction.
//!
//! Complex arithmetic stays inside this module; CI vectors are real.

mod gap;
mod gtensor;
mod matrix;
mod qdpt;

pub use gap::{gap_report, GapReport, GapRow};
pub use gtensor::{g_tensor_eha, g_tensor_sos, GMethod, GTensor, SOS_DEGENERACY_TOL};
pub use matrix::{soc_matrix, spin_matrix, zeeman_matrices, HERMITICITY_THRESHOLD};
pub use qdpt::{qdpt, time_reverse, SoEigenstates, KRAMERS_DEGENERACY_TOL, KRAMERS_PAIR_THRESHOLD};

use serde::{Deserialize, Serialize};

use crate::casci::Multiplet;
use crate::error::{CasqError, Result};

/// One spin component of one multiplet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SocEntry {
    /// Position of the multiplet in the slice the basis was built from.
    pub multiplet: usize,
    pub twice_s: u32,
    pub ms2: i32,
}

/// Ordered spin-component basis for the spin-orbit problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocStateBasis {
    pub entries: Vec<SocEntry>,
}

impl SocStateBasis {
    /// Every component of every multiplet, multiplet-major, M_S descending.
    pub fn from_multiplets(multiplets: &[Multiplet]) -> Self {
        Self::select(multiplets, &(0..multiplets.len()).collect::<Vec<_>>())
            .expect("indices are in range")
    }

    /// Components of the chosen multiplets only.
    pub fn select(multiplets: &[Multiplet], which: &[usize]) -> Result<Self> {
        let mut entries = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for &m in which {
            let mult = multiplets
                .get(m)
                .ok_or_else(|| CasqError::Invalid(format!("multiplet {m} out of range")))?;
            if !seen.insert(m) {
                return Err(CasqError::Invalid(format!("multiplet {m} listed twice")));
            }
            for c in &mult.components {
                entries.push(SocEntry {
                    multiplet: m,
                    twice_s: mult.twice_s,
                    ms2: c.ms2,
                });
            }
        }
        Ok(SocStateBasis { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Spin-free energies on the diagonal.
    pub fn diagonal_energies(&self, multiplets: &[Multiplet]) -> Vec<f64> {
        self.entries
            .iter()
            .map(|e| multiplets[e.multiplet].energy)
            .collect()
    }

    pub fn position(&self, multiplet: usize, ms2: i32) -> Option<usize> {
        self.entries
            .iter()
            .position(|e| e.multiplet == multiplet && e.ms2 == ms2)
    }

    /// True when every entry carries half-integer spin (odd electron count).
    pub fn is_half_integer(&self) -> bool {
        !self.entries.is_empty() && self.entries.iter().all(|e| e.twice_s % 2 == 1)
    }
}

/// Spin-orbit coupling, QDPT and both g-tensors for one set of multiplets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SocAnalysis {
    pub basis: SocStateBasis,
    pub states: SoEigenstates,
    /// Present for odd electron counts.
    pub g_eha: Option<GTensor>,
    /// Present for odd electron counts with at least one same-spin excited multiplet.
    pub g_sos: Option<GTensor>,
}

impl SocAnalysis {
    /// Run over every component of `multiplets`; the lowest multiplet is the
    /// ground state for the sum-over-states tensor.
    pub fn run(
        multiplets: &[Multiplet],
        props: &crate::ingest::PropertyIntegrals,
        n_elec: usize,
        n_orb: usize,
    ) -> Result<Self> {
        if multiplets.is_empty() {
            return Err(CasqError::Invalid("no multiplets to couple".into()));
        }
        let basis = SocStateBasis::from_multiplets(multiplets);
        let soc = soc_matrix(&basis, multiplets, props, n_elec, n_orb)?;
        let states = qdpt(&basis, &basis.diagonal_energies(multiplets), &soc)?;
        let (g_eha, g_sos) = if n_elec % 2 == 1 {
            let eha = g_tensor_eha(&basis, multiplets, &states, props, n_elec, n_orb)?;
            let mut sorted: Vec<&Multiplet> = multiplets.iter().collect();
            sorted.sort_by(|a, b| a.energy.total_cmp(&b.energy));
            let ground = sorted[0];
            let excited: Vec<Multiplet> = sorted[1..].iter().map(|m| (*m).clone()).collect();
            let sos = if excited.iter().any(|m| m.twice_s == ground.twice_s) {
                Some(g_tensor_sos(ground, &excited, props, n_elec, n_orb)?)
            } else {
                None
            };
            (Some(eha), sos)
        } else {
            (None, None)
        };
        Ok(SocAnalysis {
            basis,
            states,
            g_eha,
            g_sos,
        })
    }
}
