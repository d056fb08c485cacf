//! One-particle (transition) density matrices and natural occupations.

use nalgebra::DMatrix;

use crate::detspace::{occupied, CasSpace, Spin};
use crate::error::{CasqError, Result};
use crate::par;

/// Spin-traced one-particle density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RdmOne {
    pub matrix: DMatrix<f64>,
}

impl RdmOne {
    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }
}

const CHUNK: usize = 4096;

/// `γ[p][q] = <bra| a†_{p,σ} a_{q,σ'} |ket>` with σ = `create`, σ' = `annihilate`.
///
/// `bra` lives in `bra_space`, `ket` in `ket_space`; their M_S must differ by
/// the spin change of the operator, otherwise the result is zero.
pub fn transition_density(
    bra_space: &CasSpace,
    bra: &[f64],
    ket_space: &CasSpace,
    ket: &[f64],
    create: Spin,
    annihilate: Spin,
) -> DMatrix<f64> {
    let n = ket_space.n_orb();
    let shift = match (create, annihilate) {
        (Spin::Alpha, Spin::Beta) => 2,
        (Spin::Beta, Spin::Alpha) => -2,
        _ => 0,
    };
    if bra_space.ms2() != ket_space.ms2() + shift || bra_space.n_elec() != ket_space.n_elec() {
        return DMatrix::zeros(n, n);
    }
    let n_chunks = ket_space.len().div_ceil(CHUNK);
    let partials = par::map_range(n_chunks, par::DEFAULT_PARALLEL, |c| {
        let mut g = vec![0.0; n * n];
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(ket_space.len());
        for (k, &ck) in ket.iter().enumerate().take(hi).skip(lo) {
            if ck == 0.0 {
                continue;
            }
            let det = ket_space.det(k);
            for q in occupied(det.string(annihilate)) {
                let Some((d1, s1)) = det.annihilate(q, annihilate) else {
                    continue;
                };
                for p in 0..n {
                    let Some((d2, s2)) = d1.create(p, create) else {
                        continue;
                    };
                    if let Some(t) = bra_space.index(&d2) {
                        g[p * n + q] += s1 * s2 * bra[t] * ck;
                    }
                }
            }
        }
        g
    });
    let mut total = vec![0.0; n * n];
    for part in partials {
        for (t, v) in total.iter_mut().zip(part) {
            *t += v;
        }
    }
    DMatrix::from_row_slice(n, n, &total)
}

/// `<bra| E_pq |ket>` with `E_pq = Σ_σ a†_{pσ} a_{qσ}`, both states in `space`.
pub fn transition_density_spin_traced(space: &CasSpace, bra: &[f64], ket: &[f64]) -> DMatrix<f64> {
    transition_density(space, bra, space, ket, Spin::Alpha, Spin::Alpha)
        + transition_density(space, bra, space, ket, Spin::Beta, Spin::Beta)
}

/// Weighted state-averaged density `Σ_i w_i <Ψ_i|E_pq|Ψ_i>`.
pub fn one_rdm(space: &CasSpace, states: &[&[f64]], weights: &[f64]) -> Result<RdmOne> {
    if states.len() != weights.len() {
        return Err(CasqError::Invalid(format!(
            "{} states but {} weights",
            states.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|&w| w < 0.0) {
        return Err(CasqError::Invalid("negative averaging weight".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(CasqError::Invalid(format!("weights sum to {total}, not 1")));
    }
    let n = space.n_orb();
    let mut m = DMatrix::zeros(n, n);
    for (v, &w) in states.iter().zip(weights) {
        if v.len() != space.len() {
            return Err(CasqError::Dimension {
                expected: space.len(),
                got: v.len(),
            });
        }
        if w != 0.0 {
            m += transition_density_spin_traced(space, v, v) * w;
        }
    }
    Ok(RdmOne { matrix: m })
}

/// Eigenvalues of the density matrix, largest first.
pub fn natural_occupations(rdm: &RdmOne) -> Result<Vec<f64>> {
    let m = &rdm.matrix;
    let asym = (m - m.transpose()).amax();
    if asym > 1e-10 {
        return Err(CasqError::Symmetry {
            what: "one-particle density".into(),
            residual: asym,
            threshold: 1e-10,
        });
    }
    let (mut occ, _) = crate::linalg::symmetric_eigen(&((m + m.transpose()) * 0.5))?;
    occ.sort_by(|a, b| b.total_cmp(a));
    for v in occ.iter_mut() {
        if *v < 0.0 || *v > 2.0 {
            let overshoot = if *v < 0.0 { -*v } else { *v - 2.0 };
            if overshoot >= 1e-10 {
                return Err(CasqError::Invariant(format!(
                    "natural occupation {v} outside [0, 2]"
                )));
            }
            *v = v.clamp(0.0, 2.0);
        }
    }
    Ok(occ)
}
