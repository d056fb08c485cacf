//! Inputs: integrals, property matrices, the ligand-field model and run configuration.

mod config;
mod fcidump;
mod ligand_field;
mod model;
mod property;

pub use config::{parse_run_config, RunConfig, SpectrumConfig};
pub use fcidump::{parse_fcidump, write_fcidump, Fcidump};
pub use ligand_field::{
    build_ligand_field_model, d_orbital_angular_momentum, d_shell_eri, wigner_3j, LigandFieldBuild,
    LigandFieldModel, LigandFieldPreset, D_ORBITAL_LABELS,
};
pub use model::random_integrals;
pub use property::{parse_property_integrals, write_property_integrals, PropertyIntegrals};

use nalgebra::DMatrix;

use crate::error::{CasqError, Result};

/// Active orbitals: count, labels and the frozen-core energy.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitalSpace {
    pub n_orb: usize,
    pub labels: Vec<String>,
    pub core_energy: f64,
}

impl OrbitalSpace {
    pub fn new(n_orb: usize, labels: Vec<String>, core_energy: f64) -> Result<Self> {
        if n_orb == 0 {
            return Err(CasqError::Invalid(
                "orbital space must hold at least one orbital".into(),
            ));
        }
        if labels.len() != n_orb {
            return Err(CasqError::Invalid(format!(
                "{} labels for {n_orb} orbitals",
                labels.len()
            )));
        }
        Ok(OrbitalSpace {
            n_orb,
            labels,
            core_energy,
        })
    }

    pub fn numbered(n_orb: usize, core_energy: f64) -> Self {
        OrbitalSpace {
            n_orb,
            labels: (1..=n_orb).map(|i| format!("orb{i}")).collect(),
            core_energy,
        }
    }
}

/// One- and two-electron Hamiltonian integrals over the active orbitals (Hartree).
///
/// Two-electron integrals are stored densely in chemist notation `(pq|rs)`;
/// [`IntegralSet::set_g2`] writes all eight permutational images.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSet {
    n_orb: usize,
    h: DMatrix<f64>,
    g2: Vec<f64>,
    pub core_energy: f64,
}

impl IntegralSet {
    pub fn zeros(n_orb: usize) -> Self {
        IntegralSet {
            n_orb,
            h: DMatrix::zeros(n_orb, n_orb),
            g2: vec![0.0; n_orb.pow(4)],
            core_energy: 0.0,
        }
    }

    pub fn n_orb(&self) -> usize {
        self.n_orb
    }

    #[inline]
    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h[(p, q)]
    }

    pub fn h_matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn set_h(&mut self, p: usize, q: usize, v: f64) {
        self.h[(p, q)] = v;
        self.h[(q, p)] = v;
    }

    #[inline]
    fn idx(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        let n = self.n_orb;
        ((p * n + q) * n + r) * n + s
    }

    #[inline]
    pub fn g2(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.g2[self.idx(p, q, r, s)]
    }

    /// Flat `(pq|rs)` storage, index `((p n + q) n + r) n + s`.
    pub fn g2_raw(&self) -> &[f64] {
        &self.g2
    }

    pub fn set_g2(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            let i = self.idx(a, b, c, d);
            self.g2[i] = v;
        }
    }

    /// Largest deviation from the 8-fold permutational symmetry and from `h = hᵀ`.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n_orb;
        let mut worst: f64 = 0.0;
        for p in 0..n {
            for q in 0..n {
                worst = worst.max((self.h(p, q) - self.h(q, p)).abs());
                for r in 0..n {
                    for s in 0..n {
                        let v = self.g2(p, q, r, s);
                        for w in [
                            self.g2(q, p, r, s),
                            self.g2(p, q, s, r),
                            self.g2(r, s, p, q),
                        ] {
                            worst = worst.max((v - w).abs());
                        }
                    }
                }
            }
        }
        worst
    }

    /// Apply an orthogonal orbital rotation: new orbital `i = Σ_p u[(p, i)] |p>`.
    pub fn rotated(&self, u: &DMatrix<f64>) -> IntegralSet {
        let n = self.n_orb;
        let h = u.transpose() * &self.h * u;
        // quarter transformations, one index at a time
        let mut cur = self.g2.clone();
        for axis in 0..4 {
            let mut next = vec![0.0; cur.len()];
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let mut acc = 0.0;
                            for x in 0..n {
                                let (ia, ib, ic, id) = match axis {
                                    0 => (x, b, c, d),
                                    1 => (a, x, c, d),
                                    2 => (a, b, x, d),
                                    _ => (a, b, c, x),
                                };
                                let target = [a, b, c, d][axis];
                                acc += u[(x, target)] * cur[((ia * n + ib) * n + ic) * n + id];
                            }
                            next[((a * n + b) * n + c) * n + d] = acc;
                        }
                    }
                }
            }
            cur = next;
        }
        IntegralSet {
            n_orb: n,
            h,
            g2: cur,
            core_energy: self.core_energy,
        }
    }

    /// Copy into a larger orbital space; the extra orbitals carry no integrals.
    pub fn padded(&self, n_new: usize) -> IntegralSet {
        assert!(n_new >= self.n_orb);
        let mut out = IntegralSet::zeros(n_new);
        out.core_energy = self.core_energy;
        let n = self.n_orb;
        for p in 0..n {
            for q in 0..n {
                out.h[(p, q)] = self.h(p, q);
                for r in 0..n {
                    for s in 0..n {
                        let i = out.idx(p, q, r, s);
                        out.g2[i] = self.g2(p, q, r, s);
                    }
                }
            }
        }
        out
    }
}
