//! d-shell ligand-field model Hamiltonian.
//!
//! Real d orbitals are always ordered (d_z², d_xz, d_yz, d_x²−y², d_xy).
//! Electron repulsion is built from Slater–Condon parameters expressed through
//! Racah B and C (A = 0), using Gaunt coefficients in the complex |m> basis and
//! a unitary transformation to real orbitals.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix5};
use num_complex::Complex64;

use super::config::RunConfig;
use super::{IntegralSet, OrbitalSpace, PropertyIntegrals};
use crate::detspace::count_determinants;
use crate::error::{CasqError, Result};
use crate::units::{cm_to_hartree, ev_to_hartree};

pub const D_ORBITAL_LABELS: [&str; 5] = ["d_z2", "d_xz", "d_yz", "d_x2-y2", "d_xy"];

/// Parameters of the d-shell model.
#[derive(Debug, Clone, PartialEq)]
pub struct LigandFieldModel {
    /// One-electron ligand-field matrix over real d orbitals (eV).
    pub v_lf: Matrix5<f64>,
    /// Racah B (eV).
    pub racah_b: f64,
    /// Racah C (eV).
    pub racah_c: f64,
    /// Spin-orbit constant ζ (cm⁻¹).
    pub zeta: f64,
    pub n_elec: usize,
}

/// Built-in illustrative parameter sets. Not fitted to any molecule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LigandFieldPreset {
    /// VO²⁺-like square pyramid: d_xy ground orbital, d¹.
    D1Tetragonal,
    /// Cu²⁺-like square plane: hole in d_x²−y², d⁹.
    D9Planar,
}

impl LigandFieldPreset {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "d1" | "d1-tetragonal" => Ok(LigandFieldPreset::D1Tetragonal),
            "d9" | "d9-planar" => Ok(LigandFieldPreset::D9Planar),
            other => Err(CasqError::Invalid(format!(
                "unknown ligand-field preset '{other}' (expected d1-tetragonal or d9-planar)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LigandFieldPreset::D1Tetragonal => "d1-tetragonal",
            LigandFieldPreset::D9Planar => "d9-planar",
        }
    }

    pub fn model(&self) -> LigandFieldModel {
        match self {
            // orbital energies in eV, order z², xz, yz, x²−y², xy
            LigandFieldPreset::D1Tetragonal => LigandFieldModel {
                v_lf: Matrix5::from_diagonal(&nalgebra::Vector5::new(3.5, 1.6, 1.6, 2.1, 0.0)),
                racah_b: 0.08,
                racah_c: 0.32,
                zeta: 248.0,
                n_elec: 1,
            },
            LigandFieldPreset::D9Planar => LigandFieldModel {
                v_lf: Matrix5::from_diagonal(&nalgebra::Vector5::new(-2.0, -2.2, -2.2, 0.0, -1.9)),
                racah_b: 0.1,
                racah_c: 0.4,
                zeta: 829.0,
                n_elec: 9,
            },
        }
    }
}

/// Everything the model produces.
#[derive(Debug, Clone)]
pub struct LigandFieldBuild {
    pub orbitals: OrbitalSpace,
    pub integrals: IntegralSet,
    pub properties: PropertyIntegrals,
    pub config: RunConfig,
}

fn factorial(n: i64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Wigner 3j symbol for integer angular momenta (Racah formula).
pub fn wigner_3j(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    if m1 + m2 + m3 != 0
        || j3 < (j1 - j2).abs()
        || j3 > j1 + j2
        || m1.abs() > j1
        || m2.abs() > j2
        || m3.abs() > j3
    {
        return 0.0;
    }
    let tri = factorial(j1 + j2 - j3) * factorial(j1 - j2 + j3) * factorial(-j1 + j2 + j3)
        / factorial(j1 + j2 + j3 + 1);
    let pre = (tri
        * factorial(j1 + m1)
        * factorial(j1 - m1)
        * factorial(j2 + m2)
        * factorial(j2 - m2)
        * factorial(j3 + m3)
        * factorial(j3 - m3))
    .sqrt();
    let kmin = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let kmax = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let den = factorial(k)
            * factorial(j1 + j2 - j3 - k)
            * factorial(j1 - m1 - k)
            * factorial(j2 + m2 - k)
            * factorial(j3 - j2 + m1 + k)
            * factorial(j3 - j1 - m2 + k);
        sum += if k % 2 == 0 { 1.0 } else { -1.0 } / den;
    }
    let phase = if (j1 - j2 - m3).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    phase * pre * sum
}

/// Gaunt coefficient c^k(l m, l m') for l = 2.
fn gaunt_d(k: i64, m: i64, mp: i64) -> f64 {
    let l = 2;
    let phase = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * (2 * l + 1) as f64 * wigner_3j(l, k, l, 0, 0, 0) * wigner_3j(l, k, l, -m, m - mp, mp)
}

/// Columns express real d orbitals in the complex basis m = −2..2 (row m + 2).
fn real_from_complex() -> DMatrix<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let mut u = DMatrix::from_element(5, 5, c(0.0, 0.0));
    // d_z²
    u[(2, 0)] = c(1.0, 0.0);
    // d_xz = (|−1> − |1>)/√2
    u[(1, 1)] = c(s, 0.0);
    u[(3, 1)] = c(-s, 0.0);
    // d_yz = i(|−1> + |1>)/√2
    u[(1, 2)] = c(0.0, s);
    u[(3, 2)] = c(0.0, s);
    // d_x²−y² = (|2> + |−2>)/√2
    u[(4, 3)] = c(s, 0.0);
    u[(0, 3)] = c(s, 0.0);
    // d_xy = −i(|2> − |−2>)/√2
    u[(4, 4)] = c(0.0, -s);
    u[(0, 4)] = c(0.0, s);
    u
}

/// Imaginary parts of `<p|l_k|q>` over real d orbitals, k = x, y, z.
pub fn d_orbital_angular_momentum() -> [DMatrix<f64>; 3] {
    let l = 2.0f64;
    let mut lz = DMatrix::from_element(5, 5, Complex64::new(0.0, 0.0));
    let mut lp = lz.clone();
    for i in 0..5 {
        let m = i as f64 - 2.0;
        lz[(i, i)] = Complex64::new(m, 0.0);
        if i < 4 {
            lp[(i + 1, i)] = Complex64::new((l * (l + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let lm = lp.adjoint();
    let lx = (&lp + &lm) * Complex64::new(0.5, 0.0);
    let ly = (&lp - &lm) * Complex64::new(0.0, -0.5);
    let u = real_from_complex();
    let ud = u.adjoint();
    [lx, ly, lz].map(|op| {
        let real = &ud * op * &u;
        DMatrix::from_fn(5, 5, |p, q| real[(p, q)].im)
    })
}

/// Two-electron integrals `(pq|rs)` over real d orbitals for Racah A = 0, B, C
/// (any consistent energy unit).
pub fn d_shell_eri(racah_b: f64, racah_c: f64) -> Vec<f64> {
    let f0 = 7.0 * racah_c / 5.0;
    let f2 = 49.0 * racah_b + 7.0 * racah_c;
    let f4 = 63.0 * racah_c / 5.0;
    let slater = [(0, f0), (2, f2), (4, f4)];

    // complex-basis integrals (m1 m2|m3 m4) = <m1 m3|m2 m4>
    let idx = |a: usize, b: usize, c: usize, d: usize| ((a * 5 + b) * 5 + c) * 5 + d;
    let mut cplx = vec![0.0f64; 625];
    for a in 0..5 {
        for b in 0..5 {
            for c in 0..5 {
                for d in 0..5 {
                    let (m1, m2, m3, m4) = (a as i64 - 2, b as i64 - 2, c as i64 - 2, d as i64 - 2);
                    if m1 + m3 != m2 + m4 {
                        continue;
                    }
                    cplx[idx(a, b, c, d)] = slater
                        .iter()
                        .map(|&(k, fk)| gaunt_d(k, m1, m2) * gaunt_d(k, m4, m3) * fk)
                        .sum();
                }
            }
        }
    }

    let u = real_from_complex();
    let mut real = vec![0.0f64; 625];
    for p in 0..5 {
        for q in 0..5 {
            for r in 0..5 {
                for s in 0..5 {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for a in 0..5 {
                        let ua = u[(a, p)].conj();
                        if ua.norm_sqr() == 0.0 {
                            continue;
                        }
                        for b in 0..5 {
                            let ub = u[(b, q)];
                            if ub.norm_sqr() == 0.0 {
                                continue;
                            }
                            for c in 0..5 {
                                let uc = u[(c, r)].conj();
                                if uc.norm_sqr() == 0.0 {
                                    continue;
                                }
                                for d in 0..5 {
                                    let v = cplx[idx(a, b, c, d)];
                                    if v == 0.0 {
                                        continue;
                                    }
                                    acc += ua * ub * uc * u[(d, s)] * v;
                                }
                            }
                        }
                    }
                    real[idx(p, q, r, s)] = acc.re;
                }
            }
        }
    }
    // enforce exact permutational symmetry on the rounded real values
    let mut sym = real.clone();
    for p in 0..5 {
        for q in 0..5 {
            for r in 0..5 {
                for s in 0..5 {
                    let images = [
                        idx(p, q, r, s),
                        idx(q, p, r, s),
                        idx(p, q, s, r),
                        idx(q, p, s, r),
                        idx(r, s, p, q),
                        idx(s, r, p, q),
                        idx(r, s, q, p),
                        idx(s, r, q, p),
                    ];
                    let avg = images.iter().map(|&i| real[i]).sum::<f64>() / 8.0;
                    sym[idx(p, q, r, s)] = avg;
                }
            }
        }
    }
    // averages can differ in the last bit by summation order; canonicalise
    for p in 0..5 {
        for q in 0..=p {
            for r in 0..5 {
                for s in 0..=r {
                    if r * 5 + s > p * 5 + q {
                        continue;
                    }
                    let v = sym[idx(p, q, r, s)];
                    for i in [
                        idx(p, q, r, s),
                        idx(q, p, r, s),
                        idx(p, q, s, r),
                        idx(q, p, s, r),
                        idx(r, s, p, q),
                        idx(s, r, p, q),
                        idx(r, s, q, p),
                        idx(s, r, q, p),
                    ] {
                        sym[i] = v;
                    }
                }
            }
        }
    }
    sym
}

/// Number of spin-S states in CAS(n, 5) is dim(M_S = S) − dim(M_S = S + 1).
fn states_of_multiplicity(n_elec: usize, n_orb: usize, mult: i32) -> usize {
    let ms2 = mult - 1;
    let top = count_determinants(n_elec, n_orb, ms2).unwrap_or(0);
    let above = count_determinants(n_elec, n_orb, ms2 + 2).unwrap_or(0);
    top.saturating_sub(above) as usize
}

/// Construct integrals, property matrices and default run settings.
pub fn build_ligand_field_model(model: &LigandFieldModel) -> Result<LigandFieldBuild> {
    if !(1..=9).contains(&model.n_elec) {
        return Err(CasqError::Invalid(format!(
            "ligand-field model needs 1..=9 d electrons, got {}",
            model.n_elec
        )));
    }
    if model.racah_b < 0.0 || model.racah_c < 0.0 {
        return Err(CasqError::Invalid(
            "Racah B and C must be non-negative".into(),
        ));
    }
    let asym = (model.v_lf - model.v_lf.transpose()).amax();
    if asym > 1e-12 {
        return Err(CasqError::Symmetry {
            what: "v_lf".into(),
            residual: asym,
            threshold: 1e-12,
        });
    }

    let mut ints = IntegralSet::zeros(5);
    for p in 0..5 {
        for q in 0..=p {
            ints.set_h(
                p,
                q,
                ev_to_hartree(0.5 * (model.v_lf[(p, q)] + model.v_lf[(q, p)])),
            );
        }
    }
    let eri = d_shell_eri(ev_to_hartree(model.racah_b), ev_to_hartree(model.racah_c));
    for p in 0..5 {
        for q in 0..5 {
            for r in 0..5 {
                for s in 0..5 {
                    let v = eri[((p * 5 + q) * 5 + r) * 5 + s];
                    if v != 0.0 {
                        ints.set_g2(p, q, r, s, v);
                    }
                }
            }
        }
    }

    let l = d_orbital_angular_momentum();
    let zeta = cm_to_hartree(model.zeta);
    let props = PropertyIntegrals {
        z: l.clone().map(|m| m * zeta),
        l,
        d: std::array::from_fn(|_| DMatrix::zeros(5, 5)),
    };

    let lowest_mult = if model.n_elec % 2 == 1 { 2 } else { 1 };
    let n_states = states_of_multiplicity(model.n_elec, 5, lowest_mult);
    let mut roots = BTreeMap::new();
    roots.insert(lowest_mult as u32, n_states.min(10));
    let config = RunConfig {
        cas: (model.n_elec, 5),
        roots_per_multiplicity: roots,
        ms2_blocks: Vec::new(),
        ..RunConfig::default()
    };

    Ok(LigandFieldBuild {
        orbitals: OrbitalSpace {
            n_orb: 5,
            labels: D_ORBITAL_LABELS.iter().map(|s| s.to_string()).collect(),
            core_energy: 0.0,
        },
        integrals: ints,
        properties: props,
        config,
    })
}
