//! Spin-orbit and Zeeman matrices over a [`SocStateBasis`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::SocStateBasis;
use crate::casci::{transition_density, Multiplet};
use crate::detspace::{CasSpace, Spin};
use crate::error::{CasqError, Result};
use crate::ingest::PropertyIntegrals;
use crate::par;
use crate::units::G_ELECTRON;

pub const HERMITICITY_THRESHOLD: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn contract(m: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
    m.component_mul(g).sum()
}

struct Spaces {
    by_ms2: std::collections::BTreeMap<i32, CasSpace>,
}

impl Spaces {
    fn new(basis: &SocStateBasis, n_elec: usize, n_orb: usize) -> Result<Self> {
        let mut by_ms2 = std::collections::BTreeMap::new();
        for e in &basis.entries {
            if let std::collections::btree_map::Entry::Vacant(v) = by_ms2.entry(e.ms2) {
                v.insert(CasSpace::new(n_elec, n_orb, e.ms2)?);
            }
        }
        Ok(Spaces { by_ms2 })
    }

    fn get(&self, ms2: i32) -> &CasSpace {
        &self.by_ms2[&ms2]
    }
}

fn coeffs(multiplets: &[Multiplet], m: usize, ms2: i32) -> Result<&[f64]> {
    multiplets[m]
        .component(ms2)
        .map(|c| c.coeffs.as_slice())
        .ok_or_else(|| CasqError::Multiplet(format!("multiplet {m} lacks component 2M_S = {ms2}")))
}

/// `<bra|H_SO|ket>` with `H_SO = Σ_k Σ_pq i Z_k[p,q] Σ_σσ' <σ|s_k|σ'> a†_pσ a_qσ'`.
fn soc_element(
    spaces: &Spaces,
    props: &PropertyIntegrals,
    bra_ms2: i32,
    bra: &[f64],
    ket_ms2: i32,
    ket: &[f64],
) -> Complex64 {
    let bs = spaces.get(bra_ms2);
    let ks = spaces.get(ket_ms2);
    match bra_ms2 - ket_ms2 {
        0 => {
            let ga = transition_density(bs, bra, ks, ket, Spin::Alpha, Spin::Alpha);
            let gb = transition_density(bs, bra, ks, ket, Spin::Beta, Spin::Beta);
            I * (0.5 * contract(&props.z[2], &(ga - gb)))
        }
        2 => {
            // a†_α a_β carries (i Z_x + Z_y)/2
            let g = transition_density(bs, bra, ks, ket, Spin::Alpha, Spin::Beta);
            Complex64::new(
                0.5 * contract(&props.z[1], &g),
                0.5 * contract(&props.z[0], &g),
            )
        }
        -2 => {
            // a†_β a_α carries (i Z_x − Z_y)/2
            let g = transition_density(bs, bra, ks, ket, Spin::Beta, Spin::Alpha);
            Complex64::new(
                -0.5 * contract(&props.z[1], &g),
                0.5 * contract(&props.z[0], &g),
            )
        }
        _ => Complex64::new(0.0, 0.0),
    }
}

/// Spin-orbit matrix over `basis` (Hartree), Hermitian.
///
/// Both triangles are evaluated independently; a Hermiticity residual above
/// [`HERMITICITY_THRESHOLD`] means the components are not phase-consistent.
pub fn soc_matrix(
    basis: &SocStateBasis,
    multiplets: &[Multiplet],
    props: &PropertyIntegrals,
    n_elec: usize,
    n_orb: usize,
) -> Result<DMatrix<Complex64>> {
    let n = basis.len();
    let spaces = Spaces::new(basis, n_elec, n_orb)?;
    let zero_z = props.z.iter().all(|m| m.iter().all(|v| *v == 0.0));
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (&basis.entries[i], &basis.entries[j]);
            if (a.ms2 - b.ms2).abs() <= 2 && (a.twice_s as i32 - b.twice_s as i32).abs() <= 2 {
                pairs.push((i, j));
            }
        }
    }
    // fetch coefficients up front so worker closures only borrow
    let vecs: Vec<&[f64]> = basis
        .entries
        .iter()
        .map(|e| coeffs(multiplets, e.multiplet, e.ms2))
        .collect::<Result<_>>()?;
    let values = if zero_z {
        vec![Complex64::new(0.0, 0.0); pairs.len()]
    } else {
        par::map_range(pairs.len(), par::DEFAULT_PARALLEL, |k| {
            let (i, j) = pairs[k];
            soc_element(
                &spaces,
                props,
                basis.entries[i].ms2,
                vecs[i],
                basis.entries[j].ms2,
                vecs[j],
            )
        })
    };
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (&(i, j), v) in pairs.iter().zip(values) {
        m[(i, j)] = v;
    }
    let residual = (&m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if residual > HERMITICITY_THRESHOLD {
        return Err(CasqError::Symmetry {
            what: "spin-orbit matrix".into(),
            residual,
            threshold: HERMITICITY_THRESHOLD,
        });
    }
    Ok((&m + m.adjoint()) * Complex64::new(0.5, 0.0))
}

/// `<S, M'|S_k|S, M>` for k = x, y, z with 2M given as `ms2`.
pub fn spin_matrix(twice_s: u32, bra_ms2: i32, ket_ms2: i32, k: usize) -> Complex64 {
    let s = twice_s as f64 / 2.0;
    let m = ket_ms2 as f64 / 2.0;
    let raise = |m: f64| (s * (s + 1.0) - m * (m + 1.0)).max(0.0).sqrt();
    let lower = |m: f64| (s * (s + 1.0) - m * (m - 1.0)).max(0.0).sqrt();
    let (plus, minus) = match bra_ms2 - ket_ms2 {
        2 => (raise(m), 0.0),
        -2 => (0.0, lower(m)),
        _ => (0.0, 0.0),
    };
    match k {
        0 => Complex64::new(0.5 * (plus + minus), 0.0),
        1 => Complex64::new(0.0, -0.5 * (plus - minus)),
        _ => {
            if bra_ms2 == ket_ms2 {
                Complex64::new(m, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
    }
}

/// Zeeman operators `L_k + g_e S_k` over `basis` (units of μ_B).
pub fn zeeman_matrices(
    basis: &SocStateBasis,
    multiplets: &[Multiplet],
    props: &PropertyIntegrals,
    n_elec: usize,
    n_orb: usize,
) -> Result<[DMatrix<Complex64>; 3]> {
    let n = basis.len();
    let spaces = Spaces::new(basis, n_elec, n_orb)?;
    let vecs: Vec<&[f64]> = basis
        .entries
        .iter()
        .map(|e| coeffs(multiplets, e.multiplet, e.ms2))
        .collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (&basis.entries[i], &basis.entries[j]);
            if a.twice_s == b.twice_s && a.ms2 == b.ms2 {
                pairs.push((i, j));
            }
        }
    }
    // orbital part: i Σ L_k[p,q] <i|E_pq|j>
    let orbital = par::map_range(pairs.len(), par::DEFAULT_PARALLEL, |k| {
        let (i, j) = pairs[k];
        let sp = spaces.get(basis.entries[i].ms2);
        let g = transition_density(sp, vecs[i], sp, vecs[j], Spin::Alpha, Spin::Alpha)
            + transition_density(sp, vecs[i], sp, vecs[j], Spin::Beta, Spin::Beta);
        [0, 1, 2].map(|c| contract(&props.l[c], &g))
    });
    let mut out: [DMatrix<Complex64>; 3] =
        std::array::from_fn(|_| DMatrix::from_element(n, n, Complex64::new(0.0, 0.0)));
    for (&(i, j), l) in pairs.iter().zip(orbital) {
        for c in 0..3 {
            out[c][(i, j)] += I * l[c];
        }
    }
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (&basis.entries[i], &basis.entries[j]);
            if a.multiplet == b.multiplet {
                for (c, mat) in out.iter_mut().enumerate() {
                    mat[(i, j)] += spin_matrix(a.twice_s, a.ms2, b.ms2, c) * G_ELECTRON;
                }
            }
        }
    }
    Ok(out)
}
