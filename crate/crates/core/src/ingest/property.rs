//! Angular-momentum, spin-orbit and dipole matrices over the active orbitals.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{CasqError, Result};

/// Maximum symmetrization correction accepted when reading property matrices.
pub const PROPERTY_SYMMETRY_THRESHOLD: f64 = 1e-8;

/// One-electron property matrices, Cartesian components x, y, z.
///
/// `l[k]` and `z[k]` hold the imaginary parts of `<p|l_k|q>` and `<p|z_k|q>`
/// (both operators are purely imaginary over real orbitals), so they are real
/// antisymmetric. `z` is the effective one-electron spin-orbit operator: the
/// spin-orbit Hamiltonian is `Σ_i Σ_k z_k(i) s_k(i)` with `s = σ/2`.
/// `d[k]` are real symmetric dipole matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyIntegrals {
    pub l: [DMatrix<f64>; 3],
    pub z: [DMatrix<f64>; 3],
    pub d: [DMatrix<f64>; 3],
}

impl PropertyIntegrals {
    pub fn zeros(n_orb: usize) -> Self {
        let z = || DMatrix::zeros(n_orb, n_orb);
        PropertyIntegrals {
            l: [z(), z(), z()],
            z: [z(), z(), z()],
            d: [z(), z(), z()],
        }
    }

    pub fn n_orb(&self) -> usize {
        self.l[0].nrows()
    }

    pub fn has_dipoles(&self) -> bool {
        self.d.iter().any(|m| m.iter().any(|v| *v != 0.0))
    }

    /// Rotate the orbital basis: new orbital `i = Σ_p u[(p, i)] |p>`.
    pub fn rotated(&self, u: &DMatrix<f64>) -> PropertyIntegrals {
        let t = |m: &DMatrix<f64>| u.transpose() * m * u;
        PropertyIntegrals {
            l: self.l.each_ref().map(t),
            z: self.z.each_ref().map(t),
            d: self.d.each_ref().map(t),
        }
    }

    /// Transform the Cartesian axes of every vector operator by the rotation `r`
    /// (`v'_k = Σ_j r[(k, j)] v_j`).
    pub fn with_rotated_axes(&self, r: &nalgebra::Matrix3<f64>) -> PropertyIntegrals {
        let rot = |v: &[DMatrix<f64>; 3]| -> [DMatrix<f64>; 3] {
            std::array::from_fn(|k| &v[0] * r[(k, 0)] + &v[1] * r[(k, 1)] + &v[2] * r[(k, 2)])
        };
        PropertyIntegrals {
            l: rot(&self.l),
            z: rot(&self.z),
            d: rot(&self.d),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Angmom,
    Soc,
    Dipole,
}

fn section(name: &str) -> Option<(Kind, usize)> {
    let upper = name.to_ascii_uppercase();
    let (kind, rest) = [
        ("ANGMOM_", Kind::Angmom),
        ("SOC_", Kind::Soc),
        ("DIP_", Kind::Dipole),
    ]
    .into_iter()
    .find_map(|(prefix, kind)| upper.strip_prefix(prefix).map(|r| (kind, r)))?;
    let axis = match rest {
        "X" => 0,
        "Y" => 1,
        "Z" => 2,
        _ => return None,
    };
    Some((kind, axis))
}

fn section_name(kind: Kind, axis: usize) -> String {
    let prefix = match kind {
        Kind::Angmom => "ANGMOM",
        Kind::Soc => "SOC",
        Kind::Dipole => "DIP",
    };
    format!("{prefix}_{}", ["X", "Y", "Z"][axis])
}

fn enforce(m: &mut DMatrix<f64>, antisymmetric: bool, what: &str) -> Result<()> {
    let mt = m.transpose();
    let fixed = if antisymmetric {
        (&*m - &mt) * 0.5
    } else {
        (&*m + &mt) * 0.5
    };
    let correction = (&*m - &fixed).amax();
    if correction > PROPERTY_SYMMETRY_THRESHOLD {
        return Err(CasqError::Symmetry {
            what: what.to_string(),
            residual: correction,
            threshold: PROPERTY_SYMMETRY_THRESHOLD,
        });
    }
    *m = fixed;
    Ok(())
}

/// Parse a property file for `n_orb` orbitals. Missing sections stay zero.
pub fn parse_property_integrals(text: &str, n_orb: usize) -> Result<PropertyIntegrals> {
    let mut props = PropertyIntegrals::zeros(n_orb);
    let mut current: Option<(Kind, usize, Vec<f64>)> = None;
    let expected = n_orb * n_orb;

    let finish = |cur: Option<(Kind, usize, Vec<f64>)>, props: &mut PropertyIntegrals| {
        if let Some((kind, axis, vals)) = cur {
            let name = section_name(kind, axis);
            if vals.len() != expected {
                return Err(CasqError::ElementCount {
                    section: name,
                    expected,
                    found: vals.len(),
                });
            }
            let mut m = DMatrix::from_row_slice(n_orb, n_orb, &vals);
            enforce(&mut m, kind != Kind::Dipole, &name)?;
            match kind {
                Kind::Angmom => props.l[axis] = m,
                Kind::Soc => props.z[axis] = m,
                Kind::Dipole => props.d[axis] = m,
            }
        }
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            if let Some((kind, axis)) = section(tok) {
                finish(current.take(), &mut props)?;
                current = Some((kind, axis, Vec::with_capacity(expected)));
                continue;
            }
            let v: f64 = tok
                .replace(['D', 'd'], "E")
                .parse()
                .map_err(|_| CasqError::parse(i + 1, format!("unexpected token '{tok}'")))?;
            match current.as_mut() {
                Some((_, _, vals)) => vals.push(v),
                None => {
                    return Err(CasqError::parse(i + 1, "value outside of any section"));
                }
            }
        }
    }
    finish(current.take(), &mut props)?;
    Ok(props)
}

/// Write every non-zero section, row-major, full precision.
pub fn write_property_integrals(props: &PropertyIntegrals) -> String {
    let n = props.n_orb();
    let mut out = String::new();
    for (kind, set) in [
        (Kind::Angmom, &props.l),
        (Kind::Soc, &props.z),
        (Kind::Dipole, &props.d),
    ] {
        for (axis, m) in set.iter().enumerate() {
            if m.iter().all(|v| *v == 0.0) {
                continue;
            }
            let _ = writeln!(out, "{}", section_name(kind, axis));
            for p in 0..n {
                let row: Vec<String> = (0..n).map(|q| format!("{:e}", m[(p, q)])).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
    }
    out
}
