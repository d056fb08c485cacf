//! Spin ladder operators and ⟨S²⟩ on determinant vectors.
//!
//! `S⁺ = Σ_p a†_{pα} a_{pβ}` and `S⁻ = Σ_p a†_{pβ} a_{pα}`. Both are applied in
//! gather form (each output coefficient collects its sources), which keeps the
//! parallel evaluation free of write conflicts.

use super::dot;
use crate::detspace::{CasSpace, Spin};
use crate::error::{CasqError, Result};
use crate::par;

/// Norm below which `S⁻ v` counts as annihilated.
pub const ANNIHILATION_THRESHOLD: f64 = 1e-8;

fn ladder(from: &CasSpace, to: &CasSpace, v: &[f64], raise: bool) -> Vec<f64> {
    // <t|S±|s> = <s|S∓|t>: walk S∓ from each target t.
    let (src_spin, dst_spin) = if raise {
        (Spin::Alpha, Spin::Beta)
    } else {
        (Spin::Beta, Spin::Alpha)
    };
    let n_orb = from.n_orb();
    par::map_range(to.len(), par::DEFAULT_PARALLEL, |t| {
        let det = to.det(t);
        let mut acc = 0.0;
        for p in 0..n_orb {
            if let Some((s, sign)) = det.excite(p, src_spin, p, dst_spin) {
                if let Some(k) = from.index(&s) {
                    acc += sign * v[k];
                }
            }
        }
        acc
    })
}

/// `S⁺ v`, mapped into the space at `ms2 + 2`. Returns `None` when that space
/// does not exist (the image is identically zero).
pub fn apply_s_plus(space: &CasSpace, v: &[f64]) -> Result<Option<(CasSpace, Vec<f64>)>> {
    check(space, v)?;
    let Ok(up) = space.raised() else {
        return Ok(None);
    };
    let w = ladder(space, &up, v, true);
    Ok(Some((up, w)))
}

/// `S⁻ v` in the space at `ms2 − 2`, unnormalized.
///
/// Errors with [`CasqError::Annihilated`] when the image vanishes (M_S = −S).
pub fn apply_s_minus(space: &CasSpace, v: &[f64]) -> Result<(CasSpace, Vec<f64>)> {
    check(space, v)?;
    let down = space.lowered().map_err(|_| CasqError::Annihilated(0.0))?;
    let w = ladder(space, &down, v, false);
    let norm = dot(&w, &w).sqrt();
    if norm < ANNIHILATION_THRESHOLD {
        return Err(CasqError::Annihilated(norm));
    }
    Ok((down, w))
}

fn check(space: &CasSpace, v: &[f64]) -> Result<()> {
    if v.len() != space.len() {
        return Err(CasqError::Dimension {
            expected: space.len(),
            got: v.len(),
        });
    }
    Ok(())
}

/// `<v|S²|v>` for normalized `v`, using `S² = S⁻S⁺ + S_z(S_z + 1)`.
pub fn s_squared(space: &CasSpace, v: &[f64]) -> Result<f64> {
    let m = space.ms2() as f64 / 2.0;
    let norm2 = dot(v, v);
    let ladder_part = match apply_s_plus(space, v)? {
        Some((_, w)) => dot(&w, &w),
        None => 0.0,
    };
    Ok(ladder_part + m * (m + 1.0) * norm2)
}

/// 2S+1 for the S whose S(S+1) is closest to `s2`.
pub fn multiplicity_from_s2(s2: f64) -> u32 {
    let s = (-1.0 + (1.0 + 4.0 * s2.max(0.0)).sqrt()) / 2.0;
    (2.0 * s).round() as u32 + 1
}

/// `S² v` within the space of `v`, using `S² = S⁻S⁺ + S_z(S_z + 1)`.
pub fn apply_s_squared(space: &CasSpace, v: &[f64]) -> Result<Vec<f64>> {
    check(space, v)?;
    let m = space.ms2() as f64 / 2.0;
    let mut out: Vec<f64> = v.iter().map(|x| m * (m + 1.0) * x).collect();
    if let Ok(up) = space.raised() {
        let w = ladder(space, &up, v, true);
        let back = ladder(&up, space, &w, false);
        for (o, b) in out.iter_mut().zip(back) {
            *o += b;
        }
    }
    Ok(out)
}

/// Largest 2S reachable in `space`.
pub fn max_twice_s(space: &CasSpace) -> u32 {
    space.n_elec().min(2 * space.n_orb() - space.n_elec()) as u32
}

/// Löwdin projection of `v` onto spin `twice_s / 2`, in place:
/// `Π_{S' > S} (S² − S'(S'+1)) / (S(S+1) − S'(S'+1))`.
///
/// Components with S' < |M_S| do not exist in the space, so only higher spins
/// are removed.
pub fn project_spin(space: &CasSpace, v: &mut [f64], twice_s: u32) -> Result<()> {
    let s = twice_s as f64 / 2.0;
    let target = s * (s + 1.0);
    let mut other = twice_s + 2;
    while other <= max_twice_s(space) {
        let so = other as f64 / 2.0;
        let e = so * (so + 1.0);
        let s2v = apply_s_squared(space, v)?;
        let scale = 1.0 / (target - e);
        for (x, y) in v.iter_mut().zip(s2v) {
            *x = (y - e * *x) * scale;
        }
        other += 2;
    }
    Ok(())
}
