//! Wave-function decomposition into leading determinants.
//!
//! Percentages are `100 |c|²`. In M_S = 0 spaces a determinant and its spin
//! flip (u and d swapped on every open shell) with equal weight are printed
//! once, with the summed weight, using the partner whose first open shell is
//! `u`.

use serde::{Deserialize, Serialize};

use crate::detspace::CasSpace;

/// Weights closer than this (as fractions) count as a conjugate pair.
pub const CONJUGATE_WEIGHT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionLine {
    pub determinant: String,
    pub weight_percent: f64,
    /// True when the line merges a spin-conjugate pair.
    pub pair_summed: bool,
}

impl DecompositionLine {
    /// `"2 2 u 2 0 d 0 (49%)"`.
    pub fn render(&self) -> String {
        format!("{} ({:.0}%)", self.determinant, self.weight_percent)
    }
}

/// Leading determinants of `coeffs` with weight at or above `threshold_percent`.
pub fn decompose(
    space: &CasSpace,
    coeffs: &[f64],
    threshold_percent: f64,
) -> Vec<DecompositionLine> {
    let n_orb = space.n_orb();
    let mut used = vec![false; coeffs.len()];
    let mut lines = Vec::new();
    for k in 0..coeffs.len() {
        if used[k] {
            continue;
        }
        used[k] = true;
        let w = coeffs[k] * coeffs[k];
        if w == 0.0 {
            continue;
        }
        let det = space.det(k);
        let mut rep = det;
        let mut total = w;
        let mut pair = false;
        if space.ms2() == 0 {
            let flip = det.spin_flipped();
            if flip != det {
                if let Some(j) = space.index(&flip) {
                    let wj = coeffs[j] * coeffs[j];
                    if !used[j] && (wj - w).abs() <= CONJUGATE_WEIGHT_TOL {
                        used[j] = true;
                        total += wj;
                        pair = true;
                        let open = det.alpha ^ det.beta;
                        let first_open = open.trailing_zeros();
                        if det.alpha >> first_open & 1 == 0 {
                            rep = flip;
                        }
                    }
                }
            }
        }
        lines.push(DecompositionLine {
            determinant: rep.render(n_orb),
            weight_percent: 100.0 * total,
            pair_summed: pair,
        });
    }
    lines.sort_by(|a, b| {
        b.weight_percent
            .total_cmp(&a.weight_percent)
            .then_with(|| a.determinant.cmp(&b.determinant))
    });
    lines.retain(|l| l.weight_percent >= threshold_percent);
    lines
}

/// Render lines, one per row.
pub fn format_decomposition(lines: &[DecompositionLine]) -> String {
    lines
        .iter()
        .map(|l| l.render())
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detspace::Determinant;

    #[test]
    fn pure_determinant() {
        let space = CasSpace::new(1, 5, 1).unwrap();
        let mut v = vec![0.0; 5];
        v[2] = -1.0;
        let lines = decompose(&space, &v, 1.0);
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].render(), "0 0 u 0 0 (100%)");
    }

    #[test]
    fn two_determinant_weights() {
        let space = CasSpace::new(1, 2, 1).unwrap();
        let lines = decompose(&space, &[0.954, 0.3], 0.0);
        let text: Vec<String> = lines.iter().map(|l| l.render()).collect();
        assert_eq!(text, vec!["u 0 (91%)", "0 u (9%)"]);
    }

    #[test]
    fn conjugate_pair_merges_with_u_first() {
        let space = CasSpace::new(2, 3, 0).unwrap();
        let a = space.index(&Determinant::new(0b001, 0b100)).unwrap(); // u 0 d
        let b = space.index(&Determinant::new(0b100, 0b001)).unwrap(); // d 0 u
        let mut v = vec![0.0; space.len()];
        let c = 0.35f64.sqrt();
        v[a] = c;
        v[b] = -c;
        let rest = space.index(&Determinant::new(0b001, 0b001)).unwrap();
        v[rest] = 0.3f64.sqrt();
        let lines = decompose(&space, &v, 5.0);
        assert_eq!(format_decomposition(&lines), "u 0 d (70%)\n2 0 0 (30%)");
        assert!(lines[0].pair_summed);
    }
}
