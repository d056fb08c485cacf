//! Multiplet energy table and doublet/quartet ordering.

use serde::{Deserialize, Serialize};

use crate::casci::Multiplet;
use crate::units::HARTREE_TO_CM;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub id: usize,
    pub multiplicity: u32,
    /// Relative to the lowest multiplet.
    pub energy_cm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// Ascending in energy.
    pub rows: Vec<GapRow>,
    /// `(lower id, upper id, gap in cm⁻¹)` for consecutive rows.
    pub adjacent_gaps: Vec<(usize, usize, f64)>,
    /// Lowest excited doublet minus lowest quartet (cm⁻¹), when both exist.
    /// The ground multiplet is excluded from the doublets.
    pub quartet_doublet_gap_cm: Option<f64>,
    pub quartet_below_doublet: bool,
}

/// Tabulate multiplet energies and flag a quartet lying under the first
/// excited doublet.
pub fn gap_report(multiplets: &[Multiplet]) -> GapReport {
    let mut sorted: Vec<&Multiplet> = multiplets.iter().collect();
    sorted.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let Some(ground) = sorted.first() else {
        return GapReport {
            rows: Vec::new(),
            adjacent_gaps: Vec::new(),
            quartet_doublet_gap_cm: None,
            quartet_below_doublet: false,
        };
    };
    let e0 = ground.energy;
    let rows: Vec<GapRow> = sorted
        .iter()
        .map(|m| GapRow {
            id: m.id,
            multiplicity: m.multiplicity(),
            energy_cm: (m.energy - e0) * HARTREE_TO_CM,
        })
        .collect();
    let adjacent_gaps = rows
        .windows(2)
        .map(|w| (w[0].id, w[1].id, w[1].energy_cm - w[0].energy_cm))
        .collect();
    let quartet = rows.iter().find(|r| r.multiplicity == 4);
    let doublet = rows.iter().skip(1).find(|r| r.multiplicity == 2);
    let gap = match (quartet, doublet) {
        (Some(q), Some(d)) => Some(d.energy_cm - q.energy_cm),
        _ => None,
    };
    GapReport {
        rows,
        adjacent_gaps,
        quartet_doublet_gap_cm: gap,
        quartet_below_doublet: gap.is_some_and(|g| g > 0.0),
    }
}

impl GapReport {
    pub fn render(&self) -> String {
        let mut out = String::from("  id  2S+1   E (cm-1)\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:4}  {:4}  {:10.2}\n",
                r.id, r.multiplicity, r.energy_cm
            ));
        }
        for (a, b, g) in &self.adjacent_gaps {
            out.push_str(&format!("gap {a} -> {b}: {g:.2} cm-1\n"));
        }
        if let Some(g) = self.quartet_doublet_gap_cm {
            let tag = if self.quartet_below_doublet {
                "quartet below doublet"
            } else {
                "doublet below quartet"
            };
            out.push_str(&format!("quartet/doublet gap: {g:.2} cm-1 ({tag})\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mult(id: usize, twice_s: u32, energy: f64) -> Multiplet {
        Multiplet {
            id,
            twice_s,
            energy,
            components: Vec::new(),
        }
    }

    #[test]
    fn gap_in_wavenumbers() {
        let r = gap_report(&[mult(0, 1, 0.0), mult(1, 1, 1e-4)]);
        assert_eq!(format!("{:.2}", r.adjacent_gaps[0].2), "21.95");
        assert!(r.quartet_doublet_gap_cm.is_none());
    }

    #[test]
    fn quartet_under_excited_doublet() {
        let r = gap_report(&[mult(0, 1, -1.0), mult(1, 3, -0.99), mult(2, 1, -0.98)]);
        assert!(r.quartet_below_doublet);
        assert!(r.render().contains("quartet below doublet"));
        let r = gap_report(&[mult(0, 1, -1.0), mult(1, 1, -0.99), mult(2, 3, -0.98)]);
        assert!(!r.quartet_below_doublet);
    }
}
