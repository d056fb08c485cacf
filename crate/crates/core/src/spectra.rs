//! Transition dipoles, oscillator strengths and Gaussian-broadened spectra.

use serde::{Deserialize, Serialize};

use crate::casci::{transition_density_spin_traced, CiState};
use crate::detspace::CasSpace;
use crate::error::{CasqError, Result};
use crate::ingest::PropertyIntegrals;
use crate::units::hartree_to_ev;

/// FWHM / σ for a Gaussian.
pub const FWHM_PER_SIGMA: f64 = 2.3548;
/// Lines at or above this oscillator strength get the heuristic tag.
pub const SORET_HEURISTIC_THRESHOLD: f64 = 0.5;
pub const SORET_HEURISTIC_LABEL: &str = "Soret-like (heuristic)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumLine {
    pub from: usize,
    pub to: usize,
    /// eV.
    pub delta_e: f64,
    pub f_osc: f64,
    pub label: Option<String>,
    pub spin_forbidden: bool,
}

impl SpectrumLine {
    pub fn new(from: usize, to: usize, delta_e: f64, f_osc: f64) -> Self {
        SpectrumLine {
            from,
            to,
            delta_e,
            f_osc,
            label: None,
            spin_forbidden: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionDipole {
    /// Atomic units.
    pub mu: [f64; 3],
    pub spin_forbidden: bool,
}

/// `μ_k = <0|D_k|N>` through the spin-traced one-particle transition density.
///
/// States of different multiplicity give a zero vector flagged spin-forbidden.
pub fn transition_dipole(
    space: &CasSpace,
    state0: &CiState,
    state_n: &CiState,
    props: &PropertyIntegrals,
) -> Result<TransitionDipole> {
    if state0.multiplicity != state_n.multiplicity {
        return Ok(TransitionDipole {
            mu: [0.0; 3],
            spin_forbidden: true,
        });
    }
    if state0.ms2 != state_n.ms2 || state0.ms2 != space.ms2() {
        return Err(CasqError::Invalid(format!(
            "transition dipole needs both states in the 2M_S = {} space",
            space.ms2()
        )));
    }
    if state0.coeffs.len() != space.len() || state_n.coeffs.len() != space.len() {
        return Err(CasqError::Dimension {
            expected: space.len(),
            got: state0.coeffs.len().min(state_n.coeffs.len()),
        });
    }
    let gamma = transition_density_spin_traced(space, &state0.coeffs, &state_n.coeffs);
    Ok(TransitionDipole {
        mu: std::array::from_fn(|k| props.d[k].component_mul(&gamma).sum()),
        spin_forbidden: false,
    })
}

/// `f = (2/3) ΔE |μ|²` in atomic units.
pub fn oscillator_strength(delta_e_hartree: f64, mu: [f64; 3]) -> Result<f64> {
    if delta_e_hartree < 0.0 {
        return Err(CasqError::Invalid(format!(
            "negative excitation energy {delta_e_hartree} Eh"
        )));
    }
    let m2: f64 = mu.iter().map(|m| m * m).sum();
    Ok(2.0 / 3.0 * delta_e_hartree * m2)
}

/// Absorption lines from the lowest state to every other state.
///
/// All states must share one M_S space; spin-forbidden lines are kept with f = 0.
pub fn absorption_lines(
    space: &CasSpace,
    states: &[CiState],
    props: &PropertyIntegrals,
) -> Result<Vec<SpectrumLine>> {
    let Some((g, _)) = states
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.energy.total_cmp(&b.1.energy))
    else {
        return Ok(Vec::new());
    };
    let ground = &states[g];
    let mut lines = Vec::new();
    for (k, s) in states.iter().enumerate() {
        if k == g {
            continue;
        }
        let de = s.energy - ground.energy;
        let dip = transition_dipole(space, ground, s, props)?;
        let f = oscillator_strength(de.max(0.0), dip.mu)?;
        lines.push(SpectrumLine {
            from: g,
            to: k,
            delta_e: hartree_to_ev(de),
            f_osc: f,
            label: None,
            spin_forbidden: dip.spin_forbidden,
        });
    }
    lines.sort_by(|a, b| a.delta_e.total_cmp(&b.delta_e));
    Ok(lines)
}

/// Tag unlabelled lines with `f ≥ 0.5` as Soret-like; the tag says it is a guess.
pub fn label_heuristic(lines: &mut [SpectrumLine]) {
    for l in lines.iter_mut() {
        if l.label.is_none() && l.f_osc >= SORET_HEURISTIC_THRESHOLD {
            l.label = Some(SORET_HEURISTIC_LABEL.to_string());
        }
    }
}

/// `min, min + step, …` up to and including `max` (within rounding).
pub fn energy_grid(min_ev: f64, max_ev: f64, step_ev: f64) -> Result<Vec<f64>> {
    if step_ev.is_nan() || step_ev <= 0.0 || max_ev.is_nan() || min_ev.is_nan() || max_ev < min_ev {
        return Err(CasqError::Invalid(format!(
            "bad spectrum grid: min {min_ev}, max {max_ev}, step {step_ev}"
        )));
    }
    let n = ((max_ev - min_ev) / step_ev + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| min_ev + i as f64 * step_ev).collect())
}

/// Whether `grid` reaches 3σ past every line.
pub fn grid_covers(lines: &[SpectrumLine], fwhm_ev: f64, grid: &[f64]) -> bool {
    let sigma = fwhm_ev / FWHM_PER_SIGMA;
    match (grid.first(), grid.last()) {
        (Some(lo), Some(hi)) => lines
            .iter()
            .all(|l| l.delta_e - 3.0 * sigma >= *lo && l.delta_e + 3.0 * sigma <= *hi),
        _ => lines.is_empty(),
    }
}

/// Sum of normalized Gaussians, each with area `f_osc`, sampled on `grid`.
pub fn broaden(lines: &[SpectrumLine], fwhm_ev: f64, grid: &[f64]) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(CasqError::Invalid("empty spectrum grid".into()));
    }
    if fwhm_ev.is_nan() || fwhm_ev <= 0.0 {
        return Err(CasqError::Invalid(format!(
            "fwhm must be positive, got {fwhm_ev}"
        )));
    }
    let sigma = fwhm_ev / FWHM_PER_SIGMA;
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    Ok(grid
        .iter()
        .map(|&e| {
            lines
                .iter()
                .map(|l| {
                    let x = (e - l.delta_e) / sigma;
                    l.f_osc * norm * (-0.5 * x * x).exp()
                })
                .sum()
        })
        .collect())
}

pub fn spectrum_csv(grid: &[f64], intensity: &[f64]) -> String {
    let mut out = String::from("energy_eV,intensity\n");
    for (e, i) in grid.iter().zip(intensity) {
        out.push_str(&format!("{e:.6},{i:.10e}\n"));
    }
    out
}

/// Parse a line list: `delta_e_eV f_osc [label…]` per line, `#` comments.
pub fn parse_lines(text: &str) -> Result<Vec<SpectrumLine>> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let mut num = |what: &str| -> Result<f64> {
            parts
                .next()
                .ok_or_else(|| CasqError::parse(no + 1, format!("missing {what}")))?
                .parse::<f64>()
                .map_err(|e| CasqError::parse(no + 1, format!("bad {what}: {e}")))
        };
        let de = num("energy")?;
        let f = num("oscillator strength")?;
        if f < 0.0 {
            return Err(CasqError::parse(no + 1, "negative oscillator strength"));
        }
        let label: Vec<&str> = parts.collect();
        let k = out.len();
        out.push(SpectrumLine {
            from: 0,
            to: k + 1,
            delta_e: de,
            f_osc: f,
            label: (!label.is_empty()).then(|| label.join(" ")),
            spin_forbidden: false,
        });
    }
    Ok(out)
}
