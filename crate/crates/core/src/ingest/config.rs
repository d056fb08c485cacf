//! Flat `key=value` run configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::casci::DavidsonConfig;
use crate::error::{CasqError, Result};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpectrumConfig {
    pub fwhm_ev: f64,
    pub min_ev: f64,
    pub max_ev: f64,
    pub step_ev: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            fwhm_ev: 0.1,
            min_ev: 0.0,
            max_ev: 6.0,
            step_ev: 0.005,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunConfig {
    /// (n_elec, n_orb)
    pub cas: (usize, usize),
    /// 2S+1 → number of roots.
    pub roots_per_multiplicity: BTreeMap<u32, usize>,
    /// Extra 2·M_S blocks re-diagonalized as a cross-check. Multiplets are
    /// always anchored at M_S = S.
    pub ms2_blocks: Vec<i32>,
    pub davidson: DavidsonConfig,
    pub soc_enabled: bool,
    pub spectrum: SpectrumConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cas: (0, 0),
            roots_per_multiplicity: BTreeMap::new(),
            ms2_blocks: Vec::new(),
            davidson: DavidsonConfig::default(),
            soc_enabled: true,
            spectrum: SpectrumConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn total_roots(&self) -> usize {
        self.roots_per_multiplicity.values().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.davidson.tol <= 0.0 {
            return Err(CasqError::Invalid("davidson_tol must be positive".into()));
        }
        let max_block = self
            .roots_per_multiplicity
            .values()
            .copied()
            .max()
            .unwrap_or(0);
        if self.davidson.guess_dim < max_block {
            return Err(CasqError::Invalid(format!(
                "guess_dim {} smaller than the {max_block} roots requested in one block",
                self.davidson.guess_dim
            )));
        }
        if self.roots_per_multiplicity.keys().any(|&m| m == 0) {
            return Err(CasqError::Invalid("multiplicity must be at least 1".into()));
        }
        let s = &self.spectrum;
        if s.fwhm_ev <= 0.0 || s.step_ev <= 0.0 || s.max_ev < s.min_ev {
            return Err(CasqError::Invalid("invalid spectrum grid".into()));
        }
        Ok(())
    }

    /// Render back to the `key=value` format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "cas_nelec={}", self.cas.0);
        let _ = writeln!(out, "cas_norb={}", self.cas.1);
        if !self.ms2_blocks.is_empty() {
            let blocks: Vec<String> = self.ms2_blocks.iter().map(|b| b.to_string()).collect();
            let _ = writeln!(out, "ms2_blocks={}", blocks.join(","));
        }
        for (m, k) in &self.roots_per_multiplicity {
            let _ = writeln!(out, "roots_mult_{m}={k}");
        }
        let d = &self.davidson;
        let _ = writeln!(out, "davidson_tol={:e}", d.tol);
        let _ = writeln!(out, "davidson_max_subspace={}", d.max_subspace);
        let _ = writeln!(out, "davidson_max_iter={}", d.max_iter);
        let _ = writeln!(out, "guess_dim={}", d.guess_dim);
        let _ = writeln!(out, "soc={}", self.soc_enabled);
        let s = &self.spectrum;
        let _ = writeln!(out, "spectrum_fwhm_ev={}", s.fwhm_ev);
        let _ = writeln!(out, "spectrum_min_ev={}", s.min_ev);
        let _ = writeln!(out, "spectrum_max_ev={}", s.max_ev);
        let _ = writeln!(out, "spectrum_step_ev={}", s.step_ev);
        out
    }
}

fn parse_bool(v: &str, line: usize) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(CasqError::parse(
            line,
            format!("expected boolean, found '{v}'"),
        )),
    }
}

fn num<T: std::str::FromStr>(v: &str, key: &str, line: usize) -> Result<T> {
    v.parse()
        .map_err(|_| CasqError::parse(line, format!("bad value for {key}: '{v}'")))
}

/// Parse a run configuration; unspecified keys keep their defaults.
pub fn parse_run_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CasqError::parse(line_no, "expected key=value"))?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        match key.as_str() {
            "cas_nelec" => cfg.cas.0 = num(value, &key, line_no)?,
            "cas_norb" => cfg.cas.1 = num(value, &key, line_no)?,
            "ms2_blocks" => {
                cfg.ms2_blocks = value
                    .split([',', ' '])
                    .filter(|t| !t.is_empty())
                    .map(|t| num(t, &key, line_no))
                    .collect::<Result<_>>()?
            }
            "davidson_tol" => cfg.davidson.tol = num(value, &key, line_no)?,
            "davidson_max_subspace" => cfg.davidson.max_subspace = num(value, &key, line_no)?,
            "davidson_max_iter" => cfg.davidson.max_iter = num(value, &key, line_no)?,
            "guess_dim" => cfg.davidson.guess_dim = num(value, &key, line_no)?,
            "soc" => cfg.soc_enabled = parse_bool(value, line_no)?,
            "spectrum_fwhm_ev" => cfg.spectrum.fwhm_ev = num(value, &key, line_no)?,
            "spectrum_min_ev" => cfg.spectrum.min_ev = num(value, &key, line_no)?,
            "spectrum_max_ev" => cfg.spectrum.max_ev = num(value, &key, line_no)?,
            "spectrum_step_ev" => cfg.spectrum.step_ev = num(value, &key, line_no)?,
            k if k.starts_with("roots_mult_") => {
                let mult: u32 = num(&k["roots_mult_".len()..], &key, line_no)?;
                let n: usize = num(value, &key, line_no)?;
                cfg.roots_per_multiplicity.insert(mult, n);
            }
            _ => return Err(CasqError::parse(line_no, format!("unknown key '{key}'"))),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
