//! Resolving command-line inputs into integrals, properties and a run configuration.

use std::collections::BTreeMap;
use std::path::Path;

use casq_core::ingest::{
    build_ligand_field_model, parse_fcidump, parse_property_integrals, parse_run_config,
    IntegralSet, LigandFieldPreset, PropertyIntegrals, RunConfig,
};

use crate::manifest::RunManifest;
use crate::{CliError, RunArgs};

pub struct Problem {
    pub n_elec: usize,
    pub n_orb: usize,
    pub labels: Vec<String>,
    pub integrals: IntegralSet,
    pub properties: Option<PropertyIntegrals>,
    pub config: RunConfig,
}

pub fn read_input(path: &Path, manifest: &mut RunManifest) -> Result<String, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    manifest.record_input(path, &bytes);
    String::from_utf8(bytes)
        .map_err(|_| CliError::Input(format!("{} is not UTF-8 text", path.display())))
}

fn in_file(path: &Path, e: casq_core::CasqError) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn parse_roots(items: &[String]) -> Result<BTreeMap<u32, usize>, CliError> {
    let mut out = BTreeMap::new();
    for item in items {
        let (m, k) = item
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("--roots-mult expects N=K, got '{item}'")))?;
        let m: u32 = m
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("bad multiplicity in '{item}'")))?;
        let k: usize = k
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("bad root count in '{item}'")))?;
        out.insert(m, k);
    }
    Ok(out)
}

fn parse_ms2_list(text: &str) -> Result<Vec<i32>, CliError> {
    text.split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| CliError::Input(format!("bad 2M_S value '{t}' in --ms2")))
        })
        .collect()
}

pub fn load_problem(args: &RunArgs, manifest: &mut RunManifest) -> Result<Problem, CliError> {
    let (n_elec, n_orb, labels, integrals, mut properties, mut config) =
        match (&args.lf, &args.fcidump) {
            (Some(_), Some(_)) => {
                return Err(CliError::Input(
                    "give either --lf or --fcidump, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Input(
                    "no integrals: give --fcidump PATH or --lf PRESET".into(),
                ))
            }
            (Some(name), None) => {
                let preset = LigandFieldPreset::parse(name).map_err(CliError::Core)?;
                let mut model = preset.model();
                if let Some(z) = args.zeta {
                    model.zeta = z;
                }
                let b = build_ligand_field_model(&model)?;
                let (ne, no) = b.config.cas;
                (
                    ne,
                    no,
                    b.orbitals.labels,
                    b.integrals,
                    Some(b.properties),
                    b.config,
                )
            }
            (None, Some(path)) => {
                if args.zeta.is_some() {
                    return Err(CliError::Input("--zeta only applies to --lf models".into()));
                }
                let text = read_input(path, manifest)?;
                let f = parse_fcidump(&text).map_err(|e| in_file(path, e))?;
                let mut cfg = RunConfig {
                    cas: (f.nelec, f.orbitals.n_orb),
                    ..RunConfig::default()
                };
                cfg.roots_per_multiplicity
                    .insert(f.ms2.unsigned_abs() + 1, 1);
                (
                    f.nelec,
                    f.orbitals.n_orb,
                    f.orbitals.labels,
                    f.integrals,
                    None,
                    cfg,
                )
            }
        };

    if let Some(path) = &args.prop {
        let text = read_input(path, manifest)?;
        properties = Some(parse_property_integrals(&text, n_orb).map_err(|e| in_file(path, e))?);
    }
    if let Some(path) = &args.config {
        let text = read_input(path, manifest)?;
        let mut file_cfg = parse_run_config(&text).map_err(|e| in_file(path, e))?;
        if file_cfg.cas == (0, 0) {
            file_cfg.cas = config.cas;
        }
        if file_cfg.roots_per_multiplicity.is_empty() {
            file_cfg.roots_per_multiplicity = config.roots_per_multiplicity.clone();
        }
        config = file_cfg;
    }
    if !args.roots_mult.is_empty() {
        config.roots_per_multiplicity = parse_roots(&args.roots_mult)?;
    }
    if let Some(list) = &args.ms2 {
        config.ms2_blocks = parse_ms2_list(list)?;
    }
    if config.cas != (n_elec, n_orb) {
        return Err(CliError::Input(format!(
            "configured CAS({},{}) does not match the integrals' {n_elec} electrons in {n_orb} orbitals",
            config.cas.0, config.cas.1
        )));
    }
    config.validate()?;
    manifest.config = Some(config.to_text());
    Ok(Problem {
        n_elec,
        n_orb,
        labels,
        integrals,
        properties,
        config,
    })
}
