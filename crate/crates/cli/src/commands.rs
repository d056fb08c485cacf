//! Subcommand implementations. Every report is written as text and JSON.

use std::fmt::Write as _;
use std::path::Path;

use casq_core::casci::{
    decompose, dense_solve, natural_occupations, one_rdm, solve_multiplets, CiState, Multiplet,
    DEFAULT_DENSE_CAP,
};
use casq_core::detspace::{count_determinants, CasSpace};
use casq_core::soc::{gap_report, GTensor, SocAnalysis};
use casq_core::spectra::{
    broaden, energy_grid, grid_covers, label_heuristic, oscillator_strength, parse_lines,
    spectrum_csv, transition_dipole, SpectrumLine,
};
use casq_core::units::{hartree_to_cm, hartree_to_ev, G_ELECTRON};
use serde::Serialize;

use crate::inputs::{load_problem, read_input, Problem};
use crate::manifest::RunManifest;
use crate::{CliError, Oracle, RunArgs};

/// Decomposition lines below this weight are not printed.
const DECOMPOSITION_THRESHOLD_PERCENT: f64 = 5.0;
/// Davidson versus dense disagreement that is reported as a warning.
const ORACLE_WARN_HARTREE: f64 = 1e-9;

fn write_out(
    dir: &Path,
    name: &str,
    text: &str,
    manifest: &mut RunManifest,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    manifest.outputs.push(path.display().to_string());
    Ok(())
}

fn write_json<T: Serialize>(
    dir: &Path,
    name: &str,
    value: &T,
    manifest: &mut RunManifest,
) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report serializes") + "\n";
    write_out(dir, name, &text, manifest)
}

pub fn count(
    n_elec: usize,
    n_orb: usize,
    ms2: i32,
    manifest: &mut RunManifest,
) -> Result<(), CliError> {
    let n = count_determinants(n_elec, n_orb, ms2)?;
    manifest.config = Some(format!("cas_nelec={n_elec}\ncas_norb={n_orb}\nms2={ms2}\n"));
    println!("{n}");
    Ok(())
}

fn solve(problem: &Problem, manifest: &mut RunManifest) -> Result<Vec<Multiplet>, CliError> {
    let cfg = &problem.config;
    let mults = manifest.time("casci", || {
        solve_multiplets(
            problem.n_elec,
            problem.n_orb,
            &problem.integrals,
            &cfg.roots_per_multiplicity,
            &cfg.davidson,
        )
    })?;
    for m in &mults {
        let contamination = m.top().spin_contamination();
        if contamination > 1e-6 {
            manifest.warn(format!(
                "multiplet {} has |<S^2> - S(S+1)| = {contamination:.2e}",
                m.id
            ));
        }
    }
    Ok(mults)
}

#[derive(Serialize)]
struct DecompositionEntry {
    determinant: String,
    percent: f64,
    pair_summed: bool,
}

#[derive(Serialize)]
struct StateEntry {
    id: usize,
    multiplicity: u32,
    energy_hartree: f64,
    excitation_ev: f64,
    s2: f64,
    decomposition: Vec<DecompositionEntry>,
}

#[derive(Serialize)]
struct BlockEntry {
    ms2: i32,
    determinants: usize,
    /// (multiplet id, component energy in Hartree)
    components: Vec<(usize, f64)>,
    max_deviation_hartree: f64,
}

#[derive(Serialize)]
struct OracleEntry {
    multiplicity: u32,
    davidson_hartree: Vec<f64>,
    dense_hartree: Vec<f64>,
    max_deviation_hartree: f64,
}

#[derive(Serialize)]
struct CasciReport {
    cas: (usize, usize),
    orbitals: Vec<String>,
    states: Vec<StateEntry>,
    ms2_blocks: Vec<BlockEntry>,
    ground_occupations: Vec<f64>,
    pseudo_natural_occupations: Vec<f64>,
    gaps: casq_core::soc::GapReport,
    oracle: Option<Vec<OracleEntry>>,
}

fn state_entries(problem: &Problem, mults: &[Multiplet]) -> Result<Vec<StateEntry>, CliError> {
    let e0 = mults.first().map(|m| m.energy).unwrap_or(0.0);
    mults
        .iter()
        .map(|m| {
            let top = m.top();
            let space = CasSpace::new(problem.n_elec, problem.n_orb, top.ms2)?;
            Ok(StateEntry {
                id: m.id,
                multiplicity: m.multiplicity(),
                energy_hartree: m.energy,
                excitation_ev: hartree_to_ev(m.energy - e0),
                s2: top.s2_expect,
                decomposition: decompose(&space, &top.coeffs, DECOMPOSITION_THRESHOLD_PERCENT)
                    .into_iter()
                    .map(|l| DecompositionEntry {
                        determinant: l.determinant,
                        percent: l.weight_percent,
                        pair_summed: l.pair_summed,
                    })
                    .collect(),
            })
        })
        .collect()
}

fn occupations(problem: &Problem, mults: &[Multiplet]) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    if mults.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let ground = mults[0].top();
    let space = CasSpace::new(problem.n_elec, problem.n_orb, ground.ms2)?;
    let g = natural_occupations(&one_rdm(&space, &[&ground.coeffs], &[1.0])?)?;
    // every multiplet has a component at the lowest |2M_S|
    let ms2 = (problem.n_elec % 2) as i32;
    let low = CasSpace::new(problem.n_elec, problem.n_orb, ms2)?;
    let comps: Vec<&[f64]> = mults
        .iter()
        .map(|m| {
            m.component(ms2)
                .expect("component exists")
                .coeffs
                .as_slice()
        })
        .collect();
    let w = vec![1.0 / comps.len() as f64; comps.len()];
    let sa = natural_occupations(&one_rdm(&low, &comps, &w)?)?;
    Ok((g, sa))
}

fn dense_check(
    problem: &Problem,
    mults: &[Multiplet],
    manifest: &mut RunManifest,
) -> Result<Vec<OracleEntry>, CliError> {
    let mut out = Vec::new();
    for (&mult, &k) in &problem.config.roots_per_multiplicity {
        let space = CasSpace::new(problem.n_elec, problem.n_orb, mult as i32 - 1)?;
        let all = manifest.time("dense oracle", || {
            dense_solve(&space, &problem.integrals, space.len(), DEFAULT_DENSE_CAP)
        })?;
        let dense: Vec<f64> = all
            .iter()
            .filter(|s| s.multiplicity == mult)
            .take(k)
            .map(|s| s.energy)
            .collect();
        let dav: Vec<f64> = mults
            .iter()
            .filter(|m| m.multiplicity() == mult)
            .map(|m| m.energy)
            .collect();
        let dev = dav
            .iter()
            .zip(&dense)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if dev > ORACLE_WARN_HARTREE {
            manifest.warn(format!(
                "multiplicity {mult}: Davidson and dense energies differ by {dev:.2e} Eh"
            ));
        }
        out.push(OracleEntry {
            multiplicity: mult,
            davidson_hartree: dav,
            dense_hartree: dense,
            max_deviation_hartree: dev,
        });
    }
    Ok(out)
}

fn block_entries(
    problem: &Problem,
    mults: &[Multiplet],
    manifest: &mut RunManifest,
) -> Result<Vec<BlockEntry>, CliError> {
    let mut out = Vec::new();
    for &ms2 in &problem.config.ms2_blocks {
        let space = CasSpace::new(problem.n_elec, problem.n_orb, ms2)?;
        let expected: Vec<&Multiplet> = mults
            .iter()
            .filter(|m| m.component(ms2).is_some())
            .collect();
        let k = expected.len().min(space.len());
        let block = manifest.time("ms2 block", || {
            casq_core::casci::solve_davidson(
                &space,
                &problem.integrals,
                k,
                &problem.config.davidson,
            )
        })?;
        // each multiplet is matched with the nearest independently solved root
        let components: Vec<(usize, f64)> = expected
            .iter()
            .map(|m| {
                let e = block
                    .iter()
                    .map(|s| s.energy)
                    .min_by(|a, b| (a - m.energy).abs().total_cmp(&(b - m.energy).abs()))
                    .unwrap_or(f64::NAN);
                (m.id, e)
            })
            .collect();
        let dev = components
            .iter()
            .map(|(id, e)| (e - mults[*id].energy).abs())
            .fold(0.0, f64::max);
        if dev.is_nan() || dev > 1e-6 {
            manifest.warn(format!(
                "2M_S = {ms2} block roots differ from the multiplets by {dev:.2e} Eh; unrequested multiplicities may lie lower"
            ));
        }
        out.push(BlockEntry {
            ms2,
            determinants: space.len(),
            components,
            max_deviation_hartree: dev,
        });
    }
    Ok(out)
}

fn fmt_occ(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.4}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn render_casci(r: &CasciReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "CASCI({},{})", r.cas.0, r.cas.1);
    let _ = writeln!(out, "orbitals: {}", r.orbitals.join(" "));
    let _ = writeln!(out);
    let _ = writeln!(out, "  id  2S+1        E (Eh)      dE (eV)     <S^2>");
    for s in &r.states {
        let _ = writeln!(
            out,
            "{:4}  {:4}  {:16.10}  {:9.4}  {:9.6}",
            s.id, s.multiplicity, s.energy_hartree, s.excitation_ev, s.s2
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "Wave-function decomposition (u = spin up, d = spin down; weights >= {DECOMPOSITION_THRESHOLD_PERCENT:.0}%)"
    );
    for s in &r.states {
        let _ = writeln!(
            out,
            "state {} (2S+1 = {}, {:.4} eV)",
            s.id, s.multiplicity, s.excitation_ev
        );
        for d in &s.decomposition {
            let _ = writeln!(out, "  {} ({:.0}%)", d.determinant, d.percent);
        }
    }
    if !r.ms2_blocks.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "M_S blocks");
        for b in &r.ms2_blocks {
            let _ = writeln!(
                out,
                "  2M_S = {:3}: {} determinants, {} roots, max |E_block - E_multiplet| = {:.2e} Eh",
                b.ms2,
                b.determinants,
                b.components.len(),
                b.max_deviation_hartree
            );
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "natural occupations (ground state): {}",
        fmt_occ(&r.ground_occupations)
    );
    let _ = writeln!(
        out,
        "pseudo-natural occupations (equal-weight state average): {}",
        fmt_occ(&r.pseudo_natural_occupations)
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "Multiplet energies (cm-1)");
    out.push_str(&r.gaps.render());
    if let Some(oracle) = &r.oracle {
        let _ = writeln!(out);
        let _ = writeln!(out, "Dense oracle");
        for o in oracle {
            let _ = writeln!(
                out,
                "  2S+1 = {}: {} roots, max |E_davidson - E_dense| = {:.2e} Eh",
                o.multiplicity,
                o.davidson_hartree.len(),
                o.max_deviation_hartree
            );
        }
    }
    out
}

pub fn casci(args: &RunArgs, out: &Path, manifest: &mut RunManifest) -> Result<(), CliError> {
    let problem = load_problem(args, manifest)?;
    let mults = solve(&problem, manifest)?;
    let states = state_entries(&problem, &mults)?;
    let (ground_occupations, pseudo_natural_occupations) = occupations(&problem, &mults)?;
    let oracle = match args.oracle {
        Some(Oracle::Dense) => Some(dense_check(&problem, &mults, manifest)?),
        None => None,
    };
    let report = CasciReport {
        cas: problem.config.cas,
        orbitals: problem.labels.clone(),
        states,
        ms2_blocks: block_entries(&problem, &mults, manifest)?,
        ground_occupations,
        pseudo_natural_occupations,
        gaps: gap_report(&mults),
        oracle,
    };
    let text = render_casci(&report);
    print!("{text}");
    write_out(out, "casci.txt", &text, manifest)?;
    write_json(out, "casci.json", &report, manifest)
}

#[derive(Serialize)]
struct GRow {
    method: &'static str,
    roots: String,
    principal: [f64; 3],
    g_perp: f64,
    matrix: [[f64; 3]; 3],
}

#[derive(Serialize)]
struct GReport {
    cas: (usize, usize),
    g_electron: f64,
    rows: Vec<GRow>,
    ordering: String,
    /// Spin-orbit levels relative to the lowest (cm⁻¹).
    so_levels_cm: Vec<f64>,
    kramers_pairs: Vec<(usize, usize)>,
}

fn g_row(g: &GTensor, roots: &str) -> GRow {
    GRow {
        method: g.method.name(),
        roots: roots.to_string(),
        principal: g.principal,
        g_perp: 0.5 * (g.principal[0] + g.principal[1]),
        matrix: std::array::from_fn(|i| std::array::from_fn(|j| g.matrix[(i, j)])),
    }
}

fn ordering(g: &GTensor) -> String {
    let gz = g.principal[2];
    let gp = 0.5 * (g.principal[0] + g.principal[1]);
    let ge = G_ELECTRON;
    let mut v = [("g_z", gz), ("g_perp", gp), ("g_e", ge)];
    v.sort_by(|a, b| a.1.total_cmp(&b.1));
    // values equal at three decimals are printed as equal
    let mut s = v[0].0.to_string();
    for w in v.windows(2) {
        let rel = if (w[1].1 - w[0].1).abs() < 5e-4 {
            " = "
        } else {
            " < "
        };
        s.push_str(rel);
        s.push_str(w[1].0);
    }
    s
}

fn root_summary(mults: &[Multiplet]) -> String {
    let mut counts = std::collections::BTreeMap::new();
    for m in mults {
        *counts.entry(m.multiplicity()).or_insert(0usize) += 1;
    }
    counts
        .iter()
        .map(|(m, k)| {
            let name = match m {
                1 => "singlet",
                2 => "doublet",
                3 => "triplet",
                4 => "quartet",
                5 => "quintet",
                6 => "sextet",
                _ => "multiplet",
            };
            format!("{k} {name}{}", if *k == 1 { "" } else { "s" })
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn gtensor(args: &RunArgs, out: &Path, manifest: &mut RunManifest) -> Result<(), CliError> {
    let problem = load_problem(args, manifest)?;
    if problem.n_elec % 2 == 0 {
        return Err(CliError::Input(format!(
            "{} electrons: even electron count has no Kramers pair, g-tensor refused",
            problem.n_elec
        )));
    }
    let props = problem.properties.clone().ok_or_else(|| {
        CliError::Input("g-tensor needs --prop (or --lf) for L and SOC matrices".into())
    })?;
    if !problem.config.soc_enabled {
        manifest.warn("soc=false in the configuration; spin-orbit coupling is still required for g and was applied");
    }
    let mults = solve(&problem, manifest)?;
    let analysis = manifest.time("soc", || {
        SocAnalysis::run(&mults, &props, problem.n_elec, problem.n_orb)
    })?;
    let roots = root_summary(&mults);
    let eha = analysis.g_eha.as_ref().expect("odd electron count");
    let mut rows = vec![g_row(eha, &roots)];
    if let Some(sos) = &analysis.g_sos {
        rows.push(g_row(sos, &roots));
    } else {
        manifest.warn("no excited state with the ground-state spin; sum-over-states g skipped");
    }
    let e0 = analysis.states.energies.first().copied().unwrap_or(0.0);
    let report = GReport {
        cas: problem.config.cas,
        g_electron: G_ELECTRON,
        ordering: ordering(eha),
        so_levels_cm: analysis
            .states
            .energies
            .iter()
            .map(|e| hartree_to_cm(e - e0))
            .collect(),
        kramers_pairs: analysis.states.kramers_pairs.clone(),
        rows,
    };
    let mut text = String::new();
    let _ = writeln!(text, "g-tensor, CAS({},{})", report.cas.0, report.cas.1);
    let _ = writeln!(text, "method  roots                 g_x    g_y    g_z");
    for r in &report.rows {
        let _ = writeln!(
            text,
            "{:<6}  {:<20}  {:.3}  {:.3}  {:.3}",
            r.method, r.roots, r.principal[0], r.principal[1], r.principal[2]
        );
    }
    let _ = writeln!(text, "g_e = {:.6}", G_ELECTRON);
    let _ = writeln!(text, "ordering (EHA): {}", report.ordering);
    let _ = writeln!(text);
    let _ = writeln!(text, "spin-orbit levels (cm-1)");
    for (a, b) in &report.kramers_pairs {
        let _ = writeln!(text, "  {:3} {:3}  {:12.2}", a, b, report.so_levels_cm[*a]);
    }
    if report.kramers_pairs.is_empty() {
        for (k, e) in report.so_levels_cm.iter().enumerate() {
            let _ = writeln!(text, "  {k:3}  {e:12.2}");
        }
    }
    print!("{text}");
    write_out(out, "gtensor.txt", &text, manifest)?;
    write_json(out, "gtensor.json", &report, manifest)
}

#[derive(Serialize)]
struct LineRow {
    state: usize,
    weights: String,
    delta_e_ev: f64,
    f_osc: f64,
    band: Option<String>,
    spin_forbidden: bool,
    experiment: Option<f64>,
}

#[derive(Serialize)]
struct SpectrumReport {
    fwhm_ev: f64,
    lines: Vec<LineRow>,
}

fn computed_lines(
    problem: &Problem,
    manifest: &mut RunManifest,
) -> Result<(Vec<SpectrumLine>, Vec<String>), CliError> {
    let props = match &problem.properties {
        Some(p) if p.has_dipoles() => p.clone(),
        _ => {
            return Err(CliError::Input(
                "no dipole integrals (DIP_X/Y/Z in --prop); give --lines PATH instead".into(),
            ))
        }
    };
    let mults = solve(problem, manifest)?;
    let ground = &mults[0];
    let ms2 = ground.twice_s as i32;
    let space = CasSpace::new(problem.n_elec, problem.n_orb, ms2)?;
    let g = ground.top();
    let mut lines = Vec::new();
    let mut weights = Vec::new();
    for m in mults.iter().skip(1) {
        let target: &CiState = m.component(ms2).unwrap_or_else(|| m.top());
        let dip = transition_dipole(&space, g, target, &props)?;
        let de = m.energy - ground.energy;
        lines.push(SpectrumLine {
            from: ground.id,
            to: m.id,
            delta_e: hartree_to_ev(de),
            f_osc: oscillator_strength(de.max(0.0), dip.mu)?,
            label: None,
            spin_forbidden: dip.spin_forbidden,
        });
        let top_space = CasSpace::new(problem.n_elec, problem.n_orb, m.top().ms2)?;
        let lead = decompose(&top_space, &m.top().coeffs, DECOMPOSITION_THRESHOLD_PERCENT);
        weights.push(
            lead.iter()
                .take(2)
                .map(|l| l.render())
                .collect::<Vec<_>>()
                .join(", "),
        );
    }
    Ok((lines, weights))
}

pub fn spectrum(
    args: &RunArgs,
    lines_path: Option<&Path>,
    out: &Path,
    manifest: &mut RunManifest,
) -> Result<(), CliError> {
    let (mut lines, weights, spec_cfg) = match lines_path {
        Some(path) => {
            let text = read_input(path, manifest)?;
            let lines = parse_lines(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let spec_cfg = match &args.config {
                Some(c) => {
                    let t = read_input(c, manifest)?;
                    casq_core::ingest::parse_run_config(&t)
                        .map_err(|e| CliError::Input(format!("{}: {e}", c.display())))?
                        .spectrum
                }
                None => casq_core::ingest::SpectrumConfig::default(),
            };
            let n = lines.len();
            (lines, vec![String::new(); n], spec_cfg)
        }
        None => {
            let problem = load_problem(args, manifest)?;
            let (lines, weights) = computed_lines(&problem, manifest)?;
            (lines, weights, problem.config.spectrum.clone())
        }
    };
    label_heuristic(&mut lines);
    let grid = energy_grid(spec_cfg.min_ev, spec_cfg.max_ev, spec_cfg.step_ev)?;
    if !grid_covers(&lines, spec_cfg.fwhm_ev, &grid) {
        manifest.warn(
            "spectrum grid does not reach 3 sigma beyond every line; band areas are truncated",
        );
    }
    let curve = manifest.time("broaden", || broaden(&lines, spec_cfg.fwhm_ev, &grid))?;
    write_out(out, "spectrum.csv", &spectrum_csv(&grid, &curve), manifest)?;

    let rows: Vec<LineRow> = lines
        .iter()
        .zip(&weights)
        .map(|(l, w)| LineRow {
            state: l.to,
            weights: w.clone(),
            delta_e_ev: l.delta_e,
            f_osc: l.f_osc,
            band: l.label.clone(),
            spin_forbidden: l.spin_forbidden,
            experiment: None,
        })
        .collect();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "state  dE (eV)   band (f)                          exp.  weights"
    );
    for r in &rows {
        let band = match (&r.band, r.spin_forbidden) {
            (_, true) => format!("spin-forbidden ({:.4})", r.f_osc),
            (Some(b), false) => format!("{b} ({:.4})", r.f_osc),
            (None, false) => format!("({:.4})", r.f_osc),
        };
        let _ = writeln!(
            text,
            "{:5}  {:7.4}   {:<32}  {:>4}  {}",
            r.state, r.delta_e_ev, band, "-", r.weights
        );
    }
    print!("{text}");
    write_out(out, "lines.txt", &text, manifest)?;
    write_json(
        out,
        "lines.json",
        &SpectrumReport {
            fwhm_ev: spec_cfg.fwhm_ev,
            lines: rows,
        },
        manifest,
    )
}
