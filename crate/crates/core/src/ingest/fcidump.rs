//! FCIDUMP reading and writing.

use std::fmt::Write as _;

use super::{IntegralSet, OrbitalSpace};
use crate::error::{CasqError, Result};

/// Contents of an FCIDUMP file.
#[derive(Debug, Clone, PartialEq)]
pub struct Fcidump {
    pub orbitals: OrbitalSpace,
    pub integrals: IntegralSet,
    pub nelec: usize,
    pub ms2: i32,
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    tok.replace(['D', 'd'], "E")
        .parse::<f64>()
        .map_err(|_| CasqError::parse(line, format!("cannot parse value '{tok}'")))
}

fn parse_index(tok: &str, line: usize, norb: usize) -> Result<usize> {
    let v: i64 = tok
        .parse()
        .map_err(|_| CasqError::parse(line, format!("cannot parse index '{tok}'")))?;
    if v < 0 || v > norb as i64 {
        return Err(CasqError::IndexOutOfRange {
            line,
            index: v,
            norb,
        });
    }
    Ok(v as usize)
}

#[derive(Default)]
struct Header {
    norb: Option<usize>,
    nelec: Option<usize>,
    ms2: Option<i32>,
}

impl Header {
    fn absorb(&mut self, text: &str, line: usize) -> Result<()> {
        let cleaned = text.replace("&FCI", " ").replace("&fci", " ");
        for tok in cleaned.split([',', ' ', '\t']) {
            let tok = tok.trim().trim_end_matches('/');
            let Some((key, val)) = tok.split_once('=') else {
                continue;
            };
            let key = key.trim().to_ascii_uppercase();
            let val = val.trim();
            let bad = || CasqError::parse(line, format!("bad header value {key}={val}"));
            match key.as_str() {
                "NORB" => self.norb = Some(val.parse().map_err(|_| bad())?),
                "NELEC" => self.nelec = Some(val.parse().map_err(|_| bad())?),
                "MS2" => self.ms2 = Some(val.parse().map_err(|_| bad())?),
                _ => {}
            }
        }
        Ok(())
    }
}

fn looks_numeric(line: &str) -> bool {
    line.split_whitespace()
        .next()
        .map(|t| t.replace(['D', 'd'], "E").parse::<f64>().is_ok())
        .unwrap_or(false)
}

/// Parse FCIDUMP text.
///
/// The header ends at a `/` or `&END` line; a body line appearing before any
/// terminator also ends it. Orbital-energy lines (`e i 0 0 0`) are ignored.
pub fn parse_fcidump(text: &str) -> Result<Fcidump> {
    let mut header = Header::default();
    let mut body_start = None;
    let lines: Vec<&str> = text.lines().collect();

    for (i, raw) in lines.iter().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let upper = line.to_ascii_uppercase();
        if upper == "/" || upper == "&END" {
            body_start = Some(i + 1);
            break;
        }
        if looks_numeric(line) && !line.contains('=') {
            body_start = Some(i);
            break;
        }
        header.absorb(line, lineno)?;
        if upper.ends_with('/') || upper.ends_with("&END") {
            body_start = Some(i + 1);
            break;
        }
    }

    let norb = header.norb.ok_or(CasqError::MissingHeader)?;
    if norb == 0 {
        return Err(CasqError::parse(1, "NORB must be positive"));
    }
    let nelec = header.nelec.unwrap_or(0);
    let ms2 = header.ms2.unwrap_or(0);
    let mut ints = IntegralSet::zeros(norb);

    for (i, raw) in lines
        .iter()
        .enumerate()
        .skip(body_start.unwrap_or(lines.len()))
    {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(CasqError::parse(
                lineno,
                format!("expected 'value i j k l', found {} fields", toks.len()),
            ));
        }
        let [i1, j1, k1, l1] = [
            parse_index(toks[1], lineno, norb)?,
            parse_index(toks[2], lineno, norb)?,
            parse_index(toks[3], lineno, norb)?,
            parse_index(toks[4], lineno, norb)?,
        ];
        // a literal "E" value is not a number; only accept numeric values
        let v = parse_value(toks[0], lineno)?;
        match (i1, j1, k1, l1) {
            (0, 0, 0, 0) => ints.core_energy = v,
            (p, q, 0, 0) if p > 0 && q > 0 => ints.set_h(p - 1, q - 1, v),
            (p, 0, 0, 0) if p > 0 => {}
            (p, q, r, s) if p > 0 && q > 0 && r > 0 && s > 0 => {
                ints.set_g2(p - 1, q - 1, r - 1, s - 1, v)
            }
            _ => {
                return Err(CasqError::parse(
                    lineno,
                    format!("unrecognised index pattern {i1} {j1} {k1} {l1}"),
                ))
            }
        }
    }

    Ok(Fcidump {
        orbitals: OrbitalSpace::numbered(norb, ints.core_energy),
        integrals: ints,
        nelec,
        ms2,
    })
}

/// Serialize unique non-zero integrals; values use shortest round-trip formatting.
pub fn write_fcidump(ints: &IntegralSet, nelec: usize, ms2: i32) -> String {
    let n = ints.n_orb();
    let mut out = String::new();
    let _ = writeln!(out, "&FCI NORB={n},NELEC={nelec},MS2={ms2},");
    let _ = writeln!(out, " ORBSYM={}", vec!["1"; n].join(","));
    let _ = writeln!(out, " ISYM=1,");
    let _ = writeln!(out, "/");
    for p in 0..n {
        for q in 0..=p {
            let pq = p * (p + 1) / 2 + q;
            for r in 0..n {
                for s in 0..=r {
                    let rs = r * (r + 1) / 2 + s;
                    if rs > pq {
                        continue;
                    }
                    let v = ints.g2(p, q, r, s);
                    if v != 0.0 {
                        let _ = writeln!(out, "{v:e} {} {} {} {}", p + 1, q + 1, r + 1, s + 1);
                    }
                }
            }
        }
    }
    for p in 0..n {
        for q in 0..=p {
            let v = ints.h(p, q);
            if v != 0.0 {
                let _ = writeln!(out, "{v:e} {} {} 0 0", p + 1, q + 1);
            }
        }
    }
    let _ = writeln!(out, "{:e} 0 0 0 0", ints.core_energy);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_two_electron_line_with_all_images() {
        let f = parse_fcidump("NORB=2,NELEC=2,MS2=0\n0.5 1 1 1 1\n").unwrap();
        assert_eq!(f.integrals.g2(0, 0, 0, 0), 0.5);
        let f = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0/\n0.25 2 1 1 1\n").unwrap();
        for (p, q, r, s) in [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)] {
            assert_eq!(f.integrals.g2(p, q, r, s), 0.25);
        }
        assert_eq!(f.nelec, 2);
        assert_eq!(f.ms2, 0);
    }

    #[test]
    fn reads_one_electron_and_core() {
        let f = parse_fcidump(
            "&FCI NORB=2,NELEC=1,MS2=1,\n&END\n-1.25 1 1 0 0\n0.1 2 1 0 0\n3.5 0 0 0 0\n",
        )
        .unwrap();
        assert_eq!(f.integrals.h(0, 0), -1.25);
        assert_eq!(f.integrals.h(0, 1), 0.1);
        assert_eq!(f.integrals.core_energy, 3.5);
        assert_eq!(f.orbitals.core_energy, 3.5);
    }

    #[test]
    fn fortran_exponents() {
        let f = parse_fcidump("&FCI NORB=1,NELEC=1,MS2=1/\n-1.5D-01 1 1 0 0\n").unwrap();
        assert_eq!(f.integrals.h(0, 0), -0.15);
    }

    #[test]
    fn index_out_of_range_names_index_and_line() {
        let err =
            parse_fcidump("&FCI NORB=5,NELEC=1,MS2=1/\n0.1 1 1 0 0\n0.7 6 1 1 1\n").unwrap_err();
        match err {
            CasqError::IndexOutOfRange { line, index, norb } => {
                assert_eq!((line, index, norb), (3, 6, 5));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err_string("&FCI NORB=5/\n0.7 6 1 1 1\n").contains("6"));
    }

    fn err_string(t: &str) -> String {
        parse_fcidump(t).unwrap_err().to_string()
    }

    #[test]
    fn unparsable_line_reports_line_number() {
        let e = parse_fcidump("&FCI NORB=2/\n0.1 1 1 0 0\nabc 1 1 1\n").unwrap_err();
        assert!(matches!(e, CasqError::Parse { line: 3, .. }));
    }

    #[test]
    fn missing_header() {
        assert!(matches!(
            parse_fcidump("0.5 1 1 1 1\n"),
            Err(CasqError::MissingHeader)
        ));
        assert!(matches!(parse_fcidump(""), Err(CasqError::MissingHeader)));
    }

    #[test]
    fn round_trip_is_exact() {
        let ints = super::super::random_integrals(4, 11);
        let text = write_fcidump(&ints, 4, 0);
        let back = parse_fcidump(&text).unwrap();
        assert_eq!(back.integrals, ints);
        assert_eq!(write_fcidump(&back.integrals, 4, 0), text);
    }
}
