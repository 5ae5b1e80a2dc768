//! Fixed-format MPS output (and a reader for round-trip checks).
//!
//! Field positions follow the classic layout (columns 2-3, 5-12, 15-22, 25-36, 40-47,
//! 50-61). Model names are usually longer than eight characters; they still never contain
//! blanks, so the output stays readable by any solver that accepts free MPS.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::program::{Integrality, MixedIntegerProgram, Sense};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

const OBJ: &str = "COST";
const RHS: &str = "RHS";
const BND: &str = "BND";

pub fn write_mps(program: &MixedIntegerProgram, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), to_mps_string(program).as_bytes())
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn line(out: &mut String, code: &str, name: &str, pairs: &[(&str, String)]) {
    let mut s = format!(" {code:<2} {name:<8}");
    for (i, (n, v)) in pairs.iter().enumerate() {
        s.push_str(if i == 0 { "  " } else { "   " });
        let _ = write!(s, "{n:<8}  {v:<12}");
    }
    out.push_str(s.trim_end());
    out.push('\n');
}

fn paired(out: &mut String, name: &str, entries: &[(&str, f64)]) {
    for chunk in entries.chunks(2) {
        let pairs: Vec<(&str, String)> = chunk.iter().map(|&(n, v)| (n, num(v))).collect();
        line(out, "", name, &pairs);
    }
}

pub fn to_mps_string(program: &MixedIntegerProgram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME          {}", program.name);
    out.push_str("ROWS\n");
    line(&mut out, "N", OBJ, &[]);
    for row in &program.rows {
        let code = match row.sense {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        line(&mut out, code, &row.name, &[]);
    }

    let mut by_column: Vec<Vec<(usize, f64)>> = vec![Vec::new(); program.num_columns()];
    for (r, row) in program.rows.iter().enumerate() {
        for &(j, a) in &row.coeffs {
            by_column[j].push((r, a));
        }
    }
    out.push_str("COLUMNS\n");
    let mut in_marker = false;
    for (j, col) in program.columns.iter().enumerate() {
        let binary = col.integrality == Integrality::Binary;
        if binary != in_marker {
            let kind = if binary { "'INTORG'" } else { "'INTEND'" };
            let _ = writeln!(out, "    MARKER                 'MARKER'                 {kind}");
            in_marker = binary;
        }
        let mut entries: Vec<(&str, f64)> = Vec::new();
        if col.cost != 0.0 || by_column[j].is_empty() {
            entries.push((OBJ, col.cost));
        }
        entries.extend(by_column[j].iter().map(|&(r, a)| (program.rows[r].name.as_str(), a)));
        paired(&mut out, &col.name, &entries);
    }
    if in_marker {
        out.push_str("    MARKER                 'MARKER'                 'INTEND'\n");
    }

    out.push_str("RHS\n");
    let rhs: Vec<(&str, f64)> = program
        .rows
        .iter()
        .filter(|r| r.rhs != 0.0)
        .map(|r| (r.name.as_str(), r.rhs))
        .collect();
    paired(&mut out, RHS, &rhs);

    let mut bounds = String::new();
    for col in &program.columns {
        let bound = |out: &mut String, code: &str, v: Option<f64>| {
            let pairs: Vec<(&str, String)> = match v {
                Some(v) => vec![(col.name.as_str(), num(v))],
                None => vec![(col.name.as_str(), String::new())],
            };
            line(out, code, BND, &pairs);
        };
        let (lo, up) = (col.lower, col.upper);
        if lo == up {
            bound(&mut bounds, "FX", Some(lo));
            continue;
        }
        if lo == f64::NEG_INFINITY && up == f64::INFINITY {
            bound(&mut bounds, "FR", None);
            continue;
        }
        if lo == f64::NEG_INFINITY {
            bound(&mut bounds, "MI", None);
        } else if lo != 0.0 {
            bound(&mut bounds, "LO", Some(lo));
        }
        if up.is_finite() {
            bound(&mut bounds, "UP", Some(up));
        }
    }
    if !bounds.is_empty() {
        out.push_str("BOUNDS\n");
        out.push_str(&bounds);
    }
    out.push_str("ENDATA\n");
    out
}

/// Reads MPS produced by [`to_mps_string`] (whitespace-separated fields, one cost row).
pub fn parse_mps(text: &str) -> Result<MixedIntegerProgram> {
    let err = |line: usize, message: String| Error::Solution { line, message };
    let mut program = MixedIntegerProgram::new("");
    let mut section = "";
    let mut cost_row: Option<String> = None;
    let mut rows: HashMap<String, usize> = HashMap::new();
    let mut cols: HashMap<String, usize> = HashMap::new();
    let mut integer = false;

    for (n, raw) in text.lines().enumerate() {
        let n = n + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(' ') {
            section = fields[0];
            if section == "NAME" {
                program.name = fields.get(1).copied().unwrap_or("").to_owned();
            }
            continue;
        }
        let value = |s: &str| s.parse::<f64>().map_err(|_| err(n, format!("bad number `{s}`")));
        match section {
            "ROWS" => {
                let sense = match fields[0] {
                    "N" => {
                        cost_row = Some(fields[1].to_owned());
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    other => return Err(err(n, format!("unknown row type `{other}`"))),
                };
                rows.insert(fields[1].to_owned(), program.num_rows());
                program.add_row(fields[1], Vec::new(), sense, 0.0);
            }
            "COLUMNS" => {
                if fields.get(1) == Some(&"'MARKER'") {
                    integer = fields.get(2) == Some(&"'INTORG'");
                    continue;
                }
                let name = fields[0];
                let j = match cols.get(name) {
                    Some(&j) => j,
                    None => {
                        let (integrality, upper) = if integer {
                            (Integrality::Binary, 1.0)
                        } else {
                            (Integrality::Continuous, f64::INFINITY)
                        };
                        let j = program.add_column(name, 0.0, upper, 0.0, integrality);
                        cols.insert(name.to_owned(), j);
                        j
                    }
                };
                for pair in fields[1..].chunks(2) {
                    let [row, v] = pair else {
                        return Err(err(n, "unpaired column entry".into()));
                    };
                    let v = value(v)?;
                    if Some(*row) == cost_row.as_deref() {
                        program.columns[j].cost = v;
                    } else {
                        let r = *rows.get(*row).ok_or_else(|| err(n, format!("unknown row `{row}`")))?;
                        program.rows[r].coeffs.push((j, v));
                    }
                }
            }
            "RHS" => {
                for pair in fields[1..].chunks(2) {
                    let [row, v] = pair else {
                        return Err(err(n, "unpaired rhs entry".into()));
                    };
                    let r = *rows.get(*row).ok_or_else(|| err(n, format!("unknown row `{row}`")))?;
                    program.rows[r].rhs = value(v)?;
                }
            }
            "BOUNDS" => {
                let name = fields.get(2).ok_or_else(|| err(n, "bound without column".into()))?;
                let j = *cols.get(*name).ok_or_else(|| err(n, format!("unknown column `{name}`")))?;
                let c = &mut program.columns[j];
                match fields[0] {
                    "UP" => c.upper = value(fields[3])?,
                    "LO" => c.lower = value(fields[3])?,
                    "FX" => {
                        c.lower = value(fields[3])?;
                        c.upper = c.lower;
                    }
                    "FR" => {
                        c.lower = f64::NEG_INFINITY;
                        c.upper = f64::INFINITY;
                    }
                    "MI" => c.lower = f64::NEG_INFINITY,
                    "BV" => {
                        c.lower = 0.0;
                        c.upper = 1.0;
                    }
                    other => return Err(err(n, format!("unknown bound type `{other}`"))),
                }
            }
            other => return Err(err(n, format!("data line in section `{other}`"))),
        }
    }
    Ok(program)
}
