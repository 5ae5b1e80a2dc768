use std::collections::HashMap;
use std::path::Path;

use super::program::MixedIntegerProgram;
use crate::error::{Error, Result};

/// Column values read from an external solver, aligned to the program's columns.
#[derive(Clone, Debug, PartialEq)]
pub struct ExternalSolution {
    pub values: Vec<f64>,
    /// One entry per column the file did not mention (defaulted to 0).
    pub warnings: Vec<String>,
}

pub fn read_external_solution(path: impl AsRef<Path>, program: &MixedIntegerProgram) -> Result<ExternalSolution> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_external_solution(&text, program)
}

/// Parses `name<TAB>value` lines; blank lines and `#` comments are skipped.
pub fn parse_external_solution(text: &str, program: &MixedIntegerProgram) -> Result<ExternalSolution> {
    let index: HashMap<&str, usize> = program
        .columns
        .iter()
        .enumerate()
        .map(|(j, c)| (c.name.as_str(), j))
        .collect();
    let mut values: Vec<Option<f64>> = vec![None; program.num_columns()];
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((name, value)) = content.split_once('\t') else {
            return Err(Error::Solution {
                line,
                message: format!("expected `name<TAB>value`, got `{content}`"),
            });
        };
        let name = name.trim();
        let j = *index.get(name).ok_or_else(|| Error::Solution {
            line,
            message: format!("unknown column `{name}`"),
        })?;
        let value = value.trim();
        let v: f64 = value.parse().map_err(|_| Error::Solution {
            line,
            message: format!("unparsable value `{value}` for `{name}`"),
        })?;
        if values[j].replace(v).is_some() {
            return Err(Error::Solution {
                line,
                message: format!("column `{name}` listed twice"),
            });
        }
    }
    let mut warnings = Vec::new();
    let values = values
        .into_iter()
        .enumerate()
        .map(|(j, v)| {
            v.unwrap_or_else(|| {
                warnings.push(format!("column `{}` missing, assumed 0", program.columns[j].name));
                0.0
            })
        })
        .collect();
    Ok(ExternalSolution { values, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::Integrality;

    fn program() -> MixedIntegerProgram {
        let mut p = MixedIntegerProgram::new("s");
        p.add_column("y(S1,C1,widget)", 0.0, 10.0, 1.0, Integrality::Continuous);
        p.add_column("beta(S1,C1,widget)", 0.0, 1.0, 5.0, Integrality::Binary);
        p
    }

    #[test]
    fn complete_file() {
        let text = "# from an external solver\ny(S1,C1,widget)\t4\nbeta(S1,C1,widget)\t1\n";
        let s = parse_external_solution(text, &program()).unwrap();
        assert_eq!(s.values, vec![4.0, 1.0]);
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn missing_columns_default_to_zero() {
        let s = parse_external_solution("beta(S1,C1,widget)\t1\n", &program()).unwrap();
        assert_eq!(s.values, vec![0.0, 1.0]);
        assert_eq!(s.warnings.len(), 1);
        assert!(s.warnings[0].contains("y(S1,C1,widget)"));
    }

    #[test]
    fn unknown_name_is_an_error() {
        let err = parse_external_solution("y(S9,C1,widget)\t1\n", &program()).unwrap_err();
        assert!(matches!(err, Error::Solution { line: 1, .. }), "{err}");
    }

    #[test]
    fn unparsable_value_is_an_error() {
        assert!(parse_external_solution("y(S1,C1,widget)\tfour\n", &program()).is_err());
    }
}
