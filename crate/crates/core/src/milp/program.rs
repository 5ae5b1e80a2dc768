use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Integrality {
    Continuous,
    Binary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub cost: f64,
    pub integrality: Integrality,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    /// `(column, coefficient)` pairs; a column appears at most once.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        match self.sense {
            Sense::Le => (act - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - act).max(0.0),
            Sense::Eq => (act - self.rhs).abs(),
        }
    }
}

/// Minimization over bounded columns subject to linear rows.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MixedIntegerProgram {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
}

impl MixedIntegerProgram {
    pub fn new(name: impl Into<String>) -> Self {
        MixedIntegerProgram {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn add_column(&mut self, name: impl Into<String>, lower: f64, upper: f64, cost: f64, integrality: Integrality) -> usize {
        let (lower, upper) = match integrality {
            Integrality::Binary => (lower.max(0.0), upper.min(1.0)),
            Integrality::Continuous => (lower, upper),
        };
        self.columns.push(Column {
            name: name.into(),
            lower,
            upper,
            cost,
            integrality,
        });
        self.columns.len() - 1
    }

    pub fn add_row(&mut self, name: impl Into<String>, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> usize {
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
        for (j, a) in coeffs {
            debug_assert!(j < self.columns.len(), "row references column {j}");
            match merged.iter_mut().find(|(c, _)| *c == j) {
                Some(slot) => slot.1 += a,
                None => merged.push((j, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        self.rows.push(Row {
            name: name.into(),
            coeffs: merged,
            sense,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.columns.iter().zip(x).fold(0.0, |s, (c, v)| s + c.cost * v)
    }

    pub fn lower_bounds(&self) -> Vec<f64> {
        self.columns.iter().map(|c| c.lower).collect()
    }

    pub fn upper_bounds(&self) -> Vec<f64> {
        self.columns.iter().map(|c| c.upper).collect()
    }

    pub fn binary_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.integrality == Integrality::Binary)
            .map(|(j, _)| j)
    }

    /// Binary columns whose bounds still admit both values.
    pub fn free_binaries(&self) -> Vec<usize> {
        self.binary_columns()
            .filter(|&j| self.columns[j].lower < 0.5 && self.columns[j].upper > 0.5)
            .collect()
    }

    pub fn has_finite_bounds(&self) -> bool {
        self.columns.iter().all(|c| c.lower.is_finite() && c.upper.is_finite())
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let bounds = self
            .columns
            .iter()
            .zip(x)
            .map(|(c, &v)| (c.lower - v).max(v - c.upper).max(0.0));
        let rows = self.rows.iter().map(|r| r.violation(x));
        bounds.chain(rows).fold(0.0, f64::max)
    }

    pub fn column_by_name(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }
}
