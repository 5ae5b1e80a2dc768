use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyMode {
    None,
    Penalized,
}

/// Weights applied to every edge's fixed and unit late-delivery penalties.
///
/// Written as `none` or `unit:fixed`, e.g. `1:500`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatenessPolicy {
    pub mode: PolicyMode,
    pub unit_weight: f64,
    pub fixed_weight: f64,
}

impl LatenessPolicy {
    pub const NONE: LatenessPolicy = LatenessPolicy {
        mode: PolicyMode::None,
        unit_weight: 0.0,
        fixed_weight: 0.0,
    };

    pub fn penalized(unit_weight: f64, fixed_weight: f64) -> Result<Self> {
        let p = LatenessPolicy {
            mode: PolicyMode::Penalized,
            unit_weight,
            fixed_weight,
        };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        match self.mode {
            PolicyMode::None if self.unit_weight != 0.0 || self.fixed_weight != 0.0 => {
                Err(Error::Config("policy `none` cannot carry penalty weights".into()))
            }
            _ if !(self.unit_weight >= 0.0 && self.unit_weight.is_finite())
                || !(self.fixed_weight >= 0.0 && self.fixed_weight.is_finite()) =>
            {
                Err(Error::Config(format!(
                    "penalty weights must be finite and nonnegative, got {}:{}",
                    self.unit_weight, self.fixed_weight
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn is_penalized(&self) -> bool {
        self.mode == PolicyMode::Penalized
    }
}

impl fmt::Display for LatenessPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            PolicyMode::None => f.write_str("none"),
            PolicyMode::Penalized => write!(f, "{}:{}", self.unit_weight, self.fixed_weight),
        }
    }
}

impl FromStr for LatenessPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("none") {
            return Ok(LatenessPolicy::NONE);
        }
        let bad = || Error::Config(format!("policy `{s}`: expected `none` or `unit:fixed`"));
        let (u, f) = s.split_once(':').ok_or_else(bad)?;
        let u: f64 = u.trim().parse().map_err(|_| bad())?;
        let f: f64 = f.trim().parse().map_err(|_| bad())?;
        LatenessPolicy::penalized(u, f)
    }
}

impl Serialize for LatenessPolicy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PolicyRepr {
    Text(String),
    Table {
        mode: PolicyMode,
        #[serde(default)]
        unit_weight: f64,
        #[serde(default)]
        fixed_weight: f64,
    },
}

impl<'de> Deserialize<'de> for LatenessPolicy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let policy = match PolicyRepr::deserialize(d)? {
            PolicyRepr::Text(s) => s.parse().map_err(serde::de::Error::custom)?,
            PolicyRepr::Table {
                mode,
                unit_weight,
                fixed_weight,
            } => LatenessPolicy {
                mode,
                unit_weight,
                fixed_weight,
            },
        };
        policy.check().map_err(serde::de::Error::custom)?;
        Ok(policy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ratios() {
        let p: LatenessPolicy = "1:500".parse().unwrap();
        assert_eq!((p.unit_weight, p.fixed_weight), (1.0, 500.0));
        assert!(p.is_penalized());
        assert_eq!(p.to_string(), "1:500");
        assert_eq!("none".parse::<LatenessPolicy>().unwrap(), LatenessPolicy::NONE);
        assert!("1:-2".parse::<LatenessPolicy>().is_err());
        assert!("fast".parse::<LatenessPolicy>().is_err());
    }

    #[test]
    fn deserializes_text_or_table() {
        let v: Vec<LatenessPolicy> = serde_json::from_str(
            r#"["none", "1:0", {"mode": "penalized", "unit_weight": 1, "fixed_weight": 5000}]"#,
        )
        .unwrap();
        assert_eq!(v[2], LatenessPolicy::penalized(1.0, 5000.0).unwrap());
        let bad: std::result::Result<LatenessPolicy, _> =
            serde_json::from_str(r#"{"mode": "none", "unit_weight": 1}"#);
        assert!(bad.is_err());
    }
}
