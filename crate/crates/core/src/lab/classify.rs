use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::EntityId;
use crate::model::{ArcProduct, FlowPlan};

pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-6;

/// How a re-optimized plan responds to a disruption.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ResponseLabel {
    /// Keep the network and flow volumes.
    K,
    /// Interdict one or more edges touching the disrupted entity.
    E,
    /// Interdict the disrupted entity altogether.
    V,
    /// Keep the edges but reduce flow through the disrupted entity.
    R,
}

impl ResponseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ResponseLabel::K => "K",
            ResponseLabel::E => "E",
            ResponseLabel::V => "V",
            ResponseLabel::R => "R",
        }
    }
}

impl fmt::Display for ResponseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ResponseLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "K" => Ok(ResponseLabel::K),
            "E" => Ok(ResponseLabel::E),
            "V" => Ok(ResponseLabel::V),
            "R" => Ok(ResponseLabel::R),
            other => Err(Error::Config(format!("unknown response label `{other}`"))),
        }
    }
}

fn incident(key: &ArcProduct, entity: &EntityId) -> bool {
    &key.0 == entity || &key.1 == entity
}

fn same_keys<K: Ord, V>(a: &std::collections::BTreeMap<K, V>, b: &std::collections::BTreeMap<K, V>) -> bool {
    a.len() == b.len() && a.keys().eq(b.keys())
}

/// Labels `response` against `baseline` for a disruption of `disrupted`.
///
/// Checked in order: V if the entity's throughput (incident flows plus production) is at
/// most `tol`; E if an incident edge used in the baseline is unused in the response; R if
/// the used-edge sets agree but an incident flow dropped by more than `tol`; otherwise K.
pub fn classify_response(
    baseline: &FlowPlan,
    response: &FlowPlan,
    disrupted: &EntityId,
    tol: f64,
) -> Result<ResponseLabel> {
    if !same_keys(&baseline.y, &response.y)
        || !same_keys(&baseline.beta, &response.beta)
        || !same_keys(&baseline.p, &response.p)
    {
        return Err(Error::Dimension(
            "baseline and response plans index different variables".into(),
        ));
    }

    let throughput: f64 = response
        .y
        .iter()
        .filter(|(key, _)| incident(key, disrupted))
        .map(|(_, &v)| v)
        .sum::<f64>()
        + response
            .p
            .iter()
            .filter(|((i, _), _)| i == disrupted)
            .map(|(_, &v)| v)
            .sum::<f64>();
    if throughput <= tol {
        return Ok(ResponseLabel::V);
    }

    let dropped_edge = baseline
        .beta
        .iter()
        .any(|(key, &b)| incident(key, disrupted) && b > 0.5 && response.beta[key] <= 0.5);
    if dropped_edge {
        return Ok(ResponseLabel::E);
    }

    if baseline.used_edges() == response.used_edges() {
        let reduced = baseline
            .y
            .iter()
            .any(|(key, &before)| incident(key, disrupted) && before - response.y[key] > tol);
        if reduced {
            return Ok(ResponseLabel::R);
        }
    }
    Ok(ResponseLabel::K)
}
