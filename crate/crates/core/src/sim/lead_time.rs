use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SIGMA: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeadTimeFamily {
    Lognormal,
    Deterministic,
}

/// Lead-time noise. Log-normal samples use location `ln(l)`, so their median is `l`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LeadTimeModel {
    pub family: LeadTimeFamily,
    pub sigma: f64,
}

impl Default for LeadTimeModel {
    fn default() -> Self {
        LeadTimeModel {
            family: LeadTimeFamily::Lognormal,
            sigma: DEFAULT_SIGMA,
        }
    }
}

impl LeadTimeModel {
    pub fn lognormal(sigma: f64) -> Result<Self> {
        let m = LeadTimeModel {
            family: LeadTimeFamily::Lognormal,
            sigma,
        };
        m.check()?;
        Ok(m)
    }

    pub fn deterministic() -> Self {
        LeadTimeModel {
            family: LeadTimeFamily::Deterministic,
            sigma: 0.0,
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::Simulation(format!("sigma must be finite and nonnegative, got {}", self.sigma)));
        }
        Ok(())
    }

    /// True when every sample equals its deterministic lead time.
    pub fn is_degenerate(&self) -> bool {
        self.family == LeadTimeFamily::Deterministic || self.sigma == 0.0
    }
}

/// One realized lead time for deterministic lead time `l`.
pub fn sample_lead_time<R: Rng + ?Sized>(model: &LeadTimeModel, l: f64, rng: &mut R) -> Result<f64> {
    match model.family {
        LeadTimeFamily::Deterministic => Ok(l),
        LeadTimeFamily::Lognormal => {
            if !(l > 0.0) {
                return Err(Error::NonPositiveLeadTime(l));
            }
            if model.sigma == 0.0 {
                return Ok(l);
            }
            let dist = LogNormal::new(l.ln(), model.sigma).map_err(|e| Error::Simulation(e.to_string()))?;
            Ok(dist.sample(rng))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_sigma_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = LeadTimeModel::lognormal(0.0).unwrap();
        assert_eq!(sample_lead_time(&m, 5.0, &mut rng).unwrap(), 5.0);
    }

    #[test]
    fn deterministic_family_returns_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_lead_time(&LeadTimeModel::deterministic(), 7.0, &mut rng).unwrap(), 7.0);
    }

    #[test]
    fn non_positive_lead_time_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = LeadTimeModel::default();
        assert!(matches!(
            sample_lead_time(&m, 0.0, &mut rng),
            Err(Error::NonPositiveLeadTime(_))
        ));
    }

    #[test]
    fn negative_sigma_rejected() {
        assert!(LeadTimeModel::lognormal(-0.1).is_err());
    }
}
