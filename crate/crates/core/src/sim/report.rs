use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::engine::{total, ReplicationResult};
use super::lead_time::LeadTimeModel;
use crate::error::Result;
use crate::fsutil::write_atomic;
use crate::instance::{EntityId, ProductId};

/// Lateness at or below this counts as on time.
pub const ON_TIME_TOL: f64 = 1e-9;

pub const REPLICATIONS_HEADER: &str = "replication,customer,product,lateness";
pub const SUMMARY_HEADER: &str = "customer,product,mean,std,on_time_fraction";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CustomerStats {
    pub customer: EntityId,
    pub product: ProductId,
    pub mean: f64,
    /// Population standard deviation over replications.
    pub std: f64,
    pub on_time_fraction: f64,
    /// Counts of lateness in `[b, b + 1)` for bin `b`.
    pub histogram: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub replication: u64,
    /// Aligned with [`SimulationReport::customers`].
    pub lateness: Vec<f64>,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub model: LeadTimeModel,
    pub master_seed: u64,
    pub customers: Vec<CustomerStats>,
    pub replications: Vec<ReplicationRecord>,
}

/// Mean and population standard deviation; `(0, 0)` for an empty slice.
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn histogram(values: &[f64]) -> Vec<u64> {
    let mut bins: Vec<u64> = Vec::new();
    for &v in values {
        let b = v.max(0.0).floor() as usize;
        if bins.len() <= b {
            bins.resize(b + 1, 0);
        }
        bins[b] += 1;
    }
    bins
}

fn stats(customer: EntityId, product: ProductId, values: &[f64]) -> CustomerStats {
    let (mean, std) = mean_and_std(values);
    let on_time = values.iter().filter(|&&v| v <= ON_TIME_TOL).count();
    CustomerStats {
        customer,
        product,
        mean,
        std,
        on_time_fraction: on_time as f64 / values.len().max(1) as f64,
        histogram: histogram(values),
    }
}

impl SimulationReport {
    pub(crate) fn from_results(model: LeadTimeModel, master_seed: u64, results: &[ReplicationResult]) -> Self {
        let keys: Vec<(EntityId, ProductId)> = results
            .first()
            .map(|r| r.lateness.keys().cloned().collect())
            .unwrap_or_default();
        let replications: Vec<ReplicationRecord> = results
            .iter()
            .map(|r| {
                let lateness: Vec<f64> = keys.iter().map(|k| r.lateness.get(k).copied().unwrap_or(0.0)).collect();
                ReplicationRecord {
                    replication: r.replication,
                    total: total(&lateness),
                    lateness,
                }
            })
            .collect();
        let customers = Self::aggregate(&keys, &replications);
        SimulationReport {
            model,
            master_seed,
            customers,
            replications,
        }
    }

    fn aggregate(keys: &[(EntityId, ProductId)], replications: &[ReplicationRecord]) -> Vec<CustomerStats> {
        keys.iter()
            .enumerate()
            .map(|(c, (cust, prod))| {
                let values: Vec<f64> = replications.iter().map(|r| r.lateness[c]).collect();
                stats(cust.clone(), prod.clone(), &values)
            })
            .collect()
    }

    pub fn totals(&self) -> Vec<f64> {
        self.replications.iter().map(|r| r.total).collect()
    }

    /// Mean and standard deviation of the per-replication total customer lateness.
    pub fn total_lateness_stats(&self) -> (f64, f64) {
        mean_and_std(&self.totals())
    }

    /// Recomputes every aggregate from the stored per-replication values.
    pub fn is_self_consistent(&self) -> bool {
        let keys: Vec<_> = self.customers.iter().map(|c| (c.customer.clone(), c.product.clone())).collect();
        let totals_ok = self
            .replications
            .iter()
            .all(|r| r.lateness.len() == keys.len() && r.total == total(&r.lateness));
        totals_ok && Self::aggregate(&keys, &self.replications) == self.customers
    }

    pub fn replications_csv(&self) -> String {
        let mut out = String::from(REPLICATIONS_HEADER);
        out.push('\n');
        for r in &self.replications {
            for (c, v) in self.customers.iter().zip(&r.lateness) {
                let _ = writeln!(out, "{},{},{},{}", r.replication, c.customer, c.product, v);
            }
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from(SUMMARY_HEADER);
        out.push('\n');
        for c in &self.customers {
            let _ = writeln!(out, "{},{},{},{},{}", c.customer, c.product, c.mean, c.std, c.on_time_fraction);
        }
        out
    }

    pub fn write_csvs(&self, replications: impl AsRef<Path>, summary: impl AsRef<Path>) -> Result<()> {
        write_atomic(replications.as_ref(), self.replications_csv().as_bytes())?;
        write_atomic(summary.as_ref(), self.summary_csv().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_statistics() {
        assert_eq!(mean_and_std(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]), (5.0, 2.0));
        assert_eq!(mean_and_std(&[]), (0.0, 0.0));
    }

    #[test]
    fn unit_width_bins() {
        assert_eq!(histogram(&[0.0, 0.5, 1.0, 2.999, 0.0]), vec![3, 1, 1]);
    }

    #[test]
    fn csv_headers_are_fixed() {
        let s = stats("C1".into(), "car".into(), &[0.0, 2.0]);
        assert_eq!(s.on_time_fraction, 0.5);
        let report = SimulationReport {
            model: LeadTimeModel::default(),
            master_seed: 1,
            customers: vec![s],
            replications: vec![
                ReplicationRecord {
                    replication: 0,
                    lateness: vec![0.0],
                    total: 0.0,
                },
                ReplicationRecord {
                    replication: 1,
                    lateness: vec![2.0],
                    total: 2.0,
                },
            ],
        };
        assert!(report.is_self_consistent());
        assert_eq!(report.replications_csv(), "replication,customer,product,lateness\n0,C1,car,0\n1,C1,car,2\n");
        assert_eq!(report.summary_csv(), "customer,product,mean,std,on_time_fraction\nC1,car,1,1,0.5\n");
    }
}
