use std::fmt::Write as _;

use super::study::{pooled, StudyCell, StudyReport};
use crate::instance::TopologyVariant;

pub const REPORT_HEADER: &str =
    "variant,entity,depth,policy,label,baseline_obj,response_obj,mean_lateness,std_lateness";
pub const SUMMARY_HEADER: &str = "variant,entity,depth,multiplier,cells,mean_lateness,std_lateness";
pub const HISTOGRAM_HEADER: &str = "variant,entity,policy,bin,count";
pub const TOTALS_HEADER: &str = "variant,entity,policy,replication,total_lateness";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn entity(cell: &StudyCell) -> String {
    cell.disruption.as_ref().map(|d| d.entity.to_string()).unwrap_or_default()
}

/// One row per cell. The label column holds the cell status when the cell did not solve.
pub fn report_csv(report: &StudyReport) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for c in &report.cells {
        let label = match (c.succeeded(), c.label) {
            (true, Some(l)) => l.to_string(),
            (true, None) => String::new(),
            (false, _) => c.status.as_str().to_owned(),
        };
        let lateness = c.lateness();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            c.variant,
            entity(c),
            opt(c.depth),
            c.policy,
            label,
            opt(c.baseline_objective),
            opt(c.response_objective),
            opt(lateness.map(|l| l.0)),
            opt(lateness.map(|l| l.1)),
        );
    }
    out
}

/// A pooled row: one variant and disruption across all policies.
#[derive(Clone, Debug, PartialEq)]
pub struct LatenessSummaryRow {
    pub variant: TopologyVariant,
    /// `None` for the undisrupted row.
    pub entity: Option<String>,
    pub depth: Option<usize>,
    pub multiplier: Option<f64>,
    /// Cells that contributed.
    pub cells: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

/// Per (variant, disruption): mean and population standard deviation, across policies,
/// of each cell's mean total customer lateness. Failed cells are left out.
pub fn average_lateness_summary(report: &StudyReport) -> Vec<LatenessSummaryRow> {
    let mut keys: Vec<(TopologyVariant, Option<(String, u64)>)> = Vec::new();
    for c in &report.cells {
        let key = (
            c.variant,
            c.disruption.as_ref().map(|d| (d.entity.to_string(), d.lead_time_multiplier.to_bits())),
        );
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|key| {
            let group = || {
                report.cells.iter().filter(|c| {
                    c.variant == key.0
                        && c.disruption.as_ref().map(|d| (d.entity.to_string(), d.lead_time_multiplier.to_bits()))
                            == key.1
                })
            };
            let first = group().next().expect("key came from a cell");
            let stats = pooled(group());
            LatenessSummaryRow {
                variant: key.0,
                entity: key.1.as_ref().map(|k| k.0.clone()),
                depth: first.depth,
                multiplier: first.disruption.as_ref().map(|d| d.lead_time_multiplier),
                cells: stats.map_or(0, |s| s.2),
                mean: stats.map(|s| s.0),
                std: stats.map(|s| s.1),
            }
        })
        .collect()
}

pub fn summary_csv(rows: &[LatenessSummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.variant,
            r.entity.as_deref().unwrap_or(""),
            opt(r.depth),
            opt(r.multiplier),
            r.cells,
            opt(r.mean),
            opt(r.std)
        );
    }
    out
}

/// Bin counts (width 1, from 0) of total customer lateness per simulated cell.
pub fn histogram_csv(report: &StudyReport) -> String {
    let mut out = String::from(HISTOGRAM_HEADER);
    out.push('\n');
    for c in report.cells.iter().filter(|c| c.succeeded()) {
        let totals = c.simulation.as_ref().map(|s| s.totals()).unwrap_or_default();
        let mut bins: Vec<u64> = Vec::new();
        for t in totals {
            let b = t.max(0.0).floor() as usize;
            if bins.len() <= b {
                bins.resize(b + 1, 0);
            }
            bins[b] += 1;
        }
        for (b, n) in bins.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{},{}", c.variant, entity(c), c.policy, b, n);
        }
    }
    out
}

/// Total customer lateness of every replication of every simulated cell.
pub fn totals_csv(report: &StudyReport) -> String {
    let mut out = String::from(TOTALS_HEADER);
    out.push('\n');
    for c in report.cells.iter().filter(|c| c.succeeded()) {
        for r in c.simulation.iter().flat_map(|s| &s.replications) {
            let _ = writeln!(out, "{},{},{},{},{}", c.variant, entity(c), c.policy, r.replication, r.total);
        }
    }
    out
}

/// A gnuplot script that draws the two data files written next to it.
pub fn gnuplot_script(summary_file: &str, histogram_file: &str) -> String {
    format!(
        "# Render with: gnuplot lateness.gp\n\
         set datafile separator ','\n\
         set terminal pngcairo size 900,600\n\
         set key autotitle columnhead\n\
         set output 'lateness_by_variant.png'\n\
         set style data histogram\n\
         set style histogram errorbars gap 2 lw 1\n\
         set ylabel 'mean total lateness'\n\
         plot '{summary_file}' using 6:7:xtic(stringcolumn(1).' '.stringcolumn(2)) title 'pooled over policies'\n\
         set output 'lateness_histogram.png'\n\
         set style data boxes\n\
         set xlabel 'total lateness bin'\n\
         set ylabel 'replications'\n\
         plot '{histogram_file}' using 4:5 title 'all cells'\n"
    )
}
