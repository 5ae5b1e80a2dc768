mod common;

use std::collections::BTreeMap;

use chainflow::lab::{
    average_lateness_summary, load_study_config, report_csv, run_study, ResponseLabel, StudyConfig, VariantSpec,
    DEFAULT_CLASSIFY_TOL,
};
use chainflow::{Disruption, LatenessPolicy, TopologyVariant};
use common::data;

fn read_csv(name: &str) -> Vec<Vec<String>> {
    std::fs::read_to_string(data(name))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn desk_study_matches_frozen_labels_and_summary() {
    let config = load_study_config(data("study.cfg")).unwrap();
    let report = run_study(&config).unwrap();
    assert_eq!(report.cells.len(), 2 * 3 * 4 + 2);
    assert!(report.labels_consistent(DEFAULT_CLASSIFY_TOL));

    let mut labels = BTreeMap::new();
    for cell in report.disrupted_cells() {
        let d = cell.disruption.as_ref().unwrap();
        let key = (cell.variant.as_str().to_string(), d.entity.to_string(), cell.policy.to_string());
        labels.insert(key, cell.label.expect("every desk cell solves"));
    }
    let golden = read_csv("golden/desk_labels.csv");
    assert_eq!(golden.len(), labels.len());
    for row in golden {
        let key = (row[0].clone(), row[1].clone(), row[2].clone());
        let want: ResponseLabel = row[3].parse().unwrap();
        assert_eq!(labels[&key], want, "{key:?}");
    }

    let summary = average_lateness_summary(&report);
    let golden = read_csv("golden/desk_summary.csv");
    assert_eq!(summary.len(), golden.len());
    for (row, want) in summary.iter().zip(golden) {
        assert_eq!(row.variant.as_str(), want[0]);
        assert_eq!(row.entity.as_ref().map_or(String::new(), |e| e.to_string()), want[1]);
        assert_eq!(row.cells.to_string(), want[2]);
        for (got, want) in [(row.mean, &want[3]), (row.std, &want[4])] {
            let (got, want): (f64, f64) = (got.unwrap(), want.parse().unwrap());
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{got} vs {want}");
        }
    }
}

#[test]
fn identity_disruption_keeps_the_baseline() {
    let policies = vec![LatenessPolicy::NONE, LatenessPolicy::penalized(1.0, 500.0).unwrap()];
    let mut config = StudyConfig::new(
        data("desk.json"),
        vec![VariantSpec { topology: TopologyVariant::Tree, edits: None }],
        vec![Disruption::lead_time("S1", 1.0), Disruption::lead_time("D1", 1.0)],
        policies,
    );
    config.replications = 20;
    let report = run_study(&config).unwrap();
    assert_eq!(report.cells.len(), 2 * 2 + 1);
    for cell in report.disrupted_cells() {
        assert_eq!(cell.label, Some(ResponseLabel::K));
        let (b, r) = (cell.baseline_objective.unwrap(), cell.response_objective.unwrap());
        assert!((b - r).abs() <= 1e-6 * b.abs().max(1.0));
    }
    assert_eq!(report_csv(&report), report_csv(&run_study(&config).unwrap()));
}
