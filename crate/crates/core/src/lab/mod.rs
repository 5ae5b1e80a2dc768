//! Scenario studies: lateness policies × disruptions × topology variants, with
//! response classification and out-of-sample lateness.

mod classify;
mod config;
mod study;
mod summary;

pub use classify::{classify_response, ResponseLabel, DEFAULT_CLASSIFY_TOL};
pub use config::{load_study_config, parse_study_config, StudyConfig, VariantSpec};
pub use study::{run_study, run_study_on, CellStatus, StudyCell, StudyReport};
pub use summary::{
    average_lateness_summary, gnuplot_script, histogram_csv, report_csv, summary_csv, totals_csv, LatenessSummaryRow,
    HISTOGRAM_HEADER, REPORT_HEADER, SUMMARY_HEADER, TOTALS_HEADER,
};
