//! Batch front-end for the funnel-control experiments: config parsing,
//! sweep expansion, concurrent run execution, certificate jobs, and
//! flat-file artifacts (trajectory CSVs, certificate tables, summaries,
//! gnuplot scripts).

pub mod batch;
pub mod config;
pub mod csvio;
pub mod plot;

pub use batch::{render_certificate_lines, run_batch, BatchReport, CertificateRow, RunRow};
pub use config::{
    BatchPlan, ChiJobConfig, DriftConfig, ExperimentConfig, FunnelConfig, GridConfig,
    IntegrationConfig, OutputConfig, Overrides, PerturbationConfig, PlannedCertificate,
    PlannedRun, ReportFormat, ScenarioConfig, SweepConfig,
};
pub use csvio::{
    parse_trajectory, render_summary_csv, render_summary_text, render_trajectory, SummaryRow,
    TRAJECTORY_HEADER,
};
pub use plot::{emit_plot_script, ENVELOPE_T_MIN};
