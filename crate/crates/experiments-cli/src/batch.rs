//! Batch execution: run every planned scenario and certificate job,
//! write per-run artifacts, and aggregate an exit verdict.
//!
//! Runs execute on a small worker pool pulling indices from a shared
//! counter; results are stored by index so the report and summary are
//! independent of scheduling. Each output file is written by exactly
//! one worker.

use crate::config::{BatchPlan, PlannedCertificate, PlannedRun, ReportFormat};
use crate::csvio::{render_summary_csv, render_summary_text, render_trajectory, SummaryRow};
use anyhow::{Context, Result};
use chi_oracle::certify_unboundedness;
use sim_engine::{
    check_invariants, simulate, InvariantReport, TrajectoryStats, TrajectoryStatus,
    CONVERGENCE_THRESHOLD, CONVERGENCE_WINDOW,
};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Outcome of one run, including the invariant verdicts.
#[derive(Debug, Clone)]
pub struct RunRow {
    pub name: String,
    pub cell: String,
    pub status: TrajectoryStatus,
    pub invariants: InvariantReport,
    pub stats: TrajectoryStats,
    pub steps_accepted: u64,
    pub steps_rejected: u64,
}

impl RunRow {
    pub fn status_label(&self) -> &'static str {
        match self.status {
            TrajectoryStatus::CompletedHorizon => "completed",
            TrajectoryStatus::BoundaryEscape { .. } => "boundary-escape",
            TrajectoryStatus::StepUnderflow { .. } => "step-underflow",
        }
    }

    fn summary(&self) -> SummaryRow {
        SummaryRow {
            name: self.name.clone(),
            cell: self.cell.clone(),
            status: self.status_label().into(),
            contained: self.invariants.funnel_contained,
            converged: self.invariants.converged,
            control_bounded: self.invariants.control_bounded,
            max_w: self.stats.max_w,
            sup_abs_u: self.stats.sup_abs_u,
            final_abs_x: self.stats.final_abs_x,
            steps_accepted: self.steps_accepted,
            steps_rejected: self.steps_rejected,
        }
    }
}

/// Outcome of one certificate job.
#[derive(Debug, Clone)]
pub struct CertificateRow {
    pub name: String,
    pub eta: i32,
    /// Certification succeeded and every entry margin is nonnegative.
    pub ok: bool,
    pub margins: Vec<f64>,
    pub error: Option<String>,
}

/// Aggregated batch result; counts are tallies over `rows`.
#[derive(Debug, Clone)]
pub struct BatchReport {
    pub rows: Vec<RunRow>,
    pub certificates: Vec<CertificateRow>,
    pub runs: usize,
    pub contained: usize,
    pub converged: usize,
    pub escaped: usize,
    /// True iff every run stayed contained and every certificate holds.
    pub exit_ok: bool,
}

fn execute_run(run: &PlannedRun, out_dir: &Path) -> Result<RunRow> {
    let trajectory = simulate(&run.spec)
        .with_context(|| format!("run {:?} failed to start", run.name))?;
    let invariants = check_invariants(&trajectory, CONVERGENCE_THRESHOLD, CONVERGENCE_WINDOW);
    let path = out_dir.join(format!("{}.csv", run.name));
    std::fs::write(&path, render_trajectory(&trajectory))
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(RunRow {
        name: run.name.clone(),
        cell: run.cell.clone(),
        status: trajectory.status,
        invariants,
        stats: trajectory.stats,
        steps_accepted: trajectory.steps_accepted,
        steps_rejected: trajectory.steps_rejected,
    })
}

fn execute_certificate(job: &PlannedCertificate, out_dir: &Path) -> Result<CertificateRow> {
    let result = certify_unboundedness(&job.boxx, &job.drift, job.sign, job.n_max, &job.grid);
    let path = out_dir.join(format!("{}.cert.txt", job.name));
    let row = match result {
        Ok(cert) => {
            std::fs::write(&path, cert.to_text())
                .with_context(|| format!("cannot write {}", path.display()))?;
            let margins: Vec<f64> = cert.entries.iter().map(|e| e.margin).collect();
            let ok = margins.iter().all(|&m| m >= 0.0);
            CertificateRow {
                name: job.name.clone(),
                eta: job.sign.eta() as i32,
                ok,
                margins,
                error: None,
            }
        }
        Err(err) => {
            std::fs::write(&path, format!("# certification failed: {err}\n"))
                .with_context(|| format!("cannot write {}", path.display()))?;
            CertificateRow {
                name: job.name.clone(),
                eta: job.sign.eta() as i32,
                ok: false,
                margins: Vec::new(),
                error: Some(err.to_string()),
            }
        }
    };
    Ok(row)
}

/// Execute a plan, writing one trajectory CSV per run, one certificate
/// file per job, and a summary file, all under `out_dir`.
pub fn run_batch(plan: &BatchPlan, out_dir: &Path, workers: usize) -> Result<BatchReport> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output dir {}", out_dir.display()))?;

    let n = plan.runs.len();
    let next = AtomicUsize::new(0);
    let collected: Mutex<Vec<(usize, Result<RunRow>)>> = Mutex::new(Vec::with_capacity(n));
    let worker_count = workers.max(1).min(n.max(1));
    std::thread::scope(|scope| {
        for _ in 0..worker_count {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let outcome = execute_run(&plan.runs[i], out_dir);
                collected.lock().expect("worker panicked").push((i, outcome));
            });
        }
    });
    let mut slots: Vec<Option<Result<RunRow>>> = (0..n).map(|_| None).collect();
    for (i, outcome) in collected.into_inner().expect("worker panicked") {
        slots[i] = Some(outcome);
    }
    let mut rows = Vec::with_capacity(n);
    for slot in slots {
        rows.push(slot.expect("every index executed")?);
    }

    let mut certificates = Vec::with_capacity(plan.certificates.len());
    for job in &plan.certificates {
        certificates.push(execute_certificate(job, out_dir)?);
    }

    let contained = rows.iter().filter(|r| r.invariants.funnel_contained).count();
    let converged = rows.iter().filter(|r| r.invariants.converged).count();
    let escaped = rows
        .iter()
        .filter(|r| !matches!(r.status, TrajectoryStatus::CompletedHorizon))
        .count();
    let exit_ok = contained == rows.len() && certificates.iter().all(|c| c.ok);

    let summary_rows: Vec<SummaryRow> = rows.iter().map(RunRow::summary).collect();
    let (summary_name, summary_text) = match plan.format {
        ReportFormat::Csv => ("summary.csv", render_summary_csv(&summary_rows)),
        ReportFormat::TextSummary => ("summary.txt", render_summary_text(&summary_rows)),
    };
    let summary_path = out_dir.join(summary_name);
    std::fs::write(&summary_path, summary_text)
        .with_context(|| format!("cannot write {}", summary_path.display()))?;

    Ok(BatchReport {
        runs: rows.len(),
        contained,
        converged,
        escaped,
        exit_ok,
        rows,
        certificates,
    })
}

/// Render the certificate section of the console report.
pub fn render_certificate_lines(certificates: &[CertificateRow]) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    for c in certificates {
        match &c.error {
            None => {
                let min = c.margins.iter().copied().fold(f64::INFINITY, f64::min);
                writeln!(
                    out,
                    "certificate {:<12} eta={:+} entries={} min_margin={:.6e} {}",
                    c.name,
                    c.eta,
                    c.margins.len(),
                    min,
                    if c.ok { "ok" } else { "FAILED" }
                )
                .expect("string write cannot fail");
            }
            Some(err) => {
                writeln!(out, "certificate {:<12} eta={:+} FAILED: {err}", c.name, c.eta)
                    .expect("string write cannot fail");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentConfig, Overrides};

    fn plan_from(text: &str) -> BatchPlan {
        ExperimentConfig::from_toml(text)
            .unwrap()
            .plan(&Overrides::default())
            .unwrap()
    }

    const ZERO_ONLY: &str = r#"
[[scenario]]
name = "zero"
x0 = 0.0
t-end = 10.0
eta = 1
drift = { kind = "zero" }
perturbation = { kind = "constant", value = 0.0 }
funnel = { kind = "identity" }
"#;

    #[test]
    fn zero_scenario_batch_is_clean() {
        let dir = tempfile::tempdir().unwrap();
        let report = run_batch(&plan_from(ZERO_ONLY), dir.path(), 1).unwrap();
        assert_eq!(report.runs, 1);
        assert_eq!(report.contained, 1);
        assert_eq!(report.converged, 1);
        assert_eq!(report.escaped, 0);
        assert!(report.exit_ok);
        let csv = std::fs::read_to_string(dir.path().join("zero.csv")).unwrap();
        assert!(csv.starts_with("t,x,u,w,k\n"));
        for line in csv.lines().skip(1) {
            let x: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert_eq!(x, 0.0);
        }
        assert!(dir.path().join("summary.csv").exists());
    }

    #[test]
    fn aggregate_counts_match_row_tallies() {
        let text = r#"
[sweep]
t-end = 20.0
x0 = [0.5, -2.0]
eta = [1, -1]
drift = [{ kind = "zero" }]
perturbation = [{ kind = "constant", value = 0.0 }]
funnel = [{ kind = "identity" }]
"#;
        let dir = tempfile::tempdir().unwrap();
        let report = run_batch(&plan_from(text), dir.path(), 2).unwrap();
        assert_eq!(report.runs, report.rows.len());
        assert_eq!(
            report.contained,
            report
                .rows
                .iter()
                .filter(|r| r.invariants.funnel_contained)
                .count()
        );
        assert_eq!(
            report.converged,
            report.rows.iter().filter(|r| r.invariants.converged).count()
        );
        assert_eq!(
            report.escaped,
            report
                .rows
                .iter()
                .filter(|r| !matches!(r.status, TrajectoryStatus::CompletedHorizon))
                .count()
        );
    }

    #[test]
    fn worker_count_does_not_change_report_order() {
        let text = r#"
[sweep]
t-end = 5.0
x0 = [0.25, 0.5, 1.0, 2.0]
eta = [1]
drift = [{ kind = "zero" }]
perturbation = [{ kind = "constant", value = 0.0 }]
funnel = [{ kind = "identity" }]
"#;
        let plan = plan_from(text);
        let d1 = tempfile::tempdir().unwrap();
        let d4 = tempfile::tempdir().unwrap();
        let serial = run_batch(&plan, d1.path(), 1).unwrap();
        let parallel = run_batch(&plan, d4.path(), 4).unwrap();
        let names: Vec<_> = serial.rows.iter().map(|r| r.name.clone()).collect();
        let names_parallel: Vec<_> = parallel.rows.iter().map(|r| r.name.clone()).collect();
        assert_eq!(names, names_parallel);
        for name in names {
            let a = std::fs::read(d1.path().join(format!("{name}.csv"))).unwrap();
            let b = std::fs::read(d4.path().join(format!("{name}.csv"))).unwrap();
            assert_eq!(a, b, "trajectory files differ for {name}");
        }
    }

    #[test]
    fn even_branch_certificate_has_three_positive_margins() {
        let text = r#"
[[chi-job]]
name = "even"
eta = 1
n-max = 4
p = [0.0, 0.0]
k = [-1.0, 1.0]
drift = { kind = "zero" }
"#;
        let dir = tempfile::tempdir().unwrap();
        let report = run_batch(&plan_from(text), dir.path(), 1).unwrap();
        assert!(report.exit_ok);
        assert_eq!(report.certificates.len(), 1);
        let cert = &report.certificates[0];
        assert!(cert.ok);
        assert_eq!(cert.margins.len(), 3);
        assert!(cert.margins.iter().all(|&m| m > 0.0));
        let text = std::fs::read_to_string(dir.path().join("even.cert.txt")).unwrap();
        assert!(text.starts_with("# eta +1\n"));
    }
}
