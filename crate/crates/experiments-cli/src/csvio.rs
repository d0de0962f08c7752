//! Plain-text artifacts: per-run trajectory CSV and the batch summary.

use anyhow::{bail, Context, Result};
use sim_engine::{Sample, Trajectory};
use std::fmt::Write as _;

pub const TRAJECTORY_HEADER: &str = "t,x,u,w,k";

/// Render a trajectory as CSV with full round-trip precision.
pub fn render_trajectory(trajectory: &Trajectory) -> String {
    let mut out = String::with_capacity(96 * (trajectory.samples.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for s in &trajectory.samples {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.t, s.x, s.u, s.w, s.k
        )
        .expect("string write cannot fail");
    }
    out
}

/// Parse a trajectory CSV produced by [`render_trajectory`].
pub fn parse_trajectory(text: &str) -> Result<Vec<Sample>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == TRAJECTORY_HEADER => {}
        Some(header) => bail!("unexpected trajectory header {header:?}"),
        None => bail!("empty trajectory file"),
    }
    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            bail!("line {}: expected 5 fields, got {}", i + 2, fields.len());
        }
        let parse = |j: usize| -> Result<f64> {
            fields[j]
                .trim()
                .parse::<f64>()
                .with_context(|| format!("line {}: bad number {:?}", i + 2, fields[j]))
        };
        samples.push(Sample {
            t: parse(0)?,
            x: parse(1)?,
            u: parse(2)?,
            w: parse(3)?,
            k: parse(4)?,
        });
    }
    Ok(samples)
}

/// One summary row per run.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub name: String,
    pub cell: String,
    pub status: String,
    pub contained: bool,
    pub converged: bool,
    pub control_bounded: bool,
    pub max_w: f64,
    pub sup_abs_u: f64,
    pub final_abs_x: f64,
    pub steps_accepted: u64,
    pub steps_rejected: u64,
}

pub fn render_summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    out.push_str(
        "name,status,contained,converged,control_bounded,max_w,sup_abs_u,final_abs_x,steps_accepted,steps_rejected,cell\n",
    );
    for r in rows {
        // Cell labels contain commas, so the field is quoted.
        writeln!(
            out,
            "{},{},{},{},{},{:.6e},{:.6e},{:.6e},{},{},\"{}\"",
            r.name,
            r.status,
            r.contained,
            r.converged,
            r.control_bounded,
            r.max_w,
            r.sup_abs_u,
            r.final_abs_x,
            r.steps_accepted,
            r.steps_rejected,
            r.cell
        )
        .expect("string write cannot fail");
    }
    out
}

pub fn render_summary_text(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    let contained = rows.iter().filter(|r| r.contained).count();
    let converged = rows.iter().filter(|r| r.converged).count();
    let escaped = rows.iter().filter(|r| r.status != "completed").count();
    writeln!(
        out,
        "{} runs: {} contained, {} converged, {} escaped",
        rows.len(),
        contained,
        converged,
        escaped
    )
    .expect("string write cannot fail");
    for r in rows {
        writeln!(
            out,
            "  {:<12} {:<10} contained={:<5} converged={:<5} max_w={:.4} |x(T)|={:.3e}  [{}]",
            r.name, r.status, r.contained, r.converged, r.max_w, r.final_abs_x, r.cell
        )
        .expect("string write cannot fail");
    }
    out
}
