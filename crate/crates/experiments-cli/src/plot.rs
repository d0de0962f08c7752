//! Gnuplot script emission: the trajectory between its funnel envelopes.
//!
//! Script generation only; nothing here links against a plotting
//! library, so batch artifacts build headless.

use crate::csvio::parse_trajectory;
use anyhow::{bail, Context, Result};
use funnel_core::{FunnelFunction, FunnelShape};
use std::fmt::Write as _;
use std::path::Path;

/// The envelope 1/phi(t) diverges where phi vanishes, so scripts start
/// the envelope curves at this time instead of zero.
pub const ENVELOPE_T_MIN: f64 = 1e-3;

/// A final sample at least this close to the boundary marks the run as
/// escaped when no explicit failure time is given.
const ESCAPE_W_LEVEL: f64 = 0.99;

fn envelope_expression(funnel: &FunnelFunction) -> String {
    match funnel.shape() {
        FunnelShape::Identity => "1.0 / x".into(),
        FunnelShape::ExpMinusOne { rate } => format!("1.0 / (exp({rate:?} * x) - 1.0)"),
    }
}

/// Read a trajectory CSV and write a self-contained gnuplot script next
/// to `out_path` plotting x(t) between the +-1/phi(t) envelopes.
///
/// When `t_fail` is given, or when the final sample sits essentially on
/// the boundary, the script places a marker at the failure time.
/// Returns the script text.
pub fn emit_plot_script(
    traj_csv: &Path,
    funnel: &FunnelFunction,
    t_fail: Option<f64>,
    out_path: &Path,
) -> Result<String> {
    let text = std::fs::read_to_string(traj_csv)
        .with_context(|| format!("cannot read trajectory {}", traj_csv.display()))?;
    let samples = parse_trajectory(&text)
        .with_context(|| format!("malformed trajectory {}", traj_csv.display()))?;
    if samples.is_empty() {
        bail!("trajectory {} has no samples", traj_csv.display());
    }

    let t_max = samples.last().expect("nonempty").t;
    let max_abs_x = samples.iter().fold(0.0f64, |m, s| m.max(s.x.abs()));
    let y_limit = (1.2 * max_abs_x).max(1.1);
    let marker = t_fail.or_else(|| {
        let last = samples.last().expect("nonempty");
        (last.w >= ESCAPE_W_LEVEL).then_some(last.t)
    });

    let mut script = String::new();
    writeln!(script, "# Trajectory against its funnel envelope.").unwrap();
    writeln!(script, "set terminal pngcairo size 1000,620").unwrap();
    writeln!(
        script,
        "set output '{}.png'",
        out_path.file_stem().and_then(|s| s.to_str()).unwrap_or("trajectory")
    )
    .unwrap();
    writeln!(script, "set xlabel 't'").unwrap();
    writeln!(script, "set ylabel 'x'").unwrap();
    writeln!(script, "set grid").unwrap();
    writeln!(script, "set xrange [0:{t_max:?}]").unwrap();
    writeln!(script, "set yrange [{:?}:{:?}]", -y_limit, y_limit).unwrap();
    writeln!(script, "envelope(x) = {}", envelope_expression(funnel)).unwrap();
    // The envelope blows up at t = 0; start it just after.
    writeln!(
        script,
        "upper(x) = (x >= {ENVELOPE_T_MIN:?}) ? envelope(x) : 1/0"
    )
    .unwrap();
    writeln!(script, "lower(x) = -upper(x)").unwrap();
    if let Some(t) = marker {
        writeln!(
            script,
            "set label 'escape' at {t:?}, 0 point pointtype 7 pointsize 2 offset 1,1"
        )
        .unwrap();
    }
    writeln!(
        script,
        "plot '{}' using 1:2 with lines linewidth 2 title 'x(t)', \\",
        traj_csv.display()
    )
    .unwrap();
    writeln!(script, "     upper(x) with lines dashtype 2 title '+1/phi(t)', \\").unwrap();
    writeln!(script, "     lower(x) with lines dashtype 2 title '-1/phi(t)'").unwrap();

    std::fs::write(out_path, &script)
        .with_context(|| format!("cannot write plot script {}", out_path.display()))?;
    Ok(script)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_csv(dir: &Path, name: &str, rows: &[(f64, f64, f64, f64, f64)]) -> std::path::PathBuf {
        let mut text = String::from("t,x,u,w,k\n");
        for (t, x, u, w, k) in rows {
            text.push_str(&format!("{t:?},{x:?},{u:?},{w:?},{k:?}\n"));
        }
        let path = dir.join(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn zero_trajectory_script_has_envelopes_from_small_t() {
        let dir = tempfile::tempdir().unwrap();
        let csv = write_csv(
            dir.path(),
            "zero.csv",
            &[(0.0, 0.0, 0.0, 0.0, 1.0), (10.0, 0.0, 0.0, 0.0, 1.0)],
        );
        let out = dir.path().join("zero.gp");
        let script = emit_plot_script(&csv, &FunnelFunction::identity(), None, &out).unwrap();
        assert!(script.contains("envelope(x) = 1.0 / x"));
        assert!(script.contains("0.001"));
        assert!(script.contains("'+1/phi(t)'"));
        assert!(script.contains("'-1/phi(t)'"));
        assert!(!script.contains("escape"));
        assert_eq!(std::fs::read_to_string(&out).unwrap(), script);
    }

    #[test]
    fn escaped_run_gets_a_marker() {
        let dir = tempfile::tempdir().unwrap();
        let csv = write_csv(
            dir.path(),
            "gone.csv",
            &[(0.0, 2.0, -1.0, 0.0, 1.0), (3.5, 0.285, -20.0, 0.9975, 400.0)],
        );
        let out = dir.path().join("gone.gp");
        let script = emit_plot_script(&csv, &FunnelFunction::identity(), None, &out).unwrap();
        assert!(script.contains("set label 'escape' at 3.5"));
    }

    #[test]
    fn explicit_failure_time_overrides_detection() {
        let dir = tempfile::tempdir().unwrap();
        let csv = write_csv(dir.path(), "a.csv", &[(0.0, 0.5, -0.1, 0.0, 1.0)]);
        let out = dir.path().join("a.gp");
        let script =
            emit_plot_script(&csv, &FunnelFunction::identity(), Some(1.25), &out).unwrap();
        assert!(script.contains("set label 'escape' at 1.25"));
    }

    #[test]
    fn exponential_funnel_envelope_uses_the_rate() {
        let dir = tempfile::tempdir().unwrap();
        let csv = write_csv(dir.path(), "e.csv", &[(0.0, 0.5, -0.1, 0.0, 1.0)]);
        let out = dir.path().join("e.gp");
        let funnel = FunnelFunction::exp_minus_one(0.5).unwrap();
        let script = emit_plot_script(&csv, &funnel, None, &out).unwrap();
        assert!(script.contains("1.0 / (exp(0.5 * x) - 1.0)"));
    }

    #[test]
    fn malformed_csv_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "nope\n1,2\n").unwrap();
        let out = dir.path().join("bad.gp");
        assert!(emit_plot_script(&path, &FunnelFunction::identity(), None, &out).is_err());
        assert!(emit_plot_script(
            &dir.path().join("missing.csv"),
            &FunnelFunction::identity(),
            None,
            &out
        )
        .is_err());
    }
}
