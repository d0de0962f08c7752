use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use funnel_experiments::{
    emit_plot_script, render_certificate_lines, run_batch, BatchPlan, ExperimentConfig,
    FunnelConfig, Overrides,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "funnel-experiments",
    about = "Run funnel-control simulation batches and feedback-gap certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BatchArgs {
    /// Experiment config file (TOML).
    config: PathBuf,
    /// Output directory; overrides the config's output.dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for runs.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Override the relative integration tolerance for every run.
    #[arg(long)]
    tol_rel: Option<f64>,
    /// Override the absolute integration tolerance for every run.
    #[arg(long)]
    tol_abs: Option<f64>,
    /// Override the seed of every seeded perturbation.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenarios and sweep; exit 0 iff every run stays contained.
    Simulate(BatchArgs),
    /// Run the certificate jobs; exit 0 iff every margin is nonnegative.
    ChiScan(BatchArgs),
    /// Run both and apply the full exit contract.
    Verify(BatchArgs),
    /// Emit a gnuplot script for a trajectory CSV.
    Plot {
        /// Trajectory CSV produced by a batch run.
        traj_csv: PathBuf,
        /// Script path; defaults to the CSV path with extension .gp.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Funnel family for the envelope curves.
        #[arg(long, value_parser = ["identity", "exp-minus-one"], default_value = "identity")]
        funnel: String,
        /// Rate for the exp-minus-one funnel.
        #[arg(long)]
        rate: Option<f64>,
        /// Mark the trajectory as escaped at this time.
        #[arg(long)]
        t_fail: Option<f64>,
    },
}

fn overrides_of(args: &BatchArgs) -> Overrides {
    Overrides {
        tol_rel: args.tol_rel,
        tol_abs: args.tol_abs,
        seed: args.seed,
    }
}

fn output_dir(args: &BatchArgs, config: &ExperimentConfig) -> PathBuf {
    args.out
        .clone()
        .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"))
}

fn run_plan(plan: &BatchPlan, out_dir: &Path, workers: usize) -> Result<bool> {
    let report = run_batch(plan, out_dir, workers)?;
    if !report.rows.is_empty() {
        println!(
            "{} runs: {} contained, {} converged, {} escaped",
            report.runs, report.contained, report.converged, report.escaped
        );
    }
    print!("{}", render_certificate_lines(&report.certificates));
    println!("verdict: {}", if report.exit_ok { "ok" } else { "FAILED" });
    Ok(report.exit_ok)
}

fn batch_command(args: &BatchArgs, keep_runs: bool, keep_certificates: bool) -> Result<bool> {
    let config = ExperimentConfig::load(&args.config)?;
    let out_dir = output_dir(args, &config);
    let mut plan = config.plan(&overrides_of(args))?;
    if !keep_runs {
        plan.runs.clear();
    }
    if !keep_certificates {
        plan.certificates.clear();
    }
    run_plan(&plan, &out_dir, args.workers)
}

fn plot_command(
    traj_csv: &Path,
    out: Option<PathBuf>,
    funnel: &str,
    rate: Option<f64>,
    t_fail: Option<f64>,
) -> Result<bool> {
    let funnel_config = match funnel {
        "identity" => FunnelConfig::Identity,
        "exp-minus-one" => match rate {
            Some(rate) => FunnelConfig::ExpMinusOne { rate },
            None => bail!("--funnel exp-minus-one requires --rate"),
        },
        other => bail!("unknown funnel {other:?}"),
    };
    let out_path = out.unwrap_or_else(|| traj_csv.with_extension("gp"));
    emit_plot_script(traj_csv, &funnel_config.build()?, t_fail, &out_path)
        .context("plot emission failed")?;
    println!("wrote {}", out_path.display());
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate(args) => batch_command(args, true, false),
        Command::ChiScan(args) => batch_command(args, false, true),
        Command::Verify(args) => batch_command(args, true, true),
        Command::Plot {
            traj_csv,
            out,
            funnel,
            rate,
            t_fail,
        } => plot_command(traj_csv, out.clone(), funnel, *rate, *t_fail),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
