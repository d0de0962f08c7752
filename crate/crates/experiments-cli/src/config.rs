//! Experiment configuration: a TOML document describing named scenarios,
//! an optional cross-product sweep, and gap-certificate jobs.
//!
//! The shipped files under `configs/` double as format documentation.

use anyhow::{bail, Context, Result};
use chi_oracle::{CompactBox, GridSpec, Interval};
use funnel_core::{
    ClosedLoop, DriftFunction, FunnelFunction, PerturbationSignal, SignParameter,
};
use serde::{Deserialize, Serialize};
use sim_engine::{ScenarioSpec, Tolerances};
use std::collections::HashSet;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", tag = "kind")]
pub enum DriftConfig {
    Zero,
    Affine { a: f64, b: f64 },
    Quadratic { a: f64 },
}

impl DriftConfig {
    pub fn build(&self) -> DriftFunction {
        match *self {
            DriftConfig::Zero => DriftFunction::Zero,
            DriftConfig::Affine { a, b } => DriftFunction::Affine { a, b },
            DriftConfig::Quadratic { a } => DriftFunction::Quadratic { a },
        }
    }

    pub fn label(&self) -> String {
        match *self {
            DriftConfig::Zero => "zero".into(),
            DriftConfig::Affine { a, b } => format!("affine({a},{b})"),
            DriftConfig::Quadratic { a } => format!("quadratic({a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    deny_unknown_fields,
    rename_all = "kebab-case",
    rename_all_fields = "kebab-case",
    tag = "kind"
)]
pub enum PerturbationConfig {
    Constant {
        value: f64,
    },
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    SplineNoise {
        seed: u64,
        bound: f64,
        knot_spacing: f64,
    },
}

impl PerturbationConfig {
    /// Build the signal; spline noise lays its knots over [0, horizon].
    pub fn build(&self, horizon: f64, seed_override: Option<u64>) -> Result<PerturbationSignal> {
        Ok(match *self {
            PerturbationConfig::Constant { value } => PerturbationSignal::constant(value),
            PerturbationConfig::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => PerturbationSignal::sinusoid(amplitude, frequency, phase),
            PerturbationConfig::SplineNoise {
                seed,
                bound,
                knot_spacing,
            } => PerturbationSignal::bounded_noise_spline(
                seed_override.unwrap_or(seed),
                bound,
                knot_spacing,
                horizon,
            )
            .context("invalid spline-noise perturbation")?,
        })
    }

    pub fn label(&self) -> String {
        match *self {
            PerturbationConfig::Constant { value } => format!("constant({value})"),
            PerturbationConfig::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => format!("sinusoid({amplitude},{frequency},{phase})"),
            PerturbationConfig::SplineNoise {
                seed,
                bound,
                knot_spacing,
            } => format!("spline-noise({seed},{bound},{knot_spacing})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", tag = "kind")]
pub enum FunnelConfig {
    Identity,
    ExpMinusOne { rate: f64 },
}

impl FunnelConfig {
    pub fn build(&self) -> Result<FunnelFunction> {
        Ok(match *self {
            FunnelConfig::Identity => FunnelFunction::identity(),
            FunnelConfig::ExpMinusOne { rate } => {
                FunnelFunction::exp_minus_one(rate).context("invalid funnel rate")?
            }
        })
    }

    pub fn label(&self) -> String {
        match *self {
            FunnelConfig::Identity => "identity".into(),
            FunnelConfig::ExpMinusOne { rate } => format!("exp-minus-one({rate})"),
        }
    }
}

/// Integration controls shared by scenarios and sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct IntegrationConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_abs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard_margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_budget: Option<u64>,
}

/// One named run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ScenarioConfig {
    pub name: String,
    pub x0: f64,
    pub t_end: f64,
    pub eta: i32,
    pub drift: DriftConfig,
    pub perturbation: PerturbationConfig,
    pub funnel: FunnelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integration: Option<IntegrationConfig>,
}

/// Cross-product sweep axes; expansion order is drift, perturbation, x0,
/// eta, funnel (funnel fastest), giving stable run indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SweepConfig {
    pub t_end: f64,
    pub x0: Vec<f64>,
    pub eta: Vec<i32>,
    pub drift: Vec<DriftConfig>,
    pub perturbation: Vec<PerturbationConfig>,
    pub funnel: Vec<FunnelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integration: Option<IntegrationConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_half_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement_depth: Option<u32>,
}

impl GridConfig {
    fn build(&self) -> GridSpec {
        let d = GridSpec::default();
        GridSpec {
            p_points: self.p_points.unwrap_or(d.p_points),
            k_points: self.k_points.unwrap_or(d.k_points),
            v_half_points: self.v_half_points.unwrap_or(d.v_half_points),
            refinement_depth: self.refinement_depth.unwrap_or(d.refinement_depth),
        }
    }
}

/// One gap-certificate job over a compact box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ChiJobConfig {
    pub name: String,
    pub eta: i32,
    pub n_max: u32,
    /// [lo, hi] for the perturbation range P (lo == hi allowed).
    pub p: [f64; 2],
    /// [lo, hi] for the state range K.
    pub k: [f64; 2],
    pub drift: DriftConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    Csv,
    TextSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default)]
    pub format: ReportFormat,
}

/// Root document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scenario: Vec<ScenarioConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chi_job: Vec<ChiJobConfig>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).context("failed to parse experiment config")?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).context("failed to serialize experiment config")
    }

    fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for s in &self.scenario {
            if !names.insert(s.name.as_str()) {
                bail!("duplicate scenario name {:?}", s.name);
            }
        }
        let mut cert_names = HashSet::new();
        for j in &self.chi_job {
            if !cert_names.insert(j.name.as_str()) {
                bail!("duplicate chi-job name {:?}", j.name);
            }
        }
        if let Some(sweep) = &self.sweep {
            for (axis, len) in [
                ("x0", sweep.x0.len()),
                ("eta", sweep.eta.len()),
                ("drift", sweep.drift.len()),
                ("perturbation", sweep.perturbation.len()),
                ("funnel", sweep.funnel.len()),
            ] {
                if len == 0 {
                    bail!("sweep axis {axis} must be non-empty");
                }
            }
        }
        Ok(())
    }
}

/// A fully built run, ready for the engine.
#[derive(Debug, Clone)]
pub struct PlannedRun {
    pub name: String,
    /// Human-readable cell description for the summary.
    pub cell: String,
    pub spec: ScenarioSpec,
}

/// A fully built certificate job, ready for the oracle.
#[derive(Debug, Clone)]
pub struct PlannedCertificate {
    pub name: String,
    pub boxx: CompactBox,
    pub drift: DriftFunction,
    pub sign: SignParameter,
    pub n_max: u32,
    pub grid: GridSpec,
}

/// Everything a batch executes.
#[derive(Debug, Clone)]
pub struct BatchPlan {
    pub runs: Vec<PlannedRun>,
    pub certificates: Vec<PlannedCertificate>,
    pub format: ReportFormat,
}

/// Command-line overrides applied on top of the config.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub tol_rel: Option<f64>,
    pub tol_abs: Option<f64>,
    pub seed: Option<u64>,
}

fn apply_integration(
    spec: &mut ScenarioSpec,
    integration: Option<&IntegrationConfig>,
    overrides: &Overrides,
) {
    let defaults = Tolerances::default();
    let from_config = integration.copied().unwrap_or_default();
    spec.tolerances = Tolerances {
        rel: overrides
            .tol_rel
            .or(from_config.tol_rel)
            .unwrap_or(defaults.rel),
        abs: overrides
            .tol_abs
            .or(from_config.tol_abs)
            .unwrap_or(defaults.abs),
    };
    if let Some(g) = from_config.guard_margin {
        spec.guard_margin = g;
    }
    if let Some(b) = from_config.step_budget {
        spec.step_budget = b;
    }
}

impl ExperimentConfig {
    /// Expand into concrete runs and certificate jobs.
    pub fn plan(&self, overrides: &Overrides) -> Result<BatchPlan> {
        let mut runs = Vec::new();
        for s in &self.scenario {
            let sign = SignParameter::from_eta(s.eta)
                .with_context(|| format!("scenario {:?}", s.name))?;
            let plant = ClosedLoop {
                drift: s.drift.build(),
                perturbation: s.perturbation.build(s.t_end, overrides.seed)?,
                funnel: s.funnel.build()?,
                sign,
            };
            let mut spec = ScenarioSpec::new(plant, s.x0, s.t_end);
            apply_integration(&mut spec, s.integration.as_ref(), overrides);
            let cell = format!(
                "drift={} perturbation={} x0={} eta={} funnel={}",
                s.drift.label(),
                s.perturbation.label(),
                s.x0,
                s.eta,
                s.funnel.label()
            );
            runs.push(PlannedRun {
                name: s.name.clone(),
                cell,
                spec,
            });
        }

        if let Some(sweep) = &self.sweep {
            let mut index = 0usize;
            for drift in &sweep.drift {
                for perturbation in &sweep.perturbation {
                    for &x0 in &sweep.x0 {
                        for &eta in &sweep.eta {
                            for funnel in &sweep.funnel {
                                let sign = SignParameter::from_eta(eta)
                                    .context("sweep eta axis")?;
                                let plant = ClosedLoop {
                                    drift: drift.build(),
                                    perturbation: perturbation
                                        .build(sweep.t_end, overrides.seed)?,
                                    funnel: funnel.build()?,
                                    sign,
                                };
                                let mut spec =
                                    ScenarioSpec::new(plant, x0, sweep.t_end);
                                apply_integration(
                                    &mut spec,
                                    sweep.integration.as_ref(),
                                    overrides,
                                );
                                let cell = format!(
                                    "drift={} perturbation={} x0={} eta={} funnel={}",
                                    drift.label(),
                                    perturbation.label(),
                                    x0,
                                    eta,
                                    funnel.label()
                                );
                                runs.push(PlannedRun {
                                    name: format!("sweep-{index:03}"),
                                    cell,
                                    spec,
                                });
                                index += 1;
                            }
                        }
                    }
                }
            }
        }

        let mut certificates = Vec::new();
        for job in &self.chi_job {
            let p = Interval::new(job.p[0], job.p[1])
                .with_context(|| format!("chi-job {:?}: P interval", job.name))?;
            let k = Interval::new(job.k[0], job.k[1])
                .with_context(|| format!("chi-job {:?}: K interval", job.name))?;
            let boxx = CompactBox::new(p, k)
                .with_context(|| format!("chi-job {:?}", job.name))?;
            certificates.push(PlannedCertificate {
                name: job.name.clone(),
                boxx,
                drift: job.drift.build(),
                sign: SignParameter::from_eta(job.eta)
                    .with_context(|| format!("chi-job {:?}", job.name))?,
                n_max: job.n_max,
                grid: job.grid.as_ref().map_or_else(GridSpec::default, GridConfig::build),
            });
        }

        Ok(BatchPlan {
            runs,
            certificates,
            format: self.output.format,
        })
    }
}
