//! Run configuration document and validation.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use leakbench_core::harness::{AdversarySpec, ExperimentConfig, SweepDelta};
use leakbench_core::models::Trainer;
use leakbench_core::MasterSeed;

use crate::csv_load::CsvSchema;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Sweep,
    Collude,
    AuditDp,
    Curves,
    Report,
}

impl std::fmt::Display for Command {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Collude => "collude",
            Command::AuditDp => "audit-dp",
            Command::Curves => "curves",
            Command::Report => "report",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub grid: Vec<SweepDelta>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSection {
    pub epsilons: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    MembershipThresholdKnown,
    MembershipThresholdUnknown,
    AttributeBinary,
    DpBound,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvesSection {
    pub curve: CurveKind,
    pub abscissas: Vec<f64>,
    /// For `attribute-binary`: the residual stds.
    pub sigma_s: Option<f64>,
    pub sigma_d: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColludeSection {
    /// Held-out population samples for the utility-drop measurement.
    #[serde(default = "default_held_out")]
    pub held_out: usize,
    #[serde(default = "default_mu_trials")]
    pub mu_trials: usize,
}

fn default_held_out() -> usize {
    2000
}

fn default_mu_trials() -> usize {
    20_000
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSection {
    /// Path to a previously written results.json.
    pub results: PathBuf,
}

/// CSV-dataset experiment in the repeated train/test-split style.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    pub path: PathBuf,
    pub schema: CsvSchema,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    pub trainer: Trainer,
    pub adversary: AdversarySpec,
    pub seed: MasterSeed,
}

fn default_train_fraction() -> f64 {
    0.75
}

fn default_repeats() -> usize {
    100
}

/// The full run configuration document (JSON).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; must agree with the invoked subcommand when present.
    pub command: Option<Command>,
    pub out_dir: Option<PathBuf>,
    /// On membership simulations, also emit per-trial residual scores
    /// (residuals.csv) for error-distribution histograms.
    #[serde(default)]
    pub emit_residuals: bool,
    pub experiment: Option<ExperimentConfig>,
    pub dataset: Option<DatasetSection>,
    pub sweep: Option<SweepSection>,
    pub audit: Option<AuditSection>,
    pub curves: Option<CurvesSection>,
    pub collude: Option<ColludeSection>,
    pub report: Option<ReportSection>,
}

impl RunConfig {
    /// Collect every violation for the given command; refuse before running
    /// anything if the list is nonempty.
    pub fn validate_for(&self, command: Command) -> Result<(), Vec<String>> {
        let mut problems = Vec::new();
        if let Some(c) = self.command {
            if c != command {
                problems.push(format!(
                    "config documents command {c} but {command} was invoked"
                ));
            }
        }
        match command {
            Command::Simulate => {
                match (&self.experiment, &self.dataset) {
                    (None, None) => problems
                        .push("simulate needs an experiment or dataset section".into()),
                    (Some(_), Some(_)) => problems.push(
                        "simulate takes either an experiment or a dataset section, not both"
                            .into(),
                    ),
                    (Some(exp), None) => {
                        if let Err(mut errs) = exp.validate() {
                            problems.append(&mut errs);
                        }
                    }
                    (None, Some(ds)) => {
                        if !(ds.train_fraction > 0.0 && ds.train_fraction < 1.0) {
                            problems.push(format!(
                                "train_fraction must be in (0, 1), got {}",
                                ds.train_fraction
                            ));
                        }
                        if ds.repeats == 0 {
                            problems.push("dataset repeats must be >= 1".into());
                        }
                        if let Err(e) = ds.schema.validate() {
                            problems.push(e.to_string());
                        }
                    }
                }
            }
            Command::Sweep => {
                match &self.experiment {
                    Some(exp) => {
                        if let Err(mut errs) = exp.validate() {
                            problems.append(&mut errs);
                        }
                    }
                    None => problems.push("sweep needs an experiment section".into()),
                }
                match &self.sweep {
                    Some(s) if s.grid.is_empty() => {
                        problems.push("sweep grid must be nonempty".into())
                    }
                    Some(_) => {}
                    None => problems.push("sweep needs a sweep section with a grid".into()),
                }
            }
            Command::Collude => match &self.experiment {
                Some(exp) => {
                    if let Err(mut errs) = exp.validate() {
                        problems.append(&mut errs);
                    }
                    if !matches!(exp.trainer, Trainer::Colluding { .. }) {
                        problems.push("collude needs the colluding trainer".into());
                    }
                }
                None => problems.push("collude needs an experiment section".into()),
            },
            Command::AuditDp => {
                match &self.experiment {
                    Some(exp) => {
                        if let Err(mut errs) = exp.validate() {
                            problems.append(&mut errs);
                        }
                    }
                    None => problems.push("audit-dp needs an experiment section".into()),
                }
                match &self.audit {
                    Some(a) if a.epsilons.is_empty() => {
                        problems.push("audit epsilons must be nonempty".into())
                    }
                    Some(_) => {}
                    None => problems.push("audit-dp needs an audit section".into()),
                }
            }
            Command::Curves => match &self.curves {
                Some(c) => {
                    if c.abscissas.is_empty() {
                        problems.push("curves abscissas must be nonempty".into());
                    }
                    if c.curve == CurveKind::AttributeBinary
                        && (c.sigma_s.is_none() || c.sigma_d.is_none())
                    {
                        problems
                            .push("attribute-binary curve needs sigma_s and sigma_d".into());
                    }
                }
                None => problems.push("curves needs a curves section".into()),
            },
            Command::Report => {
                if self.report.is_none() {
                    problems.push("report needs a report section with a results path".into());
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems)
        }
    }
}
