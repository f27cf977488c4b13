//! Command execution and artifact emission.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use leakbench_core::analytic::{
    bound_dp_advantage, curve_attribute_binary, curve_membership_threshold,
    expected_colluding_advantage, ThresholdMode,
};
use leakbench_core::attribute::AttributeSchema;
use leakbench_core::harness::{
    audit_dp_bound, estimate_mu, run_attribute_experiment, run_membership_experiment,
    run_membership_with_scores, sweep, AdvantageEstimate, AdversarySpec,
    AttributeExperimentResult, DpAuditRow, MuEstimate, SweepRow, TrialRecord,
};
use leakbench_core::models::{loss_eval, Trainer};
use leakbench_core::rng::scope;
use leakbench_core::{Error, LossSpec, Result};

use crate::config::{Command, CurveKind, CurvesSection, RunConfig};
use crate::csv_load::{load_csv, LoadReport};
use crate::split::{run_split_experiment, SplitOutcome};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveRow {
    pub abscissa: f64,
    pub analytic: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColludeReport {
    pub advantage: AdvantageEstimate,
    pub expected: f64,
    pub mu: MuEstimate,
    pub utility_base: f64,
    pub utility_wrapped: f64,
    pub utility_drop: f64,
    /// `k n 2^-d`, the planted-collision mass from the stability argument.
    pub collision_bound: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ResultsPayload {
    Simulate {
        membership: Option<AdvantageEstimate>,
        attribute: Option<AttributeExperimentResult>,
        split: Option<SplitOutcome>,
        load: Option<LoadReport>,
        /// Per-trial diagnostics, present when residual emission was
        /// requested.
        residuals: Option<Vec<TrialRecord>>,
    },
    Sweep {
        rows: Vec<SweepRow>,
    },
    Audit {
        rows: Vec<DpAuditRow>,
    },
    Collude(ColludeReport),
    Curves {
        curve: String,
        rows: Vec<CurveRow>,
    },
}

/// The results.json document: every artifact embeds the master seed and the
/// hash of the configuration that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultsDocument {
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config_sha256: String,
    pub warnings: Vec<String>,
    pub payload: ResultsPayload,
}

pub fn config_hash(cfg: &RunConfig) -> String {
    let canonical = serde_json::to_string(cfg).expect("config serializes");
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn master_seed_of(cfg: &RunConfig) -> u64 {
    cfg.experiment
        .as_ref()
        .map(|e| e.seed.0)
        .or_else(|| cfg.dataset.as_ref().map(|d| d.seed.0))
        .unwrap_or(0)
}

/// Execute a validated command, returning the results document.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<ResultsDocument> {
    cfg.validate_for(command)
        .map_err(|problems| Error::Config(problems.join("; ")))?;

    let mut warnings = Vec::new();
    if let Some(exp) = &cfg.experiment {
        warnings.extend(exp.distribution.warnings());
    }

    let payload = match command {
        Command::Simulate => run_simulate(cfg)?,
        Command::Sweep => {
            let exp = cfg.experiment.as_ref().unwrap();
            let rows = sweep(exp, &cfg.sweep.as_ref().unwrap().grid)?;
            ResultsPayload::Sweep { rows }
        }
        Command::AuditDp => {
            let exp = cfg.experiment.as_ref().unwrap();
            let rows = audit_dp_bound(exp, &cfg.audit.as_ref().unwrap().epsilons)?;
            ResultsPayload::Audit { rows }
        }
        Command::Collude => run_collude(cfg)?,
        Command::Curves => run_curves(cfg.curves.as_ref().unwrap())?,
        Command::Report => {
            return Err(Error::Config(
                "report renders an existing results.json; use emit_report".into(),
            ))
        }
    };

    Ok(ResultsDocument {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        seed: master_seed_of(cfg),
        config_sha256: config_hash(cfg),
        warnings,
        payload,
    })
}

fn run_simulate(cfg: &RunConfig) -> Result<ResultsPayload> {
    if let Some(exp) = &cfg.experiment {
        return match &exp.adversary {
            AdversarySpec::Membership(_) => {
                let (estimate, residuals) = if cfg.emit_residuals {
                    let (estimate, records) = run_membership_with_scores(exp)?;
                    (estimate, Some(records))
                } else {
                    (run_membership_experiment(exp)?, None)
                };
                Ok(ResultsPayload::Simulate {
                    membership: Some(estimate),
                    attribute: None,
                    split: None,
                    load: None,
                    residuals,
                })
            }
            AdversarySpec::Attribute(_) => {
                let schema = AttributeSchema::from_distribution(&exp.distribution)?;
                Ok(ResultsPayload::Simulate {
                    membership: None,
                    attribute: Some(run_attribute_experiment(exp, &schema)?),
                    split: None,
                    load: None,
                    residuals: None,
                })
            }
        };
    }
    let section = cfg.dataset.as_ref().unwrap();
    let (data, load) = load_csv(&section.path, &section.schema)?;
    let split = run_split_experiment(section, &data, &load)?;
    Ok(ResultsPayload::Simulate {
        membership: None,
        attribute: None,
        split: Some(split),
        load: Some(load),
        residuals: None,
    })
}

fn run_collude(cfg: &RunConfig) -> Result<ResultsPayload> {
    let exp = cfg.experiment.as_ref().unwrap();
    let section = cfg.collude.clone().unwrap_or(crate::config::ColludeSection {
        held_out: 2000,
        mu_trials: 20_000,
    });
    let Trainer::Colluding { base, keys, .. } = &exp.trainer else {
        return Err(Error::Config("collude needs the colluding trainer".into()));
    };

    let advantage = run_membership_experiment(exp)?;
    let mu = estimate_mu(&exp.distribution, exp.n, section.mu_trials, exp.seed.child(1))?;
    let materialized = keys.materialize();
    let expected =
        expected_colluding_advantage(materialized.m_bits, materialized.k() as u32, mu.mu)?;

    // utility drop on held-out population samples, base vs wrapped
    let mut rng = exp.seed.stream(scope::UTILITY_TRIAL, 0);
    let s = exp.distribution.sample_training_set(exp.n, &mut rng)?;
    let base_model = base.train(&s, &exp.distribution, &mut rng)?;
    let wrapped_model = exp.trainer.train(&s, &exp.distribution, &mut rng)?;
    let loss = LossSpec::zero_one();
    let mut base_hits = 0usize;
    let mut wrapped_hits = 0usize;
    for _ in 0..section.held_out {
        let z = exp.distribution.sample_population(&mut rng);
        base_hits += usize::from(loss_eval(&base_model, &z, &loss)? == 0.0);
        wrapped_hits += usize::from(loss_eval(&wrapped_model, &z, &loss)? == 0.0);
    }
    let utility_base = base_hits as f64 / section.held_out as f64;
    let utility_wrapped = wrapped_hits as f64 / section.held_out as f64;
    let collision_bound = (materialized.k() * exp.n) as f64
        * (-(f64::from(materialized.d_bits())) * std::f64::consts::LN_2).exp();

    Ok(ResultsPayload::Collude(ColludeReport {
        advantage,
        expected,
        mu,
        utility_base,
        utility_wrapped,
        utility_drop: (utility_base - utility_wrapped).abs(),
        collision_bound,
    }))
}

fn run_curves(section: &CurvesSection) -> Result<ResultsPayload> {
    let rows: Result<Vec<CurveRow>> = section
        .abscissas
        .iter()
        .map(|&x| {
            let analytic = match section.curve {
                CurveKind::MembershipThresholdKnown => {
                    curve_membership_threshold(x, ThresholdMode::Known)?
                }
                CurveKind::MembershipThresholdUnknown => {
                    curve_membership_threshold(x, ThresholdMode::Unknown)?
                }
                CurveKind::AttributeBinary => curve_attribute_binary(
                    x,
                    section.sigma_s.unwrap(),
                    section.sigma_d.unwrap(),
                )?,
                CurveKind::DpBound => bound_dp_advantage(x)?,
            };
            Ok(CurveRow {
                abscissa: x,
                analytic,
            })
        })
        .collect();
    Ok(ResultsPayload::Curves {
        curve: format!("{:?}", section.curve),
        rows: rows?,
    })
}

/// Write results.json plus, for sweep/curves, the plot-data CSV with columns
/// `abscissa, empirical, stderr, analytic` in that order.
pub fn write_artifacts(doc: &ResultsDocument, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut written = Vec::new();

    let results_path = out_dir.join("results.json");
    let json = serde_json::to_string_pretty(doc).expect("results serialize");
    fs::write(&results_path, json)
        .map_err(|e| Error::Config(format!("cannot write results.json: {e}")))?;
    written.push(results_path);

    let stamp = format!(
        "# seed={} config_sha256={}\n",
        doc.seed, doc.config_sha256
    );
    match &doc.payload {
        ResultsPayload::Sweep { rows } => {
            let path = out_dir.join("sweep.curve.csv");
            let mut out = String::from(&stamp);
            out.push_str("abscissa,empirical,stderr,analytic\n");
            for row in rows {
                let (emp, se) = match &row.estimate {
                    Some(e) => (format!("{}", e.value), format!("{}", e.stderr)),
                    None => (String::new(), String::new()),
                };
                let analytic = row
                    .analytic
                    .map(|c| format!("{}", c.value))
                    .unwrap_or_default();
                out.push_str(&format!("{},{emp},{se},{analytic}\n", row.abscissa));
            }
            fs::write(&path, out)
                .map_err(|e| Error::Config(format!("cannot write sweep csv: {e}")))?;
            written.push(path);
        }
        ResultsPayload::Curves { rows, .. } => {
            let path = out_dir.join("curves.curve.csv");
            let mut out = String::from(&stamp);
            out.push_str("abscissa,empirical,stderr,analytic\n");
            for row in rows {
                out.push_str(&format!("{},,,{}\n", row.abscissa, row.analytic));
            }
            fs::write(&path, out)
                .map_err(|e| Error::Config(format!("cannot write curves csv: {e}")))?;
            written.push(path);
        }
        ResultsPayload::Simulate {
            residuals: Some(records),
            ..
        } => {
            let path = out_dir.join("residuals.csv");
            let mut out = String::from(&stamp);
            out.push_str("b,guess,score\n");
            for r in records {
                let score = r.score.map(|s| format!("{s}")).unwrap_or_default();
                out.push_str(&format!("{},{},{score}\n", r.b, r.guess));
            }
            fs::write(&path, out)
                .map_err(|e| Error::Config(format!("cannot write residuals csv: {e}")))?;
            written.push(path);
        }
        _ => {}
    }
    Ok(written)
}

/// Sanity check used by `report`: an experiment config inside a document
/// hash must still deserialize. Returns the parsed document.
pub fn read_results(path: &Path) -> Result<ResultsDocument> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("malformed results document: {e}")))
}
