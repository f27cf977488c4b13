//! End-to-end tests of the command-line interface and its artifacts.

use std::fs;
use std::process::Command as Process;

use leakbench_cli::config::{
    AuditSection, ColludeSection, Command, CurveKind, CurvesSection, ReportSection, RunConfig,
    SweepSection,
};
use leakbench_cli::csv_load::{ColumnEncoding, ColumnRole, ColumnSpec, CsvSchema};
use leakbench_cli::report::emit_report;
use leakbench_cli::runner::{execute, read_results, write_artifacts, ResultsPayload};
use leakbench_core::analytic::{curve_membership_threshold, ThresholdMode};
use leakbench_core::harness::{
    AdversarySpec, ChallengeLaw, ExperimentConfig, MembershipAdversarySpec, SigmaSource,
    SweepDelta,
};
use leakbench_core::models::{
    CollusionKeysConfig, CollusionMode, FeatureCodec, Model, Trainer,
};
use leakbench_core::{
    DataPoint, LossSpec, MasterSeed, SyntheticDistribution, Value,
};

fn channel_experiment(trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        distribution: SyntheticDistribution::IdealizedRegressionChannel {
            sigma_s: 1.0,
            sigma_d: 2.0,
            attribute: None,
        },
        n: 32,
        trainer: Trainer::Channel,
        adversary: AdversarySpec::Membership(MembershipAdversarySpec::Threshold {
            mode: ThresholdMode::Known,
            sigma_source: SigmaSource::Channel,
        }),
        trials,
        seed: MasterSeed(123),
        fresh_s_per_trial: true,
        challenge_law: ChallengeLaw::Standard,
        def6_metric: false,
    }
}

fn empty_run_config() -> RunConfig {
    RunConfig {
        command: None,
        out_dir: None,
        emit_residuals: false,
        experiment: None,
        dataset: None,
        sweep: None,
        audit: None,
        curves: None,
        collude: None,
        report: None,
    }
}

fn collusion_experiment() -> ExperimentConfig {
    // deterministic-label finite task on an 8-bit grid
    let size = 1024usize;
    let support: Vec<DataPoint> = (0..size)
        .map(|code| {
            let a = (code % 256) as f64;
            let b = (code / 256) as f64;
            DataPoint::regression(vec![a, b], None, ((code * 7) % 256) as f64)
        })
        .collect();
    let distribution = SyntheticDistribution::FiniteClassification {
        probs: vec![1.0 / size as f64; size],
        support,
    };
    ExperimentConfig {
        distribution,
        n: 32,
        trainer: Trainer::Colluding {
            base: Box::new(Trainer::Tree {
                max_depth: None,
                min_leaf: 1,
            }),
            keys: CollusionKeysConfig {
                key_seed: 7,
                k: 2,
                codec: FeatureCodec {
                    bits_per_feature: 8,
                    lo: 0.0,
                    hi: 255.0,
                },
                feature_dim: 2,
                m_bits: 8,
            },
            mode: CollusionMode::Wrapped,
        },
        adversary: AdversarySpec::Membership(MembershipAdversarySpec::Colluding),
        trials: 2000,
        seed: MasterSeed(9),
        fresh_s_per_trial: true,
        challenge_law: ChallengeLaw::Standard,
        def6_metric: false,
    }
}

#[test]
fn simulate_with_fixed_seed_is_byte_identical() {
    let mut cfg = empty_run_config();
    cfg.experiment = Some(channel_experiment(2000));
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let doc_a = execute(Command::Simulate, &cfg).unwrap();
    write_artifacts(&doc_a, dir_a.path()).unwrap();
    let doc_b = execute(Command::Simulate, &cfg).unwrap();
    write_artifacts(&doc_b, dir_b.path()).unwrap();
    let bytes_a = fs::read(dir_a.path().join("results.json")).unwrap();
    let bytes_b = fs::read(dir_b.path().join("results.json")).unwrap();
    assert_eq!(bytes_a, bytes_b);
}

#[test]
fn curves_csv_passes_through_analytic_values_exactly() {
    let mut cfg = empty_run_config();
    cfg.curves = Some(CurvesSection {
        curve: CurveKind::MembershipThresholdKnown,
        abscissas: vec![1.0, 1.5, 2.0, 4.0],
        sigma_s: None,
        sigma_d: None,
    });
    let doc = execute(Command::Curves, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_artifacts(&doc, dir.path()).unwrap();
    let csv_text = fs::read_to_string(dir.path().join("curves.curve.csv")).unwrap();
    let mut lines = csv_text.lines();
    let stamp = lines.next().unwrap();
    assert!(stamp.starts_with("# seed=") && stamp.contains("config_sha256="));
    assert_eq!(lines.next().unwrap(), "abscissa,empirical,stderr,analytic");
    for (line, ratio) in lines.zip([1.0, 1.5, 2.0, 4.0]) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 4);
        assert_eq!(cols[1], "");
        assert_eq!(cols[2], "");
        let expected = curve_membership_threshold(ratio, ThresholdMode::Known).unwrap();
        let emitted: f64 = cols[3].parse().unwrap();
        assert_eq!(emitted, expected, "exact pass-through at ratio {ratio}");
    }
}

#[test]
fn sweep_artifacts_have_the_documented_columns() {
    let mut cfg = empty_run_config();
    cfg.experiment = Some(channel_experiment(1000));
    cfg.sweep = Some(SweepSection {
        grid: vec![
            SweepDelta::ChannelRatio(1.5),
            SweepDelta::ChannelRatio(2.0),
        ],
    });
    let doc = execute(Command::Sweep, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_artifacts(&doc, dir.path()).unwrap();
    let csv_text = fs::read_to_string(dir.path().join("sweep.curve.csv")).unwrap();
    let data_lines: Vec<&str> = csv_text.lines().skip(2).collect();
    assert_eq!(data_lines.len(), 2);
    for line in data_lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 4);
        for col in &cols {
            assert!(!col.is_empty());
        }
    }
    // rendered report flags rows as within-CI
    let text = emit_report(&doc);
    assert!(text.contains("ok"), "report: {text}");
}

#[test]
fn collude_report_carries_advantage_expected_and_utility_rows() {
    let mut cfg = empty_run_config();
    cfg.experiment = Some(collusion_experiment());
    cfg.collude = Some(ColludeSection {
        held_out: 500,
        mu_trials: 4000,
    });
    let doc = execute(Command::Collude, &cfg).unwrap();
    let ResultsPayload::Collude(report) = &doc.payload else {
        panic!("expected collude payload");
    };
    assert!(report.advantage.value > 0.9, "advantage {}", report.advantage.value);
    assert!(
        (report.advantage.value - report.expected).abs() < 0.05,
        "advantage {} vs expected {}",
        report.advantage.value,
        report.expected
    );
    assert!(report.utility_drop <= 0.05);
    let text = emit_report(&doc);
    assert!(text.contains("colluding advantage"));
    assert!(text.contains("utility"));
}

#[test]
fn report_rendering_is_idempotent_and_derived_from_the_document() {
    let mut cfg = empty_run_config();
    cfg.experiment = Some(channel_experiment(1000));
    let doc = execute(Command::Simulate, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_artifacts(&doc, dir.path()).unwrap();
    let reread = read_results(&dir.path().join("results.json")).unwrap();
    assert_eq!(emit_report(&doc), emit_report(&reread));
    assert_eq!(emit_report(&reread), emit_report(&reread));
}

#[test]
fn audit_negative_control_is_flagged_in_the_report() {
    // memorizing tree deliberately labeled epsilon = 0.01
    let size = 64usize;
    let support: Vec<DataPoint> = (0..size)
        .map(|i| DataPoint::regression(vec![i as f64], None, ((i * 13) % 7) as f64))
        .collect();
    let mut cfg = empty_run_config();
    cfg.experiment = Some(ExperimentConfig {
        distribution: SyntheticDistribution::FiniteClassification {
            probs: vec![1.0 / size as f64; size],
            support,
        },
        n: 16,
        trainer: Trainer::Tree {
            max_depth: None,
            min_leaf: 1,
        },
        adversary: AdversarySpec::Membership(MembershipAdversarySpec::BoundedLoss {
            loss: LossSpec::zero_one(),
        }),
        trials: 2000,
        seed: MasterSeed(31),
        fresh_s_per_trial: true,
        challenge_law: ChallengeLaw::Standard,
        def6_metric: false,
    });
    cfg.audit = Some(AuditSection {
        epsilons: vec![0.01],
    });
    let doc = execute(Command::AuditDp, &cfg).unwrap();
    let text = emit_report(&doc);
    assert!(text.contains("VIOLATION"), "report: {text}");
}

#[test]
fn config_violations_are_listed_exhaustively() {
    let mut cfg = empty_run_config();
    // simulate without experiment AND a mismatched documented command
    cfg.command = Some(Command::Sweep);
    let problems = cfg.validate_for(Command::Simulate).unwrap_err();
    assert!(problems.len() >= 2, "problems: {problems:?}");

    // experiment with several violations at once
    let mut exp = channel_experiment(10); // trials too low
    exp.n = 0;
    exp.adversary = AdversarySpec::Membership(MembershipAdversarySpec::BoundedLoss {
        loss: LossSpec::squared_error(), // unbounded
    });
    let mut cfg = empty_run_config();
    cfg.experiment = Some(exp);
    let problems = cfg.validate_for(Command::Simulate).unwrap_err();
    assert!(problems.len() >= 3, "problems: {problems:?}");
}

#[test]
fn binary_runs_simulate_and_report_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = empty_run_config();
    cfg.experiment = Some(channel_experiment(1000));
    let config_path = dir.path().join("run.json");
    fs::write(&config_path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    let out_dir = dir.path().join("out");

    let output = Process::new(env!("CARGO_BIN_EXE_leakbench"))
        .args([
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--jobs",
            "2",
            "simulate",
        ])
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("membership advantage"));
    assert!(out_dir.join("results.json").exists());

    // seed override changes the embedded seed in the artifact
    let out_dir2 = dir.path().join("out2");
    let output = Process::new(env!("CARGO_BIN_EXE_leakbench"))
        .args([
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            out_dir2.to_str().unwrap(),
            "--seed",
            "777",
            "simulate",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let doc = read_results(&out_dir2.join("results.json")).unwrap();
    assert_eq!(doc.seed, 777);

    // report subcommand renders the artifact
    let mut report_cfg = empty_run_config();
    report_cfg.report = Some(ReportSection {
        results: out_dir.join("results.json"),
    });
    let report_path = dir.path().join("report.json");
    fs::write(&report_path, serde_json::to_string(&report_cfg).unwrap()).unwrap();
    let output = Process::new(env!("CARGO_BIN_EXE_leakbench"))
        .args(["--config", report_path.to_str().unwrap(), "report"])
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(String::from_utf8_lossy(&output.stdout).contains("membership advantage"));
}

#[test]
fn binary_rejects_bad_config_with_exit_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.json");
    fs::write(&config_path, "{\"experiment\": null}").unwrap();
    let output = Process::new(env!("CARGO_BIN_EXE_leakbench"))
        .args(["--config", config_path.to_str().unwrap(), "simulate"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("configuration rejected"), "stderr: {stderr}");
}

#[test]
fn binary_runs_csv_split_mode() {
    let dir = tempfile::tempdir().unwrap();
    // small regression CSV with a noisy response
    let mut csv_text = String::from("x1,x2,y\n");
    for i in 0..40 {
        let x1 = (i as f64 * 0.37).sin() * 2.0;
        let x2 = (i as f64 * 0.61).cos();
        let y = x1 - x2 + ((i * 17) % 7) as f64 * 0.3;
        csv_text.push_str(&format!("{x1},{x2},{y}\n"));
    }
    let data_path = dir.path().join("data.csv");
    fs::write(&data_path, csv_text).unwrap();

    let mut cfg = empty_run_config();
    cfg.dataset = Some(leakbench_cli::config::DatasetSection {
        path: data_path,
        schema: CsvSchema {
            columns: vec![
                ColumnSpec {
                    name: "x1".into(),
                    role: ColumnRole::Feature,
                    encoding: ColumnEncoding::Numeric,
                    standardize: true,
                },
                ColumnSpec {
                    name: "x2".into(),
                    role: ColumnRole::Feature,
                    encoding: ColumnEncoding::Numeric,
                    standardize: true,
                },
                ColumnSpec {
                    name: "y".into(),
                    role: ColumnRole::Response,
                    encoding: ColumnEncoding::Numeric,
                    standardize: true,
                },
            ],
        },
        train_fraction: 0.75,
        repeats: 20,
        trainer: Trainer::Ridge { lambda: 1e-6 },
        adversary: AdversarySpec::Membership(MembershipAdversarySpec::Threshold {
            mode: ThresholdMode::Known,
            sigma_source: SigmaSource::Measured,
        }),
        seed: MasterSeed(5),
    });
    let config_path = dir.path().join("split.json");
    fs::write(&config_path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    let out_dir = dir.path().join("out");
    let output = Process::new(env!("CARGO_BIN_EXE_leakbench"))
        .args([
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "simulate",
        ])
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let doc = read_results(&out_dir.join("results.json")).unwrap();
    let ResultsPayload::Simulate {
        split: Some(split), ..
    } = &doc.payload
    else {
        panic!("expected split payload");
    };
    assert_eq!(split.repeats, 20);
    assert_eq!(split.train_size, 30);
}

#[test]
fn residual_emission_writes_score_histogram_data() {
    let mut cfg = empty_run_config();
    cfg.experiment = Some(channel_experiment(1000));
    cfg.emit_residuals = true;
    let doc = execute(Command::Simulate, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_artifacts(&doc, dir.path()).unwrap();
    let text = fs::read_to_string(dir.path().join("residuals.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# seed="));
    assert_eq!(lines.next().unwrap(), "b,guess,score");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1000);
    // residual magnitudes populate the score column
    assert!(rows.iter().all(|r| r.split(',').count() == 3));
    // the estimate still matches the plain run
    let plain = execute(Command::Simulate, &{
        let mut c = cfg.clone();
        c.emit_residuals = false;
        c
    })
    .unwrap();
    let (ResultsPayload::Simulate { membership: Some(a), .. },
         ResultsPayload::Simulate { membership: Some(b), .. }) = (&doc.payload, &plain.payload)
    else {
        panic!("expected simulate payloads")
    };
    assert_eq!(a, b);
}

#[test]
fn report_of_empty_sweep_says_no_experiments() {
    let doc = leakbench_cli::runner::ResultsDocument {
        version: "test".into(),
        command: "sweep".into(),
        seed: 0,
        config_sha256: "0".into(),
        warnings: vec![],
        payload: ResultsPayload::Sweep { rows: vec![] },
    };
    assert!(emit_report(&doc).contains("no experiments"));
}

#[test]
fn hypothesis_class_models_round_trip_through_json() {
    // config documents can carry fixed hypothesis models
    let trainer = Trainer::DpFinite {
        dp_epsilon: 0.5,
        hypothesis_class: vec![
            Model::constant(Value::Real(0.0)),
            Model::linear(vec![1.0, -0.5], 0.25),
        ],
        loss: LossSpec::zero_one(),
    };
    let json = serde_json::to_string(&trainer).unwrap();
    let back: Trainer = serde_json::from_str(&json).unwrap();
    assert_eq!(trainer, back);
}