//! Human-readable rendering of a results document, pairing empirical values
//! against analytic references with pass/fail flags.

use std::fmt::Write;

use crate::runner::{ResultsDocument, ResultsPayload};

/// Render the report text. Pure function of the document, so re-rendering
/// is idempotent.
pub fn emit_report(doc: &ResultsDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "leakbench report — command: {} (seed {}, config {})",
        doc.command,
        doc.seed,
        &doc.config_sha256[..12.min(doc.config_sha256.len())]
    );
    for w in &doc.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    match &doc.payload {
        ResultsPayload::Simulate {
            membership,
            attribute,
            split,
            load,
            residuals,
        } => {
            if membership.is_none() && attribute.is_none() && split.is_none() {
                let _ = writeln!(out, "no experiments");
                return out;
            }
            if let Some(e) = membership {
                let _ = writeln!(
                    out,
                    "membership advantage: {:+.4} +/- {:.4}  ci95 [{:+.4}, {:+.4}]  trials {}",
                    e.value, e.stderr, e.ci95.0, e.ci95.1, e.trials
                );
                let _ = writeln!(
                    out,
                    "  rates: guess-member given member {:.4}, given population {:.4}",
                    e.components.0, e.components.1
                );
            }
            if let Some(r) = attribute {
                let e = &r.def5;
                let _ = writeln!(
                    out,
                    "attribute advantage (training-vs-population): {:+.4} +/- {:.4}  ci95 [{:+.4}, {:+.4}]",
                    e.value, e.stderr, e.ci95.0, e.ci95.1
                );
                match &r.def6 {
                    Some(Ok(alt)) => {
                        let _ = writeln!(
                            out,
                            "attribute advantage (simulator-relative): {:+.4} +/- {:.4}",
                            alt.value, alt.stderr
                        );
                    }
                    Some(Err(reason)) => {
                        let _ =
                            writeln!(out, "attribute advantage (simulator-relative): not computable ({reason})");
                    }
                    None => {}
                }
            }
            if let Some(s) = split {
                let _ = writeln!(
                    out,
                    "split advantage over {} repeats ({} train / {} test): {:+.4} +/- {:.4}",
                    s.repeats, s.train_size, s.test_size, s.advantage, s.stderr
                );
                if let Some(ratio) = s.mean_ratio {
                    let _ = writeln!(out, "  mean measured sigma_D/sigma_S: {ratio:.4}");
                }
            }
            if let Some(l) = load {
                let _ = writeln!(
                    out,
                    "dataset: {} rows kept, {} dropped for missing values",
                    l.rows_read - l.rows_dropped_missing,
                    l.rows_dropped_missing
                );
            }
            if let Some(r) = residuals {
                let _ = writeln!(out, "residual scores recorded for {} trials", r.len());
            }
        }
        ResultsPayload::Sweep { rows } => {
            if rows.is_empty() {
                let _ = writeln!(out, "no experiments");
                return out;
            }
            let _ = writeln!(
                out,
                "{:>12} {:>12} {:>10} {:>12} {:>10} {:>8}",
                "abscissa", "empirical", "stderr", "analytic", "delta", "flag"
            );
            for row in rows {
                if let Some(err) = &row.error {
                    let _ = writeln!(out, "{:>12.4} cell failed: {err}", row.abscissa);
                    continue;
                }
                match (&row.estimate, &row.analytic) {
                    (Some(e), Some(c)) => {
                        let delta = e.value - c.value;
                        let within = c.value >= e.ci95.0 && c.value <= e.ci95.1;
                        let _ = writeln!(
                            out,
                            "{:>12.4} {:>12.4} {:>10.4} {:>12.4} {:>+10.4} {:>8}",
                            row.abscissa,
                            e.value,
                            e.stderr,
                            c.value,
                            delta,
                            if within { "ok" } else { "OUTSIDE" }
                        );
                    }
                    (Some(e), None) => {
                        let _ = writeln!(
                            out,
                            "{:>12.4} {:>12.4} {:>10.4} {:>12} {:>10} {:>8}",
                            row.abscissa, e.value, e.stderr, "-", "-", "-"
                        );
                    }
                    _ => {
                        let _ = writeln!(out, "{:>12.4} (no estimate)", row.abscissa);
                    }
                }
            }
        }
        ResultsPayload::Audit { rows } => {
            if rows.is_empty() {
                let _ = writeln!(out, "no experiments");
                return out;
            }
            let _ = writeln!(
                out,
                "{:>10} {:>12} {:>10} {:>12} {:>10}",
                "epsilon", "advantage", "stderr", "bound", "flag"
            );
            for row in rows {
                let _ = writeln!(
                    out,
                    "{:>10.4} {:>12.4} {:>10.4} {:>12.4} {:>10}",
                    row.epsilon,
                    row.estimate.value,
                    row.estimate.stderr,
                    row.bound,
                    if row.violation { "VIOLATION" } else { "ok" }
                );
            }
        }
        ResultsPayload::Collude(r) => {
            let within = (r.advantage.value - r.expected).abs() <= 0.01;
            let _ = writeln!(
                out,
                "colluding advantage: {:.4} +/- {:.4} (expected {:.4}, mu {:.4}) {}",
                r.advantage.value,
                r.advantage.stderr,
                r.expected,
                r.mu.mu,
                if within { "ok" } else { "OUTSIDE +/-0.01" }
            );
            let _ = writeln!(
                out,
                "utility: base {:.4}, wrapped {:.4}, drop {:.4} (collision bound {:.2e}) {}",
                r.utility_base,
                r.utility_wrapped,
                r.utility_drop,
                r.collision_bound,
                if r.utility_drop <= 0.01 { "ok" } else { "DEGRADED" }
            );
        }
        ResultsPayload::Curves { curve, rows } => {
            if rows.is_empty() {
                let _ = writeln!(out, "no experiments");
                return out;
            }
            let _ = writeln!(out, "curve: {curve}");
            for row in rows {
                let _ = writeln!(out, "{:>12.4} {:>12.6}", row.abscissa, row.analytic);
            }
        }
    }
    out
}
