//! Text and JSON-lines rendering of check reports.

use std::fmt::Write as _;

use serde::Serialize;

use crate::check::{CheckReport, Verdict};

#[derive(Serialize)]
struct Line<'a> {
    suite: &'a str,
    condition: &'a str,
    max_residual: f64,
    worst_point: Option<&'a [f64]>,
    points: usize,
    seed: u64,
    tol: f64,
    verdict: Verdict,
}

/// Pass/fail of a single condition under the report's tolerance and
/// coverage rule.
pub fn condition_verdict(report: &CheckReport, residual: f64) -> Verdict {
    Verdict::from_bool(residual <= report.tol && report.coverage_ok())
}

/// One JSON object per condition, newline-terminated. Non-finite residuals
/// serialize as `null`.
pub fn render_jsonl(report: &CheckReport) -> String {
    let mut out = String::new();
    for c in &report.conditions {
        let line = Line {
            suite: &report.suite,
            condition: &c.condition,
            max_residual: c.max_residual,
            worst_point: c.worst_point.as_deref(),
            points: report.points_evaluated,
            seed: report.seed,
            tol: report.tol,
            verdict: condition_verdict(report, c.max_residual),
        };
        out.push_str(&serde_json::to_string(&line).expect("report lines serialize"));
        out.push('\n');
    }
    out
}

fn point_text(p: &Option<Vec<f64>>) -> String {
    match p {
        None => "-".into(),
        Some(p) => {
            let parts: Vec<String> = p.iter().map(|x| format!("{x:.4}")).collect();
            format!("({})", parts.join(", "))
        }
    }
}

pub fn render_text(report: &CheckReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "suite {}: {} of {} points, seed {:#x}, tol {:e}",
        report.suite, report.points_evaluated, report.points_requested, report.seed, report.tol
    );
    let width = report
        .conditions
        .iter()
        .map(|c| c.condition.len())
        .max()
        .unwrap_or(0);
    for c in &report.conditions {
        let _ = writeln!(
            out,
            "  {:<width$}  {:>10.3e}  {}  worst {}",
            c.condition,
            c.max_residual,
            condition_verdict(report, c.max_residual),
            point_text(&c.worst_point),
        );
    }
    if let Some(e) = &report.first_error {
        let _ = writeln!(out, "  skipped points, first error: {e}");
    }
    if !report.coverage_ok() {
        let _ = writeln!(out, "  coverage below 90% of requested points");
    }
    let _ = writeln!(out, "verdict {}: {}", report.suite, report.verdict);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::ConditionResult;

    fn sample() -> CheckReport {
        CheckReport {
            suite: "gk".into(),
            conditions: vec![
                ConditionResult {
                    condition: "a".into(),
                    max_residual: 1e-12,
                    worst_point: Some(vec![0.5, 1.0]),
                },
                ConditionResult {
                    condition: "b".into(),
                    max_residual: f64::INFINITY,
                    worst_point: None,
                },
            ],
            points_requested: 4,
            points_evaluated: 4,
            seed: 7,
            tol: 1e-8,
            verdict: Verdict::Fail,
            first_error: None,
        }
    }

    #[test]
    fn jsonl_lines() {
        let text = render_jsonl(&sample());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            r#"{"suite":"gk","condition":"a","max_residual":1e-12,"worst_point":[0.5,1.0],"points":4,"seed":7,"tol":1e-8,"verdict":"pass"}"#
        );
        assert!(lines[1].contains(r#""max_residual":null"#));
        assert!(lines[1].contains(r#""verdict":"fail""#));
    }

    #[test]
    fn text_mentions_every_condition() {
        let text = render_text(&sample());
        assert!(text.contains("  a "));
        assert!(text.contains("verdict gk: fail"));
    }
}
