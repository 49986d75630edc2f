//! Residual accumulation, point-parallel evaluation and check reports.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::Form3;
use crate::linalg::Mat;

/// Minimum fraction of requested points that must evaluate.
pub const MIN_COVERAGE: f64 = 0.9;

/// Running comparison of a left-hand side against a right-hand side.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Discrepancy {
    diff: f64,
    scale: f64,
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::INFINITY
    } else {
        a.max(b)
    }
}

impl Discrepancy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn compare(&mut self, lhs: f64, rhs: f64) {
        self.diff = nan_max(self.diff, (lhs - rhs).abs());
        self.scale = nan_max(self.scale, lhs.abs().max(rhs.abs()));
    }

    pub fn compare_slices(&mut self, lhs: &[f64], rhs: &[f64]) {
        for (l, r) in lhs.iter().zip(rhs) {
            self.compare(*l, *r);
        }
    }

    pub fn compare_mats(&mut self, lhs: &Mat<f64>, rhs: &Mat<f64>) {
        for (l, r) in lhs.iter().zip(rhs.iter()) {
            self.compare(*l, *r);
        }
    }

    pub fn compare_forms(&mut self, lhs: &Form3, rhs: &Form3) {
        self.compare_slices(lhs.as_slice(), rhs.as_slice());
    }

    pub fn zero(&mut self, values: &[f64]) {
        for v in values {
            self.compare(*v, 0.0);
        }
    }

    pub fn merge(&mut self, other: &Discrepancy) {
        self.diff = nan_max(self.diff, other.diff);
        self.scale = nan_max(self.scale, other.scale);
    }

    /// `max|L - R| / (1 + max(max|L|, max|R|))`.
    pub fn normalized(&self) -> f64 {
        self.diff / (1.0 + self.scale)
    }

    /// `max|L - R|`.
    pub fn raw(&self) -> f64 {
        self.diff
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionResult {
    pub condition: String,
    pub max_residual: f64,
    pub worst_point: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub conditions: Vec<ConditionResult>,
    pub points_requested: usize,
    pub points_evaluated: usize,
    pub seed: u64,
    pub tol: f64,
    pub verdict: Verdict,
    /// First per-point error message, when any point was skipped.
    pub first_error: Option<String>,
}

impl CheckReport {
    pub fn coverage_ok(&self) -> bool {
        self.points_requested == 0
            || self.points_evaluated as f64 >= MIN_COVERAGE * self.points_requested as f64
    }

    fn refresh_verdict(&mut self) {
        let all = self.conditions.iter().all(|c| c.max_residual <= self.tol);
        self.verdict = Verdict::from_bool(all && self.coverage_ok());
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.condition == name)
    }

    pub fn residual(&self, name: &str) -> f64 {
        self.condition(name)
            .map(|c| c.max_residual)
            .unwrap_or_else(|| panic!("report has no condition named {name}"))
    }

    pub fn max_residual(&self) -> f64 {
        self.conditions
            .iter()
            .fold(0.0, |a, c| nan_max(a, c.max_residual))
    }

    /// Concatenates the conditions of several reports under one suite name.
    pub fn combine(suite: &str, reports: Vec<CheckReport>) -> CheckReport {
        let first = reports.first();
        let seed = first.map_or(0, |r| r.seed);
        let tol = first.map_or(0.0, |r| r.tol);
        let points_requested = reports
            .iter()
            .map(|r| r.points_requested)
            .max()
            .unwrap_or(0);
        let points_evaluated = reports
            .iter()
            .map(|r| r.points_evaluated)
            .min()
            .unwrap_or(0);
        let first_error = reports.iter().find_map(|r| r.first_error.clone());
        let mut out = CheckReport {
            suite: suite.to_string(),
            conditions: reports.into_iter().flat_map(|r| r.conditions).collect(),
            points_requested,
            points_evaluated,
            seed,
            tol,
            verdict: Verdict::Pass,
            first_error,
        };
        out.refresh_verdict();
        out
    }

    pub fn with_suite(mut self, suite: &str) -> Self {
        self.suite = suite.to_string();
        self
    }
}

/// Shared inputs of every pointwise check.
#[derive(Clone, Copy, Debug)]
pub struct CheckInput<'a> {
    pub points: &'a [Vec<f64>],
    pub seed: u64,
    pub tol: f64,
}

impl<'a> CheckInput<'a> {
    pub fn new(points: &'a [Vec<f64>], seed: u64, tol: f64) -> Self {
        CheckInput { points, seed, tol }
    }
}

/// Evaluates `f` at every point in parallel and max-reduces each condition
/// in point order. Pointwise numeric errors skip the point; any other error
/// aborts the check.
pub fn run_pointwise<F>(
    suite: &str,
    names: &[&str],
    input: &CheckInput<'_>,
    f: F,
) -> Result<CheckReport>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let results: Vec<Result<Vec<f64>>> = input.points.par_iter().map(|p| f(p)).collect();
    let mut conditions: Vec<ConditionResult> = names
        .iter()
        .map(|n| ConditionResult {
            condition: n.to_string(),
            max_residual: 0.0,
            worst_point: None,
        })
        .collect();
    let mut evaluated = 0;
    let mut first_error = None;
    for (p, r) in input.points.iter().zip(results) {
        match r {
            Ok(res) => {
                assert_eq!(res.len(), names.len(), "residual count mismatch in {suite}");
                evaluated += 1;
                for (c, v) in conditions.iter_mut().zip(res) {
                    let v = if v.is_nan() { f64::INFINITY } else { v };
                    if c.worst_point.is_none() || v > c.max_residual {
                        c.max_residual = v;
                        c.worst_point = Some(p.clone());
                    }
                }
            }
            Err(e) if e.is_pointwise() => {
                if first_error.is_none() {
                    first_error = Some(e.to_string());
                }
            }
            Err(e) => return Err(e),
        }
    }
    let mut report = CheckReport {
        suite: suite.to_string(),
        conditions,
        points_requested: input.points.len(),
        points_evaluated: evaluated,
        seed: input.seed,
        tol: input.tol,
        verdict: Verdict::Pass,
        first_error,
    };
    report.refresh_verdict();
    Ok(report)
}
