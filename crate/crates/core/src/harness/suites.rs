//! Suite dispatch over a [`Structure`].

use std::fmt;
use std::str::FromStr;

use crate::check::{CheckInput, CheckReport, ConditionResult};
use crate::error::{Error, Result};
use crate::gcs::{
    check_algebraic, check_conformal_integrability, check_integrability, check_lee_closed,
    check_nijenhuis_phi,
};
use crate::ghermitian::{
    check_compatibility, check_conf_gk, check_gk, check_metric_axioms, ConfGkCriterion, GkCriterion,
};
use crate::hypersurface::{
    check_closed_fundamental, check_contact_algebra, check_crf, check_lee1, AmbientHermitian,
    InducedOptions,
};

use super::sampling::sample_points;
use super::structure_file::Structure;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_POINTS: usize = 64;
pub const DEFAULT_SEED: u64 = 0x5EED_C0DE;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Algebraic,
    Integrability,
    ConfIntegrability,
    Gk,
    ConfGk,
    Hypersurface,
    All,
}

impl Suite {
    pub const SINGLE: [Suite; 6] = [
        Suite::Algebraic,
        Suite::Integrability,
        Suite::ConfIntegrability,
        Suite::Gk,
        Suite::ConfGk,
        Suite::Hypersurface,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebraic => "algebraic",
            Suite::Integrability => "integrability",
            Suite::ConfIntegrability => "conf-integrability",
            Suite::Gk => "gk",
            Suite::ConfGk => "conf-gk",
            Suite::Hypersurface => "hypersurface",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conformal-integrability" => Ok(Suite::ConfIntegrability),
            _ => Suite::SINGLE
                .into_iter()
                .chain([Suite::All])
                .find(|x| x.name() == s)
                .ok_or_else(|| Error::Usage(format!("unknown suite `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteOptions {
    pub points: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            points: DEFAULT_POINTS,
            seed: DEFAULT_SEED,
            tol: DEFAULT_TOL,
        }
    }
}

fn need<T>(x: Option<T>, suite: Suite, what: &str) -> Result<T> {
    x.ok_or_else(|| Error::Usage(format!("suite `{suite}` needs {what}")))
}

/// Keeps the first occurrence of each condition name.
fn merge(suite: Suite, reports: Vec<CheckReport>) -> CheckReport {
    let mut out = CheckReport::combine(suite.name(), reports);
    let mut seen = std::collections::HashSet::new();
    let conditions: Vec<ConditionResult> = out
        .conditions
        .drain(..)
        .filter(|c| seen.insert(c.condition.clone()))
        .collect();
    out.conditions = conditions;
    out
}

fn suffixed(mut r: CheckReport, suffix: &str) -> CheckReport {
    for c in &mut r.conditions {
        c.condition = format!("{}.{suffix}", c.condition);
    }
    r
}

/// Reports of the three generalized Kähler criteria, in order
/// galt1, crf2, bismut3.
pub fn gk_criteria(s: &Structure, opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let h = need(
        s.hermitian(),
        Suite::Gk,
        "a generalized metric and a structure",
    )?;
    let pts = sample_points(&s.chart, opts.points, opts.seed)?;
    let input = CheckInput::new(&pts, opts.seed, opts.tol);
    GkCriterion::ALL
        .into_iter()
        .map(|c| Ok(check_gk(&h, c, &input)?.with_suite(Suite::Gk.name())))
        .collect()
}

/// Reports of the three conformal criteria, in order form14, weyl16,
/// wbismut17.
pub fn conf_gk_criteria(s: &Structure, opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let h = need(
        s.hermitian(),
        Suite::ConfGk,
        "a generalized metric and a structure",
    )?;
    let lee = need(s.lee.as_ref(), Suite::ConfGk, "a Lee form")?;
    let pts = sample_points(&s.chart, opts.points, opts.seed)?;
    let input = CheckInput::new(&pts, opts.seed, opts.tol);
    ConfGkCriterion::ALL
        .into_iter()
        .map(|c| Ok(check_conf_gk(&h, lee, c, &input)?.with_suite(Suite::ConfGk.name())))
        .collect()
}

/// Runs one suite. `Suite::All` runs every applicable suite and merges the
/// results; see [`run_suites`] for per-suite reports.
pub fn run_suite(s: &Structure, suite: Suite, opts: &SuiteOptions) -> Result<CheckReport> {
    if suite == Suite::All {
        let reports = run_suites(s, suite, opts)?;
        let mut conditions = Vec::new();
        for r in &reports {
            for c in &r.conditions {
                let mut c = c.clone();
                c.condition = format!("{}/{}", r.suite, c.condition);
                conditions.push(c);
            }
        }
        let mut all = CheckReport::combine(Suite::All.name(), reports);
        all.conditions = conditions;
        return Ok(all);
    }
    let report = match suite {
        Suite::Algebraic => {
            let g = need(s.gcs(), suite, "a structure (A, pi, sigma)")?;
            let pts = sample_points(&s.chart, opts.points, opts.seed)?;
            let input = CheckInput::new(&pts, opts.seed, opts.tol);
            let mut parts = vec![check_algebraic(&g, &input)?];
            if let Some(metric) = &s.metric {
                parts.push(check_metric_axioms(metric, &input)?);
            }
            if let Some(h) = s.hermitian() {
                parts.push(check_compatibility(&h, &input)?);
            }
            merge(suite, parts)
        }
        Suite::Integrability => {
            let g = need(s.gcs(), suite, "a structure (A, pi, sigma)")?;
            let pts = sample_points(&s.chart, opts.points, opts.seed)?;
            let input = CheckInput::new(&pts, opts.seed, opts.tol);
            merge(
                suite,
                vec![
                    check_integrability(&g, &input)?,
                    check_nijenhuis_phi(&g, &input)?,
                ],
            )
        }
        Suite::ConfIntegrability => {
            let g = need(s.gcs(), suite, "a structure (A, pi, sigma)")?;
            let lee = need(s.lee.as_ref(), suite, "a Lee form")?;
            let pts = sample_points(&s.chart, opts.points, opts.seed)?;
            let input = CheckInput::new(&pts, opts.seed, opts.tol);
            merge(
                suite,
                vec![
                    check_conformal_integrability(&g, lee, &input)?,
                    check_lee_closed(lee, &input)?,
                ],
            )
        }
        Suite::Gk => merge(suite, gk_criteria(s, opts)?),
        Suite::ConfGk => merge(suite, conf_gk_criteria(s, opts)?),
        Suite::Hypersurface => {
            let hyp = need(s.hypersurface.as_ref(), suite, "a hypersurface")?;
            let h = need(s.hermitian(), suite, "a generalized metric and a structure")?;
            let pts = sample_points(&hyp.chart, opts.points, opts.seed)?;
            let input = CheckInput::new(&pts, opts.seed, opts.tol);
            let mut parts = Vec::new();
            for (sign, label) in [(1.0, "plus"), (-1.0, "minus")] {
                let amb = AmbientHermitian::from_hermitian(&h, sign);
                parts.push(suffixed(check_contact_algebra(hyp, &amb, &input)?, label));
                parts.push(suffixed(
                    check_crf(hyp, &amb, &InducedOptions::default(), &input)?,
                    label,
                ));
                if s.lee.is_none() {
                    parts.push(suffixed(
                        check_closed_fundamental(hyp, &amb, &input)?,
                        label,
                    ));
                }
            }
            if let Some(lee) = &s.lee {
                parts.push(check_lee1(hyp, &h, lee, &input)?);
            }
            merge(suite, parts)
        }
        Suite::All => unreachable!("handled above"),
    };
    Ok(report)
}

/// Per-suite reports: one for a single suite, one per applicable suite for
/// `Suite::All`.
pub fn run_suites(s: &Structure, suite: Suite, opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    if suite != Suite::All {
        return Ok(vec![run_suite(s, suite, opts)?]);
    }
    let mut out = Vec::new();
    for x in Suite::SINGLE {
        match run_suite(s, x, opts) {
            Ok(r) => out.push(r),
            Err(Error::Usage(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if out.is_empty() {
        return Err(Error::Usage("no suite applies to this structure".into()));
    }
    Ok(out)
}
