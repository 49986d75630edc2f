//! Line-based structure files.
//!
//! ```text
//! # comment
//! chart dim = 4
//! chart box x1 = -2 2          # one line per coordinate
//! chart exclude = norm2 - 0.25 # points where this is <= 0 are excluded
//! A 1 2 = x1^2                 # entry A^1_2; unset entries are 0
//! pi 1 2 = 1                   # strict upper triangle
//! sigma 1 2 = 1/norm2          # strict upper triangle
//! gamma 1 1 = 1/norm2          # diagonal and upper triangle
//! psi 1 2 = 1/norm2            # strict upper triangle
//! lee 1 = -2*x1/norm2
//! hyp 1 = cos(x1)              # parametrization, in x1..x_{m-1}
//! hyp box x1 = 0.3 2.8         # one line per parameter
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::bigtangent::PhiMatrix;
use crate::error::{Error, Result};
use crate::expr::{parse, Expression};
use crate::gcs::LeeForm;
use crate::geometry::{Antisymmetric, Chart, ComponentVector, Endomorphism, SymmetricTwoTensor};
use crate::ghermitian::{GHermitian, GMetric};
use crate::hypersurface::Hypersurface;

/// Everything a fixture or a structure file can carry.
#[derive(Clone, Debug, PartialEq)]
pub struct Structure {
    pub chart: Chart,
    pub phi: Option<PhiMatrix>,
    pub metric: Option<GMetric>,
    pub lee: Option<LeeForm>,
    pub hypersurface: Option<Hypersurface>,
}

impl Structure {
    pub fn new(chart: Chart) -> Self {
        Structure {
            chart,
            phi: None,
            metric: None,
            lee: None,
            hypersurface: None,
        }
    }

    pub fn from_hermitian(h: GHermitian) -> Self {
        Structure {
            chart: h.chart,
            phi: Some(h.phi),
            metric: Some(h.metric),
            lee: None,
            hypersurface: None,
        }
    }

    pub fn with_lee(mut self, lee: LeeForm) -> Self {
        self.lee = Some(lee);
        self
    }

    pub fn with_hypersurface(mut self, hyp: Hypersurface) -> Self {
        self.hypersurface = Some(hyp);
        self
    }

    pub fn dim(&self) -> usize {
        self.chart.dim
    }

    pub fn gcs(&self) -> Option<crate::gcs::GcsData> {
        self.phi.as_ref().map(|phi| crate::gcs::GcsData {
            chart: self.chart.clone(),
            phi: phi.clone(),
        })
    }

    pub fn hermitian(&self) -> Option<GHermitian> {
        match (&self.phi, &self.metric) {
            (Some(phi), Some(metric)) => Some(GHermitian {
                chart: self.chart.clone(),
                phi: phi.clone(),
                metric: metric.clone(),
            }),
            _ => None,
        }
    }
}

pub fn load_structure_file(path: impl AsRef<Path>) -> Result<Structure> {
    parse_structure(&std::fs::read_to_string(path)?)
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

#[derive(Default)]
struct Collected {
    dim: Option<usize>,
    boxes: BTreeMap<usize, (f64, f64, usize)>,
    exclude: Option<(String, usize)>,
    hyp_boxes: BTreeMap<usize, (f64, f64, usize)>,
    /// key -> (expression text, line); keys like `A 1 2`, `lee 3`
    entries: BTreeMap<(String, Vec<usize>), (String, usize)>,
}

fn parse_index(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .ok()
        .filter(|&i| i >= 1)
        .ok_or_else(|| format_err(line, format!("expected a positive index, found `{tok}`")))
}

fn parse_coord_name(tok: &str, line: usize) -> Result<usize> {
    tok.strip_prefix('x')
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&i| i >= 1)
        .ok_or_else(|| {
            format_err(
                line,
                format!("expected a coordinate name like x1, found `{tok}`"),
            )
        })
}

fn parse_range(text: &str, line: usize) -> Result<(f64, f64)> {
    let nums: Vec<&str> = text.split_whitespace().collect();
    let parsed: Vec<f64> = nums.iter().filter_map(|s| s.parse::<f64>().ok()).collect();
    if nums.len() != 2 || parsed.len() != 2 {
        return Err(format_err(
            line,
            format!("expected two numbers `lo hi`, found `{text}`"),
        ));
    }
    if !(parsed[0] < parsed[1]) {
        return Err(format_err(
            line,
            format!("empty range [{}, {}]", parsed[0], parsed[1]),
        ));
    }
    Ok((parsed[0], parsed[1]))
}

fn collect(text: &str) -> Result<Collected> {
    let mut c = Collected::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (lhs, rhs) = content
            .split_once('=')
            .ok_or_else(|| format_err(line, "expected `key = value`"))?;
        let rhs = rhs.trim();
        let keys: Vec<&str> = lhs.split_whitespace().collect();
        match keys.as_slice() {
            ["chart", "dim"] => {
                if c.dim.is_some() {
                    return Err(format_err(line, "duplicate `chart dim`"));
                }
                let d = rhs
                    .parse::<usize>()
                    .ok()
                    .filter(|&d| d >= 1)
                    .ok_or_else(|| format_err(line, format!("invalid dimension `{rhs}`")))?;
                c.dim = Some(d);
            }
            ["chart", "box", coord] | ["hyp", "box", coord] => {
                let i = parse_coord_name(coord, line)?;
                let (lo, hi) = parse_range(rhs, line)?;
                let target = if keys[0] == "chart" {
                    &mut c.boxes
                } else {
                    &mut c.hyp_boxes
                };
                if target.insert(i, (lo, hi, line)).is_some() {
                    return Err(format_err(line, format!("duplicate box for {coord}")));
                }
            }
            ["chart", "exclude"] => {
                if c.exclude.is_some() {
                    return Err(format_err(line, "duplicate `chart exclude`"));
                }
                c.exclude = Some((rhs.to_string(), line));
            }
            [name @ ("A" | "pi" | "sigma" | "gamma" | "psi"), i, j] => {
                let key = (
                    name.to_string(),
                    vec![parse_index(i, line)?, parse_index(j, line)?],
                );
                if c.entries.insert(key, (rhs.to_string(), line)).is_some() {
                    return Err(format_err(line, format!("duplicate entry `{lhs}`")));
                }
            }
            [name @ ("lee" | "hyp"), i] => {
                let key = (name.to_string(), vec![parse_index(i, line)?]);
                if c.entries.insert(key, (rhs.to_string(), line)).is_some() {
                    return Err(format_err(line, format!("duplicate entry `{lhs}`")));
                }
            }
            _ => {
                return Err(format_err(
                    line,
                    format!("unrecognized key `{}`", lhs.trim()),
                ))
            }
        }
    }
    Ok(c)
}

fn expr_at(text: &str, dim: usize, line: usize) -> Result<Expression> {
    parse(text, dim).map_err(|source| Error::Parse { line, source })
}

fn dim_err(line: usize, message: String) -> Error {
    Error::DimensionMismatch(format!("line {line}: {message}"))
}

fn chart_from_boxes(
    boxes: &BTreeMap<usize, (f64, f64, usize)>,
    dim: usize,
    what: &str,
) -> Result<Chart> {
    if let Some((&i, &(_, _, line))) = boxes.iter().find(|(&i, _)| i > dim) {
        return Err(dim_err(
            line,
            format!("{what} box for x{i} exceeds dimension {dim}"),
        ));
    }
    let mut bounds = Vec::with_capacity(dim);
    for i in 1..=dim {
        let &(lo, hi, _) = boxes
            .get(&i)
            .ok_or_else(|| Error::DimensionMismatch(format!("missing {what} box for x{i}")))?;
        bounds.push((lo, hi));
    }
    Chart::new(bounds)
}

/// Parses the text of a structure file.
pub fn parse_structure(text: &str) -> Result<Structure> {
    let c = collect(text)?;
    let dim = c
        .dim
        .ok_or_else(|| format_err(0, "missing `chart dim = N` line"))?;
    let mut chart = chart_from_boxes(&c.boxes, dim, "chart")?;
    if let Some((e, line)) = &c.exclude {
        chart = chart.with_exclusion(expr_at(e, dim, *line)?);
    }

    let mut a = Endomorphism::zero(dim);
    let mut pi = Antisymmetric::zero(dim);
    let mut sigma = Antisymmetric::zero(dim);
    let mut gamma = SymmetricTwoTensor::zero(dim);
    let mut psi = Antisymmetric::zero(dim);
    let mut lee = ComponentVector::zero(dim);
    let mut hyp: BTreeMap<usize, (Expression, usize)> = BTreeMap::new();
    let (mut has_phi, mut has_gamma, mut has_psi, mut has_lee) = (false, false, false, false);

    for ((name, idx), (text, line)) in &c.entries {
        let line = *line;
        if name == "hyp" {
            let i = idx[0];
            if i > dim {
                return Err(dim_err(
                    line,
                    format!("hyp component {i} exceeds dimension {dim}"),
                ));
            }
            let e = expr_at(text, dim.saturating_sub(1).max(1), line)?;
            hyp.insert(i, (e, line));
            continue;
        }
        if let Some(&i) = idx.iter().find(|&&i| i > dim) {
            return Err(dim_err(line, format!("index {i} exceeds dimension {dim}")));
        }
        let e = expr_at(text, dim, line)?;
        let (i, j) = (idx[0] - 1, idx.get(1).map(|j| j - 1).unwrap_or(0));
        let strict = |line| -> Result<()> {
            if i < j {
                Ok(())
            } else {
                Err(format_err(
                    line,
                    format!("`{name}` takes strict upper-triangle entries (i < j)"),
                ))
            }
        };
        match name.as_str() {
            "A" => {
                a.set(i, j, e);
                has_phi = true;
            }
            "pi" => {
                strict(line)?;
                pi.set(i, j, e);
                has_phi = true;
            }
            "sigma" => {
                strict(line)?;
                sigma.set(i, j, e);
                has_phi = true;
            }
            "psi" => {
                strict(line)?;
                psi.set(i, j, e);
                has_psi = true;
            }
            "gamma" => {
                if i > j {
                    return Err(format_err(
                        line,
                        "`gamma` takes diagonal and upper-triangle entries (i <= j)",
                    ));
                }
                gamma.set(i, j, e);
                has_gamma = true;
            }
            "lee" => {
                lee.components[i] = e;
                has_lee = true;
            }
            _ => unreachable!("keys are filtered in collect"),
        }
    }

    let mut s = Structure::new(chart);
    if has_phi {
        s.phi = Some(PhiMatrix { a, pi, sigma });
    }
    if has_psi && !has_gamma {
        return Err(format_err(0, "`psi` entries need a `gamma` metric"));
    }
    if has_gamma {
        s.metric = Some(GMetric { gamma, psi });
    }
    if has_lee {
        s.lee = Some(LeeForm::new(lee));
    }
    if !hyp.is_empty() {
        if dim < 2 {
            return Err(Error::DimensionMismatch(
                "hypersurfaces need dimension at least 2".into(),
            ));
        }
        let param: Vec<Expression> = (1..=dim)
            .map(|i| {
                hyp.get(&i)
                    .map(|(e, _)| e.clone())
                    .ok_or_else(|| Error::DimensionMismatch(format!("missing `hyp {i}` component")))
            })
            .collect::<Result<_>>()?;
        let pchart = chart_from_boxes(&c.hyp_boxes, dim - 1, "hyp")?;
        s.hypersurface = Some(Hypersurface::new(param, pchart)?);
    } else if let Some((_, &(_, _, line))) = c.hyp_boxes.iter().next() {
        return Err(format_err(line, "`hyp box` given without `hyp` components"));
    }
    Ok(s)
}

/// Writes a structure in the file format; zero entries are omitted.
pub fn export_structure(s: &Structure) -> String {
    let mut out = String::new();
    let m = s.dim();
    let _ = writeln!(out, "chart dim = {m}");
    for (i, (lo, hi)) in s.chart.bounds.iter().enumerate() {
        let _ = writeln!(out, "chart box x{} = {lo} {hi}", i + 1);
    }
    if let Some(e) = &s.chart.exclusion {
        let _ = writeln!(out, "chart exclude = {e}");
    }
    let entry = |out: &mut String, name: &str, i: usize, j: usize, e: &Expression| {
        if !e.is_zero() {
            let _ = writeln!(out, "{name} {} {} = {e}", i + 1, j + 1);
        }
    };
    if let Some(phi) = &s.phi {
        for i in 0..m {
            for j in 0..m {
                entry(&mut out, "A", i, j, &phi.a.matrix()[(i, j)]);
            }
        }
        for (name, t) in [("pi", &phi.pi), ("sigma", &phi.sigma)] {
            for i in 0..m {
                for j in i + 1..m {
                    entry(&mut out, name, i, j, &t.matrix()[(i, j)]);
                }
            }
        }
        let all_zero = phi
            .a
            .matrix()
            .iter()
            .chain(phi.pi.matrix().iter())
            .chain(phi.sigma.matrix().iter())
            .all(Expression::is_zero);
        if all_zero {
            let _ = writeln!(out, "A 1 1 = 0");
        }
    }
    if let Some(metric) = &s.metric {
        for i in 0..m {
            for j in i..m {
                entry(&mut out, "gamma", i, j, &metric.gamma.matrix()[(i, j)]);
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                entry(&mut out, "psi", i, j, &metric.psi.matrix()[(i, j)]);
            }
        }
    }
    if let Some(lee) = &s.lee {
        let mut any = false;
        for (i, e) in lee.form.components.iter().enumerate() {
            if !e.is_zero() {
                let _ = writeln!(out, "lee {} = {e}", i + 1);
                any = true;
            }
        }
        if !any {
            let _ = writeln!(out, "lee 1 = 0");
        }
    }
    if let Some(h) = &s.hypersurface {
        for (i, e) in h.param.iter().enumerate() {
            let _ = writeln!(out, "hyp {} = {e}", i + 1);
        }
        for (i, (lo, hi)) in h.chart.bounds.iter().enumerate() {
            let _ = writeln!(out, "hyp box x{} = {lo} {hi}", i + 1);
        }
    }
    out
}
