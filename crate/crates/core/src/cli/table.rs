//! Sweep grids and their CSV form.
//!
//! A file starts with `#`-prefixed `key: value` metadata lines, one
//! `# axis: name:min:max:count:lin|log` line per axis, then a CSV header of
//! axis names, value columns and `status`. Numbers are written with 17
//! significant digits so parsing the file returns the identical table.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CliError;

/// Upper limit on the number of grid points in one sweep.
pub const MAX_POINTS: usize = 1_000_000;
pub const MAX_AXES: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub log: bool,
}

impl AxisSpec {
    pub fn linear(name: &str, min: f64, max: f64, count: usize) -> Self {
        Self {
            name: name.into(),
            min,
            max,
            count,
            log: false,
        }
    }

    pub fn logarithmic(name: &str, min: f64, max: f64, count: usize) -> Self {
        Self {
            log: true,
            ..Self::linear(name, min, max, count)
        }
    }

    /// Parses `name:min:max[:count][:log|lin]`; `default_count` fills a
    /// missing count.
    pub fn parse(text: &str, default_count: usize) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Config(format!("axis `{text}`: {why}"));
        let parts: Vec<&str> = text.split(':').collect();
        if !(3..=5).contains(&parts.len()) {
            return Err(bad("expected name:min:max[:count][:log]"));
        }
        let num = |s: &str| f64::from_str(s.trim()).map_err(|_| bad(&format!("`{s}` is not a number")));
        let mut axis = Self::linear(parts[0].trim(), num(parts[1])?, num(parts[2])?, default_count);
        for extra in &parts[3..] {
            match extra.trim() {
                "log" => axis.log = true,
                "lin" => axis.log = false,
                n => axis.count = n.parse().map_err(|_| bad(&format!("`{n}` is not a count or scale")))?,
            }
        }
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |why: String| Err(CliError::Config(format!("axis `{}`: {why}", self.name)));
        if self.name.is_empty() {
            return bad("empty name".into());
        }
        if self.count == 0 {
            return bad("count must be at least 1".into());
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min > self.max {
            return bad(format!("need finite min <= max, got [{}, {}]", self.min, self.max));
        }
        if self.count == 1 && self.min != self.max {
            return bad("a single point needs min == max".into());
        }
        if self.log && !(self.min > 0.0) {
            return bad("log spacing needs min > 0".into());
        }
        Ok(())
    }

    /// Grid values; the end points are exact.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|j| {
                if j == 0 {
                    return self.min;
                }
                if j == self.count - 1 {
                    return self.max;
                }
                let t = j as f64 / n;
                if self.log {
                    (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + t * (self.max - self.min)
                }
            })
            .collect()
    }

    fn encode(&self) -> String {
        format!(
            "{}:{:?}:{:?}:{}:{}",
            self.name,
            self.min,
            self.max,
            self.count,
            if self.log { "log" } else { "lin" }
        )
    }
}

/// Checks axis count, names and total size.
pub fn validate_axes(axes: &[AxisSpec]) -> Result<usize, CliError> {
    if axes.is_empty() || axes.len() > MAX_AXES {
        return Err(CliError::Config(format!(
            "a sweep takes 1 to {MAX_AXES} axes, got {}",
            axes.len()
        )));
    }
    for a in axes {
        a.validate()?;
    }
    if axes.len() == 2 && axes[0].name == axes[1].name {
        return Err(CliError::Config(format!("axis `{}` given twice", axes[0].name)));
    }
    let total = axes
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.count))
        .filter(|&n| n <= MAX_POINTS)
        .ok_or_else(|| CliError::Config(format!("sweep exceeds {MAX_POINTS} points")))?;
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Axis values followed by the column values.
    pub values: Vec<f64>,
    /// `ok`, or a diagnostic for rows with failed or non-finite entries.
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub metadata: Vec<(String, String)>,
    pub axes: Vec<AxisSpec>,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

pub const STATUS_OK: &str = "ok";

impl SweepTable {
    /// Grid points in emission order: the first axis varies slowest.
    pub fn grid(axes: &[AxisSpec]) -> Vec<Vec<f64>> {
        let mut points = vec![Vec::new()];
        for a in axes {
            let vals = a.values();
            points = points
                .into_iter()
                .flat_map(|p| {
                    vals.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        points
    }

    pub fn check(&self) -> Result<(), CliError> {
        let expected: usize = self.axes.iter().map(|a| a.count).product();
        if self.rows.len() != expected {
            return Err(CliError::Config(format!(
                "table has {} rows, axes imply {expected}",
                self.rows.len()
            )));
        }
        let width = self.axes.len() + self.columns.len();
        for (i, r) in self.rows.iter().enumerate() {
            if r.values.len() != width {
                return Err(CliError::Config(format!("row {i} has {} cells, expected {width}", r.values.len())));
            }
            if r.status == STATUS_OK && r.values.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Config(format!("row {i} has non-finite cells but status ok")));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        for a in &self.axes {
            let _ = writeln!(out, "# axis: {}", a.encode());
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = self
            .axes
            .iter()
            .map(|a| a.name.as_str())
            .chain(self.columns.iter().map(String::as_str))
            .chain(["status"])
            .collect();
        w.write_record(&header).expect("in-memory csv");
        for r in &self.rows {
            let mut rec: Vec<String> = r.values.iter().map(|v| format!("{v:.16e}")).collect();
            rec.push(r.status.clone());
            w.write_record(&rec).expect("in-memory csv");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv"));
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let bad = |why: String| CliError::Config(format!("malformed sweep csv: {why}"));
        let mut metadata = Vec::new();
        let mut axes = Vec::new();
        let mut body = String::new();
        for line in text.lines() {
            if let Some(meta) = line.strip_prefix("# ") {
                let (k, v) = meta.split_once(": ").ok_or_else(|| bad(format!("metadata line `{line}`")))?;
                if k == "axis" {
                    let parts: Vec<&str> = v.split(':').collect();
                    if parts.len() != 5 {
                        return Err(bad(format!("axis line `{line}`")));
                    }
                    axes.push(AxisSpec::parse(v, 0)?);
                } else {
                    metadata.push((k.to_string(), v.to_string()));
                }
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let header = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
        let n = header.len();
        if n < axes.len() + 1 || header.get(n - 1) != Some("status") {
            return Err(bad("header must end with `status`".into()));
        }
        for (i, a) in axes.iter().enumerate() {
            if header.get(i) != Some(a.name.as_str()) {
                return Err(bad(format!("header column {i} is not axis `{}`", a.name)));
            }
        }
        let columns = header.iter().skip(axes.len()).take(n - 1 - axes.len()).map(String::from).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let values = rec
                .iter()
                .take(n - 1)
                .map(|c| f64::from_str(c).map_err(|_| bad(format!("cell `{c}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(SweepRow {
                values,
                status: rec.get(n - 1).unwrap_or_default().to_string(),
            });
        }
        let table = SweepTable {
            metadata,
            axes,
            columns,
            rows,
        };
        table.check()?;
        Ok(table)
    }
}
