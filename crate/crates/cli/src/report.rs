//! Result file (`key = value` per line) and history CSV.
//!
//! Floats are written with `{:.16e}`, 17 significant digits, so reading a
//! report back reproduces every number bit for bit.

use std::fmt::Write as _;
use std::str::FromStr;

use eigopt::HistoryRow;

use crate::error::CliError;

/// Terminal state of a run. `Error` is only written when a solver fails
/// after the input was accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    Budget,
    Stalled,
    Error,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::Budget => "budget",
            RunStatus::Stalled => "stalled",
            RunStatus::Error => "error",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunStatus::Converged => 0,
            RunStatus::Budget | RunStatus::Stalled => 3,
            RunStatus::Error => 1,
        }
    }
}

impl From<eigopt::Status> for RunStatus {
    fn from(s: eigopt::Status) -> Self {
        match s {
            eigopt::Status::Converged => RunStatus::Converged,
            eigopt::Status::Budget => RunStatus::Budget,
            eigopt::Status::Stalled => RunStatus::Stalled,
        }
    }
}

impl FromStr for RunStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "converged" => Ok(RunStatus::Converged),
            "budget" => Ok(RunStatus::Budget),
            "stalled" => Ok(RunStatus::Stalled),
            "error" => Ok(RunStatus::Error),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub problem: String,
    pub status: RunStatus,
    pub value: f64,
    pub argmin: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub eps: f64,
    pub gamma: f64,
    pub gamma_violated: bool,
    /// Inner coupling parameter `t*` (defectiveness only).
    pub inner: Option<f64>,
    pub evaluations: usize,
    pub vertex_computations: usize,
    pub wall_time: f64,
    /// Not part of the result file; see [`format_history`].
    pub history: Vec<HistoryRow>,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl RunReport {
    /// Placeholder for a run that stopped with an error: every number is NaN.
    pub fn failed(problem: &str, eps: f64) -> Self {
        Self {
            problem: problem.to_string(),
            status: RunStatus::Error,
            value: f64::NAN,
            argmin: Vec::new(),
            lower: f64::NAN,
            upper: f64::NAN,
            eps,
            gamma: f64::NAN,
            gamma_violated: false,
            inner: None,
            evaluations: 0,
            vertex_computations: 0,
            wall_time: 0.0,
            history: Vec::new(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("problem", self.problem.clone());
        kv("status", self.status.as_str().into());
        kv("value", num(self.value));
        kv(
            "argmin",
            self.argmin.iter().map(|&x| num(x)).collect::<Vec<_>>().join(","),
        );
        kv("lower", num(self.lower));
        kv("upper", num(self.upper));
        kv("gap", num(self.upper - self.lower));
        kv("eps", num(self.eps));
        kv("gamma", num(self.gamma));
        kv("gamma_violated", self.gamma_violated.to_string());
        if let Some(t) = self.inner {
            kv("inner_t", num(t));
        }
        kv("evaluations", self.evaluations.to_string());
        kv("vertex_computations", self.vertex_computations.to_string());
        kv("wall_time_seconds", num(self.wall_time));
        kv("history_rows", self.history.len().to_string());
        s
    }

    /// Inverse of [`RunReport::to_text`]; `gap` and `history_rows` are
    /// derived fields and are skipped. The history is left empty.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let err = |line: usize, msg: String| CliError::Parse {
            path: "<report>".into(),
            line,
            msg,
        };
        let mut r = RunReport::failed("", f64::NAN);
        let mut seen = Vec::new();
        for (i, l) in text.lines().enumerate() {
            let line = i + 1;
            let l = l.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let (k, v) = l
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(line, format!("expected `key = value`, got `{l}`")))?;
            let float = |v: &str| v.parse::<f64>().map_err(|e| err(line, format!("{k}: {e}")));
            let count = |v: &str| v.parse::<usize>().map_err(|e| err(line, format!("{k}: {e}")));
            match k {
                "problem" => r.problem = v.to_string(),
                "status" => r.status = v.parse().map_err(|e| err(line, e))?,
                "value" => r.value = float(v)?,
                "argmin" => {
                    r.argmin = if v.is_empty() {
                        Vec::new()
                    } else {
                        v.split(',').map(float).collect::<Result<_, _>>()?
                    }
                }
                "lower" => r.lower = float(v)?,
                "upper" => r.upper = float(v)?,
                "eps" => r.eps = float(v)?,
                "gamma" => r.gamma = float(v)?,
                "gamma_violated" => r.gamma_violated = v.parse().map_err(|e| err(line, format!("{k}: {e}")))?,
                "inner_t" => r.inner = Some(float(v)?),
                "evaluations" => r.evaluations = count(v)?,
                "vertex_computations" => r.vertex_computations = count(v)?,
                "wall_time_seconds" => r.wall_time = float(v)?,
                "gap" | "history_rows" => {}
                other => return Err(err(line, format!("unknown key `{other}`"))),
            }
            seen.push(k.to_string());
        }
        for k in ["problem", "status", "value", "lower", "upper"] {
            if !seen.iter().any(|s| s == k) {
                return Err(err(0, format!("missing key `{k}`")));
            }
        }
        Ok(r)
    }
}

/// History table with columns `iter, x1[, x2], f, l, u, cumulative_evals,
/// elapsed_seconds`. With `timing` off the last column is all zeros, which
/// makes the file reproducible byte for byte.
pub fn format_history(rows: &[HistoryRow], dim: usize, timing: bool) -> String {
    let mut s = String::from("iter");
    for k in 1..=dim {
        let _ = write!(s, ",x{k}");
    }
    s.push_str(",f,l,u,cumulative_evals,elapsed_seconds\n");
    for r in rows {
        let _ = write!(s, "{}", r.iter);
        for k in 0..dim {
            let _ = write!(s, ",{}", num(r.x.get(k).copied().unwrap_or(f64::NAN)));
        }
        let t = if timing { r.elapsed } else { 0.0 };
        let _ = writeln!(
            s,
            ",{},{},{},{},{}",
            num(r.f),
            num(r.lower),
            num(r.upper),
            r.evals,
            num(t)
        );
    }
    s
}

/// Reads back a table written by [`format_history`]. Region and vertex
/// counts are not stored and come back as zero.
pub fn parse_history(text: &str) -> Result<Vec<HistoryRow>, CliError> {
    let err = |line: usize, msg: String| CliError::Parse {
        path: "<history>".into(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty history".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 7 || cols[0] != "iter" || cols[cols.len() - 1] != "elapsed_seconds" {
        return Err(err(1, format!("unexpected header `{header}`")));
    }
    let dim = cols.len() - 6;
    let mut rows = Vec::new();
    for (i, l) in lines {
        let line = i + 1;
        let t: Vec<&str> = l.split(',').collect();
        if t.len() != cols.len() {
            return Err(err(line, format!("expected {} fields, got {}", cols.len(), t.len())));
        }
        let float = |v: &str| v.parse::<f64>().map_err(|e| err(line, format!("`{v}`: {e}")));
        let count = |v: &str| v.parse::<usize>().map_err(|e| err(line, format!("`{v}`: {e}")));
        rows.push(HistoryRow {
            iter: count(t[0])?,
            x: t[1..=dim].iter().map(|v| float(v)).collect::<Result<_, _>>()?,
            f: float(t[dim + 1])?,
            lower: float(t[dim + 2])?,
            upper: float(t[dim + 3])?,
            evals: count(t[dim + 4])?,
            regions: 0,
            vertices: 0,
            elapsed: float(t[dim + 5])?,
        });
    }
    Ok(rows)
}
