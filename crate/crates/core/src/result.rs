//! Optimizer output shared by every driver.

use std::fmt;

/// Why an optimizer stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// `upper - lower <= eps`.
    Converged,
    /// Iteration, model or depth budget exhausted before the gap closed.
    Budget,
    /// The next iterate coincided with an existing sample point.
    Stalled,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::Budget => "budget",
            Status::Stalled => "stalled",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "converged" => Ok(Status::Converged),
            "budget" => Ok(Status::Budget),
            "stalled" => Ok(Status::Stalled),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}

/// One row of convergence history, recorded after each function evaluation
/// that updated the bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryRow {
    pub iter: usize,
    /// Point evaluated at this iteration.
    pub x: Vec<f64>,
    pub f: f64,
    pub lower: f64,
    pub upper: f64,
    /// Cumulative function evaluations so far.
    pub evals: usize,
    /// Number of live (non-empty, non-pruned) dominance regions; zero in 1D.
    pub regions: usize,
    /// Cumulative 2x2 vertex solves; zero in 1D.
    pub vertices: usize,
    /// Wall-clock seconds since the driver started.
    pub elapsed: f64,
}

/// Result of a global minimization over a box.
///
/// `lower <= min f <= upper` holds whenever the curvature bound passed to the
/// optimizer is valid for the objective.
#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub xbest: Vec<f64>,
    /// Best function value found; equals `upper`.
    pub fbest: f64,
    pub lower: f64,
    pub upper: f64,
    pub status: Status,
    pub evaluations: usize,
    /// Cumulative 2x2 linear solves spent on vertex enumeration.
    pub vertex_computations: usize,
    /// Set when an evaluated value fell below the envelope, i.e. the supplied
    /// curvature bound is too small for this objective.
    pub gamma_violated: bool,
    pub history: Vec<HistoryRow>,
}

impl OptResult {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    /// Reinterprets a minimization of `-f` as a maximization of `f`: the best
    /// value becomes `-fbest` and the certified interval is mirrored.
    pub fn negated(mut self) -> Self {
        self.fbest = -self.fbest;
        let (lo, hi) = (self.lower, self.upper);
        self.lower = -hi;
        self.upper = -lo;
        for row in &mut self.history {
            row.f = -row.f;
            let (lo, hi) = (row.lower, row.upper);
            row.lower = -hi;
            row.upper = -lo;
        }
        self
    }
}
