//! Global minimization on an interval with piecewise-quadratic underestimators.
//!
//! Each sample `x_k` contributes the model
//!
//! ```text
//! q_k(x) = f_k + s_left  (x - x_k) - gamma/2 (x - x_k)^2    for x <  x_k
//! q_k(x) = f_k + s_right (x - x_k) - gamma/2 (x - x_k)^2    for x >= x_k
//! ```
//!
//! where `s_left` / `s_right` are the largest / smallest derivative among the
//! analytic branches meeting at `x_k`. When every branch has second derivative
//! bounded by `gamma` in modulus, `q_k <= f` on the whole line, so the minimum
//! of the upper envelope `max_k q_k` is a lower bound on `min f`.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::result::{HistoryRow, OptResult, Status};

/// Centers closer than this (relative) are treated as coincident.
const COINCIDENT_TOL: f64 = 1e-14;

/// Relative tolerance under which two envelope values count as a tie.
const TIE_TOL: f64 = 1e-12;

/// One piecewise-quadratic underestimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model1D {
    pub center: f64,
    pub value: f64,
    /// Largest branch derivative, used left of the center.
    pub slope_left: f64,
    /// Smallest branch derivative, used right of the center.
    pub slope_right: f64,
    pub gamma: f64,
}

impl Model1D {
    pub fn new(center: f64, sample: &Sample1D, gamma: f64) -> Self {
        Self {
            center,
            value: sample.value,
            slope_left: sample.slope_left,
            slope_right: sample.slope_right,
            gamma,
        }
    }

    fn slope_on(&self, x: f64) -> f64 {
        if x < self.center {
            self.slope_left
        } else {
            self.slope_right
        }
    }

    /// The model evaluated at `x`.
    pub fn value_at(&self, x: f64) -> f64 {
        let dx = x - self.center;
        self.value + self.slope_on(x) * dx - 0.5 * self.gamma * dx * dx
    }
}

/// `q_k(x)` for the model `m`.
pub fn model_value(m: &Model1D, x: f64) -> f64 {
    m.value_at(x)
}

/// Reduces branch derivatives at a point to `(slope_left, slope_right) =
/// (max, min)`.
pub fn derivative_bundle(branch_derivatives: &[f64]) -> Result<(f64, f64)> {
    if branch_derivatives.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one branch derivative is required".into(),
        ));
    }
    let hi = branch_derivatives.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = branch_derivatives.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((hi, lo))
}

/// Value and one-sided slope data of a piecewise-analytic function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample1D {
    pub value: f64,
    pub slope_left: f64,
    pub slope_right: f64,
}

impl Sample1D {
    /// Sample of a function differentiable at the point.
    pub fn smooth(value: f64, derivative: f64) -> Self {
        Self {
            value,
            slope_left: derivative,
            slope_right: derivative,
        }
    }

    /// Sample at a point where several branches meet.
    pub fn from_branches(value: f64, branch_derivatives: &[f64]) -> Result<Self> {
        let (slope_left, slope_right) = derivative_bundle(branch_derivatives)?;
        Ok(Self {
            value,
            slope_left,
            slope_right,
        })
    }

    /// The sample of `-f`.
    pub fn negated(&self) -> Self {
        Self {
            value: -self.value,
            slope_left: -self.slope_right,
            slope_right: -self.slope_left,
        }
    }
}

/// Upper envelope of a set of models over `models`' shared curvature.
pub fn envelope_value(models: &[Model1D], x: f64) -> f64 {
    models.iter().map(|m| m.value_at(x)).fold(f64::NEG_INFINITY, f64::max)
}

/// Minimum of the envelope restricted to `[p, q]`, where no model center lies
/// strictly inside. Ties go to the smaller `x`.
///
/// In the shifted variable `y = x - p` every model contributes one line plus
/// the shared `-gamma/2 y^2`, so the envelope is `hull(y) - gamma/2 y^2` with
/// `hull` the upper envelope of lines. That is concave on each hull piece,
/// hence minimized at a piece end.
fn interval_min(models: &[Model1D], p: f64, q: f64) -> (f64, f64) {
    let gamma = models[0].gamma;
    let w = q - p;
    let mut lines: Vec<(f64, f64)> = models
        .iter()
        .map(|m| {
            let slope = if m.center <= p { m.slope_right } else { m.slope_left };
            let d = p - m.center;
            (slope - gamma * d, m.value + slope * d - 0.5 * gamma * d * d)
        })
        .collect();
    lines.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let meet = |l1: (f64, f64), l2: (f64, f64)| (l1.1 - l2.1) / (l2.0 - l1.0);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(lines.len());
    for l in lines {
        if hull.last().is_some_and(|h| h.0 == l.0) {
            hull.pop();
        }
        while hull.len() >= 2 && meet(hull[hull.len() - 2], hull[hull.len() - 1]) >= meet(hull[hull.len() - 1], l) {
            hull.pop();
        }
        hull.push(l);
    }
    let phi = |l: (f64, f64), y: f64| l.1 + l.0 * y - 0.5 * gamma * y * y;
    // line active at y = 0
    let mut i = 0;
    while i + 1 < hull.len() && meet(hull[i], hull[i + 1]) <= 0.0 {
        i += 1;
    }
    let mut best = (0.0, phi(hull[i], 0.0));
    let mut consider = |y: f64, v: f64| {
        if v < best.1 - TIE_TOL * (1.0 + best.1.abs()) {
            best = (y, v);
        }
    };
    while i + 1 < hull.len() {
        let y = meet(hull[i], hull[i + 1]);
        if y >= w {
            break;
        }
        consider(y, phi(hull[i + 1], y));
        i += 1;
    }
    consider(w, phi(hull[i], w));
    let x = if best.0 == w { q } else { p + best.0 };
    (x, best.1)
}

/// Global minimizer of the envelope on `[a, b]`; ties go to the smaller `x`.
pub fn envelope_min(models: &[Model1D], a: f64, b: f64) -> (f64, f64) {
    assert!(!models.is_empty(), "envelope_min needs at least one model");
    let mut breaks = vec![a, b];
    breaks.extend(models.iter().map(|m| m.center).filter(|&c| c > a && c < b));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut best: Option<(f64, f64)> = None;
    for w in breaks.windows(2) {
        let (x, v) = interval_min(models, w[0], w[1]);
        match best {
            Some((_, bv)) if v >= bv - TIE_TOL * (1.0 + bv.abs()) => {}
            _ => best = Some((x, v)),
        }
    }
    best.expect("at least one interval")
}

/// Cached minimum of the envelope on `[p, q]`, computed when the model set
/// had `stamp` models.
#[derive(Debug, Clone, Copy)]
struct IntervalMin {
    value: f64,
    x: f64,
    p: f64,
    q: f64,
    stamp: usize,
}

impl PartialEq for IntervalMin {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for IntervalMin {}
impl PartialOrd for IntervalMin {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for IntervalMin {
    // reversed: BinaryHeap pops the smallest value, then smallest x
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.value.total_cmp(&self.value).then(other.x.total_cmp(&self.x))
    }
}

/// Optimizer state on `[a, b]`: models sorted by center plus running bounds.
///
/// Per-interval envelope minima are cached in a heap. Adding a model only
/// raises the envelope, so stale entries are still lower bounds and are
/// refreshed lazily when they reach the top.
#[derive(Debug, Clone)]
pub struct EnvelopeState1D {
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
    pub models: Vec<Model1D>,
    pub lower: f64,
    pub upper: f64,
    pub xbest: f64,
    pub history: Vec<HistoryRow>,
    breaks: Vec<f64>,
    heap: std::collections::BinaryHeap<IntervalMin>,
}

impl EnvelopeState1D {
    pub fn new(a: f64, b: f64, gamma: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!("need a < b (got [{a}, {b}])")));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!("gamma must be positive (got {gamma})")));
        }
        Ok(Self {
            a,
            b,
            gamma,
            models: Vec::new(),
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
            xbest: f64::NAN,
            history: Vec::new(),
            breaks: vec![a, b],
            heap: std::collections::BinaryHeap::new(),
        })
    }

    fn push_interval(&mut self, p: f64, q: f64) {
        let (x, value) = interval_min(&self.models, p, q);
        self.heap.push(IntervalMin {
            value,
            x,
            p,
            q,
            stamp: self.models.len(),
        });
    }

    /// Adds the model of a new sample, keeping the centers sorted.
    pub fn insert(&mut self, x: f64, sample: &Sample1D) {
        let m = Model1D::new(x, sample, self.gamma);
        let pos = self.models.partition_point(|q| q.center < x);
        self.models.insert(pos, m);
        if sample.value < self.upper {
            self.upper = sample.value;
            self.xbest = x;
        }
        if self.models.len() == 1 {
            self.push_interval(self.a, self.b);
        }
        if x > self.a && x < self.b {
            let k = self.breaks.partition_point(|&c| c < x);
            if self.breaks[k] != x {
                let (p, q) = (self.breaks[k - 1], self.breaks[k]);
                self.breaks.insert(k, x);
                self.push_interval(p, x);
                self.push_interval(x, q);
            }
        }
    }

    pub fn has_center_near(&self, x: f64) -> bool {
        let pos = self.models.partition_point(|q| q.center < x);
        let tol = COINCIDENT_TOL * (1.0 + x.abs());
        [pos.checked_sub(1), Some(pos)]
            .into_iter()
            .flatten()
            .filter_map(|i| self.models.get(i))
            .any(|q| (q.center - x).abs() <= tol)
    }

    /// `(argmin, min)` of the current envelope on `[a, b]`.
    pub fn envelope_min(&mut self) -> (f64, f64) {
        assert!(!self.models.is_empty(), "envelope_min needs at least one model");
        loop {
            let top = *self.heap.peek().expect("every interval has an entry");
            let k = self.breaks.partition_point(|&c| c < top.p);
            let live = self.breaks.get(k) == Some(&top.p) && self.breaks.get(k + 1) == Some(&top.q);
            if live && top.stamp == self.models.len() {
                return (top.x, top.value);
            }
            self.heap.pop();
            if live {
                self.push_interval(top.p, top.q);
            }
        }
    }
}

fn checked_sample(x: f64, s: Sample1D) -> Result<Sample1D> {
    for v in [s.value, s.slope_left, s.slope_right] {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                point: vec![x],
                value: v,
            });
        }
    }
    Ok(s)
}

/// Minimizes `f` over `[a, b]`.
///
/// Starts from models at both endpoints and repeatedly samples the minimizer
/// of the envelope until `upper - lower <= eps`, `max_iter` new samples have
/// been taken, or the next iterate coincides with an earlier one.
pub fn optimize_1d<F>(mut f: F, a: f64, b: f64, gamma: f64, eps: f64, max_iter: usize) -> Result<OptResult>
where
    F: FnMut(f64) -> Result<Sample1D>,
{
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive (got {eps})")));
    }
    let start = Instant::now();
    let mut state = EnvelopeState1D::new(a, b, gamma)?;
    for x in [a, b] {
        let s = checked_sample(x, f(x)?)?;
        state.insert(x, &s);
    }
    let mut evals = 2;
    let mut last = (state.xbest, state.upper);
    let mut gamma_violated = false;
    let mut iter = 0;
    let status = loop {
        let (xstar, lnew) = state.envelope_min();
        if lnew > state.upper + 1e-10 * (1.0 + state.upper.abs()) {
            // some model exceeds f at xbest
            gamma_violated = true;
        }
        state.lower = state.lower.max(lnew).min(state.upper);
        state.history.push(HistoryRow {
            iter,
            x: vec![last.0],
            f: last.1,
            lower: state.lower,
            upper: state.upper,
            evals,
            regions: 0,
            vertices: 0,
            elapsed: start.elapsed().as_secs_f64(),
        });
        if state.upper - state.lower <= eps {
            break Status::Converged;
        }
        if iter >= max_iter {
            break Status::Budget;
        }
        if state.has_center_near(xstar) {
            break Status::Stalled;
        }
        let s = checked_sample(xstar, f(xstar)?)?;
        evals += 1;
        if s.value < lnew - 1e-10 * (1.0 + lnew.abs()) {
            gamma_violated = true;
        }
        state.insert(xstar, &s);
        last = (xstar, s.value);
        iter += 1;
    };
    if gamma_violated {
        log::warn!("curvature bound gamma = {gamma} is violated by the objective");
    }
    Ok(OptResult {
        xbest: vec![state.xbest],
        fbest: state.upper,
        lower: state.lower,
        upper: state.upper,
        status,
        evaluations: evals,
        vertex_computations: 0,
        gamma_violated,
        history: state.history,
    })
}

/// Maximizes `f` over `[a, b]` by minimizing `-f`. In the result `fbest =
/// lower` is the best value found and `upper` the certified upper bound.
pub fn maximize_1d<F>(mut f: F, a: f64, b: f64, gamma: f64, eps: f64, max_iter: usize) -> Result<OptResult>
where
    F: FnMut(f64) -> Result<Sample1D>,
{
    optimize_1d(|x| Ok(f(x)?.negated()), a, b, gamma, eps, max_iter).map(OptResult::negated)
}
