//! Reference methods: Piyavskii-Shubert with a Lipschitz constant, exhaustive
//! grids, and central finite differences.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use rayon::prelude::*;

use crate::domain::SearchBox;
use crate::error::{Error, Result};
use crate::result::{HistoryRow, OptResult, Status};

/// Sawtooth lower bound `max_i f_i - L |x - x_i|` from samples.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzModel {
    pub points: Vec<f64>,
    pub values: Vec<f64>,
    pub lipschitz: f64,
}

impl LipschitzModel {
    pub fn value_at(&self, x: f64) -> f64 {
        self.points
            .iter()
            .zip(&self.values)
            .map(|(p, v)| v - self.lipschitz * (x - p).abs())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// An interval between adjacent samples, keyed by the sawtooth minimum on it.
#[derive(Debug, Clone, Copy)]
struct Gap {
    bound: f64,
    x: f64,
    left: (f64, f64),
    right: (f64, f64),
}

impl Gap {
    fn new(left: (f64, f64), right: (f64, f64), l: f64) -> Self {
        let x = 0.5 * (left.0 + right.0) + (left.1 - right.1) / (2.0 * l);
        let x = x.clamp(left.0, right.0);
        let bound = 0.5 * (left.1 + right.1) - 0.5 * l * (right.0 - left.0);
        Self { bound, x, left, right }
    }
}

impl PartialEq for Gap {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Gap {}
impl PartialOrd for Gap {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Gap {
    // Min-heap on the bound, smaller x first on ties.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then(other.x.total_cmp(&self.x))
    }
}

/// Piyavskii-Shubert minimization of an `L`-Lipschitz `f` on `[a, b]`,
/// starting from both endpoints.
pub fn piyavskii_shubert<F>(mut f: F, a: f64, b: f64, lipschitz: f64, eps: f64, max_iter: usize) -> Result<OptResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lipschitz > 0.0) || !(eps > 0.0) || !(a < b) {
        return Err(Error::InvalidArgument(format!(
            "need L > 0, eps > 0 and a < b (got L = {lipschitz}, eps = {eps}, [{a}, {b}])"
        )));
    }
    let mut eval = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if v.is_nan() {
            return Err(Error::NonFinite {
                point: vec![x],
                value: v,
            });
        }
        Ok(v)
    };
    let start = Instant::now();
    let fa = eval(a)?;
    let fb = eval(b)?;
    let mut evals = 2;
    let (mut upper, mut xbest) = if fb < fa { (fb, b) } else { (fa, a) };
    let mut heap = BinaryHeap::new();
    heap.push(Gap::new((a, fa), (b, fb), lipschitz));
    let mut history = Vec::new();
    let mut iter = 0;
    let status = loop {
        let top = *heap.peek().expect("at least one interval");
        let lower = top.bound.min(upper);
        history.push(HistoryRow {
            iter,
            x: vec![xbest],
            f: upper,
            lower,
            upper,
            evals,
            regions: heap.len(),
            vertices: 0,
            elapsed: start.elapsed().as_secs_f64(),
        });
        if upper - lower <= eps {
            break Status::Converged;
        }
        if iter >= max_iter {
            break Status::Budget;
        }
        heap.pop();
        let fx = eval(top.x)?;
        evals += 1;
        if fx < upper {
            upper = fx;
            xbest = top.x;
        }
        heap.push(Gap::new(top.left, (top.x, fx), lipschitz));
        heap.push(Gap::new((top.x, fx), top.right, lipschitz));
        iter += 1;
    };
    let lower = history.last().map_or(f64::NEG_INFINITY, |r| r.lower);
    Ok(OptResult {
        xbest: vec![xbest],
        fbest: upper,
        lower,
        upper,
        status,
        evaluations: evals,
        vertex_computations: 0,
        gamma_violated: false,
        history,
    })
}

/// Result of an exhaustive grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub argmin: Vec<f64>,
    pub min: f64,
    /// Grid spacing per axis.
    pub spacing: Vec<f64>,
    pub evaluations: usize,
}

impl GridResult {
    /// Worst-case gap between the grid minimum and the true minimum for an
    /// `L`-Lipschitz function: `L` times the half-diagonal of a grid cell.
    pub fn lipschitz_guarantee(&self, lipschitz: f64) -> f64 {
        lipschitz * 0.5 * self.spacing.iter().map(|h| h * h).sum::<f64>().sqrt()
    }

    /// The same gap for a function with curvature bounded by `gamma` near a
    /// minimizer interior to the box: `gamma/2` times the squared
    /// half-diagonal.
    pub fn curvature_guarantee(&self, gamma: f64) -> f64 {
        0.5 * gamma * 0.25 * self.spacing.iter().map(|h| h * h).sum::<f64>()
    }
}

/// Evaluates `f` on an `n`-points-per-axis grid including the faces. Ties go
/// to the first point in row-major order (last axis fastest).
pub fn grid_oracle<F>(f: F, bx: &SearchBox, n: usize) -> Result<GridResult>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid needs at least 2 points per axis, got {n}"
        )));
    }
    let d = bx.dim();
    let spacing: Vec<f64> = bx.widths().iter().map(|w| w / (n - 1) as f64).collect();
    let total = n
        .checked_pow(d as u32)
        .ok_or_else(|| Error::InvalidArgument("grid too large".into()))?;
    let point = |mut k: usize| -> Vec<f64> {
        let mut x = vec![0.0; d];
        for axis in (0..d).rev() {
            let i = k % n;
            k /= n;
            x[axis] = if i == n - 1 {
                bx.hi()[axis]
            } else {
                bx.lo()[axis] + spacing[axis] * i as f64
            };
        }
        x
    };
    let best = (0..total)
        .into_par_iter()
        .map(|k| {
            let x = point(k);
            let v = f(&x)?;
            if v.is_nan() {
                return Err(Error::NonFinite { point: x, value: v });
            }
            Ok((v, k))
        })
        .try_reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| Ok(if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
        )?;
    Ok(GridResult {
        argmin: point(best.1),
        min: best.0,
        spacing,
        evaluations: total,
    })
}

/// Central difference of order 1 or 2 for a scalar function.
pub fn fd_derivative<F: Fn(f64) -> f64>(f: F, x: f64, order: u8, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    match order {
        1 => Ok((f(x + h) - f(x - h)) / (2.0 * h)),
        2 => Ok((f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)),
        o => Err(Error::InvalidArgument(format!("order must be 1 or 2, got {o}"))),
    }
}

/// Central-difference gradient.
pub fn fd_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let mut y = x.to_vec();
    (0..x.len())
        .map(|k| {
            y[k] = x[k] + h;
            let fp = f(&y);
            y[k] = x[k] - h;
            let fm = f(&y);
            y[k] = x[k];
            Ok((fp - fm) / (2.0 * h))
        })
        .collect()
}
