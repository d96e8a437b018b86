//! Distance to instability `inf_omega sigma_min(A - i omega I)` of a stable
//! matrix.

use std::cell::Cell;

use num_complex::Complex64;

use super::{estimate_curvature_1d, require_finite, require_square, sval_sample, DistanceResult};
use crate::envelope1d::optimize_1d;
use crate::error::{Error, Result};
use crate::linalg::{identity, norm2, CMatrix, I};
use crate::result::{HistoryRow, Status};

#[derive(Debug, Clone, PartialEq)]
pub struct InstabilityOptions {
    pub eps: f64,
    /// Defaults to a sampled curvature estimate with safety factor 2.
    pub gamma: Option<f64>,
    /// Defaults to `[-2|A|, 2|A|]`, which contains every minimizer since
    /// `sigma_min(A - i omega I) >= |omega| - |A|`.
    pub interval: Option<(f64, f64)>,
    pub max_iter: usize,
}

impl InstabilityOptions {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            gamma: None,
            interval: None,
            max_iter: 10_000,
        }
    }
}

pub fn dist_instability(a: &CMatrix, opts: &InstabilityOptions) -> Result<DistanceResult> {
    require_square(a, "A")?;
    require_finite(a, "A")?;
    let n = a.nrows();
    let norm = norm2(a);
    let (lo, hi) = opts.interval.unwrap_or_else(|| {
        let r = 2.0 * norm.max(0.5);
        (-r, r)
    });
    let shifted = |omega: f64| a - identity(n) * (I * omega);
    let deriv = identity(n) * Complex64::new(0.0, -1.0);
    let zero_tol = 1e-14 * (1.0 + norm);
    let hit = Cell::new(None);
    let sample = |omega: f64| {
        let s = sval_sample(&shifted(omega), &deriv, n, omega)?;
        if s.value <= zero_tol {
            hit.set(Some(omega));
            return Err(Error::ZeroSingularValue);
        }
        Ok(s)
    };
    let gamma = match opts.gamma {
        Some(g) => g,
        None => estimate_curvature_1d(|w| Ok(sval_sample(&shifted(w), &deriv, n, w)?.value), lo, hi, 200, 2.0)?,
    };
    match optimize_1d(sample, lo, hi, gamma, opts.eps, opts.max_iter) {
        Ok(r) => Ok(DistanceResult::from_opt(r, gamma)),
        Err(Error::ZeroSingularValue) if hit.get().is_some() => {
            let omega = hit.get().unwrap_or_default();
            Ok(DistanceResult {
                value: 0.0,
                argmin: vec![omega],
                lower: 0.0,
                upper: 0.0,
                inner: None,
                status: Status::Converged,
                evaluations: 0,
                vertex_computations: 0,
                gamma,
                gamma_violated: false,
                history: vec![HistoryRow {
                    iter: 0,
                    x: vec![omega],
                    f: 0.0,
                    lower: 0.0,
                    upper: 0.0,
                    evals: 0,
                    regions: 0,
                    vertices: 0,
                    elapsed: 0.0,
                }],
            })
        }
        Err(e) => Err(e),
    }
}
