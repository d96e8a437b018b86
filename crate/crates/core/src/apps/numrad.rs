//! Numerical radius `r(A) = max_theta lambda_1((A e^{i theta} + A* e^{-i theta}) / 2)`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{require_finite, require_square, DistanceResult};
use crate::envelope1d::{maximize_1d, Sample1D};
use crate::error::Result;
use crate::linalg::{norm2, CMatrix, I};
use crate::matfunc::{hermitian_spectrum, ordered_one_sided_derivatives, HermitianMatrixFunction};

#[derive(Debug, Clone, PartialEq)]
pub struct NumradOptions {
    pub eps: f64,
    /// Defaults to `|A|_2`.
    pub gamma: Option<f64>,
    pub max_iter: usize,
}

impl NumradOptions {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            gamma: None,
            max_iter: 10_000,
        }
    }
}

fn rotated(a: &CMatrix, theta: f64, derivative: bool) -> CMatrix {
    let e = Complex64::from_polar(1.0, theta);
    let (e, f) = if derivative {
        (I * e, -I * e.conj())
    } else {
        (e, e.conj())
    };
    (a * e + a.adjoint() * f) * Complex64::new(0.5, 0.0)
}

/// `theta -> (A e^{i theta} + A* e^{-i theta}) / 2` with its derivatives.
pub fn numerical_radius_function(a: &CMatrix) -> HermitianMatrixFunction {
    let n = a.nrows();
    let (a1, a2, a3) = (a.clone(), a.clone(), a.clone());
    HermitianMatrixFunction::new(
        1,
        n,
        move |w| rotated(&a1, w[0], false),
        move |w, _| rotated(&a2, w[0], true),
    )
    .with_second_along(move |w, p| rotated(&a3, w[0], false) * Complex64::new(-p[0] * p[0], 0.0))
}

/// Numerical radius by maximizing the largest eigenvalue of the rotated
/// Hermitian part over `[0, 2 pi]`.
pub fn numerical_radius(a: &CMatrix, opts: &NumradOptions) -> Result<DistanceResult> {
    require_square(a, "A")?;
    require_finite(a, "A")?;
    let gamma = opts.gamma.unwrap_or_else(|| norm2(a).max(1e-12));
    let sample = |theta: f64| -> Result<Sample1D> {
        let spec = hermitian_spectrum(&rotated(a, theta, false), &[theta])?;
        let (left, right) = ordered_one_sided_derivatives(&spec, &rotated(a, theta, true), 1)?;
        Ok(Sample1D {
            value: spec.values[0],
            slope_left: left,
            slope_right: right,
        })
    };
    let r = maximize_1d(sample, 0.0, TAU, gamma, opts.eps, opts.max_iter)?;
    Ok(DistanceResult::from_opt(r, gamma))
}
