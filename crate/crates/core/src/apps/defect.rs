//! Distance to the nearest defective matrix,
//! `min_lambda max_{t >= 0} sigma_{2n-1}([[A - lambda I, t I], [0, A - lambda I]])`.
//!
//! The inner maximization over the coupling `t` is unimodal; it is solved by a
//! secant iteration on `d sigma / dt`, safeguarded by bisection. The coupling
//! can be capped with [`DefectOptions::t_max`].

use num_complex::Complex64;

use super::{embed, require_finite, require_square, sval_sample, sval_triple, DistanceResult};
use crate::domain::SearchBox;
use crate::envelope2d::SampleND;
use crate::error::{Error, Result};
use crate::linalg::{identity, norm2, CMatrix};
use crate::matfunc::hermitian_spectrum;
use crate::matfunc::SingularTriple;
use crate::mesh::{algorithm2, MeshOptions, DEFAULT_MAX_DEPTH};

/// Iteration budget of the inner secant/bisection solve.
pub const INNER_BUDGET: usize = 60;
/// Bracket width on `t` at which the inner solve stops.
pub const INNER_TOL: f64 = 1e-10;
/// `|d sigma / dt|` below which an interior point is accepted.
pub const INNER_SLOPE_TOL: f64 = 1e-8;
/// Relative gap under which `sigma_{2n-2}` and `sigma_{2n-1}` count as equal.
const KINK_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct DefectOptions {
    pub eps: f64,
    pub gamma: f64,
    /// Defaults to the square about `tr(A)/n` of half-width `2|A - cI|`.
    pub bounds: Option<SearchBox>,
    pub n_q: Option<usize>,
    pub max_depth: usize,
    pub max_iter: usize,
    /// Upper end of the inner range; `INFINITY` (default) searches all `t >= 0`.
    pub t_max: f64,
}

impl DefectOptions {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            gamma: 2.0,
            bounds: None,
            n_q: Some(30),
            max_depth: DEFAULT_MAX_DEPTH,
            max_iter: 100_000,
            t_max: f64::INFINITY,
        }
    }
}

fn coupled(a: &CMatrix, lambda: [f64; 2], t: f64) -> CMatrix {
    let n = a.nrows();
    let shift = Complex64::new(lambda[0], lambda[1]);
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    let mut d = a.clone();
    for k in 0..n {
        d[(k, k)] -= shift;
    }
    m.view_mut((0, 0), (n, n)).copy_from(&d);
    m.view_mut((n, n), (n, n)).copy_from(&d);
    for k in 0..n {
        m[(k, n + k)] = Complex64::new(t, 0.0);
    }
    m
}

fn coupling_derivative(n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        m[(k, n + k)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Result of the inner maximization at a fixed `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerMax {
    pub t: f64,
    pub value: f64,
    /// One-sided `d sigma / dt` at `t`; at a kink maximizer `left >= 0 >= right`.
    pub slope_left: f64,
    pub slope_right: f64,
    pub evaluations: usize,
}

/// `max_{t in [0, t_max]} sigma_{2n-1}` at `lambda`. With an infinite `t_max`
/// the bracket is grown by doubling from `t = 1`.
///
/// The maximizer is either smooth (`d sigma / dt = 0`) or a kink where
/// `sigma_{2n-2}` and `sigma_{2n-1}` meet; both are found by intersecting the
/// tangent lines at the bracket ends, with bisection as a safeguard.
pub fn inner_max(a: &CMatrix, lambda: [f64; 2], t_max: f64) -> Result<InnerMax> {
    let n = a.nrows();
    let idx = 2 * n - 1;
    let dm = coupling_derivative(n);
    let sample = |t: f64| sval_sample(&coupled(a, lambda, t), &dm, idx, t);
    let s0 = sample(0.0)?;
    if s0.slope_right <= INNER_SLOPE_TOL {
        return Ok(InnerMax {
            t: 0.0,
            value: s0.value,
            slope_left: s0.slope_left,
            slope_right: s0.slope_right,
            evaluations: 1,
        });
    }
    let mut lo = (0.0, s0);
    let mut hi_t = t_max.min(1.0);
    let mut s1 = sample(hi_t)?;
    let mut evaluations = 2;
    while s1.slope_left > INNER_SLOPE_TOL && hi_t < t_max {
        if evaluations > INNER_BUDGET {
            return Err(Error::InnerNonConvergence {
                lambda: lambda.to_vec(),
            });
        }
        lo = (hi_t, s1);
        hi_t = (2.0 * hi_t).min(t_max);
        s1 = sample(hi_t)?;
        evaluations += 1;
    }
    if s1.slope_left >= -INNER_SLOPE_TOL {
        return Ok(InnerMax {
            t: hi_t,
            value: s1.value,
            slope_left: s1.slope_left,
            slope_right: s1.slope_right,
            evaluations,
        });
    }
    let mut hi = (hi_t, s1);
    let mut last_width = hi.0 - lo.0;
    let mut slow_steps = 0;
    for _ in 0..INNER_BUDGET {
        let (dl, dh) = (lo.1.slope_right, hi.1.slope_left);
        let tangent = (hi.1.value - lo.1.value + dl * lo.0 - dh * hi.0) / (dl - dh);
        let t = if slow_steps < 2 && tangent.is_finite() && tangent > lo.0 && tangent < hi.0 {
            tangent
        } else {
            slow_steps = 0;
            0.5 * (lo.0 + hi.0)
        };
        let s = sample(t)?;
        evaluations += 1;
        if s.slope_left >= -INNER_SLOPE_TOL && s.slope_right <= INNER_SLOPE_TOL {
            return Ok(InnerMax {
                t,
                value: s.value,
                slope_left: s.slope_left,
                slope_right: s.slope_right,
                evaluations,
            });
        }
        if s.slope_left > 0.0 {
            lo = (t, s);
        } else {
            hi = (t, s);
        }
        let width = hi.0 - lo.0;
        if width > 0.5 * last_width {
            slow_steps += 1;
        }
        last_width = width;
        if width <= INNER_TOL * hi.0.max(1.0) {
            // the maximizer lies in [lo, hi]; report the bracket slopes
            let (t, s) = if lo.1.value >= hi.1.value { lo } else { hi };
            return Ok(InnerMax {
                t,
                value: s.value,
                slope_left: lo.1.slope_right,
                slope_right: hi.1.slope_left,
                evaluations,
            });
        }
    }
    Err(Error::InnerNonConvergence {
        lambda: lambda.to_vec(),
    })
}

fn outer_gradient(t: &SingularTriple) -> Vec<f64> {
    let uw = t.left.dotc(&t.right);
    vec![-uw.re, uw.im]
}

/// Gradient at a kink maximizer, where `sigma_{2n-2} = sigma_{2n-1}`.
///
/// On the two-dimensional singular subspace the `t`-derivative has slopes
/// `m1 > 0 > m2`; the maximizer moves with `lambda` so that the two branches
/// stay equal, which weights their gradients by `-m2` and `m1`.
fn kink_gradient(a: &CMatrix, lambda: [f64; 2], t: f64) -> Result<Option<Vec<f64>>> {
    let n = a.nrows();
    let spec = hermitian_spectrum(&embed(&coupled(a, lambda, t)), &[lambda[0], lambda[1]])?;
    let (upper, lower) = (spec.values[2 * n - 3], spec.values[2 * n - 2]);
    if upper - lower > KINK_TOL * (1.0 + upper) {
        return Ok(None);
    }
    let v = spec.vectors.columns(2 * n - 3, 2).into_owned();
    let compress = |d: &CMatrix| v.adjoint() * embed(d) * &v;
    let eye = identity(2 * n);
    let dt = compress(&coupling_derivative(n));
    let d1 = compress(&(&eye * Complex64::new(-1.0, 0.0)));
    let d2 = compress(&(&eye * Complex64::new(0.0, -1.0)));
    let eig = dt.symmetric_eigen();
    let (i, j) = if eig.eigenvalues[0] >= eig.eigenvalues[1] {
        (0, 1)
    } else {
        (1, 0)
    };
    let (m1, m2) = (eig.eigenvalues[i], eig.eigenvalues[j]);
    if !(m1 > 0.0 && m2 < 0.0) {
        return Ok(None);
    }
    let mu = -m2 / (m1 - m2);
    let (q1, q2) = (eig.eigenvectors.column(i), eig.eigenvectors.column(j));
    let branch = |d: &CMatrix, q: &nalgebra::DVectorView<Complex64>| q.dotc(&(d * q)).re;
    Ok(Some(
        [&d1, &d2]
            .iter()
            .map(|d| mu * branch(d, &q1) + (1.0 - mu) * branch(d, &q2))
            .collect(),
    ))
}

fn defect_objective(a: &CMatrix, t_max: f64) -> impl Fn(&[f64]) -> Result<SampleND> + Sync + '_ {
    let n = a.nrows();
    let zero_tol = 1e-14 * (1.0 + norm2(a));
    move |z: &[f64]| {
        let lambda = [z[0], z[1]];
        let inner = inner_max(a, lambda, t_max)?;
        if inner.value <= zero_tol {
            return Ok(SampleND {
                value: inner.value.max(0.0),
                gradient: vec![0.0, 0.0],
            });
        }
        if inner.t > 0.0 {
            if let Some(gradient) = kink_gradient(a, lambda, inner.t)? {
                return Ok(SampleND {
                    value: inner.value,
                    gradient,
                });
            }
        }
        // At t = 0 the coupled matrix is block diagonal and sigma_{2n-1}
        // is the doubled sigma_n(A - lambda I); use the n x n problem.
        let triple = if inner.t == 0.0 {
            let mut d = a.clone();
            for k in 0..n {
                d[(k, k)] -= Complex64::new(lambda[0], lambda[1]);
            }
            sval_triple(&d, n, z)
        } else {
            sval_triple(&coupled(a, lambda, inner.t), 2 * n - 1, z)
        };
        match triple {
            Ok(t) => Ok(SampleND {
                value: inner.value,
                gradient: outer_gradient(&t),
            }),
            Err(Error::ZeroSingularValue) => Ok(SampleND {
                value: 0.0,
                gradient: vec![0.0, 0.0],
            }),
            Err(e) => Err(e),
        }
    }
}

/// Value and gradient of the outer objective at `lambda`, for checks.
pub fn defect_sample(a: &CMatrix, lambda: [f64; 2], t_max: f64) -> Result<(SampleND, InnerMax)> {
    let inner = inner_max(a, lambda, t_max)?;
    Ok((defect_objective(a, t_max)(&lambda)?, inner))
}

pub fn dist_defectiveness(a: &CMatrix, opts: &DefectOptions) -> Result<DistanceResult> {
    require_square(a, "A")?;
    require_finite(a, "A")?;
    let n = a.nrows();
    if n < 2 {
        return Err(Error::InvalidArgument("distance to defectiveness needs n >= 2".into()));
    }
    if !(opts.t_max > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t_max must be positive, got {}",
            opts.t_max
        )));
    }
    let bounds = match &opts.bounds {
        Some(bx) => bx.clone(),
        None => {
            let c = a.trace() / Complex64::new(n as f64, 0.0);
            let mut centered = a.clone();
            for k in 0..n {
                centered[(k, k)] -= c;
            }
            SearchBox::square([c.re, c.im], (2.0 * norm2(&centered)).max(1e-3))?
        }
    };
    let mut mesh = MeshOptions::new(opts.gamma, opts.eps, opts.n_q);
    mesh.max_depth = opts.max_depth;
    mesh.max_iter = opts.max_iter;
    let r = algorithm2(defect_objective(a, opts.t_max), &bounds, &mesh)?;
    let lambda = [r.xbest[0], r.xbest[1]];
    let inner = inner_max(a, lambda, opts.t_max)?;
    let mut out = DistanceResult::from_opt(r, opts.gamma);
    out.inner = Some(inner.t);
    Ok(out)
}
