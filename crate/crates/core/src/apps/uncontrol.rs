//! Distance to uncontrollability `min_z sigma_n([A - z I, B])`.

use num_complex::Complex64;

use super::{require_finite, require_square, sval_triple, DistanceResult};
use crate::domain::SearchBox;
use crate::envelope2d::SampleND;
use crate::error::{Error, Result};
use crate::linalg::{norm2, CMatrix};
use crate::mesh::{algorithm2, MeshOptions, DEFAULT_MAX_DEPTH};

#[derive(Debug, Clone, PartialEq)]
pub struct UncontrolOptions {
    pub eps: f64,
    pub gamma: f64,
    /// Defaults to the square of half-width `|A| + |B|` about the origin,
    /// which holds every eigenvalue of `A` and hence the minimizers.
    pub bounds: Option<SearchBox>,
    /// Model cap per sub-box; `None` runs uncapped.
    pub n_q: Option<usize>,
    pub max_depth: usize,
    pub max_iter: usize,
}

impl UncontrolOptions {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            gamma: 2.0,
            bounds: None,
            n_q: Some(30),
            max_depth: DEFAULT_MAX_DEPTH,
            max_iter: 100_000,
        }
    }
}

fn check(a: &CMatrix, b: &CMatrix) -> Result<()> {
    require_square(a, "A")?;
    require_finite(a, "A")?;
    require_finite(b, "B")?;
    if b.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "B has {} rows, A has {}",
            b.nrows(),
            a.nrows()
        )));
    }
    if b.ncols() > a.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "B has more columns ({}) than A has rows ({})",
            b.ncols(),
            a.nrows()
        )));
    }
    Ok(())
}

/// `z = (x, y) -> sigma_n([A - (x + i y) I, B])` with its gradient
/// `(-Re(u* w), Im(u* w))`, `w` the first `n` entries of the right singular
/// vector. At a zero singular value the gradient is reported as zero, which
/// keeps the quadratic model below the (nonnegative) objective.
pub fn uncontrollability_objective(a: &CMatrix, b: &CMatrix) -> Result<impl Fn(&[f64]) -> Result<SampleND> + Sync> {
    check(a, b)?;
    let n = a.nrows();
    let mut base = CMatrix::zeros(n, n + b.ncols());
    base.view_mut((0, 0), (n, n)).copy_from(a);
    base.view_mut((0, n), (n, b.ncols())).copy_from(b);
    let zero_tol = 1e-14 * (1.0 + norm2(&base));
    Ok(move |z: &[f64]| {
        let mut m = base.clone();
        let shift = Complex64::new(z[0], z[1]);
        for k in 0..n {
            m[(k, k)] -= shift;
        }
        let t = match sval_triple(&m, n, z) {
            Ok(t) => t,
            Err(Error::ZeroSingularValue) => {
                return Ok(SampleND {
                    value: 0.0,
                    gradient: vec![0.0, 0.0],
                })
            }
            Err(e) => return Err(e),
        };
        if t.value <= zero_tol {
            return Ok(SampleND {
                value: t.value.max(0.0),
                gradient: vec![0.0, 0.0],
            });
        }
        let uw = t.left.rows(0, n).dotc(&t.right.rows(0, n));
        Ok(SampleND {
            value: t.value,
            gradient: vec![-uw.re, uw.im],
        })
    })
}

pub fn dist_uncontrollability(a: &CMatrix, b: &CMatrix, opts: &UncontrolOptions) -> Result<DistanceResult> {
    let f = uncontrollability_objective(a, b)?;
    let bounds = match &opts.bounds {
        Some(bx) => bx.clone(),
        None => SearchBox::square([0.0, 0.0], (norm2(a) + norm2(b)).max(1e-3))?,
    };
    let mut mesh = MeshOptions::new(opts.gamma, opts.eps, opts.n_q);
    mesh.max_depth = opts.max_depth;
    mesh.max_iter = opts.max_iter;
    let r = algorithm2(f, &bounds, &mesh)?;
    Ok(DistanceResult::from_opt(r, opts.gamma))
}
