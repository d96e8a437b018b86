//! Eigenvalue and singular value optimization problems from control and
//! matrix analysis, solved with the quadratic-model optimizers.

mod defect;
mod hinf;
mod instability;
pub mod instances;
mod numrad;
mod uncontrol;

pub use defect::{defect_sample, dist_defectiveness, inner_max, DefectOptions, InnerMax};
pub use hinf::{hinf_norm, HinfOptions, LTISystem};
pub use instability::{dist_instability, InstabilityOptions};
pub use numrad::{numerical_radius, numerical_radius_function, NumradOptions};
pub use uncontrol::{dist_uncontrollability, uncontrollability_objective, UncontrolOptions};

use crate::envelope1d::Sample1D;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::matfunc::{hermitian_spectrum, ordered_one_sided_derivatives, triple_from_embedding, SingularTriple};
use crate::result::{HistoryRow, OptResult, Status};

/// Outcome of an application solver.
///
/// For minimization problems `value == upper`; for maximization problems
/// (numerical radius, H-infinity norm) `value == lower`, the best value found.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceResult {
    pub value: f64,
    /// Optimal parameter: `theta`, `omega`, `s`, or `(re z, im z)`.
    pub argmin: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    /// Inner maximizer `t*` for the distance to defectiveness.
    pub inner: Option<f64>,
    pub status: Status,
    pub evaluations: usize,
    pub vertex_computations: usize,
    pub gamma: f64,
    pub gamma_violated: bool,
    pub history: Vec<HistoryRow>,
}

impl DistanceResult {
    pub(crate) fn from_opt(r: OptResult, gamma: f64) -> Self {
        Self {
            value: r.fbest,
            argmin: r.xbest,
            lower: r.lower,
            upper: r.upper,
            inner: None,
            status: r.status,
            evaluations: r.evaluations,
            vertex_computations: r.vertex_computations,
            gamma,
            gamma_violated: r.gamma_violated,
            history: r.history,
        }
    }

    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

pub(crate) fn require_square(a: &CMatrix, what: &str) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be square and nonempty, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

pub(crate) fn require_finite(m: &CMatrix, what: &str) -> Result<()> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("{what} has non-finite entries")));
    }
    Ok(())
}

/// `[[0, B], [B*, 0]]`.
pub(crate) fn embed(b: &CMatrix) -> CMatrix {
    let (r, c) = b.shape();
    let mut out = CMatrix::zeros(r + c, r + c);
    out.view_mut((0, r), (r, c)).copy_from(b);
    out.view_mut((r, 0), (c, r)).copy_from(&b.adjoint());
    out
}

/// `sigma_index(B)` with its ordered one-sided derivatives along a line on
/// which `B' = db`.
pub(crate) fn sval_sample(b: &CMatrix, db: &CMatrix, index: usize, at: f64) -> Result<Sample1D> {
    let spec = hermitian_spectrum(&embed(b), &[at])?;
    let (left, right) = ordered_one_sided_derivatives(&spec, &embed(db), index)?;
    Ok(Sample1D {
        value: spec.values[index - 1],
        slope_left: left,
        slope_right: right,
    })
}

/// `sigma_index(B)` with consistent unit singular vectors.
pub(crate) fn sval_triple(b: &CMatrix, index: usize, at: &[f64]) -> Result<SingularTriple> {
    let spec = hermitian_spectrum(&embed(b), at)?;
    triple_from_embedding(b, spec.values[index - 1], &spec.vector(index))
}

/// Heuristic curvature bound for a scalar function on `[a, b]`:
/// `safety * max |f''|` from second differences at `n` interior points.
pub fn estimate_curvature_1d<F>(f: F, a: f64, b: f64, n: usize, safety: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let h = (b - a) / (50.0 * n as f64);
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let x = a + (b - a) * (k as f64 + 0.5) / n as f64;
        let d2 = (f(x + h)? - 2.0 * f(x)? + f(x - h)?) / (h * h);
        if d2.is_finite() {
            worst = worst.max(d2.abs());
        }
    }
    // flat functions still need a positive bound
    Ok((safety * worst).max(1e-6))
}
