//! Analytic Hermitian matrix functions and the derivative formulas of their
//! eigenvalues.
//!
//! Eigenvalues are always indexed in descending order, `lambda_1 >= ... >=
//! lambda_n`, with 1-based indices. At a simple eigenvalue the ordered and the
//! analytic (unordered) branches coincide locally, so first and second
//! derivatives follow from the eigenvector alone:
//!
//! ```text
//! d lambda_j / d w_k        = v_j* (dA/dw_k) v_j
//! d^2 lambda_j / d alpha^2  = v_j* A'' v_j + 2 sum_{k != j} |v_k* A' v_j|^2 / (lambda_j - lambda_k)
//! ```
//!
//! where primes denote derivatives along a line `w + alpha p`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::SearchBox;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_deviation, max_abs, quad_form, CMatrix, CVector};

/// Entrywise tolerance, relative to `max(1, max |a_ij|)`, for accepting a
/// matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Below this eigenvalue gap the second-derivative sum is refused.
pub const DEGENERATE_GAP: f64 = 1e-8;

/// Relative tolerance used to group numerically equal eigenvalues.
pub const CLUSTER_TOL: f64 = 1e-8;

type EvalFn = Arc<dyn Fn(&[f64]) -> CMatrix + Send + Sync>;
type PartialFn = Arc<dyn Fn(&[f64], usize) -> CMatrix + Send + Sync>;
type AlongFn = Arc<dyn Fn(&[f64], &[f64]) -> CMatrix + Send + Sync>;

/// An analytic Hermitian matrix-valued function `A: R^d -> C^{n x n}`
/// together with its partial derivatives.
#[derive(Clone)]
pub struct HermitianMatrixFunction {
    dim_domain: usize,
    dim_matrix: usize,
    eval: EvalFn,
    partial: PartialFn,
    second_along: Option<AlongFn>,
}

impl std::fmt::Debug for HermitianMatrixFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HermitianMatrixFunction")
            .field("dim_domain", &self.dim_domain)
            .field("dim_matrix", &self.dim_matrix)
            .field("second_along", &self.second_along.is_some())
            .finish()
    }
}

impl HermitianMatrixFunction {
    /// `eval(w)` returns `A(w)`; `partial(w, k)` returns `dA/dw_k` at `w`.
    pub fn new<E, P>(dim_domain: usize, dim_matrix: usize, eval: E, partial: P) -> Self
    where
        E: Fn(&[f64]) -> CMatrix + Send + Sync + 'static,
        P: Fn(&[f64], usize) -> CMatrix + Send + Sync + 'static,
    {
        Self {
            dim_domain,
            dim_matrix,
            eval: Arc::new(eval),
            partial: Arc::new(partial),
            second_along: None,
        }
    }

    /// Supplies `d^2/dalpha^2 A(w + alpha p)` at `alpha = 0`. Without it the
    /// second derivative is obtained by central differences of the partials.
    pub fn with_second_along<S>(mut self, second: S) -> Self
    where
        S: Fn(&[f64], &[f64]) -> CMatrix + Send + Sync + 'static,
    {
        self.second_along = Some(Arc::new(second));
        self
    }

    pub fn dim_domain(&self) -> usize {
        self.dim_domain
    }

    pub fn dim_matrix(&self) -> usize {
        self.dim_matrix
    }

    pub fn eval(&self, omega: &[f64]) -> CMatrix {
        (self.eval)(omega)
    }

    pub fn partial(&self, omega: &[f64], axis: usize) -> CMatrix {
        (self.partial)(omega, axis)
    }

    /// `sum_k p_k dA/dw_k`.
    pub fn directional(&self, omega: &[f64], p: &[f64]) -> CMatrix {
        let n = self.dim_matrix;
        let mut out = CMatrix::zeros(n, n);
        for (k, &pk) in p.iter().enumerate() {
            if pk != 0.0 {
                out += self.partial(omega, k) * Complex64::new(pk, 0.0);
            }
        }
        out
    }

    /// Second derivative of `A` along the direction `p`.
    pub fn second_along(&self, omega: &[f64], p: &[f64]) -> CMatrix {
        if let Some(second) = &self.second_along {
            return second(omega, p);
        }
        let scale = omega.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let h = 1e-5 * scale;
        let shifted = |sign: f64| -> Vec<f64> { omega.iter().zip(p).map(|(w, pk)| w + sign * h * pk).collect() };
        let plus = self.directional(&shifted(1.0), p);
        let minus = self.directional(&shifted(-1.0), p);
        (plus - minus) * Complex64::new(0.5 / h, 0.0)
    }

    fn check_point(&self, omega: &[f64]) -> Result<()> {
        if omega.len() != self.dim_domain {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, matrix function expects {}",
                omega.len(),
                self.dim_domain
            )));
        }
        if let Some(&bad) = omega.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                point: omega.to_vec(),
                value: bad,
            });
        }
        Ok(())
    }
}

/// A rectangular analytic matrix function `B: R^d -> C^{rows x cols}`, used for
/// singular value problems.
#[derive(Clone)]
pub struct AnalyticMatrixFunction {
    dim_domain: usize,
    rows: usize,
    cols: usize,
    eval: EvalFn,
    partial: PartialFn,
}

impl std::fmt::Debug for AnalyticMatrixFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticMatrixFunction")
            .field("dim_domain", &self.dim_domain)
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .finish()
    }
}

impl AnalyticMatrixFunction {
    pub fn new<E, P>(dim_domain: usize, rows: usize, cols: usize, eval: E, partial: P) -> Self
    where
        E: Fn(&[f64]) -> CMatrix + Send + Sync + 'static,
        P: Fn(&[f64], usize) -> CMatrix + Send + Sync + 'static,
    {
        Self {
            dim_domain,
            rows,
            cols,
            eval: Arc::new(eval),
            partial: Arc::new(partial),
        }
    }

    pub fn dim_domain(&self) -> usize {
        self.dim_domain
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn eval(&self, omega: &[f64]) -> CMatrix {
        (self.eval)(omega)
    }

    pub fn partial(&self, omega: &[f64], axis: usize) -> CMatrix {
        (self.partial)(omega, axis)
    }
}

/// All eigenpairs of `A(omega)`, values descending, eigenvector columns with
/// their phase fixed.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// One eigenpair of `A(omega)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPoint {
    pub omega: Vec<f64>,
    /// 1-based position in descending order.
    pub index: usize,
    pub value: f64,
    pub eigenvector: CVector,
    /// Distance to the nearest other eigenvalue (infinite when `n = 1`).
    pub gap: f64,
}

/// A singular value with a consistent pair of unit singular vectors,
/// `B w = sigma u` and `B* u = sigma w`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularTriple {
    pub value: f64,
    pub left: CVector,
    pub right: CVector,
}

/// Rotates `v` so that its largest-modulus entry (first one on ties) is real
/// and positive.
fn fix_phase(mut v: CVector) -> CVector {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        let a = z.norm();
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    if best_abs > 0.0 {
        let rot = v[best].conj() / best_abs;
        v *= rot;
        v[best] = Complex64::new(v[best].re, 0.0);
    }
    v
}

/// Dense Hermitian eigendecomposition of an explicit matrix.
pub fn hermitian_spectrum(a: &CMatrix, omega: &[f64]) -> Result<Spectrum> {
    let n = a.nrows();
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "Hermitian eigenproblem on a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let deviation = hermitian_deviation(a);
    if deviation > HERMITIAN_TOL * max_abs(a).max(1.0) {
        return Err(Error::NotHermitian {
            omega: omega.to_vec(),
            deviation,
        });
    }
    if let Some(z) = a.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite {
            point: omega.to_vec(),
            value: if z.re.is_finite() { z.im } else { z.re },
        });
    }
    let eig = a
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or_else(|| Error::EigenNonConvergence { omega: omega.to_vec() })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &fix_phase(eig.eigenvectors.column(i).into_owned()));
    }
    Ok(Spectrum {
        omega: omega.to_vec(),
        values,
        vectors,
    })
}

/// Eigendecomposition of `A(omega)`.
pub fn spectrum(f: &HermitianMatrixFunction, omega: &[f64]) -> Result<Spectrum> {
    f.check_point(omega)?;
    let a = f.eval(omega);
    if a.nrows() != f.dim_matrix || a.ncols() != f.dim_matrix {
        return Err(Error::DimensionMismatch(format!(
            "matrix function declared order {} but returned {}x{}",
            f.dim_matrix,
            a.nrows(),
            a.ncols()
        )));
    }
    hermitian_spectrum(&a, omega)
}

impl Spectrum {
    pub fn order(&self) -> usize {
        self.values.len()
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index == 0 || index > self.order() {
            return Err(Error::IndexOutOfRange {
                index,
                order: self.order(),
            });
        }
        Ok(())
    }

    pub fn vector(&self, index: usize) -> CVector {
        self.vectors.column(index - 1).into_owned()
    }

    pub fn gap(&self, index: usize) -> f64 {
        let lam = self.values[index - 1];
        self.values
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != index - 1)
            .map(|(_, v)| (lam - v).abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn point(&self, index: usize) -> Result<EigenPoint> {
        self.check_index(index)?;
        Ok(EigenPoint {
            omega: self.omega.clone(),
            index,
            value: self.values[index - 1],
            eigenvector: self.vector(index),
            gap: self.gap(index),
        })
    }

    /// 0-based index range of the eigenvalues numerically equal to
    /// `lambda_index`, grown through neighbours closer than
    /// `tol * (1 + |lambda|)`.
    pub fn cluster(&self, index: usize, tol: f64) -> std::ops::Range<usize> {
        let j = index - 1;
        let close = |a: f64, b: f64| (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()));
        let mut lo = j;
        while lo > 0 && close(self.values[lo - 1], self.values[lo]) {
            lo -= 1;
        }
        let mut hi = j + 1;
        while hi < self.order() && close(self.values[hi - 1], self.values[hi]) {
            hi += 1;
        }
        lo..hi
    }
}

/// The `index`-th largest eigenvalue of `A(omega)` with its eigenvector.
pub fn evaluate_eig(f: &HermitianMatrixFunction, omega: &[f64], index: usize) -> Result<EigenPoint> {
    spectrum(f, omega)?.point(index)
}

fn real_part_checked(z: Complex64, scale: f64) -> Result<f64> {
    if z.im.abs() > 1e-10 * (1.0 + scale) {
        return Err(Error::Internal(format!(
            "quadratic form with Hermitian derivative has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// Gradient of `lambda_index` at a simple eigenvalue: `(v* dA/dw_k v)_k`.
pub fn eig_gradient(f: &HermitianMatrixFunction, ep: &EigenPoint) -> Result<Vec<f64>> {
    f.check_point(&ep.omega)?;
    (0..f.dim_domain)
        .map(|k| {
            let dk = f.partial(&ep.omega, k);
            real_part_checked(quad_form(&ep.eigenvector, &dk, &ep.eigenvector), max_abs(&dk))
        })
        .collect()
}

/// Directional derivatives of the analytic branches through `lambda_index`
/// along `p`, sorted descending.
///
/// For a simple eigenvalue this is the single value `v* A' v`. For a cluster of
/// `r` numerically equal eigenvalues it is the spectrum of the compression
/// `V* A' V` onto the cluster's eigenspace.
pub fn branch_slopes(spec: &Spectrum, derivative: &CMatrix, index: usize) -> Result<Vec<f64>> {
    spec.check_index(index)?;
    let range = spec.cluster(index, CLUSTER_TOL);
    let v = spec.vectors.columns(range.start, range.len()).into_owned();
    let compressed = v.adjoint() * derivative * &v;
    let mut slopes = hermitian_spectrum(&crate::linalg::hermitian_part(&compressed), &spec.omega)?.values;
    slopes.sort_by(|a, b| b.total_cmp(a));
    Ok(slopes)
}

/// Directional derivatives of every analytic branch at `spec`, one per
/// eigenvalue, unsorted. Feeding these to
/// [`derivative_bundle`](crate::envelope1d::derivative_bundle) gives models that stay valid
/// across later eigenvalue crossings, at the price of weaker slopes.
pub fn all_branch_slopes(spec: &Spectrum, derivative: &CMatrix) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(spec.order());
    let mut j = 1;
    while j <= spec.order() {
        let range = spec.cluster(j, CLUSTER_TOL);
        out.extend(branch_slopes(spec, derivative, j)?);
        j = range.end + 1;
    }
    Ok(out)
}

/// One-sided derivatives `(left, right)` of the ordered eigenvalue
/// `lambda_index` along `p`.
///
/// Moving forward the cluster re-orders by descending branch slope; moving
/// backward by ascending slope.
pub fn ordered_one_sided_derivatives(spec: &Spectrum, derivative: &CMatrix, index: usize) -> Result<(f64, f64)> {
    let slopes = branch_slopes(spec, derivative, index)?;
    let range = spec.cluster(index, CLUSTER_TOL);
    let pos = index - 1 - range.start;
    let r = slopes.len();
    Ok((slopes[r - 1 - pos], slopes[pos]))
}

/// Second derivative of `lambda_index(omega + alpha p)` at `alpha = 0`.
pub fn eig_second_derivative_line(f: &HermitianMatrixFunction, omega: &[f64], p: &[f64], index: usize) -> Result<f64> {
    let spec = spectrum(f, omega)?;
    spec.check_index(index)?;
    if p.len() != f.dim_domain {
        return Err(Error::DimensionMismatch(format!(
            "direction has {} coordinates, expected {}",
            p.len(),
            f.dim_domain
        )));
    }
    let gap = spec.gap(index);
    if gap < DEGENERATE_GAP {
        return Err(Error::NearDegenerate {
            gap,
            threshold: DEGENERATE_GAP,
        });
    }
    let first = f.directional(omega, p);
    let second = f.second_along(omega, p);
    let vj = spec.vector(index);
    let lam = spec.values[index - 1];
    let mut total = real_part_checked(quad_form(&vj, &second, &vj), max_abs(&second))?;
    let first_vj = &first * &vj;
    for k in 0..spec.order() {
        if k == index - 1 {
            continue;
        }
        let coupling = spec.vectors.column(k).dotc(&first_vj).norm_sqr();
        total += 2.0 * coupling / (lam - spec.values[k]);
    }
    Ok(total)
}

/// The Hermitian embedding `[[0, B], [B*, 0]]` of a rectangular function.
/// Its `j`-th largest eigenvalue is `sigma_j(B)` for `j <= min(rows, cols)`.
pub fn embed_singular(b: &AnalyticMatrixFunction) -> HermitianMatrixFunction {
    let (rows, cols) = b.shape();
    let embed = move |m: CMatrix| -> CMatrix {
        let mut out = CMatrix::zeros(rows + cols, rows + cols);
        out.view_mut((0, rows), (rows, cols)).copy_from(&m);
        out.view_mut((rows, 0), (cols, rows)).copy_from(&m.adjoint());
        out
    };
    let eval_b = b.clone();
    let partial_b = b.clone();
    HermitianMatrixFunction::new(
        b.dim_domain(),
        rows + cols,
        move |w| embed(eval_b.eval(w)),
        move |w, k| embed(partial_b.partial(w, k)),
    )
}

/// Splits an embedding eigenvector into a consistent singular triple.
pub(crate) fn triple_from_embedding(bmat: &CMatrix, value: f64, x: &CVector) -> Result<SingularTriple> {
    let rows = bmat.nrows();
    let right = x.rows(rows, bmat.ncols()).into_owned();
    let rn = right.norm();
    if value <= 0.0 || rn < 1e-8 {
        return Err(Error::ZeroSingularValue);
    }
    let right = right / Complex64::new(rn, 0.0);
    let image = bmat * &right;
    let norm = image.norm();
    if norm == 0.0 {
        return Err(Error::ZeroSingularValue);
    }
    let left = image / Complex64::new(norm, 0.0);
    // For wide B the embedding has extra zero eigenvalues whose vectors
    // [0; null(B)] can mix into `right` when sigma is small; B* u is clean.
    let back = bmat.adjoint() * &left;
    let bn = back.norm();
    if bn == 0.0 {
        return Err(Error::ZeroSingularValue);
    }
    let right = back / Complex64::new(bn, 0.0);
    Ok(SingularTriple { value, left, right })
}

/// The `index`-th largest singular value of `B(omega)` with consistent unit
/// singular vectors, computed through the Hermitian embedding.
pub fn singular_triple(b: &AnalyticMatrixFunction, omega: &[f64], index: usize) -> Result<SingularTriple> {
    let (rows, cols) = b.shape();
    if index == 0 || index > rows.min(cols) {
        return Err(Error::IndexOutOfRange {
            index,
            order: rows.min(cols),
        });
    }
    let bmat = b.eval(omega);
    let spec = spectrum(&embed_singular(b), omega)?;
    triple_from_embedding(&bmat, spec.values[index - 1], &spec.vector(index))
}

/// Gradient of a simple nonzero singular value: `Re(u* dB/dw_k w)`.
pub fn sval_gradient(b: &AnalyticMatrixFunction, omega: &[f64], triple: &SingularTriple) -> Result<Vec<f64>> {
    if triple.value <= 0.0 {
        return Err(Error::ZeroSingularValue);
    }
    Ok((0..b.dim_domain())
        .map(|k| quad_form(&triple.left, &b.partial(omega, k), &triple.right).re)
        .collect())
}

/// Heuristic curvature bound: `safety * max |d^2 lambda_index / d alpha^2|`
/// sampled along `n_lines` random chords of the box, `n_samples` points each.
///
/// This is an estimate, not a certificate: narrow curvature spikes between
/// samples are missed. Points closer than [`DEGENERATE_GAP`] to a crossing
/// are skipped.
pub fn estimate_gamma(
    f: &HermitianMatrixFunction,
    bounds: &SearchBox,
    index: usize,
    n_lines: usize,
    n_samples: usize,
    safety: f64,
) -> Result<f64> {
    if bounds.dim() != f.dim_domain {
        return Err(Error::DimensionMismatch(format!(
            "box has dimension {}, matrix function expects {}",
            bounds.dim(),
            f.dim_domain
        )));
    }
    if safety < 1.0 || n_lines == 0 || n_samples == 0 {
        return Err(Error::InvalidArgument(
            "estimate_gamma needs safety >= 1 and at least one line and sample".into(),
        ));
    }
    let d = bounds.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a6d_6d61);
    let mut worst: Option<f64> = None;
    for _ in 0..n_lines {
        let base: Vec<f64> = (0..d)
            .map(|j| rng.random_range(bounds.lo()[j]..bounds.hi()[j]))
            .collect();
        let mut p: Vec<f64> = if d == 1 {
            vec![1.0]
        } else {
            (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()
        };
        let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        p.iter_mut().for_each(|x| *x /= norm);
        // chord of the box through `base` along `p`
        let (mut a_min, mut a_max) = (f64::NEG_INFINITY, f64::INFINITY);
        for j in 0..d {
            if p[j].abs() > 1e-14 {
                let t1 = (bounds.lo()[j] - base[j]) / p[j];
                let t2 = (bounds.hi()[j] - base[j]) / p[j];
                a_min = a_min.max(t1.min(t2));
                a_max = a_max.min(t1.max(t2));
            }
        }
        for s in 0..n_samples {
            let alpha = if n_samples == 1 {
                0.0
            } else {
                a_min + (a_max - a_min) * s as f64 / (n_samples - 1) as f64
            };
            let w: Vec<f64> = base.iter().zip(&p).map(|(b, pk)| b + alpha * pk).collect();
            match eig_second_derivative_line(f, &w, &p, index) {
                Ok(v) => worst = Some(worst.unwrap_or(0.0).max(v.abs())),
                Err(Error::NearDegenerate { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    worst.map(|g| safety * g).ok_or(Error::GammaEstimationFailed)
}
