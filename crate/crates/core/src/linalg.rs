//! Thin helpers over `nalgebra` for dense complex matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Converts a real matrix into a complex one.
pub fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Builds an `rows x cols` complex matrix from row-major real parts.
pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    complexify(&DMatrix::from_row_slice(rows, cols, data))
}

/// Spectral norm (largest singular value).
pub fn norm2(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Smallest singular value of a square or rectangular matrix.
pub fn sigma_min(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Largest entrywise deviation from Hermitian symmetry.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a general square complex matrix (Schur form).
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalues of a non-square {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or(Error::EigenNonConvergence { omega: vec![] })?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Identity of order `n`.
pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Hermitian part `(M + M*) / 2`, exactly Hermitian in floating point.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut h = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        }
    }
    h
}

/// Quadratic form `u* M w`.
pub fn quad_form(u: &CVector, m: &CMatrix, w: &CVector) -> Complex64 {
    u.dotc(&(m * w))
}
