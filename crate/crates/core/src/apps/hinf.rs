//! H-infinity norm `sup_s sigma_1(C (i s I - A)^{-1} B + D)` of a stable
//! continuous-time system.

use num_complex::Complex64;

use super::{require_finite, require_square, sval_sample, DistanceResult};
use crate::envelope1d::maximize_1d;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, identity, norm2, sigma_min, CMatrix, I};

/// `x' = A x + B u`, `y = C x + D u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LTISystem {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
}

impl LTISystem {
    pub fn new(a: CMatrix, b: CMatrix, c: CMatrix, d: CMatrix) -> Result<Self> {
        require_square(&a, "A")?;
        let n = a.nrows();
        let (m, p) = (b.ncols(), c.nrows());
        if b.nrows() != n || c.ncols() != n || d.shape() != (p, m) {
            return Err(Error::DimensionMismatch(format!(
                "A is {n}x{n}, B {}x{}, C {}x{}, D {}x{}; need B n x m, C p x n, D p x m",
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols(),
                d.nrows(),
                d.ncols()
            )));
        }
        for (m, name) in [(&a, "A"), (&b, "B"), (&c, "C"), (&d, "D")] {
            require_finite(m, name)?;
        }
        Ok(Self { a, b, c, d })
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    /// Largest real part of the eigenvalues of `A`.
    pub fn spectral_abscissa(&self) -> Result<f64> {
        Ok(eigenvalues(&self.a)?
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// `(G(s), G'(s))` for the transfer function on the imaginary axis.
    pub fn transfer(&self, s: f64) -> Result<(CMatrix, CMatrix)> {
        let n = self.order();
        let resolvent = identity(n) * (I * s) - &self.a;
        let lu = resolvent.lu();
        let x = lu
            .solve(&self.b)
            .ok_or_else(|| Error::Internal(format!("i s I - A is singular at s = {s}")))?;
        let x2 = lu.solve(&x).expect("same factorization");
        let g = &self.c * &x + &self.d;
        let dg = (&self.c * x2) * Complex64::new(0.0, -1.0);
        Ok((g, dg))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HinfOptions {
    pub eps: f64,
    /// Defaults to `1 / sigma_min(A)`.
    pub gamma: Option<f64>,
    /// Defaults to `[-10(1 + |A|), 10(1 + |A|)]`, a heuristic: the supremum
    /// can lie outside any finite interval.
    pub interval: Option<(f64, f64)>,
    pub max_iter: usize,
}

impl HinfOptions {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            gamma: None,
            interval: None,
            max_iter: 10_000,
        }
    }
}

/// Maximizes the largest singular value of the transfer function over the
/// interval. The value at infinity, `|D|_2`, is taken into account.
pub fn hinf_norm(sys: &LTISystem, opts: &HinfOptions) -> Result<DistanceResult> {
    let abscissa = sys.spectral_abscissa()?;
    if abscissa >= 0.0 {
        return Err(Error::UnstableSystem {
            max_real_part: abscissa,
        });
    }
    let at_infinity = norm2(&sys.d);
    if sys.b.iter().all(|z| *z == Complex64::new(0.0, 0.0)) || sys.c.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        // G(s) = D for every s
        return Ok(DistanceResult {
            value: at_infinity,
            argmin: vec![0.0],
            lower: at_infinity,
            upper: at_infinity,
            inner: None,
            status: crate::result::Status::Converged,
            evaluations: 0,
            vertex_computations: 0,
            gamma: opts.gamma.unwrap_or(0.0),
            gamma_violated: false,
            history: Vec::new(),
        });
    }
    let norm_a = norm2(&sys.a);
    let (lo, hi) = opts.interval.unwrap_or_else(|| {
        let r = 10.0 * (1.0 + norm_a);
        (-r, r)
    });
    let gamma = opts.gamma.unwrap_or_else(|| 1.0 / sigma_min(&sys.a));
    let sample = |s: f64| {
        let (g, dg) = sys.transfer(s)?;
        sval_sample(&g, &dg, 1, s)
    };
    let r = maximize_1d(sample, lo, hi, gamma, opts.eps, opts.max_iter)?;
    let mut out = DistanceResult::from_opt(r, gamma);
    if at_infinity > out.value {
        out.value = at_infinity;
        out.argmin = vec![f64::INFINITY];
    }
    out.lower = out.lower.max(at_infinity);
    out.upper = out.upper.max(at_infinity);
    Ok(out)
}
