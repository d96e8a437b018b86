//! Seeded test matrices.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::CMatrix;

/// Real matrix with independent standard normal entries.
pub fn gaussian(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CMatrix::from_fn(rows, cols, |_, _| {
        let x: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(x, 0.0)
    })
}

/// Complex matrix whose real and imaginary parts are independent
/// `N(0, 1/2)`, so entries have unit variance.
pub fn complex_gaussian(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(s * re, s * im)
    })
}

/// Five-point finite-difference Laplacian on a `k x k` grid (order `k^2`)
/// when `n = k^2`, otherwise the three-point one on a line of `n` points.
pub fn poisson(n: usize) -> CMatrix {
    let k = (n as f64).sqrt().round() as usize;
    let mut p = CMatrix::zeros(n, n);
    if k * k == n && k > 1 {
        for i in 0..k {
            for j in 0..k {
                let r = i * k + j;
                p[(r, r)] = Complex64::new(4.0, 0.0);
                if j + 1 < k {
                    p[(r, r + 1)] = Complex64::new(-1.0, 0.0);
                    p[(r + 1, r)] = Complex64::new(-1.0, 0.0);
                }
                if i + 1 < k {
                    p[(r, r + k)] = Complex64::new(-1.0, 0.0);
                    p[(r + k, r)] = Complex64::new(-1.0, 0.0);
                }
            }
        }
    } else {
        for r in 0..n {
            p[(r, r)] = Complex64::new(2.0, 0.0);
            if r + 1 < n {
                p[(r, r + 1)] = Complex64::new(-1.0, 0.0);
                p[(r + 1, r)] = Complex64::new(-1.0, 0.0);
            }
        }
    }
    p
}

/// `P_n - (n/20) i R_n` with `P_n` from [`poisson`] and `R_n` standard
/// normal. Its numerical-radius function has many local maxima.
pub fn poisson_random(n: usize, seed: u64) -> CMatrix {
    let r = gaussian(n, n, seed);
    poisson(n) - r * Complex64::new(0.0, n as f64 / 20.0)
}

/// Banded Toeplitz matrix; `bands` lists `(offset, value)` with positive
/// offsets above the diagonal.
pub fn toeplitz(n: usize, bands: &[(isize, f64)]) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        let off = j as isize - i as isize;
        bands
            .iter()
            .find(|(o, _)| *o == off)
            .map_or(Complex64::new(0.0, 0.0), |(_, v)| Complex64::new(*v, 0.0))
    })
}

/// The 5x5 penta-diagonal Toeplitz matrix with bands `1, -10, 0, 10, 1` from
/// the second subdiagonal to the second superdiagonal.
pub fn pentadiagonal_example() -> CMatrix {
    toeplitz(5, &[(-2, 1.0), (-1, -10.0), (0, 0.0), (1, 10.0), (2, 1.0)])
}

/// Random stable matrix: a Gaussian matrix shifted left by its spectral
/// abscissa plus `margin`.
pub fn stable_gaussian(n: usize, seed: u64, margin: f64) -> CMatrix {
    let a = gaussian(n, n, seed);
    let abscissa = crate::linalg::eigenvalues(&a)
        .expect("eigenvalues of a random matrix")
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let shift = abscissa + margin;
    let mut out = a;
    for k in 0..n {
        out[(k, k)] -= Complex64::new(shift, 0.0);
    }
    out
}
