//! Chebyshev interpolation on `[−1, 1]` and colleague-matrix root finding.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Chebyshev points of the first kind, `cos((2j+1)π/(2n))`, `j = 0..n`.
pub fn points(n: usize) -> Vec<f64> {
    (0..n).map(|j| ((2 * j + 1) as f64 * PI / (2 * n) as f64).cos()).collect()
}

/// Coefficients `c_0..c_{n−1}` of the degree `< n` interpolant through
/// samples taken at [`points(n)`](points).
pub fn coefficients_from_samples(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    (0..n)
        .map(|k| {
            let s: f64 = samples
                .iter()
                .enumerate()
                .map(|(j, f)| f * (k as f64 * (2 * j + 1) as f64 * PI / (2 * n) as f64).cos())
                .sum();
            if k == 0 {
                s / n as f64
            } else {
                2.0 * s / n as f64
            }
        })
        .collect()
}

/// Interpolates `f` on `[−radius, radius]` with `n` points.
pub fn interpolate(f: impl Fn(f64) -> f64, n: usize, radius: f64) -> Vec<f64> {
    let samples: Vec<f64> = points(n).into_iter().map(|y| f(radius * y)).collect();
    coefficients_from_samples(&samples)
}

/// Clenshaw evaluation of `Σ c_k T_k(y)`.
pub fn evaluate(coeffs: &[f64], y: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * y * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    coeffs.first().copied().unwrap_or(0.0) + y * b1 - b2
}

/// Monomial leading coefficient of `T_n`.
pub fn leading_monomial(n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        2f64.powi(n as i32 - 1)
    }
}

/// Roots in `y` of `Σ_{k≤deg} c_k T_k(y)`, as eigenvalues of the colleague
/// matrix. Coefficients above `deg` are ignored.
pub fn colleague_roots(coeffs: &[f64], deg: usize) -> Vec<Complex64> {
    let c = &coeffs[..=deg.min(coeffs.len() - 1)];
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    if n == 1 {
        return vec![Complex64::new(-c[0] / lead, 0.0)];
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    m[(0, 1)] = 1.0;
    for i in 1..n - 1 {
        m[(i, i - 1)] = 0.5;
        m[(i, i + 1)] = 0.5;
    }
    m[(n - 1, n - 2)] += 0.5;
    for k in 0..n {
        m[(n - 1, k)] -= c[k] / (2.0 * lead);
    }
    m.complex_eigenvalues().iter().copied().collect()
}
