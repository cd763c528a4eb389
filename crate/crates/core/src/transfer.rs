//! Transfer matrices, the monodromy matrix and the discriminant.
//!
//! Everything here is evaluated pointwise by multiplying 2×2 matrices. The
//! Chebyshev coefficients kept in [`MonodromyData`] exist only to feed the
//! colleague-matrix root finder.

use std::ops::{Add, Mul, Sub};

use crate::chebyshev;
use crate::error::{Error, Result};
use crate::operator::JacobiOperator;
use crate::polynomials::rho_sequence;

/// Real 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { m11: 1.0, m12: 0.0, m21: 0.0, m22: 1.0 };
    pub const ZERO: Mat2 = Mat2 { m11: 0.0, m12: 0.0, m21: 0.0, m22: 0.0 };

    pub const fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.m11.abs().max(self.m12.abs()).max(self.m21.abs()).max(self.m22.abs())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, r: Mat2) -> Mat2 {
        Mat2 {
            m11: self.m11 * r.m11 + self.m12 * r.m21,
            m12: self.m11 * r.m12 + self.m12 * r.m22,
            m21: self.m21 * r.m11 + self.m22 * r.m21,
            m22: self.m21 * r.m12 + self.m22 * r.m22,
        }
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, r: Mat2) -> Mat2 {
        Mat2::new(self.m11 + r.m11, self.m12 + r.m12, self.m21 + r.m21, self.m22 + r.m22)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, r: Mat2) -> Mat2 {
        Mat2::new(self.m11 - r.m11, self.m12 - r.m12, self.m21 - r.m21, self.m22 - r.m22)
    }
}

/// One-step matrix `(1/a) [[x − b, −1], [a², 0]]`.
pub fn step_matrix(a: f64, b: f64, x: f64) -> Result<Mat2> {
    if !(a > 0.0) {
        return Err(Error::NonPositiveHopping { index: 0, value: a });
    }
    Ok(step_unchecked(a, b, x))
}

#[inline]
fn step_unchecked(a: f64, b: f64, x: f64) -> Mat2 {
    let inv = 1.0 / a;
    Mat2::new((x - b) * inv, -inv, a, 0.0)
}

/// `T_n(x) = A(a_n, b_n, x) ⋯ A(a_1, b_1, x)`, with `T_0 = I`.
pub fn transfer_matrix(op: &JacobiOperator, n: usize, x: f64) -> Mat2 {
    (1..=n).fold(Mat2::IDENTITY, |t, k| step_unchecked(op.a(k), op.b(k), x) * t)
}

/// Taylor coefficients of `h ↦ T_n(x + h)` up to degree `order`.
///
/// Each step matrix is affine in `x`, so the product rule closes exactly:
/// `c_k ← A c_k + A' c_{k−1}` with `A' = [[1/a, 0], [0, 0]]`.
pub fn transfer_taylor(op: &JacobiOperator, n: usize, x: f64, order: usize) -> Vec<Mat2> {
    let mut c = vec![Mat2::ZERO; order + 1];
    c[0] = Mat2::IDENTITY;
    for k in 1..=n {
        let (a, b) = (op.a(k), op.b(k));
        let step = step_unchecked(a, b, x);
        let inv = 1.0 / a;
        for d in (0..=order).rev() {
            let mut next = step * c[d];
            if d > 0 {
                // A' c_{d-1} only touches the first row
                next.m11 += inv * c[d - 1].m11;
                next.m12 += inv * c[d - 1].m12;
            }
            c[d] = next;
        }
    }
    c
}

/// Monodromy matrix `T_q` of a periodic operator with its discriminant.
#[derive(Debug, Clone)]
pub struct MonodromyData {
    op: JacobiOperator,
    radius: f64,
    /// Chebyshev coefficients on `[−R, R]` of t11, t12, t21, t22, Δ.
    cheb: [Vec<f64>; 5],
}

impl MonodromyData {
    pub fn new(op: &JacobiOperator) -> Self {
        let q = op.period();
        let radius = op.norm_bound() + 1.0;
        let values: Vec<(f64, Mat2)> =
            chebyshev::points(q + 1).into_iter().map(|y| (y, transfer_matrix(op, q, radius * y))).collect();
        let fit = |f: &dyn Fn(&Mat2) -> f64| {
            let samples: Vec<f64> = values.iter().map(|(_, m)| f(m)).collect();
            chebyshev::coefficients_from_samples(&samples)
        };
        let cheb = [fit(&|m| m.m11), fit(&|m| m.m12), fit(&|m| m.m21), fit(&|m| m.m22), fit(&|m| m.trace())];
        Self { op: op.clone(), radius, cheb }
    }

    pub fn operator(&self) -> &JacobiOperator {
        &self.op
    }

    pub fn period(&self) -> usize {
        self.op.period()
    }

    /// Half-width `R = norm_bound + 1` of the bracketing interval.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn matrix(&self, x: f64) -> Mat2 {
        transfer_matrix(&self.op, self.op.period(), x)
    }

    pub fn t11(&self, x: f64) -> f64 {
        self.matrix(x).m11
    }

    pub fn t12(&self, x: f64) -> f64 {
        self.matrix(x).m12
    }

    pub fn t21(&self, x: f64) -> f64 {
        self.matrix(x).m21
    }

    pub fn t22(&self, x: f64) -> f64 {
        self.matrix(x).m22
    }

    /// Discriminant `Δ(x) = tr T_q(x)`.
    pub fn delta(&self, x: f64) -> f64 {
        self.matrix(x).trace()
    }

    /// Taylor coefficients of `T_q(x + h)`.
    pub fn taylor(&self, x: f64, order: usize) -> Vec<Mat2> {
        transfer_taylor(&self.op, self.op.period(), x, order)
    }

    /// `[Δ(x), Δ'(x), …, Δ^{(order)}(x)]`.
    pub fn delta_derivatives(&self, x: f64, order: usize) -> Vec<f64> {
        let mut fact = 1.0;
        self.taylor(x, order)
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    fact *= k as f64;
                }
                fact * c.trace()
            })
            .collect()
    }

    /// Chebyshev coefficients on `[−R, R]`, in the order
    /// t11, t12, t21, t22, Δ.
    pub fn chebyshev_coefficients(&self) -> &[Vec<f64>; 5] {
        &self.cheb
    }

    pub fn delta_chebyshev(&self) -> &[f64] {
        &self.cheb[4]
    }

    pub fn t21_chebyshev(&self) -> &[f64] {
        &self.cheb[2]
    }

    /// `T_{sq}(x)` from the closed form
    /// `[[t11 ρ_s − ρ_{s−1}, t12 ρ_s], [t21 ρ_s, ρ_{s+1} − t11 ρ_s]]`,
    /// i.e. `T^s = ρ_s T − ρ_{s−1} I` by Cayley–Hamilton.
    pub fn power_via_rho(&self, s: usize, x: f64) -> Result<Mat2> {
        let t = self.matrix(x);
        let delta = t.trace();
        if !(delta.abs() < 2.0) {
            return Err(Error::OutsideBandInterior { x, abs_delta: delta.abs() });
        }
        if s == 0 {
            return Ok(Mat2::IDENTITY);
        }
        let rho = rho_sequence(delta, s + 1);
        let (prev, cur, next) = (rho[s - 1], rho[s], rho[s + 1]);
        Ok(Mat2::new(t.m11 * cur - prev, t.m12 * cur, t.m21 * cur, next - t.m11 * cur))
    }
}

/// Convenience wrapper matching [`MonodromyData::new`].
pub fn monodromy(op: &JacobiOperator) -> MonodromyData {
    MonodromyData::new(op)
}
