//! Periodic Jacobi operators on the half-line and their finite truncations.
//!
//! Sites are numbered from 1, as are the coefficients `a_n` and `b_n`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Operator config file contents: `{"a": [...], "b": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorConfig {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// A real symmetric tridiagonal operator with positive off-diagonal `a_n` and
/// diagonal `b_n`, both periodic with minimal period `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiOperator {
    a: Vec<f64>,
    b: Vec<f64>,
    /// Length of the coefficient lists as given, when longer than the
    /// minimal period.
    reduced_from: Option<usize>,
}

impl JacobiOperator {
    /// Builds the operator, reducing the input to its minimal period.
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        if a.len() != b.len() {
            return Err(Error::LengthMismatch { a: a.len(), b: b.len() });
        }
        if let Some((i, &v)) = a.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::NonPositiveHopping { index: i + 1, value: v });
        }
        if let Some(v) = b.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("diagonal entry {v} is not finite")));
        }
        if let Some(v) = a.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("hopping entry {v} is not finite")));
        }

        let given = a.len();
        let q = minimal_period(&a, &b);
        let reduced_from = (q < given).then_some(given);
        let (mut a, mut b) = (a, b);
        a.truncate(q);
        b.truncate(q);
        Ok(Self { a, b, reduced_from })
    }

    pub fn from_config(config: &OperatorConfig) -> Result<Self> {
        Self::new(config.a.clone(), config.b.clone())
    }

    pub fn config(&self) -> OperatorConfig {
        OperatorConfig { a: self.a.clone(), b: self.b.clone() }
    }

    /// The free discrete Laplacian, `a_n = 1`, `b_n = 0`.
    pub fn laplacian() -> Self {
        Self::new(vec![1.0], vec![0.0]).expect("valid coefficients")
    }

    /// Minimal period.
    pub fn period(&self) -> usize {
        self.a.len()
    }

    /// Hopping `a_n` for `n ≥ 1`, extended periodically.
    #[inline]
    pub fn a(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        self.a[(n - 1) % self.a.len()]
    }

    /// Diagonal `b_n` for `n ≥ 1`, extended periodically.
    #[inline]
    pub fn b(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        self.b[(n - 1) % self.b.len()]
    }

    pub fn hopping(&self) -> &[f64] {
        &self.a
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.b
    }

    pub fn reduced_from(&self) -> Option<usize> {
        self.reduced_from
    }

    /// Human-readable note recorded when the input period was not minimal.
    pub fn reduction_notice(&self) -> Option<String> {
        self.reduced_from.map(|given| {
            format!("coefficient lists of length {given} are periodic with minimal period {}; reduced", self.period())
        })
    }

    /// `max |b_n| + 2 max a_n`, an upper bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        let bmax = self.b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let amax = self.a.iter().fold(0.0_f64, |m, v| m.max(*v));
        bmax + 2.0 * amax
    }

    /// Applies `J` to a finitely supported vector. The result has one more
    /// site than the input.
    pub fn apply(&self, v: &FiniteState) -> FiniteState {
        let len = v.len();
        if len == 0 {
            return FiniteState::zeros(0);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); len + 1];
        for n in 1..=len + 1 {
            let mut acc = Complex64::new(0.0, 0.0);
            if n >= 2 {
                acc += v.values[n - 2] * self.a(n - 1);
            }
            if n <= len {
                acc += v.values[n - 1] * self.b(n);
            }
            if n < len {
                acc += v.values[n] * self.a(n);
            }
            out[n - 1] = acc;
        }
        FiniteState { values: out }
    }

    /// Real-valued counterpart of [`apply`](Self::apply) used by the moment
    /// oracle.
    pub fn apply_real(&self, v: &[f64]) -> Vec<f64> {
        let len = v.len();
        if len == 0 {
            return Vec::new();
        }
        (1..=len + 1)
            .map(|n| {
                let mut acc = 0.0;
                if n >= 2 {
                    acc += self.a(n - 1) * v[n - 2];
                }
                if n <= len {
                    acc += self.b(n) * v[n - 1];
                }
                if n < len {
                    acc += self.a(n) * v[n];
                }
                acc
            })
            .collect()
    }

    /// `(J^k)_{11}`, computed by `k` applications to `δ_1`.
    pub fn moment_exact(&self, k: usize) -> f64 {
        let mut v = vec![1.0];
        for _ in 0..k {
            v = self.apply_real(&v);
        }
        v[0]
    }

    /// The `N × N` upper-left block of `J`.
    pub fn truncate(&self, size: usize) -> SymTridiagonal {
        assert!(size >= 1, "truncation size must be positive");
        SymTridiagonal { diag: (1..=size).map(|n| self.b(n)).collect(), off: (1..size).map(|n| self.a(n)).collect() }
    }
}

fn minimal_period(a: &[f64], b: &[f64]) -> usize {
    let len = a.len();
    (1..=len)
        .filter(|d| len.is_multiple_of(*d))
        .find(|&d| (0..len).all(|i| a[i] == a[i % d] && b[i] == b[i % d]))
        .unwrap_or(len)
}

/// A finitely supported state; `values[0]` is site 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteState {
    values: Vec<Complex64>,
}

impl FiniteState {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self { values: values.iter().map(|&v| Complex64::new(v, 0.0)).collect() }
    }

    pub fn zeros(len: usize) -> Self {
        Self { values: vec![Complex64::new(0.0, 0.0); len] }
    }

    /// The unit vector `δ_site`.
    pub fn delta(site: usize) -> Self {
        assert!(site >= 1, "sites are numbered from 1");
        let mut s = Self::zeros(site);
        s.values[site - 1] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Amplitude at `site` (1-based); zero outside the stored range.
    pub fn site(&self, site: usize) -> Complex64 {
        if site == 0 || site > self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[site - 1]
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn norm_l2(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &FiniteState) -> Complex64 {
        self.values.iter().zip(&other.values).map(|(x, y)| x.conj() * y).sum()
    }

    /// Pads with zeros up to `len` sites.
    pub fn padded(&self, len: usize) -> Self {
        let mut values = self.values.clone();
        if values.len() < len {
            values.resize(len, Complex64::new(0.0, 0.0));
        }
        Self { values }
    }
}

/// Symmetric tridiagonal matrix stored as diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, &a) in self.off.iter().enumerate() {
            m[(i, i + 1)] = a;
            m[(i + 1, i)] = a;
        }
        m
    }

    /// `out[0..len] = M v[0..len]`, restricted to the first `len` rows.
    /// Entries of `v` past `len` are treated as zero.
    pub fn mul_into(&self, v: &[Complex64], out: &mut [Complex64], len: usize) {
        let n = self.size();
        let len = len.min(n);
        for i in 0..len {
            let mut acc = v[i] * self.diag[i];
            if i > 0 {
                acc += v[i - 1] * self.off[i - 1];
            }
            if i + 1 < len {
                acc += v[i + 1] * self.off[i];
            }
            out[i] = acc;
        }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.size()];
        let mut padded = v.to_vec();
        padded.resize(self.size(), Complex64::new(0.0, 0.0));
        self.mul_into(&padded, &mut out, self.size());
        out
    }

    /// All eigenvalues, ascending (dense solver; meant for modest sizes).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.to_dense().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Solves `(M − shift) x = rhs` by Gaussian elimination with partial
    /// pivoting. Zero pivots are replaced by a tiny multiple of the matrix
    /// scale, which is what inverse iteration wants.
    pub fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.size();
        assert_eq!(rhs.len(), n);
        let scale = self
            .diag
            .iter()
            .map(|d| (d - shift).abs())
            .chain(self.off.iter().map(|a| a.abs()))
            .fold(f64::MIN_POSITIVE, f64::max);
        let tiny = scale * f64::EPSILON * 1e-3;

        // Row i holds (d_i, u_i, w_i) at columns i, i+1, i+2 after pivoting.
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - shift).collect();
        let mut u: Vec<f64> = (0..n).map(|i| if i + 1 < n { self.off[i] } else { 0.0 }).collect();
        let mut w = vec![0.0; n];
        let mut l: Vec<f64> = (0..n).map(|i| if i >= 1 { self.off[i - 1] } else { 0.0 }).collect();
        let mut b = rhs.to_vec();

        for i in 0..n.saturating_sub(1) {
            let sub = l[i + 1];
            if sub.abs() > d[i].abs() {
                // swap rows i and i+1
                let (di, ui, wi, bi) = (d[i], u[i], w[i], b[i]);
                d[i] = sub;
                u[i] = d[i + 1];
                w[i] = u[i + 1];
                b[i] = b[i + 1];
                let f = di / d[i];
                d[i + 1] = ui - f * u[i];
                u[i + 1] = wi - f * w[i];
                b[i + 1] = bi - f * b[i];
            } else {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let f = sub / d[i];
                d[i + 1] -= f * u[i];
                u[i + 1] -= f * w[i];
                b[i + 1] -= f * b[i];
            }
            l[i + 1] = 0.0;
        }
        if n > 0 && d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = b[i];
            if i + 1 < n {
                acc -= u[i] * x[i + 1];
            }
            if i + 2 < n {
                acc -= w[i] * x[i + 2];
            }
            x[i] = acc / d[i];
        }
        x
    }

    /// Normalized eigenvector for the eigenvalue nearest `shift`, by inverse
    /// iteration from `start`. Returns `(eigenvalue, vector)`; the vector's
    /// sign is fixed so that its overlap with `start` is nonnegative.
    pub fn eigenpair_near(&self, shift: f64, start: &[f64]) -> (f64, Vec<f64>) {
        let normalize = |v: &mut Vec<f64>| {
            let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= nrm);
        };
        let mut v = start.to_vec();
        v.resize(self.size(), 0.0);
        normalize(&mut v);
        for _ in 0..4 {
            v = self.solve_shifted(shift, &v);
            normalize(&mut v);
        }
        let mv: Vec<f64> =
            self.mul_vec(&v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>()).iter().map(|z| z.re).collect();
        let lambda: f64 = v.iter().zip(&mv).map(|(a, b)| a * b).sum();
        let overlap: f64 = v.iter().zip(start).map(|(a, b)| a * b).sum();
        if overlap < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        (lambda, v)
    }
}
