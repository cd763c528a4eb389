//! Reference propagator: Chebyshev expansion of `e^{−itM}` on a truncation
//! `M` of `J` large enough that the wavefront never reaches its far end.

use num_complex::Complex64;

use super::bessel::bessel_j_sequence;
use crate::error::{Error, Result};
use crate::model::SpectralModel;
use crate::operator::{FiniteState, SymTridiagonal};

/// Default cap on the truncation size.
pub const DEFAULT_TRUNCATION_CAP: usize = 2_000_000;
/// Sites past the light cone kept as a reflection buffer.
pub const BUFFER: usize = 64;

/// Truncation size used for `t` and `n_max`. Eigenvectors must also decay
/// below 1e-14 inside the truncation, or its eigenpairs drift from the
/// infinite-volume ones.
pub fn truncation_size(model: &SpectralModel, support: usize, t: f64, n_max: usize) -> usize {
    let bound_states =
        model.eigenvalues.iter().map(|ev| super::eigenvector(model, ev.value, ev.weight).len()).max().unwrap_or(0);
    n_max.max(support).max(bound_states) + 2 * (model.operator.norm_bound() * t).ceil() as usize + BUFFER
}

/// Removes the truncation's eigenvectors that sit at the infinite-volume
/// eigenvalues from `v`.
fn project_truncated(model: &SpectralModel, m: &SymTridiagonal, v: &mut [Complex64]) {
    let mut start = vec![0.0; m.size()];
    start[0] = 1.0;
    for ev in &model.eigenvalues {
        // The truncation may carry a far-end state nearly degenerate with
        // the true one. Shifting off E by a small fraction of the distance
        // to the bands amplifies both equally, so the start vector's
        // combination (the near-end state) survives, while band states
        // are still damped by 1e-4 per iteration.
        let gap = model.bands.edges.iter().map(|e| (e - ev.value).abs()).fold(f64::INFINITY, f64::min);
        let shift = ev.value + 1e-4 * gap;
        let (_, phi) = m.eigenpair_near(shift, &start);
        let c: Complex64 = phi.iter().zip(v.iter()).map(|(p, x)| x * p).sum();
        for (x, p) in v.iter_mut().zip(&phi) {
            *x -= c * p;
        }
    }
}

/// `e^{−itM} P u` restricted to sites `1..=n_max`.
pub fn evolve_oracle_with_cap(
    model: &SpectralModel,
    u: &FiniteState,
    t: f64,
    n_max: usize,
    cap: usize,
) -> Result<Vec<Complex64>> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be nonnegative, got {t}")));
    }
    let size = truncation_size(model, u.len(), t, n_max);
    if size > cap {
        return Err(Error::TruncationTooLarge { size, cap });
    }
    let m = model.operator.truncate(size);
    let mut v = u.padded(size).into_values();
    project_truncated(model, &m, &mut v);
    if t == 0.0 {
        v.truncate(n_max);
        v.resize(n_max, Complex64::new(0.0, 0.0));
        return Ok(v);
    }

    let nb = model.operator.norm_bound();
    let scale = 1.0 / nb;
    let coeffs = bessel_j_sequence(nb * t);

    // support of the projected vector, ignoring entries far below 1e-14
    let vmax = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut len = v.iter().rposition(|z| z.norm() > 1e-18 * vmax).map_or(1, |i| i + 1);

    let zero = Complex64::new(0.0, 0.0);
    v[len..].fill(zero);
    let mut out = vec![zero; n_max];
    let mut prev = v;
    let mut cur = vec![zero; size];
    let mut next = vec![zero; size];

    let add = |out: &mut [Complex64], w: &[Complex64], c: Complex64| {
        for (o, x) in out.iter_mut().zip(w) {
            *o += c * x;
        }
    };
    let minus_i_pow = |k: usize| match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    };

    add(&mut out, &prev[..n_max.min(size)], Complex64::new(coeffs[0], 0.0));
    if coeffs.len() > 1 {
        len = (len + 1).min(size);
        m.mul_into(&prev, &mut cur, len);
        cur[..len].iter_mut().for_each(|x| *x *= scale);
        add(&mut out, &cur[..n_max.min(size)], minus_i_pow(1) * (2.0 * coeffs[1]));
    }
    for (k, &jk) in coeffs.iter().enumerate().skip(2) {
        len = (len + 1).min(size);
        m.mul_into(&cur, &mut next, len);
        for i in 0..len {
            next[i] = 2.0 * scale * next[i] - prev[i];
        }
        add(&mut out, &next[..n_max.min(len)], minus_i_pow(k) * (2.0 * jk));
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(out)
}
