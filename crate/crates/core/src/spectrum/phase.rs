//! Band functions `k_j : [−π, 0] → I_j`, the inverse of `Θ` on each band.

use serde::Serialize;

use super::{bracketed_newton, Band, BandStructure};
use crate::error::{Error, Result};
use crate::transfer::MonodromyData;

/// `k`, `k'`, `k''`, `k'''` at one value of `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseDerivatives {
    pub k: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// `k_j(φ)` solves `Δ(k) = 2cos φ` inside band `j`.
///
/// At `φ = 0` and `φ = −π` the band edge is returned exactly. Values of `φ`
/// slightly outside `[−π, 0]` are accepted and give the even continuation
/// across a gapped edge.
#[derive(Debug, Clone, Copy)]
pub struct PhaseFunction<'a> {
    mono: &'a MonodromyData,
    band: Band,
}

impl<'a> PhaseFunction<'a> {
    /// `j` is 1-based.
    pub fn new(mono: &'a MonodromyData, bands: &BandStructure, j: usize) -> Result<Self> {
        Ok(Self { mono, band: *bands.band(j)? })
    }

    pub fn band(&self) -> &Band {
        &self.band
    }

    fn is_zero_end(phi: f64) -> bool {
        phi == 0.0
    }

    fn is_pi_end(phi: f64) -> bool {
        phi == -std::f64::consts::PI
    }

    pub fn k(&self, phi: f64) -> f64 {
        let band = &self.band;
        if Self::is_zero_end(phi) {
            return band.edge_at_zero();
        }
        if Self::is_pi_end(phi) {
            return band.edge_at_minus_pi();
        }
        let target = 2.0 * phi.cos();
        let (mid, half) = (0.5 * (band.lo + band.hi), 0.5 * (band.hi - band.lo));
        let guess = mid + f64::from(band.orientation()) * half * phi.cos();
        // widen gapped ends slightly so that continued arguments stay
        // bracketed; a closed-gap end borders the next band and stays put
        let pad = 1e-3 * half;
        let lo = if band.lo_gapped { band.lo - pad } else { band.lo };
        let hi = if band.hi_gapped { band.hi + pad } else { band.hi };
        let mono = self.mono;
        let f = |x: f64| {
            let d = mono.delta_derivatives(x, 1);
            (d[0] - target, d[1])
        };
        let (flo, fhi) = (f(lo).0, f(hi).0);
        if flo.signum() == fhi.signum() {
            // target beyond the reach of the padded band: clamp to the edge
            return if flo.abs() < fhi.abs() { lo } else { hi };
        }
        bracketed_newton(f, lo, hi, guess)
    }

    /// Inverse of `k` on the band: `Θ(x) = −arccos(Δ(x)/2)`.
    pub fn theta(&self, x: f64) -> Result<f64> {
        if !self.band.contains(x, super::EDGE_CLAMP_TOL) {
            return Err(Error::OutsideSpectrum { x });
        }
        Ok(-(self.mono.delta(x.clamp(self.band.lo, self.band.hi)) / 2.0).clamp(-1.0, 1.0).acos())
    }

    /// Whether `φ` is an edge of the band where the adjacent gap is closed.
    fn ungapped_end(&self, phi: f64) -> bool {
        (Self::is_zero_end(phi) && !self.band.gapped_at_zero())
            || (Self::is_pi_end(phi) && !self.band.gapped_at_minus_pi())
    }

    fn gapped_end(&self, phi: f64) -> bool {
        (Self::is_zero_end(phi) && self.band.gapped_at_zero())
            || (Self::is_pi_end(phi) && self.band.gapped_at_minus_pi())
    }

    /// `k`, `k'`, `k''`; finite everywhere on `[−π, 0]`.
    pub fn low_derivatives(&self, phi: f64) -> (f64, f64, f64) {
        let k = self.k(phi);
        let d = self.mono.delta_derivatives(k, 3);
        let (s, c) = phi.sin_cos();
        if self.ungapped_end(phi) {
            let d1 = f64::from(self.band.orientation()) * (-2.0 * c / d[2]).sqrt();
            let d2 = -d1 * d1 * d1 * d[3] / (3.0 * d[2]);
            return (k, d1, d2);
        }
        let d1 = if self.gapped_end(phi) { 0.0 } else { -2.0 * s / d[1] };
        let d2 = (-2.0 * c - d[2] * d1 * d1) / d[1];
        (k, d1, d2)
    }

    pub fn d1(&self, phi: f64) -> f64 {
        self.low_derivatives(phi).1
    }

    pub fn d2(&self, phi: f64) -> f64 {
        self.low_derivatives(phi).2
    }

    /// `k'''(φ)`. Fails at an edge where the neighbouring gap is closed.
    pub fn d3(&self, phi: f64) -> Result<f64> {
        self.derivatives(phi).map(|d| d.d3)
    }

    pub fn derivatives(&self, phi: f64) -> Result<PhaseDerivatives> {
        if self.ungapped_end(phi) {
            return Err(Error::DerivativeSingularity { band: self.band.index, phi, order: 3 });
        }
        let (k, d1, d2) = self.low_derivatives(phi);
        let d = self.mono.delta_derivatives(k, 3);
        let s = if self.gapped_end(phi) { 0.0 } else { phi.sin() };
        let d3 = (2.0 * s - d[3] * d1 * d1 * d1 - 3.0 * d[2] * d1 * d2) / d[1];
        Ok(PhaseDerivatives { k, d1, d2, d3 })
    }

    /// `max |k'|` over a uniform grid of `n + 1` points.
    pub fn max_speed(&self, n: usize) -> f64 {
        let pi = std::f64::consts::PI;
        (0..=n).map(|i| self.d1(-pi + pi * i as f64 / n as f64).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::JacobiOperator;
    use crate::spectrum::band_structure;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn setup(a: &[f64], b: &[f64]) -> (MonodromyData, BandStructure) {
        let m = MonodromyData::new(&JacobiOperator::new(a.to_vec(), b.to_vec()).unwrap());
        let bs = band_structure(&m).unwrap();
        (m, bs)
    }

    #[test]
    fn laplacian_phase_is_two_cos() {
        let (m, bs) = setup(&[1.0], &[0.0]);
        let k = PhaseFunction::new(&m, &bs, 1).unwrap();
        assert_eq!(k.k(0.0), 2.0);
        assert_eq!(k.k(-PI), -2.0);
        for i in 0..=40 {
            let phi = -PI + PI * i as f64 / 40.0;
            let d = k.derivatives(phi).unwrap();
            assert_abs_diff_eq!(d.k, 2.0 * phi.cos(), epsilon = 1e-13);
            assert_abs_diff_eq!(d.d1, -2.0 * phi.sin(), epsilon = 1e-12);
            assert_abs_diff_eq!(d.d2, -2.0 * phi.cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(d.d3, 2.0 * phi.sin(), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(k.d2(0.0), -2.0, epsilon = 1e-15);
        assert_eq!(k.d1(0.0), 0.0);
        assert_abs_diff_eq!(k.theta(k.k(-1.0)).unwrap(), -1.0, epsilon = 1e-13);
    }

    #[test]
    fn ssh_phase_values() {
        let (m, bs) = setup(&[1.0, 2.0], &[0.0, 0.0]);
        let upper = PhaseFunction::new(&m, &bs, 2).unwrap();
        assert_abs_diff_eq!(upper.k(-FRAC_PI_2), 5f64.sqrt(), epsilon = 1e-13);
        assert_eq!(upper.k(0.0), 3.0);
        let lower = PhaseFunction::new(&m, &bs, 1).unwrap();
        assert_abs_diff_eq!(lower.k(-FRAC_PI_2), -(5f64.sqrt()), epsilon = 1e-13);
        assert_eq!(lower.k(0.0), -3.0);
        // Δ = (x² − 5)/2 so k(φ) = ±sqrt(5 + 4cos φ)
        for &phi in &[-3.0, -2.0, -0.5] {
            let want = (5.0 + 4.0 * f64::cos(phi)).sqrt();
            assert_abs_diff_eq!(upper.k(phi), want, epsilon = 1e-13);
            let d1 = -2.0 * f64::sin(phi) / want;
            assert_abs_diff_eq!(upper.d1(phi), d1, epsilon = 1e-12);
        }
        assert!(PhaseFunction::new(&m, &bs, 3).is_err());
    }

    #[test]
    fn gapped_endpoint_second_derivative() {
        let (m, bs) = setup(&[0.9, 1.4, 1.1], &[0.3, -0.2, 0.5]);
        for j in 1..=3 {
            let k = PhaseFunction::new(&m, &bs, j).unwrap();
            let dz = m.delta_derivatives(k.k(0.0), 1)[1];
            assert_abs_diff_eq!(k.d2(0.0), -2.0 / dz, epsilon = 1e-12 * (1.0 + 1.0 / dz.abs()));
            assert_eq!(k.derivatives(0.0).unwrap().d3, 0.0);
        }
    }

    #[test]
    fn closed_gap_edge_is_singular_for_third_derivative() {
        let (m, bs) = setup(&[6.0, 9.0, 6.0], &[0.0, -5.0, -5.0]);
        let j = (0..2).find(|&j| !bs.bands[j].hi_gapped).unwrap() + 1;
        let k = PhaseFunction::new(&m, &bs, j).unwrap();
        let phi = if k.band().gapped_at_zero() { -PI } else { 0.0 };
        assert!(matches!(k.d3(phi), Err(Error::DerivativeSingularity { order: 3, .. })));
        // k' is finite and matches a one-sided difference
        let h = 1e-6;
        let inner = if phi == 0.0 { -h } else { -PI + h };
        let fd = (k.k(phi) - k.k(inner)) / (phi - inner);
        assert_abs_diff_eq!(k.d1(phi), fd, epsilon = 1e-3 * (1.0 + fd.abs()));
    }
}
