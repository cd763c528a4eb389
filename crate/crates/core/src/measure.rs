//! The spectral measure `μ` of `δ_1`: an absolutely continuous part on the
//! bands plus point masses at the eigenvalues.
//!
//! Integrals over a band are computed in the phase variable, where the
//! density times `|k'|` becomes `2 sin²φ / (π |t21(k)| |Δ'(k)|)`, a smooth
//! function free of edge singularities.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::JacobiOperator;
use crate::polynomials::poly_recurrence;
use crate::quadrature::GaussLegendre;
use crate::spectrum::{BandStructure, EigenvalueInfo, PhaseFunction};
use crate::transfer::{transfer_matrix, MonodromyData};

/// Gauss–Legendre nodes per band for measure integrals.
pub const BAND_NODES: usize = 256;

/// `w(x) = sqrt(4 − Δ²) / (2π |t21|)` on the bands.
pub fn density(mono: &MonodromyData, bands: &BandStructure, x: f64) -> Result<f64> {
    if bands.band_of(x).is_none() {
        return Err(Error::OutsideSpectrum { x });
    }
    let t = mono.matrix(x);
    let delta = t.trace();
    Ok((4.0 - delta * delta).max(0.0).sqrt() / (2.0 * std::f64::consts::PI * t.m21.abs()))
}

/// Weight of `μ` at an eigenvalue `E`: `1 / Σ p_n(E)²`.
///
/// The tail is summed through `p_{sq+r} = t11^s p_r`, which holds whenever
/// `t21(E) = 0` and avoids running the unstable recurrence into the gap.
pub fn point_mass(op: &JacobiOperator, e: f64) -> Result<f64> {
    let q = op.period();
    let t = transfer_matrix(op, q, e);
    let scale = t.max_abs().max(1.0);
    if t.m21.abs() > 1e-8 * scale || !(t.m11.abs() < 1.0) {
        return Err(Error::DivergentNormSum { value: e });
    }
    let p = poly_recurrence(op, e, q - 1);
    let block: f64 = p.iter().map(|v| v * v).sum();
    let ratio = t.m11 * t.m11;
    // geometric series Σ_s ratio^s
    Ok((1.0 - ratio) / block)
}

/// One node of the continuous part: abscissa, band, phase and weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureNode {
    pub x: f64,
    pub band: usize,
    pub phi: f64,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct SpectralMeasure {
    op: JacobiOperator,
    nodes: Vec<MeasureNode>,
    masses: Vec<EigenvalueInfo>,
}

impl SpectralMeasure {
    pub fn new(mono: &MonodromyData, bands: &BandStructure, eigenvalues: &[EigenvalueInfo]) -> Self {
        let rule = GaussLegendre::new(BAND_NODES);
        let pi = std::f64::consts::PI;
        let mut nodes = Vec::with_capacity(BAND_NODES * bands.period());
        for j in 1..=bands.period() {
            let k = PhaseFunction::new(mono, bands, j).expect("band index in range");
            for (phi, w) in rule.mapped(-pi, 0.0) {
                nodes.push(MeasureNode { x: k.k(phi), band: j, phi, weight: w * phase_weight(mono, &k, phi) });
            }
        }
        Self { op: mono.operator().clone(), nodes, masses: eigenvalues.to_vec() }
    }

    pub fn nodes(&self) -> &[MeasureNode] {
        &self.nodes
    }

    pub fn point_masses(&self) -> &[EigenvalueInfo] {
        &self.masses
    }

    pub fn continuous_mass(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.continuous_mass() + self.masses.iter().map(|m| m.weight).sum::<f64>()
    }

    /// `∫ f dμ`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let ac: f64 = self.nodes.iter().map(|n| n.weight * f(n.x)).sum();
        let pp: f64 = self.masses.iter().map(|m| m.weight * f(m.value)).sum();
        ac + pp
    }

    /// `∫ x^k dμ`.
    pub fn moment(&self, k: usize) -> f64 {
        self.integrate(|x| x.powi(k as i32))
    }

    /// `G_{nm} = ∫ p_n p_m dμ` for `n, m ≤ max_degree`.
    pub fn gram(&self, max_degree: usize) -> Vec<Vec<f64>> {
        let size = max_degree + 1;
        let mut g = vec![vec![0.0; size]; size];
        let points = self.nodes.iter().map(|n| (n.x, n.weight)).chain(self.masses.iter().map(|m| (m.value, m.weight)));
        for (x, w) in points {
            let p = poly_recurrence(&self.op, x, max_degree);
            for i in 0..size {
                for j in i..size {
                    g[i][j] += w * p[i] * p[j];
                }
            }
        }
        for i in 1..size {
            let (upper, lower) = g.split_at_mut(i);
            for (j, row) in upper.iter().enumerate() {
                lower[0][j] = row[i];
            }
        }
        g
    }

    /// `max |G_{nm} − δ_{nm}|`.
    pub fn orthonormality_defect(&self, max_degree: usize) -> f64 {
        let g = self.gram(max_degree);
        let mut worst: f64 = 0.0;
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }
}

/// `w(k(φ)) |k'(φ)|` written without the cancelling square roots.
pub fn phase_weight(mono: &MonodromyData, k: &PhaseFunction<'_>, phi: f64) -> f64 {
    let x = k.k(phi);
    let c = mono.taylor(x, 1);
    let dz = c[1].trace();
    let s = phi.sin();
    let w = 2.0 * s * s / (std::f64::consts::PI * c[0].m21.abs() * dz.abs());
    if w.is_finite() {
        w
    } else {
        0.0
    }
}

/// Samples of the density on a uniform grid of `n` points per band, as
/// `(x, band, w)` rows.
pub fn density_grid(mono: &MonodromyData, bands: &BandStructure, n: usize) -> Vec<(f64, usize, f64)> {
    let mut rows = Vec::with_capacity(n * bands.period());
    for band in &bands.bands {
        for i in 0..n {
            let x = if n == 1 {
                0.5 * (band.lo + band.hi)
            } else {
                band.lo + (band.hi - band.lo) * i as f64 / (n - 1) as f64
            };
            let w = density(mono, bands, x).unwrap_or(0.0);
            rows.push((x, band.index, w));
        }
    }
    rows
}
