//! Band structure, critical points, point spectrum and the phase `Θ`.
//!
//! Band edges are the real roots of `Δ ∓ 2`, found as colleague-matrix
//! eigenvalues of the Chebyshev interpolant of `Δ` and polished by Newton's
//! method on the pointwise discriminant. Closed gaps show up as (numerically
//! split) double roots and are merged.

mod audit;
mod phase;

pub use audit::{stationary_audit, AuditReport, BandAudit, GlobalClass};
pub use phase::{PhaseDerivatives, PhaseFunction};

use serde::Serialize;

use crate::chebyshev;
use crate::error::{Error, Result};
use crate::measure::point_mass;
use crate::transfer::MonodromyData;

/// Roots whose colleague eigenvalue has imaginary part below this (in the
/// scaled variable) are taken as real.
const IMAG_TOL: f64 = 1e-6;
/// Gaps narrower than this are treated as closed.
pub const TOUCHING_TOL: f64 = 1e-7;
/// How far outside a band a point may lie and still be clamped onto it.
pub const EDGE_CLAMP_TOL: f64 = 1e-10;

/// One spectral band `I_j = [lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    /// 1-based band number, counted from the left.
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
    /// `Δ` increases across the band (`Δ(lo) = −2`, `Δ(hi) = 2`).
    pub increasing: bool,
    pub lo_gapped: bool,
    pub hi_gapped: bool,
}

impl Band {
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }

    /// Sign of `Δ'` on the band interior.
    pub fn orientation(&self) -> i8 {
        if self.increasing {
            1
        } else {
            -1
        }
    }

    /// The edge where `Δ = 2cos φ` for `φ = 0` (`Δ = 2`).
    pub fn edge_at_zero(&self) -> f64 {
        if self.increasing {
            self.hi
        } else {
            self.lo
        }
    }

    /// The edge where `Δ = −2` (`φ = −π`).
    pub fn edge_at_minus_pi(&self) -> f64 {
        if self.increasing {
            self.lo
        } else {
            self.hi
        }
    }

    pub fn gapped_at_zero(&self) -> bool {
        if self.increasing {
            self.hi_gapped
        } else {
            self.lo_gapped
        }
    }

    pub fn gapped_at_minus_pi(&self) -> bool {
        if self.increasing {
            self.lo_gapped
        } else {
            self.hi_gapped
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandStructure {
    /// `λ_1 < λ_2 ≤ λ_3 < … < λ_{2q}`.
    pub edges: Vec<f64>,
    pub bands: Vec<Band>,
    /// Zeros of `Δ'`, `κ_j ∈ [λ_{2j}, λ_{2j+1}]`.
    pub critical_points: Vec<f64>,
    /// One flag per edge.
    pub endpoint_gapped: Vec<bool>,
}

impl BandStructure {
    pub fn period(&self) -> usize {
        self.bands.len()
    }

    pub fn band(&self, j: usize) -> Result<&Band> {
        if j == 0 || j > self.bands.len() {
            return Err(Error::BandIndex { index: j, bands: self.bands.len() });
        }
        Ok(&self.bands[j - 1])
    }

    /// The band containing `x`, allowing [`EDGE_CLAMP_TOL`] slack.
    pub fn band_of(&self, x: f64) -> Option<&Band> {
        self.bands.iter().find(|b| b.contains(x, EDGE_CLAMP_TOL))
    }

    pub fn all_gapped(&self) -> bool {
        self.endpoint_gapped.iter().all(|g| *g)
    }

    /// `Θ(x) = −arccos(Δ(x)/2) ∈ [−π, 0]` on the continuous spectrum.
    pub fn theta(&self, mono: &MonodromyData, x: f64) -> Result<f64> {
        let band = self.band_of(x).ok_or(Error::OutsideSpectrum { x })?;
        let x = x.clamp(band.lo, band.hi);
        Ok(-(mono.delta(x) / 2.0).clamp(-1.0, 1.0).acos())
    }

    /// Total length of the continuous spectrum.
    pub fn measure(&self) -> f64 {
        self.bands.iter().map(|b| b.hi - b.lo).sum()
    }
}

/// Free-function form of [`BandStructure::theta`].
pub fn theta(mono: &MonodromyData, bands: &BandStructure, x: f64) -> Result<f64> {
    bands.theta(mono, x)
}

/// An eigenvalue of `J` in a spectral gap together with the mass the
/// spectral measure of `δ_1` puts on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenvalueInfo {
    pub value: f64,
    /// 1-based gap number: gap `j` lies between bands `j` and `j + 1`.
    pub gap: usize,
    pub weight: f64,
}

/// Safeguarded Newton on a bracketed root of `f` (value, derivative).
/// `lo` and `hi` must bracket a sign change.
pub(crate) fn bracketed_newton(f: impl Fn(f64) -> (f64, f64), lo: f64, hi: f64, guess: f64) -> f64 {
    let (flo, _) = f(lo);
    if flo == 0.0 {
        return lo;
    }
    let lo_negative = flo < 0.0;
    let (mut a, mut b) = (lo, hi);
    let mut x = guess.clamp(lo, hi);
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == lo_negative {
            a = x;
        } else {
            b = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton > a.min(b) && newton < a.max(b) { newton } else { 0.5 * (a + b) };
        if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs().max(1.0)
            || (b - a).abs() <= 2.0 * f64::EPSILON * x.abs().max(1.0)
        {
            return next;
        }
        x = next;
    }
    x
}

/// Plain Newton polish of an approximate simple root.
fn polish(f: impl Fn(f64) -> (f64, f64), x0: f64) -> f64 {
    let mut x = x0;
    let mut best = (f(x).0.abs(), x);
    for _ in 0..60 {
        let (fx, dfx) = f(x);
        if fx.abs() < best.0 {
            best = (fx.abs(), x);
        }
        if fx == 0.0 || dfx == 0.0 {
            break;
        }
        let dx = fx / dfx;
        x -= dx;
        if dx.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            let r = f(x).0.abs();
            if r < best.0 {
                best = (r, x);
            }
            break;
        }
    }
    best.1
}

/// Real roots of `Δ − level` on `[−R, R]`, with double roots merged.
/// Returns `(x, is_double)` pairs sorted ascending.
fn level_crossings(mono: &MonodromyData, level: f64) -> Result<Vec<(f64, bool)>> {
    let q = mono.period();
    let r = mono.radius();
    let mut coeffs = mono.delta_chebyshev().to_vec();
    coeffs[0] -= level;
    let raw = chebyshev::colleague_roots(&coeffs, q);
    let mut xs: Vec<f64> =
        raw.iter().filter(|z| z.im.abs() <= IMAG_TOL && z.re.abs() <= 1.0 + IMAG_TOL).map(|z| r * z.re).collect();
    if xs.len() != q {
        return Err(Error::RootCountMismatch { found: xs.len(), expected: q });
    }
    xs.sort_by(f64::total_cmp);

    let value = |x: f64| {
        let d = mono.delta_derivatives(x, 1);
        (d[0] - level, d[1])
    };
    let slope = |x: f64| {
        let d = mono.delta_derivatives(x, 2);
        (d[1], d[2])
    };

    let mut out = Vec::with_capacity(q);
    let mut i = 0;
    while i < xs.len() {
        if i + 1 < xs.len() && (xs[i + 1] - xs[i]).abs() < 1e-4 * r.max(1.0) {
            // candidate double root: locate the critical point between them
            let kappa = polish(slope, 0.5 * (xs[i] + xs[i + 1]));
            let d = mono.delta_derivatives(kappa, 2);
            let excess = (d[0] - level) * level.signum();
            let width = if excess <= 0.0 || d[2] == 0.0 { 0.0 } else { 2.0 * (2.0 * excess / d[2].abs()).sqrt() };
            if width < TOUCHING_TOL {
                out.push((kappa, true));
                out.push((kappa, true));
                i += 2;
                continue;
            }
        }
        out.push((polish(value, xs[i]), false));
        i += 1;
    }
    Ok(out)
}

/// Bands, edges, critical points and gap flags of `J`.
pub fn band_structure(mono: &MonodromyData) -> Result<BandStructure> {
    let q = mono.period();
    let mut edges: Vec<(f64, bool, f64)> = Vec::with_capacity(2 * q);
    for level in [2.0, -2.0] {
        edges.extend(level_crossings(mono, level)?.into_iter().map(|(x, d)| (x, d, level)));
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    if edges.len() != 2 * q {
        return Err(Error::RootCountMismatch { found: edges.len(), expected: 2 * q });
    }

    let mut bands = Vec::with_capacity(q);
    for j in 0..q {
        let (lo, lo_double, lo_level) = edges[2 * j];
        let (hi, hi_double, hi_level) = edges[2 * j + 1];
        // each band runs from one level to the other
        if lo_level == hi_level || !(hi > lo) {
            return Err(Error::RootCountMismatch { found: 2 * q - 1, expected: 2 * q });
        }
        bands.push(Band {
            index: j + 1,
            lo,
            hi,
            increasing: hi_level > 0.0,
            lo_gapped: !lo_double,
            hi_gapped: !hi_double,
        });
    }

    let mut critical_points = Vec::with_capacity(q.saturating_sub(1));
    for j in 0..q.saturating_sub(1) {
        let (left, right) = (bands[j].hi, bands[j + 1].lo);
        if !bands[j].hi_gapped {
            critical_points.push(left);
            continue;
        }
        let f = |x: f64| {
            let d = mono.delta_derivatives(x, 2);
            (d[1], d[2])
        };
        critical_points.push(bracketed_newton(f, left, right, 0.5 * (left + right)));
    }

    let endpoint_gapped = bands.iter().flat_map(|b| [b.lo_gapped, b.hi_gapped]).collect();
    Ok(BandStructure {
        edges: bands.iter().flat_map(|b| [b.lo, b.hi]).collect(),
        bands,
        critical_points,
        endpoint_gapped,
    })
}

/// Eigenvalues of `J`: roots of `t21` with `|t11| < 1`, with their weights
/// in the spectral measure of `δ_1`.
pub fn point_spectrum(mono: &MonodromyData, bands: &BandStructure) -> Result<Vec<EigenvalueInfo>> {
    let q = mono.period();
    if q == 1 {
        return Ok(Vec::new());
    }
    let r = mono.radius();
    let raw = chebyshev::colleague_roots(mono.t21_chebyshev(), q - 1);
    let t21 = |x: f64| {
        let c = mono.taylor(x, 1);
        (c[0].m21, c[1].m21)
    };
    let mut found: Vec<EigenvalueInfo> = Vec::new();
    for z in raw.iter().filter(|z| z.im.abs() <= IMAG_TOL && z.re.abs() <= 1.0 + IMAG_TOL) {
        let e = polish(t21, r * z.re);
        let t = mono.matrix(e);
        if !(t.m11.abs() < 1.0 - 1e-9) {
            continue;
        }
        if let Some(band) = bands.bands.iter().find(|b| b.contains(e, -EDGE_CLAMP_TOL)) {
            return Err(Error::EigenvalueInBand { value: e, band: band.index });
        }
        if found.iter().any(|f| (f.value - e).abs() < 1e-9) {
            continue;
        }
        let gap = bands.bands.iter().take_while(|b| b.hi < e).count();
        let weight = point_mass(mono.operator(), e)?;
        // + 0.0 turns a computed −0 into 0
        found.push(EigenvalueInfo { value: e + 0.0, gap, weight });
    }
    found.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(found)
}
