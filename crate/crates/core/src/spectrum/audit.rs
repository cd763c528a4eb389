//! Stationary-phase audit: zeros of `k''` and `k'''` on every band and the
//! decay exponents they predict.

use serde::Serialize;

use super::{BandStructure, PhaseFunction};
use crate::transfer::MonodromyData;

const GRID: usize = 4096;
const BISECT_TOL: f64 = 1e-12;
const NONDEGENERATE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandAudit {
    pub index: usize,
    pub lo_gapped: bool,
    pub hi_gapped: bool,
    /// Zeros of `k''` in `[−π, 0]`.
    pub t2: Vec<f64>,
    /// Zeros of `k'''` in `[−π, 0]`. Empty if `k'''` is undefined at an edge.
    pub t3: Vec<f64>,
    /// `min |k'''|` over `t2`, `None` if `t2` is empty.
    pub min_abs_k3_on_t2: Option<f64>,
}

/// Which global decay regime the audit predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GlobalClass {
    /// `k'''` is nonzero on every zero of `k''`.
    Nondegenerate,
    /// Even period with all gaps open.
    EvenGapped,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub period: usize,
    pub bands: Vec<BandAudit>,
    pub nondegenerate: bool,
    pub evenq_all_gapped: bool,
    pub global_class: GlobalClass,
    pub predicted_local_exponent: f64,
    /// `None` when unclassified.
    pub predicted_global_exponent: Option<f64>,
    /// Grid minimum of `Σ_{ℓ=2}^{q} |k^{(ℓ)}|` over all bands; only
    /// computed for an even period with every gap open.
    pub c_est: Option<f64>,
}

/// Zeros of `f` on `[lo, hi]`: exact zeros at grid points plus sign changes
/// refined by bisection. `f` returning `None` marks an undefined point.
fn scan_zeros(f: impl Fn(f64) -> Option<f64>, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let ys: Vec<Option<f64>> = xs.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for i in 0..=n {
        if ys[i] == Some(0.0) {
            roots.push(xs[i]);
        }
        if i == n {
            break;
        }
        let (Some(ya), Some(yb)) = (ys[i], ys[i + 1]) else { continue };
        if ya == 0.0 || yb == 0.0 || ya.signum() == yb.signum() {
            continue;
        }
        let (mut a, mut b, mut fa) = (xs[i], xs[i + 1], ya);
        while b - a > BISECT_TOL {
            let m = 0.5 * (a + b);
            match f(m) {
                Some(0.0) => {
                    a = m;
                    b = m;
                }
                Some(fm) if fm.signum() == fa.signum() => {
                    a = m;
                    fa = fm;
                }
                _ => b = m,
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
}

/// Central differences of `k'''` give the higher derivatives needed by
/// `c_est` for periods above 3.
fn derivative_sum(k: &PhaseFunction<'_>, phi: f64, q: usize) -> Option<f64> {
    let (_, _, d2) = k.low_derivatives(phi);
    let mut total = d2.abs();
    if q < 3 {
        return Some(total);
    }
    let d3 = k.d3(phi).ok()?;
    total += d3.abs();
    if q > 3 {
        const H: f64 = 1e-2;
        let n = q - 3;
        let samples: Vec<f64> =
            (0..=n).map(|i| k.d3(phi + (i as f64 - n as f64 / 2.0) * H).unwrap_or(f64::NAN)).collect();
        // successive central differences: ℓ-th pass approximates k^{(3+ℓ)}
        let mut diffs = samples;
        for _ in 0..n {
            let next: Vec<f64> = diffs.windows(2).map(|w| (w[1] - w[0]) / H).collect();
            total += next[next.len() / 2].abs();
            diffs = next;
        }
    }
    Some(total)
}

pub fn stationary_audit(mono: &MonodromyData, bands: &BandStructure) -> AuditReport {
    let pi = std::f64::consts::PI;
    let q = bands.period();
    let mut out = Vec::with_capacity(q);
    let mut c_est = f64::INFINITY;
    let mut degenerate_roots = 0;
    let evenq_all_gapped = q.is_multiple_of(2) && bands.all_gapped();
    for j in 1..=q {
        let k = PhaseFunction::new(mono, bands, j).expect("band index in range");
        let t2 = scan_zeros(|phi| Some(k.d2(phi)), -pi, 0.0, GRID);
        let t3 = scan_zeros(|phi| k.d3(phi).ok(), -pi, 0.0, GRID);
        let k3: Vec<Option<f64>> = t2.iter().map(|&r| k.d3(r).ok().map(f64::abs)).collect();
        // a zero of k'' on a closed-gap edge has no k''' and counts as degenerate
        degenerate_roots += k3.iter().filter(|v| !v.is_some_and(|m| m > NONDEGENERATE_TOL)).count();
        let min_abs_k3_on_t2 = k3.iter().flatten().copied().reduce(f64::min);
        if evenq_all_gapped {
            for i in 0..=GRID {
                let phi = -pi + pi * i as f64 / GRID as f64;
                if let Some(s) = derivative_sum(&k, phi, q) {
                    c_est = c_est.min(s);
                }
            }
        }
        let band = k.band();
        out.push(BandAudit {
            index: j,
            lo_gapped: band.lo_gapped,
            hi_gapped: band.hi_gapped,
            t2,
            t3,
            min_abs_k3_on_t2,
        });
    }

    let nondegenerate = degenerate_roots == 0;
    let (global_class, predicted_global_exponent) = if nondegenerate {
        (GlobalClass::Nondegenerate, Some(-1.0 / 3.0))
    } else if evenq_all_gapped {
        (GlobalClass::EvenGapped, Some(-1.0 / (q as f64 + 1.0)))
    } else {
        (GlobalClass::Unclassified, None)
    };
    AuditReport {
        period: q,
        bands: out,
        nondegenerate,
        evenq_all_gapped,
        global_class,
        predicted_local_exponent: -0.5,
        predicted_global_exponent,
        c_est: evenq_all_gapped.then_some(c_est),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::JacobiOperator;
    use crate::spectrum::band_structure;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn audit(a: &[f64], b: &[f64]) -> AuditReport {
        let m = MonodromyData::new(&JacobiOperator::new(a.to_vec(), b.to_vec()).unwrap());
        let bs = band_structure(&m).unwrap();
        stationary_audit(&m, &bs)
    }

    #[test]
    fn laplacian_audit() {
        let r = audit(&[1.0], &[0.0]);
        let band = &r.bands[0];
        assert_eq!(band.t2.len(), 1);
        assert_abs_diff_eq!(band.t2[0], -FRAC_PI_2, epsilon = 1e-8);
        assert_eq!(band.t3.len(), 2);
        assert_abs_diff_eq!(band.t3[0], -PI, epsilon = 1e-8);
        assert_abs_diff_eq!(band.t3[1], 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(band.min_abs_k3_on_t2.unwrap(), 2.0, epsilon = 1e-8);
        assert!(r.nondegenerate);
        assert!(!r.evenq_all_gapped);
        assert_eq!(r.predicted_global_exponent, Some(-1.0 / 3.0));
        assert_eq!(r.predicted_local_exponent, -0.5);
        assert_eq!(r.c_est, None);
    }

    #[test]
    fn ssh_audit_is_even_and_gapped() {
        let r = audit(&[1.0, 2.0], &[0.0, 0.0]);
        assert!(r.evenq_all_gapped);
        assert_eq!(r.bands.len(), 2);
        for b in &r.bands {
            assert!(!b.t2.is_empty());
        }
        assert!(r.predicted_global_exponent.is_some());
        // for q = 2 the sum is just |k''|, which vanishes on T2
        assert!(r.c_est.unwrap() < 1e-3);
    }

    #[test]
    fn scan_finds_simple_and_grid_zeros() {
        let z = scan_zeros(|x| Some(x * (x + 1.3)), -PI, 0.0, 64);
        assert_eq!(z.len(), 2);
        assert_abs_diff_eq!(z[0], -1.3, epsilon = 1e-11);
        assert_eq!(z[1], 0.0);
        assert!(scan_zeros(|x| if x > -1.0 { None } else { Some(1.0) }, -PI, 0.0, 64).is_empty());
        let z = scan_zeros(|x| Some(x.cos()), -PI, 0.0, 64);
        assert_eq!(z.len(), 1);
        assert_abs_diff_eq!(z[0], -FRAC_PI_2, epsilon = 1e-11);
    }
}
