//! Invariant suite run by `specband validate`: measure moments,
//! orthonormality, phase-function derivatives and agreement between the two
//! propagators. Every check is deterministic.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::decay::default_n_max;
use crate::error::Result;
use crate::model::SpectralModel;
use crate::operator::FiniteState;
use crate::propagator::{bound_state_overlap, project_continuous, Method, Propagator};

pub const MOMENT_TOL: f64 = 1e-8;
pub const MAX_MOMENT: usize = 20;
pub const ORTHO_TOL: f64 = 1e-7;
pub const MAX_DEGREE: usize = 50;
pub const AGREEMENT_TOL: f64 = 1e-6;
pub const CONSERVATION_TOL: f64 = 1e-7;
/// Step of the central differences in the derivative check.
pub const FD_STEP: f64 = 1e-5;
/// Relative tolerances for `k'`, `k''`, `k'''` against finite differences.
pub const FD_TOLS: [f64; 3] = [1e-4, 1e-3, 5e-2];
/// Sample points per band for the derivative check.
pub const FD_POINTS: usize = 50;
pub const TIMES: [f64; 3] = [1.0, 10.0, 100.0];
pub const START_SITES: [usize; 2] = [1, 3];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        // NaN never passes
        Self { name: name.into(), value, tolerance, pass: value <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        writeln!(f, "{:<width$}  {:>10}  {:>9}  result", "check", "value", "tolerance")?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<width$}  {:>10.3e}  {:>9.1e}  {}",
                c.name,
                c.value,
                c.tolerance,
                if c.pass { "PASS" } else { "FAIL" }
            )?;
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// Largest `|∫x^k dμ − (J^k)_{11}|` for `k ≤ max_k`, each relative to the
/// absolute moment `∫|x|^k dμ` (odd moments can cancel to near zero).
pub fn moment_error(model: &SpectralModel, max_k: usize) -> f64 {
    (0..=max_k)
        .map(|k| {
            let got = model.measure.moment(k);
            let scale = model.measure.integrate(|x| x.abs().powi(k as i32));
            (got - model.operator.moment_exact(k)).abs() / scale
        })
        .fold(0.0, f64::max)
}

/// Deterministic sample points in `[−π + 0.05, −0.05]`, kept off the band
/// edges where `k'''` may be singular.
fn sample_phis(n: usize) -> Vec<f64> {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    (1..=n)
        .map(|i| {
            let u = (i as f64 * golden).fract();
            -0.05 - u * (PI - 0.1)
        })
        .collect()
}

/// Worst relative disagreement of closed-form `k'`, `k''`, `k'''` with a
/// central difference of the next-lower closed-form derivative, over all
/// bands and the given interior points.
pub fn derivative_errors_at(model: &SpectralModel, phis: &[f64]) -> Result<[f64; 3]> {
    let h = FD_STEP;
    let mut worst = [0.0_f64; 3];
    for j in 1..=model.period() {
        let k = model.phase(j)?;
        for &phi in phis {
            let (lo, hi) = (k.low_derivatives(phi - h), k.low_derivatives(phi + h));
            let d = k.derivatives(phi)?;
            let fd = [(hi.0 - lo.0) / (2.0 * h), (hi.1 - lo.1) / (2.0 * h), (hi.2 - lo.2) / (2.0 * h)];
            for (i, (cf, fd)) in [d.d1, d.d2, d.d3].iter().zip(fd).enumerate() {
                worst[i] = worst[i].max((cf - fd).abs() / cf.abs().max(1.0));
            }
        }
    }
    Ok(worst)
}

/// [`derivative_errors_at`] on a fixed low-discrepancy sample.
pub fn derivative_errors(model: &SpectralModel, points: usize) -> Result<[f64; 3]> {
    derivative_errors_at(model, &sample_phis(points))
}

/// Largest site-wise difference between the two propagators.
pub fn propagator_disagreement(model: &SpectralModel, u: &FiniteState, t: f64) -> Result<f64> {
    let n_max = default_n_max(model, u, t);
    let p = Propagator::new(model);
    let s = p.at(Method::Spectral, u, t, n_max)?;
    let o = p.at(Method::Oracle, u, t, n_max)?;
    Ok(max_difference(&s, &o))
}

pub fn max_difference(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

/// Runs every check on one operator.
pub fn validate(model: &SpectralModel) -> Result<ValidationReport> {
    let mut checks = Vec::new();
    checks.push(Check::new("total mass", (model.measure.total_mass() - 1.0).abs(), MOMENT_TOL));
    checks.push(Check::new(format!("moments k<={MAX_MOMENT} (rel)"), moment_error(model, MAX_MOMENT), MOMENT_TOL));
    checks.push(Check::new(
        format!("orthonormality n,m<={MAX_DEGREE}"),
        model.measure.orthonormality_defect(MAX_DEGREE),
        ORTHO_TOL,
    ));
    let fd = derivative_errors(model, FD_POINTS)?;
    for (i, name) in ["k'", "k''", "k'''"].iter().enumerate() {
        checks.push(Check::new(format!("{name} vs finite difference"), fd[i], FD_TOLS[i]));
    }

    let p = Propagator::new(model);
    for site in START_SITES {
        let u = FiniteState::delta(site);
        let norm0 = project_continuous(model, &u).norm_l2();
        for t in TIMES {
            let n_max = default_n_max(model, &u, t);
            let s = p.at(Method::Spectral, &u, t, n_max)?;
            let o = p.at(Method::Oracle, &u, t, n_max)?;
            checks.push(Check::new(
                format!("spectral vs oracle u=d{site} t={t}"),
                max_difference(&s, &o),
                AGREEMENT_TOL,
            ));
            let norm = s.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            checks.push(Check::new(
                format!("l2 conservation u=d{site} t={t}"),
                (norm - norm0).abs() / norm0,
                CONSERVATION_TOL,
            ));
            for ev in &model.eigenvalues {
                let overlap = bound_state_overlap(model, ev.value, ev.weight, &s).norm();
                checks.push(Check::new(
                    format!("bound state E={:.6} u=d{site} t={t}", ev.value),
                    overlap,
                    CONSERVATION_TOL,
                ));
            }
        }
    }
    Ok(ValidationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::JacobiOperator;

    #[test]
    fn laplacian_passes() {
        let m = SpectralModel::new(&JacobiOperator::laplacian()).unwrap();
        let r = validate(&m).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.to_string().ends_with("0 failed"));
    }

    #[test]
    fn ssh_passes_with_bound_state_checks() {
        let op = JacobiOperator::new(vec![1.0, 2.0], vec![0.0, 0.0]).unwrap();
        let r = validate(&SpectralModel::new(&op).unwrap()).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.checks.iter().any(|c| c.name.starts_with("bound state")));
    }

    #[test]
    fn nan_fails() {
        assert!(!Check::new("x", f64::NAN, 1.0).pass);
    }

    #[test]
    fn samples_avoid_edges() {
        let s = sample_phis(50);
        assert_eq!(s.len(), 50);
        assert!(s.iter().all(|p| *p <= -0.05 && *p >= -PI + 0.05));
    }
}
