//! Norms of evolved states and power-law fits of their decay in time.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SpectralModel;
use crate::operator::FiniteState;
use crate::propagator::{project_continuous, Method, Propagator, BUFFER};
use crate::spectrum::AuditReport;

/// Default lower end of the fit window.
pub const DEFAULT_T_MIN: f64 = 20.0;
/// Fewest points a fit accepts.
pub const MIN_POINTS: usize = 8;
/// Slope tolerance used by pass/fail checks.
pub const SLOPE_TOL: f64 = 0.07;
/// Slope tolerance for the conserved ℓ² norm.
pub const L2_SLOPE_TOL: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormKind {
    /// `max_n |ψ_n|`.
    #[serde(rename = "sup")]
    Sup,
    /// `max_n |ψ_n| / n`.
    #[serde(rename = "wsup")]
    WeightedSup,
    /// `(Σ |ψ_n|²)^{1/2}`.
    #[serde(rename = "l2")]
    L2,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::Sup, NormKind::WeightedSup, NormKind::L2];

    pub fn as_str(&self) -> &'static str {
        match self {
            NormKind::Sup => "sup",
            NormKind::WeightedSup => "wsup",
            NormKind::L2 => "l2",
        }
    }

    /// Exponent the decay estimates predict for this norm. The weighted
    /// bound `t^{−1/2}` holds for every periodic operator; the sup bound
    /// comes from the audit and is `None` when unclassified.
    pub fn predicted(&self, audit: &AuditReport) -> Option<f64> {
        match self {
            NormKind::Sup => audit.predicted_global_exponent,
            NormKind::WeightedSup => Some(audit.predicted_local_exponent),
            NormKind::L2 => Some(0.0),
        }
    }

    /// The estimates are upper bounds, so decay faster than predicted
    /// passes. The ℓ² norm is conserved and must stay flat.
    pub fn passes(&self, slope: f64, predicted: Option<f64>) -> bool {
        match (self, predicted) {
            (NormKind::L2, _) => slope.abs() <= L2_SLOPE_TOL,
            (_, Some(p)) => slope <= p + SLOPE_TOL,
            (_, None) => true,
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sup" => Ok(NormKind::Sup),
            "wsup" => Ok(NormKind::WeightedSup),
            "l2" => Ok(NormKind::L2),
            other => Err(Error::InvalidArgument(format!("unknown norm '{other}'"))),
        }
    }
}

/// Norm of `ψ` with `psi[0]` at site 1.
pub fn state_norm(psi: &[Complex64], kind: NormKind) -> f64 {
    match kind {
        NormKind::Sup => psi.iter().map(|z| z.norm()).fold(0.0, f64::max),
        NormKind::WeightedSup => psi.iter().enumerate().map(|(i, z)| z.norm() / (i + 1) as f64).fold(0.0, f64::max),
        NormKind::L2 => psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
    }
}

/// Sites the wavefront can reach by time `t` from a state supported on
/// `1..=support`.
pub fn light_cone(model: &SpectralModel, support: usize, t: f64) -> usize {
    support + (model.operator.norm_bound() * t).ceil() as usize
}

/// Default stored range: the light cone of `P_c u` plus the reflection
/// buffer. Bound-state tails make `P_c u` longer than `u`, and leaving them
/// out loses ℓ² mass at early times.
pub fn default_n_max(model: &SpectralModel, u: &FiniteState, t: f64) -> usize {
    light_cone(model, project_continuous(model, u).len(), t) + BUFFER
}

/// [`state_norm`], refusing rows that stop short of the light cone.
pub fn checked_state_norm(
    model: &SpectralModel,
    psi: &[Complex64],
    support: usize,
    t: f64,
    kind: NormKind,
) -> Result<f64> {
    let required = light_cone(model, support, t);
    if psi.len() < required {
        return Err(Error::RangeTooSmall { stored: psi.len(), required });
    }
    Ok(state_norm(psi, kind))
}

/// Least-squares line through `(log t, log norm)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS of the log residuals.
    pub residual: f64,
    /// 95% confidence half-width of the slope, `1.96 ×` its standard error.
    pub half_width: f64,
    pub points: usize,
}

/// Fits `norm ≈ C t^slope` on the points with `t ≥ t_min`.
pub fn fit_exponent(times: &[f64], norms: &[f64], t_min: f64) -> Result<PowerFit> {
    if times.len() != norms.len() {
        return Err(Error::InvalidArgument(format!("{} times but {} norms", times.len(), norms.len())));
    }
    let window: Vec<(f64, f64)> =
        times.iter().zip(norms).filter(|(t, _)| **t >= t_min).map(|(t, n)| (*t, *n)).collect();
    if let Some(&(t, value)) = window.iter().find(|(_, n)| !(*n > 0.0)) {
        return Err(Error::NonPositiveNorm { t, value });
    }
    if window.len() < MIN_POINTS {
        return Err(Error::InsufficientPoints { found: window.len(), required: MIN_POINTS });
    }
    let xs: Vec<f64> = window.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = window.iter().map(|(_, n)| n.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("fit times are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let se = (ssr / (m - 2.0) / sxx).sqrt();
    Ok(PowerFit { slope, intercept, residual: (ssr / m).sqrt(), half_width: 1.96 * se, points: xs.len() })
}

/// `t_i = start (stop/start)^{i/(count−1)}`.
pub fn geometric_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if !(start > 0.0) || !(stop >= start) || count < 2 {
        return Err(Error::InvalidArgument(format!(
            "geometric grid needs 0 < start <= stop and count >= 2, got {start}, {stop}, {count}"
        )));
    }
    let ratio = (stop / start).ln();
    let mut grid: Vec<f64> = (0..count).map(|i| start * (ratio * i as f64 / (count - 1) as f64).exp()).collect();
    grid[0] = start;
    grid[count - 1] = stop;
    Ok(grid)
}

/// Running maximum of `norm · t^{−exponent}`; bounded when the power law
/// with that exponent is an upper bound.
pub fn envelope(times: &[f64], norms: &[f64], exponent: f64) -> Vec<f64> {
    let mut best = 0.0_f64;
    times
        .iter()
        .zip(norms)
        .map(|(t, n)| {
            best = best.max(n * t.powf(-exponent));
            best
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub kind: NormKind,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub fit: PowerFit,
    pub predicted: Option<f64>,
    pub pass: bool,
}

impl DecayFit {
    pub fn new(kind: NormKind, times: Vec<f64>, norms: Vec<f64>, t_min: f64, predicted: Option<f64>) -> Result<Self> {
        let fit = fit_exponent(&times, &norms, t_min)?;
        let pass = kind.passes(fit.slope, predicted);
        Ok(Self { kind, times, norms, fit, predicted, pass })
    }

    pub fn slope(&self) -> f64 {
        self.fit.slope
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayExperiment {
    pub times: Vec<f64>,
    /// Method actually used at each time.
    pub methods: Vec<Method>,
    pub fits: Vec<DecayFit>,
}

impl DecayExperiment {
    pub fn fit(&self, kind: NormKind) -> Option<&DecayFit> {
        self.fits.iter().find(|f| f.kind == kind)
    }

    /// Plain-text comparison of measured and predicted exponents.
    pub fn table(&self) -> String {
        let mut out = format!("{:<6} {:>9} {:>8} {:>10} {:>5}\n", "norm", "slope", "±95%", "predicted", "pass");
        for f in &self.fits {
            let predicted = f.predicted.map_or("n/a".to_string(), |p| format!("{p:.4}"));
            out.push_str(&format!(
                "{:<6} {:>9.4} {:>8.4} {:>10} {:>5}\n",
                f.kind.as_str(),
                f.fit.slope,
                f.fit.half_width,
                predicted,
                if f.pass { "yes" } else { "no" }
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DecayOptions {
    pub t_min: f64,
    /// Stored site range; defaults to the light cone plus buffer at each time.
    pub n_max: Option<usize>,
    /// Evolution method; `None` means spectral with oracle fallback.
    pub method: Option<Method>,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self { t_min: DEFAULT_T_MIN, n_max: None, method: None }
    }
}

/// Evolves `u` over `times`, takes every requested norm and fits its decay
/// exponent against the audit's prediction.
pub fn decay_experiment(
    model: &SpectralModel,
    u: &FiniteState,
    times: &[f64],
    kinds: &[NormKind],
    options: DecayOptions,
) -> Result<DecayExperiment> {
    let audit = model.audit();
    let propagator = Propagator::new(model);
    let support = u.len();
    let rows: Vec<(Method, Vec<f64>)> = times
        .par_iter()
        .map(|&t| {
            let n_max = options.n_max.unwrap_or_else(|| default_n_max(model, u, t));
            let (method, psi) = match options.method {
                Some(m) => (m, propagator.at(m, u, t, n_max)?),
                None => {
                    let (m, mut rows) = propagator.evolve_with_fallback(u, &[t], n_max)?;
                    (m[0], rows.remove(0))
                }
            };
            let norms =
                kinds.iter().map(|&k| checked_state_norm(model, &psi, support, t, k)).collect::<Result<Vec<_>>>()?;
            Ok((method, norms))
        })
        .collect::<Result<Vec<_>>>()?;

    let methods = rows.iter().map(|(m, _)| *m).collect();
    let fits = kinds
        .iter()
        .enumerate()
        .map(|(i, &kind)| {
            let norms = rows.iter().map(|(_, n)| n[i]).collect();
            DecayFit::new(kind, times.to_vec(), norms, options.t_min, kind.predicted(&audit))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayExperiment { times: times.to_vec(), methods, fits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::JacobiOperator;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn norm_examples() {
        let delta1 = [c(1.0)];
        for kind in NormKind::ALL {
            assert_eq!(state_norm(&delta1, kind), 1.0);
        }
        let delta4 = [c(0.0), c(0.0), c(0.0), c(1.0)];
        assert_eq!(state_norm(&delta4, NormKind::WeightedSup), 0.25);
        assert_abs_diff_eq!(state_norm(&[c(1.0), c(0.5)], NormKind::L2), 5f64.sqrt() / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn range_check() {
        let m = SpectralModel::new(&JacobiOperator::laplacian()).unwrap();
        let psi = vec![c(0.1); 30];
        assert!(checked_state_norm(&m, &psi, 1, 10.0, NormKind::Sup).is_ok());
        let err = checked_state_norm(&m, &psi, 1, 20.0, NormKind::Sup).unwrap_err();
        assert_eq!(err, Error::RangeTooSmall { stored: 30, required: 41 });
    }

    #[test]
    fn exact_power_law() {
        let t = geometric_grid(20.0, 2000.0, 24).unwrap();
        let n: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(-0.5)).collect();
        let f = fit_exponent(&t, &n, 20.0).unwrap();
        assert_abs_diff_eq!(f.slope, -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(f.intercept, 3f64.ln(), epsilon = 1e-11);
        assert!(f.half_width < 1e-10);
        let flat = vec![0.7; t.len()];
        assert_abs_diff_eq!(fit_exponent(&t, &flat, 20.0).unwrap().slope, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn perturbed_power_law() {
        let t = geometric_grid(20.0, 2000.0, 24).unwrap();
        let n: Vec<f64> = t.iter().map(|t| t.powf(-1.0 / 3.0) * (1.0 + 0.1 * t.ln().sin())).collect();
        let f = fit_exponent(&t, &n, 20.0).unwrap();
        assert!((f.slope + 1.0 / 3.0).abs() < 0.05, "slope {}", f.slope);
    }

    #[test]
    fn fit_errors() {
        let t = geometric_grid(1.0, 100.0, 10).unwrap();
        let n = vec![1.0; 10];
        assert!(matches!(fit_exponent(&t, &n, 20.0), Err(Error::InsufficientPoints { found: 4, .. })));
        let mut bad = n.clone();
        bad[9] = 0.0;
        assert!(matches!(fit_exponent(&t, &bad, 1.0), Err(Error::NonPositiveNorm { .. })));
    }

    #[test]
    fn grid_endpoints() {
        let g = geometric_grid(20.0, 2000.0, 24).unwrap();
        assert_eq!(g.len(), 24);
        assert_eq!(g[0], 20.0);
        assert_eq!(g[23], 2000.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!(geometric_grid(0.0, 1.0, 5).is_err());
        assert!(geometric_grid(1.0, 2.0, 1).is_err());
    }

    #[test]
    fn pass_rules() {
        assert!(NormKind::Sup.passes(-0.40, Some(-1.0 / 3.0)));
        assert!(NormKind::Sup.passes(-0.27, Some(-1.0 / 3.0)));
        assert!(!NormKind::Sup.passes(-0.2, Some(-1.0 / 3.0)));
        assert!(NormKind::L2.passes(0.01, Some(0.0)));
        assert!(!NormKind::L2.passes(-0.05, Some(0.0)));
        assert_eq!("wsup".parse::<NormKind>().unwrap(), NormKind::WeightedSup);
    }

    #[test]
    fn envelope_is_running_max() {
        let e = envelope(&[1.0, 4.0, 9.0], &[1.0, 0.6, 0.2], -0.5);
        assert_eq!(e, vec![1.0, 1.2, 1.2]);
    }

    #[test]
    fn short_experiment_runs() {
        let m = SpectralModel::new(&JacobiOperator::laplacian()).unwrap();
        let times = geometric_grid(5.0, 40.0, 8).unwrap();
        let opts = DecayOptions { t_min: 5.0, ..Default::default() };
        let e = decay_experiment(&m, &FiniteState::delta(1), &times, &NormKind::ALL, opts).unwrap();
        assert_eq!(e.fits.len(), 3);
        assert!(e.methods.iter().all(|m| *m == Method::Spectral));
        let l2 = e.fit(NormKind::L2).unwrap();
        assert!(l2.slope().abs() < 1e-8);
        assert!(e.table().contains("wsup"));
    }
}
