//! `ψ(t) = e^{−itJ} P_c u`, by spectral quadrature or by a truncated
//! Chebyshev propagation oracle.

mod bessel;
mod oracle;
mod spectral;

pub use bessel::bessel_j_sequence;
pub use oracle::{evolve_oracle_with_cap, truncation_size, BUFFER, DEFAULT_TRUNCATION_CAP};
pub use spectral::{evolve_spectral_with_budget, node_count, panel_count, DEFAULT_NODE_BUDGET, PANEL_NODES};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SpectralModel;
use crate::operator::FiniteState;
use crate::polynomials::poly_recurrence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Spectral,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Spectral => "spectral",
            Method::Oracle => "oracle",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Method::Spectral),
            "oracle" => Ok(Method::Oracle),
            other => Err(Error::InvalidArgument(format!("unknown method '{other}'"))),
        }
    }
}

/// Amplitudes `ψ_n(t)` for `n = 1..=n_max` at each requested time.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub method: Method,
    pub times: Vec<f64>,
    pub n_max: usize,
    /// `amplitudes[i][n − 1] = ψ_n(times[i])`.
    pub amplitudes: Vec<Vec<Complex64>>,
}

impl EvolutionResult {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.amplitudes[i]
    }

    pub fn l2_norms(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|row| row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect()
    }
}

/// Normalized eigenvector `√w · p_{n−1}(E)`, cut once whole periods fall
/// below 1e-14. Uses `p_{sq+r} = t11(E)^s p_r`.
pub fn eigenvector(model: &SpectralModel, value: f64, weight: f64) -> Vec<f64> {
    let op = &model.operator;
    let block = poly_recurrence(op, value, op.period() - 1);
    let peak = block.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let t11 = model.monodromy.t11(value);
    let mut out = Vec::new();
    let mut factor = weight.sqrt();
    loop {
        out.extend(block.iter().map(|p| factor * p));
        factor *= t11;
        if factor.abs() * peak < 1e-14 {
            return out;
        }
    }
}

/// `P_c u = u − Σ_E ⟨φ_E, u⟩ φ_E` over the eigenvalues of `J`.
pub fn project_continuous(model: &SpectralModel, u: &FiniteState) -> FiniteState {
    let mut out = u.values().to_vec();
    for ev in &model.eigenvalues {
        let phi = eigenvector(model, ev.value, ev.weight);
        if out.len() < phi.len() {
            out.resize(phi.len(), Complex64::new(0.0, 0.0));
        }
        let c: Complex64 = phi.iter().zip(u.values()).map(|(p, x)| x * p).sum();
        for (x, p) in out.iter_mut().zip(&phi) {
            *x -= c * p;
        }
    }
    FiniteState::new(out)
}

/// Overlap `⟨φ_E, ψ⟩` of a state with the eigenvector at `E`.
pub fn bound_state_overlap(model: &SpectralModel, value: f64, weight: f64, psi: &[Complex64]) -> Complex64 {
    eigenvector(model, value, weight).iter().zip(psi).map(|(p, x)| x * p).sum()
}

/// Spectral quadrature with the default node budget.
pub fn evolve_spectral(model: &SpectralModel, u: &FiniteState, t: f64, n_max: usize) -> Result<Vec<Complex64>> {
    evolve_spectral_with_budget(model, u, t, n_max, DEFAULT_NODE_BUDGET)
}

/// Truncated Chebyshev propagation with the default truncation cap.
pub fn evolve_oracle(model: &SpectralModel, u: &FiniteState, t: f64, n_max: usize) -> Result<Vec<Complex64>> {
    evolve_oracle_with_cap(model, u, t, n_max, DEFAULT_TRUNCATION_CAP)
}

/// Propagator settings shared by all times of one run.
#[derive(Debug, Clone, Copy)]
pub struct Propagator<'a> {
    model: &'a SpectralModel,
    pub node_budget: usize,
    pub truncation_cap: usize,
}

impl<'a> Propagator<'a> {
    pub fn new(model: &'a SpectralModel) -> Self {
        Self { model, node_budget: DEFAULT_NODE_BUDGET, truncation_cap: DEFAULT_TRUNCATION_CAP }
    }

    pub fn with_node_budget(mut self, budget: usize) -> Self {
        self.node_budget = budget;
        self
    }

    pub fn with_truncation_cap(mut self, cap: usize) -> Self {
        self.truncation_cap = cap;
        self
    }

    pub fn at(&self, method: Method, u: &FiniteState, t: f64, n_max: usize) -> Result<Vec<Complex64>> {
        match method {
            Method::Spectral => evolve_spectral_with_budget(self.model, u, t, n_max, self.node_budget),
            Method::Oracle => evolve_oracle_with_cap(self.model, u, t, n_max, self.truncation_cap),
        }
    }

    /// Evolves at every time in parallel; rows come back in input order.
    pub fn evolve(&self, method: Method, u: &FiniteState, times: &[f64], n_max: usize) -> Result<EvolutionResult> {
        let amplitudes = times.par_iter().map(|&t| self.at(method, u, t, n_max)).collect::<Result<Vec<_>>>()?;
        Ok(EvolutionResult { method, times: times.to_vec(), n_max, amplitudes })
    }

    /// Spectral quadrature where the node budget allows it, the oracle
    /// otherwise. Returns the method used at each time.
    pub fn evolve_with_fallback(
        &self,
        u: &FiniteState,
        times: &[f64],
        n_max: usize,
    ) -> Result<(Vec<Method>, Vec<Vec<Complex64>>)> {
        let rows = times
            .par_iter()
            .map(|&t| match self.at(Method::Spectral, u, t, n_max) {
                Err(Error::QuadratureBudgetExceeded { .. }) => {
                    self.at(Method::Oracle, u, t, n_max).map(|r| (Method::Oracle, r))
                }
                other => other.map(|r| (Method::Spectral, r)),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(rows.into_iter().unzip())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::JacobiOperator;
    use approx::assert_abs_diff_eq;

    fn model(a: &[f64], b: &[f64]) -> SpectralModel {
        SpectralModel::new(&JacobiOperator::new(a.to_vec(), b.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn projection_examples() {
        let lap = model(&[1.0], &[0.0]);
        let u = FiniteState::from_real(&[0.3, -1.0, 2.0]);
        assert_eq!(project_continuous(&lap, &u), u);

        let ssh = model(&[1.0, 2.0], &[0.0, 0.0]);
        let pu = project_continuous(&ssh, &FiniteState::delta(1));
        let expected = [0.25, 0.0, 0.375, 0.0, -0.1875, 0.0, 0.09375];
        for (n, want) in expected.iter().enumerate() {
            assert_abs_diff_eq!(pu.site(n + 1).re, *want, epsilon = 1e-12);
        }
        let ppu = project_continuous(&ssh, &pu);
        let diff = ppu.values().iter().zip(pu.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-10);
    }

    #[test]
    fn eigenvector_is_normalized() {
        let ssh = model(&[1.0, 2.0], &[0.0, 0.0]);
        let ev = ssh.eigenvalues[0];
        let phi = eigenvector(&ssh, ev.value, ev.weight);
        let n: f64 = phi.iter().map(|x| x * x).sum();
        assert_abs_diff_eq!(n, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(phi[0], 0.75f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn methods_agree_at_moderate_time() {
        let m = model(&[0.9, 1.3, 1.1], &[0.2, -0.4, 0.1]);
        let u = FiniteState::delta(2);
        let p = Propagator::new(&m);
        let t = 7.0;
        let n_max = 60;
        let s = p.at(Method::Spectral, &u, t, n_max).unwrap();
        let o = p.at(Method::Oracle, &u, t, n_max).unwrap();
        let diff = s.iter().zip(&o).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-9, "max difference {diff}");
    }

    #[test]
    fn fallback_switches_to_oracle() {
        let m = model(&[1.0], &[0.0]);
        let p = Propagator::new(&m).with_node_budget(2000);
        let (methods, rows) = p.evolve_with_fallback(&FiniteState::delta(1), &[1.0, 40.0], 120).unwrap();
        assert_eq!(methods, vec![Method::Spectral, Method::Oracle]);
        assert_eq!(rows.len(), 2);
        assert_eq!("oracle".parse::<Method>().unwrap(), Method::Oracle);
        assert!("both".parse::<Method>().is_err());
    }
}
