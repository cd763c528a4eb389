//! Propagator from the generalized eigenfunction expansion, integrated band
//! by band in the phase variable.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::phase_weight;
use crate::model::SpectralModel;
use crate::operator::FiniteState;
use crate::quadrature::{composite, GaussLegendre};

/// Default cap on the total number of quadrature nodes.
pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;
/// Gauss–Legendre nodes per panel.
pub const PANEL_NODES: usize = 16;
/// Number of node chunks summed independently; fixed so that the summation
/// order does not depend on the thread count.
const CHUNKS: usize = 64;
/// Grid used to estimate `max |k'|`.
const SPEED_GRID: usize = 512;

/// Panel count for band `j` at time `t`, given the largest polynomial
/// degree that enters the integrand.
pub fn panel_count(model: &SpectralModel, j: usize, t: f64, degree: usize) -> Result<usize> {
    let k = model.phase(j)?;
    let osc = k.max_speed(SPEED_GRID) * std::f64::consts::PI;
    let time_panels = 8 * (t * osc / (2.0 * std::f64::consts::PI)).ceil() as usize;
    // p_n(k(φ)) behaves like sin(nφ/q), adding n/(2q) wavelengths per product
    let poly_panels = degree.div_ceil(2 * model.period());
    Ok(16.max(time_panels).max(poly_panels))
}

/// Total node count the spectral method would use.
pub fn node_count(model: &SpectralModel, u: &FiniteState, t: f64, n_max: usize) -> Result<usize> {
    let degree = n_max + u.len();
    let mut total = 0;
    for j in 1..=model.period() {
        total += panel_count(model, j, t, degree)? * PANEL_NODES;
    }
    Ok(total)
}

/// `ψ_n(t)` for `n = 1..=n_max`.
pub fn evolve_spectral_with_budget(
    model: &SpectralModel,
    u: &FiniteState,
    t: f64,
    n_max: usize,
    budget: usize,
) -> Result<Vec<Complex64>> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be nonnegative, got {t}")));
    }
    let needed = node_count(model, u, t, n_max)?;
    if needed > budget {
        return Err(Error::QuadratureBudgetExceeded { needed, budget });
    }
    let pi = std::f64::consts::PI;
    let rule = GaussLegendre::new(PANEL_NODES);
    let degree = n_max + u.len();
    let mut nodes: Vec<(usize, f64, f64)> = Vec::with_capacity(needed);
    for j in 1..=model.period() {
        let panels = panel_count(model, j, t, degree)?;
        nodes.extend(composite(&rule, -pi, 0.0, panels).into_iter().map(|(phi, w)| (j, phi, w)));
    }

    let len = n_max.max(u.len());
    let op = &model.operator;
    let inv_a: Vec<f64> = (1..=len).map(|n| 1.0 / op.a(n)).collect();
    let a: Vec<f64> = (1..=len).map(|n| op.a(n)).collect();
    let b: Vec<f64> = (1..=len).map(|n| op.b(n)).collect();
    let uvals = u.values();
    let phases: Vec<_> = (1..=model.period()).map(|j| model.phase(j)).collect::<Result<_>>()?;

    let chunk = nodes.len().div_ceil(CHUNKS).max(1);
    let partials: Vec<Vec<Complex64>> = nodes
        .par_chunks(chunk)
        .map(|part| {
            let mut acc = vec![Complex64::new(0.0, 0.0); n_max];
            for &(j, phi, w) in part {
                let k = &phases[j - 1];
                let x = k.k(phi);
                let weight = w * phase_weight(&model.monodromy, k, phi);
                if weight == 0.0 {
                    continue;
                }
                // ⟨p(x), u⟩ first, then one pass that both advances the
                // recurrence and accumulates c·p_{n−1}(x) into ψ_n
                let (mut prev, mut cur) = (0.0, 1.0);
                let mut overlap = Complex64::new(0.0, 0.0);
                for (n, um) in uvals.iter().enumerate() {
                    overlap += um * cur;
                    let a_prev = if n == 0 { 0.0 } else { a[n - 1] };
                    let next = ((x - b[n]) * cur - a_prev * prev) * inv_a[n];
                    prev = cur;
                    cur = next;
                }
                let c = Complex64::from_polar(weight, -t * x) * overlap;
                let (mut prev, mut cur) = (0.0, 1.0);
                for n in 0..n_max {
                    acc[n] += c * cur;
                    let a_prev = if n == 0 { 0.0 } else { a[n - 1] };
                    let next = ((x - b[n]) * cur - a_prev * prev) * inv_a[n];
                    prev = cur;
                    cur = next;
                }
            }
            acc
        })
        .collect();

    let mut psi = vec![Complex64::new(0.0, 0.0); n_max];
    for part in partials {
        for (o, v) in psi.iter_mut().zip(part) {
            *o += v;
        }
    }
    Ok(psi)
}
