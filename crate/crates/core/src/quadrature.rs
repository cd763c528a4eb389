//! Gauss–Legendre rules, single-interval and composite.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Tricomi initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let k = (i + 1) as f64;
            let mut x = (PI * (k - 0.25) / (nf + 0.5)).cos() * (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.mapped(lo, hi).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Composite rule: `panels` equal panels on `[lo, hi]`, each with the given
/// base rule.
pub fn composite(rule: &GaussLegendre, lo: f64, hi: f64, panels: usize) -> Vec<(f64, f64)> {
    let width = (hi - lo) / panels as f64;
    (0..panels)
        .flat_map(|p| {
            let a = lo + p as f64 * width;
            rule.mapped(a, a + width).collect::<Vec<_>>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn low_order_rules() {
        let g = GaussLegendre::new(2);
        let s = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(g.nodes[0], -s, epsilon = 1e-15);
        assert_abs_diff_eq!(g.nodes[1], s, epsilon = 1e-15);
        assert_abs_diff_eq!(g.weights[0], 1.0, epsilon = 1e-15);

        let g = GaussLegendre::new(3);
        assert_abs_diff_eq!(g.nodes[2], (0.6f64).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(g.weights[1], 8.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn exact_for_high_degree_polynomials() {
        for &n in &[16, 64, 256] {
            let g = GaussLegendre::new(n);
            assert_abs_diff_eq!(g.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            let deg = 2 * n - 2;
            let got = g.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
            assert_abs_diff_eq!(got, 2.0 / (deg as f64 + 1.0), epsilon = 1e-13);
        }
    }

    #[test]
    fn oscillatory_integral() {
        // ∫_0^π sin x cos kx dx = 2/(1 − k²) for even k
        let g = GaussLegendre::new(16);
        let nodes = composite(&g, 0.0, PI, 20);
        let got: f64 = nodes.iter().map(|(x, w)| w * (40.0 * x).cos() * x.sin()).sum();
        assert_abs_diff_eq!(got, 2.0 / (1.0 - 1600.0), epsilon = 1e-14);
    }
}
