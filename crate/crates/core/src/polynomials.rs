//! Orthogonal polynomials `p_n` of the spectral measure of `δ_1`, and the
//! Chebyshev-type kernel `ρ_ℓ = sin(ℓΘ)/sin Θ`.

use crate::error::{Error, Result};
use crate::operator::JacobiOperator;
use crate::transfer::{transfer_matrix, MonodromyData};

/// `p_0(x), …, p_N(x)` from the three-term recurrence
/// `a_n p_n = (x − b_n) p_{n−1} − a_{n−1} p_{n−2}` with `p_{−1} = 0`,
/// `p_0 = 1` and `a_0 = 1`.
pub fn poly_recurrence(op: &JacobiOperator, x: f64, n: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0);
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut a_prev = 1.0;
    for k in 1..=n {
        let a = op.a(k);
        let next = ((x - op.b(k)) * cur - a_prev * prev) / a;
        prev = cur;
        cur = next;
        a_prev = a;
        p.push(cur);
    }
    p
}

/// `ρ_0, …, ρ_L` for a given discriminant value, via
/// `ρ_0 = 0, ρ_1 = 1, ρ_{ℓ+1} = Δ ρ_ℓ − ρ_{ℓ−1}`.
pub fn rho_sequence(delta: f64, last: usize) -> Vec<f64> {
    let mut r = Vec::with_capacity(last + 1);
    r.push(0.0);
    if last >= 1 {
        r.push(1.0);
    }
    for l in 1..last {
        let next = delta * r[l] - r[l - 1];
        r.push(next);
    }
    r
}

/// `ρ_ℓ(x)` for `|Δ(x)| ≤ 2`. Finite at band edges, where it equals
/// `ℓ` (Δ = 2) or `(−1)^{ℓ−1} ℓ` (Δ = −2).
pub fn rho(mono: &MonodromyData, l: usize, x: f64) -> f64 {
    rho_sequence(mono.delta(x), l)[l]
}

/// `p_n(x)` through the monodromy power: `n = sq + r`,
/// `p_n = [A_r ⋯ A_1 T_{sq}]_{11}`.
pub fn poly_closed_form(mono: &MonodromyData, x: f64, n: usize) -> Result<f64> {
    let delta = mono.delta(x);
    if !(delta.abs() < 2.0) {
        return Err(Error::OutsideBandInterior { x, abs_delta: delta.abs() });
    }
    let op = mono.operator();
    let q = op.period();
    let (s, r) = (n / q, n % q);
    let power = mono.power_via_rho(s, x)?;
    Ok((transfer_matrix(op, r, x) * power).m11)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn laplacian_gives_chebyshev_u() {
        let lap = JacobiOperator::laplacian();
        for &theta in &[0.3, 1.1, 2.0, 2.9] {
            let x = 2.0 * f64::cos(theta);
            let p = poly_recurrence(&lap, x, 30);
            for (n, v) in p.iter().enumerate() {
                let expected = ((n + 1) as f64 * theta).sin() / theta.sin();
                assert_abs_diff_eq!(*v, expected, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn first_polynomial() {
        let op = JacobiOperator::new(vec![0.7, 1.9], vec![0.25, -0.5]).unwrap();
        for &x in &[-3.0, 0.0, 1.2] {
            let p = poly_recurrence(&op, x, 1);
            assert_eq!(p[0], 1.0);
            assert_abs_diff_eq!(p[1], (x - 0.25) / 0.7, epsilon = 1e-15);
        }
    }

    #[test]
    fn ssh_edge_state_values() {
        let ssh = JacobiOperator::new(vec![1.0, 2.0], vec![0.0, 0.0]).unwrap();
        let p = poly_recurrence(&ssh, 0.0, 4);
        assert_eq!(p, vec![1.0, 0.0, -0.5, 0.0, 0.25]);
    }

    #[test]
    fn rho_examples() {
        let lap = MonodromyData::new(&JacobiOperator::laplacian());
        let ssh = MonodromyData::new(&JacobiOperator::new(vec![1.0, 2.0], vec![0.0, 0.0]).unwrap());
        for &x in &[-2.5, 0.4, 1.5] {
            assert_abs_diff_eq!(rho(&ssh, 2, x), ssh.delta(x), epsilon = 1e-14);
        }
        // Δ = 2 at x = 3 for SSH and x = 2 for the Laplacian
        for l in 0..12 {
            assert_abs_diff_eq!(rho(&ssh, l, 3.0), l as f64, epsilon = 1e-12);
            assert_abs_diff_eq!(rho(&lap, l, 2.0), l as f64, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(rho(&lap, 3, 0.0), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn rho_matches_sine_quotient_inside_bands() {
        let lap = MonodromyData::new(&JacobiOperator::laplacian());
        for &x in &[-1.7, -0.2, 0.9, 1.95] {
            let theta = -(x / 2.0f64).acos();
            for l in 0..40 {
                let q = (l as f64 * theta).sin() / theta.sin();
                assert_abs_diff_eq!(rho(&lap, l, x), q, epsilon = 1e-9 * (1.0 + q.abs()));
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let op = JacobiOperator::new(vec![0.8, 1.3, 1.1], vec![0.1, -0.4, 0.6]).unwrap();
        let m = MonodromyData::new(&op);
        // pick an interior point: scan for |Δ| < 1
        let x = (0..400).map(|i| -4.0 + i as f64 * 0.02).find(|&x| m.delta(x).abs() < 1.0).unwrap();
        assert_eq!(poly_closed_form(&m, x, 0).unwrap(), 1.0);
        for s in 1..6 {
            let (t11, rho_s) = (m.t11(x), rho(&m, s, x));
            let expected = t11 * rho_s - rho(&m, s - 1, x);
            assert_abs_diff_eq!(poly_closed_form(&m, x, 3 * s).unwrap(), expected, epsilon = 1e-12);
        }
        let p = poly_recurrence(&op, x, 30);
        for (n, want) in p.iter().enumerate() {
            let got = poly_closed_form(&m, x, n).unwrap();
            assert_abs_diff_eq!(got, *want, epsilon = 1e-10 * (1.0 + want.abs()));
        }
        let far = 10.0;
        assert!(poly_closed_form(&m, far, 4).is_err());
    }
}
