//! Bessel functions `J_0(x), J_1(x), …` for the Chebyshev expansion of
//! `e^{−ixy}`.

/// Entries below this are dropped from the tail.
const TAIL: f64 = 1e-17;

/// `J_0(x), …, J_K(x)` for `x ≥ 0`, where `K` is the last order with
/// `|J_K(x)| ≥ 1e-17`. Miller's backward recurrence normalized by
/// `J_0 + 2 Σ J_{2k} = 1`.
pub fn bessel_j_sequence(x: f64) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite(), "Bessel argument must be finite and nonnegative");
    if x == 0.0 {
        return vec![1.0];
    }
    let reach = x + 10.0 * x.cbrt() + 20.0;
    let mut start = (reach + (40.0 * reach).sqrt() + 10.0) as usize;
    start += start % 2;

    let mut j = vec![0.0; start + 2];
    j[start] = 1e-30;
    for k in (1..=start).rev() {
        j[k - 1] = 2.0 * k as f64 / x * j[k] - j[k + 1];
        if j[k - 1].abs() > 1e250 {
            for v in &mut j[k - 1..] {
                *v *= 1e-250;
            }
        }
    }
    let norm = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
    for v in &mut j {
        *v /= norm;
    }
    let last = j.iter().rposition(|v| v.abs() >= TAIL).unwrap_or(0);
    j.truncate(last + 1);
    j
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_values() {
        let j = bessel_j_sequence(1.0);
        assert_relative_eq!(j[0], 0.765_197_686_557_966_6, max_relative = 1e-14);
        assert_relative_eq!(j[1], 0.440_050_585_744_933_5, max_relative = 1e-14);
        assert_relative_eq!(j[5], 2.497_577_302_112_344e-4, max_relative = 1e-12);
        let j = bessel_j_sequence(10.0);
        assert_relative_eq!(j[1], 0.043_472_746_168_861_44, max_relative = 1e-12);
        let j = bessel_j_sequence(100.0);
        assert_relative_eq!(j[0], 0.019_985_850_304_223_12, max_relative = 1e-11);
    }

    #[test]
    fn addition_identity_holds() {
        for &x in &[0.3, 7.0, 123.4, 3000.0] {
            let j = bessel_j_sequence(x);
            let s = j[0] * j[0] + 2.0 * j.iter().skip(1).map(|v| v * v).sum::<f64>();
            assert_relative_eq!(s, 1.0, max_relative = 1e-13);
            assert!(j.len() > x as usize);
            assert!(j.len() < x as usize + 30 + 10 * x.cbrt() as usize);
        }
        assert_eq!(bessel_j_sequence(0.0), vec![1.0]);
    }
}
