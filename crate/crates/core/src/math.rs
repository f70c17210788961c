//! Scalar numeric helpers shared across the crate.

/// Probabilities are clipped to `[CLIP, 1 - CLIP]` before taking logs.
pub const PROB_CLIP: f64 = 1e-7;

/// Numerically stable logistic sigmoid.
///
/// Evaluates `1 / (1 + exp(-u))` without overflowing for large `|u|`.
pub fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + libm::exp(-u))
    } else {
        let e = libm::exp(u);
        e / (1.0 + e)
    }
}

/// Clip a probability away from 0 and 1 so its log stays finite.
pub fn clip_prob(p: f64) -> f64 {
    p.clamp(PROB_CLIP, 1.0 - PROB_CLIP)
}

/// Max-shifted log of a sum of exponentials.
pub fn logsumexp(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "logsumexp of empty slice");
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    let sum: f64 = values.iter().map(|&v| libm::exp(v - max)).sum();
    max + libm::log(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_closed_forms() {
        assert!((sigmoid(0.0) - 0.5).abs() < 1e-15);
        assert!((sigmoid(libm::log(3.0)) - 0.75).abs() < 1e-12);
        // symmetry
        for u in [-3.0, -0.5, 0.1, 7.0] {
            assert!((sigmoid(u) + sigmoid(-u) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn sigmoid_extreme_arguments() {
        let tiny = sigmoid(-50.0);
        assert!(tiny > 0.0 && tiny < 1e-20);
        // no overflow or NaN anywhere in the stated range
        for u in [-1e4, -1e3, 1e3, 1e4] {
            let p = sigmoid(u);
            assert!(p.is_finite() && (0.0..=1.0).contains(&p));
        }
        // monotone
        assert!(sigmoid(-1e4) <= sigmoid(-1.0));
        assert!(sigmoid(1.0) <= sigmoid(1e4));
    }

    #[test]
    fn logsumexp_matches_direct() {
        let v = [0.1, -2.0, 1.5];
        let direct = libm::log(v.iter().map(|&x| libm::exp(x)).sum::<f64>());
        assert!((logsumexp(&v) - direct).abs() < 1e-12);
    }

    #[test]
    fn logsumexp_large_shift() {
        let v = [1000.0, 1000.0];
        assert!((logsumexp(&v) - (1000.0 + libm::log(2.0))).abs() < 1e-9);
    }
}
