//! Numeric tolerances shared by every module.

/// Allowed deviation of a probability vector's sum from 1 before rejection.
pub const TAU_NORM: f64 = 1e-9;

/// Relative tolerance for equality and sign checks.
pub const TAU_NUM: f64 = 1e-9;

/// Max-norm distance under which two posteriors are the same class.
pub const TAU_DEDUP: f64 = 1e-9;

/// Minimum gap between scores that counts as "distinct".
pub const TAU_SEP: f64 = 1e-9;

/// Default resource guard on exhaustive partition scans.
pub const DEFAULT_MAX_N: usize = 13;

/// Smallest outcome space handled.
pub const MIN_OUTCOMES: usize = 3;

/// `|a - b| <= TAU_NUM * max(1, |a|, |b|)`.
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= TAU_NUM * 1f64.max(a.abs()).max(b.abs())
}

/// Width of the band around zero inside which an expectation of `values` counts as zero.
pub fn sign_band(values: &[f64]) -> f64 {
    let scale = values.iter().fold(1f64, |acc, v| acc.max(v.abs()));
    TAU_NUM * scale
}

/// Largest absolute componentwise difference.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn approx_eq_is_relative_above_one() {
        assert!(approx_eq(1e6, 1e6 + 1e-4));
        assert!(!approx_eq(1.0, 1.0 + 1e-8));
        assert!(approx_eq(0.0, 5e-10));
    }

    #[test]
    fn sign_band_scales_with_magnitude() {
        assert_eq!(sign_band(&[0.5, -0.2]), TAU_NUM);
        assert_eq!(sign_band(&[100.0, -3.0]), 100.0 * TAU_NUM);
    }
}
