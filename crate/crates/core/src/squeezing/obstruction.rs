use num_complex::Complex64;

use crate::domain::{inner, norm};
use crate::error::SqueezeError;

pub const DEFAULT_MARGIN: f64 = 1e-3;

/// Smallest `ε` (inflated by `1 + margin`) with `ε λ ‖ζ1 + ζ2‖ > r_d`.
///
/// If `λζ1, λζ2` lie in the indicatrix and its radius along `ζ1 + ζ2` is at
/// most `r_d`, no linear map squeezes it between `B(3ε)` and `B(1)`.
pub fn obstruction_epsilon(
    lambda: f64,
    r_d: f64,
    zeta1: &[Complex64],
    zeta2: &[Complex64],
    margin: f64,
) -> Result<f64, SqueezeError> {
    if !(lambda > 0.0 && lambda.is_finite() && r_d > 0.0 && r_d.is_finite()) {
        return Err(SqueezeError::InvalidArgument("lambda and r_d must be positive".into()));
    }
    if !(margin >= 0.0) {
        return Err(SqueezeError::InvalidArgument("margin must be non-negative".into()));
    }
    if zeta1.len() != zeta2.len() {
        return Err(SqueezeError::InvalidArgument("directions differ in dimension".into()));
    }
    let (a, b) = (norm(zeta1).powi(2), norm(zeta2).powi(2));
    let gram = a * b - inner(zeta1, zeta2).norm_sqr();
    if gram <= 1e-12 * a.max(b).max(1.0).powi(2) {
        return Err(SqueezeError::DegenerateDirections);
    }
    let sum: Vec<Complex64> = zeta1.iter().zip(zeta2).map(|(x, y)| x + y).collect();
    Ok(r_d * (1.0 + margin) / (lambda * norm(&sum)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(n: usize, j: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::default(); n];
        v[j] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn examples() {
        let eps = obstruction_epsilon(1.0, 0.1, &e(3, 0), &e(3, 1), 0.0).unwrap();
        assert!((eps - 0.1 / 2f64.sqrt()).abs() < 1e-15);
        assert!((eps - 0.0707107).abs() < 1e-7);
        let eps = obstruction_epsilon(1.0, 1.0, &e(3, 0), &e(3, 1), 0.0).unwrap();
        assert!((3.0 * eps).min(1.0) == 1.0);
        assert_eq!(obstruction_epsilon(1.0, 1.0, &e(3, 0), &e(3, 0), 0.0), Err(SqueezeError::DegenerateDirections));
        let phase: Vec<Complex64> = e(3, 0).iter().map(|c| c * Complex64::new(0.0, 1.0)).collect();
        assert_eq!(obstruction_epsilon(1.0, 1.0, &e(3, 0), &phase, 0.0), Err(SqueezeError::DegenerateDirections));
    }

    proptest! {
        #[test]
        fn invariant_under_common_scaling(l in 1e-3f64..10.0, r in 1e-3f64..10.0, s in 1e-3f64..1e3) {
            let a = obstruction_epsilon(l, r, &e(3, 0), &e(3, 1), DEFAULT_MARGIN).unwrap();
            let b = obstruction_epsilon(s * l, s * r, &e(3, 0), &e(3, 1), DEFAULT_MARGIN).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }
    }
}
