use num_rational::Rational64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentVariant {
    /// Type `d = 2k`: `1/(4k) − 1/(4k+1)`.
    Standard,
    /// Positive-term family: `1/(2k) − 1/(2k+1)`.
    PositiveTerms,
}

/// Decay exponent of the squeezing bound, `δ^{exponent}`, as an exact rational.
///
/// # Panics
/// If `k == 0`.
pub fn exponent_composition(k: u32, variant: ExponentVariant) -> Rational64 {
    assert!(k >= 1, "k must be at least 1");
    let d = match variant {
        ExponentVariant::Standard => 4 * i64::from(k),
        ExponentVariant::PositiveTerms => 2 * i64::from(k),
    };
    Rational64::new(1, d) - Rational64::new(1, d + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(exponent_composition(2, ExponentVariant::Standard), Rational64::new(1, 72));
        assert_eq!(exponent_composition(3, ExponentVariant::PositiveTerms), Rational64::new(1, 42));
        assert_eq!(exponent_composition(1, ExponentVariant::Standard), Rational64::new(1, 20));
    }

    #[test]
    fn identity_for_small_k() {
        for k in 1..=8u32 {
            let k64 = i64::from(k);
            let e = exponent_composition(k, ExponentVariant::Standard);
            assert_eq!(e * Rational64::from_integer(4 * k64 * (4 * k64 + 1)), Rational64::from_integer(1));
            let d = 2 * k64;
            assert_eq!(e, Rational64::new(1, 2 * d * (2 * d + 1)));
            let p = exponent_composition(k, ExponentVariant::PositiveTerms);
            assert_eq!(p * Rational64::from_integer(2 * k64 * (2 * k64 + 1)), Rational64::from_integer(1));
        }
    }
}
