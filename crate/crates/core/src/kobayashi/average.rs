use crate::error::KobayashiError;

/// Trapezoid average of equispaced samples of a function on a circle.
///
/// Exact for trigonometric polynomials of degree below half the sample count.
pub fn circle_average(samples: &[f64]) -> Result<f64, KobayashiError> {
    if samples.len() < 16 {
        return Err(KobayashiError::InvalidArgument(format!(
            "circle_average needs at least 16 samples, got {}",
            samples.len()
        )));
    }
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}
