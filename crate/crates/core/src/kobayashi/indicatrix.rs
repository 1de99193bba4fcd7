use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::certificate::{diag_lower_certificate_variant, diagonal_direction, trivial_lower, CertificateVariant};
use super::disc::DiscSearchConfig;
use super::search::kobayashi_upper;
use super::MetricEstimate;
use crate::domain::{inner, normalized, CPoint, DomainSpec};
use crate::error::KobayashiError;

/// Along a unit direction `e`, the indicatrix `{ζ : K(p, ζ) < 1}` reaches at
/// least `r_lo` and at most `r_hi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatrixEntry {
    pub direction: Vec<Complex64>,
    pub r_lo: f64,
    pub r_hi: f64,
    pub upper: MetricEstimate,
    pub lower: MetricEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatrixData {
    pub basepoint: CPoint,
    pub entries: Vec<IndicatrixEntry>,
}

impl IndicatrixData {
    pub fn entry(&self, direction: &[Complex64]) -> Option<&IndicatrixEntry> {
        let e = normalized(direction)?;
        self.entries.iter().find(|x| inner(&x.direction, &e).norm() > 1.0 - 1e-12)
    }
}

/// `δ` if `p = (0, …, 0, −δ)` with `δ > 0`.
fn sweep_delta(p: &CPoint) -> Option<f64> {
    let (last, rest) = p.coords().split_last()?;
    (rest.iter().all(|c| *c == Complex64::default()) && last.im == 0.0 && last.re < 0.0).then_some(-last.re)
}

/// Best lower estimate available at `(p, e)`.
pub(crate) fn best_lower(dom: &DomainSpec, p: &CPoint, e: &[Complex64]) -> Result<MetricEstimate, KobayashiError> {
    let mut best = trivial_lower(dom, p, e)?;
    let diagonal = inner(e, &diagonal_direction(dom.dimension())).norm() > 1.0 - 1e-12;
    if let (true, Some(delta)) = (diagonal, sweep_delta(p)) {
        for variant in [CertificateVariant::Standard, CertificateVariant::PositiveTerms] {
            if let Ok(est) = diag_lower_certificate_variant(dom, delta, variant) {
                if est.value > best.value {
                    best = MetricEstimate { direction: e.to_vec(), ..est };
                }
            }
        }
    }
    Ok(best)
}

/// Radius intervals of the indicatrix at `p` along each direction.
pub fn indicatrix_radii(
    dom: &DomainSpec,
    p: &CPoint,
    directions: &[Vec<Complex64>],
    cfg: &DiscSearchConfig,
) -> Result<IndicatrixData, KobayashiError> {
    let mut entries = Vec::with_capacity(directions.len());
    for d in directions {
        let e = normalized(d).ok_or_else(|| KobayashiError::InvalidArgument("direction must be nonzero".into()))?;
        let upper = kobayashi_upper(dom, p, &e, cfg)?;
        let lower = best_lower(dom, p, &e)?;
        entries.push(IndicatrixEntry { direction: e, r_lo: 1.0 / upper.value, r_hi: 1.0 / lower.value, upper, lower });
    }
    Ok(IndicatrixData { basepoint: p.clone(), entries })
}
