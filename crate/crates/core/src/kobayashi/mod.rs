//! Kobayashi-metric estimates.
//!
//! Upper bounds come from admissible analytic discs: if `φ: Δ → Ω` has
//! `φ(0) = p` and `φ′(0) = β ζ/‖ζ‖`, then `K(p, ζ) ≤ ‖ζ‖/β`. Lower bounds
//! come from the exact metric of a ball containing the domain and from a
//! closed-form certificate for the diagonal direction of the model and
//! positive-term families.

mod average;
mod certificate;
mod disc;
mod indicatrix;
mod oracle;
mod search;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::CPoint;

pub use average::circle_average;
pub use certificate::{
    ball_exact, certificate_constant, diag_lower_certificate, diag_lower_certificate_variant, diagonal_direction,
    trivial_lower, CertificateVariant,
};
pub use disc::{disc_admissible, AdmissibilityReport, AnalyticDisc, DiscSearchConfig, Verdict};
pub(crate) use indicatrix::best_lower;
pub use indicatrix::{indicatrix_radii, IndicatrixData, IndicatrixEntry};
pub use oracle::{grid_oracle, GridSpec, OracleResult};
pub use search::{
    admissibility_threshold, epsilon0, kobayashi_upper, lemma10_disc, lemma10_exponent, nelder_mead, sweep_point,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    UpperWitness,
    LowerCertificate,
    LowerTrivialBall,
}

/// `value ≥ K` (upper) or `value ≤ K` (lower) at `(basepoint, direction)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricEstimate {
    pub basepoint: CPoint,
    /// Unit direction.
    pub direction: Vec<Complex64>,
    pub value: f64,
    pub kind: EstimateKind,
    pub witness: Option<AnalyticDisc>,
    pub certificate: Option<CertificateRecord>,
}

/// `K ≥ constant · δ^(−exponent)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub variant: CertificateVariant,
    pub k: u32,
    pub delta: f64,
    pub constant: f64,
    pub exponent: f64,
}
