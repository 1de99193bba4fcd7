use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::obstruction::{obstruction_epsilon, DEFAULT_MARGIN};
use crate::domain::{CPoint, DomainSpec, FamilyTag};
use crate::error::SqueezeError;
use crate::kobayashi::{
    best_lower, diag_lower_certificate, diagonal_direction, epsilon0, kobayashi_upper, lemma10_disc, lemma10_exponent,
    DiscSearchConfig, EstimateKind, MetricEstimate,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `λ` from the disc search, `r_d` from the best available lower bound.
    Numeric,
    /// `λ` from the explicit axis discs, `r_d` from the family's certificate.
    ClosedForm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezeConfig {
    pub disc: DiscSearchConfig,
    pub margin: f64,
    pub mode: Mode,
}

impl Default for SqueezeConfig {
    fn default() -> Self {
        SqueezeConfig { disc: DiscSearchConfig::default(), margin: DEFAULT_MARGIN, mode: Mode::Numeric }
    }
}

pub const NO_CERTIFICATE: &str = "no certificate";

/// `s_Ω(p) ≤ bound` at `p = q + (0, 0, −δ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezingBound {
    pub basepoint: CPoint,
    pub delta: f64,
    pub zeta1: Vec<Complex64>,
    pub zeta2: Vec<Complex64>,
    /// `λζ1, λζ2` lie in the indicatrix.
    pub lambda: Option<f64>,
    /// The indicatrix radius along `ζ1 + ζ2` is at most `r_d`.
    pub r_d: Option<f64>,
    pub epsilon: Option<f64>,
    /// `min(1, 3ε)`, or 1 when no certificate applies.
    pub bound: f64,
    pub mode: Mode,
    pub diagnostic: Option<String>,
    pub trace: Vec<MetricEstimate>,
}

impl SqueezingBound {
    pub fn is_vacuous(&self) -> bool {
        self.epsilon.is_none()
    }

    /// `3ε` before clamping.
    pub fn raw_bound(&self) -> Option<f64> {
        self.epsilon.map(|e| 3.0 * e)
    }

    pub fn k_axis_upper(&self) -> Option<f64> {
        self.lambda.map(|l| 1.0 / l)
    }

    pub fn k_diag_lower(&self) -> Option<f64> {
        self.r_d.map(|r| 1.0 / r)
    }
}

fn unit(n: usize, j: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::default(); n];
    v[j] = Complex64::new(1.0, 0.0);
    v
}

/// `q + (0, …, 0, −δ)`.
pub fn basepoint(dom: &DomainSpec, delta: f64) -> CPoint {
    let mut p = dom.q().coords().to_vec();
    *p.last_mut().unwrap() -= delta;
    CPoint(p)
}

/// Upper bound on the squeezing function at distance `δ` below `q`.
///
/// Domains outside the certified families get the vacuous bound 1 with the
/// diagnostic `"no certificate"`.
pub fn squeezing_upper(dom: &DomainSpec, delta: f64, cfg: &SqueezeConfig) -> Result<SqueezingBound, SqueezeError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(SqueezeError::InvalidArgument("delta must be positive".into()));
    }
    let n = dom.dimension();
    if n < 3 {
        return Err(SqueezeError::InvalidArgument("needs at least two z-coordinates".into()));
    }
    let r = dom.locality_radius();
    if dom.declared_k().is_some() && delta >= r * r {
        return Err(SqueezeError::InvalidArgument(format!("delta must lie in (0, {})", r * r)));
    }
    let (zeta1, zeta2) = (unit(n, 0), unit(n, 1));
    let mut out = SqueezingBound {
        basepoint: basepoint(dom, delta),
        delta,
        zeta1: zeta1.clone(),
        zeta2: zeta2.clone(),
        lambda: None,
        r_d: None,
        epsilon: None,
        bound: 1.0,
        mode: cfg.mode,
        diagnostic: Some(NO_CERTIFICATE.to_string()),
        trace: Vec::new(),
    };
    let Ok(cert) = diag_lower_certificate(dom, delta) else {
        return Ok(out);
    };
    let p = out.basepoint.clone();
    let (lambda, lower) = match cfg.mode {
        Mode::Numeric => {
            let mut lambda = f64::INFINITY;
            for z in [&zeta1, &zeta2] {
                let est = kobayashi_upper(dom, &p, z, &cfg.disc)?;
                lambda = lambda.min(1.0 / est.value);
                out.trace.push(est);
            }
            (lambda, best_lower(dom, &p, &diagonal_direction(n))?)
        }
        Mode::ClosedForm => {
            let e = lemma10_exponent(dom)?;
            let eps = 0.5 * epsilon0(dom, 0)?.min(epsilon0(dom, 1)?);
            for axis in [0, 1] {
                let disc = lemma10_disc(dom, delta, eps, axis)?;
                out.trace.push(MetricEstimate {
                    basepoint: p.clone(),
                    direction: unit(n, axis),
                    value: 1.0 / (eps * delta.powf(e)),
                    kind: EstimateKind::UpperWitness,
                    witness: Some(disc),
                    certificate: None,
                });
            }
            (eps * delta.powf(e), cert)
        }
    };
    let r_d = 1.0 / lower.value;
    out.trace.push(lower);
    let epsilon = obstruction_epsilon(lambda, r_d, &zeta1, &zeta2, cfg.margin)?;
    out.lambda = Some(lambda);
    out.r_d = Some(r_d);
    out.epsilon = Some(epsilon);
    out.bound = (3.0 * epsilon).min(1.0);
    out.diagnostic = None;
    Ok(out)
}

/// Whether the family has closed-form inputs for the pipeline.
pub fn is_certified_family(dom: &DomainSpec) -> bool {
    matches!(dom.family(), FamilyTag::Model | FamilyTag::Herbort)
}
