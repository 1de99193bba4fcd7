//! Lower bounds on the Kobayashi metric.
//!
//! For `ρ = Re t + Σ c_α |z^α|²` with `c_α > 0`, every disc `φ = (f, g)` in
//! `Ω` with `φ(0) = (0, −δ)` and `φ′(0) = β ζ` satisfies
//! `mean_θ Σ c_α |f^α(s e^{iθ})|² < −mean_θ Re g = δ`, and the `τ^{|α|}`
//! coefficient of `f^α` is `(βζ)^α`. Parseval then gives
//! `c_α |β|^{2|α|} |ζ^α|² ≤ δ` for every `α`, hence
//! `K(p, ζ) ≥ (c_α |ζ^α|²)^{1/(2|α|)} δ^{−1/(2|α|)}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CertificateRecord, EstimateKind, MetricEstimate};
use crate::domain::{inner, norm, normalized, sub, CPoint, DomainSpec, FamilyTag};
use crate::error::KobayashiError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateVariant {
    /// `c · δ^{−1/(4k)}`, valid for `δ ≤ r_loc²`; needs the degree-`2k` part
    /// to vanish on both axes.
    Standard,
    /// `c · δ^{−1/(2k)}`.
    PositiveTerms,
}

impl CertificateVariant {
    pub fn exponent(self, k: u32) -> f64 {
        match self {
            CertificateVariant::Standard => 1.0 / f64::from(4 * k),
            CertificateVariant::PositiveTerms => 1.0 / f64::from(2 * k),
        }
    }
}

/// `(1, 1, 0, …, 0)/√2`, the direction bisecting the first two axes.
pub fn diagonal_direction(n: usize) -> Vec<Complex64> {
    let mut z = vec![Complex64::default(); n];
    z[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    z[1] = z[0];
    z
}

/// Exponent vectors and coefficients of `ρ − Re t`, if `ρ` has the form
/// `Re t + Σ c_α |z^α|²` with every `c_α > 0`.
fn positive_terms(dom: &DomainSpec) -> Result<Vec<(Vec<u32>, f64)>, KobayashiError> {
    let n = dom.dimension();
    let fail = |why: &str| KobayashiError::DomainNotInCertifiedForm(why.to_string());
    if n < 3 {
        return Err(fail("needs at least two z-coordinates"));
    }
    if norm(dom.q().coords()) != 0.0 {
        return Err(fail("boundary point must be the origin"));
    }
    let t = n - 1;
    let mut re_t = 0;
    let mut out = Vec::new();
    for (m, c) in dom.rho().as_poly().terms() {
        let t_deg = m.field(t) + m.field(n + t);
        if t_deg > 0 {
            let linear = m.degree() == 1 && (c - Complex64::new(0.5, 0.0)).norm() < 1e-12;
            if !linear {
                return Err(fail("t must enter only through Re t"));
            }
            re_t += 1;
            continue;
        }
        let alpha: Vec<u32> = (0..t).map(|j| u32::from(m.field(j))).collect();
        if (0..t).any(|j| m.field(j) != m.field(n + j)) || m.degree() == 0 {
            return Err(fail("every z-term must be of the form |z^α|²"));
        }
        if !(c.im.abs() < 1e-12 && c.re > 0.0) {
            return Err(fail("every |z^α|² coefficient must be positive"));
        }
        out.push((alpha, c.re));
    }
    if re_t != 2 {
        return Err(fail("ρ must contain Re t"));
    }
    Ok(out)
}

/// The constant `c` of `K ≥ c · δ^{−exponent}` along the diagonal.
pub fn certificate_constant(dom: &DomainSpec, variant: CertificateVariant) -> Result<(u32, f64), KobayashiError> {
    let fail = |why: String| KobayashiError::DomainNotInCertifiedForm(why);
    match (dom.family(), variant) {
        (FamilyTag::Model, _) | (FamilyTag::Herbort, CertificateVariant::PositiveTerms) => {}
        (f, v) => return Err(fail(format!("{v:?} certificate does not apply to the {} family", f.as_str()))),
    }
    let k = dom.declared_k().ok_or_else(|| fail("no declared k".into()))?;
    let terms = positive_terms(dom)?;
    let top: Vec<&(Vec<u32>, f64)> = terms.iter().filter(|(a, _)| a.iter().sum::<u32>() == k).collect();
    if top.is_empty() {
        return Err(fail(format!("no |z^α|² term with |α| = {k}")));
    }
    if variant == CertificateVariant::Standard && top.iter().any(|(a, _)| a[0] == 0 || a[1] == 0) {
        return Err(fail("degree-2k part must vanish on both axes".into()));
    }
    let c_pt = top
        .iter()
        .map(|(_, c)| (c * 0.5f64.powi(k as i32)).powf(1.0 / f64::from(2 * k)))
        .fold(0.0, f64::max);
    Ok(match variant {
        CertificateVariant::PositiveTerms => (k, c_pt),
        CertificateVariant::Standard => (k, c_pt * dom.locality_radius().powf(-1.0 / f64::from(2 * k))),
    })
}

/// Lower bound at `(0, 0, −δ)` along the diagonal, with the variant that
/// matches the family: standard for the model, positive terms otherwise.
pub fn diag_lower_certificate(dom: &DomainSpec, delta: f64) -> Result<MetricEstimate, KobayashiError> {
    let variant = match dom.family() {
        FamilyTag::Model => CertificateVariant::Standard,
        _ => CertificateVariant::PositiveTerms,
    };
    diag_lower_certificate_variant(dom, delta, variant)
}

pub fn diag_lower_certificate_variant(
    dom: &DomainSpec,
    delta: f64,
    variant: CertificateVariant,
) -> Result<MetricEstimate, KobayashiError> {
    let (k, c) = certificate_constant(dom, variant)?;
    let r = dom.locality_radius();
    let limit = match variant {
        CertificateVariant::Standard => r * r,
        CertificateVariant::PositiveTerms => r,
    };
    if !(delta > 0.0 && delta <= limit) {
        return Err(KobayashiError::InvalidArgument(format!("delta must lie in (0, {limit}]")));
    }
    let p = super::search::sweep_point(dom, delta);
    if !dom.contains(p.coords())? {
        return Err(KobayashiError::PointOutsideDomain);
    }
    let exponent = variant.exponent(k);
    Ok(MetricEstimate {
        basepoint: p,
        direction: diagonal_direction(dom.dimension()),
        value: c * delta.powf(-exponent),
        kind: EstimateKind::LowerCertificate,
        witness: None,
        certificate: Some(CertificateRecord { variant, k, delta, constant: c, exponent }),
    })
}

/// Exact `K(p, ζ)` for the ball of radius `r` about the origin.
pub fn ball_exact(r: f64, p: &[Complex64], zeta: &[Complex64]) -> Result<f64, KobayashiError> {
    if p.len() != zeta.len() {
        return Err(KobayashiError::InvalidArgument("point and direction dimensions differ".into()));
    }
    if !(r > 0.0) {
        return Err(KobayashiError::InvalidArgument("radius must be positive".into()));
    }
    let a: Vec<Complex64> = p.iter().map(|x| x / r).collect();
    let v: Vec<Complex64> = zeta.iter().map(|x| x / r).collect();
    let a2 = norm(&a).powi(2);
    if a2 >= 1.0 {
        return Err(KobayashiError::PointOutsideDomain);
    }
    let v2 = norm(&v).powi(2);
    if a2 == 0.0 {
        return Ok(v2.sqrt());
    }
    // Derivative of the automorphism moving a to 0, split along a and a⊥.
    let s = 1.0 - a2;
    let along = inner(&v, &a).norm_sqr() / a2;
    Ok((along / (s * s) + (v2 - along) / s).sqrt())
}

/// Larger of the exact metrics of `ball(0, bounding_radius)` and
/// `ball(q, locality_radius)`, both of which contain the working domain.
pub fn trivial_lower(dom: &DomainSpec, p: &CPoint, zeta: &[Complex64]) -> Result<MetricEstimate, KobayashiError> {
    dom.rho().check_dim(p.dim())?;
    dom.rho().check_dim(zeta.len())?;
    let e = normalized(zeta).ok_or_else(|| KobayashiError::InvalidArgument("direction must be nonzero".into()))?;
    let outer = ball_exact(dom.bounding_radius(), p.coords(), zeta)?;
    let local = ball_exact(dom.locality_radius(), &sub(p.coords(), dom.q().coords()), zeta)?;
    Ok(MetricEstimate {
        basepoint: p.clone(),
        direction: e,
        value: outer.max(local),
        kind: EstimateKind::LowerTrivialBall,
        witness: None,
        certificate: None,
    })
}
