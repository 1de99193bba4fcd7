//! Reduction of a defining-function jet to the normal form
//! `u + P(z) + Q(z) + v R(z) + u² + v² + (higher order)`,
//! with `P` homogeneous of degree `2k`, `deg Q ≥ 2k+1` and `deg R ≥ k+1`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{levi_form, DomainSpec, LeviQuery};
use crate::error::NormalFormError;
use crate::jet::{Jet, DEFAULT_TRUNCATION};
use crate::poly::{ComplexPoly, HermitianPolynomial, Monomial};

/// Transform parameters at or below this are treated as zero and skipped.
const SKIP_TOL: f64 = 1e-12;

/// Homogeneous parts `(degree, part)` in increasing degree; zero parts omitted.
pub fn homogeneous_parts(p: &ComplexPoly) -> Vec<(u32, ComplexPoly)> {
    let mut out: Vec<(u32, ComplexPoly)> = Vec::new();
    for (m, c) in p.terms() {
        let d = m.degree();
        match out.iter_mut().find(|(deg, _)| *deg == d) {
            Some((_, part)) => part.add_term(m, c),
            None => {
                let mut part = ComplexPoly::zero(p.dimension());
                part.add_term(m, c);
                out.push((d, part));
            }
        }
    }
    out.sort_by_key(|(d, _)| *d);
    out
}

/// All mixed derivatives `∂²p/∂z_i∂conj(z_j)` vanish.
pub fn is_pluriharmonic(p: &ComplexPoly) -> bool {
    let n = p.dimension();
    (0..n).all(|i| {
        let di = p.d_hol(i);
        (0..n).all(|j| di.d_anti(j).is_zero())
    })
}

/// Holomorphic `F` with `Im F = −B`, for pluriharmonic real `B`.
pub fn pluriharmonic_companion(b: &ComplexPoly) -> Result<ComplexPoly, NormalFormError> {
    if !is_pluriharmonic(b) {
        return Err(NormalFormError::NotPluriharmonic);
    }
    let n = b.dimension();
    // B = c0 + 2 Re(Σ c_α z^α), so F = −i (c0 + 2 Σ c_α z^α)
    let mut f = ComplexPoly::zero(n);
    for (m, c) in b.terms() {
        if m.anti_degree(n) > 0 {
            continue;
        }
        let w = if m == Monomial::ONE { Complex64::new(c.re, 0.0) } else { c * 2.0 };
        f.add_term(m, w * Complex64::new(0.0, -1.0));
    }
    Ok(f)
}

/// One coordinate change or unit multiplication, with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transform {
    /// `t = a t̃ + h(z)`.
    LinearT { a: Complex64, h: ComplexPoly },
    /// `t = t̃ + d t̃²`.
    QuadraticT { d: Complex64 },
    /// `ρ ↦ factor · ρ` for a unit `factor`.
    Multiply { factor: Jet },
    /// `t = t̃ / (1 + F(z))`, i.e. `t̃ = t (1 + F)`.
    AbsorbT { f: ComplexPoly },
}

impl Transform {
    pub fn apply(&self, j: &Jet) -> Jet {
        let (m, tr) = (j.z_block(), j.truncation());
        let t = Jet::t(m, tr);
        match self {
            Transform::LinearT { a, h } => j.substitute_t(&t.scale(*a).add(&Jet::from_z_poly(h, 0, 0, tr))),
            Transform::QuadraticT { d } => j.substitute_t(&t.add(&t.mul(&t).scale(*d))),
            Transform::Multiply { factor } => factor.mul(j),
            Transform::AbsorbT { f } => {
                let minus_f = Jet::from_z_poly(f, 0, 0, tr).scale(Complex64::new(-1.0, 0.0));
                let mut series = Jet::constant(m, tr, Complex64::new(1.0, 0.0));
                let mut power = series.clone();
                for _ in 0..tr {
                    power = power.mul(&minus_f);
                    if power.is_empty() {
                        break;
                    }
                    series = series.add(&power);
                }
                j.substitute_t(&t.mul(&series))
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Transform::LinearT { .. } => "linear_t",
            Transform::QuadraticT { .. } => "quadratic_t",
            Transform::Multiply { .. } => "multiply",
            Transform::AbsorbT { .. } => "absorb_t",
        }
    }
}

/// Apply a transform log to a jet.
pub fn replay(original: &Jet, log: &[Transform]) -> Jet {
    log.iter().fold(original.clone(), |j, t| t.apply(&j))
}

fn push(j: &mut Jet, log: &mut Vec<Transform>, t: Transform) {
    *j = t.apply(j);
    log.push(t);
}

fn real_coeff(j: &Jet, a: u8, b: u8) -> f64 {
    j.coeff(j.uv_monomial(a, b)).re
}

/// Normalise the linear part to `u` and remove pluriharmonic pure-z terms of
/// degree at most `max_degree`.
pub fn normalize_linear(j: &Jet, max_degree: u32) -> Result<(Jet, Vec<Transform>), NormalFormError> {
    let mut out = j.clone();
    let mut log = Vec::new();
    if out.coeff(Monomial::ONE).norm() > 1e-10 {
        return Err(NormalFormError::InvalidJet("jet does not vanish at the origin".into()));
    }
    let (alpha, beta) = (real_coeff(&out, 1, 0), real_coeff(&out, 0, 1));
    let c = Complex64::new(alpha, -beta);
    if c.norm() < 1e-14 {
        return Err(NormalFormError::Domain(crate::error::DomainError::DegenerateNormal));
    }
    let a = c.inv();
    if (a - 1.0).norm() > SKIP_TOL {
        push(&mut out, &mut log, Transform::LinearT { a, h: ComplexPoly::zero(j.z_block()) });
    }
    for _ in 0..=max_degree {
        let h = harmonic_low_part(&out.uv_coefficient(0, 0), max_degree);
        if h.is_zero() {
            return Ok((out, log));
        }
        push(&mut out, &mut log, Transform::LinearT { a: Complex64::new(1.0, 0.0), h });
    }
    Err(NormalFormError::TerminationGuard(max_degree as usize + 1))
}

/// `−g` where `Re g` is the pure holomorphic/antiholomorphic part of `p` in
/// degrees `1..=max_degree`.
fn harmonic_low_part(p: &ComplexPoly, max_degree: u32) -> ComplexPoly {
    let n = p.dimension();
    let mut h = ComplexPoly::zero(n);
    for (m, c) in p.terms() {
        let d = m.degree();
        if d == 0 || d > max_degree || m.anti_degree(n) > 0 {
            continue;
        }
        h.add_term(m, -c * 2.0);
    }
    h
}

/// Make the `u², uv, v²` coefficients `(1, 0, 1)`.
pub fn quadratic_normalize(j: &Jet) -> (Jet, Vec<Transform>) {
    let mut out = j.clone();
    let mut log = Vec::new();
    let d = real_coeff(&out, 0, 2) - 1.0;
    if d.abs() > SKIP_TOL {
        push(&mut out, &mut log, Transform::QuadraticT { d: Complex64::new(d, 0.0) });
    }
    let e = 1.0 - real_coeff(&out, 2, 0);
    let e2 = -real_coeff(&out, 1, 1);
    if e.abs() > SKIP_TOL || e2.abs() > SKIP_TOL {
        let (m, tr) = (out.z_block(), out.truncation());
        let factor = Jet::constant(m, tr, Complex64::new(1.0, 0.0))
            .add(&Jet::u(m, tr).scale(Complex64::new(e, 0.0)))
            .add(&Jet::v(m, tr).scale(Complex64::new(e2, 0.0)));
        push(&mut out, &mut log, Transform::Multiply { factor });
    }
    (out, log)
}

/// `u · A(z)` terms with z-degree in `1..=2k`.
pub fn u_linear_part(j: &Jet, k: u32) -> ComplexPoly {
    let a = j.uv_coefficient(1, 0);
    let mut out = ComplexPoly::zero(a.dimension());
    for (m, c) in a.terms() {
        let d = m.degree();
        if (1..=2 * k).contains(&d) {
            out.add_term(m, c);
        }
    }
    out
}

pub fn pass_limit(k: u32) -> usize {
    (2.0 * f64::from(k)).log2().ceil() as usize + 1
}

/// Multiply by `1 − A(z)` until no `u·A` term of z-degree `≤ 2k` remains.
pub fn eliminate_ua(j: &Jet, k: u32) -> Result<(Jet, Vec<Transform>), NormalFormError> {
    let mut out = j.clone();
    let mut log = Vec::new();
    let limit = pass_limit(k);
    for _ in 0..limit {
        let a = u_linear_part(&out, k);
        if a.is_zero() {
            return Ok((out, log));
        }
        let (m, tr) = (out.z_block(), out.truncation());
        let factor = Jet::constant(m, tr, Complex64::new(1.0, 0.0)).sub(&Jet::from_z_poly(&a, 0, 0, tr));
        push(&mut out, &mut log, Transform::Multiply { factor });
    }
    if u_linear_part(&out, k).is_zero() {
        Ok((out, log))
    } else {
        Err(NormalFormError::TerminationGuard(limit))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NormalFormStatus {
    Normalized,
    /// A non-pluriharmonic lowest part `B_l` of the `v`-coefficient with `l ≤ k`.
    PseudoconvexityViolation { l: u32, b_l: ComplexPoly },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFormResult {
    pub jet: Jet,
    pub p: ComplexPoly,
    pub q: ComplexPoly,
    pub r: ComplexPoly,
    pub k: u32,
    pub transform_log: Vec<Transform>,
    pub status: NormalFormStatus,
}

impl NormalFormResult {
    pub fn is_normalized(&self) -> bool {
        self.status == NormalFormStatus::Normalized
    }
}

fn split_pure_z(j: &Jet, k: u32) -> (ComplexPoly, ComplexPoly) {
    let pure = j.uv_coefficient(0, 0);
    let n = pure.dimension();
    let (mut p, mut q) = (ComplexPoly::zero(n), ComplexPoly::zero(n));
    for (m, c) in pure.terms() {
        if m.degree() <= 2 * k {
            p.add_term(m, c);
        } else {
            q.add_term(m, c);
        }
    }
    (p, q)
}

/// `P` must be homogeneous of degree `2k`, non-pluriharmonic and have a
/// positive semidefinite Levi form on sampled points.
pub fn validate_p(p: &ComplexPoly, k: u32) -> Result<(), NormalFormError> {
    let parts = homogeneous_parts(p);
    match parts.as_slice() {
        [] => return Err(NormalFormError::InvalidP("P is zero".into())),
        [(d, _)] if *d == 2 * k => {}
        [(d, _), ..] if *d != 2 * k => {
            return Err(NormalFormError::InvalidP(format!("lowest degree {d} differs from 2k = {}", 2 * k)))
        }
        _ => return Err(NormalFormError::InvalidP("P is not homogeneous".into())),
    }
    if is_pluriharmonic(p) {
        return Err(NormalFormError::InvalidP("P is pluriharmonic".into()));
    }
    if !levi_psd_sampled(p, 512, 0x5eed) {
        return Err(NormalFormError::InvalidP("P is not plurisubharmonic".into()));
    }
    Ok(())
}

/// Sampled check that the Levi form of `p` is nonnegative on the unit polydisc.
pub fn levi_psd_sampled(p: &ComplexPoly, samples: usize, seed: u64) -> bool {
    let Ok(h) = HermitianPolynomial::new(p.clone()) else { return false };
    let n = p.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let disc = |rng: &mut ChaCha8Rng| {
        let r: f64 = rng.random::<f64>().sqrt();
        let th: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        Complex64::from_polar(r, th)
    };
    (0..samples).all(|_| {
        let point: Vec<Complex64> = (0..n).map(|_| disc(&mut rng)).collect();
        let sigma: Vec<Complex64> = (0..n).map(|_| disc(&mut rng)).collect();
        match LeviQuery::new(point, sigma) {
            Ok(q) => levi_form(&h, &q).map(|x| x >= -1e-10).unwrap_or(false),
            Err(_) => true,
        }
    })
}

/// Full reduction: linear normalisation, quadratic normalisation, removal of
/// `u·A` terms and absorption of pluriharmonic `v`-terms of degree `≤ k`.
pub fn reduce_to_normal_form(j: &Jet, k: u32) -> Result<NormalFormResult, NormalFormError> {
    if k == 0 {
        return Err(NormalFormError::InvalidP("k must be positive".into()));
    }
    if j.hermitian_defect() > 1e-10 {
        return Err(NormalFormError::InvalidJet("jet is not real-valued".into()));
    }
    let (mut cur, mut log) = normalize_linear(j, 2 * k)?;
    let (p, _) = split_pure_z(&cur, k);
    validate_p(&p, k)?;

    let stage = |cur: &mut Jet, log: &mut Vec<Transform>| -> Result<(), NormalFormError> {
        let (next, l1) = quadratic_normalize(cur);
        let (next, l2) = eliminate_ua(&next, k)?;
        log.extend(l1);
        log.extend(l2);
        *cur = next;
        Ok(())
    };
    stage(&mut cur, &mut log)?;

    let rounds = 4 * k as usize;
    let mut status = None;
    for _ in 0..=rounds {
        let b = cur.uv_coefficient(0, 1);
        let Some((s, b_s)) = homogeneous_parts(&b).into_iter().next() else {
            status = Some(NormalFormStatus::Normalized);
            break;
        };
        if s > k {
            status = Some(NormalFormStatus::Normalized);
            break;
        }
        if !is_pluriharmonic(&b_s) {
            status = Some(NormalFormStatus::PseudoconvexityViolation { l: s, b_l: b_s });
            break;
        }
        let f = pluriharmonic_companion(&b_s)?;
        push(&mut cur, &mut log, Transform::AbsorbT { f });
        stage(&mut cur, &mut log)?;
    }
    let status = status.ok_or(NormalFormError::TerminationGuard(rounds))?;
    let (p, q) = split_pure_z(&cur, k);
    let r = cur.uv_coefficient(0, 1);
    Ok(NormalFormResult { jet: cur, p, q, r, k, transform_log: log, status })
}

/// Lowest homogeneous degree of `P`; must be even.
pub fn detect_model_type(r: &NormalFormResult) -> Result<u32, NormalFormError> {
    if !r.is_normalized() {
        return Err(NormalFormError::NotNormalized);
    }
    let d = homogeneous_parts(&r.p).first().map(|(d, _)| *d).ok_or(NormalFormError::InvalidP("P is zero".into()))?;
    if d % 2 != 0 {
        return Err(NormalFormError::OddDegree(d));
    }
    Ok(d)
}

/// Lowest degree of a non-pluriharmonic pure-z part once the linear part is
/// normalised; half of it is the `k` to reduce with.
pub fn infer_k(j: &Jet) -> Result<u32, NormalFormError> {
    let (cur, _) = normalize_linear(j, j.truncation())?;
    let pure = cur.uv_coefficient(0, 0);
    let d = homogeneous_parts(&pure)
        .into_iter()
        .find(|(_, part)| !is_pluriharmonic(part))
        .map(|(d, _)| d)
        .ok_or_else(|| NormalFormError::InvalidP("no non-pluriharmonic pure-z part".into()))?;
    if d % 2 != 0 {
        return Err(NormalFormError::OddDegree(d));
    }
    Ok(d / 2)
}

/// Normal form of a domain at its boundary point.
pub fn normal_form_of_domain(dom: &DomainSpec, k: Option<u32>) -> Result<NormalFormResult, NormalFormError> {
    let j = Jet::from_defining(dom.rho(), dom.q().coords(), DEFAULT_TRUNCATION)?;
    let k = match k.or(dom.declared_k()) {
        Some(k) => k,
        None => infer_k(&j)?,
    };
    reduce_to_normal_form(&j, k)
}
