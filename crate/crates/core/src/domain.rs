//! Domains `{ρ < 0}` near a boundary point, the built-in example families,
//! Levi forms and orders of contact.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::DomainError;
use crate::poly::{ComplexPoly, HermitianPolynomial};

/// Point of `C^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CPoint(pub Vec<Complex64>);

impl CPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self, DomainError> {
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(DomainError::InvalidParameters("non-finite coordinate".into()));
        }
        Ok(CPoint(coords))
    }

    pub fn real(coords: &[f64]) -> Self {
        CPoint(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn origin(n: usize) -> Self {
        CPoint(vec![Complex64::default(); n])
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `Σ a_j conj(b_j)`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn normalized(v: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = norm(v);
    (n > 0.0).then(|| v.iter().map(|c| c / n).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    Model,
    Herbort,
    ConvexControl,
    Ball,
    Custom,
}

impl FamilyTag {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyTag::Model => "model",
            FamilyTag::Herbort => "herbort",
            FamilyTag::ConvexControl => "convex_control",
            FamilyTag::Ball => "ball",
            FamilyTag::Custom => "custom",
        }
    }
}

/// Parameters of the model family `Re t + |z^a w^b|^2 + |z|^{2m} + |w|^{2m}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelParams {
    pub k: u32,
    pub m: u32,
    pub a: u32,
    pub b: u32,
}

impl ModelParams {
    /// Default axis exponent `m = 2k+1` and the most balanced split.
    pub fn new(k: u32) -> Self {
        ModelParams { k, m: 2 * k + 1, a: k - k / 2, b: k / 2 }
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        let bad = |msg: String| Err(DomainError::InvalidParameters(msg));
        if self.k < 2 {
            // every degree-2 form vanishing on both axes is 2Re(h z conj w) + Re(c z w);
            // its Levi matrix [[0,h],[conj h,0]] is indefinite unless h = 0
            return bad(format!("k = {} < 2 admits no plurisubharmonic, non-pluriharmonic P", self.k));
        }
        if self.a < 1 || self.b < 1 || self.a + self.b != self.k {
            return bad(format!("split (a, b) = ({}, {}) must be positive with a + b = k", self.a, self.b));
        }
        if 2 * self.m <= 4 * self.k {
            return bad(format!("axis exponent 2m = {} must exceed 4k = {}", 2 * self.m, 4 * self.k));
        }
        Ok(())
    }
}

/// Declarative description of a built-in domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Builtin {
    Model(ModelParams),
    Herbort,
    ConvexControl,
    Ball { r: f64 },
}

/// A domain `Ω = {ρ < 0}` localized to `U = ball(q, locality_radius)`.
#[derive(Clone, Debug)]
pub struct DomainSpec {
    rho: HermitianPolynomial,
    q: CPoint,
    locality_radius: f64,
    bounding_radius: f64,
    declared_k: Option<u32>,
    declared_d: Option<u32>,
    family: FamilyTag,
    builtin: Option<Builtin>,
    plurisubharmonic: bool,
    gradient: Vec<ComplexPoly>,
}

/// Optional metadata when assembling a [`DomainSpec`] by hand.
#[derive(Clone, Debug, Default)]
pub struct DomainMeta {
    pub bounding_radius: Option<f64>,
    pub declared_k: Option<u32>,
    pub declared_d: Option<u32>,
    pub plurisubharmonic: bool,
}

const BOUNDARY_TOL: f64 = 1e-12;

impl DomainSpec {
    pub fn new(
        rho: HermitianPolynomial,
        q: CPoint,
        locality_radius: f64,
        meta: DomainMeta,
    ) -> Result<Self, DomainError> {
        rho.check_dim(q.dim())?;
        if !(locality_radius > 0.0 && locality_radius.is_finite()) {
            return Err(DomainError::InvalidParameters("locality_radius must be positive".into()));
        }
        let value = rho.evaluate(q.coords())?;
        // Roundoff in ρ(q) grows with the size of the terms it cancels.
        let n = rho.dimension();
        let scale: f64 = rho
            .as_poly()
            .terms()
            .map(|(m, c)| {
                c.norm() * (0..n).map(|j| q.coords()[j].norm().powi(i32::from(m.field(j)) + i32::from(m.field(n + j)))).product::<f64>()
            })
            .sum();
        if value.abs() > BOUNDARY_TOL * scale.max(1.0) {
            return Err(DomainError::NotOnBoundary { value });
        }
        let gradient: Vec<ComplexPoly> =
            (0..rho.dimension()).map(|j| rho.as_poly().d_hol(j)).collect();
        let g: Vec<Complex64> = gradient.iter().map(|d| d.evaluate(q.coords())).collect();
        if norm(&g) <= BOUNDARY_TOL {
            return Err(DomainError::ZeroGradient);
        }
        let bounding_radius = meta.bounding_radius.unwrap_or(norm(q.coords()) + locality_radius);
        if !(bounding_radius > 0.0) {
            return Err(DomainError::InvalidParameters("bounding_radius must be positive".into()));
        }
        let declared_d = meta.declared_d.or(meta.declared_k.map(|k| 2 * k));
        let declared_k = meta.declared_k.or(declared_d.map(|d| d / 2));
        if let (Some(k), Some(d)) = (declared_k, declared_d) {
            if d != 2 * k {
                return Err(DomainError::InvalidParameters(format!("declared d = {d} but k = {k}")));
            }
        }
        Ok(DomainSpec {
            rho,
            q,
            locality_radius,
            bounding_radius,
            declared_k,
            declared_d,
            family: FamilyTag::Custom,
            builtin: None,
            plurisubharmonic: meta.plurisubharmonic,
            gradient,
        })
    }

    pub fn builtin(spec: Builtin) -> Result<Self, DomainError> {
        match spec {
            Builtin::Model(p) => Self::model(p),
            Builtin::Herbort => Self::herbort(),
            Builtin::ConvexControl => Self::convex_control(),
            Builtin::Ball { r } => Self::ball(r),
        }
    }

    /// `‖Z‖² − r²` with boundary point `(0, 0, r)`; the locality ball of
    /// radius `2r` around it contains the whole ball.
    pub fn ball(r: f64) -> Result<Self, DomainError> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(DomainError::InvalidParameters("ball radius must be positive".into()));
        }
        let n = 3;
        let mut p = ComplexPoly::constant(n, Complex64::new(-r * r, 0.0));
        for j in 0..n {
            p = p.add(&abs_pow(n, j, 1));
        }
        let q = CPoint::real(&[0.0, 0.0, r]);
        let meta = DomainMeta {
            bounding_radius: Some(r),
            declared_k: Some(1),
            declared_d: Some(2),
            plurisubharmonic: true,
        };
        let mut dom = Self::new(HermitianPolynomial::new(p)?, q, 3.0 * r, meta)?;
        dom.family = FamilyTag::Ball;
        dom.builtin = Some(Builtin::Ball { r });
        Ok(dom)
    }

    pub fn model(params: ModelParams) -> Result<Self, DomainError> {
        params.validate()?;
        let n = 3;
        let one = Complex64::new(1.0, 0.0);
        let p = re_t(n)
            .add(&ComplexPoly::monomial(
                n,
                &[params.a as u8, params.b as u8, 0],
                &[params.a as u8, params.b as u8, 0],
                one,
            ))
            .add(&abs_pow(n, 0, params.m))
            .add(&abs_pow(n, 1, params.m));
        let meta = DomainMeta {
            bounding_radius: None,
            declared_k: Some(params.k),
            declared_d: Some(2 * params.k),
            plurisubharmonic: true,
        };
        let mut dom = Self::new(HermitianPolynomial::new(p)?, CPoint::origin(n), 0.5, meta)?;
        dom.family = FamilyTag::Model;
        dom.builtin = Some(Builtin::Model(params));
        Ok(dom)
    }

    /// `Re t + |z|^12 + |w|^12 + |z|^2|w|^4 + |z|^6|w|^2`.
    pub fn herbort() -> Result<Self, DomainError> {
        let n = 3;
        let one = Complex64::new(1.0, 0.0);
        let p = re_t(n)
            .add(&abs_pow(n, 0, 6))
            .add(&abs_pow(n, 1, 6))
            .add(&ComplexPoly::monomial(n, &[1, 2, 0], &[1, 2, 0], one))
            .add(&ComplexPoly::monomial(n, &[3, 1, 0], &[3, 1, 0], one));
        let meta = DomainMeta {
            bounding_radius: None,
            declared_k: Some(3),
            declared_d: Some(6),
            plurisubharmonic: true,
        };
        let mut dom = Self::new(HermitianPolynomial::new(p)?, CPoint::origin(n), 0.5, meta)?;
        dom.family = FamilyTag::Herbort;
        dom.builtin = Some(Builtin::Herbort);
        Ok(dom)
    }

    /// `|t|² + |z|² + |w|⁶ − 1` at `q = (0, 0, 1)`.
    pub fn convex_control() -> Result<Self, DomainError> {
        let n = 3;
        let p = abs_pow(n, 2, 1)
            .add(&abs_pow(n, 0, 1))
            .add(&abs_pow(n, 1, 3))
            .add(&ComplexPoly::constant(n, Complex64::new(-1.0, 0.0)));
        let meta = DomainMeta {
            bounding_radius: None,
            declared_k: Some(1),
            declared_d: Some(2),
            plurisubharmonic: true,
        };
        let q = CPoint::real(&[0.0, 0.0, 1.0]);
        let mut dom = Self::new(HermitianPolynomial::new(p)?, q, 0.5, meta)?;
        dom.family = FamilyTag::ConvexControl;
        dom.builtin = Some(Builtin::ConvexControl);
        Ok(dom)
    }

    pub fn rho(&self) -> &HermitianPolynomial {
        &self.rho
    }

    pub fn q(&self) -> &CPoint {
        &self.q
    }

    pub fn dimension(&self) -> usize {
        self.rho.dimension()
    }

    pub fn locality_radius(&self) -> f64 {
        self.locality_radius
    }

    pub fn bounding_radius(&self) -> f64 {
        self.bounding_radius
    }

    pub fn declared_k(&self) -> Option<u32> {
        self.declared_k
    }

    pub fn declared_d(&self) -> Option<u32> {
        self.declared_d
    }

    pub fn family(&self) -> FamilyTag {
        self.family
    }

    pub fn builtin_spec(&self) -> Option<Builtin> {
        self.builtin
    }

    /// Whether `ρ` is known to be plurisubharmonic on all of `C^n`. Built-ins
    /// are by construction; hand-assembled domains only if declared.
    pub fn is_plurisubharmonic(&self) -> bool {
        self.plurisubharmonic
    }

    pub fn with_locality_radius(&self, r: f64) -> Result<Self, DomainError> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(DomainError::InvalidParameters("locality_radius must be positive".into()));
        }
        let mut out = self.clone();
        out.locality_radius = r;
        if self.family != FamilyTag::Ball {
            out.bounding_radius = norm(self.q.coords()) + r;
        }
        Ok(out)
    }

    pub fn with_family(mut self, family: FamilyTag) -> Self {
        self.family = family;
        self
    }

    pub fn names(&self) -> Vec<&'static str> {
        variable_names(self.dimension())
    }

    pub fn evaluate(&self, p: &[Complex64]) -> Result<f64, DomainError> {
        self.rho.evaluate(p)
    }

    /// Membership in the working domain `Ω ∩ U` (strict inequalities).
    pub fn contains(&self, p: &[Complex64]) -> Result<bool, DomainError> {
        let v = self.rho.evaluate(p)?;
        Ok(v < 0.0 && norm(&sub(p, self.q.coords())) < self.locality_radius)
    }

    pub fn wirtinger_gradient(&self, p: &[Complex64]) -> Result<Vec<Complex64>, DomainError> {
        self.rho.check_dim(p.len())?;
        Ok(self.gradient.iter().map(|d| d.evaluate(p)).collect())
    }

    pub fn levi_form(&self, query: &LeviQuery) -> Result<f64, DomainError> {
        levi_form(&self.rho, query)
    }

    pub fn complex_tangent_complete(
        &self,
        point: &[Complex64],
        partial: &[Complex64],
    ) -> Result<Vec<Complex64>, DomainError> {
        complex_tangent_complete(&self.rho, point, partial)
    }

    pub fn order_of_contact_along(&self, direction: &[Complex64]) -> Result<ContactOrder, DomainError> {
        order_of_contact_along(&self.rho, self.q.coords(), direction)
    }

    /// The image of this domain under `Z ↦ U Z + shift` for a unitary `U`.
    pub fn transformed(
        &self,
        unitary: &[Vec<Complex64>],
        shift: &[Complex64],
    ) -> Result<DomainSpec, DomainError> {
        let n = self.dimension();
        if unitary.len() != n || shift.len() != n {
            return Err(DomainError::DimensionMismatch { expected: n, found: unitary.len() });
        }
        // ρ'(Z') = ρ(U^H (Z' − shift))
        let adj: Vec<Vec<Complex64>> =
            (0..n).map(|i| (0..n).map(|j| unitary[j][i].conj()).collect()).collect();
        let back_shift: Vec<Complex64> =
            (0..n).map(|i| -(0..n).map(|j| adj[i][j] * shift[j]).sum::<Complex64>()).collect();
        let rho = self.rho.compose_affine(&adj, &back_shift)?;
        let q = apply_affine(unitary, shift, self.q.coords());
        let meta = DomainMeta {
            bounding_radius: Some(norm(&q) + self.locality_radius),
            declared_k: self.declared_k,
            declared_d: self.declared_d,
            plurisubharmonic: self.plurisubharmonic,
        };
        DomainSpec::new(rho, CPoint(q), self.locality_radius, meta)
    }
}

pub fn apply_affine(matrix: &[Vec<Complex64>], shift: &[Complex64], z: &[Complex64]) -> Vec<Complex64> {
    matrix
        .iter()
        .zip(shift)
        .map(|(row, s)| row.iter().zip(z).map(|(a, x)| a * x).sum::<Complex64>() + s)
        .collect()
}

pub fn variable_names(n: usize) -> Vec<&'static str> {
    const NAMES: [&str; 6] = ["z1", "z2", "z3", "z4", "z5", "z6"];
    match n {
        1 => vec!["t"],
        2 => vec!["z", "t"],
        3 => vec!["z", "w", "t"],
        _ => NAMES[..n].to_vec(),
    }
}

/// `|z_j|^{2m}`.
pub(crate) fn abs_pow(n: usize, j: usize, m: u32) -> ComplexPoly {
    let mut e = vec![0u8; n];
    e[j] = m as u8;
    ComplexPoly::monomial(n, &e, &e, Complex64::new(1.0, 0.0))
}

/// `Re` of the last coordinate.
pub(crate) fn re_t(n: usize) -> ComplexPoly {
    ComplexPoly::var(n, n - 1).re()
}

/// A point together with a tangent direction for Levi-form evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct LeviQuery {
    pub point: Vec<Complex64>,
    pub tangent: Vec<Complex64>,
}

impl LeviQuery {
    pub fn new(point: Vec<Complex64>, tangent: Vec<Complex64>) -> Result<Self, DomainError> {
        if norm(&tangent) == 0.0 {
            return Err(DomainError::ZeroTangent);
        }
        Ok(LeviQuery { point, tangent })
    }
}

/// `Σ_{j,k} ∂²ρ/∂z_j∂conj(z_k) σ_j conj(σ_k)`.
pub fn levi_form(rho: &HermitianPolynomial, query: &LeviQuery) -> Result<f64, DomainError> {
    rho.check_dim(query.tangent.len())?;
    let h = rho.levi_matrix(&query.point)?;
    let s = &query.tangent;
    let mut acc = Complex64::default();
    for (j, row) in h.iter().enumerate() {
        for (k, hjk) in row.iter().enumerate() {
            acc += hjk * s[j] * s[k].conj();
        }
    }
    Ok(acc.re)
}

/// Complete `ξ` (first `n−1` components) to a complex tangent vector `(ξ, λ)`.
pub fn complex_tangent_complete(
    rho: &HermitianPolynomial,
    point: &[Complex64],
    partial: &[Complex64],
) -> Result<Vec<Complex64>, DomainError> {
    let n = rho.dimension();
    if partial.len() + 1 != n {
        return Err(DomainError::DimensionMismatch { expected: n - 1, found: partial.len() });
    }
    let g = rho.wirtinger_gradient(point)?;
    let dt = g[n - 1];
    if dt.norm() < 1e-14 {
        return Err(DomainError::DegenerateNormal);
    }
    let s: Complex64 = g.iter().zip(partial).map(|(gj, xj)| gj * xj).sum();
    let mut sigma = partial.to_vec();
    sigma.push(-s / dt);
    Ok(sigma)
}

/// Lowest degree in `(τ, conj τ)` of `ρ(q + τ e)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContactOrder {
    Finite(u32),
    Infinite,
}

pub fn order_of_contact_along(
    rho: &HermitianPolynomial,
    q: &[Complex64],
    direction: &[Complex64],
) -> Result<ContactOrder, DomainError> {
    rho.check_dim(direction.len())?;
    rho.check_dim(q.len())?;
    let e = normalized(direction).ok_or(DomainError::ZeroTangent)?;
    let images: Vec<ComplexPoly> = q
        .iter()
        .zip(&e)
        .map(|(&qj, &ej)| ComplexPoly::constant(1, qj).add(&ComplexPoly::var(1, 0).scale(ej)))
        .collect();
    let restricted = rho.as_poly().compose(&images)?;
    Ok(restricted
        .terms()
        .map(|(m, _)| m.degree())
        .filter(|&d| d > 0)
        .min()
        .map_or(ContactOrder::Infinite, ContactOrder::Finite))
}
