//! Polynomials in complex coordinates and their conjugates.
//!
//! A monomial `z^α conj(z)^β` is packed into a single `u64`, five bits per
//! exponent, so the total degree cap of 24 always fits a field. Terms live in
//! a `BTreeMap`, which keeps iteration (and therefore floating-point summation
//! order) deterministic.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::DomainError;

/// Largest total degree any stored term may have.
pub const MAX_DEGREE: u32 = 24;

/// Coefficients with modulus at or below this are dropped.
pub const ZERO_TOL: f64 = 1e-12;

const FIELD_BITS: u32 = 5;
const FIELD_MASK: u64 = (1 << FIELD_BITS) - 1;

/// Largest number of packed exponent fields (12 x 5 bits = 60 bits).
pub const MAX_FIELDS: usize = 12;

/// Packed exponent vector. Field `f` occupies bits `5f..5f+5`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn from_fields(fields: &[u8]) -> Self {
        assert!(fields.len() <= MAX_FIELDS, "too many exponent fields");
        let mut key = 0u64;
        for (f, &e) in fields.iter().enumerate() {
            assert!(u64::from(e) <= FIELD_MASK, "exponent {e} does not fit a field");
            key |= u64::from(e) << (FIELD_BITS * f as u32);
        }
        Monomial(key)
    }

    /// Holomorphic exponents `hol` followed by antiholomorphic exponents `anti`.
    pub fn new(hol: &[u8], anti: &[u8]) -> Self {
        let mut fields = Vec::with_capacity(hol.len() + anti.len());
        fields.extend_from_slice(hol);
        fields.extend_from_slice(anti);
        Self::from_fields(&fields)
    }

    #[inline]
    pub fn field(self, f: usize) -> u8 {
        ((self.0 >> (FIELD_BITS * f as u32)) & FIELD_MASK) as u8
    }

    #[inline]
    pub fn with_field(self, f: usize, e: u8) -> Self {
        let shift = FIELD_BITS * f as u32;
        Monomial((self.0 & !(FIELD_MASK << shift)) | (u64::from(e) << shift))
    }

    #[inline]
    pub fn degree(self) -> u32 {
        let mut key = self.0;
        let mut d = 0;
        while key != 0 {
            d += (key & FIELD_MASK) as u32;
            key >>= FIELD_BITS;
        }
        d
    }

    /// Product of monomials. Callers must make sure no field exceeds 31,
    /// which holds whenever the combined degree stays within [`MAX_DEGREE`].
    #[inline]
    pub fn mul(self, other: Monomial) -> Monomial {
        Monomial(self.0 + other.0)
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn from_raw(raw: u64) -> Self {
        Monomial(raw)
    }

    pub fn hol(self, j: usize) -> u8 {
        self.field(j)
    }

    pub fn anti(self, n: usize, j: usize) -> u8 {
        self.field(n + j)
    }

    pub fn hol_degree(self, n: usize) -> u32 {
        (0..n).map(|j| u32::from(self.field(j))).sum()
    }

    pub fn anti_degree(self, n: usize) -> u32 {
        (0..n).map(|j| u32::from(self.field(n + j))).sum()
    }

    /// Swap holomorphic and antiholomorphic exponents.
    pub fn conj(self, n: usize) -> Monomial {
        let mut out = Monomial::ONE;
        for j in 0..n {
            out = out.with_field(j, self.field(n + j)).with_field(n + j, self.field(j));
        }
        out
    }
}

/// A polynomial in `z_1..z_n` and `conj(z_1)..conj(z_n)` with complex
/// coefficients. No symmetry is assumed; see [`HermitianPolynomial`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoly {
    n: usize,
    terms: BTreeMap<Monomial, Complex64>,
}

impl Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.0)
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        u64::deserialize(d).map(Monomial)
    }
}

impl ComplexPoly {
    pub fn zero(n: usize) -> Self {
        assert!(2 * n <= MAX_FIELDS, "dimension {n} exceeds packing capacity");
        ComplexPoly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Monomial::ONE, c);
        p
    }

    pub fn var(n: usize, j: usize) -> Self {
        let mut hol = vec![0u8; n];
        hol[j] = 1;
        let mut p = Self::zero(n);
        p.add_term(Monomial::new(&hol, &vec![0; n]), Complex64::new(1.0, 0.0));
        p
    }

    pub fn conj_var(n: usize, j: usize) -> Self {
        let mut anti = vec![0u8; n];
        anti[j] = 1;
        let mut p = Self::zero(n);
        p.add_term(Monomial::new(&vec![0; n], &anti), Complex64::new(1.0, 0.0));
        p
    }

    pub fn monomial(n: usize, hol: &[u8], anti: &[u8], c: Complex64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Monomial::new(hol, anti), c);
        p
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, Complex64)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Monomial) -> Complex64 {
        self.terms.get(&m).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    pub fn add_term(&mut self, m: Monomial, c: Complex64) {
        let entry = self.terms.entry(m).or_default();
        *entry += c;
        if entry.norm() <= ZERO_TOL {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &ComplexPoly) -> ComplexPoly {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c);
        }
        out
    }

    pub fn sub(&self, other: &ComplexPoly) -> ComplexPoly {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> ComplexPoly {
        let mut out = Self::zero(self.n);
        for (m, c) in self.terms() {
            out.add_term(m, c * s);
        }
        out
    }

    /// Product, failing if any resulting term exceeds [`MAX_DEGREE`].
    pub fn mul(&self, other: &ComplexPoly) -> Result<ComplexPoly, DomainError> {
        let mut acc: BTreeMap<Monomial, Complex64> = BTreeMap::new();
        for (ma, ca) in self.terms() {
            let da = ma.degree();
            for (mb, cb) in other.terms() {
                let d = da + mb.degree();
                if d > MAX_DEGREE {
                    return Err(DomainError::DegreeCap { degree: d, cap: MAX_DEGREE });
                }
                *acc.entry(ma.mul(mb)).or_default() += ca * cb;
            }
        }
        acc.retain(|_, c| c.norm() > ZERO_TOL);
        Ok(ComplexPoly { n: self.n, terms: acc })
    }

    pub fn pow(&self, e: u32) -> Result<ComplexPoly, DomainError> {
        let mut out = Self::constant(self.n, Complex64::new(1.0, 0.0));
        for _ in 0..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Complex conjugate of the function, i.e. swap exponents and conjugate coefficients.
    pub fn conj(&self) -> ComplexPoly {
        let mut out = Self::zero(self.n);
        for (m, c) in self.terms() {
            out.add_term(m.conj(self.n), c.conj());
        }
        out
    }

    /// Real part as a function: `(p + conj(p)) / 2`.
    pub fn re(&self) -> ComplexPoly {
        self.add(&self.conj()).scale(Complex64::new(0.5, 0.0))
    }

    /// Imaginary part as a function: `(p - conj(p)) / 2i`.
    pub fn im(&self) -> ComplexPoly {
        self.sub(&self.conj()).scale(Complex64::new(0.0, -0.5))
    }

    pub fn evaluate(&self, z: &[Complex64]) -> Complex64 {
        debug_assert_eq!(z.len(), self.n);
        let pw = PowerTable::new(z, self.max_field());
        self.terms().map(|(m, c)| c * pw.monomial(m)).sum()
    }

    fn max_field(&self) -> u8 {
        self.terms
            .keys()
            .flat_map(|m| (0..2 * self.n).map(move |f| m.field(f)))
            .max()
            .unwrap_or(0)
    }

    /// Wirtinger derivative with respect to `z_j`.
    pub fn d_hol(&self, j: usize) -> ComplexPoly {
        let mut out = Self::zero(self.n);
        for (m, c) in self.terms() {
            let e = m.field(j);
            if e > 0 {
                out.add_term(m.with_field(j, e - 1), c * f64::from(e));
            }
        }
        out
    }

    /// Wirtinger derivative with respect to `conj(z_j)`.
    pub fn d_anti(&self, j: usize) -> ComplexPoly {
        let f = self.n + j;
        let mut out = Self::zero(self.n);
        for (m, c) in self.terms() {
            let e = m.field(f);
            if e > 0 {
                out.add_term(m.with_field(f, e - 1), c * f64::from(e));
            }
        }
        out
    }

    /// Hermitian-symmetry residual: the largest `|c(α,β) - conj(c(β,α))|`.
    pub fn hermitian_defect(&self) -> f64 {
        self.terms()
            .map(|(m, c)| (c - self.coeff(m.conj(self.n)).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Substitute `z_i -> images[i]` (and `conj(z_i) -> conj(images[i])`).
    pub fn compose(&self, images: &[ComplexPoly]) -> Result<ComplexPoly, DomainError> {
        assert_eq!(images.len(), self.n);
        let m_out = images[0].n;
        let max_e = self.max_field() as usize;
        let mut hol_pows: Vec<Vec<ComplexPoly>> = Vec::with_capacity(self.n);
        let mut anti_pows: Vec<Vec<ComplexPoly>> = Vec::with_capacity(self.n);
        for img in images {
            let conj = img.conj();
            let mut hp = vec![ComplexPoly::constant(m_out, Complex64::new(1.0, 0.0))];
            let mut ap = hp.clone();
            for e in 1..=max_e {
                hp.push(hp[e - 1].mul(img)?);
                ap.push(ap[e - 1].mul(&conj)?);
            }
            hol_pows.push(hp);
            anti_pows.push(ap);
        }
        let mut out = ComplexPoly::zero(m_out);
        for (m, c) in self.terms() {
            let mut prod = ComplexPoly::constant(m_out, c);
            for j in 0..self.n {
                let a = m.field(j) as usize;
                let b = m.field(self.n + j) as usize;
                if a > 0 {
                    prod = prod.mul(&hol_pows[j][a])?;
                }
                if b > 0 {
                    prod = prod.mul(&anti_pows[j][b])?;
                }
            }
            out = out.add(&prod);
        }
        Ok(out)
    }
}

/// Cached powers `z_j^e` and `conj(z_j)^e` at one point.
pub struct PowerTable {
    n: usize,
    hol: Vec<Vec<Complex64>>,
    anti: Vec<Vec<Complex64>>,
}

impl PowerTable {
    pub fn new(z: &[Complex64], max_e: u8) -> Self {
        let build = |w: Complex64| {
            let mut v = Vec::with_capacity(max_e as usize + 1);
            v.push(Complex64::new(1.0, 0.0));
            for e in 1..=max_e as usize {
                let prev = v[e - 1];
                v.push(prev * w);
            }
            v
        };
        PowerTable {
            n: z.len(),
            hol: z.iter().map(|&w| build(w)).collect(),
            anti: z.iter().map(|&w| build(w.conj())).collect(),
        }
    }

    #[inline]
    pub fn monomial(&self, m: Monomial) -> Complex64 {
        let mut v = Complex64::new(1.0, 0.0);
        for j in 0..self.n {
            let a = m.field(j) as usize;
            let b = m.field(self.n + j) as usize;
            if a > 0 {
                v *= self.hol[j][a];
            }
            if b > 0 {
                v *= self.anti[j][b];
            }
        }
        v
    }
}

/// A real-valued polynomial: `coeff(α,β) = conj(coeff(β,α))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexPoly", into = "ComplexPoly")]
pub struct HermitianPolynomial {
    poly: ComplexPoly,
    max_field: u8,
}

impl TryFrom<ComplexPoly> for HermitianPolynomial {
    type Error = DomainError;

    fn try_from(poly: ComplexPoly) -> Result<Self, DomainError> {
        HermitianPolynomial::new(poly)
    }
}

impl From<HermitianPolynomial> for ComplexPoly {
    fn from(h: HermitianPolynomial) -> ComplexPoly {
        h.poly
    }
}

/// Symmetry defects above this are rejected as non-real.
const HERMITIAN_TOL: f64 = 1e-10;

impl HermitianPolynomial {
    pub fn new(poly: ComplexPoly) -> Result<Self, DomainError> {
        let defect = poly.hermitian_defect();
        let size = poly.terms().map(|(_, c)| c.norm()).fold(1.0, f64::max);
        if defect > HERMITIAN_TOL * size {
            return Err(DomainError::NotHermitian { defect });
        }
        if let Some(d) = poly.degree() {
            if d > MAX_DEGREE {
                return Err(DomainError::DegreeCap { degree: d, cap: MAX_DEGREE });
            }
        }
        // symmetrize exactly so evaluation is real to rounding
        let sym = poly.add(&poly.conj()).scale(Complex64::new(0.5, 0.0));
        let max_field = sym.max_field();
        Ok(HermitianPolynomial { poly: sym, max_field })
    }

    pub fn as_poly(&self) -> &ComplexPoly {
        &self.poly
    }

    pub fn dimension(&self) -> usize {
        self.poly.n
    }

    pub fn max_field(&self) -> u8 {
        self.max_field
    }

    /// Value at `z`; the imaginary rounding residue is discarded.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<f64, DomainError> {
        self.check_dim(z.len())?;
        Ok(self.eval_unchecked(z))
    }

    #[inline]
    pub fn eval_unchecked(&self, z: &[Complex64]) -> f64 {
        let pw = PowerTable::new(z, self.max_field);
        self.eval_with(&pw)
    }

    #[inline]
    pub fn eval_with(&self, pw: &PowerTable) -> f64 {
        self.poly.terms().map(|(m, c)| (c * pw.monomial(m)).re).sum()
    }

    pub fn check_dim(&self, len: usize) -> Result<(), DomainError> {
        if len != self.poly.n {
            return Err(DomainError::DimensionMismatch { expected: self.poly.n, found: len });
        }
        Ok(())
    }

    /// `∂ρ/∂z_j` for every `j`, evaluated at `z`.
    pub fn wirtinger_gradient(&self, z: &[Complex64]) -> Result<Vec<Complex64>, DomainError> {
        self.check_dim(z.len())?;
        Ok((0..self.poly.n).map(|j| self.poly.d_hol(j).evaluate(z)).collect())
    }

    /// Mixed Hessian `∂²ρ/∂z_j∂conj(z_k)`.
    pub fn levi_matrix(&self, z: &[Complex64]) -> Result<Vec<Vec<Complex64>>, DomainError> {
        self.check_dim(z.len())?;
        let n = self.poly.n;
        Ok((0..n)
            .map(|j| {
                let dj = self.poly.d_hol(j);
                (0..n).map(|k| dj.d_anti(k).evaluate(z)).collect()
            })
            .collect())
    }

    pub fn compose_affine(
        &self,
        matrix: &[Vec<Complex64>],
        shift: &[Complex64],
    ) -> Result<HermitianPolynomial, DomainError> {
        let images = affine_images(self.poly.n, matrix, shift);
        HermitianPolynomial::new(self.poly.compose(&images)?)
    }

    /// As [`compose_affine`](Self::compose_affine), but the rounding error
    /// of the substitution is symmetrized away instead of rejected.
    pub(crate) fn compose_affine_rounded(
        &self,
        matrix: &[Vec<Complex64>],
        shift: &[Complex64],
    ) -> Result<HermitianPolynomial, DomainError> {
        let images = affine_images(self.poly.n, matrix, shift);
        let poly = self.poly.compose(&images)?;
        let sym = poly.add(&poly.conj()).scale(Complex64::new(0.5, 0.0));
        let max_field = sym.max_field();
        Ok(HermitianPolynomial { poly: sym, max_field })
    }

    /// Render in the domain-file grammar using `names` for the variables.
    pub fn to_grammar(&self, names: &[&str]) -> String {
        format_hermitian(&self.poly, names)
    }
}

fn affine_images(n: usize, matrix: &[Vec<Complex64>], shift: &[Complex64]) -> Vec<ComplexPoly> {
    (0..n)
        .map(|i| {
            let mut img = ComplexPoly::constant(n, shift[i]);
            for (j, &a) in matrix[i].iter().enumerate() {
                img = img.add(&ComplexPoly::var(n, j).scale(a));
            }
            img
        })
        .collect()
}

/// Format a real number so that parsing the text yields the same `f64`.
pub fn fmt_real(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn monomial_text(m: Monomial, n: usize, names: &[&str]) -> String {
    let mut factors = Vec::new();
    for j in 0..n {
        let (a, b) = (m.field(j), m.field(n + j));
        if a == b && a > 0 {
            factors.push(format!("|{}|^{}", names[j], 2 * a));
            continue;
        }
        match a {
            0 => {}
            1 => factors.push(names[j].to_string()),
            _ => factors.push(format!("{}^{}", names[j], a)),
        }
        match b {
            0 => {}
            1 => factors.push(format!("conj({})", names[j])),
            _ => factors.push(format!("conj({})^{}", names[j], b)),
        }
    }
    factors.join("*")
}

fn push_term(out: &mut String, coeff: f64, body: &str) {
    if coeff == 0.0 {
        return;
    }
    let sign = if coeff < 0.0 { "-" } else { "+" };
    if out.is_empty() {
        if coeff < 0.0 {
            out.push('-');
        }
    } else {
        let _ = write!(out, " {sign} ");
    }
    if body.is_empty() {
        out.push_str(&fmt_real(coeff.abs()));
    } else {
        let _ = write!(out, "{}*{}", fmt_real(coeff.abs()), body);
    }
}

fn format_hermitian(p: &ComplexPoly, names: &[&str]) -> String {
    let n = p.n;
    let mut out = String::new();
    for (m, c) in p.terms() {
        let mc = m.conj(n);
        if m == mc {
            push_term(&mut out, c.re, &monomial_text(m, n, names));
        } else if m < mc {
            // c m + conj(c) conj(m) = 2 Re(c) Re(m) - 2 Im(c) Im(m)
            let body = monomial_text(m, n, names);
            push_term(&mut out, 2.0 * c.re, &format!("Re({body})"));
            push_term(&mut out, -2.0 * c.im, &format!("Im({body})"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn monomial_packing_roundtrip() {
        let m = Monomial::new(&[1, 0, 3], &[2, 5, 0]);
        assert_eq!(m.field(0), 1);
        assert_eq!(m.field(2), 3);
        assert_eq!(m.field(4), 5);
        assert_eq!(m.degree(), 11);
        assert_eq!(m.conj(3), Monomial::new(&[2, 5, 0], &[1, 0, 3]));
    }

    #[test]
    fn derivative_of_abs_square() {
        // |z|^2 |w|^2, d/dz = conj(z) |w|^2
        let p = ComplexPoly::monomial(2, &[1, 1], &[1, 1], c(1.0));
        let d = p.d_hol(0);
        assert_eq!(d.coeff(Monomial::new(&[0, 1], &[1, 1])), c(1.0));
        let z = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!((d.evaluate(&z) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn non_hermitian_rejected() {
        let p = ComplexPoly::monomial(1, &[1], &[0], c(1.0));
        assert!(matches!(HermitianPolynomial::new(p), Err(DomainError::NotHermitian { .. })));
    }

    #[test]
    fn degree_cap_enforced_in_products() {
        let p = ComplexPoly::monomial(1, &[13], &[0], c(1.0));
        assert!(matches!(p.mul(&p), Err(DomainError::DegreeCap { degree: 26, .. })));
    }

    #[test]
    fn re_and_im_parts() {
        let z2 = ComplexPoly::monomial(1, &[2], &[0], c(1.0));
        let at = [Complex64::new(0.3, 0.7)];
        let w = at[0] * at[0];
        assert!((z2.re().evaluate(&at).re - w.re).abs() < 1e-15);
        assert!((z2.im().evaluate(&at).re - w.im).abs() < 1e-15);
        assert!(z2.im().evaluate(&at).im.abs() < 1e-15);
    }

    #[test]
    fn fmt_real_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-7, 1e20, 3.0, -0.0] {
            assert_eq!(fmt_real(x).parse::<f64>().unwrap(), x);
        }
    }
}
