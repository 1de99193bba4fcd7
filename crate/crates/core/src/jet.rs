//! Truncated jets of defining functions in `(z, conj z, u, v)`, where
//! `t = u + iv` is the distinguished coordinate.
//!
//! Field layout of a [`Monomial`]: `z_1..z_m`, `conj z_1..conj z_m`, `u`, `v`.
//! The first `2m` fields coincide with a [`ComplexPoly`] in `m` variables, so
//! z-coefficients convert without repacking.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::NormalFormError;
use crate::poly::{ComplexPoly, HermitianPolynomial, Monomial, MAX_DEGREE, MAX_FIELDS, ZERO_TOL};

pub const DEFAULT_TRUNCATION: u32 = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    m: usize,
    truncation: u32,
    terms: BTreeMap<Monomial, Complex64>,
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl Jet {
    pub fn zero(m: usize, truncation: u32) -> Self {
        assert!(2 * m + 2 <= MAX_FIELDS, "z-block of {m} variables does not fit");
        assert!(truncation <= MAX_DEGREE, "truncation above {MAX_DEGREE}");
        Jet { m, truncation, terms: BTreeMap::new() }
    }

    pub fn constant(m: usize, truncation: u32, c: Complex64) -> Self {
        let mut j = Self::zero(m, truncation);
        j.add_term(Monomial::ONE, c);
        j
    }

    fn single(m: usize, truncation: u32, field: usize) -> Self {
        let mut j = Self::zero(m, truncation);
        j.add_term(Monomial::ONE.with_field(field, 1), one());
        j
    }

    pub fn z(m: usize, truncation: u32, j: usize) -> Self {
        Self::single(m, truncation, j)
    }

    pub fn zbar(m: usize, truncation: u32, j: usize) -> Self {
        Self::single(m, truncation, m + j)
    }

    pub fn u(m: usize, truncation: u32) -> Self {
        Self::single(m, truncation, 2 * m)
    }

    pub fn v(m: usize, truncation: u32) -> Self {
        Self::single(m, truncation, 2 * m + 1)
    }

    /// `u^a v^b` times the z-polynomial `p`.
    pub fn from_z_poly(p: &ComplexPoly, a: u8, b: u8, truncation: u32) -> Self {
        let m = p.dimension();
        let mut j = Self::zero(m, truncation);
        for (mono, c) in p.terms() {
            j.add_term(mono.with_field(2 * m, a).with_field(2 * m + 1, b), c);
        }
        j
    }

    pub fn z_block(&self) -> usize {
        self.m
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, Complex64)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Monomial) -> Complex64 {
        self.terms.get(&m).copied().unwrap_or_default()
    }

    pub fn u_exp(&self, mono: Monomial) -> u8 {
        mono.field(2 * self.m)
    }

    pub fn v_exp(&self, mono: Monomial) -> u8 {
        mono.field(2 * self.m + 1)
    }

    pub fn z_degree(&self, mono: Monomial) -> u32 {
        (0..2 * self.m).map(|f| u32::from(mono.field(f))).sum()
    }

    /// Coefficient of `u^a v^b` with `a`, `b` fixed: `u_v(a, b)`.
    pub fn uv_monomial(&self, a: u8, b: u8) -> Monomial {
        Monomial::ONE.with_field(2 * self.m, a).with_field(2 * self.m + 1, b)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn add_term(&mut self, m: Monomial, c: Complex64) {
        if m.degree() > self.truncation {
            return;
        }
        let entry = self.terms.entry(m).or_default();
        *entry += c;
        if entry.norm() <= ZERO_TOL {
            self.terms.remove(&m);
        }
    }

    fn check_compatible(&self, other: &Jet) {
        assert_eq!(self.m, other.m, "jets over different z-blocks");
    }

    pub fn add(&self, other: &Jet) -> Jet {
        self.check_compatible(other);
        let mut out = self.clone();
        out.truncation = self.truncation.min(other.truncation);
        out.terms.retain(|m, _| m.degree() <= out.truncation);
        for (m, c) in other.terms() {
            out.add_term(m, c);
        }
        out
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Jet {
        let mut out = Self::zero(self.m, self.truncation);
        for (m, c) in self.terms() {
            out.add_term(m, c * s);
        }
        out
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        self.check_compatible(other);
        let trunc = self.truncation.min(other.truncation);
        let mut by_degree: Vec<(u32, Monomial, Complex64)> =
            other.terms().map(|(m, c)| (m.degree(), m, c)).collect();
        by_degree.sort_by_key(|t| t.0);
        let mut acc: BTreeMap<Monomial, Complex64> = BTreeMap::new();
        for (ma, ca) in self.terms() {
            let da = ma.degree();
            if da > trunc {
                continue;
            }
            for &(db, mb, cb) in &by_degree {
                if da + db > trunc {
                    break;
                }
                *acc.entry(ma.mul(mb)).or_default() += ca * cb;
            }
        }
        acc.retain(|_, c| c.norm() > ZERO_TOL);
        Jet { m: self.m, truncation: trunc, terms: acc }
    }

    pub fn pow(&self, e: u32) -> Jet {
        let mut out = Self::constant(self.m, self.truncation, one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn truncate(&self, d: u32) -> Jet {
        let mut out = self.clone();
        out.truncation = d.min(self.truncation);
        out.terms.retain(|m, _| m.degree() <= out.truncation);
        out
    }

    /// Complex conjugate; `u` and `v` are real.
    pub fn conj(&self) -> Jet {
        let mut out = Self::zero(self.m, self.truncation);
        for (mono, c) in self.terms() {
            let mut swapped = mono;
            for j in 0..self.m {
                swapped = swapped.with_field(j, mono.field(self.m + j)).with_field(self.m + j, mono.field(j));
            }
            out.add_term(swapped, c.conj());
        }
        out
    }

    pub fn real_part(&self) -> Jet {
        self.add(&self.conj()).scale(Complex64::new(0.5, 0.0))
    }

    pub fn imag_part(&self) -> Jet {
        self.sub(&self.conj()).scale(Complex64::new(0.0, -0.5))
    }

    /// Largest deviation from the symmetry that makes the jet real-valued.
    pub fn hermitian_defect(&self) -> f64 {
        let c = self.conj();
        self.sub(&c).terms().map(|(_, x)| x.norm()).fold(0.0, f64::max)
    }

    /// The z-polynomial multiplying `u^a v^b`.
    pub fn uv_coefficient(&self, a: u8, b: u8) -> ComplexPoly {
        let mut p = ComplexPoly::zero(self.m);
        let uf = 2 * self.m;
        for (mono, c) in self.terms() {
            if mono.field(uf) == a && mono.field(uf + 1) == b {
                p.add_term(mono.with_field(uf, 0).with_field(uf + 1, 0), c);
            }
        }
        p
    }

    pub fn max_abs_diff(&self, other: &Jet) -> f64 {
        let d = self.sub(other);
        d.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    pub fn evaluate(&self, z: &[Complex64], u: f64, v: f64) -> Complex64 {
        assert_eq!(z.len(), self.m);
        self.terms()
            .map(|(mono, c)| {
                let mut x = c;
                for j in 0..self.m {
                    x *= z[j].powu(u32::from(mono.field(j))) * z[j].conj().powu(u32::from(mono.field(self.m + j)));
                }
                x * u.powi(i32::from(self.u_exp(mono))) * v.powi(i32::from(self.v_exp(mono)))
            })
            .sum()
    }

    /// Replace `u, v` by the jets `big_u, big_v`; `z` is unchanged.
    pub fn substitute_uv(&self, big_u: &Jet, big_v: &Jet) -> Jet {
        let zs: Vec<Jet> = (0..self.m).map(|j| Jet::z(self.m, self.truncation, j)).collect();
        self.substitute(&zs, big_u, big_v)
    }

    /// Replace `z_j -> images[j]` (with `conj z_j -> conj images[j]`) and
    /// `u, v` by the given real jets.
    pub fn substitute(&self, images: &[Jet], big_u: &Jet, big_v: &Jet) -> Jet {
        assert_eq!(images.len(), self.m);
        let trunc = self.truncation;
        let max_field = |f: usize| self.terms.keys().map(|m| m.field(f) as usize).max().unwrap_or(0);
        let powers = |base: &Jet, e_max: usize| {
            let mut v = vec![Jet::constant(self.m, trunc, one())];
            for e in 1..=e_max {
                v.push(v[e - 1].mul(base));
            }
            v
        };
        let hol: Vec<Vec<Jet>> = (0..self.m).map(|j| powers(&images[j], max_field(j))).collect();
        let anti: Vec<Vec<Jet>> =
            (0..self.m).map(|j| powers(&images[j].conj(), max_field(self.m + j))).collect();
        let up = powers(big_u, max_field(2 * self.m));
        let vp = powers(big_v, max_field(2 * self.m + 1));
        let mut out = Jet::zero(self.m, trunc);
        for (mono, c) in self.terms() {
            let mut prod = Jet::constant(self.m, trunc, c);
            for j in 0..self.m {
                let (a, b) = (mono.field(j) as usize, mono.field(self.m + j) as usize);
                if a > 0 {
                    prod = prod.mul(&hol[j][a]);
                }
                if b > 0 {
                    prod = prod.mul(&anti[j][b]);
                }
            }
            let (a, b) = (self.u_exp(mono) as usize, self.v_exp(mono) as usize);
            if a > 0 {
                prod = prod.mul(&up[a]);
            }
            if b > 0 {
                prod = prod.mul(&vp[b]);
            }
            for (mm, cc) in prod.terms() {
                out.add_term(mm, cc);
            }
        }
        out
    }

    /// Substitute a holomorphic change of the distinguished coordinate
    /// `t = T(t̃, z)`, where `T` is written in `(z, ũ, ṽ)` with `t̃ = ũ + iṽ`.
    pub fn substitute_t(&self, big_t: &Jet) -> Jet {
        let c = big_t.conj();
        let big_u = big_t.add(&c).scale(Complex64::new(0.5, 0.0));
        let big_v = big_t.sub(&c).scale(Complex64::new(0.0, -0.5));
        self.substitute_uv(&big_u, &big_v)
    }

    /// `t = u + iv` as a jet.
    pub fn t(m: usize, truncation: u32) -> Jet {
        Jet::u(m, truncation).add(&Jet::v(m, truncation).scale(Complex64::new(0.0, 1.0)))
    }

    /// Expand `ρ(q + Z)` with the last coordinate playing the role of `t`.
    pub fn from_defining(
        rho: &HermitianPolynomial,
        q: &[Complex64],
        truncation: u32,
    ) -> Result<Jet, NormalFormError> {
        let n = rho.dimension();
        rho.check_dim(q.len())?;
        if n < 2 {
            return Err(NormalFormError::InvalidJet("need at least one z variable".into()));
        }
        let identity: Vec<Vec<Complex64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { one() } else { Complex64::default() }).collect())
            .collect();
        let local = rho.compose_affine(&identity, q)?;
        let m = n - 1;
        if let Some(d) = local.as_poly().degree() {
            if d > truncation {
                return Err(NormalFormError::TruncationOverflow(truncation));
            }
        }
        let t = Jet::t(m, truncation);
        let tb = t.conj();
        let mut out = Jet::zero(m, truncation);
        for (mono, c) in local.as_poly().terms() {
            let mut zmono = Monomial::ONE;
            for j in 0..m {
                zmono = zmono.with_field(j, mono.field(j)).with_field(m + j, mono.field(n + j));
            }
            let a = u32::from(mono.field(m));
            let b = u32::from(mono.field(n + m));
            let mut piece = Jet::zero(m, truncation);
            piece.add_term(zmono, c);
            let piece = piece.mul(&t.pow(a)).mul(&tb.pow(b));
            for (mm, cc) in piece.terms() {
                out.add_term(mm, cc);
            }
        }
        Ok(out)
    }

    /// Back to a Hermitian polynomial in `(z, t)` at the origin.
    pub fn to_hermitian(&self) -> Result<HermitianPolynomial, NormalFormError> {
        let m = self.m;
        let n = m + 1;
        let t = ComplexPoly::var(n, m);
        let tb = ComplexPoly::conj_var(n, m);
        let u = t.add(&tb).scale(Complex64::new(0.5, 0.0));
        let v = t.sub(&tb).scale(Complex64::new(0.0, -0.5));
        let mut out = ComplexPoly::zero(n);
        for (mono, c) in self.terms() {
            let mut hol = vec![0u8; n];
            let mut anti = vec![0u8; n];
            for j in 0..m {
                hol[j] = mono.field(j);
                anti[j] = mono.field(m + j);
            }
            let piece = ComplexPoly::monomial(n, &hol, &anti, c)
                .mul(&u.pow(u32::from(self.u_exp(mono)))?)?
                .mul(&v.pow(u32::from(self.v_exp(mono)))?)?;
            out = out.add(&piece);
        }
        Ok(HermitianPolynomial::new(out)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn random_jet(m: usize, trunc: u32, terms: &[(Vec<u8>, f64, f64)]) -> Jet {
        let mut j = Jet::zero(m, trunc);
        for (fields, re, im) in terms {
            let mut mono = Monomial::ONE;
            for (f, e) in fields.iter().enumerate().take(2 * m + 2) {
                mono = mono.with_field(f, *e);
            }
            j.add_term(mono, Complex64::new(*re, *im));
        }
        j
    }

    fn jet_strategy() -> impl Strategy<Value = Jet> {
        prop::collection::vec((prop::collection::vec(0u8..3, 6), -1.0..1.0f64, -1.0..1.0f64), 1..6)
            .prop_map(|t| random_jet(2, 12, &t))
    }

    #[test]
    fn u_and_v_from_t() {
        let rho = HermitianPolynomial::new(ComplexPoly::var(2, 1).re()).unwrap();
        let j = Jet::from_defining(&rho, &[c(0.0), c(0.0)], 24).unwrap();
        assert_eq!(j.len(), 1);
        assert_eq!(j.coeff(j.uv_monomial(1, 0)), c(1.0));
        let back = j.to_hermitian().unwrap();
        assert_eq!(&back, &rho);
    }

    #[test]
    fn ball_jet_at_boundary_point() {
        // |z|^2 + |t|^2 - 1 at (0, 1): 2u + u^2 + v^2 + |z|^2
        let p = ComplexPoly::monomial(2, &[1, 0], &[1, 0], c(1.0))
            .add(&ComplexPoly::monomial(2, &[0, 1], &[0, 1], c(1.0)))
            .add(&ComplexPoly::constant(2, c(-1.0)));
        let rho = HermitianPolynomial::new(p).unwrap();
        let j = Jet::from_defining(&rho, &[c(0.0), c(1.0)], 24).unwrap();
        assert!((j.coeff(j.uv_monomial(1, 0)) - c(2.0)).norm() < 1e-15);
        assert!((j.coeff(j.uv_monomial(2, 0)) - c(1.0)).norm() < 1e-15);
        assert!((j.coeff(j.uv_monomial(0, 2)) - c(1.0)).norm() < 1e-15);
        assert_eq!(j.len(), 4);
    }

    #[test]
    fn substitute_t_identity_is_noop() {
        let j = random_jet(1, 24, &[(vec![1, 1, 1, 0], 0.5, 0.0), (vec![0, 0, 0, 2], 1.0, 0.0)]);
        let out = j.substitute_t(&Jet::t(1, 24));
        assert_eq!(out, j);
    }

    proptest! {
        #[test]
        fn multiplication_is_associative(a in jet_strategy(), b in jet_strategy(), cc in jet_strategy()) {
            let l = a.mul(&b).mul(&cc);
            let r = a.mul(&b.mul(&cc));
            prop_assert!(l.max_abs_diff(&r) < 1e-12);
        }

        #[test]
        fn truncation_commutes_with_multiplication(a in jet_strategy(), b in jet_strategy(), d in 1u32..12) {
            let l = a.mul(&b).truncate(d);
            let r = a.truncate(d).mul(&b.truncate(d));
            prop_assert!(l.max_abs_diff(&r) < 1e-12);
        }

        #[test]
        fn substitution_composes(a in jet_strategy(), s1 in -0.5..0.5f64, s2 in -0.5..0.5f64) {
            // u -> u + s1 v^2, then u -> u + s2 z conj z; compare with the composite map
            let m = 2;
            let tr = 12;
            let zs: Vec<Jet> = (0..m).map(|j| Jet::z(m, tr, j)).collect();
            let u = Jet::u(m, tr);
            let v = Jet::v(m, tr);
            let zz = Jet::z(m, tr, 0).mul(&Jet::zbar(m, tr, 0));
            let g_u = u.add(&v.mul(&v).scale(c(s1)));
            let h_u = u.add(&zz.scale(c(s2)));
            let step = a.substitute(&zs, &g_u, &v).substitute(&zs, &h_u, &v);
            let composite_u = g_u.substitute(&zs, &h_u, &v);
            let direct = a.substitute(&zs, &composite_u, &v);
            prop_assert!(step.max_abs_diff(&direct) < 1e-10);
        }
    }
}
