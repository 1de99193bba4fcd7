//! Polynomial analytic discs and their sample-based admissibility
//! certificate.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{inner, norm, normalized, sub, CPoint, DomainSpec};
use crate::error::KobayashiError;
use crate::poly::{ComplexPoly, HermitianPolynomial};

/// `φ(τ) = p + Σ_{n=1..N} c_n τ^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticDisc {
    basepoint: CPoint,
    coefficients: Vec<Vec<Complex64>>,
}

impl AnalyticDisc {
    pub fn new(basepoint: CPoint, coefficients: Vec<Vec<Complex64>>) -> Result<Self, KobayashiError> {
        if coefficients.is_empty() {
            return Err(KobayashiError::InvalidArgument("a disc needs at least c_1".into()));
        }
        let n = basepoint.dim();
        if let Some(bad) = coefficients.iter().find(|c| c.len() != n) {
            return Err(crate::error::DomainError::DimensionMismatch { expected: n, found: bad.len() }.into());
        }
        if coefficients.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(KobayashiError::InvalidArgument("non-finite disc coefficient".into()));
        }
        Ok(AnalyticDisc { basepoint, coefficients })
    }

    pub fn linear(basepoint: CPoint, c1: Vec<Complex64>) -> Result<Self, KobayashiError> {
        Self::new(basepoint, vec![c1])
    }

    pub fn basepoint(&self) -> &CPoint {
        &self.basepoint
    }

    pub fn coefficients(&self) -> &[Vec<Complex64>] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len()
    }

    pub fn dim(&self) -> usize {
        self.basepoint.dim()
    }

    /// `φ′(0) = c_1`.
    pub fn derivative_at_zero(&self) -> &[Complex64] {
        &self.coefficients[0]
    }

    pub fn eval(&self, tau: Complex64) -> Vec<Complex64> {
        let mut out = self.basepoint.coords().to_vec();
        let mut pw = Complex64::new(1.0, 0.0);
        for c in &self.coefficients {
            pw *= tau;
            for (o, cj) in out.iter_mut().zip(c) {
                *o += cj * pw;
            }
        }
        out
    }

    /// `d/dθ φ(e^{iθ}) = Σ i n c_n e^{inθ}`.
    fn theta_derivative(&self, theta: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.dim()];
        for (idx, c) in self.coefficients.iter().enumerate() {
            let n = (idx + 1) as f64;
            let f = Complex64::new(0.0, n) * Complex64::from_polar(1.0, n * theta);
            for (o, cj) in out.iter_mut().zip(c) {
                *o += cj * f;
            }
        }
        out
    }

    /// Per-coordinate `Σ n^power |c_{n,j}|`.
    fn weighted_sums(&self, power: i32) -> Vec<f64> {
        let mut s = vec![0.0; self.dim()];
        for (idx, c) in self.coefficients.iter().enumerate() {
            let w = ((idx + 1) as f64).powi(power);
            for (sj, cj) in s.iter_mut().zip(c) {
                *sj += w * cj.norm();
            }
        }
        s
    }

    /// Radii of a polydisc containing the image of the closed disc.
    fn polydisc_radii(&self) -> Vec<f64> {
        let s0 = self.weighted_sums(0);
        self.basepoint.coords().iter().zip(s0).map(|(p, s)| p.norm() + s).collect()
    }

    /// Lipschitz constant of `θ ↦ φ(e^{iθ})`: `Σ n ‖c_n‖`.
    fn speed_bound(&self) -> f64 {
        self.coefficients.iter().enumerate().map(|(i, c)| (i + 1) as f64 * norm(c)).sum()
    }
}

/// Search and certification settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscSearchConfig {
    pub max_degree: usize,
    pub boundary_samples: usize,
    pub interior_rings: usize,
    pub safety_margin: f64,
    pub optimizer_budget: usize,
    pub bisection_rel_tol: f64,
    pub seed: u64,
}

impl Default for DiscSearchConfig {
    fn default() -> Self {
        DiscSearchConfig {
            max_degree: 3,
            boundary_samples: 256,
            interior_rings: 8,
            safety_margin: 1e-9,
            optimizer_budget: 2000,
            bisection_rel_tol: 1e-3,
            seed: 0,
        }
    }
}

impl DiscSearchConfig {
    pub fn validate(&self) -> Result<(), KobayashiError> {
        let bad = |m: &str| Err(KobayashiError::InvalidArgument(m.into()));
        if self.max_degree == 0 || self.interior_rings == 0 || self.optimizer_budget == 0 {
            return bad("max_degree, interior_rings and optimizer_budget must be positive");
        }
        if !self.boundary_samples.is_power_of_two() || self.boundary_samples < 16 {
            return bad("boundary_samples must be a power of two, at least 16");
        }
        if !(self.safety_margin > 0.0) || !(self.bisection_rel_tol > 0.0 && self.bisection_rel_tol < 1.0) {
            return bad("safety_margin and bisection_rel_tol must be positive (tol < 1)");
        }
        Ok(())
    }
}

/// Outcome of [`disc_admissible`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Admissible,
    /// Some sample has `ρ ≥ −μ`.
    NotInside { value: f64 },
    /// All samples are inside but the gap between samples is not covered.
    GapNotCertified { worst: f64 },
    /// Some sample (or inter-sample bound) leaves the locality ball.
    LeavesNeighbourhood { distance: f64 },
    /// Some sample leaves the bounding ball.
    OutOfBounds { radius: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub verdict: Verdict,
    /// Largest sampled `ρ` on the boundary circle.
    pub max_boundary_value: f64,
    /// Largest certified upper bound `g + |g′| h + B h²/2` on the boundary circle.
    pub certified_bound: f64,
    /// `B`, the bound on the second `θ`-derivative of `ρ(φ(e^{iθ}))`.
    pub second_derivative_bound: f64,
    pub samples: usize,
    /// The interior is covered by the maximum principle (plurisubharmonic `ρ`);
    /// otherwise the interior rings are sampled only.
    pub interior_by_max_principle: bool,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.verdict == Verdict::Admissible
    }
}

/// Fast evaluator for a polynomial at many points.
#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    n: usize,
    max_e: usize,
    terms: Vec<(Complex64, Vec<u8>)>,
}

impl Compiled {
    pub(crate) fn new(p: &ComplexPoly) -> Self {
        let n = p.dimension();
        let terms: Vec<(Complex64, Vec<u8>)> =
            p.terms().map(|(m, c)| (c, (0..2 * n).map(|f| m.field(f)).collect())).collect();
        let max_e = terms.iter().flat_map(|(_, e)| e.iter().copied()).max().unwrap_or(0) as usize;
        Compiled { n, max_e, terms }
    }

    pub(crate) fn eval(&self, z: &[Complex64]) -> Complex64 {
        let n = self.n;
        let mut pw = [[Complex64::new(1.0, 0.0); 25]; 12];
        for j in 0..n {
            let zc = z[j].conj();
            for e in 1..=self.max_e {
                pw[j][e] = pw[j][e - 1] * z[j];
                pw[n + j][e] = pw[n + j][e - 1] * zc;
            }
        }
        let mut acc = Complex64::default();
        for (c, ex) in &self.terms {
            let mut v = *c;
            for (f, &e) in ex.iter().enumerate() {
                if e > 0 {
                    v *= pw[f][e as usize];
                }
            }
            acc += v;
        }
        acc
    }

    /// `Σ |c| R^{α+β}` bounds `|p|` on the polydisc of radii `R`.
    pub(crate) fn abs_bound(&self, radii: &[f64]) -> f64 {
        let n = self.n;
        self.terms
            .iter()
            .map(|(c, ex)| {
                c.norm() * (0..n).map(|j| radii[j].powi(i32::from(ex[j]) + i32::from(ex[n + j]))).product::<f64>()
            })
            .sum()
    }
}

/// Compiled `ρ`, its holomorphic gradient and second derivatives, in the
/// unitary coordinates `w_i = ⟨z − center, f_i⟩` of an orthonormal frame.
/// Coefficient bounds then do not depend on where the domain sits or how
/// it is rotated.
#[derive(Clone, Debug)]
pub(crate) struct RhoData {
    pub center: Vec<Complex64>,
    pub frame: Vec<Vec<Complex64>>,
    pub rho: Compiled,
    pub grad: Vec<Compiled>,
    pub hess_hol: Vec<Vec<Compiled>>,
    pub hess_mixed: Vec<Vec<Compiled>>,
}

impl RhoData {
    pub(crate) fn new(rho: &HermitianPolynomial) -> Self {
        let n = rho.as_poly().dimension();
        let id = (0..n)
            .map(|i| (0..n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect();
        Self::expand(rho, vec![Complex64::default(); n], id)
    }

    /// Expanded about `p` in the search frame of the direction `e`.
    pub(crate) fn framed(dom: &DomainSpec, p: &[Complex64], e: &[Complex64]) -> Self {
        let frame = super::search::search_frame(dom, p, e);
        let n = p.len();
        if frame.len() != n {
            return Self::new(dom.rho());
        }
        let matrix: Vec<Vec<Complex64>> = (0..n).map(|j| frame.iter().map(|f| f[j]).collect()).collect();
        match dom.rho().compose_affine_rounded(&matrix, p) {
            Ok(local) => Self::expand(&local, p.to_vec(), frame),
            Err(_) => Self::new(dom.rho()),
        }
    }

    fn expand(rho: &HermitianPolynomial, center: Vec<Complex64>, frame: Vec<Vec<Complex64>>) -> Self {
        let p = rho.as_poly();
        let n = p.dimension();
        let grads: Vec<ComplexPoly> = (0..n).map(|j| p.d_hol(j)).collect();
        RhoData {
            center,
            frame,
            rho: Compiled::new(p),
            grad: grads.iter().map(Compiled::new).collect(),
            hess_hol: grads.iter().map(|g| (0..n).map(|k| Compiled::new(&g.d_hol(k))).collect()).collect(),
            hess_mixed: grads.iter().map(|g| (0..n).map(|k| Compiled::new(&g.d_anti(k))).collect()).collect(),
        }
    }

    fn rotate(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.frame.iter().map(|f| inner(v, f)).collect()
    }

    pub(crate) fn local(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.rotate(&sub(z, &self.center))
    }

    /// The disc in local coordinates.
    pub(crate) fn localize(&self, disc: &AnalyticDisc) -> AnalyticDisc {
        AnalyticDisc {
            basepoint: CPoint(self.local(disc.basepoint.coords())),
            coefficients: disc.coefficients.iter().map(|c| self.rotate(c)).collect(),
        }
    }

    pub(crate) fn value(&self, z: &[Complex64]) -> f64 {
        self.rho.eval(&self.local(z)).re
    }
}

/// Samples of the closed unit disc used by the certificate.
pub(crate) fn circle_points(m: usize) -> Vec<Complex64> {
    (0..m).map(|s| Complex64::from_polar(1.0, TAU * s as f64 / m as f64)).collect()
}

/// Certify `φ(Δ) ⊆ Ω ∩ U`.
///
/// On the boundary circle, with `g(θ) = ρ(φ(e^{iθ}))` and `h = 2π/M`, every
/// sample must satisfy `g + |g′| h + B h²/2 < −μ`, where `B` bounds `|g″|`
/// through sup bounds of the first and second derivatives of `ρ` on a
/// polydisc containing the image. The distance to `q` is handled the same way
/// with the Lipschitz bound `Σ n‖c_n‖`. For plurisubharmonic `ρ` the interior
/// then follows from the maximum principle; interior rings are sampled
/// in addition.
pub fn disc_admissible(
    dom: &DomainSpec,
    disc: &AnalyticDisc,
    cfg: &DiscSearchConfig,
) -> Result<AdmissibilityReport, KobayashiError> {
    cfg.validate()?;
    dom.rho().check_dim(disc.dim())?;
    let e = normalized(&disc.coefficients[0]).unwrap_or_else(|| {
        let mut e1 = vec![Complex64::default(); disc.dim()];
        e1[0] = Complex64::new(1.0, 0.0);
        e1
    });
    let data = RhoData::framed(dom, disc.basepoint.coords(), &e);
    Ok(certify(dom, &data, disc, cfg))
}

/// `B` for a disc already in the local coordinates of `data`.
fn second_derivative_bound(data: &RhoData, disc: &AnalyticDisc) -> f64 {
    let radii = disc.polydisc_radii();
    let s1 = disc.weighted_sums(1);
    let s2 = disc.weighted_sums(2);
    let n = s1.len();
    let mut b = 0.0;
    for j in 0..n {
        b += data.grad[j].abs_bound(&radii) * s2[j];
        for k in 0..n {
            let bjk = data.hess_hol[j][k].abs_bound(&radii);
            let cjk = data.hess_mixed[j][k].abs_bound(&radii);
            b += (bjk + cjk) * s1[j] * s1[k];
        }
    }
    2.0 * b
}

pub(crate) fn certify(
    dom: &DomainSpec,
    data: &RhoData,
    disc: &AnalyticDisc,
    cfg: &DiscSearchConfig,
) -> AdmissibilityReport {
    let m = cfg.boundary_samples;
    let h = TAU / m as f64;
    let mu = cfg.safety_margin;
    let q = dom.q().coords();
    let r_loc = dom.locality_radius();
    let big_r = dom.bounding_radius();
    let local = data.localize(disc);
    let b = second_derivative_bound(data, &local);
    let speed = disc.speed_bound();
    let psh = dom.is_plurisubharmonic();
    let mut report = AdmissibilityReport {
        verdict: Verdict::Admissible,
        max_boundary_value: f64::NEG_INFINITY,
        certified_bound: f64::NEG_INFINITY,
        second_derivative_bound: b,
        samples: 0,
        interior_by_max_principle: psh,
    };
    let mut inside_fail: Option<f64> = None;
    let mut gap_fail = false;
    let mut locality_fail: Option<f64> = None;

    for s in 0..m {
        let theta = h * s as f64;
        let z = disc.eval(Complex64::from_polar(1.0, theta));
        report.samples += 1;
        if norm(&z) >= big_r {
            report.verdict = Verdict::OutOfBounds { radius: norm(&z) };
            return report;
        }
        let w = local.eval(Complex64::from_polar(1.0, theta));
        let g = data.rho.eval(&w).re;
        let dz = local.theta_derivative(theta);
        let gp: f64 = 2.0 * data.grad.iter().zip(&dz).map(|(d, v)| d.eval(&w) * v).sum::<Complex64>().re;
        let bound = g + gp.abs() * h + b * h * h / 2.0;
        report.max_boundary_value = report.max_boundary_value.max(g);
        report.certified_bound = report.certified_bound.max(bound);
        if g >= -mu {
            inside_fail = Some(inside_fail.map_or(g, |v: f64| v.max(g)));
        } else if bound >= -mu {
            gap_fail = true;
        }
        let dist = norm(&sub(&z, q));
        if dist + speed * h >= r_loc {
            locality_fail = Some(locality_fail.map_or(dist, |v: f64| v.max(dist)));
        }
    }

    let rings = cfg.interior_rings;
    for j in 0..rings {
        let r = j as f64 / rings as f64;
        let count = if j == 0 { 1 } else { m };
        for s in 0..count {
            let z = disc.eval(Complex64::from_polar(r, TAU * s as f64 / m as f64));
            report.samples += 1;
            if norm(&z) >= big_r {
                report.verdict = Verdict::OutOfBounds { radius: norm(&z) };
                return report;
            }
            let g = data.value(&z);
            if g >= -mu {
                inside_fail = Some(inside_fail.map_or(g, |v: f64| v.max(g)));
            }
            let dist = norm(&sub(&z, q));
            if dist >= r_loc {
                locality_fail = Some(locality_fail.map_or(dist, |v: f64| v.max(dist)));
            }
        }
    }

    report.verdict = if let Some(value) = inside_fail {
        Verdict::NotInside { value }
    } else if let Some(distance) = locality_fail {
        Verdict::LeavesNeighbourhood { distance }
    } else if gap_fail {
        Verdict::GapNotCertified { worst: report.certified_bound }
    } else {
        Verdict::Admissible
    };
    report
}

/// Penalty used by the optimiser: `max(ρ/|ρ(p)|, (dist − r)/r)` over `m`
/// boundary samples. Negative values mean every sample is inside. The
/// bounding ball is left to [`certify`], since it is not affine invariant.
pub(crate) fn coarse_penalty(
    dom: &DomainSpec,
    data: &RhoData,
    disc: &AnalyticDisc,
    circle: &[Complex64],
    rho_p: f64,
) -> f64 {
    let q = dom.q().coords();
    let r_loc = dom.locality_radius();
    let scale = rho_p.abs().max(1e-300);
    let mut worst = f64::NEG_INFINITY;
    for &tau in circle {
        let z = disc.eval(tau);
        let a = data.value(&z) / scale;
        let b = (norm(&sub(&z, q)) - r_loc) / r_loc;
        worst = worst.max(a.max(b));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ModelParams;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn origin_disc(c1: [f64; 3]) -> AnalyticDisc {
        AnalyticDisc::linear(CPoint::origin(3), c1.iter().map(|&x| c(x)).collect()).unwrap()
    }

    #[test]
    fn ball_linear_discs() {
        let b = DomainSpec::ball(1.0).unwrap();
        let cfg = DiscSearchConfig::default();
        assert!(disc_admissible(&b, &origin_disc([0.9, 0.0, 0.0]), &cfg).unwrap().admissible());
        let r = disc_admissible(&b, &origin_disc([1.1, 0.0, 0.0]), &cfg).unwrap();
        assert!(!r.admissible());
        assert!(matches!(r.verdict, Verdict::OutOfBounds { .. }));
    }

    #[test]
    fn ball_disc_near_extremal_certifies_with_default_samples() {
        let b = DomainSpec::ball(1.0).unwrap();
        let r = disc_admissible(&b, &origin_disc([1.0 - 1e-3, 0.0, 0.0]), &DiscSearchConfig::default()).unwrap();
        assert!(r.admissible(), "{r:?}");
    }

    #[test]
    fn model_axis_disc() {
        let m = DomainSpec::model(ModelParams::new(2)).unwrap();
        let beta = 0.1 * 1e-4f64.powf(1.0 / 9.0);
        let d = AnalyticDisc::linear(CPoint::real(&[0.0, 0.0, -1e-4]), vec![c(beta), c(0.0), c(0.0)]).unwrap();
        assert!(disc_admissible(&m, &d, &DiscSearchConfig::default()).unwrap().admissible());
    }

    #[test]
    fn second_derivative_bound_dominates_finite_differences() {
        let m = DomainSpec::model(ModelParams::new(2)).unwrap();
        let data = RhoData::new(m.rho());
        let d = AnalyticDisc::new(
            CPoint::real(&[0.0, 0.0, -0.01]),
            vec![vec![c(0.2), c(0.1), c(0.0)], vec![Complex64::new(0.0, 0.05), c(-0.05), c(0.02)]],
        )
        .unwrap();
        let b = second_derivative_bound(&data, &d);
        let g = |th: f64| data.value(&d.eval(Complex64::from_polar(1.0, th)));
        let hh = 1e-4;
        for s in 0..200 {
            let th = TAU * s as f64 / 200.0;
            let second = (g(th + hh) - 2.0 * g(th) + g(th - hh)) / (hh * hh);
            assert!(second.abs() <= b, "{second} > {b}");
        }
    }

    #[test]
    fn config_validation() {
        let bad = DiscSearchConfig { boundary_samples: 100, ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(DiscSearchConfig::default().validate().is_ok());
    }
}
