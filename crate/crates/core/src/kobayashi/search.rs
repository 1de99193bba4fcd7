//! Upper bounds on the Kobayashi metric: bisection over the disc size with a
//! derivative-free search over the higher coefficients, and the explicit
//! linear discs along the coordinate axes.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::disc::{certify, circle_points, coarse_penalty, AnalyticDisc, DiscSearchConfig, RhoData};
use super::{EstimateKind, MetricEstimate};
use crate::domain::{inner, norm, normalized, CPoint, DomainSpec, FamilyTag};
use crate::error::KobayashiError;

const BETA_FLOOR: f64 = 1e-8;
const COARSE_SAMPLES: usize = 64;

/// Minimise `f` from `x0` with the Nelder–Mead simplex method.
///
/// Stops after `budget` evaluations or once a value below `stop_below` is
/// seen. Returns the best point, its value and the evaluations used.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    budget: usize,
    stop_below: f64,
) -> (Vec<f64>, f64, usize) {
    let n = x0.len();
    let mut evals = 0;
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        if evals >= budget {
            break;
        }
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let by_value = |a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)| a.1.total_cmp(&b.1);
    while evals < budget && simplex.len() == n + 1 {
        simplex.sort_by(by_value);
        if simplex[0].1 < stop_below {
            break;
        }
        let spread = simplex[n].1 - simplex[0].1;
        let size: f64 = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.abs() < 1e-14 && size < 1e-12 {
            break;
        }
        let centroid: Vec<f64> =
            (0..n).map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64).collect();
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (worst.0[j] - centroid[j])).collect() };
        let xr = along(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let x = along(-0.5);
            let v = eval(&x, &mut evals);
            (x, v)
        } else {
            let x = along(0.5);
            let v = eval(&x, &mut evals);
            (x, v)
        };
        if fc < worst.1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for item in simplex.iter_mut().skip(1) {
            if evals >= budget {
                break;
            }
            let x: Vec<f64> = item.0.iter().zip(&best).map(|(a, b)| b + 0.5 * (a - b)).collect();
            let v = eval(&x, &mut evals);
            *item = (x, v);
        }
    }
    simplex.sort_by(by_value);
    let (x, v) = simplex.swap_remove(0);
    (x, v, evals)
}

/// Orthonormal frame whose first vector is `e`. In `C^3` the second vector
/// comes from the complex normal of `ρ` at `p` and the third from the
/// conjugated cross product, so the frame moves with special unitary maps.
pub(crate) fn search_frame(dom: &DomainSpec, p: &[Complex64], e: &[Complex64]) -> Vec<Vec<Complex64>> {
    let n = e.len();
    let mut frame = vec![e.to_vec()];
    let normal: Option<Vec<Complex64>> = dom
        .wirtinger_gradient(p)
        .ok()
        .map(|g| g.iter().map(|x| x.conj()).collect::<Vec<_>>());
    let project_out = |v: &[Complex64], frame: &[Vec<Complex64>]| -> Vec<Complex64> {
        let mut w = v.to_vec();
        for f in frame {
            let c = inner(&w, f);
            for (wi, fi) in w.iter_mut().zip(f) {
                *wi -= c * fi;
            }
        }
        w
    };
    if let Some(nv) = normal {
        let w = project_out(&nv, &frame);
        if norm(&w) > 1e-8 * norm(&nv).max(1e-300) {
            frame.push(normalized(&w).unwrap());
        }
    }
    if n == 3 && frame.len() == 2 {
        let (a, b) = (&frame[0], &frame[1]);
        let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        let w: Vec<Complex64> = cross.iter().map(|x| x.conj()).collect();
        frame.push(normalized(&w).unwrap());
        return frame;
    }
    for j in 0..n {
        if frame.len() == n {
            break;
        }
        let mut ej = vec![Complex64::default(); n];
        ej[j] = Complex64::new(1.0, 0.0);
        let w = project_out(&ej, &frame);
        if norm(&w) > 1e-6 {
            frame.push(normalized(&w).unwrap());
        }
    }
    frame
}

struct Searcher<'a> {
    dom: &'a DomainSpec,
    data: RhoData,
    cfg: &'a DiscSearchConfig,
    p: CPoint,
    e: Vec<Complex64>,
    frame: Vec<Vec<Complex64>>,
    circle: Vec<Complex64>,
    rho_p: f64,
    rng: ChaCha8Rng,
    /// Higher coefficients of the last disc found, divided by its `β`.
    warm: Option<Vec<f64>>,
}

impl<'a> Searcher<'a> {
    fn new(dom: &'a DomainSpec, p: &CPoint, e: Vec<Complex64>, cfg: &'a DiscSearchConfig) -> Self {
        let data = RhoData::framed(dom, p.coords(), &e);
        let rho_p = data.value(p.coords());
        Searcher {
            dom,
            frame: search_frame(dom, p.coords(), &e),
            data,
            cfg,
            p: p.clone(),
            e,
            circle: circle_points(COARSE_SAMPLES),
            rho_p,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            warm: None,
        }
    }

    fn disc_from(&self, beta: f64, x: &[f64]) -> AnalyticDisc {
        let n = self.e.len();
        let mut coeffs = vec![self.e.iter().map(|c| c * beta).collect::<Vec<_>>()];
        for chunk in x.chunks(2 * n) {
            let mut c = vec![Complex64::default(); n];
            for (i, f) in self.frame.iter().enumerate() {
                let w = Complex64::new(chunk[2 * i], chunk[2 * i + 1]);
                for (cj, fj) in c.iter_mut().zip(f) {
                    *cj += w * fj;
                }
            }
            coeffs.push(c);
        }
        AnalyticDisc::new(self.p.clone(), coeffs).expect("dimensions agree by construction")
    }

    fn certified(&self, disc: &AnalyticDisc) -> bool {
        certify(self.dom, &self.data, disc, self.cfg).admissible()
    }

    /// An admissible disc with `φ′(0) = β e`, if the search finds one.
    fn find(&mut self, beta: f64) -> Option<AnalyticDisc> {
        let linear = self.disc_from(beta, &[]);
        if self.certified(&linear) {
            return Some(linear);
        }
        let extra = self.cfg.max_degree.saturating_sub(1);
        if extra == 0 || self.frame.len() < self.e.len() {
            return None;
        }
        let dims = 2 * self.e.len() * extra;
        let mut budget = self.cfg.optimizer_budget;
        let chunk = (budget / 4).max(dims + 2);
        let (mut start, mut step) = match &self.warm {
            Some(w) if w.len() == dims => (w.iter().map(|x| x * beta).collect(), 0.1 * beta),
            _ => (vec![0.0; dims], 0.5 * beta),
        };
        let mut best: Option<(Vec<f64>, f64)> = None;
        while budget > dims + 1 {
            let (x, v, used) = {
                let this = &*self;
                let obj = |x: &[f64]| {
                    let d = this.disc_from(beta, x);
                    coarse_penalty(this.dom, &this.data, &d, &this.circle, this.rho_p)
                };
                nelder_mead(obj, &start, step, chunk.min(budget), -0.05)
            };
            budget = budget.saturating_sub(used.max(1));
            if v < 0.0 {
                let d = self.disc_from(beta, &x);
                if self.certified(&d) {
                    self.warm = Some(x.iter().map(|v| v / beta).collect());
                    return Some(d);
                }
            }
            // Restart the simplex at the best point while that still helps,
            // otherwise draw a fresh start.
            let improved = best.as_ref().is_none_or(|(_, bv)| v < bv - 1e-4);
            if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
                best = Some((x, v));
            }
            if improved {
                start = best.as_ref().map(|(bx, _)| bx.clone()).unwrap_or_default();
                step = 0.1 * beta;
            } else {
                start = (0..dims)
                    .map(|_| {
                        let g: f64 = StandardNormal.sample(&mut self.rng);
                        0.5 * beta * g
                    })
                    .collect();
                step = 0.5 * beta;
                best = None;
            }
        }
        None
    }
}

/// Validated basepoint and unit direction.
fn prepare(dom: &DomainSpec, p: &CPoint, zeta: &[Complex64]) -> Result<(Vec<Complex64>, f64), KobayashiError> {
    dom.rho().check_dim(p.dim())?;
    dom.rho().check_dim(zeta.len())?;
    if !dom.contains(p.coords())? {
        return Err(KobayashiError::PointOutsideDomain);
    }
    let len = norm(zeta);
    let e = normalized(zeta).ok_or_else(|| KobayashiError::InvalidArgument("direction must be nonzero".into()))?;
    Ok((e, len))
}

/// `K(p, ζ) ≤ value`, witnessed by an admissible disc with `φ′(0) = β ζ/‖ζ‖`.
pub fn kobayashi_upper(
    dom: &DomainSpec,
    p: &CPoint,
    zeta: &[Complex64],
    cfg: &DiscSearchConfig,
) -> Result<MetricEstimate, KobayashiError> {
    cfg.validate()?;
    let (e, len) = prepare(dom, p, zeta)?;
    let mut s = Searcher::new(dom, p, e.clone(), cfg);
    let mut lo = BETA_FLOOR;
    let mut witness = s.find(lo).ok_or(KobayashiError::NoAdmissibleDisc { beta: lo })?;
    let mut hi = dom.bounding_radius();
    while hi / lo > 1.0 + cfg.bisection_rel_tol {
        let mid = (lo * hi).sqrt();
        match s.find(mid) {
            Some(d) => {
                lo = mid;
                witness = d;
            }
            None => hi = mid,
        }
    }
    Ok(MetricEstimate {
        basepoint: p.clone(),
        direction: e,
        value: len / lo,
        kind: EstimateKind::UpperWitness,
        witness: Some(witness),
        certificate: None,
    })
}

/// Exponent `e` in `β = ε δ^e` of the axis discs: `1/(4k+1)` for the model
/// family, `1/(2k+1)` for the positive-term family.
pub fn lemma10_exponent(dom: &DomainSpec) -> Result<f64, KobayashiError> {
    let k = dom
        .declared_k()
        .ok_or_else(|| KobayashiError::DomainNotInCertifiedForm("no declared k".into()))?;
    match dom.family() {
        FamilyTag::Model => Ok(1.0 / f64::from(4 * k + 1)),
        FamilyTag::Herbort => Ok(1.0 / f64::from(2 * k + 1)),
        other => Err(KobayashiError::DomainNotInCertifiedForm(format!(
            "axis discs need the model or herbort family, not {}",
            other.as_str()
        ))),
    }
}

/// `Σ |c| β^deg` over the terms of `ρ − Re t` that only involve `axis`.
fn axis_growth(dom: &DomainSpec, axis: usize, beta: f64) -> f64 {
    let n = dom.dimension();
    dom.rho()
        .as_poly()
        .terms()
        .filter(|(m, _)| (0..n).all(|j| j == axis || (m.field(j) == 0 && m.field(n + j) == 0)))
        .map(|(m, c)| c.norm() * beta.powi(m.degree() as i32))
        .sum()
}

fn check_axis_setting(dom: &DomainSpec, axis: usize) -> Result<(), KobayashiError> {
    let n = dom.dimension();
    if axis + 1 >= n {
        return Err(KobayashiError::InvalidArgument(format!("axis {axis} is not a z-coordinate")));
    }
    if norm(dom.q().coords()) != 0.0 {
        return Err(KobayashiError::DomainNotInCertifiedForm("boundary point must be the origin".into()));
    }
    Ok(())
}

const EPS0_GRID: usize = 241;

/// Largest `ε` such that, for every `δ` on a log grid from `r_loc²` down to
/// `1e-12`, the axis disc of size `β = ε δ^e` keeps `Σ|c| β^deg ≤ δ/2` on its
/// axis and stays within `0.9 r_loc` of `q`.
pub fn epsilon0(dom: &DomainSpec, axis: usize) -> Result<f64, KobayashiError> {
    let e = lemma10_exponent(dom)?;
    check_axis_setting(dom, axis)?;
    let r = dom.locality_radius();
    let (lo_d, hi_d) = (1e-12f64.ln(), (r * r).ln());
    let mut eps0 = f64::INFINITY;
    for i in 0..EPS0_GRID {
        let delta = (hi_d + (lo_d - hi_d) * i as f64 / (EPS0_GRID - 1) as f64).exp();
        let ok = |eps: f64| {
            let beta = eps * delta.powf(e);
            axis_growth(dom, axis, beta) <= delta / 2.0 && beta * beta + delta * delta <= (0.9 * r).powi(2)
        };
        let (mut a, mut b) = (0.0, 1.0);
        while ok(b) {
            b *= 2.0;
        }
        for _ in 0..100 {
            let mid = 0.5 * (a + b);
            if ok(mid) {
                a = mid;
            } else {
                b = mid;
            }
        }
        eps0 = eps0.min(a);
    }
    Ok(eps0)
}

/// Basepoint `(0, …, 0, −δ)` of the sweep.
pub fn sweep_point(dom: &DomainSpec, delta: f64) -> CPoint {
    let mut p = vec![Complex64::default(); dom.dimension()];
    *p.last_mut().unwrap() = Complex64::new(-delta, 0.0);
    CPoint(p)
}

/// The linear disc `τ ↦ (0,0,−δ) + β τ e_axis` with `β = ε δ^e`.
pub fn lemma10_disc(dom: &DomainSpec, delta: f64, epsilon: f64, axis: usize) -> Result<AnalyticDisc, KobayashiError> {
    let e = lemma10_exponent(dom)?;
    check_axis_setting(dom, axis)?;
    let r = dom.locality_radius();
    if !(delta > 0.0 && delta < r * r) {
        return Err(KobayashiError::InvalidArgument(format!("delta must lie in (0, {})", r * r)));
    }
    if !(epsilon > 0.0) {
        return Err(KobayashiError::InvalidArgument("epsilon must be positive".into()));
    }
    let eps0 = epsilon0(dom, axis)?;
    if epsilon > eps0 {
        return Err(KobayashiError::EpsilonTooLarge { epsilon, epsilon0: eps0 });
    }
    let disc = axis_disc(dom, delta, epsilon * delta.powf(e), axis);
    let report = super::disc::disc_admissible(dom, &disc, &DiscSearchConfig::default())?;
    if !report.admissible() {
        return Err(KobayashiError::NotAdmissible);
    }
    Ok(disc)
}

fn axis_disc(dom: &DomainSpec, delta: f64, beta: f64, axis: usize) -> AnalyticDisc {
    let mut c1 = vec![Complex64::default(); dom.dimension()];
    c1[axis] = Complex64::new(beta, 0.0);
    AnalyticDisc::linear(sweep_point(dom, delta), c1).expect("dimensions agree")
}

/// Largest `ε` (to 1e-6 relative) for which the linear axis disc is
/// certified at this `δ`; an empirical counterpart of [`epsilon0`].
pub fn admissibility_threshold(
    dom: &DomainSpec,
    delta: f64,
    axis: usize,
    cfg: &DiscSearchConfig,
) -> Result<f64, KobayashiError> {
    let e = lemma10_exponent(dom)?;
    check_axis_setting(dom, axis)?;
    cfg.validate()?;
    let mut unit = vec![Complex64::default(); dom.dimension()];
    unit[axis] = Complex64::new(1.0, 0.0);
    let data = RhoData::framed(dom, sweep_point(dom, delta).coords(), &unit);
    let scale = delta.powf(e);
    let ok = |eps: f64| certify(dom, &data, &axis_disc(dom, delta, eps * scale, axis), cfg).admissible();
    let mut a = BETA_FLOOR / scale;
    if !ok(a) {
        return Err(KobayashiError::NoAdmissibleDisc { beta: BETA_FLOOR });
    }
    let mut b = dom.bounding_radius() / scale;
    while b / a > 1.0 + 1e-6 {
        let mid = (a * b).sqrt();
        if ok(mid) {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(a)
}
