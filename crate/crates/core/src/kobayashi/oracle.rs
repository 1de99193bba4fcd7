//! Exhaustive grid search over low-degree discs, used as an independent
//! check on the certificates and on the optimizer.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::disc::{certify, circle_points, coarse_penalty, AnalyticDisc, DiscSearchConfig, RhoData};
use crate::domain::{normalized, CPoint, DomainSpec};
use crate::error::KobayashiError;

/// Largest number of discs one oracle run may test.
pub const ORACLE_BUDGET: usize = 1_000_000;
const PRESCREEN_SAMPLES: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// 1 for linear discs only, 2 to add a gridded `c_2`.
    pub degree: usize,
    /// Grid points per real component of `c_2`.
    pub resolution: usize,
    /// `β` runs over `bounding_radius · j / beta_steps`.
    pub beta_steps: usize,
    /// Half-width of the `c_2` grid; `None` means `±β`.
    pub c2_range: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub beta: f64,
    pub witness: AnalyticDisc,
    pub discs_tested: usize,
}

fn grid_value(i: usize, n: usize, half: f64) -> f64 {
    if n == 1 {
        0.0
    } else {
        -half + 2.0 * half * i as f64 / (n - 1) as f64
    }
}

/// Largest grid `β` for which some gridded disc with `φ′(0) = β ζ/‖ζ‖` is
/// certified admissible.
pub fn grid_oracle(
    dom: &DomainSpec,
    p: &CPoint,
    zeta: &[Complex64],
    spec: &GridSpec,
    cfg: &DiscSearchConfig,
) -> Result<OracleResult, KobayashiError> {
    cfg.validate()?;
    dom.rho().check_dim(p.dim())?;
    dom.rho().check_dim(zeta.len())?;
    if !(1..=2).contains(&spec.degree) || spec.resolution == 0 || spec.beta_steps == 0 {
        return Err(KobayashiError::InvalidArgument("grid needs degree 1 or 2 and positive sizes".into()));
    }
    let e = normalized(zeta).ok_or_else(|| KobayashiError::InvalidArgument("direction must be nonzero".into()))?;
    let n = dom.dimension();
    let per_beta = if spec.degree == 1 {
        1
    } else {
        spec.resolution.checked_pow(2 * n as u32).unwrap_or(usize::MAX)
    };
    let requested = per_beta.saturating_mul(spec.beta_steps);
    if requested > ORACLE_BUDGET {
        return Err(KobayashiError::BudgetExceeded { requested, limit: ORACLE_BUDGET });
    }
    if !dom.contains(p.coords())? {
        return Err(KobayashiError::PointOutsideDomain);
    }
    let data = RhoData::framed(dom, p.coords(), &e);
    let circle = circle_points(PRESCREEN_SAMPLES);
    let rho_p = data.value(p.coords());
    let mut tested = 0;
    for j in (1..=spec.beta_steps).rev() {
        let beta = dom.bounding_radius() * j as f64 / spec.beta_steps as f64;
        let c1: Vec<Complex64> = e.iter().map(|x| x * beta).collect();
        let half = spec.c2_range.unwrap_or(beta);
        let build = |idx: usize| -> AnalyticDisc {
            let mut coeffs = vec![c1.clone()];
            if spec.degree == 2 {
                let mut rest = idx;
                let mut reals = vec![0.0; 2 * n];
                for r in reals.iter_mut() {
                    *r = grid_value(rest % spec.resolution, spec.resolution, half);
                    rest /= spec.resolution;
                }
                coeffs.push(reals.chunks(2).map(|x| Complex64::new(x[0], x[1])).collect());
            }
            AnalyticDisc::new(p.clone(), coeffs).expect("dimensions agree")
        };
        let found = (0..per_beta).into_par_iter().find_first(|&idx| {
            let d = build(idx);
            coarse_penalty(dom, &data, &d, &circle, rho_p) < 0.0 && certify(dom, &data, &d, cfg).admissible()
        });
        tested += per_beta;
        if let Some(idx) = found {
            return Ok(OracleResult { beta, witness: build(idx), discs_tested: tested });
        }
    }
    Err(KobayashiError::NoAdmissibleDisc { beta: dom.bounding_radius() / spec.beta_steps as f64 })
}
