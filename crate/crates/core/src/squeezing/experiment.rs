use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exponent::{exponent_composition, ExponentVariant};
use super::pipeline::{squeezing_upper, Mode, SqueezeConfig, SqueezingBound};
use crate::domain::{DomainSpec, FamilyTag};
use crate::error::SqueezeError;
use crate::poly::fmt_real;

pub const CSV_HEADER: &str = "delta,K_axis_upper,K_diag_lower,lambda,r_d,epsilon,bound";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentVerdict {
    /// Positive slope and `3ε` strictly decreasing as `δ → 0`.
    Decay,
    /// Every row is vacuous.
    NoDecayEvidence,
    Inconclusive,
}

impl ExperimentVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentVerdict::Decay => "decay",
            ExperimentVerdict::NoDecayEvidence => "no decay evidence",
            ExperimentVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentTable {
    pub mode: Mode,
    /// Sorted by `δ`, largest first.
    pub rows: Vec<SqueezingBound>,
    /// Least-squares slope of `ln 3ε` against `ln δ` over non-vacuous rows.
    pub slope: Option<f64>,
    pub theoretical_exponent: Option<Rational64>,
    pub verdict: ExperimentVerdict,
}

impl ExperimentTable {
    pub fn to_csv(&self) -> String {
        let opt = |x: Option<f64>| x.map(fmt_real).unwrap_or_default();
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let fields = [
                fmt_real(r.delta),
                opt(r.k_axis_upper()),
                opt(r.k_diag_lower()),
                opt(r.lambda),
                opt(r.r_d),
                opt(r.epsilon),
                fmt_real(r.bound),
            ];
            s.push_str(&fields.join(","));
            s.push('\n');
        }
        s
    }

    pub fn theoretical_exponent_f64(&self) -> Option<f64> {
        self.theoretical_exponent.map(|r| *r.numer() as f64 / *r.denom() as f64)
    }
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Exponent the pipeline should show for this family.
pub fn family_exponent(dom: &DomainSpec) -> Option<Rational64> {
    let k = dom.declared_k()?;
    match dom.family() {
        FamilyTag::Model => Some(exponent_composition(k, ExponentVariant::Standard)),
        FamilyTag::Herbort => Some(exponent_composition(k, ExponentVariant::PositiveTerms)),
        _ => None,
    }
}

/// One squeezing bound per `δ`, evaluated in parallel and assembled in order.
pub fn decay_experiment(dom: &DomainSpec, deltas: &[f64], cfg: &SqueezeConfig) -> Result<ExperimentTable, SqueezeError> {
    if deltas.is_empty() {
        return Err(SqueezeError::InvalidDeltas("empty delta list".into()));
    }
    let r2 = dom.locality_radius().powi(2);
    if deltas.iter().any(|d| !(*d > 0.0 && *d < r2)) {
        return Err(SqueezeError::InvalidDeltas(format!("every delta must lie in (0, {r2})")));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(SqueezeError::InvalidDeltas("deltas must be strictly decreasing".into()));
    }
    let rows = deltas
        .par_iter()
        .map(|&d| squeezing_upper(dom, d, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let live: Vec<&SqueezingBound> = rows.iter().filter(|r| !r.is_vacuous()).collect();
    let xs: Vec<f64> = live.iter().map(|r| r.delta.ln()).collect();
    let ys: Vec<f64> = live.iter().map(|r| r.raw_bound().unwrap().ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    let decreasing = live.windows(2).all(|w| w[1].raw_bound() < w[0].raw_bound());
    let verdict = if live.is_empty() {
        ExperimentVerdict::NoDecayEvidence
    } else if slope.is_some_and(|s| s > 0.0) && decreasing && live.len() == rows.len() {
        ExperimentVerdict::Decay
    } else {
        ExperimentVerdict::Inconclusive
    };
    Ok(ExperimentTable { mode: cfg.mode, rows, slope, theoretical_exponent: family_exponent(dom), verdict })
}

/// `count` geometrically spaced values from `start` to `end`, inclusive.
pub fn geometric_deltas(start: f64, end: f64, count: usize) -> Result<Vec<f64>, SqueezeError> {
    if !(start > 0.0 && end > 0.0) || count == 0 {
        return Err(SqueezeError::InvalidDeltas("range needs positive endpoints and count".into()));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let (a, b) = (start.log10(), end.log10());
    Ok((0..count).map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ModelParams;

    fn grid() -> Vec<f64> {
        vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
    }

    #[test]
    fn closed_form_slope_matches_exponent() {
        let cfg = SqueezeConfig { mode: Mode::ClosedForm, ..Default::default() };
        let m = DomainSpec::model(ModelParams::new(2)).unwrap();
        let t = decay_experiment(&m, &grid(), &cfg).unwrap();
        assert_eq!(t.theoretical_exponent, Some(Rational64::new(1, 72)));
        assert!((t.slope.unwrap() - 1.0 / 72.0).abs() < 1e-12, "{:?}", t.slope);
        assert_eq!(t.verdict, ExperimentVerdict::Decay);
        let h = DomainSpec::herbort().unwrap();
        let t = decay_experiment(&h, &grid(), &cfg).unwrap();
        assert!((t.slope.unwrap() - 1.0 / 42.0).abs() < 1e-12, "{:?}", t.slope);
    }

    #[test]
    fn convex_control_has_no_decay() {
        let c = DomainSpec::convex_control().unwrap();
        let t = decay_experiment(&c, &grid(), &SqueezeConfig::default()).unwrap();
        assert!(t.rows.iter().all(|r| r.bound == 1.0));
        assert_eq!(t.slope, None);
        assert_eq!(t.verdict, ExperimentVerdict::NoDecayEvidence);
        let csv = t.to_csv();
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().nth(1).unwrap(), "0.01,,,,,,1");
    }

    #[test]
    fn delta_validation() {
        let m = DomainSpec::model(ModelParams::new(2)).unwrap();
        let cfg = SqueezeConfig::default();
        for bad in [vec![], vec![1e-3, 1e-2], vec![1e-3, 1e-3], vec![0.5], vec![-1e-3]] {
            assert!(matches!(decay_experiment(&m, &bad, &cfg), Err(SqueezeError::InvalidDeltas(_))));
        }
    }

    #[test]
    fn geometric_range() {
        let d = geometric_deltas(1e-2, 1e-6, 5).unwrap();
        for (a, b) in d.iter().zip(grid()) {
            assert!((a / b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn slope_of_line() {
        assert_eq!(least_squares_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]), Some(2.0));
        assert_eq!(least_squares_slope(&[1.0], &[1.0]), None);
    }
}
