//! Sampled check of the linear-map obstruction on a circled star-shaped set.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::domain::{inner, norm, normalized};
use crate::error::SqueezeError;

/// A balanced set `{v : ‖v‖ < R(v/‖v‖)}` known through samples of `R`.
///
/// Between samples `R` is interpolated by inverse-distance weighting with
/// the phase-invariant distance `1 − |⟨e, s⟩|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarShapedSet {
    directions: Vec<Vec<Complex64>>,
    radii: Vec<f64>,
}

impl StarShapedSet {
    pub fn new(directions: Vec<Vec<Complex64>>, radii: Vec<f64>) -> Result<Self, SqueezeError> {
        if directions.is_empty() || directions.len() != radii.len() {
            return Err(SqueezeError::InvalidArgument("need one radius per sample direction".into()));
        }
        let n = directions[0].len();
        let mut unit = Vec::with_capacity(directions.len());
        for d in &directions {
            if d.len() != n {
                return Err(SqueezeError::InvalidArgument("sample directions differ in dimension".into()));
            }
            unit.push(normalized(d).ok_or_else(|| SqueezeError::InvalidArgument("zero sample direction".into()))?);
        }
        if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(SqueezeError::InvalidArgument("radii must be positive".into()));
        }
        Ok(StarShapedSet { directions: unit, radii })
    }

    /// Samples `radius` at the given directions.
    pub fn from_fn(directions: Vec<Vec<Complex64>>, radius: impl Fn(&[Complex64]) -> f64) -> Result<Self, SqueezeError> {
        let radii = directions.iter().map(|d| radius(&normalized(d).unwrap_or_else(|| d.clone()))).collect();
        Self::new(directions, radii)
    }

    pub fn dim(&self) -> usize {
        self.directions[0].len()
    }

    pub fn samples(&self) -> impl Iterator<Item = (&[Complex64], f64)> {
        self.directions.iter().map(Vec::as_slice).zip(self.radii.iter().copied())
    }

    /// Interpolated radius along the unit vector `e`.
    pub fn radius(&self, e: &[Complex64]) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for (s, r) in self.samples() {
            let d = (1.0 - inner(e, s).norm()).max(0.0);
            if d < 1e-14 {
                return r;
            }
            let w = 1.0 / (d * d);
            num += w * r;
            den += w;
        }
        num / den
    }

    /// Minkowski gauge: `< 1` inside, `≥ 1` outside.
    pub fn gauge(&self, v: &[Complex64]) -> f64 {
        match normalized(v) {
            Some(e) => norm(v) / self.radius(&e),
            None => 0.0,
        }
    }
}

/// `count` directions uniform on the unit sphere of `C^n`.
pub fn random_directions(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    (0..count).map(|_| random_unit(n, rng)).collect()
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    loop {
        let v = gaussian_vec(n, rng);
        if let Some(u) = normalized(&v) {
            return u;
        }
    }
}

fn gaussian_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let (a, b): (f64, f64) = (StandardNormal.sample(rng), StandardNormal.sample(rng));
            Complex64::new(a, b)
        })
        .collect()
}

type Matrix = Vec<Vec<Complex64>>;

fn apply(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Inverse by Gauss–Jordan elimination with partial pivoting.
fn invert(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::default() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))?;
        if a[piv][col].norm() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        let p = a[col][col];
        for x in a[col].iter_mut() {
            *x /= p;
        }
        for row in 0..n {
            if row != col {
                let f = a[row][col];
                if f != Complex64::default() {
                    for j in 0..2 * n {
                        let sub = f * a[col][j];
                        a[row][j] -= sub;
                    }
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Samples random linear maps `L` scaled so that `L(D) ⊆ B(1)` on the
/// boundary samples, and reports whether none of them also has
/// `B(3ε) ⊆ L(D)`. The inner radius of `L(D)` is estimated over the image
/// of `ζ1 + ζ2`, the images of the sample directions and a few random
/// directions.
///
/// Fails with `HypothesisNotSatisfied` unless `λζ1, λζ2 ∈ D`,
/// `ελ(ζ1 + ζ2) ∉ D` and `3ε < 1`; for `3ε ≥ 1` there is nothing to check.
pub fn no_linear_map_check(
    set: &StarShapedSet,
    lambda: f64,
    zeta1: &[Complex64],
    zeta2: &[Complex64],
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<bool, SqueezeError> {
    let n = set.dim();
    if zeta1.len() != n || zeta2.len() != n {
        return Err(SqueezeError::InvalidArgument("directions do not match the set's dimension".into()));
    }
    if !(epsilon > 0.0 && 3.0 * epsilon < 1.0) {
        return Err(SqueezeError::HypothesisNotSatisfied(format!("3ε = {} is not below 1", 3.0 * epsilon)));
    }
    let scaled = |z: &[Complex64], s: f64| -> Vec<Complex64> { z.iter().map(|x| x * s).collect() };
    for z in [zeta1, zeta2] {
        let g = set.gauge(&scaled(z, lambda));
        if g >= 1.0 {
            return Err(SqueezeError::HypothesisNotSatisfied(format!("λζ has gauge {g} ≥ 1")));
        }
    }
    let sum: Vec<Complex64> = zeta1.iter().zip(zeta2).map(|(a, b)| a + b).collect();
    let g = set.gauge(&scaled(&sum, epsilon * lambda));
    if g < 1.0 {
        return Err(SqueezeError::HypothesisNotSatisfied(format!("ελ(ζ1 + ζ2) has gauge {g} < 1")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let extra = random_directions(n, 16, &mut rng);
    let target = 3.0 * epsilon;
    for _ in 0..trials {
        let mut l: Matrix = (0..n).map(|_| gaussian_vec(n, &mut rng)).collect();
        let outer = set.samples().map(|(s, r)| r * norm(&apply(&l, s))).fold(0.0, f64::max);
        for row in l.iter_mut() {
            for x in row.iter_mut() {
                *x /= outer;
            }
        }
        let Some(inv) = invert(&l) else { continue };
        let radius_along = |u: &[Complex64]| -> f64 {
            let Some(u) = normalized(u) else { return f64::INFINITY };
            1.0 / set.gauge(&apply(&inv, &u))
        };
        let mut tests = std::iter::once(apply(&l, &sum))
            .chain(set.samples().map(|(s, _)| apply(&l, s)))
            .chain(extra.iter().cloned());
        if tests.all(|u| radius_along(&u) >= target) {
            return Ok(false);
        }
    }
    Ok(true)
}
