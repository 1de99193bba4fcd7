#![allow(dead_code)]

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use squeeze_kit::domain::{inner, normalized};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn unit(n: usize, j: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::default(); n];
    v[j] = c(1.0, 0.0);
    v
}

/// Gram–Schmidt on Gaussian rows, then the last row is divided by the
/// determinant so the result lies in SU(3).
pub fn random_special_unitary(rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    while rows.len() < 3 {
        let mut v: Vec<Complex64> = (0..3)
            .map(|_| {
                let a = gauss(rng);
                c(a, gauss(rng))
            })
            .collect();
        for r in &rows {
            let p = inner(&v, r);
            for (x, y) in v.iter_mut().zip(r) {
                *x -= p * y;
            }
        }
        if let Some(u) = normalized(&v) {
            rows.push(u);
        }
    }
    let m = &rows;
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    for x in rows[2].iter_mut() {
        *x /= det;
    }
    rows
}

pub fn apply(u: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    u.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}
