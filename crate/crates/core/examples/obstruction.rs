//! The linear-map obstruction on a star-shaped set that is wide along the
//! coordinate axes and thin along their diagonal.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use squeeze_kit::kobayashi::diagonal_direction;
use squeeze_kit::squeezing::{no_linear_map_check, obstruction_epsilon, random_directions, StarShapedSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::default();
    let (z1, z2) = (vec![one, zero, zero], vec![zero, one, zero]);
    let (lambda, thin) = (0.8, 0.05);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut dirs = random_directions(3, 400, &mut rng);
    dirs.extend([z1.clone(), z2.clone(), vec![zero, zero, one], diagonal_direction(3)]);
    let set = StarShapedSet::from_fn(dirs, |u| {
        let s = (u[0].norm_sqr() - u[1].norm_sqr()).abs() + u[2].norm_sqr();
        thin + (1.0 - thin) * s.min(1.0)
    })?;

    let eps = obstruction_epsilon(lambda, thin, &z1, &z2, 1e-3)?;
    println!("lambda {lambda}, r_d {thin}, epsilon {eps:.6}, 3 epsilon {:.6}", 3.0 * eps);
    let none = no_linear_map_check(&set, lambda, &z1, &z2, eps, 10_000, 7)?;
    println!("no linear map squeezes the set between B(3 epsilon) and B(1): {none}");

    let fat = StarShapedSet::from_fn(random_directions(3, 200, &mut rng), |_| 1.0)?;
    match no_linear_map_check(&fat, lambda, &z1, &z2, eps, 100, 7) {
        Ok(v) => println!("ball: {v}"),
        Err(e) => println!("ball: {e}"),
    }
    Ok(())
}
