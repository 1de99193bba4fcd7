//! Inner and outer radii of the Kobayashi indicatrix at a point near the
//! boundary of the model domain.

use num_complex::Complex64;
use squeeze_kit::kobayashi::{diagonal_direction, indicatrix_radii, sweep_point, DiscSearchConfig};
use squeeze_kit::{DomainSpec, ModelParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dom = DomainSpec::model(ModelParams::new(2))?;
    let delta = 1e-4;
    let p = sweep_point(&dom, delta);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::default();
    let directions = vec![vec![one, zero, zero], vec![zero, one, zero], diagonal_direction(3), vec![zero, zero, one]];
    let data = indicatrix_radii(&dom, &p, &directions, &DiscSearchConfig::default())?;
    println!("delta = {delta:e}");
    for e in &data.entries {
        let dir: Vec<String> = e.direction.iter().map(|c| format!("{:.3}", c.re)).collect();
        println!("[{}]  r_lo {:.6}  r_hi {:.6}  ({:?})", dir.join(", "), e.r_lo, e.r_hi, e.lower.kind);
    }
    Ok(())
}
