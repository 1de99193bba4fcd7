//! The diagonal lower-bound certificate against a brute-force grid of
//! quadratic discs and the searched upper bound.

use squeeze_kit::kobayashi::{
    diag_lower_certificate, diagonal_direction, grid_oracle, kobayashi_upper, sweep_point, DiscSearchConfig, GridSpec,
};
use squeeze_kit::{DomainSpec, ModelParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dom = DomainSpec::model(ModelParams::new(2))?;
    let cfg = DiscSearchConfig::default();
    let spec = GridSpec { degree: 2, resolution: 5, beta_steps: 64, c2_range: None };
    let diag = diagonal_direction(3);
    println!("{:>8} {:>12} {:>12} {:>12}", "delta", "K lower", "1/grid beta", "K upper");
    for delta in [1e-2, 1e-3, 1e-4] {
        let p = sweep_point(&dom, delta);
        let lower = diag_lower_certificate(&dom, delta)?.value;
        let grid = grid_oracle(&dom, &p, &diag, &spec, &cfg).map(|r| 1.0 / r.beta).unwrap_or(f64::INFINITY);
        let upper = kobayashi_upper(&dom, &p, &diag, &cfg)?.value;
        println!("{delta:>8.0e} {lower:>12.4} {grid:>12.4} {upper:>12.4}");
    }
    Ok(())
}
