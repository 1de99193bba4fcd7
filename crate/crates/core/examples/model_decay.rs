//! Squeezing bounds on the model domain as the basepoint approaches the
//! boundary, in both modes, with the fitted log-log slope.

use squeeze_kit::squeezing::{decay_experiment, geometric_deltas, Mode, SqueezeConfig};
use squeeze_kit::{DomainSpec, ModelParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let dom = DomainSpec::model(ModelParams::new(k))?;
    let deltas = geometric_deltas(1e-2, 1e-6, 5)?;
    for mode in [Mode::ClosedForm, Mode::Numeric] {
        let cfg = SqueezeConfig { mode, ..SqueezeConfig::default() };
        let table = decay_experiment(&dom, &deltas, &cfg)?;
        println!("mode {mode:?}");
        print!("{}", table.to_csv());
        let theory = table.theoretical_exponent.map(|r| r.to_string()).unwrap_or_else(|| "-".into());
        match table.slope {
            Some(s) => println!("slope {s:.6} (theory {theory}), verdict {:?}\n", table.verdict),
            None => println!("no slope, verdict {:?}\n", table.verdict),
        }
    }
    Ok(())
}
