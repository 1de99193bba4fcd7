//! Disc-search upper bounds on a ball, compared with the exact metric.

use num_complex::Complex64;
use squeeze_kit::kobayashi::{ball_exact, kobayashi_upper, DiscSearchConfig};
use squeeze_kit::{CPoint, DomainSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = 1.0;
    let ball = DomainSpec::ball(r)?;
    let cfg = DiscSearchConfig::default();
    let c = |x: f64, y: f64| Complex64::new(x, y);
    let cases = [
        (vec![c(0.0, 0.0); 3], vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        (vec![c(0.3, 0.0), c(0.0, 0.0), c(0.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        (vec![c(0.3, 0.0), c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]),
    ];
    println!("{:>28} {:>12} {:>12} {:>10}", "basepoint", "exact", "upper", "ratio");
    for (p, zeta) in cases {
        let exact = ball_exact(r, &p, &zeta)?;
        let upper = kobayashi_upper(&ball, &CPoint(p.clone()), &zeta, &cfg)?;
        let label = format!("{:?}", p.iter().map(|z| z.re).collect::<Vec<_>>());
        println!("{label:>28} {exact:>12.6} {:>12.6} {:>10.6}", upper.value, upper.value / exact);
    }
    Ok(())
}
