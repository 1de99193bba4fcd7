//! Read a domain from text, probe its geometry at the boundary point and
//! write it back out.

use num_complex::Complex64;
use squeeze_kit::domain_file::{parse_domain, to_text};

const SOURCE: &str = "\
# a positive-term domain
dim = 3
q = (0, 0, 0)
locality_radius = 0.5
rho = Re(t) + |z|^6 + |w|^6 + |z|^2*|w|^4
k = 3
family = herbort
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1);
    let text = match &path {
        Some(p) => std::fs::read_to_string(p)?,
        None => SOURCE.to_string(),
    };
    let dom = parse_domain(&text)?;
    let q = dom.q().coords().to_vec();
    println!("dimension {}, family {}, rho(q) = {}", dom.dimension(), dom.family().as_str(), dom.evaluate(&q)?);
    println!("gradient at q: {:?}", dom.wirtinger_gradient(&q)?);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::default();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for dir in [vec![one, zero, zero], vec![zero, one, zero], vec![one * s, one * s, zero]] {
        println!("order of contact along {:?}: {:?}", dir.iter().map(|c| c.re).collect::<Vec<_>>(), dom.order_of_contact_along(&dir)?);
    }
    let back = to_text(&dom);
    assert_eq!(to_text(&parse_domain(&back)?), back);
    print!("{back}");
    Ok(())
}
