//! Reduce a defining function with pluriharmonic and mixed terms to normal
//! form and read back its type.

use squeeze_kit::domain::variable_names;
use squeeze_kit::domain_file::parse_domain;
use squeeze_kit::normal_form::{detect_model_type, normal_form_of_domain};
use squeeze_kit::HermitianPolynomial;

const SOURCE: &str = "\
dim = 3
q = (0, 0, 0)
locality_radius = 0.5
rho = Re(t) + Re(z^2) + Im(t)*Re(w^3) + |z|^2*|w|^2 + |z|^10 + |w|^10
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dom = parse_domain(SOURCE)?;
    let nf = normal_form_of_domain(&dom, None)?;
    println!("status {:?}, k = {}", nf.status, nf.k);
    let names = variable_names(nf.jet.z_block() + 1);
    let p = HermitianPolynomial::new(nf.p.clone())?;
    println!("P = {}", p.to_grammar(&names));
    println!("lowest degree of Q: {:?}, of R: {:?}", nf.q.min_degree(), nf.r.min_degree());
    println!("transforms:");
    for t in &nf.transform_log {
        println!("  {}", t.kind());
    }
    println!("model type 2k = {}", detect_model_type(&nf)?);
    Ok(())
}
