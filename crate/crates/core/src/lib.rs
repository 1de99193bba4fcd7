//! Kobayashi-metric estimates and squeezing-function upper bounds for
//! finite-type boundary points of polynomial domains in `C^3`.
//!
//! The crate is organised bottom-up:
//!
//! * [`poly`] and [`domain`]: Hermitian polynomials, defining functions,
//!   Levi forms, built-in example domains; [`domain_file`] reads and writes
//!   the text format.
//! * [`jet`] and [`normal_form`]: truncated jets in `(z, conj z, u, v)` and
//!   the reduction of a defining function to normal form.
//! * [`kobayashi`]: analytic-disc upper bounds, lower-bound certificates and
//!   indicatrix radii.
//! * [`squeezing`]: the linear-map obstruction, squeezing bounds and the
//!   `δ` sweep.
//! * [`cli`] and [`report`]: the `squeeze` command line and its output files.

pub mod cli;
pub mod domain;
pub mod domain_file;
pub mod error;
pub mod jet;
pub mod kobayashi;
pub mod normal_form;
pub mod poly;
pub mod report;
pub mod squeezing;

pub use domain::{Builtin, CPoint, ContactOrder, DomainSpec, FamilyTag, LeviQuery, ModelParams};
pub use error::{DomainError, KobayashiError, NormalFormError, ParseError, SqueezeError};
pub use poly::{ComplexPoly, HermitianPolynomial, Monomial};
