//! Squeezing-function upper bounds.
//!
//! If `λζ1` and `λζ2` lie in the Kobayashi indicatrix at `p` but
//! `ελ(ζ1 + ζ2)` does not, then no linear map `L` has
//! `B(3ε) ⊆ L(indicatrix) ⊆ B(1)`, and `s_Ω(p) ≤ 3ε`.

mod experiment;
mod exponent;
mod linear_map;
mod obstruction;
mod pipeline;

pub use experiment::{
    decay_experiment, family_exponent, geometric_deltas, least_squares_slope, ExperimentTable, ExperimentVerdict,
    CSV_HEADER,
};
pub use exponent::{exponent_composition, ExponentVariant};
pub use linear_map::{no_linear_map_check, random_directions, StarShapedSet};
pub use obstruction::{obstruction_epsilon, DEFAULT_MARGIN};
pub use pipeline::{basepoint, is_certified_family, squeezing_upper, Mode, SqueezeConfig, SqueezingBound, NO_CERTIFICATE};
