// Negated float comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod compactification;
pub mod error;
pub mod hk_verifier;
pub mod jet_algebra;
pub mod model_geometry;
pub mod quadrature;
pub mod scattering;
pub mod special_fn;

pub use error::{Error, Result};
