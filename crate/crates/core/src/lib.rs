//! Exact-arithmetic toolkit for beta-expansions, rotational (Ostrowski)
//! numeration, adic transformations and arithmetic codings of hyperbolic
//! toral automorphisms.

pub mod adic;
pub mod beta_core;
pub mod beta_count;
pub mod beta_unique;
pub mod digits;
pub mod exactnum;
pub mod rotation;
pub mod toral;

pub use exactnum::{Approx, Field, FieldDescriptor, FieldElement, MinimalPolynomial};
