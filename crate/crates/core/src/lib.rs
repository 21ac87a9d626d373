//! Exact-arithmetic computer algebra for regular (a,b)-modules.
//!
//! An (a,b)-module is a free finite-rank `C[[b]]`-module with a continuous
//! operator `a` satisfying `a·b − b·a = b²`. This crate implements, over the
//! exactly representable part of the coefficient field (the rationals, plus
//! one formal symbol for monodromy bookkeeping):
//!
//! * truncated formal power series in `b` and the first-order solver that
//!   underlies every construction ([`series`]);
//! * the operator algebra in left normal form, with normalized products,
//!   euclidean division and standard words ([`op`]);
//! * the modules `Ξ_λ` of formal multivalued expansions, generation of
//!   submodules with rank and filtration extraction, the shift solver and
//!   the monodromy operator ([`xi`]);
//! * theme presentations: standard and canonical forms, fundamental
//!   invariants, Bernstein elements, quotients, twisted duality ([`theme`]);
//! * Hom/End/Ext computations and invariance and isomorphism decision
//!   procedures with witnesses and obstruction certificates ([`hom`]);
//! * parametric families, rank stratification and invariance-locus sweeps
//!   ([`families`]).

pub mod error;
pub mod families;
pub mod hom;
pub mod linalg;
pub mod op;
pub mod scalar;
pub mod series;
pub mod theme;
pub mod xi;

pub use error::{Error, Result};
pub use scalar::{Rat, Scalar};
pub use series::BSeries;
