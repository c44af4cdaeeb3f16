//! Exact-arithmetic laboratory for affine polygon exchange maps.
//!
//! Everything here is computed over the rationals (or rational functions of
//! pi, or dyadic balls) so that every comparison in the geometry kernel is a
//! decision, not an estimate. The main pipeline: build a polygon exchange,
//! refine its cells under iteration to enumerate the coding language, push the
//! discontinuity set forward to count generalized diagonals, and certify that
//! a direction is generic enough for the quadratic complexity formulas to
//! apply.

pub mod ball;
pub mod cube;
pub mod error;
pub mod euler;
pub mod exchange;
pub mod geom;
pub mod pirat;
pub mod prism;
pub mod rat;
pub mod report;
pub mod square;

pub use error::{PexError, Result};
pub use rat::Rat;
