//! Trigonometric polynomial synthesis with control of maximal partial sums.
//!
//! The crate builds analytic (one-sided spectrum) polynomials that approximate
//! prescribed functions in measure while keeping their maximal partial-sum
//! function small where it matters, and checks every construction with an
//! independent [`Certificate`].

pub mod certificate;
pub mod constructors;
pub mod decompose;
pub mod density;
mod error;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod sampling;
pub mod synth;
pub mod trigpoly;

pub use certificate::{Certificate, Clause};
pub use error::{Error, Result};
pub use sampling::{CircleArc, SampledFunction, StepFunction};
pub use trigpoly::{SpecialProduct, TrigPoly};
