//! Shift radix systems in dimension two: iteration, root bounds, closed-form
//! region rules and certified decisions for single parameters and for
//! rectangles of parameters.

pub mod certified;
pub mod dynamics;
pub mod error;
pub mod param;
pub mod regions;
pub mod scan;
pub mod spectral;

pub use dynamics::{CycleWitness, LatticePoint, OrbitOutcome, OrbitRecord};
pub use error::{Result, SrsError};
pub use param::{ParamVector, Rational};
pub use regions::{classify, Rule, Status, Verdict};
