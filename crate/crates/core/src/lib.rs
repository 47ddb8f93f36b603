//! Numerical laboratory for generalized Wolff potentials, rearrangements and
//! rearrangement-invariant norms.

pub mod error;
pub mod geometry;
pub mod hardy;
pub mod io;
pub mod monotone;
pub mod nfunction;
pub mod norms;
pub mod potentials;
pub mod quadrature;
pub mod radial_pde;
pub mod rearrangement;
pub mod verifier;

pub use error::{Error, Result};
pub use monotone::MonotoneFn;
pub use nfunction::NFunction;
pub use potentials::{PotentialParams, Source};
pub use rearrangement::{GridFunction, RadialLift, StepProfile};
