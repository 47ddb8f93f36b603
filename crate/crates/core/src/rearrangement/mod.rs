//! Distribution functions, decreasing and maximal rearrangements, and
//! radial lifts.

mod grid;
mod profile;
mod radial;

pub use grid::GridFunction;
pub use profile::{RawProfile, StepProfile};
pub use radial::RadialLift;
