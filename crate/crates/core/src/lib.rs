//! Localization of defects in a known inhomogeneous medium from acoustic
//! far-field data at a fixed frequency.
//!
//! For every sampling point `z` the indicator
//!
//! ```text
//! M(z)⁴ = inf { |<W ψ, ψ>|² : <ψ, conj(u0(·, z))> = 1 }
//! ```
//!
//! is approximated by constrained minimization, where `W` is built from the
//! far-field operators of the reference and perturbed media and `u0` is the
//! total field of the reference medium. The indicator stays away from zero
//! exactly on the defect.
//!
//! The crate also contains a Lippmann–Schwinger forward solver so that
//! synthetic far-field data can be produced from index maps.

pub mod cases;
pub mod criterion;
pub mod error;
pub mod farfield;
pub mod io;
pub mod pipeline;
pub mod sampling;
pub mod scattering;

pub use error::{Error, Result};
