//! Quasi-exact spectrum of a neutral particle with an induced electric
//! dipole moment in crossed fields, seen from a rotating frame.
//!
//! The radial problem is a sextic ("doubly anharmonic") oscillator. Its
//! terminating biconfluent Heun solutions give closed-form quantized
//! frequencies, magnetic fields and energies ([`quantize`]); an independent
//! finite-difference solver ([`oracle`]) checks them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod heun;
pub mod model;
pub mod oracle;
pub mod poly;
pub mod quantize;
pub mod validation;

pub use error::{QesError, Result};
pub use exec::Execution;
pub use model::{MapConvention, PhysicalParams, PotentialCoeffs};
pub use quantize::{LevelSet, QuantizedLevel, Quantizer};
