//! Second-quantized simulation of multi-particle linear-optical circuits with
//! internal and external degrees of freedom.
//!
//! States live in [`fock`], circuit elements in [`optics`], the prebuilt
//! experiments in [`circuits`], observables in [`analysis`] and the circuit
//! description language in [`cdl`].

pub mod analysis;
pub mod cdl;
pub mod circuits;
pub mod error;
pub mod fock;
pub mod optics;

pub use error::{Error, Result};
pub use fock::{Mode, ModeSpace, Monomial, StateVector, Statistics};
pub use optics::ModeTransform;
