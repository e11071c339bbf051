//! Scattering of plane waves at a one-dimensional well and at its microwave
//! analogue, a rectangular waveguide partially filled with a dielectric.
//!
//! The crate computes the transmission coefficient and its phase, the phase
//! time τ = dφ/dω (closed form for the waveguide, numerical derivative for
//! either model), maps the regions of negative phase time over
//! (well width, frequency), checks the stationary-phase prediction against a
//! spectrally synthesised wave packet, and turns measured S21 traces into
//! phase-time curves.
//!
//! Lattice and scan loops run on rayon when the `parallel` feature is
//! enabled (default); see [`Exec`].

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dispersion;
pub mod error;
pub mod exec;
pub mod measurement;
pub mod packet;
pub mod phasetime;
pub mod presets;
pub mod scattering;

pub use error::{Error, Result};
pub use exec::Exec;
