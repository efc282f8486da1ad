//! Kinematic geometric phase of open quantum systems.
//!
//! The crate evolves density matrices under Lindblad master equations, extracts
//! the kinematic geometric phase of the resulting path of mixed states, and
//! applies this to a spin-1 van der Pol limit-cycle oscillator whose
//! quantization axis is slowly rotated on a cone while an external signal
//! drives it. Closed-form reference results live in [`oracles`]; the
//! [`sweep`] module drives Arnold-tongue style parameter grids.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod evolver;
pub mod gp;
pub mod mzi;
pub mod oracles;
pub mod quadrature;
pub mod spinops;
pub mod sweep;
pub mod vdp;

pub use error::{Error, Result};
pub use evolver::{LindbladModel, StaticModel, Trajectory};
pub use gp::{GpOptions, GpResult};
pub use spinops::{ConeAxis, Operator, StateVector};
pub use vdp::VdpParams;

pub type C64 = num_complex::Complex64;
