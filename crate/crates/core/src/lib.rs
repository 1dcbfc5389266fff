//! Van der Waals liquid-vapor thermodynamics, fraction relaxation dynamics
//! and a 1D homogeneous relaxation finite-volume solver.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod euler1d;
pub mod mixture_eos;
mod numerics;
pub mod phase_diagram;
pub mod relax_dynamics;
pub mod thermo;

pub use error::{Error, Result};
pub use numerics::Pchip;
pub use thermo::{EosParams, Hessian2, TauE, ThermoEval};
