//! Enhanced single particle model (ESPM) of a lithium-ion cell with SEI
//! growth, lithium plating and loss of active material, together with a
//! particle-swarm identification engine for its parameters.
//!
//! Sign convention: a positive current discharges the cell. Electrolyte
//! cells are indexed from the anode current collector to the cathode one.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aging;
pub mod cell;
pub mod config;
pub mod error;
pub mod identification;
pub mod ocp;
pub mod params;
pub mod state;
pub mod sweep;
pub mod transport;
pub mod tridiag;

#[cfg(test)]
pub(crate) mod testing;

pub use cell::{Cell, DtPolicy, Protocol, SimulationTrace, StepOutput, Termination};
pub use config::{load_parameters, save_parameters, Config, Mesh};
pub use error::{Electrode, Error, Result};
pub use ocp::{OcpCurve, OcpSet};
pub use params::CellParameters;
pub use state::{initial_state, CellState, InitialFilm};
