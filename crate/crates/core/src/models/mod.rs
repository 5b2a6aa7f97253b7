//! Benchmark machines and machine file formats.

mod kiss2;
mod native;
mod random;
mod register;

use thiserror::Error;

pub use kiss2::{
    circuit_to_moore, circuit_to_moore_with_initial, parse_kiss2, CircuitModel, KissError,
    KissTransition, INITIAL_OUTPUT_MARKER, MAX_INPUT_VECTORS,
};
pub use native::{parse_moore, write_moore, ParseError};
pub use random::{letters, random_machine};
pub use register::{
    make_register_component, make_register_machine, register_inputs, MAX_REGISTER_BITS,
};

use crate::automata::MachineError;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("resource limit: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Kiss(#[from] KissError),
    #[error(transparent)]
    Machine(#[from] MachineError),
}
