//! A small statevector simulator: single-qubit gates, amplitude-level
//! phase flips and diffusion, and multi-shot measurement with readout noise.

mod measure;
mod state;

pub use measure::{measure, measure_with, to_bitstring, MeasurementCounts, NoiseModel, DENSE_SERIALIZE_MAX_QUBITS};
pub use state::{apply_gate, new_state, probability, u3_matrix, GateOp, StateVector, MAX_QUBITS};
