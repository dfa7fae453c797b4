//! Flying Unicorn: a quantum game engine on a from-scratch statevector
//! simulator.
//!
//! * [`qsim`]: statevector, gates, seeded measurement with readout noise
//! * [`qrng`]: three quantum random-number strategies and bias analysis
//! * [`grover`]: 4-qubit Grover search used by the computer opponent
//! * [`game`]: the altitude game, quantum and classical, plus the jewel mini-game
//! * [`bench`]: timing and analysis report

pub mod bench;
pub mod error;
pub mod game;
pub mod grover;
pub mod qrng;
pub mod qsim;
pub mod seed;

pub use error::{Error, Result};
