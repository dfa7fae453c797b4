//! Grover search over `2^n` basis states with a single marked item.
//!
//! The oracle is a statevector-level phase flip on the secret index and the
//! diffusion step is the reflection `2|s⟩⟨s| − I`; both are exact here, so no
//! multi-controlled-Z decomposition is needed.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::qsim::{GateOp, MeasurementCounts, NoiseModel, StateVector};
use crate::seed::derive_seed;

pub const DEFAULT_QUBITS: usize = 4;
pub const DEFAULT_SHOTS: u64 = 100;
const MAX_GROVER_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GroverConfig {
    pub n_qubits: usize,
    pub secret: usize,
    pub iterations: u32,
    pub shots: u64,
}

impl GroverConfig {
    /// Four qubits, one iteration, 100 shots.
    pub fn new(secret: usize) -> Result<Self> {
        let cfg = Self {
            n_qubits: DEFAULT_QUBITS,
            secret,
            iterations: 1,
            shots: DEFAULT_SHOTS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_iterations(mut self, iterations: u32) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots = shots;
        self
    }

    pub fn n_states(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_GROVER_QUBITS).contains(&self.n_qubits) {
            return Err(invalid(format!(
                "grover register of {} qubits outside 1..={MAX_GROVER_QUBITS}",
                self.n_qubits
            )));
        }
        if self.secret >= self.n_states() {
            return Err(invalid(format!(
                "secret {} outside [0, {})",
                self.secret,
                self.n_states()
            )));
        }
        if self.shots == 0 {
            return Err(invalid("shots must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GroverResult {
    pub counts: MeasurementCounts,
    pub argmax: usize,
    pub success: bool,
}

/// The pre-measurement state after `cfg.iterations` oracle+diffusion rounds.
pub fn grover_state(cfg: &GroverConfig) -> Result<StateVector> {
    cfg.validate()?;
    let mut state = StateVector::uniform(cfg.n_qubits)?;
    for _ in 0..cfg.iterations {
        state.apply(&GateOp::PhaseFlip { index: cfg.secret })?;
        state.apply(&GateOp::Diffusion)?;
    }
    Ok(state)
}

/// Runs the search and takes the most frequent outcome as the guess.
pub fn grover_search(cfg: &GroverConfig, noise: &NoiseModel, seed: u64) -> Result<GroverResult> {
    let counts = grover_state(cfg)?.measure(cfg.shots, noise, seed)?;
    let argmax = counts.argmax().expect("shots ≥ 1");
    Ok(GroverResult {
        success: argmax == cfg.secret,
        counts,
        argmax,
    })
}

/// sin²((2k+1)·arcsin(1/√N)).
pub fn theoretical_success_prob(n_states: usize, iterations: u32) -> Result<f64> {
    if n_states < 2 {
        return Err(invalid("need at least two states"));
    }
    let theta = (1.0 / (n_states as f64).sqrt()).asin();
    Ok(((2 * iterations as u64 + 1) as f64 * theta).sin().powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub flip_prob: f64,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
}

/// Success rate of `grover_search` at each readout flip probability. Trial
/// `t` of row `r` uses seed `derive_seed(derive_seed(seed, r), t)`.
pub fn noise_sweep(cfg: &GroverConfig, flip_probs: &[f64], trials: u64, seed: u64) -> Result<Vec<SweepRow>> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    cfg.validate()?;
    let state = grover_state(cfg)?;
    flip_probs
        .iter()
        .enumerate()
        .map(|(row, &p)| {
            let noise = NoiseModel::new(p)?;
            let row_seed = derive_seed(seed, row as u64);
            let successes = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let counts = state.measure(cfg.shots, &noise, derive_seed(row_seed, t))?;
                    Ok(u64::from(counts.argmax() == Some(cfg.secret)))
                })
                .sum::<Result<u64>>()?;
            Ok(SweepRow {
                flip_prob: p,
                trials,
                successes,
                success_rate: successes as f64 / trials as f64,
            })
        })
        .collect()
}
