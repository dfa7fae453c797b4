use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::state::StateVector;
use crate::error::{invalid, Result};
use crate::seed::{rng_from_seed, SimRng};

/// Readout error: every measured bit is flipped independently with
/// probability `readout_flip_prob` after the ideal outcome is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    readout_flip_prob: f64,
}

impl NoiseModel {
    /// Flip probability used for hardware emulation.
    pub const HARDWARE_FLIP_PROB: f64 = 0.05;

    pub fn new(readout_flip_prob: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&readout_flip_prob) {
            return Err(invalid(format!(
                "readout flip probability {readout_flip_prob} outside [0, 1]"
            )));
        }
        Ok(Self { readout_flip_prob })
    }

    pub fn ideal() -> Self {
        Self { readout_flip_prob: 0.0 }
    }

    pub fn hardware() -> Self {
        Self {
            readout_flip_prob: Self::HARDWARE_FLIP_PROB,
        }
    }

    pub fn readout_flip_prob(&self) -> f64 {
        self.readout_flip_prob
    }

    pub fn is_ideal(&self) -> bool {
        self.readout_flip_prob == 0.0
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::ideal()
    }
}

/// Outcome histogram of a multi-shot run, keyed by basis index.
///
/// Bitstring keys put the highest-index qubit leftmost, so `"1011"` is
/// basis index 11.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementCounts {
    n_qubits: usize,
    shots: u64,
    counts: BTreeMap<usize, u64>,
}

impl MeasurementCounts {
    /// Builds counts from `(bitstring, count)` pairs; `shots` is their sum.
    pub fn from_bitstrings<'a, I>(n_qubits: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, u64)>,
    {
        let mut counts = BTreeMap::new();
        let mut shots = 0u64;
        for (key, count) in pairs {
            let index = parse_bitstring(key, n_qubits)?;
            if counts.insert(index, count).is_some() {
                return Err(invalid(format!("duplicate outcome {key}")));
            }
            shots += count;
        }
        counts.retain(|_, c| *c > 0);
        Ok(Self {
            n_qubits,
            shots,
            counts,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    /// Count for a basis index; unobserved outcomes are 0.
    pub fn get(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    pub fn get_bits(&self, bitstring: &str) -> Result<u64> {
        Ok(self.get(parse_bitstring(bitstring, self.n_qubits)?))
    }

    /// Observed outcomes in ascending basis order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&i, &c)| (i, c))
    }

    /// Number of distinct outcomes observed.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Most frequent outcome; ties go to the smallest basis index.
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<(usize, u64)> = None;
        for (i, c) in self.iter() {
            if best.is_none_or(|(_, bc)| c > bc) {
                best = Some((i, c));
            }
        }
        best.map(|(i, _)| i)
    }

    pub fn bitstring(&self, index: usize) -> String {
        to_bitstring(index, self.n_qubits)
    }
}

/// Python-dict rendering, e.g. `{'0': 944, '1': 56}`.
impl fmt::Display for MeasurementCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, (i, c)) in self.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "'{}': {}", self.bitstring(i), c)?;
        }
        f.write_str("}")
    }
}

/// Registers up to this size serialize every outcome, zeros included.
pub const DENSE_SERIALIZE_MAX_QUBITS: usize = 10;

/// Serializes as a bitstring → count map. Small registers list all `2^n`
/// outcomes so histograms have a fixed set of bars; larger ones list only
/// observed outcomes.
impl Serialize for MeasurementCounts {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.n_qubits <= DENSE_SERIALIZE_MAX_QUBITS {
            let dim = 1usize << self.n_qubits;
            let mut map = serializer.serialize_map(Some(dim))?;
            for i in 0..dim {
                map.serialize_entry(&self.bitstring(i), &self.get(i))?;
            }
            return map.end();
        }
        let mut map = serializer.serialize_map(Some(self.counts.len()))?;
        for (i, c) in self.iter() {
            map.serialize_entry(&self.bitstring(i), &c)?;
        }
        map.end()
    }
}

pub fn to_bitstring(index: usize, n_qubits: usize) -> String {
    format!("{index:0n_qubits$b}")
}

fn parse_bitstring(key: &str, n_qubits: usize) -> Result<usize> {
    if key.len() != n_qubits || !key.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(invalid(format!("outcome key {key:?} is not a {n_qubits}-bit string")));
    }
    usize::from_str_radix(key, 2).map_err(|e| invalid(e.to_string()))
}

impl StateVector {
    /// Samples `shots` outcomes with readout noise, seeded.
    pub fn measure(&self, shots: u64, noise: &NoiseModel, seed: u64) -> Result<MeasurementCounts> {
        self.measure_with_rng(shots, noise, &mut rng_from_seed(seed))
    }

    /// Inverse-CDF sampling over the cumulative |amplitude|² array, then an
    /// independent Bernoulli flip per bit.
    pub fn measure_with_rng<R: Rng + ?Sized>(
        &self,
        shots: u64,
        noise: &NoiseModel,
        rng: &mut R,
    ) -> Result<MeasurementCounts> {
        if shots == 0 {
            return Err(invalid("shots must be at least 1"));
        }
        let cumulative: Vec<f64> = self
            .amplitudes()
            .iter()
            .scan(0.0, |acc, a| {
                *acc += a.norm_sqr();
                Some(*acc)
            })
            .collect();
        let total = *cumulative.last().expect("non-empty state");
        let last = cumulative.len() - 1;
        let flip = noise.readout_flip_prob();
        let n_qubits = self.n_qubits();

        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            let u = rng.random::<f64>() * total;
            let mut outcome = cumulative.partition_point(|&c| c <= u).min(last);
            if flip > 0.0 {
                for bit in 0..n_qubits {
                    if rng.random_bool(flip) {
                        outcome ^= 1 << bit;
                    }
                }
            }
            *counts.entry(outcome).or_insert(0u64) += 1;
        }
        Ok(MeasurementCounts {
            n_qubits,
            shots,
            counts,
        })
    }
}

pub fn measure(state: &StateVector, shots: u64, noise: &NoiseModel, seed: u64) -> Result<MeasurementCounts> {
    state.measure(shots, noise, seed)
}

/// Convenience for callers that already own a simulation RNG.
pub fn measure_with(
    state: &StateVector,
    shots: u64,
    noise: &NoiseModel,
    rng: &mut SimRng,
) -> Result<MeasurementCounts> {
    state.measure_with_rng(shots, noise, rng)
}
