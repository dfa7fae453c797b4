//! Quantum random-number generation on top of the simulator.
//!
//! Three strategies are provided:
//!
//! * [`RngMethod::OneQubitPerBit`]: one single-qubit program per bit (H, one shot).
//! * [`RngMethod::MultiQubitSingleShot`]: H on every qubit, one shot; capped at
//!   [`MAX_QUBITS`] bits.
//! * [`RngMethod::ProbabilisticMeasurement`]: H on `q` qubits measured many
//!   times; outcome `k` contributes bit `k`, set when its count exceeds the
//!   average `shots / 2^q`. Produces `2^q` bits from `q` qubits, but the
//!   distribution is biased (the all-ones value is unreachable).

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::qsim::{GateOp, MeasurementCounts, NoiseModel, StateVector, MAX_QUBITS};
use crate::seed::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum RngMethod {
    OneQubitPerBit,
    MultiQubitSingleShot,
    ProbabilisticMeasurement { q: usize, shots: u64 },
}

impl RngMethod {
    pub fn probabilistic(q: usize, shots: u64) -> Result<Self> {
        check_probabilistic(q, shots)?;
        Ok(RngMethod::ProbabilisticMeasurement { q, shots })
    }
}

/// Bit-extraction rule for the probabilistic method. `Greater` is the one the
/// game uses; `GreaterOrEqual` exists to exercise the min/max duality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdRule {
    #[default]
    Greater,
    GreaterOrEqual,
}

/// Bits are least-significant first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RandomInteger {
    bits: Vec<u8>,
    #[serde(serialize_with = "serialize_display")]
    value: BigUint,
}

impl RandomInteger {
    pub fn from_bits(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        let mut value = BigUint::default();
        for (i, &b) in bits.iter().enumerate() {
            if b == 1 {
                value.set_bit(i as u64, true);
            }
        }
        Self { bits, value }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// The value as `u64`, if it fits.
    pub fn to_u64(&self) -> Option<u64> {
        let digits = self.value.to_u64_digits();
        match digits.len() {
            0 => Some(0),
            1 => Some(digits[0]),
            _ => None,
        }
    }
}

fn serialize_display<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// One probabilistic-method draw together with the histogram it came from.
#[derive(Debug, Clone, Serialize)]
pub struct ProbabilisticDraw {
    pub integer: RandomInteger,
    pub counts: MeasurementCounts,
    pub average: f64,
}

fn check_probabilistic(q: usize, shots: u64) -> Result<()> {
    if !(1..=MAX_QUBITS).contains(&q) {
        return Err(invalid(format!("q = {q} outside 1..={MAX_QUBITS}")));
    }
    if shots < (1u64 << q) {
        return Err(invalid(format!(
            "shots = {shots} below 2^q = {}; average count would be under 1",
            1u64 << q
        )));
    }
    Ok(())
}

fn one_qubit_bits<R: Rng + ?Sized>(n_bits: usize, noise: &NoiseModel, rng: &mut R) -> Result<Vec<u8>> {
    let program = StateVector::new(1)?.with(GateOp::H { target: 0 })?;
    (0..n_bits)
        .map(|_| {
            let counts = program.measure_with_rng(1, noise, rng)?;
            Ok(u8::from(counts.get(1) == 1))
        })
        .collect()
}

fn multi_qubit_bits<R: Rng + ?Sized>(n_bits: usize, noise: &NoiseModel, rng: &mut R) -> Result<Vec<u8>> {
    if !(1..=MAX_QUBITS).contains(&n_bits) {
        return Err(invalid(format!(
            "{n_bits} bits needs {n_bits} qubits; limit is {MAX_QUBITS}"
        )));
    }
    let counts = StateVector::uniform(n_bits)?.measure_with_rng(1, noise, rng)?;
    let outcome = counts.argmax().expect("one shot");
    Ok((0..n_bits).map(|i| ((outcome >> i) & 1) as u8).collect())
}

fn probabilistic_with_rng<R: Rng + ?Sized>(
    q: usize,
    shots: u64,
    noise: &NoiseModel,
    rule: ThresholdRule,
    rng: &mut R,
) -> Result<ProbabilisticDraw> {
    check_probabilistic(q, shots)?;
    let counts = StateVector::uniform(q)?.measure_with_rng(shots, noise, rng)?;
    let integer = bits_from_counts(&counts, rule);
    Ok(ProbabilisticDraw {
        integer,
        average: counts.shots() as f64 / (1u64 << q) as f64,
        counts,
    })
}

/// Applies the average-probability rule to a histogram over `q` qubits.
/// Outcome with binary value `k` supplies bit `k`.
pub fn bits_from_counts(counts: &MeasurementCounts, rule: ThresholdRule) -> RandomInteger {
    let outcomes = 1usize << counts.n_qubits();
    let average = counts.shots() as f64 / outcomes as f64;
    let bits = (0..outcomes)
        .map(|k| {
            let c = counts.get(k) as f64;
            let set = match rule {
                ThresholdRule::Greater => c > average,
                ThresholdRule::GreaterOrEqual => c >= average,
            };
            u8::from(set)
        })
        .collect();
    RandomInteger::from_bits(bits)
}

pub fn random_bits_one_qubit(n_bits: usize, noise: &NoiseModel, seed: u64) -> Result<RandomInteger> {
    if n_bits == 0 {
        return Err(invalid("n_bits must be at least 1"));
    }
    let bits = one_qubit_bits(n_bits, noise, &mut rng_from_seed(seed))?;
    Ok(RandomInteger::from_bits(bits))
}

pub fn random_bits_multi_qubit(n_bits: usize, noise: &NoiseModel, seed: u64) -> Result<RandomInteger> {
    let bits = multi_qubit_bits(n_bits, noise, &mut rng_from_seed(seed))?;
    Ok(RandomInteger::from_bits(bits))
}

pub fn random_int_probabilistic(q: usize, shots: u64, noise: &NoiseModel, seed: u64) -> Result<RandomInteger> {
    Ok(probabilistic_draw(q, shots, noise, ThresholdRule::Greater, seed)?.integer)
}

pub fn probabilistic_draw(
    q: usize,
    shots: u64,
    noise: &NoiseModel,
    rule: ThresholdRule,
    seed: u64,
) -> Result<ProbabilisticDraw> {
    probabilistic_with_rng(q, shots, noise, rule, &mut rng_from_seed(seed))
}

/// Draws with `method`, returning the bits in `RandomInteger` form.
pub fn generate(method: RngMethod, n_bits: usize, noise: &NoiseModel, seed: u64) -> Result<RandomInteger> {
    match method {
        RngMethod::OneQubitPerBit => random_bits_one_qubit(n_bits, noise, seed),
        RngMethod::MultiQubitSingleShot => random_bits_multi_qubit(n_bits, noise, seed),
        RngMethod::ProbabilisticMeasurement { q, shots } => random_int_probabilistic(q, shots, noise, seed),
    }
}

const MAX_REJECTIONS: usize = 10_000;

/// Integer in `[lo, hi]`. The unbiased methods rejection-sample over the
/// smallest covering bit width; the probabilistic method reduces modulo the
/// range size.
pub fn random_in_range(lo: i64, hi: i64, method: RngMethod, noise: &NoiseModel, seed: u64) -> Result<i64> {
    random_in_range_with_rng(lo, hi, method, noise, &mut rng_from_seed(seed))
}

pub(crate) fn random_in_range_with_rng<R: Rng + ?Sized>(
    lo: i64,
    hi: i64,
    method: RngMethod,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<i64> {
    if lo > hi {
        return Err(invalid(format!("empty range [{lo}, {hi}]")));
    }
    let size = (hi as i128 - lo as i128 + 1) as u128;
    if size == 1 {
        return Ok(lo);
    }
    let width = (128 - (size - 1).leading_zeros()) as usize;
    let offset = |v: u128| (lo as i128 + v as i128) as i64;

    if let RngMethod::ProbabilisticMeasurement { q, shots } = method {
        let draw = probabilistic_with_rng(q, shots, noise, ThresholdRule::Greater, rng)?;
        let reduced = draw.integer.value() % BigUint::from(size);
        let v = reduced
            .to_u64_digits()
            .iter()
            .rev()
            .fold(0u128, |acc, &d| (acc << 64) | d as u128);
        return Ok(offset(v));
    }

    for _ in 0..MAX_REJECTIONS {
        let bits = match method {
            RngMethod::OneQubitPerBit => one_qubit_bits(width, noise, rng)?,
            RngMethod::MultiQubitSingleShot => multi_qubit_bits(width, noise, rng)?,
            RngMethod::ProbabilisticMeasurement { .. } => unreachable!(),
        };
        let v = bits
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, &b)| acc | ((b as u128) << i));
        if v < size {
            return Ok(offset(v));
        }
    }
    Err(Error::InvalidState(format!(
        "rejection sampling for [{lo}, {hi}] did not converge"
    )))
}

/// Exactly sixteen first/last name fragments, indexed from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameFragments(Vec<String>);

impl NameFragments {
    pub const LEN: usize = 16;

    pub fn new(fragments: Vec<String>) -> Result<Self> {
        if fragments.len() != Self::LEN {
            return Err(invalid(format!(
                "expected {} name fragments, got {}",
                Self::LEN,
                fragments.len()
            )));
        }
        Ok(Self(fragments))
    }

    /// 1-based lookup.
    pub fn get(&self, index: usize) -> Option<&str> {
        index.checked_sub(1).and_then(|i| self.0.get(i)).map(String::as_str)
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }
}

impl Default for NameFragments {
    fn default() -> Self {
        let names = [
            "Pixel", "Twilight", "Stardust", "Moonbeam", "Sparkle", "Rainbow", "Velvet", "Comet", "Blossom", "Thunder",
            "Crystal", "Whisper", "Nova", "Glimmer", "Sapphire", "Aurora",
        ];
        Self(names.iter().map(|s| s.to_string()).collect())
    }
}

pub fn generate_player_name(fragments: &NameFragments, noise: &NoiseModel, seed: u64) -> String {
    generate_player_name_with(fragments, RngMethod::OneQubitPerBit, noise, seed)
        .expect("1..=16 draw with the one-qubit method cannot fail")
}

/// "First Last" from two independent 1..=16 draws.
pub fn generate_player_name_with(
    fragments: &NameFragments,
    method: RngMethod,
    noise: &NoiseModel,
    seed: u64,
) -> Result<String> {
    let (first, last) = name_indices(method, noise, seed)?;
    Ok(format!(
        "{} {}",
        fragments.get(first).expect("index in 1..=16"),
        fragments.get(last).expect("index in 1..=16")
    ))
}

/// The two 1-based fragment indices a name draw would use.
pub fn name_indices(method: RngMethod, noise: &NoiseModel, seed: u64) -> Result<(usize, usize)> {
    let first = random_in_range(1, 16, method, noise, derive_seed(seed, 0))?;
    let last = random_in_range(1, 16, method, noise, derive_seed(seed, 1))?;
    Ok((first as usize, last as usize))
}

/// Empirical value distribution of the probabilistic method.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasReport {
    pub q: usize,
    pub shots: u64,
    pub trials: u64,
    pub counts: BTreeMap<BigUint, u64>,
}

impl BiasReport {
    pub fn frequency(&self, value: u64) -> f64 {
        self.counts.get(&BigUint::from(value)).copied().unwrap_or(0) as f64 / self.trials as f64
    }

    pub fn frequencies(&self) -> impl Iterator<Item = (&BigUint, f64)> + '_ {
        self.counts.iter().map(|(v, &c)| (v, c as f64 / self.trials as f64))
    }
}

pub fn bias_report(q: usize, shots: u64, trials: u64, seed: u64) -> Result<BiasReport> {
    bias_report_with_rule(q, shots, trials, ThresholdRule::Greater, seed)
}

/// Runs `trials` noiseless probabilistic draws, trial `t` seeded with
/// `derive_seed(seed, t)`.
pub fn bias_report_with_rule(q: usize, shots: u64, trials: u64, rule: ThresholdRule, seed: u64) -> Result<BiasReport> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    check_probabilistic(q, shots)?;
    let noise = NoiseModel::ideal();
    let values: Vec<BigUint> = (0..trials)
        .into_par_iter()
        .map(|t| probabilistic_draw(q, shots, &noise, rule, derive_seed(seed, t)).map(|d| d.integer.value))
        .collect::<Result<_>>()?;
    let mut counts = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_insert(0) += 1;
    }
    Ok(BiasReport {
        q,
        shots,
        trials,
        counts,
    })
}
