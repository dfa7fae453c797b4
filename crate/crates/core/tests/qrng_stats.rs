//! Statistical and combinatorial properties of the random-number methods.

use num_bigint::BigUint;
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use unicorn_core::qrng::{
    bias_report, bias_report_with_rule, bits_from_counts, generate_player_name, name_indices, random_bits_multi_qubit,
    random_bits_one_qubit, NameFragments, RngMethod, ThresholdRule,
};
use unicorn_core::qsim::{to_bitstring, MeasurementCounts, NoiseModel};

fn chi2_critical(df: usize) -> f64 {
    ChiSquared::new(df as f64).unwrap().inverse_cdf(0.999)
}

fn chi2_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum()
}

#[test]
fn unbiased_methods_pass_chi_squared() {
    let noise = NoiseModel::ideal();
    for n_bits in 1..=4usize {
        let bins = 1usize << n_bits;
        let mut one = vec![0u64; bins];
        let mut multi = vec![0u64; bins];
        for s in 0..10_000u64 {
            one[random_bits_one_qubit(n_bits, &noise, s).unwrap().to_u64().unwrap() as usize] += 1;
            multi[random_bits_multi_qubit(n_bits, &noise, s).unwrap().to_u64().unwrap() as usize] += 1;
        }
        let crit = chi2_critical(bins - 1);
        assert!(chi2_uniform(&one) < crit, "one-qubit n={n_bits}");
        assert!(chi2_uniform(&multi) < crit, "multi-qubit n={n_bits}");
    }
}

#[test]
fn name_draws_are_independent() {
    let noise = NoiseModel::ideal();
    let mut table = [[0u64; 16]; 16];
    for s in 0..10_000u64 {
        let (i, j) = name_indices(RngMethod::OneQubitPerBit, &noise, s).unwrap();
        table[i - 1][j - 1] += 1;
    }
    let total = 10_000.0;
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let cols: Vec<f64> = (0..16)
        .map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64)
        .collect();
    let mut stat = 0.0;
    for i in 0..16 {
        for j in 0..16 {
            let e = rows[i] * cols[j] / total;
            stat += (table[i][j] as f64 - e).powi(2) / e;
        }
    }
    assert!(stat < chi2_critical(15 * 15), "{stat}");
}

#[test]
fn default_fragments_name() {
    let name = generate_player_name(&NameFragments::default(), &NoiseModel::ideal(), 5);
    let parts: Vec<&str> = name.split(' ').collect();
    assert_eq!(parts.len(), 2);
    let frags = NameFragments::default();
    assert!(parts.iter().all(|p| frags.as_slice().iter().any(|f| f == p)));
}

fn arb_counts() -> impl Strategy<Value = (usize, Vec<u64>)> {
    (1usize..=4)
        .prop_flat_map(|q| (Just(q), prop::collection::vec(0u64..300, 1 << q)))
        .prop_filter("shots ≥ 2^q", |(q, v)| v.iter().sum::<u64>() >= 1 << q)
}

fn counts_from(q: usize, v: &[u64]) -> MeasurementCounts {
    let keys: Vec<String> = (0..v.len()).map(|k| to_bitstring(k, q)).collect();
    MeasurementCounts::from_bitstrings(q, keys.iter().map(String::as_str).zip(v.iter().copied())).unwrap()
}

proptest! {
    #[test]
    fn strict_rule_never_all_ones((q, v) in arb_counts()) {
        let r = bits_from_counts(&counts_from(q, &v), ThresholdRule::Greater);
        prop_assert_eq!(r.bits().len(), 1 << q);
        prop_assert!(r.bits().contains(&0));
    }

    #[test]
    fn inclusive_rule_never_zero((q, v) in arb_counts()) {
        let r = bits_from_counts(&counts_from(q, &v), ThresholdRule::GreaterOrEqual);
        prop_assert!(r.bits().contains(&1));
    }
}

#[test]
fn all_ones_needs_more_than_shots() {
    // every count > shots/2^q means Σ counts > shots
    for q in 1..=6u32 {
        let outcomes = 1u64 << q;
        for shots in outcomes..outcomes * 40 {
            let min_each = shots / outcomes + 1;
            assert!(min_each * outcomes > shots);
        }
    }
}

#[test]
fn rule_duality_over_draws() {
    let strict = bias_report(2, 100, 10_000, 21).unwrap();
    assert_eq!(strict.frequency(15), 0.0);
    let inclusive = bias_report_with_rule(2, 100, 10_000, ThresholdRule::GreaterOrEqual, 21).unwrap();
    assert_eq!(inclusive.frequency(0), 0.0);
}

#[test]
fn single_bit_values_each_rarer_than_alternating() {
    // 0001, 0010, 0100, 1000 each less likely than 0101 or 1010
    let r = bias_report(2, 100, 10_000, 77).unwrap();
    let alternating = r.frequency(0b0101).min(r.frequency(0b1010));
    for v in [0b0001, 0b0010, 0b0100, 0b1000] {
        assert!(r.frequency(v) < alternating, "{v:04b}");
    }
    // 1110 and 0111 each less likely than 0011 or 1100
    let pairs = r.frequency(0b0011).min(r.frequency(0b1100));
    assert!(r.frequency(0b1110) < pairs && r.frequency(0b0111) < pairs);
}

#[test]
fn one_qubit_register_support() {
    let r = bias_report(1, 100, 10_000, 3).unwrap();
    for v in r.counts.keys() {
        assert!(*v <= BigUint::from(2u8));
    }
}
