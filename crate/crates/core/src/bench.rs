//! Timing and analysis harness: execution-speed measurement of the
//! simulator and a seeded report covering the U3 probability curve, Grover
//! under readout noise, probabilistic-RNG bias, error-buffer win rates and a
//! classical-vs-quantum mini-game comparison.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{
    jewel_round_classical, jewel_round_quantum, DeviceMode, GameConfig, InversionMode, JewelRound, RoundOutcome,
    Variant, CLASSICAL_JEWELS, QUANTUM_JEWELS,
};
use crate::grover::{grover_state, noise_sweep, theoretical_success_prob, GroverConfig, SweepRow};
use crate::qrng::bias_report;
use crate::qsim::{GateOp, NoiseModel, StateVector};
use crate::seed::{derive_seed, rng_from_seed};

const PROGRAM_SHOTS: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingReport {
    pub runs: u64,
    pub min_s: f64,
    pub mean_s: f64,
    pub median_s: f64,
    pub max_s: f64,
}

impl TimingReport {
    fn from_samples(mut samples: Vec<f64>) -> Self {
        samples.sort_by(f64::total_cmp);
        let runs = samples.len();
        let median_s = if runs % 2 == 1 {
            samples[runs / 2]
        } else {
            (samples[runs / 2 - 1] + samples[runs / 2]) / 2.0
        };
        Self {
            runs: runs as u64,
            min_s: samples[0],
            mean_s: samples.iter().sum::<f64>() / runs as f64,
            median_s,
            max_s: samples[runs - 1],
        }
    }
}

fn time_runs<F>(runs: u64, mut program: F) -> Result<TimingReport>
where
    F: FnMut(u64) -> Result<()>,
{
    if runs == 0 {
        return Err(crate::error::invalid("runs must be at least 1"));
    }
    let mut samples = Vec::with_capacity(runs as usize);
    for i in 0..runs {
        let start = Instant::now();
        program(i)?;
        samples.push(start.elapsed().as_secs_f64());
    }
    Ok(TimingReport::from_samples(samples))
}

/// Times `runs` single-qubit programs: U3(π/2) and 1024 measured shots.
pub fn time_simulator(runs: u64) -> Result<TimingReport> {
    time_runs(runs, |i| {
        let state = StateVector::new(1)?.with(GateOp::u3(0, std::f64::consts::FRAC_PI_2, 0.0, 0.0))?;
        std::hint::black_box(state.measure(PROGRAM_SHOTS, &NoiseModel::ideal(), i)?);
        Ok(())
    })
}

/// Times `runs` 4-qubit one-iteration Grover programs at 1024 shots.
pub fn time_grover(runs: u64) -> Result<TimingReport> {
    let cfg = GroverConfig::new(11)?.with_shots(PROGRAM_SHOTS);
    time_runs(runs, |i| {
        std::hint::black_box(grover_state(&cfg)?.measure(cfg.shots, &NoiseModel::ideal(), i)?);
        Ok(())
    })
}

/// Published execution-speed figures, carried for comparison only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceTiming {
    pub platform: &'static str,
    pub runs: u64,
    pub min_s: f64,
    pub mean_s: f64,
    pub max_s: f64,
    pub source: &'static str,
}

pub const REFERENCE_TIMINGS: [ReferenceTiming; 4] = [
    ReferenceTiming {
        platform: "simulator",
        runs: 175,
        min_s: 0.06,
        mean_s: 0.13,
        max_s: 0.25,
        source: REPORTED,
    },
    ReferenceTiming {
        platform: "ibmqx4",
        runs: 94,
        min_s: 53.81,
        mean_s: 58.22,
        max_s: 90.23,
        source: REPORTED,
    },
    ReferenceTiming {
        platform: "ibmq_16_melbourne",
        runs: 33,
        min_s: 59.87,
        mean_s: 141.43,
        max_s: 627.30,
        source: REPORTED,
    },
    ReferenceTiming {
        platform: "IBMQ",
        runs: 127,
        min_s: 53.81,
        mean_s: 79.84,
        max_s: 627.30,
        source: REPORTED,
    },
];

const REPORTED: &str = "published, not measured";

/// P(X ≥ k) for X ~ Binomial(n, p), summed in log space.
pub fn binomial_tail(n: u64, p: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |acc, i| {
            *acc += (i as f64).ln();
            Some(*acc)
        }))
        .collect();
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    (k..=n)
        .map(|i| {
            let ln_pmf = ln_fact[n as usize] - ln_fact[i as usize] - ln_fact[(n - i) as usize]
                + i as f64 * lp
                + (n - i) as f64 * lq;
            ln_pmf.exp()
        })
        .sum::<f64>()
        .min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportOptions {
    pub u3_shots: u64,
    pub grover_trials: u64,
    pub bias_trials: u64,
    pub buffer_trials: u64,
    pub minigame_games: u64,
    pub timing_runs: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            u3_shots: 100_000,
            grover_trials: 1000,
            bias_trials: 10_000,
            buffer_trials: 10_000,
            minigame_games: 2000,
            timing_runs: 175,
        }
    }
}

impl ReportOptions {
    /// Small sizes for smoke tests.
    pub fn quick() -> Self {
        Self {
            u3_shots: 100_000,
            grover_trials: 200,
            bias_trials: 1000,
            buffer_trials: 500,
            minigame_games: 200,
            timing_runs: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct U3Row {
    pub inversion: InversionMode,
    pub frac: f64,
    pub theta: f64,
    pub analytic: f64,
    pub empirical: f64,
    pub shots: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasRow {
    pub value: u64,
    pub bits: String,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBufferRow {
    pub label: &'static str,
    pub flip_prob: f64,
    pub goal: u64,
    pub shots: u64,
    pub analytic_win_prob: f64,
    pub empirical_win_rate: f64,
    pub mean_ones: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinigameRow {
    pub label: &'static str,
    pub games: u64,
    pub mean_rounds: f64,
    pub max_rounds: u32,
    pub computer_win_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroverSection {
    pub secret: usize,
    pub shots: u64,
    pub theoretical_single_shot: f64,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasSection {
    pub q: usize,
    pub shots: u64,
    pub trials: u64,
    pub rows: Vec<BiasRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingSection {
    pub simulator: TimingReport,
    pub grover: TimingReport,
    pub reference: Vec<ReferenceTiming>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullReport {
    pub seed: u64,
    pub options: ReportOptions,
    pub u3_curve: Vec<U3Row>,
    pub grover_noise: GroverSection,
    pub qrng_bias: BiasSection,
    pub error_buffer: Vec<ErrorBufferRow>,
    pub minigame: Vec<MinigameRow>,
    /// Wall-clock measurements; the only non-deterministic section.
    pub timing: TimingSection,
}

pub const U3_FRACS: [f64; 7] = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0];
pub const GROVER_FLIP_PROBS: [f64; 5] = [0.0, 0.1, 0.25, 0.3, 0.5];

fn u3_curve(shots: u64, seed: u64) -> Result<Vec<U3Row>> {
    let mut rows = Vec::new();
    for (m, mode) in [InversionMode::RawTheta, InversionMode::LinearProbability]
        .into_iter()
        .enumerate()
    {
        for (i, &frac) in U3_FRACS.iter().enumerate() {
            let theta = mode.theta(frac);
            let state = StateVector::new(1)?.with(GateOp::u3(0, theta, 0.0, 0.0))?;
            let counts = state.measure(shots, &NoiseModel::ideal(), derive_seed(seed, (m * 100 + i) as u64))?;
            rows.push(U3Row {
                inversion: mode,
                frac,
                theta,
                analytic: state.probability(1)?,
                empirical: counts.get(1) as f64 / shots as f64,
                shots,
            });
        }
    }
    Ok(rows)
}

fn error_buffer_rows(trials: u64, seed: u64) -> Result<Vec<ErrorBufferRow>> {
    let cases: [(&'static str, f64, u64); 4] = [
        ("simulator", 0.0, 1024),
        ("hardware_buffered", NoiseModel::HARDWARE_FLIP_PROB, 949),
        ("hardware_unbuffered", NoiseModel::HARDWARE_FLIP_PROB, 1024),
        ("observed_rate_buffered", 54.0 / 1024.0, 949),
    ];
    let excited = StateVector::new(1)?.with(GateOp::X { target: 0 })?;
    cases
        .iter()
        .enumerate()
        .map(|(c, &(label, p, goal))| {
            let noise = NoiseModel::new(p)?;
            let mut wins = 0u64;
            let mut ones = 0u64;
            for t in 0..trials {
                let n1 = excited
                    .measure(BASE, &noise, derive_seed(derive_seed(seed, c as u64), t))?
                    .get(1);
                ones += n1;
                wins += u64::from(n1 >= goal);
            }
            Ok(ErrorBufferRow {
                label,
                flip_prob: p,
                goal,
                shots: BASE,
                analytic_win_prob: binomial_tail(BASE, 1.0 - p, goal),
                empirical_win_rate: wins as f64 / trials as f64,
                mean_ones: ones as f64 / trials as f64,
                trials,
            })
        })
        .collect()
}

const BASE: u64 = 1024;
const QUANTUM_ROUND_CAP: u32 = 64;

/// Plays `games` jewel mini-games against a player who guesses uniformly at
/// random among all choices.
fn minigame_rows(games: u64, seed: u64) -> Result<Vec<MinigameRow>> {
    let mut rows = Vec::new();

    let mut total_rounds = 0u64;
    let mut max_rounds = 0u32;
    let mut computer_wins = 0u64;
    for g in 0..games {
        let game_seed = derive_seed(derive_seed(seed, 0), g);
        let mut rng = rng_from_seed(game_seed);
        let mut round = JewelRound::classical(rng.random_range(0..CLASSICAL_JEWELS.len()))?;
        let mut n = 0u32;
        while !round.outcome.is_terminal() {
            let guess = rng.random_range(0..CLASSICAL_JEWELS.len());
            round = jewel_round_classical(&round, guess, derive_seed(game_seed, n as u64))?;
            n += 1;
        }
        total_rounds += n as u64;
        max_rounds = max_rounds.max(n);
        computer_wins += u64::from(round.outcome == RoundOutcome::ComputerWon);
    }
    rows.push(MinigameRow {
        label: "classical",
        games,
        mean_rounds: total_rounds as f64 / games as f64,
        max_rounds,
        computer_win_rate: computer_wins as f64 / games as f64,
    });

    for (stream, label, mode) in [
        (1u64, "quantum_simulator", DeviceMode::Simulator),
        (2u64, "quantum_hardware", DeviceMode::HardwareEmulation),
    ] {
        let noise = GameConfig::new(mode, Variant::Quantum).noise();
        let mut total_rounds = 0u64;
        let mut max_rounds = 0u32;
        let mut computer_wins = 0u64;
        for g in 0..games {
            let game_seed = derive_seed(derive_seed(seed, stream), g);
            let mut rng = rng_from_seed(game_seed);
            let mut round = JewelRound::quantum(rng.random_range(0..16))?;
            let mut n = 0u32;
            while !round.outcome.is_terminal() && n < QUANTUM_ROUND_CAP {
                let guess = QUANTUM_JEWELS[rng.random_range(0..QUANTUM_JEWELS.len())];
                round = jewel_round_quantum(&round, guess, &noise, derive_seed(game_seed, n as u64))?;
                n += 1;
            }
            total_rounds += n as u64;
            max_rounds = max_rounds.max(n);
            computer_wins += u64::from(round.outcome == RoundOutcome::ComputerWon);
        }
        rows.push(MinigameRow {
            label,
            games,
            mean_rounds: total_rounds as f64 / games as f64,
            max_rounds,
            computer_win_rate: computer_wins as f64 / games as f64,
        });
    }
    Ok(rows)
}

pub fn run_full_report(seed: u64) -> Result<FullReport> {
    run_report(seed, ReportOptions::default())
}

/// Builds every section. Sections are computed in parallel but each draws
/// only from its own derived seed, so the result is independent of
/// scheduling.
pub fn run_report(seed: u64, options: ReportOptions) -> Result<FullReport> {
    let grover_cfg = GroverConfig::new(11)?;
    let ((u3, grover), (bias, (buffer, minigame))) = rayon::join(
        || {
            rayon::join(
                || u3_curve(options.u3_shots, derive_seed(seed, 10)),
                || {
                    noise_sweep(
                        &grover_cfg,
                        &GROVER_FLIP_PROBS,
                        options.grover_trials,
                        derive_seed(seed, 11),
                    )
                },
            )
        },
        || {
            rayon::join(
                || bias_report(2, 100, options.bias_trials, derive_seed(seed, 12)),
                || {
                    rayon::join(
                        || error_buffer_rows(options.buffer_trials, derive_seed(seed, 13)),
                        || minigame_rows(options.minigame_games, derive_seed(seed, 14)),
                    )
                },
            )
        },
    );
    let bias = bias?;
    let bias_rows = (0..16u64)
        .map(|v| BiasRow {
            value: v,
            bits: format!("{v:04b}"),
            frequency: bias.frequency(v),
        })
        .collect();

    Ok(FullReport {
        seed,
        options,
        u3_curve: u3?,
        grover_noise: GroverSection {
            secret: grover_cfg.secret,
            shots: grover_cfg.shots,
            theoretical_single_shot: theoretical_success_prob(grover_cfg.n_states(), grover_cfg.iterations)?,
            rows: grover?,
        },
        qrng_bias: BiasSection {
            q: 2,
            shots: 100,
            trials: options.bias_trials,
            rows: bias_rows,
        },
        error_buffer: buffer?,
        minigame: minigame?,
        timing: TimingSection {
            simulator: time_simulator(options.timing_runs)?,
            grover: time_grover(options.timing_runs)?,
            reference: REFERENCE_TIMINGS.to_vec(),
        },
    })
}

/// CSV columns: `section,label,x,analytic,empirical,n`. Empty cells mean
/// "not applicable".
pub fn to_csv(report: &FullReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serialize(e.to_string());
    w.write_record(["section", "label", "x", "analytic", "empirical", "n"])
        .map_err(ser)?;
    let mut row = |cells: [String; 6]| w.write_record(&cells).map_err(ser);
    let s = |v: &dyn ToString| v.to_string();

    for r in &report.u3_curve {
        let label = match r.inversion {
            InversionMode::RawTheta => "raw_theta",
            InversionMode::LinearProbability => "linear_probability",
        };
        row([
            s(&"u3_curve"),
            s(&label),
            s(&r.frac),
            s(&r.analytic),
            s(&r.empirical),
            s(&r.shots),
        ])?;
    }
    let g = &report.grover_noise;
    for r in &g.rows {
        let analytic = if r.flip_prob == 0.0 {
            s(&g.theoretical_single_shot)
        } else {
            String::new()
        };
        row([
            s(&"grover_noise"),
            format!("secret_{}", g.secret),
            s(&r.flip_prob),
            analytic,
            s(&r.success_rate),
            s(&r.trials),
        ])?;
    }
    let b = &report.qrng_bias;
    for r in &b.rows {
        row([
            s(&"qrng_bias"),
            format!("q{}_shots{}", b.q, b.shots),
            r.bits.clone(),
            String::new(),
            s(&r.frequency),
            s(&b.trials),
        ])?;
    }
    for r in &report.error_buffer {
        row([
            s(&"error_buffer"),
            format!("{}_goal{}", r.label, r.goal),
            s(&r.flip_prob),
            s(&r.analytic_win_prob),
            s(&r.empirical_win_rate),
            s(&r.trials),
        ])?;
    }
    for r in &report.minigame {
        row([
            s(&"minigame"),
            s(&r.label),
            s(&"mean_rounds"),
            String::new(),
            s(&r.mean_rounds),
            s(&r.games),
        ])?;
        row([
            s(&"minigame"),
            s(&r.label),
            s(&"computer_win_rate"),
            String::new(),
            s(&r.computer_win_rate),
            s(&r.games),
        ])?;
    }
    for r in &report.timing.reference {
        for (stat, v) in [("min_s", r.min_s), ("mean_s", r.mean_s), ("max_s", r.max_s)] {
            row([
                s(&"timing_reference"),
                format!("{}:{stat}", r.platform),
                String::new(),
                s(&v),
                String::new(),
                s(&r.runs),
            ])?;
        }
    }
    for (label, t) in [
        ("simulator_1q", &report.timing.simulator),
        ("grover_4q", &report.timing.grover),
    ] {
        for (stat, v) in [
            ("min_s", t.min_s),
            ("mean_s", t.mean_s),
            ("median_s", t.median_s),
            ("max_s", t.max_s),
        ] {
            row([
                s(&"timing"),
                format!("{label}:{stat}"),
                String::new(),
                String::new(),
                s(&v),
                s(&t.runs),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
}

/// Writes `report.json` and `report.csv` into `dir`, creating it if needed.
pub fn write_report(report: &FullReport, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let json_path = dir.join("report.json");
    let csv_path = dir.join("report.csv");
    let json = serde_json::to_string_pretty(report).map_err(|e| Error::Serialize(e.to_string()))?;
    fs::write(&json_path, json + "\n").map_err(io(&json_path))?;
    fs::write(&csv_path, to_csv(report)?).map_err(io(&csv_path))?;
    Ok((json_path, csv_path))
}
