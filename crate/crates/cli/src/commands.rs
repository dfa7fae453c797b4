use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde_json::json;
use unicorn_api::{ApiConfig, AppState, BusyPolicy};
use unicorn_core::bench::{run_report, write_report, ReportOptions, GROVER_FLIP_PROBS};
use unicorn_core::game::{DeviceMode, Game, GameConfig};
use unicorn_core::grover::{grover_search, noise_sweep, theoretical_success_prob, GroverConfig};
use unicorn_core::qrng::{self, bias_report_with_rule, generate_player_name_with, NameFragments, RngMethod};
use unicorn_core::qsim::NoiseModel;
use unicorn_core::seed::{derive_seed, entropy_seed};

use crate::args::{BenchArgs, BusyArg, Cli, Command, GroverArgs, MethodArg, PlayArgs, RngArgs, ServeArgs};
use crate::error::{CliError, Result};
use crate::play::play_loop;

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })
}

fn noise_for(mode: DeviceMode) -> NoiseModel {
    match mode {
        DeviceMode::Simulator => NoiseModel::ideal(),
        DeviceMode::HardwareEmulation => NoiseModel::hardware(),
    }
}

/// Runs a parsed command against the given streams.
pub fn run<R: BufRead, W: Write>(cli: Cli, input: &mut R, out: &mut W) -> Result<()> {
    let seed = cli.seed.unwrap_or_else(entropy_seed);
    let output = cli.output;
    match cli.command {
        Command::Play(a) => play(a, seed, output, input, out),
        Command::Rng(a) => rng(a, seed, output, out),
        Command::Grover(a) => grover(a, seed, output, out),
        Command::Bench(a) => bench(a, seed, output, out),
        Command::Serve(a) => serve(a, cli.seed, output, out),
    }
}

fn play<R: BufRead, W: Write>(
    a: PlayArgs,
    seed: u64,
    output: Option<PathBuf>,
    input: &mut R,
    out: &mut W,
) -> Result<()> {
    let mut cfg = GameConfig::new(a.mode.into(), a.variant.into()).with_inversion(a.inversion.into());
    if let Some(p) = a.encounter_prob {
        cfg = cfg.with_encounter_prob(p);
    }
    cfg.validate()?;
    writeln!(out, "Seed: {seed}")?;
    let mut game = Game::new(cfg, seed)?;
    let result = play_loop(&mut game, input, out);
    if let Some(path) = output {
        write_file(&path, &game.transcript_jsonl())?;
    }
    result
}

fn rng<W: Write>(a: RngArgs, seed: u64, output: Option<PathBuf>, out: &mut W) -> Result<()> {
    let noise = noise_for(a.mode.into());
    writeln!(out, "Seed: {seed}")?;
    let method = match a.method {
        MethodArg::OneQubit => RngMethod::OneQubitPerBit,
        MethodArg::MultiQubit => RngMethod::MultiQubitSingleShot,
        MethodArg::Probabilistic => RngMethod::probabilistic(a.q, a.shots)?,
    };

    let record = if a.name {
        let name = generate_player_name_with(&NameFragments::default(), method, &noise, seed)?;
        writeln!(out, "Name: {name}")?;
        json!({ "seed": seed, "method": method, "name": name })
    } else if a.trials > 1 {
        let RngMethod::ProbabilisticMeasurement { q, shots } = method else {
            let values: Vec<String> = (0..a.trials)
                .map(|t| qrng::generate(method, a.bits, &noise, derive_seed(seed, t)).map(|v| v.value().to_string()))
                .collect::<unicorn_core::Result<_>>()?;
            writeln!(out, "Values: {}", values.join(" "))?;
            return finish(output, json!({ "seed": seed, "method": method, "values": values }));
        };
        let report = bias_report_with_rule(q, shots, a.trials, a.rule.into(), seed)?;
        let width = 1usize << q;
        writeln!(out, "value  bits  frequency")?;
        for v in 0..(1u64 << width).min(1 << 16) {
            writeln!(out, "{v:>5}  {v:0width$b}  {:.4}", report.frequency(v))?;
        }
        let freq: serde_json::Map<String, serde_json::Value> =
            report.frequencies().map(|(k, f)| (k.to_string(), json!(f))).collect();
        json!({ "seed": seed, "method": method, "trials": a.trials, "frequencies": freq })
    } else if let RngMethod::ProbabilisticMeasurement { q, shots } = method {
        let draw = qrng::probabilistic_draw(q, shots, &noise, a.rule.into(), seed)?;
        writeln!(out, "{}", draw.counts)?;
        writeln!(out, "Average count: {}", draw.average)?;
        writeln!(
            out,
            "Value: {} ({})",
            draw.integer.value(),
            bit_string(draw.integer.bits())
        )?;
        json!({ "seed": seed, "method": method, "draw": draw })
    } else {
        let value = qrng::generate(method, a.bits, &noise, seed)?;
        writeln!(out, "Value: {} ({})", value.value(), bit_string(value.bits()))?;
        json!({ "seed": seed, "method": method, "value": value })
    };
    finish(output, record)
}

/// Most significant bit first.
fn bit_string(bits: &[u8]) -> String {
    bits.iter().rev().map(|b| if *b == 1 { '1' } else { '0' }).collect()
}

fn finish(output: Option<PathBuf>, record: serde_json::Value) -> Result<()> {
    if let Some(path) = output {
        let text = serde_json::to_string_pretty(&record).map_err(|e| unicorn_core::Error::Serialize(e.to_string()))?;
        write_file(&path, &(text + "\n"))?;
    }
    Ok(())
}

fn grover<W: Write>(a: GroverArgs, seed: u64, output: Option<PathBuf>, out: &mut W) -> Result<()> {
    let noise = match a.noise_p {
        Some(p) => NoiseModel::new(p)?,
        None => noise_for(a.mode.into()),
    };
    writeln!(out, "Seed: {seed}")?;
    let secret = match a.secret {
        Some(s) => s,
        None => qrng::random_in_range(
            0,
            15,
            RngMethod::OneQubitPerBit,
            &NoiseModel::ideal(),
            derive_seed(seed, 0),
        )? as usize,
    };
    let cfg = GroverConfig::new(secret)?
        .with_iterations(a.iterations)
        .with_shots(a.shots);
    cfg.validate()?;
    let theory = theoretical_success_prob(cfg.n_states(), cfg.iterations)?;

    if let Some(trials) = a.sweep {
        let rows = noise_sweep(&cfg, &GROVER_FLIP_PROBS, trials, seed)?;
        writeln!(
            out,
            "Secret: {secret}, {} iteration(s), {} shots, {trials} trials",
            cfg.iterations, cfg.shots
        )?;
        writeln!(out, "flip_p  success_rate")?;
        for r in &rows {
            writeln!(out, "{:>6.2}  {:.4}", r.flip_prob, r.success_rate)?;
        }
        return finish(output, json!({ "seed": seed, "config": cfg, "rows": rows }));
    }

    let result = grover_search(&cfg, &noise, derive_seed(seed, 1))?;
    writeln!(out, "Secret: {} ({secret})", result.counts.bitstring(secret))?;
    writeln!(
        out,
        "Measurements after {} iteration(s) of Grover search:",
        cfg.iterations
    )?;
    writeln!(out, "{}", result.counts)?;
    writeln!(
        out,
        "Maximum outcome: {} ({})",
        result.counts.bitstring(result.argmax),
        result.argmax
    )?;
    writeln!(out, "Theoretical success probability: {theory:.6}")?;
    writeln!(out, "{}", if result.success { "Found." } else { "Missed." })?;
    finish(
        output,
        json!({ "seed": seed, "config": cfg, "noise_p": noise.readout_flip_prob(), "theoretical_success": theory, "result": result }),
    )
}

fn bench<W: Write>(a: BenchArgs, seed: u64, output: Option<PathBuf>, out: &mut W) -> Result<()> {
    let opts = if a.quick {
        ReportOptions::quick()
    } else {
        ReportOptions::default()
    };
    writeln!(out, "Seed: {seed}")?;
    let dir = output.unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|source| CliError::File {
        path: dir.clone(),
        source,
    })?;
    let report = run_report(seed, opts)?;
    let (json_path, csv_path) = write_report(&report, &dir)?;
    let t = &report.timing.simulator;
    writeln!(
        out,
        "Simulator: {} runs, mean {:.6} s, median {:.6} s",
        t.runs, t.mean_s, t.median_s
    )?;
    for row in &report.grover_noise.rows {
        writeln!(out, "Grover p={:.2}: success {:.4}", row.flip_prob, row.success_rate)?;
    }
    writeln!(out, "Wrote {}", json_path.display())?;
    writeln!(out, "Wrote {}", csv_path.display())?;
    Ok(())
}

fn serve<W: Write>(a: ServeArgs, seed: Option<u64>, output: Option<PathBuf>, out: &mut W) -> Result<()> {
    let config = ApiConfig {
        default_mode: a.mode.into(),
        idle_timeout: Duration::from_secs(a.idle_timeout.max(1)),
        busy_policy: match a.busy {
            BusyArg::Queue => BusyPolicy::Queue,
            BusyArg::Reject => BusyPolicy::Reject,
        },
        cors_origin: a.cors_origin,
        seed,
    };
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&a.addr)
            .await
            .map_err(|source| CliError::Bind {
                addr: a.addr.clone(),
                source,
            })?;
        let local = listener.local_addr()?;
        tracing::info!(%local, "listening");
        writeln!(out, "Listening on http://{local}")?;
        out.flush()?;
        if let Some(path) = &output {
            write_file(path, &format!("{local}\n"))?;
        }
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
            tracing::info!("shutting down");
        };
        unicorn_api::serve(listener, AppState::new(config), shutdown).await?;
        Ok(())
    })
}
