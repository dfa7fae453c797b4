use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use unicorn_cli::play_loop;
use unicorn_core::game::{DeviceMode, Game, GameConfig, GameStatus, Variant};

const BIN: &str = env!("CARGO_BIN_EXE_unicorn");

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn one_turn_then_quit() {
    let o = run(&["play", "--seed", "8", "--encounter-prob", "0"], "u\nq\n");
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.matches("You soar into the sky.").count(), 1);
    assert!(text.contains("Running on the simulator."));
    assert!(text.trim_end().ends_with("Goodbye."));
}

#[test]
fn banner_shows_measured_altitude() {
    let o = run(&["play", "--seed", "21", "--encounter-prob", "0"], "up\n");
    let text = stdout(&o);
    let counts_line = text.lines().find(|l| l.starts_with("{'0'")).unwrap();
    let ones: u64 = counts_line
        .split("'1': ")
        .nth(1)
        .map(|s| s.trim_end_matches('}').parse().unwrap())
        .unwrap_or(0);
    assert!(text.contains(&format!("-[ Altitude {ones} feet ]-")), "{text}");
    assert!(text.contains("[up,down,quit]: "));
}

#[test]
fn seed_is_echoed_and_replays() {
    let first = run(&["play", "--variant", "classical"], "u\nu\nd\nq\n");
    let text = stdout(&first);
    let seed = text.lines().next().unwrap().strip_prefix("Seed: ").unwrap().to_string();
    let again = run(&["play", "--variant", "classical", "--seed", &seed], "u\nu\nd\nq\n");
    assert_eq!(text, stdout(&again));
}

#[test]
fn transcript_file_is_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    let o = run(
        &[
            "play",
            "--seed",
            "4",
            "--encounter-prob",
            "0",
            "--output",
            path.to_str().unwrap(),
        ],
        "u\nd\nu\n",
    );
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l["kind"] == "turn"));
    assert_eq!(lines[1]["action"], "down");
}

#[test]
fn jewel_prompt_and_invalid_input() {
    let o = run(
        &["play", "--seed", "2", "--encounter-prob", "1"],
        "u\nruby\nsapphire\nq\n",
    );
    let text = stdout(&o);
    assert!(text.contains("Round 1. Which unicorn jewel is the real one?\n[amethyst,sapphire,emerald,jade]: "));
    assert!(text.contains("That is not one of the jewels."));
    assert!(text.contains("You guessed"));
}

#[test]
fn usage_and_runtime_errors() {
    assert_eq!(run(&["play", "--warp"], "").status.code(), Some(2));
    assert_eq!(run(&["play", "--mode", "warp"], "").status.code(), Some(2));
    assert_eq!(run(&["rng", "--q", "25", "--seed", "1"], "").status.code(), Some(2));
    assert_eq!(run(&["grover", "--secret", "16"], "").status.code(), Some(2));
    let o = run(&["rng", "--seed", "1", "--output", "/nonexistent/dir/x.json"], "");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn rng_and_grover_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let rng_path = dir.path().join("rng.json");
    let o = run(&["rng", "--seed", "3", "--output", rng_path.to_str().unwrap()], "");
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rng_path).unwrap()).unwrap();
    assert_eq!(v["seed"], 3);
    assert_ne!(v["draw"]["integer"]["value"], "15");

    let g_path = dir.path().join("g.json");
    let o = run(
        &[
            "grover",
            "--seed",
            "3",
            "--secret",
            "11",
            "--output",
            g_path.to_str().unwrap(),
        ],
        "",
    );
    assert!(o.status.success());
    assert!(stdout(&o).contains("Maximum outcome: 1011 (11)"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&g_path).unwrap()).unwrap();
    assert_eq!(v["result"]["argmax"], 11);

    let o = run(&["rng", "--seed", "3", "--name", "--method", "one-qubit"], "");
    assert!(stdout(&o).lines().any(|l| l.starts_with("Name: ")));
}

#[test]
fn bench_writes_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "bench",
            "--quick",
            "--seed",
            "1",
            "--output",
            dir.path().to_str().unwrap(),
        ],
        "",
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "section,label,x,analytic,empirical,n");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 1);
}

fn http_get(addr: &str, req: &str) -> String {
    let mut s = TcpStream::connect(addr).unwrap();
    s.write_all(req.as_bytes()).unwrap();
    let mut buf = String::new();
    s.read_to_string(&mut buf).unwrap();
    buf
}

fn wait_for_file(path: &std::path::Path) -> String {
    let start = Instant::now();
    loop {
        if let Ok(s) = std::fs::read_to_string(path) {
            if s.ends_with('\n') {
                return s.trim().to_string();
            }
        }
        assert!(start.elapsed() < Duration::from_secs(20), "server did not start");
        std::thread::sleep(Duration::from_millis(50));
    }
}

#[test]
fn serve_hardware_mode_and_shutdown() {
    let dir = tempfile::tempdir().unwrap();
    let addr_file = dir.path().join("addr");
    let mut child = Command::new(BIN)
        .args(["serve", "--addr", "127.0.0.1:0", "--mode", "hardware", "--output"])
        .arg(&addr_file)
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let addr = wait_for_file(&addr_file);

    let health = http_get(&addr, "GET /health HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n");
    assert!(health.starts_with("HTTP/1.1 200"));
    assert!(health.contains(env!("CARGO_PKG_VERSION")));

    let body = "{}";
    let created = http_get(
        &addr,
        &format!(
            "POST /games HTTP/1.1\r\nHost: x\r\nConnection: close\r\nContent-Type: application/json\r\nContent-Length: {}\r\n\r\n{body}",
            body.len()
        ),
    );
    assert!(created.starts_with("HTTP/1.1 201"), "{created}");
    assert!(created.contains("\"error_buffer\":75"));
    assert!(created.contains("\"goal\":949"));

    let status = Command::new("kill")
        .args(["-INT", &child.id().to_string()])
        .status()
        .unwrap();
    assert!(status.success());
    let start = Instant::now();
    let exit = loop {
        if let Some(s) = child.try_wait().unwrap() {
            break s;
        }
        assert!(start.elapsed() < Duration::from_secs(10), "server did not stop");
        std::thread::sleep(Duration::from_millis(50));
    };
    assert!(exit.success());
}

#[test]
fn serve_on_occupied_port_fails() {
    let taken = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = taken.local_addr().unwrap().to_string();
    let o = run(&["serve", "--addr", &addr], "");
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("could not bind"));
}

#[test]
fn eof_counts_as_quit() {
    let cfg = GameConfig::new(DeviceMode::Simulator, Variant::Quantum);
    let mut game = Game::new(cfg, 1).unwrap();
    let mut out = Vec::new();
    play_loop(&mut game, &mut "".as_bytes(), &mut out).unwrap();
    assert_eq!(game.state().status, GameStatus::Quit);
    assert_eq!(game.state().turn, 0);
}

#[test]
fn up_only_reaches_castle() {
    let cfg = GameConfig::new(DeviceMode::HardwareEmulation, Variant::Quantum).with_encounter_prob(0.0);
    let mut game = Game::new(cfg, 6).unwrap();
    let mut out = Vec::new();
    play_loop(&mut game, &mut "u\n".repeat(30).as_bytes(), &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(game.state().status, GameStatus::Won);
    assert!(text.contains("has reached the castle!"));
    assert!(text.contains("Running on the hardware emulator."));
}
