use rand::Rng;

use super::config::{GameConfig, Variant};
use super::jewel::{JewelRound, RoundOutcome, CLASSICAL_JEWELS};
use super::state::{Action, EncounterSummary, GameState, GameStatus, TranscriptEntry, TurnRecord};
use crate::error::{invalid, Result};
use crate::qrng::{generate_player_name, random_in_range_with_rng, NameFragments, RngMethod};
use crate::qsim::{GateOp, NoiseModel, StateVector};
use crate::seed::{derive_seed, rng_from_seed, SimRng};

/// Classical turns add a uniform jitter in `1..=CLASSICAL_JITTER`.
pub const CLASSICAL_JITTER: u32 = 50;

/// Fresh game at altitude 0 with a generated player name.
pub fn new_game(cfg: &GameConfig, seed: u64) -> Result<GameState> {
    cfg.validate()?;
    let fragments = NameFragments::default();
    let player_name = match cfg.variant {
        Variant::Quantum => generate_player_name(&fragments, &cfg.noise(), seed),
        Variant::Classical => {
            let mut rng = rng_from_seed(seed);
            let first = fragments.get(rng.random_range(1..=16)).expect("1..=16");
            let last = fragments.get(rng.random_range(1..=16)).expect("1..=16");
            format!("{first} {last}")
        }
    };
    Ok(GameState {
        altitude: 0,
        turn: 0,
        player_name,
        status: GameStatus::InProgress,
        goal: cfg.goal(),
        shots: cfg.shots(),
        pending: None,
        guesses: 0,
        transcript: Vec::new(),
    })
}

/// Band message for an altitude.
pub fn status_message(altitude: u64, goal: u64, player_name: &str) -> String {
    let band = match altitude {
        a if a >= goal => "has reached the castle!",
        0 => "is waiting for you on the ground.",
        1..=99 => "is floating gently above the ground.",
        100..=499 => "is soaring through the sky.",
        _ => "is approaching the castle.",
    };
    format!("{player_name} {band}")
}

fn modifier(cfg: &GameConfig, action: Action) -> i64 {
    match action {
        Action::Up => cfg.modifier_up,
        Action::Down => cfg.modifier_down,
    }
}

/// (altitude + modifier) / goal, floored at 0.
pub fn turn_fraction(cfg: &GameConfig, altitude: u64, action: Action) -> f64 {
    let target = (altitude as i64 + modifier(cfg, action)).max(0);
    target as f64 / cfg.goal() as f64
}

/// The gate a quantum turn applies for a given fraction, if any.
pub fn altitude_gate(cfg: &GameConfig, frac: f64) -> Option<GateOp> {
    if frac >= 1.0 {
        Some(GateOp::X { target: 0 })
    } else if frac > 0.0 {
        Some(GateOp::u3(0, cfg.inversion_mode.theta(frac), 0.0, 0.0))
    } else {
        None
    }
}

/// Analytic mean of the next altitude for a noiseless quantum turn.
pub fn expected_altitude(cfg: &GameConfig, altitude: u64, action: Action) -> f64 {
    let frac = turn_fraction(cfg, altitude, action);
    let p1 = match altitude_gate(cfg, frac) {
        None => 0.0,
        Some(op) => StateVector::new(1)
            .and_then(|s| s.with(op))
            .and_then(|s| s.probability(1))
            .expect("single-qubit gate on one qubit"),
    };
    p1 * cfg.shots() as f64
}

fn roll_encounter(cfg: &GameConfig, noise: &NoiseModel, rng: &mut SimRng) -> Result<Option<JewelRound>> {
    if rng.random::<f64>() >= cfg.encounter_prob {
        return Ok(None);
    }
    let round = match cfg.variant {
        Variant::Quantum => {
            let secret = random_in_range_with_rng(0, 15, RngMethod::OneQubitPerBit, noise, rng)?;
            JewelRound::quantum(secret as usize)?
        }
        Variant::Classical => JewelRound::classical(rng.random_range(0..CLASSICAL_JEWELS.len()))?,
    };
    Ok(Some(round))
}

fn finish_turn(state: &mut GameState, mut record: TurnRecord, encounter: Option<JewelRound>) -> TurnRecord {
    state.altitude = record.altitude_after;
    state.turn = record.turn;
    if state.altitude >= state.goal {
        state.status = GameStatus::Won;
    }
    record.status = state.status;
    record.message = status_message(state.altitude, state.goal, &state.player_name);
    record.encounter = encounter.as_ref().map(EncounterSummary::from);
    // a winning turn ends the game; the encounter is not left pending
    state.pending = if state.is_over() { None } else { encounter };
    state.transcript.push(TranscriptEntry::Turn(record.clone()));
    record
}

/// One quantum turn: partial inversion of the altitude qubit, then
/// `shots` measurements; the new altitude is the count of `1` outcomes.
pub fn quantum_turn(
    state: &mut GameState,
    cfg: &GameConfig,
    action: Action,
    noise: &NoiseModel,
    seed: u64,
) -> Result<TurnRecord> {
    state.ensure_can_act()?;
    let mut rng = rng_from_seed(seed);
    let encounter = roll_encounter(cfg, noise, &mut rng)?;

    let frac = turn_fraction(cfg, state.altitude, action);
    let gate = altitude_gate(cfg, frac);
    let mut qubit = StateVector::new(1)?;
    if let Some(op) = &gate {
        qubit.apply(op)?;
    }
    let counts = qubit.measure_with_rng(cfg.shots(), noise, &mut rng)?;

    let record = TurnRecord {
        turn: state.turn + 1,
        action,
        altitude_before: state.altitude,
        frac,
        gate: gate.map(|g| match g {
            GateOp::X { .. } => "x",
            _ => "u3",
        }),
        theta: match gate {
            Some(GateOp::U3 { theta, .. }) => Some(theta),
            _ => None,
        },
        altitude_after: counts.get(1),
        counts: Some(counts),
        roll: None,
        status: state.status,
        message: String::new(),
        encounter: None,
    };
    Ok(finish_turn(state, record, encounter))
}

/// One classical turn: altitude + modifier + uniform 1..=50, clamped to
/// `[0, base_shots]`.
pub fn classical_turn(state: &mut GameState, cfg: &GameConfig, action: Action, seed: u64) -> Result<TurnRecord> {
    state.ensure_can_act()?;
    let mut rng = rng_from_seed(seed);
    let encounter = roll_encounter(cfg, &NoiseModel::ideal(), &mut rng)?;
    let roll = rng.random_range(1..=CLASSICAL_JITTER);
    let next = state.altitude as i64 + modifier(cfg, action) + roll as i64;
    let altitude_after = next.clamp(0, cfg.base_shots as i64) as u64;
    let record = TurnRecord {
        turn: state.turn + 1,
        action,
        altitude_before: state.altitude,
        frac: turn_fraction(cfg, state.altitude, action),
        gate: None,
        theta: None,
        counts: None,
        roll: Some(roll),
        altitude_after,
        status: state.status,
        message: String::new(),
        encounter: None,
    };
    Ok(finish_turn(state, record, encounter))
}

/// Bonus or penalty after a finished jewel round.
pub fn apply_encounter_result(state: &mut GameState, cfg: &GameConfig, outcome: RoundOutcome) -> Result<()> {
    match outcome {
        RoundOutcome::PlayerWon => {
            state.altitude = (state.altitude + cfg.encounter_reward).min(cfg.base_shots);
        }
        RoundOutcome::ComputerWon => {
            state.altitude = state.altitude.saturating_sub(cfg.encounter_reward);
        }
        RoundOutcome::Ongoing => return Err(invalid("encounter outcome is not terminal")),
    }
    Ok(())
}

/// Seed for turn `turn` (1-based) of a game seeded with `seed`.
pub fn turn_seed(seed: u64, turn: u32) -> u64 {
    derive_seed(derive_seed(seed, 1), turn as u64)
}

/// Seed for the `n`-th jewel guess (0-based) of a game.
pub fn guess_seed(seed: u64, n: u32) -> u64 {
    derive_seed(derive_seed(seed, 2), n as u64)
}

pub fn name_seed(seed: u64) -> u64 {
    derive_seed(seed, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{DeviceMode, InversionMode};

    fn sim() -> GameConfig {
        GameConfig::new(DeviceMode::Simulator, Variant::Quantum).with_encounter_prob(0.0)
    }

    #[test]
    fn new_game_modes() {
        let s = new_game(&sim(), 1).unwrap();
        assert_eq!((s.goal, s.shots, s.altitude, s.turn), (1024, 1024, 0, 0));
        assert_eq!(s.status, GameStatus::InProgress);
        let hw = GameConfig::new(DeviceMode::HardwareEmulation, Variant::Quantum);
        let s = new_game(&hw, 1).unwrap();
        assert_eq!((s.goal, s.shots), (949, 1024));
        assert_eq!(
            new_game(&hw, 77).unwrap().player_name,
            new_game(&hw, 77).unwrap().player_name
        );
    }

    #[test]
    fn opening_turn_expectation() {
        let cfg = sim();
        let frac = turn_fraction(&cfg, 0, Action::Up);
        assert!((frac - 150.0 / 1024.0).abs() < 1e-12);
        let p1 = (frac * std::f64::consts::PI / 2.0).sin().powi(2);
        assert!((p1 - 0.0522).abs() < 5e-4);
        let expected = expected_altitude(&cfg, 0, Action::Up);
        assert!((expected - 53.0).abs() < 1.5, "{expected}");

        let mut s = new_game(&cfg, 3).unwrap();
        let r = quantum_turn(&mut s, &cfg, Action::Up, &NoiseModel::ideal(), 3).unwrap();
        // σ ≈ 7.1
        assert!((r.altitude_after as f64 - expected).abs() < 4.0 * 7.1);
        assert_eq!(r.counts.as_ref().unwrap().get(1), s.altitude);
        assert_eq!(r.gate, Some("u3"));
    }

    #[test]
    fn full_inversion_wins() {
        let cfg = sim();
        let mut s = new_game(&cfg, 3).unwrap();
        s.altitude = 900;
        let r = quantum_turn(&mut s, &cfg, Action::Up, &NoiseModel::ideal(), 3).unwrap();
        assert_eq!(r.gate, Some("x"));
        assert_eq!(r.altitude_after, 1024);
        assert_eq!(s.status, GameStatus::Won);
        assert!(r.message.ends_with("has reached the castle!"));
        let again = quantum_turn(&mut s, &cfg, Action::Up, &NoiseModel::ideal(), 4);
        assert!(matches!(again, Err(crate::Error::InvalidState(_))));
    }

    #[test]
    fn down_at_ground_stays() {
        let cfg = sim();
        let mut s = new_game(&cfg, 3).unwrap();
        let r = quantum_turn(&mut s, &cfg, Action::Down, &NoiseModel::ideal(), 3).unwrap();
        assert_eq!(r.frac, 0.0);
        assert_eq!(r.gate, None);
        assert_eq!(s.altitude, 0);
    }

    #[test]
    fn up_beats_down_in_expectation() {
        for mode in [InversionMode::RawTheta, InversionMode::LinearProbability] {
            let cfg = sim().with_inversion(mode);
            for a in (151..874).step_by(37) {
                assert!(expected_altitude(&cfg, a, Action::Up) > expected_altitude(&cfg, a, Action::Down));
            }
        }
    }

    #[test]
    fn linear_mode_is_proportional() {
        let cfg = sim().with_inversion(InversionMode::LinearProbability);
        let e = expected_altitude(&cfg, 106, Action::Up);
        assert!((e - 256.0).abs() < 1e-9);
    }

    #[test]
    fn classical_moves() {
        let cfg = GameConfig::new(DeviceMode::Simulator, Variant::Classical).with_encounter_prob(0.0);
        let mut s = new_game(&cfg, 1).unwrap();
        let r = classical_turn(&mut s, &cfg, Action::Up, 1).unwrap();
        assert!((151..=200).contains(&r.altitude_after));
        assert!(r.counts.is_none());

        let mut s = new_game(&cfg, 1).unwrap();
        s.altitude = 10;
        classical_turn(&mut s, &cfg, Action::Down, 9).unwrap();
        assert_eq!(s.altitude, 0);

        let mut s = new_game(&cfg, 1).unwrap();
        s.altitude = 1000;
        classical_turn(&mut s, &cfg, Action::Up, 9).unwrap();
        assert_eq!(s.status, GameStatus::Won);
        assert_eq!(s.altitude, 1024);
    }

    #[test]
    fn status_bands() {
        let n = "Pixel Twilight";
        assert_eq!(
            status_message(56, 1024, n),
            "Pixel Twilight is floating gently above the ground."
        );
        assert_eq!(
            status_message(0, 1024, n),
            "Pixel Twilight is waiting for you on the ground."
        );
        assert_eq!(status_message(1024, 1024, n), "Pixel Twilight has reached the castle!");
        assert_eq!(
            status_message(99, 1024, n),
            "Pixel Twilight is floating gently above the ground."
        );
        assert_eq!(
            status_message(100, 1024, n),
            "Pixel Twilight is soaring through the sky."
        );
        assert_eq!(
            status_message(500, 1024, n),
            "Pixel Twilight is approaching the castle."
        );
        assert_eq!(status_message(949, 949, n), "Pixel Twilight has reached the castle!");
    }

    #[test]
    fn encounter_rewards() {
        let cfg = sim();
        let mut s = new_game(&cfg, 1).unwrap();
        s.altitude = 500;
        apply_encounter_result(&mut s, &cfg, RoundOutcome::PlayerWon).unwrap();
        assert_eq!(s.altitude, 600);
        s.altitude = 50;
        apply_encounter_result(&mut s, &cfg, RoundOutcome::ComputerWon).unwrap();
        assert_eq!(s.altitude, 0);
        s.altitude = 1000;
        apply_encounter_result(&mut s, &cfg, RoundOutcome::PlayerWon).unwrap();
        assert_eq!(s.altitude, 1024);
        assert!(apply_encounter_result(&mut s, &cfg, RoundOutcome::Ongoing).is_err());
    }

    #[test]
    fn encounter_blocks_next_turn() {
        let cfg = sim().with_encounter_prob(1.0);
        let mut s = new_game(&cfg, 1).unwrap();
        let r = quantum_turn(&mut s, &cfg, Action::Up, &NoiseModel::ideal(), 1).unwrap();
        let enc = r.encounter.unwrap();
        assert_eq!(enc.choices, vec!["amethyst", "sapphire", "emerald", "jade"]);
        assert!(s.pending.is_some());
        assert!(quantum_turn(&mut s, &cfg, Action::Up, &NoiseModel::ideal(), 2).is_err());
    }
}
