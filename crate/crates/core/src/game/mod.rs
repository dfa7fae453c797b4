//! The Flying Unicorn game: altitude state machine for the quantum and
//! classical variants, status messages, random encounters and the jewel
//! mini-game.

mod config;
mod jewel;
mod state;
mod turn;

pub use config::{
    DeviceMode, GameConfig, InversionMode, Variant, BASE_SHOTS, DEFAULT_ENCOUNTER_PROB, DEFAULT_MODIFIER,
    ENCOUNTER_REWARD, HARDWARE_ERROR_BUFFER,
};
pub use jewel::{
    jewel_round_classical, jewel_round_quantum, GuessRecord, JewelKind, JewelRound, RoundOutcome, CLASSICAL_JEWELS,
    QUANTUM_JEWELS,
};
pub use state::{Action, EncounterSummary, GameState, GameStatus, GuessEntry, TranscriptEntry, TurnRecord};
pub use turn::{
    altitude_gate, apply_encounter_result, classical_turn, expected_altitude, new_game, quantum_turn, status_message,
    turn_fraction, CLASSICAL_JITTER,
};

use crate::error::{Error, Result};
use turn::{guess_seed, name_seed, turn_seed};

/// A game session: config, root seed and state. All randomness is derived
/// from the root seed, so the seed plus the action log replays a game
/// exactly.
#[derive(Debug, Clone)]
pub struct Game {
    cfg: GameConfig,
    seed: u64,
    state: GameState,
}

impl Game {
    pub fn new(cfg: GameConfig, seed: u64) -> Result<Self> {
        let state = new_game(&cfg, name_seed(seed))?;
        Ok(Self { cfg, seed, state })
    }

    pub fn config(&self) -> &GameConfig {
        &self.cfg
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn act(&mut self, action: Action) -> Result<TurnRecord> {
        let seed = turn_seed(self.seed, self.state.turn + 1);
        match self.cfg.variant {
            Variant::Quantum => quantum_turn(&mut self.state, &self.cfg, action, &self.cfg.noise(), seed),
            Variant::Classical => classical_turn(&mut self.state, &self.cfg, action, seed),
        }
    }

    /// Answers the pending jewel round by name. On a terminal outcome the
    /// bonus or penalty is applied and the encounter cleared.
    pub fn guess(&mut self, jewel: &str) -> Result<GuessEntry> {
        let round = self
            .state
            .pending
            .as_ref()
            .ok_or_else(|| Error::InvalidState("no jewel encounter is pending".into()))?;
        let seed = guess_seed(self.seed, self.state.guesses);
        let next = match round.kind {
            JewelKind::Quantum => jewel_round_quantum(round, jewel, &self.cfg.noise(), seed)?,
            JewelKind::Classical => {
                let index = round.jewel_index(jewel)?;
                jewel_round_classical(round, index, seed)?
            }
        };
        self.state.guesses += 1;
        if next.outcome.is_terminal() {
            apply_encounter_result(&mut self.state, &self.cfg, next.outcome)?;
            self.state.pending = None;
        } else {
            self.state.pending = Some(next.clone());
        }
        let entry = GuessEntry {
            guess: next.last.expect("a guess was just recorded"),
            altitude_after: self.state.altitude,
        };
        self.state.transcript.push(TranscriptEntry::Guess(entry.clone()));
        Ok(entry)
    }

    pub fn quit(&mut self) {
        if !self.state.is_over() {
            self.state.status = GameStatus::Quit;
        }
    }

    pub fn pending(&self) -> Option<&JewelRound> {
        self.state.pending.as_ref()
    }

    pub fn transcript_jsonl(&self) -> String {
        self.state.transcript_jsonl()
    }
}
