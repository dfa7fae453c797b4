//! The jewel guessing mini-game.
//!
//! Quantum rounds hide a secret in `[0, 16)` and show the player four jewel
//! names; each name covers four consecutive values (`secret / 4`). The
//! computer answers with the argmax of a one-iteration Grover search.
//! Classical rounds hide one of fourteen jewels and the computer guesses
//! uniformly among the candidates nobody has ruled out yet.

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::grover::{grover_search, GroverConfig, GroverResult};
use crate::qsim::NoiseModel;
use crate::seed::rng_from_seed;

pub const QUANTUM_JEWELS: [&str; 4] = ["amethyst", "sapphire", "emerald", "jade"];

pub const CLASSICAL_JEWELS: [&str; 14] = [
    "amethyst",
    "sapphire",
    "emerald",
    "jade",
    "ruby",
    "topaz",
    "opal",
    "garnet",
    "diamond",
    "pearl",
    "onyx",
    "peridot",
    "citrine",
    "aquamarine",
];

pub const QUANTUM_SECRET_SPACE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JewelKind {
    Quantum,
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundOutcome {
    Ongoing,
    PlayerWon,
    ComputerWon,
}

impl RoundOutcome {
    pub fn is_terminal(self) -> bool {
        self != RoundOutcome::Ongoing
    }
}

/// What happened on one guess.
#[derive(Debug, Clone, Serialize)]
pub struct GuessRecord {
    pub round: u32,
    pub player_guess: String,
    pub player_correct: bool,
    pub computer_guess: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grover: Option<GroverResult>,
    pub outcome: RoundOutcome,
    /// Revealed once the round ends.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secret_jewel: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JewelRound {
    pub kind: JewelKind,
    #[serde(skip)]
    secret: usize,
    pub round: u32,
    /// Candidates the classical computer may still pick (indices into
    /// [`CLASSICAL_JEWELS`]). Empty for quantum rounds.
    pub computer_memory: Vec<usize>,
    pub outcome: RoundOutcome,
    pub last: Option<GuessRecord>,
}

impl JewelRound {
    pub fn quantum(secret: usize) -> Result<Self> {
        if secret >= QUANTUM_SECRET_SPACE {
            return Err(invalid(format!("quantum secret {secret} outside [0, 16)")));
        }
        Ok(Self {
            kind: JewelKind::Quantum,
            secret,
            round: 1,
            computer_memory: Vec::new(),
            outcome: RoundOutcome::Ongoing,
            last: None,
        })
    }

    pub fn classical(secret: usize) -> Result<Self> {
        if secret >= CLASSICAL_JEWELS.len() {
            return Err(invalid(format!("classical secret {secret} outside [0, 14)")));
        }
        Ok(Self {
            kind: JewelKind::Classical,
            secret,
            round: 1,
            computer_memory: (0..CLASSICAL_JEWELS.len()).collect(),
            outcome: RoundOutcome::Ongoing,
            last: None,
        })
    }

    pub fn secret(&self) -> usize {
        self.secret
    }

    /// The names shown to the player.
    pub fn jewel_names(&self) -> &'static [&'static str] {
        match self.kind {
            JewelKind::Quantum => &QUANTUM_JEWELS,
            JewelKind::Classical => &CLASSICAL_JEWELS,
        }
    }

    pub fn secret_jewel(&self) -> &'static str {
        match self.kind {
            JewelKind::Quantum => QUANTUM_JEWELS[self.secret / 4],
            JewelKind::Classical => CLASSICAL_JEWELS[self.secret],
        }
    }

    /// Index of `name` in this round's jewel list, case-insensitive.
    pub fn jewel_index(&self, name: &str) -> Result<usize> {
        let name = name.trim();
        self.jewel_names()
            .iter()
            .position(|j| j.eq_ignore_ascii_case(name))
            .ok_or_else(|| invalid(format!("{name:?} is not one of [{}]", self.jewel_names().join(","))))
    }

    fn ensure_ongoing(&self) -> Result<()> {
        if self.outcome.is_terminal() {
            Err(Error::InvalidState("jewel round already finished".into()))
        } else {
            Ok(())
        }
    }

    fn finish(&mut self, record: GuessRecord) {
        self.outcome = record.outcome;
        if !record.outcome.is_terminal() {
            self.round += 1;
        }
        self.last = Some(record);
    }
}

/// One quantum round: the player guesses first; if wrong, the computer
/// guesses `QUANTUM_JEWELS[argmax / 4]` from a one-iteration Grover search.
pub fn jewel_round_quantum(
    round: &JewelRound,
    player_guess: &str,
    noise: &NoiseModel,
    seed: u64,
) -> Result<JewelRound> {
    round.ensure_ongoing()?;
    if round.kind != JewelKind::Quantum {
        return Err(Error::InvalidState("not a quantum jewel round".into()));
    }
    let guess = round.jewel_index(player_guess)?;
    let mut next = round.clone();
    let secret_group = round.secret / 4;

    let mut record = GuessRecord {
        round: round.round,
        player_guess: QUANTUM_JEWELS[guess].to_string(),
        player_correct: guess == secret_group,
        computer_guess: None,
        grover: None,
        outcome: RoundOutcome::Ongoing,
        secret_jewel: None,
    };
    if record.player_correct {
        record.outcome = RoundOutcome::PlayerWon;
    } else {
        let cfg = GroverConfig::new(round.secret)?;
        let result = grover_search(&cfg, noise, seed)?;
        let computer = result.argmax / 4;
        record.computer_guess = Some(QUANTUM_JEWELS[computer].to_string());
        record.grover = Some(result);
        if computer == secret_group {
            record.outcome = RoundOutcome::ComputerWon;
        }
    }
    if record.outcome.is_terminal() {
        record.secret_jewel = Some(round.secret_jewel().to_string());
    }
    next.finish(record);
    Ok(next)
}

/// One classical round with the elimination list. Wrong guesses from either
/// side leave the computer's memory, so it never repeats itself.
pub fn jewel_round_classical(round: &JewelRound, player_guess: usize, seed: u64) -> Result<JewelRound> {
    round.ensure_ongoing()?;
    if round.kind != JewelKind::Classical {
        return Err(Error::InvalidState("not a classical jewel round".into()));
    }
    if player_guess >= CLASSICAL_JEWELS.len() {
        return Err(invalid(format!("jewel index {player_guess} outside [0, 14)")));
    }
    let mut next = round.clone();
    let mut record = GuessRecord {
        round: round.round,
        player_guess: CLASSICAL_JEWELS[player_guess].to_string(),
        player_correct: player_guess == round.secret,
        computer_guess: None,
        grover: None,
        outcome: RoundOutcome::Ongoing,
        secret_jewel: None,
    };
    if record.player_correct {
        record.outcome = RoundOutcome::PlayerWon;
    } else {
        next.computer_memory.retain(|&j| j != player_guess);
        let mut rng = rng_from_seed(seed);
        let pick = next.computer_memory[rng.random_range(0..next.computer_memory.len())];
        record.computer_guess = Some(CLASSICAL_JEWELS[pick].to_string());
        if pick == round.secret {
            record.outcome = RoundOutcome::ComputerWon;
        } else {
            next.computer_memory.retain(|&j| j != pick);
        }
    }
    if record.outcome.is_terminal() {
        record.secret_jewel = Some(round.secret_jewel().to_string());
    }
    next.finish(record);
    Ok(next)
}
