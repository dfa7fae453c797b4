use std::str::FromStr;

use serde::Serialize;

use super::jewel::{GuessRecord, JewelKind, JewelRound};
use crate::error::{invalid, Error, Result};
use crate::qsim::MeasurementCounts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Up,
    Down,
}

/// Accepts `u`/`up` and `d`/`down`, case-insensitive.
impl FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "u" | "up" => Ok(Action::Up),
            "d" | "down" => Ok(Action::Down),
            other => Err(invalid(format!("unknown action {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GameStatus {
    InProgress,
    Won,
    Quit,
}

/// The part of a jewel round that is safe to show before it is answered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EncounterSummary {
    pub kind: JewelKind,
    pub round: u32,
    pub choices: Vec<String>,
}

impl From<&JewelRound> for EncounterSummary {
    fn from(r: &JewelRound) -> Self {
        Self {
            kind: r.kind,
            round: r.round,
            choices: r.jewel_names().iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TurnRecord {
    pub turn: u32,
    pub action: Action,
    pub altitude_before: u64,
    /// (altitude_before + modifier) / goal, floored at 0.
    pub frac: f64,
    /// Gate applied to the altitude qubit: "x", "u3" or none.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<MeasurementCounts>,
    /// The classical 1..=50 jitter.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roll: Option<u32>,
    pub altitude_after: u64,
    pub status: GameStatus,
    pub message: String,
    pub encounter: Option<EncounterSummary>,
}

/// Jewel answer as it appears in the transcript.
#[derive(Debug, Clone, Serialize)]
pub struct GuessEntry {
    #[serde(flatten)]
    pub guess: GuessRecord,
    pub altitude_after: u64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TranscriptEntry {
    Turn(TurnRecord),
    Guess(GuessEntry),
}

#[derive(Debug, Clone, Serialize)]
pub struct GameState {
    pub altitude: u64,
    pub turn: u32,
    pub player_name: String,
    pub status: GameStatus,
    pub goal: u64,
    pub shots: u64,
    /// A jewel round that must be answered before the next turn.
    pub pending: Option<JewelRound>,
    /// Number of jewel guesses made so far; seeds each guess.
    pub guesses: u32,
    pub transcript: Vec<TranscriptEntry>,
}

impl GameState {
    pub fn is_over(&self) -> bool {
        self.status != GameStatus::InProgress
    }

    pub(crate) fn ensure_can_act(&self) -> Result<()> {
        if self.is_over() {
            return Err(Error::InvalidState(format!("game is over ({:?})", self.status)));
        }
        if self.pending.is_some() {
            return Err(Error::InvalidState("a jewel encounter must be answered first".into()));
        }
        Ok(())
    }

    /// Turn records only, in order.
    pub fn turns(&self) -> impl Iterator<Item = &TurnRecord> {
        self.transcript.iter().filter_map(|e| match e {
            TranscriptEntry::Turn(t) => Some(t),
            TranscriptEntry::Guess(_) => None,
        })
    }

    /// Line-delimited JSON, one entry per line.
    pub fn transcript_jsonl(&self) -> String {
        let mut out = String::new();
        for entry in &self.transcript {
            out.push_str(&serde_json::to_string(entry).expect("transcript entries serialize"));
            out.push('\n');
        }
        out
    }
}
