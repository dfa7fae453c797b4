use std::sync::Arc;
use std::time::UNIX_EPOCH;

use axum::body::Bytes;
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::Json;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use unicorn_core::game::{
    status_message, Action, DeviceMode, EncounterSummary, Game, GameConfig, GameStatus, GuessEntry, InversionMode,
    TranscriptEntry, TurnRecord, Variant,
};
use unicorn_core::grover::{grover_search, theoretical_success_prob, GroverConfig, GroverResult};
use unicorn_core::qrng::{self, RngMethod, ThresholdRule};
use unicorn_core::qsim::{MeasurementCounts, NoiseModel};
use unicorn_core::seed::entropy_seed;

use crate::error::ApiError;
use crate::AppState;

const MAX_RNG_BITS: usize = 1024;

type ApiResult<T> = Result<T, ApiError>;

pub async fn health() -> Json<Value> {
    Json(json!({ "status": "ok", "version": env!("CARGO_PKG_VERSION") }))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateGame {
    pub mode: Option<String>,
    pub variant: Option<String>,
    pub seed: Option<u64>,
    pub inversion: Option<String>,
    pub encounter_prob: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct CreatedGame {
    pub session_id: String,
    pub seed: u64,
    pub mode: DeviceMode,
    pub variant: Variant,
    pub player_name: String,
    pub goal: u64,
    pub shots: u64,
    pub error_buffer: u64,
    pub altitude: u64,
    pub message: String,
}

pub async fn create_game(State(app): State<Arc<AppState>>, body: Bytes) -> ApiResult<(StatusCode, Json<CreatedGame>)> {
    let req: CreateGame = if body.iter().all(u8::is_ascii_whitespace) {
        CreateGame::default()
    } else {
        serde_json::from_slice(&body)?
    };
    let mode = match req.mode {
        Some(m) => m.parse()?,
        None => app.config.default_mode,
    };
    let variant = req.variant.as_deref().unwrap_or("quantum").parse()?;
    let mut cfg = GameConfig::new(mode, variant);
    if let Some(inv) = req.inversion {
        cfg = cfg.with_inversion(inv.parse::<InversionMode>()?);
    }
    if let Some(p) = req.encounter_prob {
        cfg = cfg.with_encounter_prob(p);
    }
    cfg.validate()?;
    let seed = req.seed.unwrap_or_else(|| app.next_seed());
    let game = Game::new(cfg.clone(), seed)?;
    let state = game.state();
    let payload = CreatedGame {
        session_id: String::new(),
        seed,
        mode,
        variant,
        player_name: state.player_name.clone(),
        goal: state.goal,
        shots: state.shots,
        error_buffer: cfg.error_buffer,
        altitude: state.altitude,
        message: status_message(state.altitude, state.goal, &state.player_name),
    };
    app.sessions.evict_idle(std::time::Instant::now());
    let session = app.sessions.insert(game);
    tracing::debug!(session = %session.id, %mode, %variant, seed, "game created");
    Ok((
        StatusCode::CREATED,
        Json(CreatedGame {
            session_id: session.id.clone(),
            ..payload
        }),
    ))
}

#[derive(Debug, Serialize)]
pub struct GameView<'a> {
    pub session_id: &'a str,
    pub seed: u64,
    pub created_at: u64,
    pub config: &'a GameConfig,
    pub player_name: &'a str,
    pub altitude: u64,
    pub goal: u64,
    pub shots: u64,
    pub turn: u32,
    pub status: GameStatus,
    pub message: String,
    pub encounter: Option<EncounterSummary>,
    pub transcript: &'a [TranscriptEntry],
}

pub async fn get_game(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let session = app.sessions.get(&id)?;
    let game = session.lock(app.config.busy_policy).await?;
    let state = game.state();
    let view = GameView {
        session_id: &session.id,
        seed: game.seed(),
        created_at: session
            .created_at
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or_default(),
        config: game.config(),
        player_name: &state.player_name,
        altitude: state.altitude,
        goal: state.goal,
        shots: state.shots,
        turn: state.turn,
        status: state.status,
        message: status_message(state.altitude, state.goal, &state.player_name),
        encounter: game.pending().map(EncounterSummary::from),
        transcript: &state.transcript,
    };
    Ok(Json(
        serde_json::to_value(view).map_err(|e| ApiError::Internal(e.to_string()))?,
    ))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionRequest {
    pub action: String,
}

pub async fn post_action(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<ActionRequest>, JsonRejection>,
) -> ApiResult<Json<TurnRecord>> {
    let session = app.sessions.get(&id)?;
    let Json(req) = body?;
    let action: Action = req.action.parse()?;
    let mut game = session.lock(app.config.busy_policy).await?;
    if game.state().is_over() {
        return Err(ApiError::conflict(
            "game_over",
            format!("game is over ({:?})", game.state().status),
        ));
    }
    if game.pending().is_some() {
        return Err(ApiError::conflict(
            "encounter_pending",
            "a jewel encounter must be answered first",
        ));
    }
    Ok(Json(game.act(action)?))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuessRequest {
    pub jewel: String,
}

#[derive(Debug, Serialize)]
pub struct GuessResponse {
    #[serde(flatten)]
    pub entry: GuessEntry,
    pub status: GameStatus,
    /// The round still awaiting an answer, if the guess did not end it.
    pub encounter: Option<EncounterSummary>,
}

pub async fn post_guess(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<GuessRequest>, JsonRejection>,
) -> ApiResult<Json<GuessResponse>> {
    let session = app.sessions.get(&id)?;
    let Json(req) = body?;
    let mut game = session.lock(app.config.busy_policy).await?;
    if game.pending().is_none() {
        return Err(ApiError::conflict("no_encounter", "no jewel encounter is pending"));
    }
    let entry = game.guess(&req.jewel)?;
    Ok(Json(GuessResponse {
        entry,
        status: game.state().status,
        encounter: game.pending().map(EncounterSummary::from),
    }))
}

#[derive(Debug, Deserialize)]
pub struct RngQuery {
    pub method: Option<String>,
    pub n_bits: Option<usize>,
    pub q: Option<usize>,
    pub shots: Option<u64>,
    pub noise_p: Option<f64>,
    pub rule: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct RngResponse {
    pub method: RngMethod,
    pub seed: u64,
    pub value: String,
    pub bits: Vec<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<MeasurementCounts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub average: Option<f64>,
}

pub async fn get_rng(query: Result<Query<RngQuery>, QueryRejection>) -> ApiResult<Json<RngResponse>> {
    let Query(q) = query?;
    let noise = NoiseModel::new(q.noise_p.unwrap_or(0.0))?;
    let seed = q.seed.unwrap_or_else(entropy_seed);
    let n_bits = q.n_bits.unwrap_or(4);
    if n_bits > MAX_RNG_BITS {
        return Err(ApiError::BadRequest(format!("n_bits = {n_bits} above {MAX_RNG_BITS}")));
    }
    let rule = match q.rule.as_deref() {
        None | Some("greater") | Some("gt") => ThresholdRule::Greater,
        Some("greater_or_equal") | Some("ge") => ThresholdRule::GreaterOrEqual,
        Some(other) => return Err(ApiError::BadRequest(format!("unknown threshold rule {other:?}"))),
    };
    let resp = match q.method.as_deref().unwrap_or("probabilistic") {
        "probabilistic" => {
            let method = RngMethod::probabilistic(q.q.unwrap_or(2), q.shots.unwrap_or(100))?;
            let RngMethod::ProbabilisticMeasurement { q, shots } = method else {
                unreachable!()
            };
            let draw = qrng::probabilistic_draw(q, shots, &noise, rule, seed)?;
            RngResponse {
                method,
                seed,
                value: draw.integer.value().to_string(),
                bits: draw.integer.bits().to_vec(),
                counts: Some(draw.counts),
                average: Some(draw.average),
            }
        }
        name => {
            let method = match name {
                "one_qubit" | "one_qubit_per_bit" => RngMethod::OneQubitPerBit,
                "multi_qubit" | "multi_qubit_single_shot" => RngMethod::MultiQubitSingleShot,
                other => return Err(ApiError::BadRequest(format!("unknown rng method {other:?}"))),
            };
            let int = qrng::generate(method, n_bits, &noise, seed)?;
            RngResponse {
                method,
                seed,
                value: int.value().to_string(),
                bits: int.bits().to_vec(),
                counts: None,
                average: None,
            }
        }
    };
    Ok(Json(resp))
}

#[derive(Debug, Deserialize)]
pub struct GroverQuery {
    pub secret: usize,
    pub iterations: Option<u32>,
    pub shots: Option<u64>,
    pub noise_p: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct GroverResponse {
    pub seed: u64,
    pub secret: usize,
    pub iterations: u32,
    pub shots: u64,
    pub noise_p: f64,
    pub theoretical_success: f64,
    #[serde(flatten)]
    pub result: GroverResult,
}

pub async fn get_grover(query: Result<Query<GroverQuery>, QueryRejection>) -> ApiResult<Json<GroverResponse>> {
    let Query(q) = query?;
    let mut cfg = GroverConfig::new(q.secret)?;
    if let Some(k) = q.iterations {
        cfg = cfg.with_iterations(k);
    }
    if let Some(s) = q.shots {
        cfg = cfg.with_shots(s);
    }
    cfg.validate()?;
    let noise = NoiseModel::new(q.noise_p.unwrap_or(0.0))?;
    let seed = q.seed.unwrap_or_else(entropy_seed);
    let result = grover_search(&cfg, &noise, seed)?;
    Ok(Json(GroverResponse {
        seed,
        secret: cfg.secret,
        iterations: cfg.iterations,
        shots: cfg.shots,
        noise_p: noise.readout_flip_prob(),
        theoretical_success: theoretical_success_prob(cfg.n_states(), cfg.iterations)?,
        result,
    }))
}
