//! HTTP sessions for playing games against the solver.
//!
//! A session is fully determined by its creation request and the list of
//! moves the human made; the engine always answers with
//! [`Solver::optimal_move`], so replaying that list rebuilds the session.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};
use std::time::Duration;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

use treelogic::games::{
    GameConfig, GameError, GameState, Move, ParamFrame, Player, Solver, MAX_SET_GAME_SIZE,
};
use treelogic::structure::{frame_from_json, ElemSet, Frame};
use treelogic::testkit::{GenConfig, Generator};
use treelogic::{LogicId, Vocabulary};

/// Most rounds a session may ask for.
pub const MAX_ROUNDS: usize = 6;
/// Largest frame for FO sessions.
pub const MAX_FO_SIZE: usize = 16;
/// Solver positions allowed per session.
pub const SESSION_BUDGET: usize = 2_000_000;
/// Wall-clock limit on the solve done when a session is created.
pub const PRECOMPUTE_LIMIT: Duration = Duration::from_secs(10);

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    rule: Option<String>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
            rule: None,
        }
    }

    fn bad(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, message)
    }

    fn not_found(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, format!("no session `{id}`"))
    }

    fn conflict(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::CONFLICT, message)
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, message)
    }
}

impl From<GameError> for ApiError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::Illegal(rule) => ApiError {
                status: StatusCode::UNPROCESSABLE_ENTITY,
                message: "illegal move".into(),
                rule: Some(rule),
            },
            GameError::Budget(_) | GameError::Timeout(_) => ApiError::unprocessable(e.to_string()),
            GameError::Finished | GameError::NoMove => ApiError::conflict(e.to_string()),
            GameError::Parse(_) | GameError::Config(_) => ApiError::bad(e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if let Some(rule) = self.rule {
            body["rule"] = json!(rule);
        }
        (self.status, Json(body)).into_response()
    }
}

/// A structure document, or `{"generate": {...}}` for a seeded random tree.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StructureSource {
    Generate { generate: GenerateSpec },
    Document(Value),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerateSpec {
    #[serde(default = "default_kind")]
    pub kind: String,
    pub size: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_labels")]
    pub labels: usize,
    #[serde(default = "default_roots")]
    pub roots: usize,
}

fn default_kind() -> String {
    "tree".into()
}

fn default_labels() -> usize {
    1
}

fn default_roots() -> usize {
    2
}

impl StructureSource {
    fn build(&self) -> Result<Frame, ApiError> {
        match self {
            StructureSource::Document(v) => {
                frame_from_json(v, None).map_err(|e| ApiError::bad(e.to_string()))
            }
            StructureSource::Generate { generate: g } => {
                if g.size == 0 || g.size > MAX_FO_SIZE {
                    return Err(ApiError::unprocessable(format!(
                        "generated size must be between 1 and {MAX_FO_SIZE}"
                    )));
                }
                let mut gen = Generator::new(GenConfig {
                    seed: g.seed,
                    min_size: g.size,
                    max_size: g.size,
                    vocab: Vocabulary::tree(g.labels),
                    ..GenConfig::default()
                });
                match g.kind.as_str() {
                    "tree" => Ok(gen.tree_of_size(g.size)),
                    "forest" => Ok(gen.forest_of_size(g.size, g.roots.clamp(1, g.size))),
                    "frame" => Ok(gen.frame_of_size(g.size)),
                    other => Err(ApiError::bad(format!("unknown generator kind `{other}`"))),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateRequest {
    pub logic: LogicId,
    pub rounds: usize,
    pub human_role: Player,
    pub left: StructureSource,
    pub right: StructureSource,
    #[serde(default)]
    pub left_elems: Vec<usize>,
    #[serde(default)]
    pub right_elems: Vec<usize>,
    #[serde(default)]
    pub left_sets: Vec<ElemSet>,
    #[serde(default)]
    pub right_sets: Vec<ElemSet>,
    /// Human moves replayed right after creation.
    #[serde(default)]
    pub human_moves: Vec<Move>,
}

impl CreateRequest {
    fn config(&self) -> Result<GameConfig, ApiError> {
        if self.rounds > MAX_ROUNDS {
            return Err(ApiError::unprocessable(format!(
                "at most {MAX_ROUNDS} rounds"
            )));
        }
        let (l, r) = (self.left.build()?, self.right.build()?);
        let cap = if self.logic.has_set_moves() {
            MAX_SET_GAME_SIZE
        } else {
            MAX_FO_SIZE
        };
        for (name, f) in [("left", &l), ("right", &r)] {
            if f.size() > cap {
                return Err(ApiError::unprocessable(format!(
                    "{} sessions allow frames of size at most {cap}; {name} has {}",
                    self.logic,
                    f.size()
                )));
            }
        }
        let l = ParamFrame::from(l)
            .with_elems(&self.left_elems)
            .with_sets(&self.left_sets);
        let r = ParamFrame::from(r)
            .with_elems(&self.right_elems)
            .with_sets(&self.right_sets);
        Ok(GameConfig::new(self.logic, self.rounds, l, r)?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Applied {
    pub player: Player,
    #[serde(rename = "move")]
    pub mv: Move,
}

pub struct Session {
    id: String,
    request: CreateRequest,
    state: GameState,
    transcript: Vec<Applied>,
    solver: Solver,
    predicted: Player,
}

impl Session {
    /// Builds the session, solves the initial position and replays the
    /// request's human moves.
    pub fn create(id: String, request: CreateRequest) -> Result<Session, ApiError> {
        let cfg = Arc::new(request.config()?);
        let state = GameState::new(cfg.clone());
        let mut solver = Solver::with_budget(cfg, SESSION_BUDGET);
        solver.set_time_limit(Some(PRECOMPUTE_LIMIT));
        let predicted = solver.value(&state)?;
        // Once the root is solved, later moves are mostly memo lookups.
        solver.set_time_limit(None);
        let replay = request.human_moves.clone();
        let mut s = Session {
            id,
            request: CreateRequest {
                human_moves: Vec::new(),
                ..request
            },
            state,
            transcript: Vec::new(),
            solver,
            predicted,
        };
        s.advance()?;
        for (k, m) in replay.into_iter().enumerate() {
            s.human_move(m).map_err(|mut e| {
                e.message = format!("human_moves[{k}]: {}", e.message);
                e
            })?;
        }
        Ok(s)
    }

    fn human(&self) -> Player {
        self.request.human_role
    }

    /// Engine moves until the human is to move or the game is decided.
    fn advance(&mut self) -> Result<(), ApiError> {
        while self.state.outcome().is_none() && self.state.mover() != self.human() {
            let m = self.solver.optimal_move(&self.state)?;
            self.state = self.state.apply_move(&m)?;
            self.transcript.push(Applied {
                player: self.human().other(),
                mv: m,
            });
        }
        Ok(())
    }

    fn ensure_human_turn(&self) -> Result<(), ApiError> {
        if let Some(w) = self.state.outcome() {
            return Err(ApiError::conflict(format!("the game is over; {w} won")));
        }
        if self.state.mover() != self.human() {
            return Err(ApiError::conflict("it is not the human's turn"));
        }
        Ok(())
    }

    pub fn human_move(&mut self, m: Move) -> Result<(), ApiError> {
        self.ensure_human_turn()?;
        self.state = self.state.apply_move(&m)?;
        self.transcript.push(Applied {
            player: self.human(),
            mv: m.clone(),
        });
        self.request.human_moves.push(m);
        self.advance()
    }

    pub fn hint(&mut self) -> Result<Value, ApiError> {
        self.ensure_human_turn()?;
        let m = self.solver.optimal_move(&self.state)?;
        let w = self.solver.value(&self.state)?;
        Ok(json!({ "move": m, "predicted_winner": w }))
    }

    pub fn summary(&self) -> Value {
        let verdict = match self.state.outcome() {
            None => json!({ "status": "ongoing" }),
            Some(w) => json!({ "status": "won", "winner": w }),
        };
        let human_to_move = self.state.outcome().is_none() && self.state.mover() == self.human();
        let legal: Vec<Move> = if human_to_move {
            self.state.legal_moves()
        } else {
            Vec::new()
        };
        json!({
            "id": self.id,
            "request": self.request,
            "human_role": self.human(),
            "predicted_winner": self.predicted,
            "state": self.state.to_json(),
            "state_hash": self.state.hash(),
            "to_move": self.state.mover(),
            "phase_text": self.state.phase.describe(),
            "legal_moves": legal,
            "transcript": self.transcript,
            "verdict": verdict,
        })
    }

    /// Enough to rebuild the session with [`Session::create`].
    pub fn snapshot(&self) -> Value {
        json!({ "id": self.id, "request": self.request })
    }
}

type Shared = Arc<Mutex<Session>>;

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<String, Shared>>>,
    snapshot_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new() -> Self {
        AppState::default()
    }

    /// Keeps one JSON file per session in `dir` and reloads those present.
    pub fn with_snapshots(dir: PathBuf) -> std::io::Result<Self> {
        std::fs::create_dir_all(&dir)?;
        let state = AppState {
            snapshot_dir: Some(dir.clone()),
            ..AppState::default()
        };
        for entry in std::fs::read_dir(&dir)? {
            let path = entry?.path();
            let restored = std::fs::read_to_string(&path)
                .ok()
                .and_then(|t| serde_json::from_str::<Value>(&t).ok())
                .and_then(|v| {
                    let id = v["id"].as_str()?.to_string();
                    let req: CreateRequest = serde_json::from_value(v["request"].clone()).ok()?;
                    Session::create(id, req).ok()
                });
            match restored {
                Some(s) => {
                    tracing::info!(id = %s.id, "restored session");
                    state.insert(s);
                }
                None => tracing::warn!(path = %path.display(), "skipping unreadable snapshot"),
            }
        }
        Ok(state)
    }

    fn insert(&self, s: Session) -> Shared {
        let id = s.id.clone();
        let shared = Arc::new(Mutex::new(s));
        self.sessions.write().unwrap().insert(id, shared.clone());
        shared
    }

    fn get(&self, id: &str) -> Result<Shared, ApiError> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id))
    }

    fn save(&self, s: &Session) {
        if let Some(dir) = &self.snapshot_dir {
            let path = dir.join(format!("{}.json", s.id));
            if let Err(e) = std::fs::write(&path, s.snapshot().to_string()) {
                tracing::warn!(error = %e, "snapshot failed");
            }
        }
    }
}

/// Runs solver work on the blocking pool.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad(format!("malformed request: {e}")))
}

async fn create_session(
    State(app): State<AppState>,
    body: axum::body::Bytes,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    let req: CreateRequest = parse_body(&body)?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = blocking(move || Session::create(id, req)).await?;
    tracing::info!(id = %session.id, logic = %session.request.logic, "created session");
    let summary = session.summary();
    app.save(&session);
    app.insert(session);
    Ok((StatusCode::CREATED, Json(summary)))
}

async fn get_session(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    let s = app.get(&id)?;
    let summary = s.lock().unwrap().summary();
    Ok(Json(summary))
}

#[derive(Deserialize)]
struct MoveBody {
    #[serde(rename = "move")]
    mv: String,
}

async fn post_move(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: axum::body::Bytes,
) -> Result<Json<Value>, ApiError> {
    let s = app.get(&id)?;
    let body: MoveBody = parse_body(&body)?;
    let m: Move = body.mv.parse()?;
    let app2 = app.clone();
    blocking(move || {
        let mut guard = s.lock().unwrap();
        guard.human_move(m)?;
        app2.save(&guard);
        Ok(Json(guard.summary()))
    })
    .await
}

async fn get_hint(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    let s = app.get(&id)?;
    blocking(move || Ok(Json(s.lock().unwrap().hint()?))).await
}

async fn delete_session(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> Result<StatusCode, ApiError> {
    app.sessions
        .write()
        .unwrap()
        .remove(&id)
        .ok_or_else(|| ApiError::not_found(&id))?;
    if let Some(dir) = &app.snapshot_dir {
        let _ = std::fs::remove_file(dir.join(format!("{id}.json")));
    }
    Ok(StatusCode::NO_CONTENT)
}

/// The routes, with CORS open to `ui_origin` or to any origin.
pub fn router(app: AppState, ui_origin: Option<&str>) -> Router {
    let origin = match ui_origin.and_then(|o| o.parse().ok()) {
        Some(o) => AllowOrigin::exact(o),
        None => AllowOrigin::any(),
    };
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods(Any)
        .allow_headers(Any);
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/moves", post(post_move))
        .route("/sessions/{id}/hint", get(get_hint))
        .layer(cors)
        .with_state(app)
}
