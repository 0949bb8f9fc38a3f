use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tower::ServiceExt;

use treelogic::games::{GameConfig, GameState, Move, Player};
use treelogic::structure::{frame_to_json, parse_structure, tree_from_parents, Frame};
use treelogic::{LogicId, Vocabulary};
use treelogic_service::{router, AppState};

fn app() -> Router {
    router(AppState::new(), None)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(match body {
            Some(b) => Body::from(b.to_string()),
            None => Body::empty(),
        })
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, v)
}

fn chain(n: usize) -> Frame {
    let parents: Vec<Option<usize>> = (0..n).map(|i| i.checked_sub(1)).collect();
    tree_from_parents(&Vocabulary::tree(0), &parents, &vec![vec![]; n]).unwrap()
}

/// Root with a chain of two below and a leaf to its right: no automorphisms.
fn lopsided() -> Value {
    json!({"tree": {"children": [{"children": [{}]}, {}]}})
}

fn body(logic: &str, rounds: usize, human: &str, left: Value, right: Value) -> Value {
    json!({"logic": logic, "rounds": rounds, "human_role": human, "left": left, "right": right})
}

async fn create(app: &Router, b: Value) -> Value {
    let (st, v) = call(app, "POST", "/sessions", Some(b)).await;
    assert_eq!(st, StatusCode::CREATED, "{v}");
    v
}

fn id(v: &Value) -> String {
    v["id"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn isomorphic_trees_predict_duplicator() {
    let app = app();
    let s = create(&app, body("mso", 2, "spoiler", lopsided(), lopsided())).await;
    assert_eq!(s["predicted_winner"], "duplicator");
    assert_eq!(s["verdict"]["status"], "ongoing");
    assert_eq!(s["to_move"], "spoiler");
    assert!(!s["legal_moves"].as_array().unwrap().is_empty());
    let (st, hint) = call(&app, "GET", &format!("/sessions/{}/hint", id(&s)), None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(hint["predicted_winner"], "duplicator");
}

#[tokio::test]
async fn zero_rounds_decide_at_once() {
    let app = app();
    let c2 = frame_to_json(&chain(2));
    let s = create(&app, body("fo", 0, "spoiler", c2.clone(), c2.clone())).await;
    assert_eq!(
        s["verdict"],
        json!({"status": "won", "winner": "duplicator"})
    );
    assert_eq!(s["legal_moves"], json!([]));
    let mut b = body("fo", 0, "spoiler", c2.clone(), c2);
    b["left_elems"] = json!([0, 1]);
    b["right_elems"] = json!([1, 0]);
    let s = create(&app, b).await;
    assert_eq!(s["verdict"]["winner"], "spoiler");
}

#[tokio::test]
async fn caps_and_malformed_requests() {
    let app = app();
    let c9 = frame_to_json(&chain(9));
    let (st, v) = call(
        &app,
        "POST",
        "/sessions",
        Some(body("mso", 1, "spoiler", c9.clone(), c9.clone())),
    )
    .await;
    assert_eq!(st, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
    assert!(v["error"].as_str().unwrap().contains('8'));
    // FO allows larger frames.
    create(&app, body("fo", 1, "spoiler", c9.clone(), c9.clone())).await;
    let (st, _) = call(
        &app,
        "POST",
        "/sessions",
        Some(body("fo", 99, "spoiler", c9.clone(), c9)),
    )
    .await;
    assert_eq!(st, StatusCode::UNPROCESSABLE_ENTITY);

    let req = Request::builder()
        .method("POST")
        .uri("/sessions")
        .body(Body::from("{not json"))
        .unwrap();
    assert_eq!(
        app.clone().oneshot(req).await.unwrap().status(),
        StatusCode::BAD_REQUEST
    );
    let (st, _) = call(&app, "POST", "/sessions", Some(json!({"logic": "fo"}))).await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
    let (st, _) = call(
        &app,
        "POST",
        "/sessions",
        Some(body("fo", 1, "spoiler", json!({"n": 0}), lopsided())),
    )
    .await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
    let mut b = body("fo", 1, "spoiler", lopsided(), lopsided());
    b["left_elems"] = json!([0]);
    let (st, _) = call(&app, "POST", "/sessions", Some(b)).await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn illegal_tc_set_is_rejected_with_the_rule() {
    let app = app();
    let c3 = frame_to_json(&chain(3));
    let mut b = body("fotc1", 1, "spoiler", c3.clone(), c3);
    b["left_elems"] = json!([0, 1]);
    b["right_elems"] = json!([0, 1]);
    let s = create(&app, b).await;
    let uri = format!("/sessions/{}/moves", id(&s));
    let (st, v) = call(
        &app,
        "POST",
        &uri,
        Some(json!({"move": "tc L i=0 j=1 {1}"})),
    )
    .await;
    assert_eq!(st, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["rule"], "a_i ∈ A and a_j ∉ A");
    // The state is untouched.
    let (_, after) = call(&app, "GET", &format!("/sessions/{}", id(&s)), None).await;
    assert_eq!(after["state_hash"], s["state_hash"]);
    let (st, v) = call(
        &app,
        "POST",
        &uri,
        Some(json!({"move": "tc L i=0 j=1 {0}"})),
    )
    .await;
    assert_eq!(st, StatusCode::OK, "{v}");
}

#[tokio::test]
async fn a_point_pick_adds_one_pebble_pair() {
    let app = app();
    let s = create(
        &app,
        body("fo", 2, "spoiler", lopsided(), frame_to_json(&chain(4))),
    )
    .await;
    let (st, v) = call(
        &app,
        "POST",
        &format!("/sessions/{}/moves", id(&s)),
        Some(json!({"move": "pt L 2"})),
    )
    .await;
    assert_eq!(st, StatusCode::OK, "{v}");
    let pebbles = v["state"]["elem_pebbles"].as_array().unwrap();
    assert_eq!(pebbles.len(), 1);
    assert_eq!(pebbles[0][0], 2);
    let t = v["transcript"].as_array().unwrap();
    assert_eq!(t[0], json!({"player": "spoiler", "move": "pt L 2"}));
    assert_eq!(t[1]["player"], "duplicator");
    assert_eq!(v["state"]["rounds_left"], 1);
}

#[tokio::test]
async fn wrong_turn_finished_game_and_bad_moves() {
    let app = app();
    let c2 = frame_to_json(&chain(2));
    let s = create(&app, body("fo", 1, "spoiler", c2.clone(), c2)).await;
    let uri = format!("/sessions/{}/moves", id(&s));
    let (st, _) = call(&app, "POST", &uri, Some(json!({"move": "pt Q 0"}))).await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
    let (st, _) = call(&app, "POST", &uri, Some(json!({"mv": "pt L 0"}))).await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
    let (st, v) = call(&app, "POST", &uri, Some(json!({"move": "pt L 0"}))).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(v["verdict"]["winner"], "duplicator");
    let (st, _) = call(&app, "POST", &uri, Some(json!({"move": "pt L 1"}))).await;
    assert_eq!(st, StatusCode::CONFLICT);
    let (st, _) = call(&app, "GET", &format!("/sessions/{}/hint", id(&s)), None).await;
    assert_eq!(st, StatusCode::CONFLICT);
}

#[tokio::test]
async fn unknown_sessions_are_404_and_delete_works() {
    let app = app();
    for (m, uri) in [
        ("GET", "/sessions/nope"),
        ("GET", "/sessions/nope/hint"),
        ("DELETE", "/sessions/nope"),
    ] {
        assert_eq!(
            call(&app, m, uri, None).await.0,
            StatusCode::NOT_FOUND,
            "{m} {uri}"
        );
    }
    let (st, _) = call(
        &app,
        "POST",
        "/sessions/nope/moves",
        Some(json!({"move": "pt L 0"})),
    )
    .await;
    assert_eq!(st, StatusCode::NOT_FOUND);
    let s = create(&app, body("fo", 1, "spoiler", lopsided(), lopsided())).await;
    let uri = format!("/sessions/{}", id(&s));
    assert_eq!(
        call(&app, "DELETE", &uri, None).await.0,
        StatusCode::NO_CONTENT
    );
    assert_eq!(call(&app, "GET", &uri, None).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn duplicator_hint_mirrors_on_isomorphic_frames() {
    let app = app();
    for logic in ["fo", "mso"] {
        let s = create(&app, body(logic, 2, "duplicator", lopsided(), lopsided())).await;
        let opening = s["transcript"][0]["move"].as_str().unwrap().to_string();
        let (_, hint) = call(&app, "GET", &format!("/sessions/{}/hint", id(&s)), None).await;
        assert_eq!(hint["predicted_winner"], "duplicator");
        let hinted = hint["move"].as_str().unwrap();
        // The only automorphism is the identity, so the mirror copies the pick.
        let e = opening
            .strip_prefix("pt L ")
            .expect("the least move is a left point pick");
        let mirror = format!("pt R {e}");
        assert_eq!(hinted, mirror, "{logic}: engine opened with {opening}");
    }
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> Value {
    let parents: Vec<Option<usize>> = (0..n)
        .map(|i| {
            if i == 0 {
                None
            } else {
                Some(rng.gen_range(0..i))
            }
        })
        .collect();
    let labels: Vec<Vec<String>> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.4) {
                vec!["P1".to_string()]
            } else {
                vec![]
            }
        })
        .collect();
    frame_to_json(&tree_from_parents(&Vocabulary::tree(1), &parents, &labels).unwrap())
}

/// Following hints keeps the predicted winner, and that side wins.
#[tokio::test]
async fn prediction_is_stable_along_optimal_play() {
    let app = app();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..16 {
        let logic = ["fo", "mso", "fotc1", "folfp1"][k % 4];
        let human = if k % 8 < 4 { "spoiler" } else { "duplicator" };
        let (a, b) = (rng.gen_range(2..5), rng.gen_range(2..5));
        let mut req = body(
            logic,
            2,
            human,
            random_tree(&mut rng, a),
            random_tree(&mut rng, b),
        );
        if logic == "fotc1" {
            req["left_elems"] = json!([0, a - 1]);
            req["right_elems"] = json!([0, b - 1]);
        }
        let mut s = create(&app, req).await;
        let predicted = s["predicted_winner"].clone();
        while s["verdict"]["status"] == "ongoing" {
            let (_, hint) = call(&app, "GET", &format!("/sessions/{}/hint", id(&s)), None).await;
            assert_eq!(hint["predicted_winner"], predicted, "session {k}");
            let (st, next) = call(
                &app,
                "POST",
                &format!("/sessions/{}/moves", id(&s)),
                Some(json!({"move": hint["move"]})),
            )
            .await;
            assert_eq!(st, StatusCode::OK, "{next}");
            s = next;
        }
        assert_eq!(s["verdict"]["winner"], predicted, "session {k}");
    }
}

fn config_of(summary: &Value) -> GameConfig {
    let c = &summary["state"]["config"];
    let side = |k: &str| {
        let f = parse_structure(&c[k]["frame"].to_string(), None).unwrap();
        let elems: Vec<usize> = serde_json::from_value(c[k]["elems"].clone()).unwrap();
        treelogic::games::ParamFrame::from(f).with_elems(&elems)
    };
    let logic: LogicId = serde_json::from_value(c["logic"].clone()).unwrap();
    GameConfig::new(
        logic,
        c["rounds"].as_u64().unwrap() as usize,
        side("left"),
        side("right"),
    )
    .unwrap()
}

/// Random human play: every accepted move and every engine move is legal,
/// illegal attempts get 422, and replaying the human moves rebuilds the
/// same session.
#[tokio::test]
async fn transcripts_replay_and_illegal_moves_are_refused() {
    let app = app();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 0..12 {
        let logic = ["fo", "mso", "fotc1", "folfp1"][k % 4];
        let human = if k % 2 == 0 { "spoiler" } else { "duplicator" };
        let (a, b) = (rng.gen_range(2..5), rng.gen_range(2..5));
        let mut req = body(
            logic,
            2,
            human,
            random_tree(&mut rng, a),
            random_tree(&mut rng, b),
        );
        if logic == "fotc1" {
            req["left_elems"] = json!([0, a - 1]);
            req["right_elems"] = json!([0, b - 1]);
        }
        let mut s = create(&app, req.clone()).await;
        let sid = id(&s);
        let cfg = Arc::new(config_of(&s));
        while s["verdict"]["status"] == "ongoing" {
            // Catch the library state up with the transcript so far.
            let t = s["transcript"].as_array().unwrap().clone();
            let mut library = GameState::new(cfg.clone());
            for entry in &t {
                let m: Move = entry["move"].as_str().unwrap().parse().unwrap();
                library = library.apply_move(&m).expect("transcript moves are legal");
            }
            assert_eq!(s["state_hash"], library.hash());
            let legal: Vec<Value> = s["legal_moves"].as_array().unwrap().clone();
            let want: Vec<String> = library
                .legal_moves()
                .iter()
                .map(|m| m.to_string())
                .collect();
            assert_eq!(
                legal
                    .iter()
                    .map(|v| v.as_str().unwrap().to_string())
                    .collect::<Vec<_>>(),
                want
            );
            // A random point move, legal or not.
            let side = if rng.gen_bool(0.5) { "L" } else { "R" };
            let guess = format!("pt {side} {}", rng.gen_range(0..5));
            let legal_guess = library.check_move(&guess.parse().unwrap()).is_ok();
            let (st, _) = call(
                &app,
                "POST",
                &format!("/sessions/{sid}/moves"),
                Some(json!({"move": guess})),
            )
            .await;
            if legal_guess {
                assert_eq!(st, StatusCode::OK);
            } else {
                assert_eq!(st, StatusCode::UNPROCESSABLE_ENTITY, "{guess}");
                let pick = &legal[rng.gen_range(0..legal.len())];
                let (st, _) = call(
                    &app,
                    "POST",
                    &format!("/sessions/{sid}/moves"),
                    Some(json!({"move": pick})),
                )
                .await;
                assert_eq!(st, StatusCode::OK);
            }
            s = call(&app, "GET", &format!("/sessions/{sid}"), None).await.1;
        }
        let winner: Player = serde_json::from_value(s["verdict"]["winner"].clone()).unwrap();
        let mut replay = req;
        replay["human_moves"] = s["request"]["human_moves"].clone();
        let r = create(&app, replay).await;
        assert_eq!(r["state_hash"], s["state_hash"]);
        assert_eq!(r["transcript"], s["transcript"]);
        assert_eq!(r["verdict"]["winner"], json!(winner));
    }
}

#[tokio::test]
async fn generator_specs_are_echoed() {
    let app = app();
    let gen = json!({"generate": {"kind": "tree", "size": 5, "seed": 42}});
    let s = create(&app, body("fo", 1, "spoiler", gen.clone(), gen)).await;
    assert_eq!(s["request"]["left"]["generate"]["seed"], 42);
    assert_eq!(s["predicted_winner"], "duplicator");
    let (st, _) = call(
        &app,
        "POST",
        "/sessions",
        Some(body(
            "fo",
            1,
            "spoiler",
            json!({"generate": {"size": 0}}),
            lopsided(),
        )),
    )
    .await;
    assert_eq!(st, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn cors_headers_are_sent() {
    let app = router(AppState::new(), Some("http://localhost:5173"));
    let req = Request::builder()
        .method("OPTIONS")
        .uri("/sessions")
        .header("origin", "http://localhost:5173")
        .header("access-control-request-method", "POST")
        .body(Body::empty())
        .unwrap();
    let resp = app.oneshot(req).await.unwrap();
    assert_eq!(
        resp.headers().get("access-control-allow-origin").unwrap(),
        "http://localhost:5173"
    );
}

#[tokio::test]
async fn snapshots_restore_sessions() {
    let dir = tempfile::TempDir::new().unwrap();
    let app = router(
        AppState::with_snapshots(dir.path().to_path_buf()).unwrap(),
        None,
    );
    let s = create(
        &app,
        body("mso", 2, "spoiler", lopsided(), frame_to_json(&chain(4))),
    )
    .await;
    let (_, moved) = call(
        &app,
        "POST",
        &format!("/sessions/{}/moves", id(&s)),
        Some(json!({"move": "pt L 0"})),
    )
    .await;
    let restored = router(
        AppState::with_snapshots(dir.path().to_path_buf()).unwrap(),
        None,
    );
    let (st, again) = call(&restored, "GET", &format!("/sessions/{}", id(&s)), None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(again["state_hash"], moved["state_hash"]);
    assert_eq!(again["transcript"], moved["transcript"]);
    call(&restored, "DELETE", &format!("/sessions/{}", id(&s)), None).await;
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_sessions() {
    let app = app();
    let mut handles = Vec::new();
    for k in 0..8usize {
        let app = app.clone();
        handles.push(tokio::spawn(async move {
            let s = create(
                &app,
                body(
                    "mso",
                    2,
                    "spoiler",
                    frame_to_json(&chain(k % 4 + 1)),
                    frame_to_json(&chain(4)),
                ),
            )
            .await;
            let (st, _) = call(&app, "GET", &format!("/sessions/{}/hint", id(&s)), None).await;
            assert_eq!(st, StatusCode::OK);
            (k, s["predicted_winner"].clone())
        }));
    }
    for h in handles {
        let (k, w) = h.await.unwrap();
        let want = if k % 4 + 1 == 4 {
            "duplicator"
        } else {
            "spoiler"
        };
        assert_eq!(w, want, "chain {} vs chain 4", k % 4 + 1);
    }
}

#[tokio::test]
async fn expensive_sessions_are_refused_in_bounded_time() {
    let app = app();
    let empty = json!({"vocab": ["edge/2"], "n": 8, "rel": {}});
    let one = json!({"vocab": ["edge/2"], "n": 8, "rel": {"edge": [[0, 1]]}});
    let start = std::time::Instant::now();
    let (st, v) = call(
        &app,
        "POST",
        "/sessions",
        Some(body("mso", 6, "spoiler", empty, one)),
    )
    .await;
    assert_eq!(st, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
    assert!(
        start.elapsed() < std::time::Duration::from_secs(15),
        "{:?}",
        start.elapsed()
    );
}
