use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use stance_corpus::corpus::{save_corpus, ColumnSchema, Corpus, LabeledTweet, Tweet};
use stance_corpus::lda::{self, LdaConfig};
use stance_corpus::synthetic::{planted_topics, PlantedTopicsConfig};
use stance_corpus_service::{router, AppState, ErrorBody, StateConfig};
use tower::ServiceExt;

fn write_tweets(dir: &Path, file: &str, tweets: Vec<Tweet>) {
    let corpus = Corpus::new("t", "es", tweets.into_iter().map(LabeledTweet::unlabeled).collect()).unwrap();
    fs::create_dir_all(dir.join(file).parent().unwrap()).unwrap();
    save_corpus(&corpus, dir.join(file), &ColumnSchema::canonical()).unwrap();
}

fn tweet(id: impl Into<String>, author: &str, text: &str, rt: Option<&str>) -> Tweet {
    let mut t = Tweet::new(id, author, "es", text);
    t.retweet_of_author = rt.map(str::to_string);
    t
}

/// Three accounts: `hub` (4 tweets, retweeted 10 times by 10 fans), `b` (2), `c` (1),
/// plus the ten fans that only retweet.
fn social_workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let mut tweets = vec![
        tweet("h1", "hub", "votad el #1oct en cada colegio", None),
        tweet("h2", "hub", "el #Tabarnia no existe amigos", None),
        tweet("h3", "hub", "hoy #TABARNIA es tendencia otra vez", None),
        tweet("h4", "hub", "buenos días a todo el mundo", None),
        tweet("b1", "b", "la #tabarnia de siempre con sus cosas", None),
        tweet("b2", "b", "mañana será otro día largo", None),
        tweet("c1", "c", "el #1oct ha sido histórico hoy", None),
    ];
    for i in 0..10 {
        tweets.push(tweet(format!("r{i}"), &format!("fan{i}"), "RT @hub: votad el #1oct en cada colegio", Some("hub")));
    }
    write_tweets(dir.path(), "ingest/tweets.tsv", tweets);
    dir
}

fn app(dir: &Path) -> Router {
    router(AppState::open(StateConfig::new(dir)).unwrap(), None)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or(Value::String(String::from_utf8_lossy(&bytes).into_owned()))
    };
    (status, value)
}

fn error_code(v: &Value) -> String {
    serde_json::from_value::<ErrorBody>(v.clone()).unwrap().code
}

#[tokio::test]
async fn uninitialized_workspace_is_409_until_ingest() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let (status, body) = call(&app, "GET", "/api/users?limit=5", None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(error_code(&body), "not_initialized");

    write_tweets(dir.path(), "ingest/tweets.tsv", vec![tweet("1", "a", "uno dos tres", None)]);
    let (status, body) = call(&app, "GET", "/api/state", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["users"], 1);
}

#[tokio::test]
async fn user_queue_paging() {
    let dir = social_workspace();
    let app = app(dir.path());
    let (status, body) = call(&app, "GET", "/api/users?limit=1", None).await;
    assert_eq!(status, StatusCode::OK);
    let users = body.as_array().unwrap();
    assert_eq!(users.len(), 1);
    assert_eq!(users[0]["author_id"], "hub");
    assert_eq!(users[0]["sample"].as_array().unwrap().len(), 4);
    assert_eq!(users[0]["stats"]["retweeters"], 10);

    let (_, body) = call(&app, "GET", "/api/users?limit=3&offset=1", None).await;
    let ids: Vec<&str> = body.as_array().unwrap().iter().map(|u| u["author_id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["b", "c", "fan0"]);
    assert_eq!(call(&app, "GET", "/api/users?offset=100", None).await.1, json!([]));
    assert_eq!(call(&app, "GET", "/api/users?limit=0", None).await.1, json!([]));
    let (status, body) = call(&app, "GET", "/api/users?limit=-1", None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(error_code(&body), "invalid_request");
}

#[tokio::test]
async fn labeling_bumps_version_and_previews_propagation() {
    let dir = social_workspace();
    let app = app(dir.path());
    let (status, body) = call(&app, "POST", "/api/users/hub/label", Some(json!({"label": "FAVOR"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!((body["author_id"].as_str(), body["label"].as_str(), body["version"].as_u64()), (Some("hub"), Some("FAVOR"), Some(1)));
    assert_eq!(body["propagation_delta"]["FAVOR"], 10);
    assert_eq!(body["propagation_preview"]["counts"]["FAVOR"], 10);
    assert_eq!(body["distribution"]["accounts"]["counts"]["FAVOR"], 11);

    let (_, body) = call(&app, "POST", "/api/users/hub/label", Some(json!({"label": "AGAINST"}))).await;
    assert_eq!(body["version"], 2);
    assert_eq!(body["propagation_delta"]["FAVOR"], -10);
    assert_eq!(body["propagation_delta"]["AGAINST"], 10);

    let (status, body) = call(&app, "POST", "/api/users/nobody/label", Some(json!({"label": "FAVOR"}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(error_code(&body), "unknown_author");

    let (status, body) = call(&app, "POST", "/api/users/hub/label", Some(json!({"label": "MAYBE"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["details"], json!(["MAYBE"]));
    let (status, _) = call(&app, "POST", "/api/users/hub/label", Some(json!({"stance": "FAVOR"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let (_, state) = call(&app, "GET", "/api/state", None).await;
    assert_eq!(state["version"], 2);
}

#[tokio::test]
async fn hashtag_selection_preview() {
    let dir = social_workspace();
    let app = app(dir.path());
    for (user, label) in [("hub", "FAVOR"), ("b", "AGAINST"), ("c", "NONE")] {
        call(&app, "POST", &format!("/api/users/{user}/label"), Some(json!({ "label": label }))).await;
    }
    let (_, body) = call(&app, "GET", "/api/hashtags?min_freq=2", None).await;
    let tags: Vec<(&str, u64)> = body["hashtags"]
        .as_array()
        .unwrap()
        .iter()
        .map(|h| (h["tag"].as_str().unwrap(), h["count"].as_u64().unwrap()))
        .collect();
    assert_eq!(tags, [("1oct", 12), ("tabarnia", 3)]);

    // Tweets carrying any casing of #tabarnia: two by hub (FAVOR), one by b (AGAINST).
    let (status, body) = call(&app, "POST", "/api/hashtags/selection", Some(json!({"accepted": ["tabarnia"]}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["preview"]["counts"], json!({"AGAINST": 1, "FAVOR": 2, "NONE": 0}));
    assert_eq!(body["lexicon"]["hashtags"], json!(["tabarnia"]));
    let v1 = body["version"].as_u64().unwrap();
    let (_, again) = call(&app, "POST", "/api/hashtags/selection", Some(json!({"accepted": ["#Tabarnia"]}))).await;
    assert_eq!(again["version"].as_u64().unwrap(), v1 + 1);
    assert_eq!(again["preview"], body["preview"]);

    let (_, empty) = call(&app, "POST", "/api/hashtags/selection", Some(json!({"accepted": []}))).await;
    assert_eq!(empty["preview"]["total"], 0);

    let (status, body) = call(&app, "POST", "/api/hashtags/selection", Some(json!({"accepted": ["1oct", "inventado"]}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["details"], json!(["inventado"]));
    let (_, hashtags) = call(&app, "GET", "/api/hashtags", None).await;
    assert!(hashtags["hashtags"].as_array().unwrap().iter().all(|h| h["accepted"] == false));
}

#[tokio::test]
async fn topics_without_model_conflict() {
    let dir = social_workspace();
    let app = app(dir.path());
    let (status, body) = call(&app, "GET", "/api/topics", None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(error_code(&body), "no_topic_model");
    let (status, _) = call(&app, "POST", "/api/topics/selection", Some(json!({"accepted": [0]}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

/// 200 planted two-topic documents; document `d` is written by `u{d % 4}`.
fn topic_workspace() -> (tempfile::TempDir, Vec<usize>, Vec<Vec<String>>) {
    let dir = tempfile::tempdir().unwrap();
    let planted = planted_topics(&PlantedTopicsConfig {
        seed: 3,
        ..Default::default()
    });
    let candidates: Vec<Tweet> = planted
        .documents
        .iter()
        .enumerate()
        .map(|(d, words)| tweet(format!("d{d:03}"), &format!("u{}", d % 4), &words.join(" "), None))
        .collect();
    let mut all = candidates.clone();
    for i in 0..3 {
        all.push(tweet(format!("tag{i}"), "u1", "el #1oct votamos todos", None));
    }
    write_tweets(dir.path(), "ingest/tweets.tsv", all);
    write_tweets(dir.path(), "lda/candidates.tsv", candidates);
    let model = lda::train_lda(
        &planted.documents,
        &LdaConfig {
            iterations: 200,
            burn_in: 50,
            seed: 5,
            ..LdaConfig::with_topics(2)
        },
    )
    .unwrap();
    model.save(dir.path().join("lda/model.json")).unwrap();
    (dir, planted.topic_of, planted.vocabularies)
}

#[tokio::test]
async fn planted_topic_preview() {
    let (dir, topic_of, vocabularies) = topic_workspace();
    let app = app(dir.path());
    for (user, label) in [("u0", "FAVOR"), ("u1", "AGAINST"), ("u2", "NONE")] {
        call(&app, "POST", &format!("/api/users/{user}/label"), Some(json!({ "label": label }))).await;
    }
    call(&app, "POST", "/api/hashtags/selection", Some(json!({"accepted": ["1oct"]}))).await;

    let (status, body) = call(&app, "GET", "/api/topics", None).await;
    assert_eq!(status, StatusCode::OK);
    let topics = body["topics"].as_array().unwrap();
    assert_eq!(topics[0]["top_words"].as_array().unwrap().len(), 15);
    // The curator's pick: the topic whose top words come from planted vocabulary 0.
    let vocab0: BTreeSet<&str> = vocabularies[0].iter().map(String::as_str).collect();
    let accepted = topics
        .iter()
        .find(|t| vocab0.contains(t["top_words"][0][0].as_str().unwrap()))
        .unwrap()["topic"]
        .as_u64()
        .unwrap();

    // Oracle: planted topic-0 documents split by their author's label (u3 is unlabeled).
    let mut expected = [0u64; 3];
    for (d, &t) in topic_of.iter().enumerate() {
        if t == 0 {
            match d % 4 {
                0 => expected[1] += 1,
                1 => expected[0] += 1,
                2 => expected[2] += 1,
                _ => {}
            }
        }
    }
    let (status, body) = call(&app, "POST", "/api/topics/selection", Some(json!({"accepted": [accepted], "min_share": 0.5}))).await;
    assert_eq!(status, StatusCode::OK);
    let got = [
        body["preview"]["counts"]["AGAINST"].as_u64().unwrap(),
        body["preview"]["counts"]["FAVOR"].as_u64().unwrap(),
        body["preview"]["counts"]["NONE"].as_u64().unwrap(),
    ];
    for (g, e) in got.iter().zip(expected) {
        assert!(g.abs_diff(e) <= 1, "preview {got:?} vs planted {expected:?}");
    }
    // Only AGAINST has on-topic tweets, so FAVOR and NONE are under-represented.
    assert_eq!(body["under_represented"], json!(["FAVOR", "NONE"]));
    assert_eq!(body["recoverable"]["counts"]["AGAINST"], 0);
    assert_eq!(body["recoverable"]["counts"]["FAVOR"].as_u64().unwrap(), got[1]);

    let (_, none) = call(&app, "POST", "/api/topics/selection", Some(json!({"accepted": []}))).await;
    assert_eq!(none["preview"]["total"], 0);
    let (status, body) = call(&app, "POST", "/api/topics/selection", Some(json!({"accepted": [7]}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["details"], json!(["7"]));

    let (_, dist) = call(&app, "GET", "/api/distribution", None).await;
    assert_eq!(dist["on_topic"]["counts"]["AGAINST"], 3);
    let (status, preview) = call(&app, "POST", "/api/assemble/preview", Some(json!({"target_total": 3}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(preview["selected"]["counts"], json!({"AGAINST": 3, "FAVOR": 0, "NONE": 0}));
}

#[tokio::test]
async fn concurrent_mutations_are_totally_ordered() {
    let dir = social_workspace();
    let app = app(dir.path());
    let mut handles = Vec::new();
    for i in 0..20 {
        let app = app.clone();
        handles.push(tokio::spawn(async move {
            let label = ["FAVOR", "AGAINST", "NONE"][i % 3];
            call(&app, "POST", &format!("/api/users/fan{}/label", i % 10), Some(json!({ "label": label }))).await
        }));
    }
    let mut versions = Vec::new();
    for h in handles {
        let (status, body) = h.await.unwrap();
        assert_eq!(status, StatusCode::OK);
        versions.push(body["version"].as_u64().unwrap());
    }
    versions.sort();
    assert_eq!(versions, (1..=20).collect::<Vec<_>>());
}

#[tokio::test]
async fn restart_restores_state() {
    let dir = social_workspace();
    let before = {
        let app = app(dir.path());
        call(&app, "POST", "/api/users/hub/label", Some(json!({"label": "FAVOR"}))).await;
        call(&app, "POST", "/api/users/c/label", Some(json!({"label": "NONE"}))).await;
        call(&app, "POST", "/api/hashtags/selection", Some(json!({"accepted": ["1oct"]}))).await;
        (call(&app, "GET", "/api/state", None).await.1, call(&app, "GET", "/api/distribution", None).await.1)
    };
    let app = app(dir.path());
    let after = (call(&app, "GET", "/api/state", None).await.1, call(&app, "GET", "/api/distribution", None).await.1);
    assert_eq!(before, after);
    assert_eq!(after.0["version"], 3);
}

#[tokio::test]
async fn get_is_side_effect_free() {
    let dir = social_workspace();
    let app = app(dir.path());
    for uri in ["/api/state", "/api/users", "/api/hashtags", "/api/distribution"] {
        call(&app, "GET", uri, None).await;
    }
    assert_eq!(call(&app, "GET", "/api/state", None).await.1["version"], 0);
    let log = dir.path().join("curation/events.jsonl");
    assert_eq!(fs::read_to_string(log).unwrap(), "");
}

#[tokio::test]
async fn serves_ui_and_unknown_routes() {
    let dir = social_workspace();
    let ui = tempfile::tempdir().unwrap();
    fs::write(ui.path().join("index.html"), "<html>curation</html>").unwrap();
    let app = router(AppState::open(StateConfig::new(dir.path())).unwrap(), Some(ui.path().to_path_buf()));
    let (status, body) = call(&app, "GET", "/ui/index.html", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, Value::String("<html>curation</html>".into()));
    let (status, body) = call(&app, "GET", "/api/nothing", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(error_code(&body), "not_found");
}
