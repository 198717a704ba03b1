use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::http::{HeaderMap, StatusCode};
use axum::routing::post;
use axum::{Json, Router};
use qx::http_generator::HttpGenerator;
use qx::http_translator::HttpTranslator;
use qx_core::{translate, GenerationError, GenerationRequest, Generator, GeneratorConfig, Task};
use serde_json::{json, Value};

#[derive(Default)]
struct Fake {
    calls: AtomicUsize,
    bodies: Mutex<Vec<Value>>,
    auth: Mutex<Vec<String>>,
}

/// Serves a fake backend on an ephemeral port from a dedicated thread.
fn spawn(app: Router) -> String {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    listener.set_nonblocking(true).unwrap();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::from_std(listener).unwrap();
            axum::serve(listener, app).await.unwrap();
        });
    });
    format!("http://{addr}")
}

/// Fails with `failures` 503s before answering with two candidates.
fn flaky_generator(failures: usize, status_after: StatusCode) -> (Arc<Fake>, String) {
    let fake = Arc::new(Fake::default());
    let state = fake.clone();
    let app = Router::new().route(
        "/gen",
        post(move |headers: HeaderMap, Json(body): Json<Value>| {
            let state = state.clone();
            async move {
                let n = state.calls.fetch_add(1, Ordering::SeqCst);
                state.bodies.lock().unwrap().push(body);
                if let Some(v) = headers.get("authorization") {
                    state.auth.lock().unwrap().push(v.to_str().unwrap().to_string());
                }
                if n < failures {
                    (StatusCode::SERVICE_UNAVAILABLE, Json(json!({})))
                } else {
                    (status_after, Json(json!({ "candidates": ["solar panels", "rooftop power"] })))
                }
            }
        }),
    );
    let base = spawn(app);
    (fake, format!("{base}/gen"))
}

fn request<'a>(prompt: &'a str, config: &GeneratorConfig) -> GenerationRequest<'a> {
    GenerationRequest::new(Task::QueryByExample, prompt, "doc", config)
}

#[test]
fn generator_retries_server_errors_then_succeeds() {
    let (fake, url) = flaky_generator(2, StatusCode::OK);
    let config = GeneratorConfig { model_id: Some("tiny".into()), ..GeneratorConfig::http(&url) };
    let gen = HttpGenerator::new(url, Some("secret".into()))
        .with_model(config.model_id.clone())
        .with_retries(3, Duration::from_millis(1));
    let out = gen.generate(&request("Document: x\nQuery:", &config)).unwrap();
    assert_eq!(out, ["solar panels", "rooftop power"]);
    assert_eq!(fake.calls.load(Ordering::SeqCst), 3);
    let body = fake.bodies.lock().unwrap()[0].clone();
    assert_eq!(body["prompt"], "Document: x\nQuery:");
    assert_eq!(body["n"], 3);
    assert_eq!(body["model"], "tiny");
    assert!(fake.auth.lock().unwrap().iter().all(|a| a == "Bearer secret"));
}

#[test]
fn generator_gives_up_after_three_attempts() {
    let (fake, url) = flaky_generator(10, StatusCode::OK);
    let gen = HttpGenerator::new(url.clone(), None).with_retries(3, Duration::from_millis(1));
    let err = gen.generate(&request("p", &GeneratorConfig::http(url))).unwrap_err();
    assert!(matches!(err, GenerationError::Transport { attempts: 3, .. }), "{err:?}");
    assert_eq!(fake.calls.load(Ordering::SeqCst), 3);
}

#[test]
fn client_errors_are_not_retried() {
    let (fake, url) = flaky_generator(0, StatusCode::BAD_REQUEST);
    let gen = HttpGenerator::new(url.clone(), None).with_retries(3, Duration::from_millis(1));
    let err = gen.generate(&request("p", &GeneratorConfig::http(url))).unwrap_err();
    assert!(matches!(err, GenerationError::BadResponse(_)), "{err:?}");
    assert_eq!(fake.calls.load(Ordering::SeqCst), 1);
}

#[test]
fn translator_round_trip_and_length_mismatch() {
    let app = Router::new()
        .route(
            "/upper",
            post(|Json(body): Json<Value>| async move {
                let texts: Vec<String> =
                    body["texts"].as_array().unwrap().iter().map(|t| t.as_str().unwrap().to_uppercase()).collect();
                Json(json!({ "texts": texts }))
            }),
        )
        .route("/short", post(|| async { Json(json!({ "texts": ["only one"] })) }));
    let base = spawn(app);
    let texts = vec!["bat".to_string(), "ball".to_string()];

    let upper = HttpTranslator::new(format!("{base}/upper"));
    let out = translate(&upper, &texts, "deu", "eng");
    assert_eq!(out.texts, ["BAT", "BALL"]);
    assert!(out.fell_back.iter().all(|f| !f));
    assert_eq!(translate(&upper, &texts, "eng", "eng").texts, texts);

    let short = HttpTranslator::new(format!("{base}/short"));
    let out = translate(&short, &texts, "deu", "eng");
    assert_eq!(out.texts, texts);
    assert!(out.fell_back.iter().all(|f| *f));
}
