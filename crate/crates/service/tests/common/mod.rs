#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::extract::{Path as UrlPath, State};
use axum::http::{HeaderMap, Request, StatusCode};
use axum::routing::get;
use axum::Router;
use chartscribe_core::ingestion::{load_bundle, UreqTransport};
use chartscribe_core::model::ChartBundle;
use chartscribe_service::{router, AppState, ChartStore, ServiceConfig};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

pub const TOKEN: &str = "test-token";

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture_dirs() -> Vec<PathBuf> {
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(workspace_root().join("fixtures"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    dirs
}

pub fn fixture_bundles() -> Vec<ChartBundle> {
    fixture_dirs().iter().map(|d| load_bundle(d).unwrap()).collect()
}

pub fn validator(name: &str) -> jsonschema::Validator {
    let path = workspace_root().join("docs/schemas").join(name);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

/// Panics with every violation when `value` does not match the schema.
pub fn assert_schema(name: &str, value: &Value) {
    let v = validator(name);
    let errors: Vec<String> = v.iter_errors(value).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{name}: {errors:#?}\n{value:#}");
}

/// A service over a temporary store preloaded with the fixtures.
pub struct Harness {
    pub dir: tempfile::TempDir,
    pub state: AppState,
}

impl Harness {
    pub fn new(token: Option<&str>, remote_base: &str, preload: bool) -> Self {
        let dir = tempfile::tempdir().unwrap();
        if preload {
            for src in fixture_dirs() {
                let dst = dir.path().join(src.file_name().unwrap());
                std::fs::create_dir_all(&dst).unwrap();
                for f in std::fs::read_dir(&src).unwrap() {
                    let f = f.unwrap().path();
                    std::fs::copy(&f, dst.join(f.file_name().unwrap())).unwrap();
                }
            }
        }
        let (store, report) = ChartStore::open(dir.path()).unwrap();
        assert!(report.skipped.is_empty(), "{:?}", report.skipped);
        let config = ServiceConfig {
            store_dir: dir.path().to_path_buf(),
            api_token: token.map(str::to_string),
            remote_base: remote_base.to_string(),
            engine: Default::default(),
        };
        let state = AppState::new(store, config, Arc::new(UreqTransport));
        Harness { dir, state }
    }

    pub async fn call(&self, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, HeaderMap, Vec<u8>) {
        let mut req = Request::builder().method(method).uri(uri);
        let body = match body {
            Some(v) => {
                req = req.header("content-type", "application/json");
                Body::from(v.to_string())
            }
            None => Body::empty(),
        };
        let response = router(self.state.clone()).oneshot(req.body(body).unwrap()).await.unwrap();
        let status = response.status();
        let headers = response.headers().clone();
        let bytes = response.into_body().collect().await.unwrap().to_bytes().to_vec();
        (status, headers, bytes)
    }

    pub async fn json(&self, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let (status, _, bytes) = self.call(method, uri, body).await;
        let value = serde_json::from_slice(&bytes)
            .unwrap_or_else(|e| panic!("{uri}: {e}: {}", String::from_utf8_lossy(&bytes)));
        (status, value)
    }
}

type Token = State<Arc<String>>;

fn serve_file(token: &str, headers: &HeaderMap, id: &str, file: &str) -> Result<String, StatusCode> {
    let auth = headers.get("authorization").and_then(|v| v.to_str().ok());
    if auth != Some(format!("Bearer {token}").as_str()) {
        return Err(StatusCode::UNAUTHORIZED);
    }
    let dir = workspace_root().join("fixtures").join(id);
    std::fs::read_to_string(dir.join(file)).map_err(|_| StatusCode::NOT_FOUND)
}

async fn remote_metadata(State(t): Token, h: HeaderMap, UrlPath(id): UrlPath<String>) -> Result<String, StatusCode> {
    serve_file(&t, &h, &id, "metadata.json")
}

async fn remote_data(State(t): Token, h: HeaderMap, UrlPath(id): UrlPath<String>) -> Result<String, StatusCode> {
    serve_file(&t, &h, &id, "data.csv")
}

async fn remote_svg(State(t): Token, h: HeaderMap, UrlPath(id): UrlPath<String>) -> Result<String, StatusCode> {
    serve_file(&t, &h, &id, "chart.svg")
}

/// Serves the fixture files in the remote chart API layout on a free port.
/// Returns the base URL.
pub async fn spawn_remote(token: &str) -> String {
    let app = Router::new()
        .route("/charts/{id}", get(remote_metadata))
        .route("/charts/{id}/data", get(remote_data))
        .route("/charts/{id}/export/svg", get(remote_svg))
        .with_state(Arc::new(token.to_string()));
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    format!("http://{addr}")
}
