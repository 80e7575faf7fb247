use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use http_body_util::BodyExt;
use nashroyalty_service::{router, ServiceConfig};
use serde_json::{json, Value};
use tower::ServiceExt;

async fn send(req: Request<Body>) -> (StatusCode, Option<String>, Vec<u8>) {
    let res = router(ServiceConfig::default()).oneshot(req).await.unwrap();
    let status = res.status();
    let ctype = res
        .headers()
        .get(header::CONTENT_TYPE)
        .map(|v| v.to_str().unwrap().to_string());
    let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, ctype, body)
}

async fn post(path: &str, body: &str) -> (StatusCode, Value) {
    let req = Request::post(path)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let (status, _, bytes) = send(req).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

async fn get(path: &str) -> (StatusCode, Option<String>, Vec<u8>) {
    send(Request::get(path).body(Body::empty()).unwrap()).await
}

#[tokio::test]
async fn solve_returns_full_precision_share() {
    let (status, body) = post("/api/solve", r#"{"d1":0.2,"d2":0.3,"alpha":0.4}"#).await;
    assert_eq!(status, StatusCode::OK);
    assert!((body["royalty_share"].as_f64().unwrap() - 0.4).abs() <= 1e-12);
    assert_eq!(body["surplus_share"].as_f64().unwrap(), 0.5);
}

#[tokio::test]
async fn solve_with_margin_reports_rate() {
    let (status, body) = post(
        "/api/solve",
        r#"{"d1":0.2,"d2":0.3,"alpha":0.4,"operating_margin":0.25}"#,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert!((body["royalty_rate"].as_f64().unwrap() - 0.1).abs() <= 1e-12);
}

#[tokio::test]
async fn infeasible_point_is_a_client_error() {
    let (status, body) = post("/api/solve", r#"{"d1":0.6,"d2":0.5,"alpha":0.4}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "no_deal");
}

#[tokio::test]
async fn malformed_json_is_a_client_error() {
    let (status, body) = post("/api/solve", "{not json").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "invalid_request");
}

#[tokio::test]
async fn unknown_model_is_reported() {
    let (status, body) = post("/api/solve", r#"{"d1":0.2,"d2":0.3,"model":{"kind":"case9"}}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "unknown_model");
}

#[tokio::test]
async fn strict_case2_origin_is_rejected() {
    let (status, body) = post("/api/alpha", r#"{"d1":0,"d2":0,"model":{"kind":"case2"},"strict":true}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "degenerate_origin");
    let (status, body) = post("/api/alpha", r#"{"d1":0,"d2":0,"model":{"kind":"case2"}}"#).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["alpha"].as_f64().unwrap(), 0.5);
}

#[tokio::test]
async fn scan_reports_violations_for_the_demo_model() {
    let (status, body) = post("/api/scan", r#"{"model":{"kind":"violating-demo"},"grid_step":0.05}"#).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["pass"], false);
    assert!(!body["violations"].as_array().unwrap().is_empty());

    let (status, body) = post("/api/scan", r#"{"model":{"kind":"case1"},"grid_step":0.05}"#).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["pass"], true);
}

#[tokio::test]
async fn oversized_scan_is_refused() {
    let (status, body) = post(
        "/api/scan",
        r#"{"model":{"kind":"case1"},"grid_step":0.0001,"fd_step":0.00001}"#,
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "grid_too_large");
}

#[tokio::test]
async fn family_returns_one_curve_per_level() {
    let (status, body) = post(
        "/api/family",
        r#"{"model":{"kind":"constant","alpha":0.5},"levels":[0,0.2,0.4],"d1_step":0.1}"#,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["curves"].as_array().unwrap().len(), 3);
}

#[tokio::test]
async fn nomograph_is_svg_and_deterministic() {
    let path = "/api/nomograph.svg?alpha=0.4&d1=0.2&d2=0.3";
    let (status, ctype, first) = get(path).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ctype.as_deref(), Some("image/svg+xml"));
    let text = String::from_utf8(first.clone()).unwrap();
    assert!(text.starts_with("<svg") || text.starts_with("<?xml"));
    assert!(text.contains("r/O_M = 0.40"));
    let (_, _, second) = get(path).await;
    assert_eq!(first, second);

    let (status, _, plain) = get("/api/nomograph.svg").await;
    assert_eq!(status, StatusCode::OK);
    assert!(!String::from_utf8(plain).unwrap().contains("isopleth"));
}

#[tokio::test]
async fn nomograph_rejects_partial_or_bad_query() {
    let (status, _, body) = get("/api/nomograph.svg?alpha=0.4&d1=0.2").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let body: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(body["code"], "invalid_input");

    let (status, _, _) = get("/api/nomograph.svg?alpha=abc").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn catalog_and_health() {
    let (status, _, body) = get("/api/models").await;
    assert_eq!(status, StatusCode::OK);
    let body: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(body["models"].as_array().unwrap().len(), 7);

    let (status, _, body) = get("/api/health").await;
    assert_eq!(status, StatusCode::OK);
    let body: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(body, json!({"status": "ok", "version": env!("CARGO_PKG_VERSION")}));
}

#[tokio::test]
async fn unknown_route_is_json_404() {
    let (status, _, body) = get("/api/nope").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let body: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(body["code"], "not_found");
}
