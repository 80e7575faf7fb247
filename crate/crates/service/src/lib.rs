//! Stateless HTTP facade over `nashroyalty-core`.
//!
//! Routes:
//!
//! | method | path                   | body / query                  |
//! |--------|------------------------|-------------------------------|
//! | POST   | `/api/solve`           | `SolveRequest`                |
//! | POST   | `/api/alpha`           | `AlphaRequest`                |
//! | POST   | `/api/scan`            | `ScanRequest`                 |
//! | POST   | `/api/family`          | `FamilyRequest`               |
//! | GET    | `/api/nomograph.svg`   | `?alpha=&d1=&d2=` (optional)  |
//! | GET    | `/api/models`          |                               |
//! | GET    | `/api/health`          |                               |
//!
//! Every predictable model failure is a 400 with `{"code", "message"}`.

use std::net::{IpAddr, Ipv4Addr, SocketAddr};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use nashroyalty_core::schema::{self, ErrorBody, MAX_SCAN_NODES};
use nashroyalty_core::Error;
use serde_json::json;

pub const DEFAULT_PORT: u16 = 8731;
/// Environment variable overriding the listening port.
pub const PORT_ENV: &str = "NASHROYALTY_PORT";

#[derive(Debug, Clone, Copy)]
pub struct ServiceConfig {
    pub max_scan_nodes: u64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            max_scan_nodes: MAX_SCAN_NODES,
        }
    }
}

/// Loopback address on `port`.
pub fn local_addr(port: u16) -> SocketAddr {
    SocketAddr::new(IpAddr::V4(Ipv4Addr::LOCALHOST), port)
}

pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn bad_request(code: &str, message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            body: ErrorBody {
                code: code.to_string(),
                message: message.into(),
            },
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            body: ErrorBody::from(&e),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::bad_request("invalid_request", e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::bad_request("invalid_request", e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

async fn solve(body: Result<Json<schema::SolveRequest>, JsonRejection>) -> ApiResult<schema::SolveResponse> {
    let Json(req) = body?;
    Ok(Json(schema::solve(&req)?))
}

async fn alpha(body: Result<Json<schema::AlphaRequest>, JsonRejection>) -> ApiResult<schema::AlphaResponse> {
    let Json(req) = body?;
    Ok(Json(schema::alpha(&req)?))
}

async fn scan(
    State(config): State<ServiceConfig>,
    body: Result<Json<schema::ScanRequest>, JsonRejection>,
) -> ApiResult<nashroyalty_core::ParetoReport> {
    let Json(req) = body?;
    // Scans are CPU bound; keep them off the async workers.
    let report = tokio::task::spawn_blocking(move || schema::scan(&req, config.max_scan_nodes))
        .await
        .map_err(|e| ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            body: ErrorBody {
                code: "internal".into(),
                message: e.to_string(),
            },
        })??;
    Ok(Json(report))
}

async fn family(body: Result<Json<schema::FamilyRequest>, JsonRejection>) -> ApiResult<schema::FamilyResponse> {
    let Json(req) = body?;
    Ok(Json(schema::family(&req)?))
}

async fn nomograph(
    query: Result<Query<schema::NomographRequest>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(req) = query?;
    let svg = schema::nomograph_svg(&req)?;
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response())
}

async fn models() -> Json<serde_json::Value> {
    Json(json!({ "models": schema::model_catalog() }))
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "version": env!("CARGO_PKG_VERSION") }))
}

async fn not_found() -> ApiError {
    ApiError {
        status: StatusCode::NOT_FOUND,
        body: ErrorBody {
            code: "not_found".into(),
            message: "unknown route".into(),
        },
    }
}

pub fn router(config: ServiceConfig) -> Router {
    Router::new()
        .route("/api/solve", post(solve))
        .route("/api/alpha", post(alpha))
        .route("/api/scan", post(scan))
        .route("/api/family", post(family))
        .route("/api/nomograph.svg", get(nomograph))
        .route("/api/models", get(models))
        .route("/api/health", get(health))
        .fallback(not_found)
        .with_state(config)
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(config)).await
}
