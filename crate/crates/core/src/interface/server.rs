//! HTTP front of the [`SessionService`]: JSON in, JSON out.
//!
//! | route | body | reply |
//! |---|---|---|
//! | `GET /state` | | [`SessionView`] |
//! | `POST /label` | [`LabelRequest`] | [`SessionView`] |
//! | `POST /reset` | partial [`ExperimentConfig`] | [`SessionView`] |
//! | `GET /surface?resolution=R` | | [`SurfaceRaster`] |
//!
//! Errors come back as `{"error": "..."}` with 409 for version conflicts,
//! 503 before the first reset and 400 otherwise.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use tokio::net::TcpListener;

use super::session::{LabelRequest, SessionService, SessionView};
use crate::engine::{ExperimentConfig, SurfaceRaster};
use crate::error::XglError;

pub struct ApiError(XglError);

impl From<XglError> for ApiError {
    fn from(e: XglError) -> Self {
        Self(e)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self(XglError::Parse(e.body_text()))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self.0 {
            XglError::VersionConflict { .. } => StatusCode::CONFLICT,
            XglError::Uninitialized => StatusCode::SERVICE_UNAVAILABLE,
            _ => StatusCode::BAD_REQUEST,
        };
        (status, Json(serde_json::json!({ "error": self.0.to_string() }))).into_response()
    }
}

type Shared = Arc<SessionService>;
type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Deserialize)]
struct SurfaceQuery {
    resolution: Option<usize>,
}

// Fitting and clustering are CPU-bound, so handlers hop to the blocking pool.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> crate::Result<T> + Send + 'static,
) -> ApiResult<T> {
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => Ok(Json(r?)),
        Err(e) => Err(XglError::Parse(format!("worker failed: {e}")).into()),
    }
}

async fn state(State(s): State<Shared>) -> ApiResult<SessionView> {
    blocking(move || s.state()).await
}

async fn label(State(s): State<Shared>, body: Result<Json<LabelRequest>, JsonRejection>) -> ApiResult<SessionView> {
    let Json(request) = body?;
    blocking(move || s.submit_label(&request)).await
}

async fn reset(State(s): State<Shared>, body: Result<Json<ExperimentConfig>, JsonRejection>) -> ApiResult<SessionView> {
    let Json(config) = body?;
    blocking(move || s.reset(&config)).await
}

async fn surface(State(s): State<Shared>, Query(q): Query<SurfaceQuery>) -> ApiResult<SurfaceRaster> {
    blocking(move || {
        let resolution = match q.resolution {
            Some(r) => r,
            None => s.state()?.config.raster_resolution,
        };
        s.surface(resolution)
    })
    .await
}

pub fn router(service: Shared) -> Router {
    Router::new()
        .route("/state", get(state))
        .route("/label", post(label))
        .route("/reset", post(reset))
        .route("/surface", get(surface))
        .with_state(service)
}

/// Serves `service` on `listener` until the process exits.
pub async fn serve(listener: TcpListener, service: Shared) -> std::io::Result<()> {
    axum::serve(listener, router(service)).await
}

/// Binds `addr` and serves on a background runtime thread; returns the bound
/// address (useful with port 0).
pub fn spawn(addr: SocketAddr, service: Shared) -> std::io::Result<SocketAddr> {
    let std_listener = std::net::TcpListener::bind(addr)?;
    std_listener.set_nonblocking(true)?;
    let local = std_listener.local_addr()?;
    std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread()
            .enable_all()
            .build()
            .expect("tokio runtime");
        rt.block_on(async move {
            let listener = TcpListener::from_std(std_listener).expect("listener");
            let _ = serve(listener, service).await;
        });
    });
    Ok(local)
}
