//! HTTP API over a labeled arrangement: filtered region lists, point
//! lookups and session metadata.

pub mod params;
pub mod session;

use std::sync::{Arc, RwLock};

use axum::extract::{RawQuery, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use rnnheat_core::export::Filter;
use rnnheat_core::geometry::Point;
use tower_http::cors::{AllowOrigin, CorsLayer};

pub use params::{parse_heatmap_query, parse_region_query, ParamError};
pub use session::{RegionInfo, Session, SessionError, SessionMeta};

/// Shared state: the current session, replaced atomically.
#[derive(Clone, Default)]
pub struct AppState {
    session: Arc<RwLock<Option<Arc<Session>>>>,
}

impl AppState {
    pub fn new(session: Option<Session>) -> Self {
        AppState {
            session: Arc::new(RwLock::new(session.map(Arc::new))),
        }
    }

    pub fn replace(&self, session: Session) {
        *self.session.write().expect("lock not poisoned") = Some(Arc::new(session));
    }

    fn current(&self) -> Option<Arc<Session>> {
        self.session.read().expect("lock not poisoned").clone()
    }
}

/// Origins allowed to call the API from a browser.
#[derive(Debug, Clone, Default)]
pub enum Cors {
    #[default]
    Any,
    Origin(HeaderValue),
}

fn json(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error(status: StatusCode, msg: impl std::fmt::Display) -> Response {
    json(status, serde_json::json!({ "error": msg.to_string() }).to_string())
}

fn session_error(e: SessionError) -> Response {
    match e {
        SessionError::Unavailable(_) => error(StatusCode::CONFLICT, e),
        SessionError::Influence(_) | SessionError::Build(_) => error(StatusCode::INTERNAL_SERVER_ERROR, e),
    }
}

fn no_session() -> Response {
    error(StatusCode::SERVICE_UNAVAILABLE, "no session loaded")
}

async fn heatmap(State(st): State<AppState>, RawQuery(q): RawQuery) -> Response {
    let Some(s) = st.current() else { return no_session() };
    let q = match parse_heatmap_query(q.as_deref()) {
        Ok(q) => q,
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    let filter = Filter {
        threshold: q.threshold,
        top_k: q.top_k,
    };
    match s.heatmap(q.measure, filter) {
        Ok(doc) => json(StatusCode::OK, doc.to_json()),
        Err(e) => session_error(e),
    }
}

async fn region(State(st): State<AppState>, RawQuery(q): RawQuery) -> Response {
    let Some(s) = st.current() else { return no_session() };
    let q = match parse_region_query(q.as_deref()) {
        Ok(q) => q,
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    match s.region(Point::new(q.x, q.y), q.measure) {
        Ok(info) => json(StatusCode::OK, serde_json::to_string(&info).expect("plain data")),
        Err(e) => session_error(e),
    }
}

async fn meta(State(st): State<AppState>) -> Response {
    let Some(s) = st.current() else { return no_session() };
    json(StatusCode::OK, serde_json::to_string(s.meta()).expect("plain data"))
}

pub fn router(state: AppState, cors: Cors) -> Router {
    let origin = match cors {
        Cors::Any => AllowOrigin::any(),
        Cors::Origin(o) => AllowOrigin::exact(o),
    };
    let cors = CorsLayer::new().allow_origin(origin).allow_methods([Method::GET]);
    Router::new()
        .route("/heatmap", get(heatmap))
        .route("/region", get(region))
        .route("/meta", get(meta))
        .layer(cors)
        .with_state(state)
}

/// Serves until the listener fails.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState, cors: Cors) -> std::io::Result<()> {
    axum::serve(listener, router(state, cors)).await
}
