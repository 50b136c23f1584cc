//! HTTP service for the editor.
//!
//! All bodies are JSON. Errors are `application/problem+json` documents
//! `{type, title, status, code, detail}` where `code` is one of the error
//! codes used across the crate. Bulletin responses carry the store revision as
//! an `ETag`; `PUT` and `DELETE` honour `If-Match`.
//!
//! The catalogue lives in an immutable [`Snapshot`] behind an `Arc`. Handlers
//! clone the `Arc` once per request, so a reload swaps the snapshot atomically
//! while in-flight requests finish on the old one.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use super::bulletin::{Bulletin, DangerDescription, Status};
use super::publish::{publish, PublishError};
use super::store::{check_description, copy_description, Store, StoreError};
use crate::catalogue::{parse_catalogue, validate_catalogue, CatalogueError};
use crate::ids::{LanguageTag, PhraseId};
use crate::render::{render_sentence, resolve_slots, validate_selection, Choice, RenderError, Selection};
use crate::report::ValidationReport;
use crate::search::{build_index, search, PhraseIndex};
use crate::Catalogue;

/// One immutable catalogue version with its search index.
#[derive(Debug)]
pub struct Snapshot {
    pub catalogue: Catalogue,
    pub index: PhraseIndex,
    pub hash: String,
}

impl Snapshot {
    pub fn new(catalogue: Catalogue) -> Self {
        let index = build_index(&catalogue);
        let hash = index.catalogue_hash().to_owned();
        Self { catalogue, index, hash }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("reading catalogue {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] CatalogueError),
    #[error("catalogue has errors:\n{0}")]
    Invalid(ValidationReport),
}

/// Read, parse and validate a catalogue file; any error finding rejects it.
pub fn load_snapshot(path: &Path) -> Result<Snapshot, LoadError> {
    let bytes = std::fs::read(path).map_err(|source| LoadError::Io {
        path: path.to_owned(),
        source,
    })?;
    let catalogue = parse_catalogue(&bytes)?;
    let report = validate_catalogue(&catalogue);
    if !report.is_ok() {
        return Err(LoadError::Invalid(report));
    }
    Ok(Snapshot::new(catalogue))
}

pub struct AppState {
    snapshot: RwLock<Arc<Snapshot>>,
    catalogue_path: PathBuf,
    store: Arc<Store>,
    out_dir: PathBuf,
}

impl AppState {
    pub fn new(snapshot: Snapshot, catalogue_path: PathBuf, store: Store, out_dir: PathBuf) -> Self {
        Self {
            snapshot: RwLock::new(Arc::new(snapshot)),
            catalogue_path,
            store: Arc::new(store),
            out_dir,
        }
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.snapshot.read().unwrap_or_else(|p| p.into_inner()).clone()
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    /// Re-read the catalogue file; the old snapshot stays if it is invalid.
    pub fn reload(&self) -> Result<Arc<Snapshot>, LoadError> {
        let fresh = Arc::new(load_snapshot(&self.catalogue_path)?);
        if let Err(e) = self.store.put_catalogue(&fresh.catalogue) {
            log::warn!("could not retain catalogue snapshot {}: {e}", fresh.hash);
        }
        *self.snapshot.write().unwrap_or_else(|p| p.into_inner()) = fresh.clone();
        log::info!("catalogue reloaded: {}", fresh.hash);
        Ok(fresh)
    }
}

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub catalogue: PathBuf,
    pub store: PathBuf,
    /// Where publish writes artifact directories.
    pub out_dir: PathBuf,
    pub addr: SocketAddr,
}

#[derive(Debug, Error)]
pub enum ServeError {
    #[error(transparent)]
    Catalogue(#[from] LoadError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("binding {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        #[source]
        source: std::io::Error,
    },
    #[error("server: {0}")]
    Io(#[from] std::io::Error),
}

/// Run until Ctrl-C. Refuses to start on an invalid catalogue.
pub async fn serve(config: ServerConfig) -> Result<(), ServeError> {
    let snapshot = load_snapshot(&config.catalogue)?;
    let store = Store::open(&config.store)?;
    store.put_catalogue(&snapshot.catalogue)?;
    log::info!(
        "catalogue {} loaded: {} phrases, {} lists",
        snapshot.hash,
        snapshot.catalogue.phrases.len(),
        snapshot.catalogue.lists.len()
    );
    let state = Arc::new(AppState::new(snapshot, config.catalogue, store, config.out_dir));
    let listener = tokio::net::TcpListener::bind(config.addr)
        .await
        .map_err(|source| ServeError::Bind {
            addr: config.addr,
            source,
        })?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
            log::info!("shutting down");
        })
        .await?;
    Ok(())
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/phrases", get(list_phrases))
        .route("/phrases/{id}/slots", get(phrase_slots))
        .route("/render", post(render))
        .route("/validate-selection", post(validate))
        .route("/search", get(search_phrases))
        .route("/bulletins", get(list_bulletins).post(create_bulletin))
        .route(
            "/bulletins/{id}",
            get(get_bulletin).put(update_bulletin).delete(delete_bulletin),
        )
        .route("/bulletins/{id}/descriptions/copy", post(copy))
        .route("/bulletins/{id}/publish", post(publish_bulletin))
        .route("/admin/reload-catalogue", post(reload))
        .with_state(state)
}

/// Problem-detail error response.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    detail: String,
    report: Option<ValidationReport>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, detail: impl Into<String>) -> Self {
        Self {
            status,
            code,
            detail: detail.into(),
            report: None,
        }
    }

    fn bad_request(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "INVALID_REQUEST", detail)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({
            "type": format!("urn:phrasecat:error:{}", self.code.to_ascii_lowercase()),
            "title": self.status.canonical_reason().unwrap_or("Error"),
            "status": self.status.as_u16(),
            "code": self.code,
            "detail": self.detail,
        });
        if let Some(report) = self.report {
            body["errors"] = serde_json::to_value(&report.errors).expect("findings serialize");
            body["warnings"] = serde_json::to_value(&report.warnings).expect("findings serialize");
        }
        let mut response = (self.status, Json(body)).into_response();
        response.headers_mut().insert(
            header::CONTENT_TYPE,
            HeaderValue::from_static("application/problem+json"),
        );
        response
    }
}

impl From<RenderError> for ApiError {
    fn from(e: RenderError) -> Self {
        let status = match e {
            RenderError::UnknownPhrase(_) => StatusCode::NOT_FOUND,
            RenderError::UnknownLanguage(_) => StatusCode::BAD_REQUEST,
            RenderError::Catalogue(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        Self::new(status, e.code(), e.to_string())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let status = match e {
            StoreError::NotFound(_) => StatusCode::NOT_FOUND,
            StoreError::ImmutableEdition(_) => StatusCode::CONFLICT,
            StoreError::RevisionConflict { .. } => StatusCode::PRECONDITION_FAILED,
            StoreError::InvalidId(_) => StatusCode::BAD_REQUEST,
            StoreError::Corrupt { .. } | StoreError::Catalogue { .. } | StoreError::Io(_) => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        Self::new(status, e.code(), e.to_string())
    }
}

impl From<PublishError> for ApiError {
    fn from(e: PublishError) -> Self {
        match e {
            PublishError::Store(e) => e.into(),
            PublishError::ValidationFailed(report) => Self {
                status: StatusCode::UNPROCESSABLE_ENTITY,
                code: "VALIDATION_FAILED",
                detail: "bulletin does not validate".into(),
                report: Some(report),
            },
            PublishError::TargetExists(_) => Self::new(StatusCode::CONFLICT, "TARGET_EXISTS", e.to_string()),
            PublishError::Io(_) => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "IO_FAILURE", e.to_string()),
        }
    }
}

impl From<LoadError> for ApiError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Invalid(report) => Self {
                status: StatusCode::UNPROCESSABLE_ENTITY,
                code: "INVALID_CATALOGUE",
                detail: "catalogue has validation errors; the previous snapshot stays active".into(),
                report: Some(report),
            },
            LoadError::Parse(_) => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "INVALID_CATALOGUE", e.to_string()),
            LoadError::Io { .. } => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "IO_FAILURE", e.to_string()),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse_json<T: DeserializeOwned>(bytes: &[u8]) -> ApiResult<T> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            ApiError::bad_request(inner.to_string())
        } else {
            ApiError::bad_request(format!("{path}: {inner}"))
        }
    })
}

fn etag(revision: u64) -> [(header::HeaderName, String); 1] {
    [(header::ETAG, format!("\"{revision}\""))]
}

/// `If-Match: "3"` → `Some(3)`; absent or `*` → `None`.
fn if_match(headers: &HeaderMap) -> ApiResult<Option<u64>> {
    let Some(value) = headers.get(header::IF_MATCH) else {
        return Ok(None);
    };
    let text = value
        .to_str()
        .map_err(|_| ApiError::bad_request("If-Match is not ASCII"))?
        .trim();
    if text == "*" {
        return Ok(None);
    }
    text.trim_start_matches("W/")
        .trim_matches('"')
        .parse()
        .map(Some)
        .map_err(|_| ApiError::bad_request(format!("If-Match {text:?} is not a revision")))
}

#[derive(Serialize)]
struct PhraseSummary<'a> {
    phrase_id: &'a PhraseId,
    number: u32,
    title: &'a str,
    segments: usize,
}

async fn list_phrases(State(state): State<Arc<AppState>>) -> Response {
    let snap = state.snapshot();
    let phrases: Vec<PhraseSummary> = snap
        .catalogue
        .phrases_by_number()
        .into_iter()
        .map(|p| PhraseSummary {
            phrase_id: &p.id,
            number: p.number,
            title: &p.title,
            segments: p.segments.len(),
        })
        .collect();
    Json(phrases).into_response()
}

#[derive(Deserialize)]
struct SlotsQuery {
    /// JSON object of segment choices, as in a selection's `choices`.
    selection: Option<String>,
}

async fn phrase_slots(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Query(query): Query<SlotsQuery>,
) -> ApiResult<Response> {
    let snap = state.snapshot();
    let mut selection = Selection::new(id.as_str());
    if let Some(raw) = query.selection.as_deref().filter(|s| !s.trim().is_empty()) {
        selection.segments = parse_json::<BTreeMap<usize, Choice>>(raw.as_bytes())?;
    }
    let tree = resolve_slots(&snap.catalogue, &selection)?;
    Ok(Json(json!({
        "catalogue_hash": snap.hash,
        "complete": tree.is_complete(),
        "phrase": tree.phrase,
        "slots": tree.slots,
    }))
    .into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RenderRequest {
    selection: Selection,
    /// All catalogue languages when absent.
    #[serde(default)]
    languages: Option<Vec<LanguageTag>>,
}

#[derive(Serialize)]
struct RenderResponse {
    catalogue_hash: String,
    texts: BTreeMap<LanguageTag, String>,
}

async fn render(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Json<RenderResponse>> {
    let request: RenderRequest = parse_json(&body)?;
    let snap = state.snapshot();
    let languages = request.languages.unwrap_or_else(|| snap.catalogue.languages.clone());
    let mut texts = BTreeMap::new();
    for lang in languages {
        let text = render_sentence(&snap.catalogue, &request.selection, lang.as_str())?;
        texts.insert(lang, text);
    }
    Ok(Json(RenderResponse {
        catalogue_hash: snap.hash.clone(),
        texts,
    }))
}

async fn validate(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Json<ValidationReport>> {
    let selection: Selection = parse_json(&body)?;
    let snap = state.snapshot();
    Ok(Json(validate_selection(&snap.catalogue, &selection)))
}

#[derive(Deserialize)]
struct SearchQuery {
    q: String,
    limit: Option<usize>,
}

async fn search_phrases(State(state): State<Arc<AppState>>, Query(query): Query<SearchQuery>) -> ApiResult<Response> {
    let snap = state.snapshot();
    let hits = search(&snap.index, &query.q, query.limit.unwrap_or(20));
    Ok(Json(json!({ "catalogue_hash": snap.hash, "hits": hits })).into_response())
}

#[derive(Deserialize)]
struct ListQuery {
    status: Option<String>,
}

async fn list_bulletins(State(state): State<Arc<AppState>>, Query(query): Query<ListQuery>) -> ApiResult<Response> {
    let status = query
        .status
        .as_deref()
        .map(str::parse::<Status>)
        .transpose()
        .map_err(ApiError::bad_request)?;
    Ok(Json(state.store.list_bulletins(status)?).into_response())
}

/// Body of `POST /bulletins` and `PUT /bulletins/{id}`. Status and
/// catalogue hash are owned by the server.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DraftBody {
    #[serde(default)]
    id: Option<String>,
    edition: DateTime<Utc>,
    #[serde(default)]
    descriptions: Vec<DangerDescription>,
}

#[derive(Serialize)]
struct WriteResponse {
    id: String,
    revision: u64,
    catalogue_hash: String,
    /// Findings for the stored descriptions; drafts may be incomplete.
    report: ValidationReport,
}

fn draft_report(cat: &Catalogue, bulletin: &Bulletin) -> ValidationReport {
    let mut report = ValidationReport::new();
    for d in &bulletin.descriptions {
        report.merge_prefixed(&format!("descriptions/{}", d.id), check_description(cat, d));
    }
    report
}

async fn create_bulletin(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Response> {
    let body: DraftBody = parse_json(&body)?;
    let id = body.id.ok_or_else(|| ApiError::bad_request("missing field `id`"))?;
    let snap = state.snapshot();
    let mut bulletin = Bulletin::draft(id, body.edition, snap.hash.clone());
    bulletin.descriptions = body.descriptions;
    let revision = match state.store.store_bulletin(&bulletin, Some(0)) {
        Err(StoreError::RevisionConflict { .. }) => {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "ALREADY_EXISTS",
                format!("bulletin {} already exists", bulletin.id),
            ))
        }
        other => other?,
    };
    let response = WriteResponse {
        report: draft_report(&snap.catalogue, &bulletin),
        id: bulletin.id,
        revision,
        catalogue_hash: snap.hash.clone(),
    };
    Ok((StatusCode::CREATED, etag(revision), Json(response)).into_response())
}

async fn get_bulletin(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    let (bulletin, revision) = state.store.load(&id)?;
    Ok((etag(revision), Json(bulletin)).into_response())
}

async fn update_bulletin(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Response> {
    let expected = if_match(&headers)?;
    let body: DraftBody = parse_json(&body)?;
    if body.id.as_deref().is_some_and(|b| b != id) {
        return Err(ApiError::bad_request("body id differs from the URL"));
    }
    let snap = state.snapshot();
    let mut bulletin = Bulletin::draft(id, body.edition, snap.hash.clone());
    bulletin.descriptions = body.descriptions;
    let revision = state.store.store_bulletin(&bulletin, expected)?;
    let response = WriteResponse {
        report: draft_report(&snap.catalogue, &bulletin),
        id: bulletin.id,
        revision,
        catalogue_hash: snap.hash.clone(),
    };
    Ok((etag(revision), Json(response)).into_response())
}

async fn delete_bulletin(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    headers: HeaderMap,
) -> ApiResult<StatusCode> {
    state.store.delete_bulletin(&id, if_match(&headers)?)?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CopyRequest {
    from_bulletin: String,
    description_id: String,
}

async fn copy(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, body: Bytes) -> ApiResult<Response> {
    let request: CopyRequest = parse_json(&body)?;
    let snap = state.snapshot();
    let (description, report) = copy_description(
        &state.store,
        &snap.catalogue,
        &request.from_bulletin,
        &request.description_id,
        &id,
    )?;
    Ok(Json(json!({ "description": description, "report": report })).into_response())
}

async fn publish_bulletin(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    let snap = state.snapshot();
    let worker = state.clone();
    let manifest = tokio::task::spawn_blocking(move || publish(&worker.store, &snap.catalogue, &id, &worker.out_dir))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "IO_FAILURE", e.to_string()))??;
    Ok(Json(manifest).into_response())
}

async fn reload(State(state): State<Arc<AppState>>) -> ApiResult<Response> {
    let worker = state.clone();
    let snap = tokio::task::spawn_blocking(move || worker.reload())
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "IO_FAILURE", e.to_string()))??;
    Ok(Json(json!({
        "catalogue_hash": snap.hash,
        "phrases": snap.catalogue.phrases.len(),
        "lists": snap.catalogue.lists.len(),
    }))
    .into_response())
}
