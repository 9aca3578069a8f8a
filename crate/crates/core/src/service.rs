//! Local HTTP JSON facade for interactive curation.
//!
//! Each uploaded corpus gets a session holding its merge proposals and a
//! revision counter. Writers take the session lock, apply a verdict and
//! publish a new immutable snapshot. Readers clone the current snapshot and
//! compute outside the lock, so every response reflects exactly one
//! revision and a slow spectrum never holds up a verdict.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Multipart, Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::corpus::{
    normalize_author, parse_export, AuthorName, CorpusStats, ExportFormat, IngestError, ParseWarning, Record,
};
use crate::dedup::{
    save_sidecar, set_status, CRKey, DedupConfig, DedupError, MergeProposal, ProposalStatus, Sidecar, SIDECAR_VERSION,
};
use crate::filters::PipelineConfig;
use crate::fraction::{parse_decimal, rational_to_decimal, Fraction};
use crate::pipeline::{analyze, merge, Merged, Occurrences, PipelineError, SpectrumConfig};
use crate::report::journal_table;
use crate::spectroscopy::top_keys_for_year;

const MAX_UPLOAD_BYTES: usize = 256 * 1024 * 1024;
const MAX_PER_PAGE: usize = 500;

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Internal(String),
}

impl ApiError {
    fn status(&self) -> StatusCode {
        match self {
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::Conflict(_) => StatusCode::CONFLICT,
            ApiError::Validation(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    fn code(&self) -> &'static str {
        match self {
            ApiError::NotFound(_) => "not_found",
            ApiError::Conflict(_) => "revision_conflict",
            ApiError::Validation(_) => "validation",
            ApiError::Internal(_) => "internal",
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code(), "message": self.to_string() } });
        (self.status(), Json(body)).into_response()
    }
}

impl From<IngestError> for ApiError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io(e) => ApiError::Internal(e.to_string()),
            other => ApiError::Validation(other.to_string()),
        }
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Dedup(DedupError::Io(e)) => ApiError::Internal(e.to_string()),
            other => ApiError::Validation(other.to_string()),
        }
    }
}

impl From<DedupError> for ApiError {
    fn from(e: DedupError) -> Self {
        PipelineError::from(e).into()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Settings shared by every session of one server.
#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    pub dedup: DedupConfig,
    /// Used for dataset 2 when a request names no self author.
    pub default_self_author: Option<AuthorName>,
}

/// One revision of a session. Never mutated once published.
struct Snapshot {
    revision: u64,
    proposals: Vec<MergeProposal>,
    merged: OnceLock<Result<Merged, String>>,
}

struct Corpus {
    records: Vec<Record>,
    occurrences: Occurrences,
    stats: CorpusStats,
}

pub struct Session {
    corpus: Arc<Corpus>,
    current: Mutex<Arc<Snapshot>>,
    sidecar: Option<PathBuf>,
}

impl Session {
    fn snapshot(&self) -> Arc<Snapshot> {
        self.current.lock().expect("session lock").clone()
    }

    fn merged<'a>(&self, snap: &'a Snapshot) -> ApiResult<&'a Merged> {
        snap.merged
            .get_or_init(|| merge(&self.corpus.occurrences, &snap.proposals).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| ApiError::Internal(e.clone()))
    }
}

pub struct AppState {
    config: ServiceConfig,
    sessions: RwLock<HashMap<String, Arc<Session>>>,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Arc<Self> {
        Arc::new(AppState {
            config,
            sessions: RwLock::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        })
    }

    /// Registers a corpus and returns its id. With `sidecar`, every verdict
    /// is also written to that file. `proposals` defaults to a fresh
    /// proposal run with nothing accepted.
    pub fn add_corpus(
        &self,
        records: Vec<Record>,
        proposals: Option<Vec<MergeProposal>>,
        sidecar: Option<PathBuf>,
    ) -> Result<String, DedupError> {
        let occurrences = Occurrences::from_records(&records);
        let proposals = match proposals {
            Some(p) => p,
            None => occurrences.propose(&self.config.dedup)?,
        };
        let stats = CorpusStats::compute(&records);
        let session = Session {
            corpus: Arc::new(Corpus {
                records,
                occurrences,
                stats,
            }),
            current: Mutex::new(Arc::new(Snapshot {
                revision: 0,
                proposals,
                merged: OnceLock::new(),
            })),
            sidecar,
        };
        let id = format!("c{}", self.next_id.fetch_add(1, Ordering::Relaxed));
        self.sessions
            .write()
            .expect("sessions lock")
            .insert(id.clone(), Arc::new(session));
        Ok(id)
    }

    fn session(&self, id: &str) -> ApiResult<Arc<Session>> {
        self.sessions
            .read()
            .expect("sessions lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("unknown corpus {id:?}")))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/corpus", post(upload))
        .route("/corpus/{id}", get(corpus_info))
        .route("/corpus/{id}/clusters", get(clusters))
        .route("/corpus/{id}/clusters/{verdict}", post(verdict))
        .route("/corpus/{id}/spectrum", get(spectrum))
        .route("/corpus/{id}/top-crs", get(top_crs))
        .route("/corpus/{id}/journals", get(journals))
        .route("/corpus/{id}/filter-report", get(filter_report))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
        .with_state(state)
}

/// Serves on `addr` until ctrl-c.
pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn parse_opt<T: std::str::FromStr>(name: &str, value: &Option<String>) -> ApiResult<Option<T>> {
    value
        .as_deref()
        .map(|v| {
            v.parse()
                .map_err(|_| ApiError::Validation(format!("invalid {name} {v:?}")))
        })
        .transpose()
}

fn wire_keys(keys: impl IntoIterator<Item = CRKey>) -> Vec<CRKey> {
    keys.into_iter()
        .map(|mut k| {
            k.members.clear();
            k
        })
        .collect()
}

async fn upload(State(state): State<Arc<AppState>>, mut multipart: Multipart) -> ApiResult<Json<Value>> {
    let mut file: Option<Bytes> = None;
    let mut format = ExportFormat::TaggedPlaintext;
    while let Some(field) = multipart
        .next_field()
        .await
        .map_err(|e| ApiError::Validation(e.to_string()))?
    {
        match field.name() {
            Some("file") => file = Some(field.bytes().await.map_err(|e| ApiError::Validation(e.to_string()))?),
            Some("format") => {
                let text = field.text().await.map_err(|e| ApiError::Validation(e.to_string()))?;
                format = text.trim().parse().map_err(ApiError::Validation)?;
            }
            _ => {}
        }
    }
    let file = file.ok_or_else(|| ApiError::Validation("missing multipart field \"file\"".into()))?;
    let parsed = parse_export(file.as_ref(), format)?;
    let warnings: Vec<String> = parsed.warnings.iter().map(ParseWarning::to_string).collect();
    let stats = CorpusStats::compute(&parsed.records);
    let id = state.add_corpus(parsed.records, None, None)?;
    Ok(Json(
        json!({ "corpus_id": id, "revision": 0, "stats": stats, "warnings": warnings }),
    ))
}

async fn corpus_info(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let session = state.session(&id)?;
    let snap = session.snapshot();
    Ok(Json(json!({
        "corpus_id": id,
        "revision": snap.revision,
        "stats": session.corpus.stats,
        "n_imprecise": session.corpus.occurrences.n_imprecise,
        "n_proposals": snap.proposals.len(),
    })))
}

#[derive(Debug, Deserialize)]
struct ClusterQuery {
    status: Option<String>,
    page: Option<String>,
    per_page: Option<String>,
}

async fn clusters(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<ClusterQuery>,
) -> ApiResult<Json<Value>> {
    let session = state.session(&id)?;
    let status: Option<ProposalStatus> = q
        .status
        .as_deref()
        .map(str::parse)
        .transpose()
        .map_err(ApiError::Validation)?;
    let page: usize = parse_opt("page", &q.page)?.unwrap_or(1);
    let per_page: usize = parse_opt("per_page", &q.per_page)?.unwrap_or(50);
    if page == 0 || per_page == 0 || per_page > MAX_PER_PAGE {
        return Err(ApiError::Validation(format!(
            "page must be >= 1 and per_page in 1..={MAX_PER_PAGE}"
        )));
    }
    let snap = session.snapshot();
    let matching: Vec<&MergeProposal> = snap
        .proposals
        .iter()
        .filter(|p| status.is_none_or(|s| p.status == s))
        .collect();
    let items: Vec<&MergeProposal> = matching
        .iter()
        .skip((page - 1) * per_page)
        .take(per_page)
        .copied()
        .collect();
    Ok(Json(json!({
        "revision": snap.revision,
        "total": matching.len(),
        "page": page,
        "per_page": per_page,
        "items": items,
    })))
}

#[derive(Debug, Default, Deserialize)]
struct VerdictBody {
    expected_revision: Option<u64>,
}

async fn verdict(
    State(state): State<Arc<AppState>>,
    Path((id, target)): Path<(String, String)>,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let session = state.session(&id)?;
    let (cid, status) = match target.rsplit_once(':') {
        Some((cid, "accept")) => (cid, ProposalStatus::Accepted),
        Some((cid, "reject")) => (cid, ProposalStatus::Rejected),
        _ => {
            return Err(ApiError::NotFound(format!(
                "no action in {target:?}; use <cluster_id>:accept or :reject"
            )))
        }
    };
    let body: VerdictBody = if body.iter().all(u8::is_ascii_whitespace) {
        VerdictBody::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::Validation(format!("bad request body: {e}")))?
    };

    let mut current = session.current.lock().expect("session lock");
    if let Some(expected) = body.expected_revision {
        if expected != current.revision {
            return Err(ApiError::Conflict(format!(
                "session is at revision {}, request expected {expected}",
                current.revision
            )));
        }
    }
    let mut proposals = current.proposals.clone();
    let changed = set_status(&mut proposals, cid, status).map_err(|e| match e {
        DedupError::UnknownProposal(_) => ApiError::NotFound(e.to_string()),
        other => ApiError::from(other),
    })?;
    if changed {
        if let Some(path) = &session.sidecar {
            let sidecar = Sidecar {
                version: SIDECAR_VERSION,
                config: state.config.dedup.clone(),
                fingerprint: session.corpus.occurrences.fingerprint(),
                proposals: proposals.clone(),
            };
            save_sidecar(&sidecar, path)?;
        }
        *current = Arc::new(Snapshot {
            revision: current.revision + 1,
            proposals,
            merged: OnceLock::new(),
        });
    }
    Ok(Json(json!({
        "revision": current.revision,
        "cluster_id": cid,
        "status": status,
        "changed": changed,
    })))
}

#[derive(Debug, Deserialize)]
struct DatasetQuery {
    dataset: Option<String>,
    min_share: Option<String>,
    self_author: Option<String>,
    window: Option<String>,
    min_deviation: Option<String>,
}

impl DatasetQuery {
    fn pipeline(&self, state: &AppState) -> ApiResult<(u8, PipelineConfig)> {
        let dataset: u8 = parse_opt("dataset", &self.dataset)?.unwrap_or(1);
        let mut cfg = match dataset {
            1 => PipelineConfig::dataset1(),
            2 => {
                let author = match self.self_author.as_deref() {
                    Some(a) => normalize_author(a).map_err(|e| ApiError::Validation(e.to_string()))?,
                    None => state
                        .config
                        .default_self_author
                        .clone()
                        .ok_or_else(|| ApiError::Validation("dataset 2 needs self_author".into()))?,
                };
                PipelineConfig::dataset2(author)
            }
            other => return Err(ApiError::Validation(format!("dataset must be 1 or 2, got {other}"))),
        };
        if let Some(share) = parse_opt::<Fraction>("min_share", &self.min_share)? {
            if !share.is_unit_interval() {
                return Err(ApiError::Validation(format!("min_share {share} is outside [0, 1]")));
            }
            cfg.min_share_per_rpy = share;
        }
        Ok((dataset, cfg))
    }

    fn spectrum(&self) -> ApiResult<SpectrumConfig> {
        let mut spec = SpectrumConfig::default();
        if let Some(w) = parse_opt("window", &self.window)? {
            spec.window = w;
        }
        if let Some(d) = self.min_deviation.as_deref() {
            spec.min_deviation =
                parse_decimal(d).ok_or_else(|| ApiError::Validation(format!("invalid min_deviation {d:?}")))?;
        }
        Ok(spec)
    }
}

async fn spectrum(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<DatasetQuery>,
) -> ApiResult<Json<Value>> {
    let session = state.session(&id)?;
    let (dataset, cfg) = q.pipeline(&state)?;
    let spec = q.spectrum()?;
    let snap = session.snapshot();
    let merged = session.merged(&snap)?;
    let mut analysis = analyze(&merged.keys, &cfg, &spec)?;
    for peak in &mut analysis.peaks {
        peak.contributing_keys = wire_keys(std::mem::take(&mut peak.contributing_keys));
    }
    let total_ncr: u64 = analysis.points.iter().map(|p| p.ncr).sum();
    Ok(Json(json!({
        "revision": snap.revision,
        "dataset": dataset,
        "window": spec.window,
        "min_deviation": rational_to_decimal(&spec.min_deviation),
        "n_keys": analysis.keys.len(),
        "total_ncr": total_ncr,
        "report": analysis.report,
        "points": analysis.points,
        "peaks": analysis.peaks,
    })))
}

async fn filter_report(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<DatasetQuery>,
) -> ApiResult<Json<Value>> {
    let session = state.session(&id)?;
    let (dataset, cfg) = q.pipeline(&state)?;
    let snap = session.snapshot();
    let merged = session.merged(&snap)?;
    let (_, report) = crate::filters::build_dataset(merged.keys.clone(), &cfg).map_err(PipelineError::from)?;
    Ok(Json(json!({
        "revision": snap.revision,
        "dataset": dataset,
        "n_occurrences": merged.n_occurrences,
        "n_imprecise": merged.n_imprecise,
        "n_after_merge": merged.n_after_merge,
        "report": report,
    })))
}

#[derive(Debug, Deserialize)]
struct TopQuery {
    year: Option<String>,
    min_occ: Option<String>,
    limit: Option<String>,
}

async fn top_crs(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<TopQuery>,
) -> ApiResult<Json<Value>> {
    let session = state.session(&id)?;
    let year: i32 = parse_opt("year", &q.year)?.ok_or_else(|| ApiError::Validation("year is required".into()))?;
    let min_occ: Option<u64> = parse_opt("min_occ", &q.min_occ)?;
    let limit: Option<usize> = parse_opt("limit", &q.limit)?;
    let snap = session.snapshot();
    let merged = session.merged(&snap)?;
    let keys = wire_keys(top_keys_for_year(&merged.keys, year, limit, min_occ));
    Ok(Json(json!({ "revision": snap.revision, "year": year, "keys": keys })))
}

#[derive(Debug, Deserialize)]
struct JournalQuery {
    min_papers: Option<String>,
}

async fn journals(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<JournalQuery>,
) -> ApiResult<Json<Value>> {
    let session = state.session(&id)?;
    let min_papers: u64 = parse_opt("min_papers", &q.min_papers)?.unwrap_or(10);
    let table = journal_table(&session.corpus.records, min_papers).map_err(|e| ApiError::Validation(e.to_string()))?;
    let revision = session.snapshot().revision;
    Ok(Json(json!({
        "revision": revision,
        "n_records": table.n_records,
        "rows": table.rows,
        "cumulative_share": table.cumulative_share,
    })))
}
