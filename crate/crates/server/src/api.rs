//! Route table and handlers.

use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, RawQuery, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use socialbroker_core::snapshot::write_snapshot;
use socialbroker_core::{
    parse_social_requirement, Broker, BrokerRequest, CollaborationEdge, Key, KeyedReference, Record,
    ServiceRequirements, SocialRequirement, Stores,
};

use crate::config::ServerConfig;
use crate::error::{codes, ApiError};

/// Both stores behind one lock: writers are serialized, readers run
/// concurrently and always see a fully applied mutation.
pub struct AppState {
    stores: RwLock<Stores>,
    config: ServerConfig,
}

pub type SharedState = Arc<AppState>;

impl AppState {
    pub fn new(stores: Stores, config: ServerConfig) -> SharedState {
        Arc::new(Self {
            stores: RwLock::new(stores),
            config,
        })
    }

    pub fn config(&self) -> &ServerConfig {
        &self.config
    }

    pub fn read<T>(&self, f: impl FnOnce(&Stores) -> T) -> T {
        f(&self.stores.read().unwrap_or_else(|p| p.into_inner()))
    }

    /// Canonical dump of the current state.
    pub fn dump(&self) -> String {
        self.read(Stores::dump)
    }

    /// Writes the current state to the configured snapshot path.
    pub fn flush(&self) -> Result<(), socialbroker_core::SnapshotError> {
        let guard = self.stores.read().unwrap_or_else(|p| p.into_inner());
        write_snapshot(&self.config.snapshot_path, &guard)
    }

    /// Applies one record. With snapshot-on-mutation the change is made on a
    /// copy, persisted, and only then published, so a failed write leaves
    /// both memory and disk unchanged.
    fn mutate(&self, record: Record) -> Result<(), ApiError> {
        let mut guard = self.stores.write().unwrap_or_else(|p| p.into_inner());
        if self.config.snapshot_on_mutation {
            let mut next = guard.clone();
            next.apply(record)?;
            write_snapshot(&self.config.snapshot_path, &next)?;
            *guard = next;
        } else {
            guard.apply(record)?;
        }
        Ok(())
    }
}

pub fn router(state: SharedState) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/registry/tmodels", post(create_tmodel))
        .route("/registry/businesses", post(create_business))
        .route("/registry/businesses/{key}", get(get_business))
        .route("/registry/businesses/{key}/services", post(create_service))
        .route("/registry/services/{key}/bindings", post(create_binding))
        .route("/registry/search", get(search))
        .route("/graph/actors", post(create_actor))
        .route("/graph/edges", post(create_edge))
        .route("/graph/metrics/{id}", get(metrics))
        .route("/broker/query", post(broker_query))
        .route("/snapshot", get(snapshot))
        .with_state(state)
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(codes::INVALID_JSON, e.to_string()))
}

fn parse_key(text: &str) -> Result<Key, ApiError> {
    Key::parse(text).map_err(|e| ApiError::bad_request(codes::INVALID_KEY, e.to_string()))
}

fn created(body: Value) -> Response {
    (StatusCode::CREATED, Json(body)).into_response()
}

fn json_text(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

async fn healthz() -> &'static str {
    "ok"
}

async fn snapshot(State(state): State<SharedState>) -> Response {
    ([(header::CONTENT_TYPE, "application/x-ndjson")], state.dump()).into_response()
}

async fn create_tmodel(State(state): State<SharedState>, body: Bytes) -> Result<Response, ApiError> {
    let tmodel: socialbroker_core::TModel = parse_body(&body)?;
    let key = tmodel.tmodel_key.clone();
    state.mutate(Record::Tmodel(tmodel))?;
    Ok(created(json!({ "key": key })))
}

async fn create_business(State(state): State<SharedState>, body: Bytes) -> Result<Response, ApiError> {
    let entity: socialbroker_core::BusinessEntity = parse_body(&body)?;
    let key = entity.business_key.clone();
    state.mutate(Record::Business(entity))?;
    Ok(created(json!({ "key": key })))
}

/// Fills the owner key from the URL, rejecting a body that names another.
fn with_owner(body: &Bytes, field: &str, owner: &Key) -> Result<Value, ApiError> {
    let mut value: Value = parse_body(body)?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| ApiError::bad_request(codes::INVALID_JSON, "expected a JSON object"))?;
    match obj.get(field) {
        None | Some(Value::Null) => {
            obj.insert(field.to_string(), json!(owner));
        }
        Some(Value::String(s)) if Key::parse(s).as_ref() == Ok(owner) => {}
        Some(other) => {
            return Err(ApiError::bad_request(
                codes::VALIDATION_ERROR,
                format!("{field} {other} does not match the URL key {owner}"),
            ))
        }
    }
    Ok(value)
}

async fn create_service(
    State(state): State<SharedState>,
    Path(key): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let owner = parse_key(&key)?;
    let value = with_owner(&body, "business_key", &owner)?;
    let service: socialbroker_core::BusinessService = serde_json::from_value(value)
        .map_err(|e| ApiError::bad_request(codes::INVALID_JSON, e.to_string()))?;
    let key = service.service_key.clone();
    state.mutate(Record::Service(service))?;
    Ok(created(json!({ "key": key })))
}

async fn create_binding(
    State(state): State<SharedState>,
    Path(key): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let owner = parse_key(&key)?;
    let value = with_owner(&body, "service_key", &owner)?;
    let binding: socialbroker_core::BindingTemplate = serde_json::from_value(value)
        .map_err(|e| ApiError::bad_request(codes::INVALID_JSON, e.to_string()))?;
    let key = binding.binding_key.clone();
    state.mutate(Record::Binding(binding))?;
    Ok(created(json!({ "key": key })))
}

async fn get_business(State(state): State<SharedState>, Path(key): Path<String>) -> Result<Response, ApiError> {
    let key = parse_key(&key)?;
    let entity = state.read(|s| s.registry.get_business_detail(&key).cloned())?;
    Ok(Json(entity).into_response())
}

/// `category=tmodelKey:keyValue`, `keyword=`, `tmodel=`, each repeatable.
pub fn parse_search_query(query: &str) -> Result<ServiceRequirements, ApiError> {
    let mut req = ServiceRequirements::default();
    for (name, value) in url::form_urlencoded::parse(query.as_bytes()) {
        match name.as_ref() {
            "category" => req.categories.push(parse_category(&value)?),
            "keyword" => req.keywords.push(value.into_owned()),
            "tmodel" => req.required_tmodels.push(parse_key(&value)?),
            other => {
                return Err(ApiError::bad_request(
                    codes::VALIDATION_ERROR,
                    format!("unknown search parameter {other:?}"),
                ))
            }
        }
    }
    Ok(req)
}

/// Parses `tmodelKey:keyValue`.
pub fn parse_category(text: &str) -> Result<KeyedReference, ApiError> {
    let (key, value) = text.split_once(':').ok_or_else(|| {
        ApiError::bad_request(codes::VALIDATION_ERROR, format!("category {text:?} is not tmodelKey:keyValue"))
    })?;
    if value.is_empty() {
        return Err(ApiError::bad_request(codes::VALIDATION_ERROR, "category value must not be empty"));
    }
    Ok(KeyedReference::new(parse_key(key)?, "", value))
}

async fn search(State(state): State<SharedState>, RawQuery(query): RawQuery) -> Result<Response, ApiError> {
    let req = parse_search_query(query.as_deref().unwrap_or(""))?;
    let hits = state.read(|s| s.registry.find_services(&req));
    Ok(Json(hits).into_response())
}

#[derive(Deserialize)]
struct ActorBody {
    id: Key,
}

async fn create_actor(State(state): State<SharedState>, body: Bytes) -> Result<Response, ApiError> {
    let ActorBody { id } = parse_body(&body)?;
    state.mutate(Record::Actor { id: id.clone() })?;
    Ok(created(json!({ "id": id })))
}

async fn create_edge(State(state): State<SharedState>, body: Bytes) -> Result<Response, ApiError> {
    let edge: CollaborationEdge = parse_body(&body)?;
    let reply = json!({ "a": edge.a, "b": edge.b, "weight": edge.weight });
    state.mutate(Record::Edge(edge))?;
    Ok(created(reply))
}

#[derive(Debug, Serialize)]
struct Metrics {
    degree: usize,
    closeness: f64,
    betweenness: f64,
}

async fn metrics(State(state): State<SharedState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let id = parse_key(&id)?;
    let m = state.read(|s| -> Result<Metrics, ApiError> {
        Ok(Metrics {
            degree: s.graph.degree(&id)?,
            closeness: s.graph.closeness(&id)?,
            betweenness: s.graph.betweenness(&id)?,
        })
    })?;
    Ok(Json(m).into_response())
}

/// Social requirement on the wire: the text language, or its structured
/// JSON form.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SocialField {
    Text(String),
    Structured(SocialRequirement),
}

impl Default for SocialField {
    fn default() -> Self {
        SocialField::Text(String::new())
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct BrokerQuery {
    pub consumer: Key,
    #[serde(default)]
    pub service: ServiceRequirements,
    #[serde(default)]
    pub social: SocialField,
}

impl BrokerQuery {
    pub fn into_request(self) -> Result<BrokerRequest, ApiError> {
        let social_req = match self.social {
            SocialField::Text(text) => parse_social_requirement(&text)?,
            SocialField::Structured(req) => req,
        };
        Ok(BrokerRequest {
            consumer: self.consumer,
            service_req: self.service,
            social_req,
        })
    }
}

async fn broker_query(State(state): State<SharedState>, body: Bytes) -> Result<Response, ApiError> {
    let request = parse_body::<BrokerQuery>(&body)?.into_request()?;
    let response = state.read(|s| Broker::new(&s.registry, &s.graph).query(&request))?;
    Ok(json_text(response.to_json()))
}
