use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use serde_json::Value;

use socialbroker_core::{BrokerError, GraphError, ParseError, RegistryError, SnapshotError, StoreError};

/// Body of every non-2xx response. `code` is one of the constants below.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

pub mod codes {
    pub const INVALID_JSON: &str = "invalid_json";
    pub const INVALID_KEY: &str = "invalid_key";
    pub const VALIDATION_ERROR: &str = "validation_error";
    pub const SYNTAX_ERROR: &str = "syntax_error";
    pub const RANGE_ERROR: &str = "range_error";
    pub const SELF_LOOP: &str = "self_loop";
    pub const INVALID_WEIGHT: &str = "invalid_weight";
    pub const UNKNOWN_BUSINESS: &str = "unknown_business";
    pub const UNKNOWN_SERVICE: &str = "unknown_service";
    pub const UNKNOWN_TMODEL: &str = "unknown_tmodel";
    pub const UNKNOWN_ACTOR: &str = "unknown_actor";
    pub const UNKNOWN_CONSUMER: &str = "unknown_consumer";
    pub const DUPLICATE_KEY: &str = "duplicate_key";
    pub const INTERNAL: &str = "internal";

    pub const ALL: [&str; 14] = [
        INVALID_JSON,
        INVALID_KEY,
        VALIDATION_ERROR,
        SYNTAX_ERROR,
        RANGE_ERROR,
        SELF_LOOP,
        INVALID_WEIGHT,
        UNKNOWN_BUSINESS,
        UNKNOWN_SERVICE,
        UNKNOWN_TMODEL,
        UNKNOWN_ACTOR,
        UNKNOWN_CONSUMER,
        DUPLICATE_KEY,
        INTERNAL,
    ];
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            detail: None,
        }
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, codes::INTERNAL, message)
    }

    fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<RegistryError> for ApiError {
    fn from(e: RegistryError) -> Self {
        let message = e.to_string();
        match e {
            RegistryError::DuplicateKey { kind, key } => {
                ApiError::new(StatusCode::CONFLICT, codes::DUPLICATE_KEY, message)
                    .with_detail(serde_json::json!({ "kind": kind, "key": key }))
            }
            RegistryError::Validation(_) => ApiError::bad_request(codes::VALIDATION_ERROR, message),
            RegistryError::UnknownBusiness(_) => {
                ApiError::new(StatusCode::NOT_FOUND, codes::UNKNOWN_BUSINESS, message)
            }
            RegistryError::UnknownService(_) => {
                ApiError::new(StatusCode::NOT_FOUND, codes::UNKNOWN_SERVICE, message)
            }
            RegistryError::UnknownTModel(_) => {
                ApiError::new(StatusCode::NOT_FOUND, codes::UNKNOWN_TMODEL, message)
            }
        }
    }
}

impl From<GraphError> for ApiError {
    fn from(e: GraphError) -> Self {
        let message = e.to_string();
        match e {
            GraphError::UnknownActor(_) => ApiError::new(StatusCode::NOT_FOUND, codes::UNKNOWN_ACTOR, message),
            GraphError::SelfLoop(_) => ApiError::bad_request(codes::SELF_LOOP, message),
            GraphError::InvalidWeight(_) => ApiError::bad_request(codes::INVALID_WEIGHT, message),
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Registry(e) => e.into(),
            StoreError::Graph(e) => e.into(),
        }
    }
}

impl From<BrokerError> for ApiError {
    fn from(e: BrokerError) -> Self {
        match e {
            BrokerError::UnknownConsumer(_) => {
                ApiError::new(StatusCode::NOT_FOUND, codes::UNKNOWN_CONSUMER, e.to_string())
            }
            BrokerError::Registry(e) => e.into(),
        }
    }
}

impl From<ParseError> for ApiError {
    fn from(e: ParseError) -> Self {
        let position = e.position();
        let code = match e {
            ParseError::Syntax { .. } => codes::SYNTAX_ERROR,
            ParseError::Range { .. } => codes::RANGE_ERROR,
        };
        ApiError::bad_request(code, e.to_string()).with_detail(serde_json::json!({ "position": position }))
    }
}

impl From<SnapshotError> for ApiError {
    fn from(e: SnapshotError) -> Self {
        ApiError::internal(format!("snapshot write failed: {e}"))
    }
}
