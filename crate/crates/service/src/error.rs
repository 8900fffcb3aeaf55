use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use echocheck::Event;
use serde::Serialize;

/// An error reply: `{"error": {"code", "message", "enabled"?}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub enabled: Option<Vec<Event>>,
}

impl ServiceError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ServiceError {
            status,
            code,
            message: message.into(),
            enabled: None,
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        ServiceError::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn out_of_range(message: impl Into<String>) -> Self {
        ServiceError::new(StatusCode::BAD_REQUEST, "out_of_range", message)
    }

    pub fn unknown_session(id: &str) -> Self {
        ServiceError::new(StatusCode::NOT_FOUND, "unknown_session", format!("no session `{id}`"))
    }

    pub fn with_enabled(mut self, enabled: Vec<Event>) -> Self {
        self.enabled = Some(enabled);
        self
    }

    pub fn internal(message: impl Into<String>) -> Self {
        ServiceError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    code: &'a str,
    message: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    enabled: Option<&'a [Event]>,
}

#[derive(Serialize)]
struct ErrorEnvelope<'a> {
    error: ErrorBody<'a>,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let body = ErrorEnvelope {
            error: ErrorBody {
                code: self.code,
                message: &self.message,
                enabled: self.enabled.as_deref(),
            },
        };
        (self.status, Json(body)).into_response()
    }
}
