use std::time::Duration;

use thiserror::Error;

use super::{assemble_bundle, ChartBundle, IngestError};

pub const API_TOKEN_ENV: &str = "CHARTSCRIBE_API_TOKEN";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemoteConfig {
    pub base_url: String,
    pub token: Option<String>,
    pub timeout: Duration,
}

impl RemoteConfig {
    pub fn new(base_url: impl Into<String>, token: Option<String>) -> Self {
        RemoteConfig {
            base_url: base_url.into(),
            token,
            timeout: DEFAULT_TIMEOUT,
        }
    }

    /// Uses `token` when given, otherwise `CHARTSCRIBE_API_TOKEN`.
    pub fn with_env_token(base_url: impl Into<String>, token: Option<String>) -> Self {
        let token = token.or_else(|| std::env::var(API_TOKEN_ENV).ok().filter(|t| !t.is_empty()));
        Self::new(base_url, token)
    }

    fn url(&self, path: &str) -> String {
        format!("{}/{}", self.base_url.trim_end_matches('/'), path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("request timed out")]
    Timeout,
    #[error("{0}")]
    Other(String),
}

/// Blocking GET with bearer authentication. Implementations must return
/// non-2xx statuses as responses, not errors.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str, token: &str, timeout: Duration) -> Result<HttpResponse, TransportError>;
}

/// Default network transport. No retries.
#[derive(Debug, Default, Clone)]
pub struct UreqTransport;

impl Transport for UreqTransport {
    fn get(&self, url: &str, token: &str, timeout: Duration) -> Result<HttpResponse, TransportError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        let mut response = agent
            .get(url)
            .header("Authorization", &format!("Bearer {token}"))
            .call()
            .map_err(|e| match e {
                ureq::Error::Timeout(_) => TransportError::Timeout,
                other => TransportError::Other(other.to_string()),
            })?;
        let status = response.status().as_u16();
        let body = response.body_mut().read_to_string().map_err(|e| match e {
            ureq::Error::Timeout(_) => TransportError::Timeout,
            other => TransportError::Other(other.to_string()),
        })?;
        Ok(HttpResponse { status, body })
    }
}

fn get_ok(
    transport: &dyn Transport,
    config: &RemoteConfig,
    token: &str,
    path: &str,
) -> Result<String, IngestError> {
    let response = transport
        .get(&config.url(path), token, config.timeout)
        .map_err(|e| match e {
            TransportError::Timeout => IngestError::TimeoutExceeded,
            TransportError::Other(msg) => IngestError::Transport(msg),
        })?;
    match response.status {
        200..=299 => Ok(response.body),
        401 | 403 => Err(IngestError::AuthFailed(response.status)),
        404 => Err(IngestError::NotFound),
        other => Err(IngestError::UpstreamError(other)),
    }
}

/// Fetches metadata, CSV data and the SVG export for `chart_id`.
///
/// A 404 on the SVG export is tolerated and yields a bundle without SVG.
pub fn fetch_chart(
    chart_id: &str,
    config: &RemoteConfig,
    transport: &dyn Transport,
) -> Result<ChartBundle, IngestError> {
    let token = config.token.as_deref().ok_or(IngestError::AuthFailed(401))?;
    let metadata = get_ok(transport, config, token, &format!("charts/{chart_id}"))?;
    let data = get_ok(transport, config, token, &format!("charts/{chart_id}/data"))?;
    let svg = match get_ok(transport, config, token, &format!("charts/{chart_id}/export/svg")) {
        Ok(s) => Some(s),
        Err(IngestError::NotFound) => None,
        Err(e) => return Err(e),
    };
    assemble_bundle(&metadata, &data, svg)
}
