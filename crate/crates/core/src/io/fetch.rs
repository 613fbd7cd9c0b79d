use std::io::Read;
use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::header::ACCEPT;
use reqwest::redirect::Policy;
use reqwest::StatusCode;

use crate::error::FetchError;

pub const DEFAULT_MAX_BYTES: u64 = 64 * 1024 * 1024;

const ACCEPT_VALUE: &str = "text/plain, application/rdf+xml;q=0.1";
const MAX_REDIRECTS: usize = 5;

#[derive(Debug, Clone)]
pub struct FetchOptions {
    pub timeout: Duration,
    pub max_bytes: u64,
}

impl Default for FetchOptions {
    fn default() -> Self {
        FetchOptions {
            timeout: Duration::from_secs(30),
            max_bytes: DEFAULT_MAX_BYTES,
        }
    }
}

/// Downloads an ontology document over HTTP(S) and decodes it as UTF-8.
pub fn fetch_ontology(url: &str, options: &FetchOptions) -> Result<String, FetchError> {
    let parsed = reqwest::Url::parse(url).map_err(|_| FetchError::InvalidUrl(url.to_string()))?;
    if !matches!(parsed.scheme(), "http" | "https") || parsed.host_str().is_none() {
        return Err(FetchError::InvalidUrl(url.to_string()));
    }
    let client = Client::builder()
        .timeout(options.timeout)
        .connect_timeout(options.timeout)
        .redirect(Policy::limited(MAX_REDIRECTS))
        .build()
        .map_err(|e| FetchError::Network(e.to_string()))?;
    let timeout_secs = options.timeout.as_secs().max(1);
    let classify = |e: reqwest::Error| {
        if e.is_timeout() {
            FetchError::Timeout(timeout_secs)
        } else {
            FetchError::Network(e.to_string())
        }
    };
    let response = client
        .get(parsed)
        .header(ACCEPT, ACCEPT_VALUE)
        .send()
        .map_err(classify)?;
    let status = response.status();
    if status == StatusCode::NOT_FOUND {
        return Err(FetchError::NotFound(url.to_string()));
    }
    if !status.is_success() {
        return Err(FetchError::Status {
            status: status.as_u16(),
            url: url.to_string(),
        });
    }
    if response.content_length().is_some_and(|n| n > options.max_bytes) {
        return Err(FetchError::TooLarge {
            limit: options.max_bytes,
        });
    }
    let mut body = Vec::new();
    response
        .take(options.max_bytes + 1)
        .read_to_end(&mut body)
        .map_err(|e| {
            // the reader wraps reqwest errors in io::Error
            let timed_out = e
                .get_ref()
                .and_then(|inner| inner.downcast_ref::<reqwest::Error>())
                .is_some_and(reqwest::Error::is_timeout);
            if timed_out || e.kind() == std::io::ErrorKind::TimedOut {
                FetchError::Timeout(timeout_secs)
            } else {
                FetchError::Network(e.to_string())
            }
        })?;
    if body.len() as u64 > options.max_bytes {
        return Err(FetchError::TooLarge {
            limit: options.max_bytes,
        });
    }
    let text = String::from_utf8(body).map_err(|_| FetchError::Encoding)?;
    Ok(match text.strip_prefix('\u{feff}') {
        Some(rest) => rest.to_string(),
        None => text,
    })
}
