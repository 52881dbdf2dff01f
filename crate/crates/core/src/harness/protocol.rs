//! Newline-delimited JSON protocol between the engine and an external model.
//!
//! The engine writes one request per line on the child's stdin and reads one
//! response per line from its stdout:
//!
//! ```text
//! → {"id": 7, "xs": [[0.1, 0.2], [0.3, 0.4]]}
//! ← {"id": 7, "ys": [0.5, 0.9]}
//! ```
//!
//! `ys` has one value per row of `xs`, in order. A child may answer
//! `{"id": 7, "error": "..."}` to report a failure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub id: u64,
    pub xs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ys: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Request {
    pub fn to_line(&self) -> Result<String> {
        let mut s = serde_json::to_string(self)?;
        s.push('\n');
        Ok(s)
    }
}

impl Response {
    pub fn ok(id: u64, ys: Vec<f64>) -> Self {
        Self { id, ys: Some(ys), error: None }
    }

    pub fn to_line(&self) -> Result<String> {
        let mut s = serde_json::to_string(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Parses a response line and checks it answers request `id` with `n` values.
    pub fn parse_for(line: &str, id: u64, n: usize) -> Result<Vec<f64>> {
        let resp: Response = serde_json::from_str(line.trim_end())
            .map_err(|e| Error::Protocol(format!("malformed response {line:?}: {e}")))?;
        if resp.id != id {
            return Err(Error::Protocol(format!("expected response id {id}, got {}", resp.id)));
        }
        if let Some(msg) = resp.error {
            return Err(Error::BlackBox(msg));
        }
        let ys = resp.ys.ok_or_else(|| Error::Protocol("response has neither ys nor error".into()))?;
        if ys.len() != n {
            return Err(Error::Protocol(format!("expected {n} values, got {}", ys.len())));
        }
        Ok(ys)
    }
}
