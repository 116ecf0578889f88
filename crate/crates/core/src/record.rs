//! Structured per-series results, one JSON object per line.

use serde::{Deserialize, Serialize};

use crate::search::{SearchError, Solution};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Solved,
    Unsolved,
    BudgetExhausted,
    TooShort,
}

impl From<&SearchError> for Status {
    fn from(e: &SearchError) -> Status {
        match e {
            SearchError::TooShort(_) => Status::TooShort,
            SearchError::Unsolved => Status::Unsolved,
            SearchError::BudgetExhausted { .. } => Status::BudgetExhausted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub series_id: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_e: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub kitas: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// Elements after the end of the input series.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub predicted: Vec<String>,
    /// The pattern stopped producing elements before the requested count.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl Record {
    pub fn solved(id: &str, sol: &Solution, predicted: &[Value], truncated: bool) -> Record {
        Record {
            series_id: id.to_string(),
            status: Status::Solved,
            n_e: Some(sol.n_e()),
            kitas: sol.labels(),
            kind: Some(sol.classify().to_string()),
            depth: Some(sol.depth()),
            predicted: predicted.iter().map(Value::render).collect(),
            truncated,
            elapsed_ms: None,
        }
    }

    pub fn failed(id: &str, err: &SearchError) -> Record {
        Record {
            series_id: id.to_string(),
            status: err.into(),
            n_e: None,
            kitas: Vec::new(),
            kind: None,
            depth: None,
            predicted: Vec::new(),
            truncated: false,
            elapsed_ms: None,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let r = Record::failed("A1", &SearchError::Unsolved);
        assert_eq!(r.to_json_line(), r#"{"series_id":"A1","status":"unsolved"}"#);
        let back: Record = serde_json::from_str(&r.to_json_line()).unwrap();
        assert_eq!(back, r);
    }
}
