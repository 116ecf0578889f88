//! Series corpora: the built-in benchmark sets, OEIS "stripped" files and
//! user-supplied lists.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Deserialize;
use thiserror::Error;

use crate::edk::Series;
use crate::value::{ParseValueError, Value};

const IQ: &str = include_str!("../data/iq.txt");
const LITERATURE: &str = include_str!("../data/literature.txt");

#[derive(Debug, Clone, PartialEq)]
pub struct NamedSeries {
    pub id: String,
    pub series: Series,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("invalid JSON input: {0}")]
    Json(String),
}

/// A line of a stripped file that could not be read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MalformedLine {
    pub line: usize,
    pub content: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct StrippedFile {
    pub series: Vec<NamedSeries>,
    pub malformed: Vec<MalformedLine>,
    /// Too short or trivially constant.
    pub filtered: usize,
    /// Same elements as an earlier series.
    pub duplicates: usize,
}

/// Splits `a, b c;d` style element lists.
pub fn parse_values(text: &str) -> Result<Vec<Value>, ParseValueError> {
    text.split(|c: char| c == ',' || c == ';' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

fn builtin(text: &str, prefix: &str) -> Vec<NamedSeries> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (idx, rest) = l.split_once(' ').expect("index and values");
            let values = parse_values(rest).expect("built-in data parses");
            NamedSeries {
                id: format!("{prefix}{idx:0>2}"),
                series: Series::new(values).expect("built-in series have 2+ elements"),
            }
        })
        .collect()
}

/// The 90 puzzle-style series, ids `iq-00` to `iq-89`.
pub fn iq_corpus() -> Vec<NamedSeries> {
    builtin(IQ, "iq-")
}

/// The 67 series collected from the literature, ids `lit-00` to `lit-66`.
pub fn literature_corpus() -> Vec<NamedSeries> {
    builtin(LITERATURE, "lit-")
}

/// Series worth searching: at least 3 elements, and constant ones need 4.
pub fn keep(values: &[Value]) -> bool {
    let n = values.len();
    let constant = values.windows(2).all(|w| w[0] == w[1]);
    n >= 3 && !(constant && n < 4)
}

/// Reads the OEIS stripped format (`A000045 ,0,1,1,2,3,5,`). Lines starting
/// with `#` are comments; unreadable lines are collected, not fatal.
pub fn parse_stripped(text: &str) -> StrippedFile {
    let mut out = StrippedFile::default();
    let mut seen: HashSet<Vec<String>> = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: &str| MalformedLine {
            line: i + 1,
            content: raw.to_string(),
            reason: reason.to_string(),
        };
        let Some((id, rest)) = line.split_once(char::is_whitespace) else {
            out.malformed.push(bad("missing element list"));
            continue;
        };
        if !id.starts_with('A') || id.len() < 2 || !id[1..].chars().all(|c| c.is_ascii_digit()) {
            out.malformed.push(bad("bad sequence id"));
            continue;
        }
        let body = rest.trim().trim_matches(',');
        let parsed: Result<Vec<Value>, _> = body
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<Value>())
            .collect();
        let values = match parsed {
            Ok(v) => v,
            Err(e) => {
                out.malformed.push(bad(&e.to_string()));
                continue;
            }
        };
        if !values.iter().all(|v| v.as_rat().is_some_and(|r| r.is_integer())) {
            out.malformed.push(bad("non-integer element"));
            continue;
        }
        if !keep(&values) {
            out.filtered += 1;
            continue;
        }
        let key: Vec<String> = values.iter().map(Value::to_string).collect();
        if !seen.insert(key) {
            out.duplicates += 1;
            continue;
        }
        out.series.push(NamedSeries {
            id: id.to_string(),
            series: Series::new(values).expect("kept series have 3+ elements"),
        });
    }
    out
}

/// Writes series back in the stripped format.
pub fn emit_stripped(series: &[NamedSeries]) -> String {
    let mut s = String::new();
    for ns in series {
        s.push_str(&ns.id);
        s.push_str(" ,");
        for v in ns.series.values() {
            let _ = write!(s, "{v},");
        }
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// One series per line, elements separated by commas or whitespace.
    Lines,
    /// JSON: an array of element arrays, or of `{"id", "values"}` objects.
    Json,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonSeries {
    Plain(Vec<serde_json::Value>),
    Named { id: Option<String>, values: Vec<serde_json::Value> },
}

fn json_value(v: &serde_json::Value) -> Result<Value, String> {
    match v {
        serde_json::Value::Number(n) => n.to_string().parse().map_err(|e: ParseValueError| e.to_string()),
        serde_json::Value::String(s) => s.parse().map_err(|e: ParseValueError| e.to_string()),
        other => Err(format!("unsupported element {other}")),
    }
}

/// Reads user series. Ids default to `s<line or position>`.
pub fn load_user(text: &str, format: InputFormat) -> Result<Vec<NamedSeries>, DatasetError> {
    match format {
        InputFormat::Lines => {
            let mut out = Vec::new();
            for (i, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let err = |reason: String| DatasetError::Malformed { line: i + 1, reason };
                let values = parse_values(line).map_err(|e| err(e.to_string()))?;
                let series = Series::new(values).map_err(|e| err(e.to_string()))?;
                out.push(NamedSeries {
                    id: format!("s{}", i + 1),
                    series,
                });
            }
            Ok(out)
        }
        InputFormat::Json => {
            let items: Vec<JsonSeries> = serde_json::from_str(text).map_err(|e| DatasetError::Json(e.to_string()))?;
            items
                .into_iter()
                .enumerate()
                .map(|(i, item)| {
                    let (id, raw) = match item {
                        JsonSeries::Plain(v) => (None, v),
                        JsonSeries::Named { id, values } => (id, values),
                    };
                    let err = |reason: String| DatasetError::Malformed { line: i + 1, reason };
                    let values = raw.iter().map(json_value).collect::<Result<Vec<_>, _>>().map_err(err)?;
                    let series = Series::new(values).map_err(|e| err(e.to_string()))?;
                    Ok(NamedSeries {
                        id: id.unwrap_or_else(|| format!("s{}", i + 1)),
                        series,
                    })
                })
                .collect()
        }
    }
}
