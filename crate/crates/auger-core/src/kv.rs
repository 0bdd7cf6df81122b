//! Flat key-value configuration documents.
//!
//! One `key = value` pair per line. `#` starts a comment, blank lines are
//! skipped, keys may carry a single dotted section prefix (`params.w_p`).
//! Duplicate keys are rejected so a document has one unambiguous meaning.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KvError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("duplicate key `{0}`")]
    DuplicateKey(String),
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: cannot parse `{value}` as {expected}")]
    BadValue {
        key: String,
        value: String,
        expected: &'static str,
    },
}

/// An ordered set of `key = value` pairs parsed from text.
#[derive(Debug, Clone, Default)]
pub struct KvDoc {
    entries: Vec<(String, String)>,
}

impl KvDoc {
    pub fn parse(text: &str) -> Result<Self, KvError> {
        let mut entries: Vec<(String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| KvError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(KvError::Syntax {
                    line: i + 1,
                    text: raw.to_string(),
                });
            }
            if entries.iter().any(|(k, _)| k == key) {
                return Err(KvError::DuplicateKey(key.to_string()));
            }
            entries.push((key.to_string(), value.to_string()));
        }
        Ok(Self { entries })
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, KvError> {
        self.get(key).ok_or_else(|| KvError::MissingKey(key.into()))
    }

    pub fn f64(&self, key: &str) -> Result<f64, KvError> {
        let v = self.require(key)?;
        v.parse().map_err(|_| KvError::BadValue {
            key: key.into(),
            value: v.into(),
            expected: "a floating-point number",
        })
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, KvError> {
        match self.get(key) {
            None => Ok(default),
            Some(_) => self.f64(key),
        }
    }

    pub fn u64(&self, key: &str) -> Result<u64, KvError> {
        let v = self.require(key)?;
        v.parse().map_err(|_| KvError::BadValue {
            key: key.into(),
            value: v.into(),
            expected: "an unsigned integer",
        })
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, KvError> {
        match self.get(key) {
            None => Ok(default),
            Some(_) => self.u64(key),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, KvError> {
        Ok(self.u64_or(key, default as u64)? as usize)
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, KvError> {
        match self.get(key) {
            None => Ok(default),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(v) => Err(KvError::BadValue {
                key: key.into(),
                value: v.into(),
                expected: "a boolean (true/false)",
            }),
        }
    }

    /// Rejects any key that is not in `allowed`, naming the offender.
    pub fn check_known(&self, allowed: &[&str]) -> Result<(), KvError> {
        for (k, _) in &self.entries {
            if !allowed.contains(&k.as_str()) {
                return Err(KvError::UnknownKey(k.clone()));
            }
        }
        Ok(())
    }

    /// New document holding the keys under `prefix.` with the prefix stripped.
    pub fn section(&self, prefix: &str) -> KvDoc {
        let lead = format!("{prefix}.");
        KvDoc {
            entries: self
                .entries
                .iter()
                .filter_map(|(k, v)| {
                    k.strip_prefix(&lead)
                        .map(|rest| (rest.to_string(), v.clone()))
                })
                .collect(),
        }
    }
}

/// Renders pairs as a parseable document, one pair per line, in the given order.
pub fn write_kv(pairs: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(v);
        out.push('\n');
    }
    out
}
