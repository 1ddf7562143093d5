//! Model file format.
//!
//! A UTF-8 text file of tab-separated lines:
//!
//! ```text
//! concernmap-model  1
//! alpha             <f64>
//! concerns          <K>
//! concern           <name>  <log prior +>  <log prior ->        (K lines)
//! vocabulary        <V>
//! token             <tok>   <ln P(t|+)_1>  <ln P(t|-)_1> ... <ln P(t|+)_K>  <ln P(t|-)_K>   (V lines, sorted)
//! fingerprint       <64 hex chars>
//! ```
//!
//! Reals use Rust's shortest round-trip representation, so a load/save cycle
//! is bit-exact. The fingerprint is the SHA-256 of every byte before the
//! `fingerprint` line.

use std::fmt::Write as _;

use crate::corpus::validate_concern_name;
use crate::digest::Digest;

use super::model::{ClassifierModel, ConcernParams};

pub const MODEL_MAGIC: &str = "concernmap-model";
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelFormatError {
    #[error("not a model file (missing `{MODEL_MAGIC}` header)")]
    NotAModel,
    #[error("unsupported model format version {found} (this build reads version {supported})")]
    UnsupportedVersion { found: String, supported: u32 },
    #[error("malformed model file at line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("model file truncated: {0}")]
    Truncated(String),
    #[error("model fingerprint mismatch: file says {stored}, content hashes to {computed}")]
    FingerprintMismatch { stored: String, computed: String },
}

pub(crate) fn body(model: &ClassifierModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MODEL_MAGIC}\t{MODEL_FORMAT_VERSION}");
    let _ = writeln!(out, "alpha\t{:?}", model.alpha());
    let _ = writeln!(out, "concerns\t{}", model.concerns().len());
    for (name, p) in model.concerns().iter().zip(model.params()) {
        let _ = writeln!(
            out,
            "concern\t{name}\t{:?}\t{:?}",
            p.log_prior_positive, p.log_prior_negative
        );
    }
    let _ = writeln!(out, "vocabulary\t{}", model.vocabulary().len());
    for (t, token) in model.vocabulary().iter().enumerate() {
        out.push_str("token\t");
        out.push_str(token);
        for p in model.params() {
            let _ = write!(
                out,
                "\t{:?}\t{:?}",
                p.log_likelihood_positive[t], p.log_likelihood_negative[t]
            );
        }
        out.push('\n');
    }
    out
}

/// Serializes a model.
pub fn save_model(model: &ClassifierModel) -> Vec<u8> {
    let mut text = body(model);
    let _ = writeln!(text, "fingerprint\t{}", model.fingerprint());
    text.into_bytes()
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Split<'a, char>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), ModelFormatError> {
        match self.inner.next() {
            Some((i, line)) if !line.is_empty() => Ok((i + 1, line.split('\t').collect())),
            _ => Err(ModelFormatError::Truncated(format!("expected {what}"))),
        }
    }
}

fn malformed(line: usize, message: impl Into<String>) -> ModelFormatError {
    ModelFormatError::Malformed {
        line,
        message: message.into(),
    }
}

fn keyed<'a>(
    line: usize,
    fields: &[&'a str],
    key: &str,
    arity: usize,
) -> Result<Vec<&'a str>, ModelFormatError> {
    if fields.first() != Some(&key) {
        return Err(malformed(line, format!("expected `{key}` record")));
    }
    if fields.len() != arity + 1 {
        return Err(malformed(
            line,
            format!("`{key}` record has {} fields, expected {arity}", fields.len() - 1),
        ));
    }
    Ok(fields[1..].to_vec())
}

fn real(line: usize, s: &str) -> Result<f64, ModelFormatError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(malformed(line, format!("`{s}` is not a finite real"))),
    }
}

fn count(line: usize, s: &str) -> Result<usize, ModelFormatError> {
    s.parse::<usize>()
        .map_err(|_| malformed(line, format!("`{s}` is not a count")))
}

/// Parses a model written by [`save_model`], verifying its fingerprint.
pub fn load_model(bytes: &[u8]) -> Result<ClassifierModel, ModelFormatError> {
    let text = std::str::from_utf8(bytes).map_err(|_| ModelFormatError::NotAModel)?;
    let mut lines = Lines {
        inner: text.split('\n').enumerate(),
    };

    let (_, header) = lines.next("header").map_err(|_| ModelFormatError::NotAModel)?;
    if header.len() != 2 || header[0] != MODEL_MAGIC {
        return Err(ModelFormatError::NotAModel);
    }
    if header[1] != MODEL_FORMAT_VERSION.to_string() {
        return Err(ModelFormatError::UnsupportedVersion {
            found: header[1].to_string(),
            supported: MODEL_FORMAT_VERSION,
        });
    }

    let (n, f) = lines.next("alpha")?;
    let alpha = real(n, keyed(n, &f, "alpha", 1)?[0])?;
    if alpha <= 0.0 {
        return Err(malformed(n, "alpha must be positive"));
    }

    let (n, f) = lines.next("concern count")?;
    let k = count(n, keyed(n, &f, "concerns", 1)?[0])?;
    if k < 2 {
        return Err(malformed(n, "a model needs at least 2 concerns"));
    }
    let mut concerns = Vec::with_capacity(k);
    let mut priors = Vec::with_capacity(k);
    for _ in 0..k {
        let (n, f) = lines.next("concern record")?;
        let v = keyed(n, &f, "concern", 3)?;
        validate_concern_name(v[0]).map_err(|e| malformed(n, e.to_string()))?;
        if concerns.iter().any(|c| c == v[0]) {
            return Err(malformed(n, format!("duplicate concern `{}`", v[0])));
        }
        concerns.push(v[0].to_string());
        priors.push((real(n, v[1])?, real(n, v[2])?));
    }

    let (n, f) = lines.next("vocabulary size")?;
    let v_size = count(n, keyed(n, &f, "vocabulary", 1)?[0])?;
    let mut vocabulary: Vec<String> = Vec::with_capacity(v_size);
    let mut params: Vec<ConcernParams> = priors
        .iter()
        .map(|&(p, q)| ConcernParams {
            log_prior_positive: p,
            log_prior_negative: q,
            log_likelihood_positive: Vec::with_capacity(v_size),
            log_likelihood_negative: Vec::with_capacity(v_size),
        })
        .collect();
    for _ in 0..v_size {
        let (n, f) = lines.next("token record")?;
        let v = keyed(n, &f, "token", 1 + 2 * k)?;
        let token = v[0];
        if token.is_empty() || vocabulary.last().is_some_and(|prev| prev.as_str() >= token) {
            return Err(malformed(n, "vocabulary must be sorted and unique"));
        }
        vocabulary.push(token.to_string());
        for (c, p) in params.iter_mut().enumerate() {
            p.log_likelihood_positive.push(real(n, v[1 + 2 * c])?);
            p.log_likelihood_negative.push(real(n, v[2 + 2 * c])?);
        }
    }

    let (n, f) = lines.next("fingerprint")?;
    let stored = keyed(n, &f, "fingerprint", 1)?[0];
    let stored_digest: Digest = stored.parse().map_err(|e| malformed(n, format!("{e}")))?;
    if let Some((n, rest)) = lines.inner.next() {
        if !rest.is_empty() || lines.inner.next().is_some() {
            return Err(malformed(n + 1, "trailing data after fingerprint"));
        }
    }

    let model = ClassifierModel::from_parts(concerns, vocabulary, params, alpha);
    if model.fingerprint() != stored_digest {
        return Err(ModelFormatError::FingerprintMismatch {
            stored: stored.to_string(),
            computed: model.fingerprint().to_hex(),
        });
    }
    Ok(model)
}
