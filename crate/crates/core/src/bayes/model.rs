use std::collections::HashMap;

use crate::corpus::TokenBag;
use crate::digest::Digest;

use super::format;

/// Parameters of one concern's binary (concern vs. rest) model.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcernParams {
    pub log_prior_positive: f64,
    pub log_prior_negative: f64,
    /// `ln P(token | concern)` in vocabulary order.
    pub log_likelihood_positive: Vec<f64>,
    /// `ln P(token | other concerns)` in vocabulary order.
    pub log_likelihood_negative: Vec<f64>,
}

/// One-vs-rest multinomial Naive Bayes over a shared vocabulary.
///
/// Immutable once built; the fingerprint is the SHA-256 of the canonical
/// serialized body, so equal parameters always give equal fingerprints.
#[derive(Debug, Clone)]
pub struct ClassifierModel {
    concerns: Vec<String>,
    vocabulary: Vec<String>,
    params: Vec<ConcernParams>,
    alpha: f64,
    fingerprint: Digest,
    index: HashMap<String, usize>,
    // log P(t|pos) - log P(t|neg), laid out [token * concerns + concern]
    log_ratio: Vec<f64>,
}

impl PartialEq for ClassifierModel {
    fn eq(&self, other: &Self) -> bool {
        self.concerns == other.concerns
            && self.vocabulary == other.vocabulary
            && self.params == other.params
            && self.alpha.to_bits() == other.alpha.to_bits()
            && self.fingerprint == other.fingerprint
    }
}

impl ClassifierModel {
    /// Assembles a model from raw parameters. Callers guarantee that
    /// `vocabulary` is sorted and unique and that every parameter vector has
    /// one entry per vocabulary token.
    pub(crate) fn from_parts(
        concerns: Vec<String>,
        vocabulary: Vec<String>,
        params: Vec<ConcernParams>,
        alpha: f64,
    ) -> Self {
        let k = concerns.len();
        let index = vocabulary
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let mut log_ratio = vec![0.0; vocabulary.len() * k];
        for (c, p) in params.iter().enumerate() {
            for t in 0..vocabulary.len() {
                log_ratio[t * k + c] =
                    p.log_likelihood_positive[t] - p.log_likelihood_negative[t];
            }
        }
        let mut model = ClassifierModel {
            concerns,
            vocabulary,
            params,
            alpha,
            fingerprint: Digest::default(),
            index,
            log_ratio,
        };
        model.fingerprint = Digest::of(format::body(&model).as_bytes());
        model
    }

    pub fn concerns(&self) -> &[String] {
        &self.concerns
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn params(&self) -> &[ConcernParams] {
        &self.params
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn fingerprint(&self) -> Digest {
        self.fingerprint
    }

    pub fn concern_index(&self, name: &str) -> Option<usize> {
        self.concerns.iter().position(|c| c == name)
    }

    /// Posterior probability of the positive class of each concern's model.
    ///
    /// Tokens outside the vocabulary carry no evidence, so an empty or fully
    /// unknown document yields each concern's prior. Components are
    /// independent and need not sum to one.
    pub fn affinity_vector(&self, doc: &TokenBag) -> Vec<f64> {
        let k = self.concerns.len();
        let mut log_odds: Vec<f64> = self
            .params
            .iter()
            .map(|p| p.log_prior_positive - p.log_prior_negative)
            .collect();
        for (token, count) in doc.iter() {
            let Some(&t) = self.index.get(token) else {
                continue;
            };
            let n = f64::from(count);
            for (acc, r) in log_odds.iter_mut().zip(&self.log_ratio[t * k..(t + 1) * k]) {
                *acc += n * r;
            }
        }
        log_odds.into_iter().map(logistic).collect()
    }

    /// Index of the concern with the highest affinity; ties go to the
    /// earlier concern.
    pub fn predict(&self, doc: &TokenBag) -> usize {
        argmax(&self.affinity_vector(doc))
    }
}

/// First index of the maximum.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// `1 / (1 + e^-x)` without overflow for large |x|.
fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
