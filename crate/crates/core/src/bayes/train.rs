use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{TokenBag, TrainingCorpus};
use crate::exec::Execution;

use super::confusion::ConfusionMatrix;
use super::model::{ClassifierModel, ConcernParams};
use super::BayesError;

/// Knobs for candidate generation and selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingOptions {
    /// Laplace smoothing.
    pub alpha: f64,
    pub n_candidates: usize,
    /// Fraction of documents held out to score each candidate.
    pub holdout_fraction: f64,
    /// Candidates use seeds `base_seed .. base_seed + n_candidates`.
    pub base_seed: u64,
}

impl Default for TrainingOptions {
    fn default() -> Self {
        TrainingOptions {
            alpha: 1.0,
            n_candidates: 10,
            holdout_fraction: 1.0 / 3.0,
            base_seed: 0,
        }
    }
}

/// Accuracy of one candidate on its held-out documents.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateReport {
    pub candidate_id: String,
    pub matrix: ConfusionMatrix,
    /// Always `matrix.accuracy()`.
    pub accuracy: f64,
    pub split_seed: u64,
}

/// Outcome of [`train_and_select`].
#[derive(Debug, Clone)]
pub struct Selection {
    /// Retrained on the full corpus.
    pub model: ClassifierModel,
    /// Reports of every candidate that trained successfully, in seed order.
    pub reports: Vec<CandidateReport>,
    pub winner: String,
    /// Seeds whose split was degenerate.
    pub failures: Vec<(u64, BayesError)>,
}

pub fn candidate_id(seed: u64) -> String {
    format!("trial-{seed}")
}

fn check_alpha(alpha: f64) -> Result<(), BayesError> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(BayesError::InvalidAlpha(alpha))
    }
}

/// Fits one-vs-rest models on the given labelled documents.
fn fit(concerns: &[String], docs: &[(usize, &TokenBag)], alpha: f64) -> ClassifierModel {
    let k = concerns.len();
    let mut per_concern: Vec<BTreeMap<&str, u64>> = vec![BTreeMap::new(); k];
    let mut doc_counts = vec![0u64; k];
    for &(label, bag) in docs {
        doc_counts[label] += 1;
        for (token, c) in bag.iter() {
            *per_concern[label].entry(token).or_insert(0) += u64::from(c);
        }
    }
    let mut all: BTreeMap<&str, u64> = BTreeMap::new();
    for counts in &per_concern {
        for (&t, &c) in counts {
            *all.entry(t).or_insert(0) += c;
        }
    }
    let vocabulary: Vec<String> = all.keys().map(|t| t.to_string()).collect();
    let v = vocabulary.len() as f64;
    let n_docs = docs.len() as f64;
    let grand_total: u64 = all.values().sum();

    let params = (0..k)
        .map(|c| {
            let pos_total: u64 = per_concern[c].values().sum();
            let neg_total = grand_total - pos_total;
            let pos_den = pos_total as f64 + alpha * v;
            let neg_den = neg_total as f64 + alpha * v;
            let mut lpos = Vec::with_capacity(all.len());
            let mut lneg = Vec::with_capacity(all.len());
            for (t, &total) in &all {
                let pos = per_concern[c].get(t).copied().unwrap_or(0);
                let neg = total - pos;
                lpos.push(((pos as f64 + alpha) / pos_den).ln());
                lneg.push(((neg as f64 + alpha) / neg_den).ln());
            }
            let pos_docs = doc_counts[c] as f64;
            ConcernParams {
                log_prior_positive: (pos_docs / n_docs).ln(),
                log_prior_negative: ((n_docs - pos_docs) / n_docs).ln(),
                log_likelihood_positive: lpos,
                log_likelihood_negative: lneg,
            }
        })
        .collect();
    ClassifierModel::from_parts(concerns.to_vec(), vocabulary, params, alpha)
}

/// Trains on every document of the corpus.
pub fn train(corpus: &TrainingCorpus, alpha: f64) -> Result<ClassifierModel, BayesError> {
    check_alpha(alpha)?;
    let docs: Vec<(usize, &TokenBag)> = corpus.labelled().collect();
    Ok(fit(corpus.concerns(), &docs, alpha))
}

/// Trains one candidate on a seeded random split and scores it on the
/// held-out part.
///
/// The hold-out size is `round(n * holdout_fraction)` clamped to `1..n`.
pub fn train_candidate(
    corpus: &TrainingCorpus,
    split_seed: u64,
    holdout_fraction: f64,
    alpha: f64,
) -> Result<(ClassifierModel, CandidateReport), BayesError> {
    check_alpha(alpha)?;
    if !(holdout_fraction > 0.0 && holdout_fraction < 1.0) {
        return Err(BayesError::InvalidHoldout(holdout_fraction));
    }
    let labelled: Vec<(usize, &TokenBag)> = corpus.labelled().collect();
    let n = labelled.len();
    let held = ((n as f64 * holdout_fraction).round() as usize).clamp(1, n - 1);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(split_seed));
    let (test_idx, train_idx) = order.split_at(held);
    let mut train_idx = train_idx.to_vec();
    let mut test_idx = test_idx.to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();

    let train_docs: Vec<(usize, &TokenBag)> = train_idx.iter().map(|&i| labelled[i]).collect();
    for (c, name) in corpus.concerns().iter().enumerate() {
        if !train_docs.iter().any(|&(label, _)| label == c) {
            return Err(BayesError::DegenerateSplit {
                concern: name.clone(),
                seed: split_seed,
            });
        }
    }
    let model = fit(corpus.concerns(), &train_docs, alpha);

    let mut matrix = ConfusionMatrix::new(corpus.concerns().to_vec());
    for &i in &test_idx {
        let (label, doc) = labelled[i];
        matrix.record(label, model.predict(doc));
    }
    let report = CandidateReport {
        candidate_id: candidate_id(split_seed),
        accuracy: matrix.accuracy(),
        matrix,
        split_seed,
    };
    Ok((model, report))
}

/// Highest accuracy wins; ties go to the smaller seed, then the smaller id.
pub fn select_best(candidates: &[CandidateReport]) -> Result<&CandidateReport, BayesError> {
    candidates
        .iter()
        .min_by(|a, b| {
            b.accuracy
                .total_cmp(&a.accuracy)
                .then(a.split_seed.cmp(&b.split_seed))
                .then_with(|| a.candidate_id.cmp(&b.candidate_id))
        })
        .ok_or(BayesError::NoCandidates)
}

/// Trains `n_candidates` candidates, selects the most accurate one and
/// retrains its configuration on the full corpus.
pub fn train_and_select(
    corpus: &TrainingCorpus,
    options: &TrainingOptions,
    exec: Execution,
) -> Result<Selection, BayesError> {
    if options.n_candidates == 0 {
        return Err(BayesError::NoCandidates);
    }
    check_alpha(options.alpha)?;
    let seeds: Vec<u64> = (0..options.n_candidates as u64)
        .map(|i| options.base_seed.wrapping_add(i))
        .collect();
    let outcomes = exec.map(&seeds, |&seed| {
        train_candidate(corpus, seed, options.holdout_fraction, options.alpha)
            .map(|(_, report)| report)
    });

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (seed, outcome) in seeds.into_iter().zip(outcomes) {
        match outcome {
            Ok(r) => reports.push(r),
            Err(e @ BayesError::DegenerateSplit { .. }) => failures.push((seed, e)),
            Err(e) => return Err(e),
        }
    }
    if reports.is_empty() {
        return Err(BayesError::AllCandidatesFailed(failures.len()));
    }
    let winner = select_best(&reports)?.candidate_id.clone();
    let model = train(corpus, options.alpha)?;
    Ok(Selection {
        model,
        reports,
        winner,
        failures,
    })
}

/// Plain-text selection report: one block per candidate with its accuracy
/// and confusion matrix, then the chosen candidate.
pub fn render_reports(selection: &Selection) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    for r in &selection.reports {
        let _ = writeln!(
            out,
            "{}  seed {}  accuracy {:.4} ({}/{})",
            r.candidate_id,
            r.split_seed,
            r.accuracy,
            r.matrix.correct(),
            r.matrix.total()
        );
        let _ = writeln!(out, "{}", r.matrix);
    }
    for (seed, e) in &selection.failures {
        let _ = writeln!(out, "{}  skipped: {e}\n", candidate_id(*seed));
    }
    let _ = writeln!(out, "selected {}", selection.winner);
    let _ = writeln!(out, "model fingerprint {}", selection.model.fingerprint());
    out
}
