//! Classification of entities into concern clusters.
//!
//! Each entity is classified on its own, which makes results additive:
//! recoveries of disjoint parts [`merge`] into the recovery of the whole, and
//! [`incremental_recover`] only classifies entities whose content changed.

mod cache;
mod cluster;
mod output;
mod result;

use std::collections::{BTreeSet, HashMap};

use crate::bayes::ClassifierModel;
use crate::corpus::{tokenize, ScannedFile};
use crate::digest::Digest;
use crate::exec::Execution;

pub use cache::{CacheKey, RecoveryCache, CACHE_FORMAT_VERSION};
pub use cluster::{assign_cluster, cosine_similarity, ClusterId, ClusterSpace};
pub use output::{render_clusters, render_entities, write_textual_output, OutputFiles};
pub use result::{
    Cluster, EntityRecord, RecoveryConfig, RecoveryResult, ResultFormatError, WeightMeasure,
    RESULT_FORMAT_VERSION, RESULT_MAGIC,
};

pub(crate) use result::{cluster_of, record_for};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecoverError {
    #[error("unknown threshold must lie in [0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("duplicate entity paths: {}", .0.join(", "))]
    DuplicatePaths(Vec<String>),
    #[error("record names concern `{0}`, which the classifier does not know")]
    UnknownConcern(String),
    #[error("results from different classifiers or configurations cannot be composed")]
    NotComposable,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RecoverOptions {
    /// Re-classify every cache hit and compare with the cached vector.
    pub audit: bool,
    pub exec: Execution,
}

/// What a recovery run did.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RecoverStats {
    /// Entities whose affinities came from a previous result or the cache.
    pub reused: usize,
    /// Entities classified afresh.
    pub reclassified: usize,
    /// Paths not present in the previous result.
    pub added: usize,
    /// Paths of the previous result that are gone.
    pub removed: usize,
    /// Cache hits re-verified in audit mode.
    pub audited: usize,
    /// Audited hits whose cached vector differed from a fresh
    /// classification. The fresh vector is used.
    pub audit_mismatches: usize,
}

#[derive(Debug, Clone)]
pub struct RecoveryRun {
    pub result: RecoveryResult,
    pub stats: RecoverStats,
    pub warnings: Vec<String>,
}

/// Affinity vector of raw entity text.
pub fn classify_text(model: &ClassifierModel, text: &str) -> Vec<f64> {
    model.affinity_vector(&tokenize(text))
}

fn usable(v: &[f64], k: usize) -> bool {
    v.len() == k && v.iter().all(|a| (0.0..=1.0).contains(a))
}

fn same_bits(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

fn recover_inner(
    files: &[ScannedFile],
    model: &ClassifierModel,
    cache: &mut RecoveryCache,
    config: &RecoveryConfig,
    options: &RecoverOptions,
    prior: &HashMap<Digest, &[f64]>,
) -> Result<RecoveryRun, RecoverError> {
    config.validate()?;
    let mut paths: Vec<&str> = files.iter().map(|f| f.path()).collect();
    paths.sort_unstable();
    let dups: BTreeSet<String> = paths
        .windows(2)
        .filter(|w| w[0] == w[1])
        .map(|w| w[0].to_string())
        .collect();
    if !dups.is_empty() {
        return Err(RecoverError::DuplicatePaths(dups.into_iter().collect()));
    }

    let k = model.concerns().len();
    let classifier = model.fingerprint();
    let config_fp = config.fingerprint();
    let key_of = |f: &ScannedFile| CacheKey {
        content_hash: f.entity.content_hash,
        classifier,
        config: config_fp,
    };

    let known: Vec<Option<Vec<f64>>> = files
        .iter()
        .map(|f| {
            prior
                .get(&f.entity.content_hash)
                .copied()
                .or_else(|| cache.get(&key_of(f)))
                .filter(|v| usable(v, k))
                .map(<[f64]>::to_vec)
        })
        .collect();

    // Fresh classification for misses, and for hits too when auditing.
    let work: Vec<usize> = (0..files.len())
        .filter(|&i| options.audit || known[i].is_none())
        .collect();
    let fresh = options
        .exec
        .map(&work, |&i| classify_text(model, &files[i].text));

    let mut computed: Vec<Option<Vec<f64>>> = vec![None; files.len()];
    for (i, v) in work.into_iter().zip(fresh) {
        computed[i] = Some(v);
    }

    let mut stats = RecoverStats::default();
    let mut warnings = Vec::new();
    let mut affinities = known;
    for (i, (slot, computed)) in affinities.iter_mut().zip(computed).enumerate() {
        match (slot.as_ref(), computed) {
            (Some(cached), Some(v)) => {
                stats.audited += 1;
                stats.reused += 1;
                if !same_bits(cached, &v) {
                    stats.audit_mismatches += 1;
                    warnings.push(format!(
                        "audit: cached affinities for {} differ from a fresh classification",
                        files[i].path()
                    ));
                    cache.insert(key_of(&files[i]), v.clone());
                    *slot = Some(v);
                }
            }
            (Some(_), None) => stats.reused += 1,
            (None, Some(v)) => {
                stats.reclassified += 1;
                cache.insert(key_of(&files[i]), v.clone());
                *slot = Some(v);
            }
            (None, None) => unreachable!("every miss is classified"),
        }
    }
    for (f, a) in files.iter().zip(&affinities) {
        let key = key_of(f);
        if cache.get(&key).is_none() {
            if let Some(a) = a {
                cache.insert(key, a.clone());
            }
        }
    }

    let space = ClusterSpace::orthogonal(k);
    let records = files
        .iter()
        .zip(affinities)
        .map(|(f, a)| {
            record_for(
                f.entity.clone(),
                a.expect("filled above"),
                model.concerns(),
                &space,
                config.unknown_threshold,
            )
        })
        .collect();
    let result =
        RecoveryResult::from_records(classifier, model.concerns().to_vec(), *config, records)?;
    stats.added = files.len();
    Ok(RecoveryRun {
        result,
        stats,
        warnings,
    })
}

/// Classifies every entity (or takes its vector from the cache), assigns
/// clusters and assembles a canonical result. Newly computed vectors are
/// added to `cache`.
pub fn recover(
    files: &[ScannedFile],
    model: &ClassifierModel,
    cache: &mut RecoveryCache,
    config: &RecoveryConfig,
    options: &RecoverOptions,
) -> Result<RecoveryRun, RecoverError> {
    recover_inner(files, model, cache, config, options, &HashMap::new())
}

/// Recovers the current version reusing `previous` for every entity whose
/// content is unchanged (including renamed files). If `previous` was made
/// with another classifier or configuration a full recovery runs instead.
pub fn incremental_recover(
    previous: &RecoveryResult,
    files: &[ScannedFile],
    model: &ClassifierModel,
    cache: &mut RecoveryCache,
    config: &RecoveryConfig,
    options: &RecoverOptions,
) -> Result<RecoveryRun, RecoverError> {
    let compatible = previous.classifier_fingerprint() == model.fingerprint()
        && previous.config_fingerprint() == config.fingerprint()
        && previous.concerns() == model.concerns();
    let mut prior: HashMap<Digest, &[f64]> = HashMap::new();
    let mut warnings = Vec::new();
    if compatible {
        for r in previous.records() {
            prior.insert(r.entity.content_hash, &r.affinities);
        }
    } else {
        warnings.push(
            "previous result was produced with a different classifier or configuration; \
             running a full recovery"
                .to_string(),
        );
    }
    let mut run = recover_inner(files, model, cache, config, options, &prior)?;
    let old: BTreeSet<&str> = previous.records().iter().map(|r| r.path()).collect();
    let new: BTreeSet<&str> = files.iter().map(|f| f.path()).collect();
    run.stats.added = new.difference(&old).count();
    run.stats.removed = old.difference(&new).count();
    warnings.append(&mut run.warnings);
    run.warnings = warnings;
    Ok(run)
}

/// Union of two results over disjoint entity sets.
pub fn merge(a: &RecoveryResult, b: &RecoveryResult) -> Result<RecoveryResult, MergeError> {
    if !a.composable_with(b) {
        return Err(MergeError::FingerprintMismatch);
    }
    let left: BTreeSet<&str> = a.records().iter().map(|r| r.path()).collect();
    let overlap: Vec<String> = b
        .records()
        .iter()
        .map(|r| r.path())
        .filter(|p| left.contains(p))
        .map(str::to_string)
        .collect();
    if !overlap.is_empty() {
        return Err(MergeError::OverlappingPaths(overlap));
    }
    let mut records = a.clone().into_records();
    records.extend(b.records().iter().cloned());
    a.with_records(records)
        .map_err(|_| MergeError::FingerprintMismatch)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MergeError {
    #[error("results come from different classifiers or configurations and cannot be composed")]
    FingerprintMismatch,
    #[error("results share entity paths: {}", .0.join(", "))]
    OverlappingPaths(Vec<String>),
}
