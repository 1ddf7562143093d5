use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::corpus::{package_of, SourceEntity, TOKENIZER_VERSION};
use crate::digest::Digest;
use crate::textfmt::{escape_field, fmt_vector, parse_vector, unescape_field};
use crate::UNKNOWN;

use super::cluster::{ClusterId, ClusterSpace};
use super::RecoverError;

/// Which entity size drives visualization weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WeightMeasure {
    #[default]
    Bytes,
    PhysicalSloc,
    LogicalSloc,
}

impl WeightMeasure {
    pub fn as_str(&self) -> &'static str {
        match self {
            WeightMeasure::Bytes => "bytes",
            WeightMeasure::PhysicalSloc => "physical-sloc",
            WeightMeasure::LogicalSloc => "logical-sloc",
        }
    }

    pub fn of(&self, entity: &SourceEntity) -> u64 {
        match self {
            WeightMeasure::Bytes => entity.byte_size,
            WeightMeasure::PhysicalSloc => entity.physical_sloc,
            WeightMeasure::LogicalSloc => entity.logical_sloc,
        }
    }
}

impl fmt::Display for WeightMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightMeasure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bytes" => Ok(WeightMeasure::Bytes),
            "physical-sloc" | "psloc" => Ok(WeightMeasure::PhysicalSloc),
            "logical-sloc" | "lsloc" => Ok(WeightMeasure::LogicalSloc),
            other => Err(format!(
                "unknown weight measure `{other}` (expected bytes, physical-sloc or logical-sloc)"
            )),
        }
    }
}

/// Settings that influence a recovery result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryConfig {
    /// Entities whose affinities are all below this go to Unknown.
    pub unknown_threshold: f64,
    pub weight_measure: WeightMeasure,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig {
            unknown_threshold: 0.5,
            weight_measure: WeightMeasure::Bytes,
        }
    }
}

impl RecoveryConfig {
    pub fn validate(&self) -> Result<(), RecoverError> {
        if (0.0..=1.0).contains(&self.unknown_threshold) {
            Ok(())
        } else {
            Err(RecoverError::InvalidThreshold(self.unknown_threshold))
        }
    }

    /// Canonical text fed to the config fingerprint.
    pub fn canonical(&self) -> String {
        format!(
            "unknown_threshold\t{:?}\nweight_measure\t{}\ntokenizer\t{}\n",
            self.unknown_threshold, self.weight_measure, TOKENIZER_VERSION
        )
    }

    pub fn fingerprint(&self) -> Digest {
        Digest::of(self.canonical().as_bytes())
    }
}

/// Classification of one entity.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityRecord {
    pub entity: SourceEntity,
    /// One affinity per concern, in classifier order.
    pub affinities: Vec<f64>,
    /// Concern name or [`UNKNOWN`].
    pub main_concern: String,
}

impl EntityRecord {
    pub fn path(&self) -> &str {
        &self.entity.path
    }

    pub fn weight(&self, measure: WeightMeasure) -> u64 {
        measure.of(&self.entity)
    }
}

/// A cluster and its member paths (sorted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub name: String,
    pub members: Vec<String>,
}

/// The additive unit of recovery: classified entities plus their clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    classifier_fingerprint: Digest,
    config_fingerprint: Digest,
    concerns: Vec<String>,
    config: RecoveryConfig,
    records: Vec<EntityRecord>,
    clusters: Vec<Cluster>,
}

impl RecoveryResult {
    /// A result without entities; the identity of [`super::merge`].
    pub fn empty(classifier_fingerprint: Digest, concerns: Vec<String>, config: RecoveryConfig) -> Self {
        Self::from_records(classifier_fingerprint, concerns, config, Vec::new())
            .expect("no records, no duplicates")
    }

    /// Sorts records by path and derives the cluster roster from each
    /// record's main concern.
    pub fn from_records(
        classifier_fingerprint: Digest,
        concerns: Vec<String>,
        config: RecoveryConfig,
        records: Vec<EntityRecord>,
    ) -> Result<Self, RecoverError> {
        Self::with_config_fingerprint(
            classifier_fingerprint,
            config.fingerprint(),
            concerns,
            config,
            records,
        )
    }

    fn with_config_fingerprint(
        classifier_fingerprint: Digest,
        config_fingerprint: Digest,
        concerns: Vec<String>,
        config: RecoveryConfig,
        mut records: Vec<EntityRecord>,
    ) -> Result<Self, RecoverError> {
        records.sort_by(|a, b| a.entity.path.cmp(&b.entity.path));
        let dups: BTreeSet<String> = records
            .windows(2)
            .filter(|w| w[0].entity.path == w[1].entity.path)
            .map(|w| w[0].entity.path.clone())
            .collect();
        if !dups.is_empty() {
            return Err(RecoverError::DuplicatePaths(dups.into_iter().collect()));
        }
        let mut clusters: Vec<Cluster> = concerns
            .iter()
            .map(String::as_str)
            .chain([UNKNOWN])
            .map(|name| Cluster {
                name: name.to_string(),
                members: Vec::new(),
            })
            .collect();
        for r in &records {
            let slot = if r.main_concern == UNKNOWN {
                concerns.len()
            } else {
                concerns
                    .iter()
                    .position(|c| *c == r.main_concern)
                    .ok_or_else(|| RecoverError::UnknownConcern(r.main_concern.clone()))?
            };
            clusters[slot].members.push(r.entity.path.clone());
        }
        Ok(RecoveryResult {
            classifier_fingerprint,
            config_fingerprint,
            concerns,
            config,
            records,
            clusters,
        })
    }

    pub fn classifier_fingerprint(&self) -> Digest {
        self.classifier_fingerprint
    }

    pub fn config_fingerprint(&self) -> Digest {
        self.config_fingerprint
    }

    pub fn concerns(&self) -> &[String] {
        &self.concerns
    }

    pub fn config(&self) -> &RecoveryConfig {
        &self.config
    }

    /// Sorted by path.
    pub fn records(&self) -> &[EntityRecord] {
        &self.records
    }

    pub fn record(&self, path: &str) -> Option<&EntityRecord> {
        self.records
            .binary_search_by(|r| r.entity.path.as_str().cmp(path))
            .ok()
            .map(|i| &self.records[i])
    }

    /// Concern clusters in classifier order, then Unknown.
    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster(&self, name: &str) -> Option<&Cluster> {
        self.clusters.iter().find(|c| c.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub(crate) fn into_records(self) -> Vec<EntityRecord> {
        self.records
    }

    /// Whether two results come from the same classifier and configuration.
    pub fn composable_with(&self, other: &RecoveryResult) -> bool {
        self.classifier_fingerprint == other.classifier_fingerprint
            && self.config_fingerprint == other.config_fingerprint
            && self.concerns == other.concerns
    }

    /// Same classifier, concerns and config fingerprint as `self`, new records.
    pub(crate) fn with_records(&self, records: Vec<EntityRecord>) -> Result<Self, RecoverError> {
        Self::with_config_fingerprint(
            self.classifier_fingerprint,
            self.config_fingerprint,
            self.concerns.clone(),
            self.config,
            records,
        )
    }
}

pub const RESULT_MAGIC: &str = "concernmap-result";
pub const RESULT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResultFormatError {
    #[error("not a recovery result file")]
    NotAResult,
    #[error("unsupported result format version {0}")]
    UnsupportedVersion(String),
    #[error("malformed result file at line {line}: {message}")]
    Malformed { line: usize, message: String },
}

impl RecoveryResult {
    /// Canonical serialization: header, entity table, cluster roster.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{RESULT_MAGIC}\t{RESULT_FORMAT_VERSION}");
        let _ = writeln!(out, "classifier\t{}", self.classifier_fingerprint);
        let _ = writeln!(out, "config\t{}", self.config_fingerprint);
        let _ = writeln!(out, "unknown_threshold\t{:?}", self.config.unknown_threshold);
        let _ = writeln!(out, "weight_measure\t{}", self.config.weight_measure);
        let _ = writeln!(out, "concerns\t{}", self.concerns.join("\t"));
        let _ = writeln!(out, "entities\t{}", self.records.len());
        for r in &self.records {
            let e = &r.entity;
            let _ = writeln!(
                out,
                "entity\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                escape_field(&e.path),
                e.content_hash,
                e.byte_size,
                e.physical_sloc,
                e.logical_sloc,
                r.main_concern,
                fmt_vector(&r.affinities)
            );
        }
        let _ = writeln!(out, "clusters\t{}", self.clusters.len());
        for c in &self.clusters {
            let _ = writeln!(out, "cluster\t{}\t{}", c.name, c.members.len());
            for m in &c.members {
                let _ = writeln!(out, "member\t{}", escape_field(m));
            }
        }
        out
    }

    /// Parses [`RecoveryResult::to_text`] output and checks that the roster
    /// and every main concern agree with the affinities.
    pub fn from_text(text: &str) -> Result<Self, ResultFormatError> {
        let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));
        let bad = |line: usize, message: &str| ResultFormatError::Malformed {
            line,
            message: message.to_string(),
        };
        let mut next = |key: &str| -> Result<(usize, Vec<&str>), ResultFormatError> {
            let (n, line) = lines
                .next()
                .ok_or_else(|| bad(0, &format!("truncated before `{key}`")))?;
            let fields: Vec<&str> = line.split('\t').collect();
            if fields[0] != key {
                return Err(bad(n, &format!("expected `{key}`")));
            }
            Ok((n, fields[1..].to_vec()))
        };

        let (_, header) = next(RESULT_MAGIC).map_err(|_| ResultFormatError::NotAResult)?;
        if header != [RESULT_FORMAT_VERSION.to_string().as_str()] {
            return Err(ResultFormatError::UnsupportedVersion(header.join("\t")));
        }
        let digest = |n: usize, f: &[&str]| -> Result<Digest, ResultFormatError> {
            f.first()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(n, "bad digest"))
        };
        let (n, f) = next("classifier")?;
        let classifier = digest(n, &f)?;
        let (n, f) = next("config")?;
        let config_fp = digest(n, &f)?;
        let (n, f) = next("unknown_threshold")?;
        let unknown_threshold: f64 = f
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(n, "bad threshold"))?;
        let (n, f) = next("weight_measure")?;
        let weight_measure: WeightMeasure = f
            .first()
            .ok_or_else(|| bad(n, "missing weight measure"))?
            .parse()
            .map_err(|e: String| bad(n, &e))?;
        let config = RecoveryConfig {
            unknown_threshold,
            weight_measure,
        };
        let (n, f) = next("concerns")?;
        let concerns: Vec<String> = f.iter().map(|s| s.to_string()).collect();
        if concerns.iter().any(|c| c.is_empty() || c == UNKNOWN) {
            return Err(bad(n, "invalid concern list"));
        }
        let space = ClusterSpace::orthogonal(concerns.len());

        let (n, f) = next("entities")?;
        let count: usize = f
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(n, "bad entity count"))?;
        let mut records = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, f) = next("entity")?;
            if f.len() != 7 {
                return Err(bad(n, "entity record needs 7 fields"));
            }
            let path = unescape_field(f[0]).ok_or_else(|| bad(n, "bad path escape"))?;
            let num = |s: &str| s.parse::<u64>().map_err(|_| bad(n, "bad size"));
            let affinities = parse_vector(f[6]).ok_or_else(|| bad(n, "bad affinities"))?;
            if affinities.len() != concerns.len()
                || affinities.iter().any(|a| !(0.0..=1.0).contains(a))
            {
                return Err(bad(n, "affinity vector does not match concerns"));
            }
            let expected = space.assign(&affinities, unknown_threshold).name(&concerns).to_string();
            if f[5] != expected {
                return Err(bad(n, "main concern disagrees with affinities"));
            }
            records.push(EntityRecord {
                entity: SourceEntity {
                    package: package_of(&path),
                    path,
                    content_hash: f[1].parse().map_err(|_| bad(n, "bad content hash"))?,
                    byte_size: num(f[2])?,
                    physical_sloc: num(f[3])?,
                    logical_sloc: num(f[4])?,
                },
                affinities,
                main_concern: expected,
            });
        }
        let sorted = records.windows(2).all(|w| w[0].entity.path < w[1].entity.path);
        let result = RecoveryResult::with_config_fingerprint(
            classifier, config_fp, concerns, config, records,
        )
        .map_err(|e| bad(n, &e.to_string()))?;
        if !sorted {
            return Err(bad(n, "entities not sorted by path"));
        }

        let (n, f) = next("clusters")?;
        if f != [result.clusters.len().to_string().as_str()] {
            return Err(bad(n, "cluster count mismatch"));
        }
        for cluster in &result.clusters {
            let (n, f) = next("cluster")?;
            if f != [cluster.name.as_str(), cluster.members.len().to_string().as_str()] {
                return Err(bad(n, "cluster roster disagrees with entities"));
            }
            for member in &cluster.members {
                let (n, f) = next("member")?;
                if f.len() != 1 || unescape_field(f[0]).as_deref() != Some(member.as_str()) {
                    return Err(bad(n, "cluster roster disagrees with entities"));
                }
            }
        }
        match lines.next() {
            Some((_, "")) | None => {}
            Some((n, _)) => return Err(bad(n, "trailing data")),
        }
        if lines.next().is_some() {
            return Err(bad(0, "trailing data"));
        }
        Ok(result)
    }
}

pub(crate) fn record_for(
    entity: SourceEntity,
    affinities: Vec<f64>,
    concerns: &[String],
    space: &ClusterSpace,
    threshold: f64,
) -> EntityRecord {
    let main_concern = space.assign(&affinities, threshold).name(concerns).to_string();
    EntityRecord {
        entity,
        affinities,
        main_concern,
    }
}

pub(crate) fn cluster_of(record: &EntityRecord, concerns: &[String]) -> ClusterId {
    concerns
        .iter()
        .position(|c| *c == record.main_concern)
        .map_or(ClusterId::Unknown, ClusterId::Concern)
}
