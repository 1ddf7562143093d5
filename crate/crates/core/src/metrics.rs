//! Clustering comparison (MoJo, MoJoFM) and version diffs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use crate::recover::RecoveryResult;
use crate::textfmt::unescape_field;
use crate::viz::{build_tree, VizError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("empty group `{0}`")]
    EmptyGroup(String),
    #[error("`{0}` appears in more than one group")]
    Overlap(String),
    #[error("partitions are over different universes")]
    UniverseMismatch,
    #[error("maximum MoJo distance is undefined for fewer than 2 entities (got {0})")]
    DegenerateUniverse(usize),
    #[error("roster line {line}: expected `cluster<TAB>path`")]
    MalformedRoster { line: usize },
}

/// A set of named, non-empty, pairwise disjoint groups. The universe is their
/// union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    names: Vec<String>,
    groups: Vec<Vec<String>>,
    owner: HashMap<String, usize>,
}

impl Partition {
    pub fn new(groups: Vec<(String, Vec<String>)>) -> Result<Self, MetricsError> {
        let mut owner = HashMap::new();
        let mut names = Vec::with_capacity(groups.len());
        let mut members = Vec::with_capacity(groups.len());
        for (i, (name, mut items)) in groups.into_iter().enumerate() {
            if items.is_empty() {
                return Err(MetricsError::EmptyGroup(name));
            }
            items.sort_unstable();
            for item in &items {
                if owner.insert(item.clone(), i).is_some() {
                    return Err(MetricsError::Overlap(item.clone()));
                }
            }
            names.push(name);
            members.push(items);
        }
        Ok(Partition {
            names,
            groups: members,
            owner,
        })
    }

    /// Unnamed groups, labelled by position.
    pub fn from_groups<S: Into<String>>(
        groups: impl IntoIterator<Item = impl IntoIterator<Item = S>>,
    ) -> Result<Self, MetricsError> {
        Self::new(
            groups
                .into_iter()
                .enumerate()
                .map(|(i, g)| (format!("g{i}"), g.into_iter().map(Into::into).collect()))
                .collect(),
        )
    }

    /// Non-empty clusters of a recovery, Unknown included.
    pub fn from_result(result: &RecoveryResult) -> Self {
        Self::new(
            result
                .clusters()
                .iter()
                .filter(|c| !c.members.is_empty())
                .map(|c| (c.name.clone(), c.members.clone()))
                .collect(),
        )
        .expect("result clusters partition the records")
    }

    /// Reads `cluster<TAB>path` lines; blank lines and `#` comments are
    /// skipped.
    pub fn from_roster(text: &str) -> Result<Self, MetricsError> {
        let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, path) = line
                .split_once('\t')
                .filter(|(n, p)| !n.is_empty() && !p.is_empty())
                .ok_or(MetricsError::MalformedRoster { line: i + 1 })?;
            let path = unescape_field(path).ok_or(MetricsError::MalformedRoster { line: i + 1 })?;
            groups.entry(name.to_string()).or_default().push(path);
        }
        Self::new(groups.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> impl Iterator<Item = (&str, &[String])> + '_ {
        self.names
            .iter()
            .map(String::as_str)
            .zip(self.groups.iter().map(Vec::as_slice))
    }

    pub fn contains(&self, item: &str) -> bool {
        self.owner.contains_key(item)
    }

    pub fn universe(&self) -> BTreeSet<&str> {
        self.owner.keys().map(String::as_str).collect()
    }

    /// Keeps only items in `keep`, dropping groups that become empty.
    pub fn restrict(&self, keep: &dyn Fn(&str) -> bool) -> Self {
        let groups = self
            .groups()
            .filter_map(|(name, items)| {
                let kept: Vec<String> = items.iter().filter(|i| keep(i)).cloned().collect();
                (!kept.is_empty()).then(|| (name.to_string(), kept))
            })
            .collect();
        Self::new(groups).expect("subset of a valid partition")
    }

    fn same_universe(&self, other: &Partition) -> bool {
        self.len() == other.len() && self.owner.keys().all(|k| other.owner.contains_key(k))
    }
}

/// Maximum bipartite matching by augmenting paths.
fn max_matching(adj: &[Vec<usize>], right: usize) -> usize {
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], mate: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                if mate[v].is_none_or(|w| augment(w, adj, seen, mate)) {
                    mate[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    let mut mate = vec![None; right];
    let mut seen = vec![false; right];
    let mut size = 0;
    for u in 0..adj.len() {
        seen.iter_mut().for_each(|s| *s = false);
        if augment(u, adj, &mut seen, &mut mate) {
            size += 1;
        }
    }
    size
}

/// Minimum number of Move and Join operations turning `a` into `b`.
///
/// Each group of `a` is tagged with a group of `b` it overlaps most; among
/// equally good tags a maximum matching picks as many distinct targets as
/// possible. Objects outside their group's tag must move, and groups sharing
/// a tag must be joined.
pub fn mno(a: &Partition, b: &Partition) -> Result<u64, MetricsError> {
    if !a.same_universe(b) {
        return Err(MetricsError::UniverseMismatch);
    }
    let mut kept = 0u64;
    let mut adj = Vec::with_capacity(a.group_count());
    for group in &a.groups {
        let mut overlap: HashMap<usize, u64> = HashMap::new();
        for item in group {
            *overlap.entry(b.owner[item]).or_default() += 1;
        }
        let best = overlap.values().copied().max().unwrap_or(0);
        kept += best;
        let mut tags: Vec<usize> = overlap
            .into_iter()
            .filter(|&(_, c)| c == best)
            .map(|(j, _)| j)
            .collect();
        tags.sort_unstable();
        adj.push(tags);
    }
    let distinct = max_matching(&adj, b.group_count()) as u64;
    let moves = a.len() as u64 - kept;
    let joins = a.group_count() as u64 - distinct;
    Ok(moves + joins)
}

/// Largest `mno(a, b)` over all partitions `a` of `b`'s universe.
///
/// With `b`'s group sizes sorted descending as s0 ≥ s1 ≥ … ≥ s(l-1) and
/// s(l) = 0, the worst `a` keeps at most `min over x of (x + s(x))` objects
/// in place, so the maximum is `n` minus that.
pub fn max_mno(b: &Partition) -> Result<u64, MetricsError> {
    let n = b.len() as u64;
    if n < 2 {
        return Err(MetricsError::DegenerateUniverse(b.len()));
    }
    let mut sizes: Vec<u64> = b.groups.iter().map(|g| g.len() as u64).collect();
    sizes.sort_unstable_by(|x, y| y.cmp(x));
    sizes.push(0);
    let kept = sizes
        .iter()
        .enumerate()
        .map(|(x, s)| x as u64 + s)
        .min()
        .expect("non-empty");
    Ok(n - kept)
}

/// MoJoFM percentage: 100 for identical partitions, 0 at the maximum
/// distance.
pub fn mojofm(a: &Partition, b: &Partition) -> Result<f64, MetricsError> {
    let distance = mno(a, b)?;
    let max = max_mno(b)?;
    Ok((1.0 - distance as f64 / max as f64) * 100.0)
}

/// MoJoFM of a recovery against a ground truth over their shared entities.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub mno: u64,
    pub max_mno: u64,
    pub mojofm: f64,
    /// Entities compared.
    pub shared: usize,
    /// Recovered entities missing from the ground truth.
    pub only_recovered: usize,
    /// Ground-truth entities missing from the recovery.
    pub only_truth: usize,
}

impl Comparison {
    pub fn coverage_warning(&self) -> Option<String> {
        (self.only_recovered + self.only_truth > 0).then(|| {
            format!(
                "coverage: compared {} shared entities; dropped {} only in the recovery and {} only in the ground truth",
                self.shared, self.only_recovered, self.only_truth
            )
        })
    }
}

/// Restricts both partitions to the entities they share, then compares.
pub fn compare(recovered: &Partition, truth: &Partition) -> Result<Comparison, MetricsError> {
    let a = recovered.restrict(&|p| truth.contains(p));
    let b = truth.restrict(&|p| recovered.contains(p));
    let distance = mno(&a, &b)?;
    let max = max_mno(&b)?;
    Ok(Comparison {
        mno: distance,
        max_mno: max,
        mojofm: (1.0 - distance as f64 / max as f64) * 100.0,
        shared: a.len(),
        only_recovered: recovered.len() - a.len(),
        only_truth: truth.len() - b.len(),
    })
}

/// Changes between two recoveries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecoveryDiff {
    pub warnings: Vec<String>,
    pub added: Vec<String>,
    pub removed: Vec<String>,
    /// Path, old main concern, new main concern.
    pub concern_changes: Vec<(String, String, String)>,
    /// Cluster, old size, new size; only clusters whose size changed.
    pub cluster_deltas: Vec<(String, usize, usize)>,
    /// Package present in both versions whose prevailing concern changed.
    pub prevailing_changes: Vec<(String, String, String)>,
}

impl RecoveryDiff {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty()
            && self.removed.is_empty()
            && self.concern_changes.is_empty()
            && self.cluster_deltas.is_empty()
            && self.prevailing_changes.is_empty()
    }
}

impl fmt::Display for RecoveryDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for w in &self.warnings {
            let _ = writeln!(out, "warning\t{w}");
        }
        for p in &self.added {
            let _ = writeln!(out, "added\t{p}");
        }
        for p in &self.removed {
            let _ = writeln!(out, "removed\t{p}");
        }
        for (p, old, new) in &self.concern_changes {
            let _ = writeln!(out, "concern\t{p}\t{old}\t{new}");
        }
        for (c, old, new) in &self.cluster_deltas {
            let delta = *new as i64 - *old as i64;
            let _ = writeln!(out, "cluster\t{c}\t{old}\t{new}\t{delta:+}");
        }
        for (p, old, new) in &self.prevailing_changes {
            let _ = writeln!(out, "prevailing\t{p}\t{old}\t{new}");
        }
        f.write_str(&out)
    }
}

/// Compares two recoveries. Each side's tree is weighted with the measure
/// in its own configuration.
pub fn diff_recoveries(old: &RecoveryResult, new: &RecoveryResult) -> Result<RecoveryDiff, VizError> {
    let mut diff = RecoveryDiff::default();
    if old.classifier_fingerprint() != new.classifier_fingerprint() {
        diff.warnings
            .push("results were produced by different classifiers".to_string());
    }
    if old.config_fingerprint() != new.config_fingerprint() {
        diff.warnings
            .push("results were produced with different configurations".to_string());
    }

    let old_paths: BTreeSet<&str> = old.records().iter().map(|r| r.path()).collect();
    let new_paths: BTreeSet<&str> = new.records().iter().map(|r| r.path()).collect();
    diff.added = new_paths.difference(&old_paths).map(|p| p.to_string()).collect();
    diff.removed = old_paths.difference(&new_paths).map(|p| p.to_string()).collect();
    for r in new.records() {
        if let Some(o) = old.record(r.path()) {
            if o.main_concern != r.main_concern {
                diff.concern_changes.push((
                    r.path().to_string(),
                    o.main_concern.clone(),
                    r.main_concern.clone(),
                ));
            }
        }
    }

    let mut names: Vec<&str> = old.clusters().iter().map(|c| c.name.as_str()).collect();
    for c in new.clusters() {
        if !names.contains(&c.name.as_str()) {
            names.push(&c.name);
        }
    }
    let size = |r: &RecoveryResult, n: &str| r.cluster(n).map_or(0, |c| c.members.len());
    for n in names {
        let (a, b) = (size(old, n), size(new, n));
        if a != b {
            diff.cluster_deltas.push((n.to_string(), a, b));
        }
    }

    let old_tree = build_tree(old, old.config().weight_measure)?;
    let new_tree = build_tree(new, new.config().weight_measure)?;
    let before: HashMap<&str, &str> = old_tree.package_prevailing().into_iter().collect();
    for (path, now) in new_tree.package_prevailing() {
        if let Some(&was) = before.get(path) {
            if was != now {
                diff.prevailing_changes
                    .push((path.to_string(), was.to_string(), now.to_string()));
            }
        }
    }
    Ok(diff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SourceEntity;
    use crate::digest::Digest;
    use crate::recover::{EntityRecord, RecoveryConfig};

    fn p(groups: &[&[u32]]) -> Partition {
        Partition::from_groups(groups.iter().map(|g| g.iter().map(|i| i.to_string())))
            .unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(mno(&p(&[&[1, 2], &[3]]), &p(&[&[1, 2], &[3]])).unwrap(), 0);
        assert_eq!(mno(&p(&[&[1, 2], &[3]]), &p(&[&[1, 2, 3]])).unwrap(), 1);
        assert_eq!(mno(&p(&[&[1], &[2], &[3]]), &p(&[&[1, 2, 3]])).unwrap(), 2);
        assert_eq!(max_mno(&p(&[&[1, 2, 3]])).unwrap(), 2);
        assert_eq!(max_mno(&p(&[&[1], &[2]])).unwrap(), 1);
        assert_eq!(mojofm(&p(&[&[1, 2], &[3]]), &p(&[&[1, 2, 3]])).unwrap(), 50.0);
        assert_eq!(mojofm(&p(&[&[1], &[2], &[3]]), &p(&[&[1, 2, 3]])).unwrap(), 0.0);
        assert_eq!(mojofm(&p(&[&[3], &[1, 2]]), &p(&[&[1, 2], &[3]])).unwrap(), 100.0);
    }

    #[test]
    fn single_cluster_bound() {
        for n in 2..=40u32 {
            let all: Vec<u32> = (0..n).collect();
            assert_eq!(max_mno(&p(&[&all])).unwrap(), n as u64 - 1);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(
            mno(&p(&[&[1, 2]]), &p(&[&[1, 3]])),
            Err(MetricsError::UniverseMismatch)
        );
        assert_eq!(max_mno(&p(&[&[1]])), Err(MetricsError::DegenerateUniverse(1)));
        assert_eq!(
            Partition::from_groups([vec!["a"], vec!["a"]]),
            Err(MetricsError::Overlap("a".into()))
        );
        assert_eq!(
            Partition::new(vec![("x".into(), vec![])]),
            Err(MetricsError::EmptyGroup("x".into()))
        );
    }

    #[test]
    fn roster_parsing_and_intersection() {
        let truth = Partition::from_roster("# cluster\tpath\nA\tx\nA\ty\n\nB\tz\nB\tw\n").unwrap();
        assert_eq!(truth.len(), 4);
        assert_eq!(truth.group_count(), 2);
        assert_eq!(
            Partition::from_roster("A x\n"),
            Err(MetricsError::MalformedRoster { line: 1 })
        );
        let recovered = Partition::from_roster("P\tx\nP\ty\nP\tz\nQ\textra\n").unwrap();
        let c = compare(&recovered, &truth).unwrap();
        assert_eq!((c.shared, c.only_recovered, c.only_truth), (3, 1, 1));
        // a = {x,y,z}, b = {x,y},{z}: one move
        assert_eq!(c.mno, 1);
        assert_eq!(c.max_mno, 1);
        assert!(c.coverage_warning().is_some());
        let same = compare(&truth, &truth).unwrap();
        assert_eq!(same.mojofm, 100.0);
        assert_eq!(same.coverage_warning(), None);
    }

    fn result(rows: &[(&str, &str, usize)]) -> RecoveryResult {
        let concerns: Vec<String> = ["Database", "Graphics", "Networking"].map(String::from).into();
        let records = rows
            .iter()
            .map(|(path, main, bytes)| EntityRecord {
                entity: SourceEntity::from_bytes(path, &vec![b'x'; *bytes]),
                affinities: vec![0.0; 3],
                main_concern: main.to_string(),
            })
            .collect();
        RecoveryResult::from_records(Digest::of(b"m"), concerns, RecoveryConfig::default(), records)
            .unwrap()
    }

    #[test]
    fn identical_results_have_empty_diff() {
        let r = result(&[("a/A.java", "Database", 10), ("b/B.java", "Graphics", 5)]);
        let d = diff_recoveries(&r, &r).unwrap();
        assert!(d.is_empty());
        assert_eq!(d.to_string(), "");
    }

    #[test]
    fn one_reclassified_entity() {
        let old = result(&[("a/A.java", "Database", 10), ("b/B.java", "Graphics", 50)]);
        let new = result(&[("a/A.java", "Graphics", 10), ("b/B.java", "Graphics", 50)]);
        let d = diff_recoveries(&old, &new).unwrap();
        assert_eq!(
            d.concern_changes,
            vec![("a/A.java".into(), "Database".into(), "Graphics".into())]
        );
        assert_eq!(
            d.cluster_deltas,
            vec![("Database".into(), 1, 0), ("Graphics".into(), 1, 2)]
        );
        assert_eq!(
            d.prevailing_changes,
            vec![("a".into(), "Database".into(), "Graphics".into())]
        );
        assert_eq!(
            d.to_string(),
            "concern\ta/A.java\tDatabase\tGraphics\n\
             cluster\tDatabase\t1\t0\t-1\n\
             cluster\tGraphics\t1\t2\t+1\n\
             prevailing\ta\tDatabase\tGraphics\n"
        );
    }

    #[test]
    fn subpackage_flip_is_flagged() {
        let old = result(&[
            ("app/ui/View.java", "Graphics", 500),
            ("app/ui/Net.java", "Networking", 300),
            ("app/Main.java", "Database", 100),
        ]);
        let new = result(&[
            ("app/ui/View.java", "Graphics", 500),
            ("app/ui/Net.java", "Networking", 300),
            ("app/ui/Socket.java", "Networking", 400),
            ("app/Main.java", "Database", 100),
        ]);
        let d = diff_recoveries(&old, &new).unwrap();
        assert_eq!(d.added, vec!["app/ui/Socket.java".to_string()]);
        assert_eq!(
            d.prevailing_changes,
            vec![
                (".".into(), "Graphics".into(), "Networking".into()),
                ("app".into(), "Graphics".into(), "Networking".into()),
                ("app/ui".into(), "Graphics".into(), "Networking".into()),
            ]
        );
    }

    #[test]
    fn from_result_keeps_unknown() {
        let r = result(&[("a", "Database", 1), ("b", "Unknown", 1), ("c", "Unknown", 1)]);
        let part = Partition::from_result(&r);
        let groups: Vec<(&str, usize)> = part.groups().map(|(n, g)| (n, g.len())).collect();
        assert_eq!(groups, vec![("Database", 1), ("Unknown", 2)]);
    }
}
