//! Content-addressed affinity cache.
//!
//! File format: a header line `concernmap-cache<TAB>1`, then one line per
//! entry, `<content hash><TAB><classifier fp><TAB><config fp><TAB><a1,a2,...>`.
//! Entries are independent lines, so new ones can be appended.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::digest::Digest;
use crate::textfmt::{fmt_vector, parse_vector, write_atomic};

pub const CACHE_MAGIC: &str = "concernmap-cache";
pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CacheKey {
    pub content_hash: Digest,
    pub classifier: Digest,
    pub config: Digest,
}

/// Affinity vectors keyed by content hash and the fingerprints they were
/// computed under. Keyed by content rather than path, so renames hit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecoveryCache {
    entries: HashMap<CacheKey, Vec<f64>>,
}

impl RecoveryCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &CacheKey) -> Option<&[f64]> {
        self.entries.get(key).map(Vec::as_slice)
    }

    pub fn insert(&mut self, key: CacheKey, affinities: Vec<f64>) {
        self.entries.insert(key, affinities);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    /// Entries sorted by key.
    pub fn entries(&self) -> Vec<(&CacheKey, &[f64])> {
        let mut all: Vec<_> = self.entries.iter().map(|(k, v)| (k, v.as_slice())).collect();
        all.sort_by_key(|(k, _)| **k);
        all
    }

    /// Drops entries not computed under the given fingerprints.
    pub fn retain_fingerprints(&mut self, classifier: Digest, config: Digest) -> usize {
        let before = self.entries.len();
        self.entries
            .retain(|k, _| k.classifier == classifier && k.config == config);
        before - self.entries.len()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{CACHE_MAGIC}\t{CACHE_FORMAT_VERSION}\n");
        for (k, v) in self.entries() {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                k.content_hash,
                k.classifier,
                k.config,
                fmt_vector(v)
            );
        }
        out
    }

    /// Parses a cache file. Any malformed line, or two lines disagreeing on
    /// one key, makes the whole cache suspect, which is reported as an error.
    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        if lines.next() != Some(&format!("{CACHE_MAGIC}\t{CACHE_FORMAT_VERSION}")) {
            return Err("missing or unsupported cache header".to_string());
        }
        let mut cache = RecoveryCache::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let lineno = i + 2;
            let f: Vec<&str> = line.split('\t').collect();
            let parsed = (f.len() == 4)
                .then(|| {
                    Some((
                        CacheKey {
                            content_hash: f[0].parse().ok()?,
                            classifier: f[1].parse().ok()?,
                            config: f[2].parse().ok()?,
                        },
                        parse_vector(f[3])?,
                    ))
                })
                .flatten();
            let Some((key, vector)) = parsed else {
                return Err(format!("malformed cache entry on line {lineno}"));
            };
            if vector.iter().any(|a| !(0.0..=1.0).contains(a)) {
                return Err(format!("out-of-range affinity on line {lineno}"));
            }
            if let Some(prev) = cache.entries.get(&key) {
                if *prev != vector {
                    return Err(format!("conflicting cache entries on line {lineno}"));
                }
            }
            cache.entries.insert(key, vector);
        }
        Ok(cache)
    }

    /// Loads a cache file. A missing file is an empty cache; a corrupt one
    /// is ignored and reported in the returned warning.
    pub fn load(path: &Path) -> (Self, Option<String>) {
        match std::fs::read(path) {
            Ok(bytes) => match std::str::from_utf8(&bytes)
                .map_err(|e| e.to_string())
                .and_then(Self::from_text)
            {
                Ok(cache) => (cache, None),
                Err(e) => (
                    RecoveryCache::new(),
                    Some(format!("ignoring cache {}: {e}", path.display())),
                ),
            },
            Err(e) if e.kind() == io::ErrorKind::NotFound => (RecoveryCache::new(), None),
            Err(e) => (
                RecoveryCache::new(),
                Some(format!("ignoring unreadable cache {}: {e}", path.display())),
            ),
        }
    }

    /// Writes the whole cache atomically.
    pub fn save(&self, path: &Path) -> io::Result<()> {
        write_atomic(path, self.to_text().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(n: u8) -> CacheKey {
        CacheKey {
            content_hash: Digest::of(&[n]),
            classifier: Digest::of(b"model"),
            config: Digest::of(b"config"),
        }
    }

    #[test]
    fn text_round_trip_is_sorted_and_exact() {
        let mut c = RecoveryCache::new();
        c.insert(key(2), vec![0.1, 2.0 / 3.0]);
        c.insert(key(1), vec![1.0, 0.0]);
        let text = c.to_text();
        assert_eq!(RecoveryCache::from_text(&text).unwrap(), c);
        let mut again = RecoveryCache::new();
        again.insert(key(1), vec![1.0, 0.0]);
        again.insert(key(2), vec![0.1, 2.0 / 3.0]);
        assert_eq!(again.to_text(), text);
    }

    #[test]
    fn appended_lines_are_read() {
        let mut c = RecoveryCache::new();
        c.insert(key(1), vec![0.5]);
        let mut text = c.to_text();
        let k = key(9);
        text.push_str(&format!("{}\t{}\t{}\t0.25\n", k.content_hash, k.classifier, k.config));
        let back = RecoveryCache::from_text(&text).unwrap();
        assert_eq!(back.get(&k), Some(&[0.25][..]));
        assert_eq!(back.len(), 2);
    }

    #[test]
    fn corruption_detected() {
        assert!(RecoveryCache::from_text("garbage").is_err());
        let mut c = RecoveryCache::new();
        c.insert(key(1), vec![0.5]);
        let text = c.to_text();
        assert!(RecoveryCache::from_text(&format!("{text}zz\t1\n")).is_err());
        let conflicting = text.clone() + &text.lines().nth(1).unwrap().replace("0.5", "0.7");
        assert!(RecoveryCache::from_text(&conflicting).is_err());
        let out_of_range = text.replace("0.5", "1.5");
        assert!(RecoveryCache::from_text(&out_of_range).is_err());
    }

    #[test]
    fn load_missing_and_corrupt_files() {
        let dir = tempfile::tempdir().unwrap();
        let (c, w) = RecoveryCache::load(&dir.path().join("none"));
        assert!(c.is_empty() && w.is_none());
        let bad = dir.path().join("bad");
        std::fs::write(&bad, "not a cache").unwrap();
        let (c, w) = RecoveryCache::load(&bad);
        assert!(c.is_empty());
        assert!(w.unwrap().contains("ignoring cache"));
    }

    #[test]
    fn save_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/cache.tsv");
        let mut c = RecoveryCache::new();
        c.insert(key(3), vec![0.125, 0.875]);
        c.save(&path).unwrap();
        let (back, w) = RecoveryCache::load(&path);
        assert!(w.is_none());
        assert_eq!(back, c);
    }

    #[test]
    fn retain_by_fingerprint() {
        let mut c = RecoveryCache::new();
        c.insert(key(1), vec![0.5]);
        let mut other = key(2);
        other.classifier = Digest::of(b"other model");
        c.insert(other, vec![0.5]);
        assert_eq!(c.retain_fingerprints(key(1).classifier, key(1).config), 1);
        assert_eq!(c.len(), 1);
    }
}
