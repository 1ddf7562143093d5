//! Source trees and training data.
//!
//! A source tree becomes a list of [`ScannedFile`]s (metadata plus lossy
//! UTF-8 text); a training tree `<root>/<concern>/<files...>` becomes a
//! [`TrainingCorpus`] of token bags.

mod sloc;
mod tokenize;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use globset::{Glob, GlobBuilder, GlobSet, GlobSetBuilder};
use walkdir::WalkDir;

use crate::digest::Digest;
use crate::UNKNOWN;

pub use sloc::{count_sloc, strip_c_family, LanguageFamily, Sloc};
pub use tokenize::{tokenize, tokenize_with, StopWords, TokenBag, TOKENIZER_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read corpus root {path}: {source}")]
    UnreadableRoot { path: PathBuf, source: io::Error },
    #[error("invalid glob pattern `{pattern}`: {message}")]
    BadGlob { pattern: String, message: String },
    #[error("fewer than 2 concerns in training data (found {found})")]
    FewerThanTwoConcerns { found: usize },
    #[error("concern directory {0} contains no training documents")]
    EmptyConcern(PathBuf),
    #[error("invalid concern name `{0}`")]
    InvalidConcernName(String),
    #[error("concern name `{0}` is reserved for the fallback cluster")]
    ReservedConcernName(String),
    #[error("duplicate concern `{0}`")]
    DuplicateConcern(String),
    #[error("cannot read training document {path}: {source}")]
    UnreadableDocument { path: PathBuf, source: io::Error },
}

/// One source file of the system under recovery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceEntity {
    /// Relative path with `/` separators.
    pub path: String,
    /// Directory segments from the corpus root.
    pub package: Vec<String>,
    pub content_hash: Digest,
    pub byte_size: u64,
    pub physical_sloc: u64,
    pub logical_sloc: u64,
}

impl SourceEntity {
    /// Builds an entity from its relative path and raw bytes.
    pub fn from_bytes(path: &str, bytes: &[u8]) -> Self {
        let text = String::from_utf8_lossy(bytes);
        let sloc = count_sloc(&text, LanguageFamily::from_path(path));
        SourceEntity {
            path: path.to_string(),
            package: package_of(path),
            content_hash: Digest::of(bytes),
            byte_size: bytes.len() as u64,
            physical_sloc: sloc.physical,
            logical_sloc: sloc.logical,
        }
    }

    /// File name without directories.
    pub fn base_name(&self) -> &str {
        base_name(&self.path)
    }
}

pub(crate) fn base_name(path: &str) -> &str {
    path.rsplit('/').next().unwrap_or(path)
}

pub(crate) fn package_of(path: &str) -> Vec<String> {
    let mut segments: Vec<String> = path.split('/').map(str::to_string).collect();
    segments.pop();
    segments
}

/// An entity together with its (lossily decoded) text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScannedFile {
    pub entity: SourceEntity,
    pub text: String,
}

impl ScannedFile {
    pub fn from_bytes(path: &str, bytes: &[u8]) -> Self {
        ScannedFile {
            entity: SourceEntity::from_bytes(path, bytes),
            text: String::from_utf8_lossy(bytes).into_owned(),
        }
    }

    pub fn from_text(path: &str, text: &str) -> Self {
        Self::from_bytes(path, text.as_bytes())
    }

    pub fn path(&self) -> &str {
        &self.entity.path
    }

    pub fn language(&self) -> LanguageFamily {
        LanguageFamily::from_path(&self.entity.path)
    }
}

/// Include/exclude globs for [`scan_corpus`]. `*` stays within a path
/// segment, `**` crosses segments and `?` matches one character.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOptions {
    pub include: Vec<String>,
    pub exclude: Vec<String>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            include: vec!["**/*".to_string()],
            exclude: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Scan {
    /// Sorted by path.
    pub files: Vec<ScannedFile>,
    /// Files that could not be read, with the reason.
    pub warnings: Vec<String>,
}

impl Scan {
    pub fn entities(&self) -> impl Iterator<Item = &SourceEntity> + '_ {
        self.files.iter().map(|f| &f.entity)
    }
}

fn glob_set(patterns: &[String]) -> Result<GlobSet, CorpusError> {
    let mut builder = GlobSetBuilder::new();
    for p in patterns {
        let glob: Glob = GlobBuilder::new(p)
            .literal_separator(true)
            .build()
            .map_err(|e| CorpusError::BadGlob {
                pattern: p.clone(),
                message: e.kind().to_string(),
            })?;
        builder.add(glob);
    }
    builder.build().map_err(|e| CorpusError::BadGlob {
        pattern: patterns.join(" "),
        message: e.to_string(),
    })
}

/// Reads every regular file under `root` that matches an include pattern and
/// no exclude pattern. Output is sorted by path regardless of directory
/// enumeration order; unreadable files are skipped with a warning.
pub fn scan_corpus(root: &Path, options: &ScanOptions) -> Result<Scan, CorpusError> {
    fs::read_dir(root).map_err(|source| CorpusError::UnreadableRoot {
        path: root.to_path_buf(),
        source,
    })?;
    let include = glob_set(&options.include)?;
    let exclude = glob_set(&options.exclude)?;

    let mut scan = Scan::default();
    for entry in WalkDir::new(root).follow_links(false) {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                scan.warnings.push(format!("skipped: {e}"));
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let Some(rel) = relative_path(root, entry.path()) else {
            scan.warnings
                .push(format!("skipped non-UTF-8 path {}", entry.path().display()));
            continue;
        };
        if !include.is_match(&rel) || exclude.is_match(&rel) {
            continue;
        }
        match fs::read(entry.path()) {
            Ok(bytes) => scan.files.push(ScannedFile::from_bytes(&rel, &bytes)),
            Err(e) => scan.warnings.push(format!("cannot read {rel}: {e}")),
        }
    }
    scan.files.sort_by(|a, b| a.entity.path.cmp(&b.entity.path));
    Ok(scan)
}

fn relative_path(root: &Path, path: &Path) -> Option<String> {
    let rel = path.strip_prefix(root).ok()?;
    let parts: Option<Vec<&str>> = rel.components().map(|c| c.as_os_str().to_str()).collect();
    Some(parts?.join("/"))
}

/// Labelled training documents, grouped by concern.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingCorpus {
    concerns: Vec<String>,
    documents: Vec<Vec<TokenBag>>,
}

pub(crate) fn validate_concern_name(name: &str) -> Result<(), CorpusError> {
    if name.is_empty() || name.chars().any(|c| matches!(c, '/' | '\\' | '\t' | '\n' | '\r')) {
        return Err(CorpusError::InvalidConcernName(name.to_string()));
    }
    if name == UNKNOWN {
        return Err(CorpusError::ReservedConcernName(name.to_string()));
    }
    Ok(())
}

impl TrainingCorpus {
    /// Concern order is the order given.
    pub fn new(groups: Vec<(String, Vec<TokenBag>)>) -> Result<Self, CorpusError> {
        if groups.len() < 2 {
            return Err(CorpusError::FewerThanTwoConcerns {
                found: groups.len(),
            });
        }
        let mut concerns = Vec::with_capacity(groups.len());
        let mut documents = Vec::with_capacity(groups.len());
        for (name, docs) in groups {
            validate_concern_name(&name)?;
            if concerns.contains(&name) {
                return Err(CorpusError::DuplicateConcern(name));
            }
            if docs.is_empty() {
                return Err(CorpusError::EmptyConcern(PathBuf::from(&name)));
            }
            concerns.push(name);
            documents.push(docs);
        }
        Ok(TrainingCorpus {
            concerns,
            documents,
        })
    }

    pub fn concerns(&self) -> &[String] {
        &self.concerns
    }

    /// Documents of the concern at `index`.
    pub fn documents(&self, index: usize) -> &[TokenBag] {
        &self.documents[index]
    }

    pub fn documents_of(&self, concern: &str) -> Option<&[TokenBag]> {
        let i = self.concerns.iter().position(|c| c == concern)?;
        Some(&self.documents[i])
    }

    pub fn document_count(&self) -> usize {
        self.documents.iter().map(Vec::len).sum()
    }

    /// All documents as `(concern index, document)` in concern order.
    pub fn labelled(&self) -> impl Iterator<Item = (usize, &TokenBag)> + '_ {
        self.documents
            .iter()
            .enumerate()
            .flat_map(|(i, docs)| docs.iter().map(move |d| (i, d)))
    }
}

/// Loads `<root>/<concern>/<files...>` with the bundled stop words.
pub fn load_training_corpus(root: &Path) -> Result<TrainingCorpus, CorpusError> {
    load_training_corpus_with(root, &StopWords::bundled())
}

/// Each immediate subdirectory of `root` is a concern (lexicographic
/// order); every regular file below it, hidden files excepted, is one
/// document of that concern.
pub fn load_training_corpus_with(
    root: &Path,
    stop_words: &StopWords,
) -> Result<TrainingCorpus, CorpusError> {
    let unreadable = |source| CorpusError::UnreadableRoot {
        path: root.to_path_buf(),
        source,
    };
    let mut dirs: Vec<(String, PathBuf)> = Vec::new();
    for entry in fs::read_dir(root).map_err(unreadable)? {
        let entry = entry.map_err(unreadable)?;
        if !entry.file_type().map_err(unreadable)?.is_dir() {
            continue;
        }
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') {
            continue;
        }
        dirs.push((name, entry.path()));
    }
    dirs.sort();
    if dirs.len() < 2 {
        return Err(CorpusError::FewerThanTwoConcerns { found: dirs.len() });
    }

    let mut groups = Vec::with_capacity(dirs.len());
    for (name, dir) in dirs {
        let mut files: Vec<PathBuf> = WalkDir::new(&dir)
            .into_iter()
            .filter_map(Result::ok)
            .filter(|e| e.file_type().is_file())
            .filter(|e| !e.file_name().to_string_lossy().starts_with('.'))
            .map(|e| e.into_path())
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(CorpusError::EmptyConcern(dir));
        }
        let mut docs = Vec::with_capacity(files.len());
        for path in files {
            let bytes = fs::read(&path)
                .map_err(|source| CorpusError::UnreadableDocument { path, source })?;
            docs.push(tokenize_with(&String::from_utf8_lossy(&bytes), stop_words));
        }
        groups.push((name, docs));
    }
    TrainingCorpus::new(groups)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(root: &Path, rel: &str, content: &str) {
        let p = root.join(rel);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, content).unwrap();
    }

    fn java_only() -> ScanOptions {
        ScanOptions {
            include: vec!["**/*.java".into()],
            exclude: vec![],
        }
    }

    #[test]
    fn scan_packages_from_directories() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "a/B.java", "class B {}");
        write(dir.path(), "a/c/D.java", "class D {}");
        let scan = scan_corpus(dir.path(), &java_only()).unwrap();
        let got: Vec<(&str, Vec<String>)> = scan
            .entities()
            .map(|e| (e.path.as_str(), e.package.clone()))
            .collect();
        assert_eq!(
            got,
            vec![
                ("a/B.java", vec!["a".to_string()]),
                ("a/c/D.java", vec!["a".to_string(), "c".to_string()]),
            ]
        );
    }

    #[test]
    fn scan_empty_directory() {
        let dir = tempfile::tempdir().unwrap();
        assert!(scan_corpus(dir.path(), &ScanOptions::default())
            .unwrap()
            .files
            .is_empty());
    }

    #[test]
    fn scan_filters_by_extension_and_exclude() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "a/B.java", "class B {}");
        write(dir.path(), "a/B.txt", "notes");
        write(dir.path(), "test/T.java", "class T {}");
        let scan = scan_corpus(dir.path(), &java_only()).unwrap();
        assert_eq!(scan.files.len(), 2);
        let opts = ScanOptions {
            include: vec!["**/*.java".into()],
            exclude: vec!["test/**".into()],
        };
        let scan = scan_corpus(dir.path(), &opts).unwrap();
        assert_eq!(scan.files.len(), 1);
        assert_eq!(scan.files[0].path(), "a/B.java");
    }

    #[test]
    fn single_star_stays_in_segment() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "Top.java", "");
        write(dir.path(), "a/Deep.java", "");
        let opts = ScanOptions {
            include: vec!["*.java".into()],
            exclude: vec![],
        };
        let scan = scan_corpus(dir.path(), &opts).unwrap();
        assert_eq!(scan.files.len(), 1);
        assert_eq!(scan.files[0].path(), "Top.java");
        assert!(scan.files[0].entity.package.is_empty());
    }

    #[test]
    fn missing_root_is_fatal() {
        let dir = tempfile::tempdir().unwrap();
        let err = scan_corpus(&dir.path().join("nope"), &ScanOptions::default()).unwrap_err();
        assert!(matches!(err, CorpusError::UnreadableRoot { .. }));
    }

    #[test]
    fn bad_glob_reported() {
        let dir = tempfile::tempdir().unwrap();
        let opts = ScanOptions {
            include: vec!["a[".into()],
            exclude: vec![],
        };
        assert!(matches!(
            scan_corpus(dir.path(), &opts),
            Err(CorpusError::BadGlob { .. })
        ));
    }

    #[test]
    fn entity_measures() {
        let e = SourceEntity::from_bytes("p/q/X.java", b"int a;\n// c\n\nint b;\n");
        assert_eq!(e.byte_size, 20);
        assert_eq!((e.physical_sloc, e.logical_sloc), (2, 2));
        assert_eq!(e.package, vec!["p", "q"]);
        assert_eq!(e.base_name(), "X.java");
        let renamed = SourceEntity::from_bytes("r/Y.java", b"int a;\n// c\n\nint b;\n");
        assert_eq!(renamed.content_hash, e.content_hash);
        let edited = SourceEntity::from_bytes("p/q/X.java", b"int a;\n// c\n\nint c;\n");
        assert_ne!(edited.content_hash, e.content_hash);
    }

    #[test]
    fn training_layout() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "networking/n1.txt", "socket packet");
        write(dir.path(), "database/d1.txt", "sql query");
        write(dir.path(), "database/d2.txt", "table public");
        let corpus = load_training_corpus(dir.path()).unwrap();
        assert_eq!(corpus.concerns(), ["database", "networking"]);
        assert_eq!(corpus.documents(0).len(), 2);
        assert_eq!(corpus.documents(1).len(), 1);
        // stop words are removed from training documents
        assert_eq!(corpus.documents(0)[1].count("public"), 0);
        assert_eq!(corpus.documents(0)[1].count("table"), 1);
    }

    #[test]
    fn training_labels_sorted() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "security/s.txt", "password cipher");
        write(dir.path(), "networking/n.txt", "socket");
        let corpus = load_training_corpus(dir.path()).unwrap();
        assert_eq!(corpus.concerns(), ["networking", "security"]);
    }

    #[test]
    fn single_concern_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "onlyone/a.txt", "x");
        let err = load_training_corpus(dir.path()).unwrap_err();
        assert!(err.to_string().contains("fewer than 2 concerns"), "{err}");
    }

    #[test]
    fn empty_concern_named() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "database/d.txt", "sql");
        fs::create_dir_all(dir.path().join("graphics")).unwrap();
        let err = load_training_corpus(dir.path()).unwrap_err();
        assert!(matches!(err, CorpusError::EmptyConcern(_)));
        assert!(err.to_string().contains("graphics"));
    }

    #[test]
    fn corpus_validation() {
        let bag: TokenBag = ["sql"].into_iter().collect();
        let ok = TrainingCorpus::new(vec![
            ("a".into(), vec![bag.clone()]),
            ("b".into(), vec![bag.clone()]),
        ]);
        assert!(ok.is_ok());
        let dup = TrainingCorpus::new(vec![
            ("a".into(), vec![bag.clone()]),
            ("a".into(), vec![bag.clone()]),
        ]);
        assert!(matches!(dup, Err(CorpusError::DuplicateConcern(_))));
        let reserved = TrainingCorpus::new(vec![
            ("a".into(), vec![bag.clone()]),
            (UNKNOWN.into(), vec![bag.clone()]),
        ]);
        assert!(matches!(reserved, Err(CorpusError::ReservedConcernName(_))));
        let bad = TrainingCorpus::new(vec![
            ("a/b".into(), vec![bag.clone()]),
            ("c".into(), vec![bag]),
        ]);
        assert!(matches!(bad, Err(CorpusError::InvalidConcernName(_))));
    }
}
