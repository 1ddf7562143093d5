//! Source-level dependency extraction.
//!
//! Java-like sources are resolved through their `package` declaration,
//! `import` statements (single-type and wildcard), fully qualified names used
//! in code, and unqualified names of entities in the same package. C-style
//! `#include "..."` directives resolve against corpus paths. References that
//! do not name a corpus entity are dropped.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::corpus::{base_name, strip_c_family, LanguageFamily, ScannedFile};
use crate::exec::Execution;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DepsError {
    #[error("`{0}` is not a node of the dependency graph")]
    UnknownNode(String),
    #[error("malformed dependency line {line}: expected `from<TAB>to`")]
    Malformed { line: usize },
}

/// Directed entity-to-entity dependencies; no self edges, edges sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DepGraph {
    nodes: BTreeSet<String>,
    edges: BTreeSet<(String, String)>,
}

impl DepGraph {
    pub fn new(nodes: impl IntoIterator<Item = String>) -> Self {
        DepGraph {
            nodes: nodes.into_iter().collect(),
            edges: BTreeSet::new(),
        }
    }

    /// Adds an edge between two known nodes; self edges and unknown
    /// endpoints are ignored. Returns whether the edge was new.
    pub fn add_edge(&mut self, from: &str, to: &str) -> bool {
        if from == to || !self.nodes.contains(from) || !self.nodes.contains(to) {
            return false;
        }
        self.edges.insert((from.to_string(), to.to_string()))
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> + '_ {
        self.nodes.iter().map(String::as_str)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.edges.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, path: &str) -> bool {
        self.nodes.contains(path)
    }

    /// Outgoing and incoming neighbours of `path`, each sorted.
    pub fn fan(&self, path: &str) -> Result<(Vec<&str>, Vec<&str>), DepsError> {
        if !self.nodes.contains(path) {
            return Err(DepsError::UnknownNode(path.to_string()));
        }
        let outgoing = self
            .edges
            .range((path.to_string(), String::new())..)
            .take_while(|(a, _)| a == path)
            .map(|(_, b)| b.as_str())
            .collect();
        let mut incoming: Vec<&str> = self
            .edges
            .iter()
            .filter(|(_, b)| b == path)
            .map(|(a, _)| a.as_str())
            .collect();
        incoming.sort_unstable();
        Ok((outgoing, incoming))
    }

    /// `from<TAB>to` lines in sorted order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("# from\tto\n");
        for (a, b) in &self.edges {
            let _ = writeln!(out, "{a}\t{b}");
        }
        out
    }

    /// Reads a dependency list. Nodes are the edge endpoints plus `extra`.
    pub fn from_tsv<'a>(
        text: &str,
        extra: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self, DepsError> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => {
                    pairs.push((a.to_string(), b.to_string()))
                }
                _ => return Err(DepsError::Malformed { line: i + 1 }),
            }
        }
        let mut graph = DepGraph::new(
            pairs
                .iter()
                .flat_map(|(a, b)| [a.clone(), b.clone()])
                .chain(extra.into_iter().map(str::to_string)),
        );
        for (a, b) in &pairs {
            graph.add_edge(a, b);
        }
        Ok(graph)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Lexeme<'a> {
    Ident(&'a str),
    Punct(char),
}

fn lex(code: &str) -> Vec<Lexeme<'_>> {
    let mut out = Vec::new();
    let mut chars = code.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c.is_alphabetic() || c == '_' || c == '$' {
            let mut end = i + c.len_utf8();
            while let Some(&(j, d)) = chars.peek() {
                if d.is_alphanumeric() || d == '_' || d == '$' {
                    end = j + d.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Lexeme::Ident(&code[i..end]));
        } else if c.is_numeric() {
            while chars.peek().is_some_and(|&(_, d)| d.is_alphanumeric() || d == '.') {
                chars.next();
            }
        } else if !c.is_whitespace() {
            out.push(Lexeme::Punct(c));
        }
    }
    out
}

/// What one file declares and references.
#[derive(Debug, Default)]
struct FileRefs {
    package: Option<String>,
    /// Dotted names, e.g. `org.x.B` from imports or qualified uses.
    qualified: Vec<Vec<String>>,
    /// Packages imported with `.*`.
    wildcards: Vec<String>,
    /// Identifiers not preceded by a dot.
    unqualified: BTreeSet<String>,
    includes: Vec<String>,
}

fn scan_file(text: &str) -> FileRefs {
    let mut refs = FileRefs::default();
    for line in text.lines() {
        let t = line.trim_start();
        if let Some(rest) = t.strip_prefix('#') {
            let rest = rest.trim_start();
            if let Some(arg) = rest.strip_prefix("include") {
                let arg = arg.trim();
                if let Some(inner) = arg.strip_prefix('"').and_then(|a| a.split('"').next()) {
                    refs.includes.push(inner.to_string());
                }
            }
        }
    }

    let code = strip_c_family(text);
    let lexemes = lex(&code);
    let mut i = 0;
    while i < lexemes.len() {
        let Lexeme::Ident(word) = lexemes[i] else {
            i += 1;
            continue;
        };
        let preceded_by_dot = i > 0 && lexemes[i - 1] == Lexeme::Punct('.');
        // maximal chain ident(.ident)*, optionally ending in `.*`
        let mut chain = vec![word.to_string()];
        let mut j = i + 1;
        let mut wildcard = false;
        while j + 1 < lexemes.len() && lexemes[j] == Lexeme::Punct('.') {
            match lexemes[j + 1] {
                Lexeme::Ident(next) => {
                    chain.push(next.to_string());
                    j += 2;
                }
                Lexeme::Punct('*') => {
                    wildcard = true;
                    j += 2;
                    break;
                }
                _ => break,
            }
        }
        let after_package = i > 0 && lexemes[i - 1] == Lexeme::Ident("package");
        if word == "package" || after_package {
            if after_package && refs.package.is_none() {
                refs.package = Some(chain.join("."));
            }
            i = j;
            continue;
        }
        if wildcard {
            refs.wildcards.push(chain.join("."));
        } else if chain.len() >= 2 {
            refs.qualified.push(chain.clone());
        }
        if !preceded_by_dot {
            refs.unqualified.insert(word.to_string());
        }
        i = j.max(i + 1);
    }
    refs
}

fn stem(path: &str) -> &str {
    let base = base_name(path);
    match base.rfind('.') {
        Some(0) | None => base,
        Some(i) => &base[..i],
    }
}

fn dir_of(path: &str) -> &str {
    path.rfind('/').map_or("", |i| &path[..i])
}

fn normalize(path: &str) -> Option<String> {
    let mut parts: Vec<&str> = Vec::new();
    for seg in path.split('/') {
        match seg {
            "" | "." => {}
            ".." => {
                parts.pop()?;
            }
            s => parts.push(s),
        }
    }
    Some(parts.join("/"))
}

/// Builds the dependency graph of a corpus. Files outside the C family
/// become nodes without edges.
pub fn extract_deps(files: &[ScannedFile], exec: Execution) -> DepGraph {
    let scanned: Vec<Option<FileRefs>> = exec.map(files, |f| {
        (f.language() == LanguageFamily::CFamily).then(|| scan_file(&f.text))
    });

    // package key: declared package, else directory path with dots
    let package_of = |f: &ScannedFile, refs: &Option<FileRefs>| -> String {
        refs.as_ref()
            .and_then(|r| r.package.clone())
            .unwrap_or_else(|| dir_of(f.path()).replace('/', "."))
    };
    let mut by_fqn: BTreeMap<String, Vec<&str>> = BTreeMap::new();
    let mut by_package: BTreeMap<String, BTreeMap<&str, Vec<&str>>> = BTreeMap::new();
    let mut packages = Vec::with_capacity(files.len());
    for (f, refs) in files.iter().zip(&scanned) {
        let pkg = package_of(f, refs);
        let s = stem(f.path());
        let fqn = if pkg.is_empty() {
            s.to_string()
        } else {
            format!("{pkg}.{s}")
        };
        if refs.is_some() {
            by_fqn.entry(fqn).or_default().push(f.path());
            by_package
                .entry(pkg.clone())
                .or_default()
                .entry(s)
                .or_default()
                .push(f.path());
        }
        packages.push(pkg);
    }
    let paths: BTreeSet<&str> = files.iter().map(|f| f.path()).collect();

    let per_file: Vec<usize> = (0..files.len()).collect();
    let edge_lists: Vec<Vec<&str>> = exec.map(&per_file, |&idx| {
        let Some(refs) = &scanned[idx] else {
            return Vec::new();
        };
        let mut targets: BTreeSet<&str> = BTreeSet::new();
        for chain in &refs.qualified {
            // longest prefix naming an entity: `org.x.B.Inner` resolves to org.x.B
            for len in (2..=chain.len()).rev() {
                if let Some(hits) = by_fqn.get(&chain[..len].join(".")) {
                    targets.extend(hits.iter().copied());
                    break;
                }
            }
        }
        let mut visible: Vec<&str> = vec![&packages[idx]];
        visible.extend(refs.wildcards.iter().map(String::as_str));
        for pkg in visible {
            if let Some(members) = by_package.get(pkg) {
                for name in &refs.unqualified {
                    if let Some(hits) = members.get(name.as_str()) {
                        targets.extend(hits.iter().copied());
                    }
                }
            }
        }
        let here = dir_of(files[idx].path());
        for inc in &refs.includes {
            let local = normalize(&if here.is_empty() {
                inc.clone()
            } else {
                format!("{here}/{inc}")
            });
            if let Some(p) = local.as_deref().and_then(|l| paths.get(l)) {
                targets.insert(p);
                continue;
            }
            let suffix = format!("/{inc}");
            let matches: Vec<&str> = paths
                .iter()
                .copied()
                .filter(|p| *p == inc || p.ends_with(&suffix))
                .collect();
            if matches.len() == 1 {
                targets.insert(matches[0]);
            }
        }
        targets.into_iter().collect()
    });

    let mut graph = DepGraph::new(files.iter().map(|f| f.path().to_string()));
    for (f, targets) in files.iter().zip(edge_lists) {
        for t in targets {
            graph.add_edge(f.path(), t);
        }
    }
    graph
}

#[cfg(test)]
mod tests {
    use super::*;

    fn files(specs: &[(&str, &str)]) -> Vec<ScannedFile> {
        specs.iter().map(|(p, t)| ScannedFile::from_text(p, t)).collect()
    }

    fn edges(g: &DepGraph) -> Vec<(String, String)> {
        g.edges().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn single_type_import() {
        let g = extract_deps(
            &files(&[
                ("org/y/A.java", "package org.y;\nimport org.x.B;\nclass A {}"),
                ("org/x/B.java", "package org.x;\nclass B {}"),
            ]),
            Execution::Sequential,
        );
        assert_eq!(edges(&g), vec![("org/y/A.java".into(), "org/x/B.java".into())]);
    }

    #[test]
    fn external_import_ignored() {
        let g = extract_deps(
            &files(&[(
                "org/y/A.java",
                "package org.y;\nimport java.sql.ResultSet;\nclass A { ResultSet rs; }",
            )]),
            Execution::Sequential,
        );
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.nodes().count(), 1);
    }

    #[test]
    fn same_package_sibling_by_name() {
        let g = extract_deps(
            &files(&[
                ("p/A.java", "package p;\nclass A { B b; }"),
                ("p/B.java", "package p;\nclass B {}"),
                ("p/C.java", "package p;\n// B is mentioned only in a comment\nclass C { String s = \"B\"; }"),
            ]),
            Execution::Sequential,
        );
        assert_eq!(edges(&g), vec![("p/A.java".into(), "p/B.java".into())]);
    }

    #[test]
    fn fan_lists() {
        let mut g = DepGraph::new(["a".to_string(), "b".to_string(), "c".to_string()]);
        g.add_edge("a", "b");
        g.add_edge("c", "b");
        assert!(!g.add_edge("a", "a"));
        assert!(!g.add_edge("a", "zzz"));
        assert_eq!(g.fan("b").unwrap(), (vec![], vec!["a", "c"]));
        assert_eq!(g.fan("a").unwrap(), (vec!["b"], vec![]));
        let lonely = DepGraph::new(["x".to_string()]);
        assert_eq!(lonely.fan("x").unwrap(), (vec![], vec![]));
        assert_eq!(g.fan("q"), Err(DepsError::UnknownNode("q".into())));
    }

    #[test]
    fn tsv_round_trip() {
        let mut g = DepGraph::new(["a".to_string(), "b".to_string(), "c".to_string()]);
        g.add_edge("b", "a");
        g.add_edge("a", "c");
        let text = g.to_tsv();
        assert_eq!(text, "# from\tto\na\tc\nb\ta\n");
        let back = DepGraph::from_tsv(&text, ["a", "b", "c"]).unwrap();
        assert_eq!(back, g);
        assert!(matches!(
            DepGraph::from_tsv("a b\n", []),
            Err(DepsError::Malformed { line: 1 })
        ));
    }

    #[test]
    fn lexer_skips_numbers_and_keeps_dots() {
        let lx = lex("x = 1.5; a.b");
        assert_eq!(
            lx,
            vec![
                Lexeme::Ident("x"),
                Lexeme::Punct('='),
                Lexeme::Punct(';'),
                Lexeme::Ident("a"),
                Lexeme::Punct('.'),
                Lexeme::Ident("b"),
            ]
        );
    }

    #[test]
    fn include_resolution() {
        let g = extract_deps(
            &files(&[
                ("src/main.c", "#include \"util/log.h\"\n#include <stdio.h>\n#include \"missing.h\"\nint main() {}"),
                ("src/util/log.h", "void log_msg(void);"),
                ("src/util/log.c", "#include \"log.h\"\nvoid log_msg(void) {}"),
            ]),
            Execution::Sequential,
        );
        assert_eq!(
            edges(&g),
            vec![
                ("src/main.c".into(), "src/util/log.h".into()),
                ("src/util/log.c".into(), "src/util/log.h".into()),
            ]
        );
    }

    #[test]
    fn normalize_paths() {
        assert_eq!(normalize("a/./b/../c").as_deref(), Some("a/c"));
        assert_eq!(normalize("../x"), None);
    }
}
