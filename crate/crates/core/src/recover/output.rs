//! Tab-separated report files.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use super::RecoveryResult;
use crate::deps::DepGraph;
use crate::textfmt::escape_field;
use crate::write_atomic;

/// Paths written by [`write_textual_output`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFiles {
    pub entities: PathBuf,
    pub clusters: PathBuf,
    pub dependencies: PathBuf,
}

/// One row per entity with its measures and affinities, one column per
/// concern.
pub fn render_entities(result: &RecoveryResult) -> String {
    let mut out = String::from("# path\tmain_concern\tbytes\tphysical_sloc\tlogical_sloc");
    for c in result.concerns() {
        out.push('\t');
        out.push_str(c);
    }
    out.push('\n');
    for r in result.records() {
        let e = &r.entity;
        let _ = write!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            escape_field(&e.path),
            r.main_concern,
            e.byte_size,
            e.physical_sloc,
            e.logical_sloc
        );
        for a in &r.affinities {
            let _ = write!(out, "\t{a:.6}");
        }
        out.push('\n');
    }
    out
}

/// Cluster roster as `cluster<TAB>path` lines, the same format accepted as
/// ground truth by the metrics.
pub fn render_clusters(result: &RecoveryResult) -> String {
    let mut out = String::from("# cluster\tpath\n");
    for c in result.clusters() {
        for m in &c.members {
            let _ = writeln!(out, "{}\t{}", c.name, escape_field(m));
        }
    }
    out
}

/// Writes `entities.tsv`, `clusters.tsv` and `dependencies.tsv` into
/// `out_dir`, each atomically.
pub fn write_textual_output(
    result: &RecoveryResult,
    deps: &DepGraph,
    out_dir: &Path,
) -> io::Result<OutputFiles> {
    std::fs::create_dir_all(out_dir)?;
    let files = OutputFiles {
        entities: out_dir.join("entities.tsv"),
        clusters: out_dir.join("clusters.tsv"),
        dependencies: out_dir.join("dependencies.tsv"),
    };
    write_atomic(&files.entities, render_entities(result).as_bytes())?;
    write_atomic(&files.clusters, render_clusters(result).as_bytes())?;
    write_atomic(&files.dependencies, deps.to_tsv().as_bytes())?;
    Ok(files)
}
