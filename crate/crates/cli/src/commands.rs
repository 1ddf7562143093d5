use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use concernmap_core::bayes::{load_model, render_reports, save_model, train_and_select, TrainingOptions};
use concernmap_core::corpus::{load_training_corpus, scan_corpus, ScanOptions};
use concernmap_core::deps::{extract_deps, DepGraph};
use concernmap_core::metrics::{compare, diff_recoveries, Partition};
use concernmap_core::recover::{
    incremental_recover, recover, write_textual_output, RecoverOptions, RecoveryRun,
    RESULT_MAGIC,
};
use concernmap_core::viz::{assign_palette, build_tree, emit_dot, user_palette, DotOptions};
use concernmap_core::{
    write_atomic, ClassifierModel, Execution, RecoveryCache, RecoveryConfig, RecoveryResult,
    ScannedFile, WeightMeasure,
};

use crate::config::{pick, require, RunConfig};
use crate::{CacheCommand, Cli, Command};

struct Ctx {
    file: RunConfig,
    exec: Execution,
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let exec = Execution::from_threads(cli.threads.or(file.threads));
    let ctx = Ctx { file, exec };
    match cli.command {
        Command::Train(a) => train(&ctx, a),
        Command::Recover(a) => recover_cmd(&ctx, a),
        Command::Viz(a) => viz(&ctx, a),
        Command::Mojofm(a) => mojofm(a),
        Command::Diff(a) => diff(a),
        Command::Cache(CacheCommand::Audit(a)) => cache_audit(&ctx, a),
        Command::Cache(CacheCommand::Clear(a)) => cache_clear(&ctx, a),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read(path)?).with_context(|| format!("{} is not UTF-8", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    write_atomic(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn load_result(path: &Path) -> Result<RecoveryResult> {
    RecoveryResult::from_text(&read_text(path)?)
        .with_context(|| format!("parsing result {}", path.display()))
}

fn load_classifier(path: &Path) -> Result<ClassifierModel> {
    load_model(&read(path)?).with_context(|| format!("loading model {}", path.display()))
}

fn parse_weight(s: &str) -> Result<WeightMeasure> {
    s.parse::<WeightMeasure>()
        .map_err(|e| anyhow::anyhow!("{e}"))
        .context("invalid weight measure")
}

fn train(ctx: &Ctx, a: crate::TrainArgs) -> Result<ExitCode> {
    let root = require(a.training_root, ctx.file.training.clone(), "training root")?;
    let defaults = TrainingOptions::default();
    let options = TrainingOptions {
        alpha: pick(a.alpha, ctx.file.alpha, defaults.alpha),
        n_candidates: pick(a.candidates, ctx.file.n_candidates, defaults.n_candidates),
        holdout_fraction: pick(a.holdout, ctx.file.holdout_fraction, defaults.holdout_fraction),
        base_seed: pick(a.seed, ctx.file.base_seed, defaults.base_seed),
    };
    let corpus = load_training_corpus(&root)
        .with_context(|| format!("loading training corpus {}", root.display()))?;
    let selection = train_and_select(&corpus, &options, ctx.exec)?;
    let report = render_reports(&selection);
    write(&a.out, &save_model(&selection.model))?;
    let report_path = a.report.unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".report.txt");
        PathBuf::from(p)
    });
    write(&report_path, report.as_bytes())?;
    print!("{report}");
    println!(
        "trained {} concerns on {} documents; model written to {}",
        corpus.concerns().len(),
        corpus.document_count(),
        a.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

struct Scoring {
    model: ClassifierModel,
    config: RecoveryConfig,
    scan: ScanOptions,
}

fn scoring(ctx: &Ctx, s: crate::ScoringArgs) -> Result<Scoring> {
    let model_path = require(s.model, ctx.file.model.clone(), "model")?;
    let model = load_classifier(&model_path)?;
    let defaults = RecoveryConfig::default();
    let weight_measure = match s.weight.or(ctx.file.weight_measure.clone()) {
        Some(w) => parse_weight(&w)?,
        None => defaults.weight_measure,
    };
    let config = RecoveryConfig {
        unknown_threshold: pick(s.threshold, ctx.file.unknown_threshold, defaults.unknown_threshold),
        weight_measure,
    };
    config.validate()?;
    let mut scan = ScanOptions::default();
    let include = if s.include.is_empty() { ctx.file.include.clone() } else { s.include };
    if !include.is_empty() {
        scan.include = include;
    }
    scan.exclude = if s.exclude.is_empty() { ctx.file.exclude.clone() } else { s.exclude };
    Ok(Scoring { model, config, scan })
}

/// Scans `root`, leaving out `out` when it lies inside the tree.
fn scan(root: &Path, options: &ScanOptions, out: Option<&Path>) -> Result<Vec<ScannedFile>> {
    let mut options = options.clone();
    if let Some(out) = out {
        let (Ok(root), Ok(out)) = (root.canonicalize(), out.canonicalize()) else {
            return scan_inner(root, &options);
        };
        if let Ok(rel) = out.strip_prefix(&root) {
            if let Some(rel) = rel.to_str().filter(|r| !r.is_empty()) {
                options.exclude.push(format!("{}/**", rel.replace('\\', "/")));
            }
        }
    }
    scan_inner(root, &options)
}

fn scan_inner(root: &Path, options: &ScanOptions) -> Result<Vec<ScannedFile>> {
    let scan = scan_corpus(root, options).with_context(|| format!("scanning {}", root.display()))?;
    for w in &scan.warnings {
        eprintln!("warning: {w}");
    }
    Ok(scan.files)
}

fn print_run(run: &RecoveryRun) {
    for w in &run.warnings {
        eprintln!("warning: {w}");
    }
    for c in run.result.clusters() {
        println!("{}\t{}", c.name, c.members.len());
    }
    let s = run.stats;
    println!(
        "reused: {}, reclassified: {}, added: {}, removed: {}",
        s.reused, s.reclassified, s.added, s.removed
    );
    if s.audited > 0 {
        println!("audited: {}, mismatches: {}", s.audited, s.audit_mismatches);
    }
}

fn recover_cmd(ctx: &Ctx, a: crate::RecoverArgs) -> Result<ExitCode> {
    let root = require(a.corpus_root, ctx.file.corpus.clone(), "corpus root")?;
    let out = require(a.out, ctx.file.output.clone(), "output directory")?;
    let Scoring { model, config, scan: scan_opts } = scoring(ctx, a.scoring)?;
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let files = scan(&root, &scan_opts, Some(&out))?;

    let cache_path = a
        .cache
        .or(ctx.file.cache.clone())
        .unwrap_or_else(|| out.join("cache.tsv"));
    let (mut cache, warning) = RecoveryCache::load(&cache_path);
    if let Some(w) = warning {
        eprintln!("warning: {w}");
    }
    let options = RecoverOptions {
        audit: a.audit || ctx.file.audit.unwrap_or(false),
        exec: ctx.exec,
    };
    let result_path = out.join("result.txt");
    let previous_path = a.previous.unwrap_or_else(|| result_path.clone());
    let previous = if a.full || !previous_path.exists() {
        None
    } else {
        match load_result(&previous_path) {
            Ok(r) => Some(r),
            Err(e) => {
                eprintln!("warning: ignoring previous result: {e:#}");
                None
            }
        }
    };
    let run = match &previous {
        Some(prev) => incremental_recover(prev, &files, &model, &mut cache, &config, &options)?,
        None => recover(&files, &model, &mut cache, &config, &options)?,
    };
    let deps = extract_deps(&files, ctx.exec);
    write_textual_output(&run.result, &deps, &out)
        .with_context(|| format!("writing reports to {}", out.display()))?;
    write(&result_path, run.result.to_text().as_bytes())?;
    cache
        .save(&cache_path)
        .with_context(|| format!("writing cache {}", cache_path.display()))?;
    print_run(&run);
    Ok(ExitCode::SUCCESS)
}

fn viz(ctx: &Ctx, a: crate::VizArgs) -> Result<ExitCode> {
    let result = load_result(&a.result)?;
    let measure = match a.weight.or(ctx.file.weight_measure.clone()) {
        Some(w) => parse_weight(&w)?,
        None => result.config().weight_measure,
    };
    let deps = match &a.deps {
        Some(p) => Some(
            DepGraph::from_tsv(&read_text(p)?, result.records().iter().map(|r| r.path()))
                .with_context(|| format!("parsing {}", p.display()))?,
        ),
        None => None,
    };
    let palette = match &a.palette {
        Some(p) => {
            let colors: Vec<String> = read_text(p)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with("//"))
                .map(str::to_string)
                .collect();
            user_palette(result.concerns(), &colors)?
        }
        None => assign_palette(result.concerns())?,
    };
    let tree = build_tree(&result, measure)?;
    let dot = emit_dot(
        &tree,
        &palette,
        deps.as_ref(),
        &DotOptions {
            width: a.width,
            height: a.height,
            detail: a.detail,
        },
    )?;
    let out = a.out.unwrap_or_else(|| {
        a.result
            .parent()
            .unwrap_or(Path::new(""))
            .join("concerns.dot")
    });
    write(&out, dot.as_bytes())?;
    println!("wrote {}", out.display());
    println!("system prevailing concern: {}", tree.root().prevailing.name(result.concerns()));
    if a.pdf {
        render_pdf(&out)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn render_pdf(dot: &Path) -> Result<()> {
    let pdf = dot.with_extension("pdf");
    let tmp = dot.with_extension("pdf.tmp");
    match std::process::Command::new("dot")
        .arg("-Tpdf")
        .arg(dot)
        .arg("-o")
        .arg(&tmp)
        .status()
    {
        Ok(s) if s.success() => {
            std::fs::rename(&tmp, &pdf).with_context(|| format!("writing {}", pdf.display()))?;
            println!("wrote {}", pdf.display());
            Ok(())
        }
        Ok(s) => {
            let _ = std::fs::remove_file(&tmp);
            bail!("dot exited with {s}")
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            eprintln!("warning: Graphviz `dot` not found; skipped PDF");
            Ok(())
        }
        Err(e) => Err(e).context("running dot"),
    }
}

fn load_partition(path: &Path) -> Result<Partition> {
    let text = read_text(path)?;
    if text.starts_with(RESULT_MAGIC) {
        let r = RecoveryResult::from_text(&text)
            .with_context(|| format!("parsing result {}", path.display()))?;
        Ok(Partition::from_result(&r))
    } else {
        Partition::from_roster(&text).with_context(|| format!("parsing roster {}", path.display()))
    }
}

fn mojofm(a: crate::MojofmArgs) -> Result<ExitCode> {
    let recovered = Partition::from_result(&load_result(&a.result)?);
    let truth = load_partition(&a.ground_truth)?;
    let c = compare(&recovered, &truth)?;
    if let Some(w) = c.coverage_warning() {
        eprintln!("warning: {w}");
    }
    println!("{:.2}", c.mojofm);
    Ok(ExitCode::SUCCESS)
}

fn diff(a: crate::DiffArgs) -> Result<ExitCode> {
    let old = load_result(&a.old)?;
    let new = load_result(&a.new)?;
    let mut d = diff_recoveries(&old, &new)?;
    for w in std::mem::take(&mut d.warnings) {
        eprintln!("warning: {w}");
    }
    print!("{d}");
    Ok(ExitCode::SUCCESS)
}

fn cache_audit(ctx: &Ctx, a: crate::CacheAuditArgs) -> Result<ExitCode> {
    let root = require(a.corpus_root, ctx.file.corpus.clone(), "corpus root")?;
    let cache_path = require(a.cache, ctx.file.cache.clone(), "cache path")?;
    let Scoring { model, config, scan: scan_opts } = scoring(ctx, a.scoring)?;
    let files = scan(&root, &scan_opts, cache_path.parent())?;
    let (mut cache, warning) = RecoveryCache::load(&cache_path);
    if let Some(w) = warning {
        bail!("{w}");
    }
    let options = RecoverOptions { audit: true, exec: ctx.exec };
    let run = recover(&files, &model, &mut cache, &config, &options)?;
    for w in &run.warnings {
        eprintln!("warning: {w}");
    }
    let s = run.stats;
    println!(
        "audited: {}, mismatches: {}, not cached: {}",
        s.audited, s.audit_mismatches, s.reclassified
    );
    if s.audit_mismatches > 0 {
        cache
            .save(&cache_path)
            .with_context(|| format!("writing cache {}", cache_path.display()))?;
        eprintln!("repaired {} cache entries", s.audit_mismatches);
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn cache_clear(ctx: &Ctx, a: crate::CacheClearArgs) -> Result<ExitCode> {
    let cache_path = require(a.cache, ctx.file.cache.clone(), "cache path")?;
    let (cache, warning) = RecoveryCache::load(&cache_path);
    if let Some(w) = warning {
        eprintln!("warning: {w}");
    }
    RecoveryCache::new()
        .save(&cache_path)
        .with_context(|| format!("writing cache {}", cache_path.display()))?;
    println!("removed {} entries", cache.len());
    Ok(ExitCode::SUCCESS)
}
