//! Seeded generators for training corpora and Java-like source trees.
//!
//! Used by the benchmarks and the end-to-end tests; output depends only on
//! the generator settings and their seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{tokenize, ScannedFile, TrainingCorpus};

const THEMES: [(&str, &[&str]); 6] = [
    (
        "Database",
        &[
            "query", "table", "column", "row", "schema", "commit", "rollback", "transaction",
            "sql", "cursor", "index", "join", "select", "insert", "update", "delete", "record",
            "primary", "foreign", "key", "statement", "result", "driver", "jdbc", "persist",
            "entity", "migration", "tuple", "relation", "ledger",
        ],
    ),
    (
        "Graphics",
        &[
            "pixel", "render", "screen", "canvas", "paint", "color", "shape", "sprite", "texture",
            "frame", "draw", "window", "font", "glyph", "raster", "vector", "shader", "polygon",
            "bitmap", "image", "alpha", "blend", "viewport", "camera", "mesh", "layer", "stroke",
            "gradient", "palette", "opacity",
        ],
    ),
    (
        "Networking",
        &[
            "socket", "packet", "address", "port", "http", "request", "response", "header",
            "server", "client", "tcp", "udp", "connect", "stream", "protocol", "host", "route",
            "proxy", "gateway", "dns", "handshake", "payload", "timeout", "bandwidth", "latency",
            "router", "session", "channel", "listener", "endpoint",
        ],
    ),
    (
        "Security",
        &[
            "cipher", "encrypt", "decrypt", "token", "password", "credential", "hash", "salt",
            "certificate", "signature", "permission", "role", "grant", "audit", "secret",
            "nonce", "digest", "vault", "principal", "policy", "firewall", "login", "logout",
            "authenticate", "authorize", "keystore", "trust", "verify", "sanitize", "privilege",
        ],
    ),
    (
        "Logging",
        &[
            "log", "logger", "trace", "debug", "warn", "severity", "appender", "verbose",
            "message", "journal", "rotate", "archive", "timestamp", "category", "emit",
            "sink", "formatter", "level", "console", "syslog", "metric", "counter", "gauge",
            "histogram", "span", "telemetry", "diagnostic", "dump", "tail", "flush",
        ],
    ),
    (
        "Parsing",
        &[
            "parse", "lexer", "grammar", "syntax", "ast", "production", "terminal", "symbol",
            "scanner", "lookahead", "precedence", "operator", "literal", "identifier", "keyword",
            "tree", "visitor", "rule", "reduce", "shift", "ambiguity", "recover", "quote",
            "escape", "delimiter", "tokenizer", "expression", "clause", "nesting", "comment",
        ],
    ),
];

const SHARED: &[&str] = &[
    "value", "data", "item", "list", "process", "handle", "manager", "buffer", "count", "size",
    "name", "config", "option", "context", "builder", "factory", "helper", "service", "state",
    "event", "callback", "queue", "cache", "pool", "task", "worker", "entry", "node", "element",
    "object",
];

/// Names of the first `n` built-in concerns.
pub fn concern_names(n: usize) -> Vec<String> {
    assert!(n <= THEMES.len(), "at most {} synthetic concerns", THEMES.len());
    THEMES[..n].iter().map(|(name, _)| name.to_string()).collect()
}

/// Shape of a generated training corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingSpec {
    pub concerns: usize,
    pub docs_per_concern: usize,
    /// Probability a word comes from the document's own concern.
    pub own_share: f64,
    /// Probability a word comes from the shared pool; the remainder is drawn
    /// from other concerns.
    pub shared_share: f64,
    pub min_words: usize,
    pub max_words: usize,
    pub seed: u64,
}

impl TrainingSpec {
    /// Concerns share a common pool and borrow some of each other's words.
    pub fn overlapping(seed: u64) -> Self {
        TrainingSpec {
            concerns: 3,
            docs_per_concern: 60,
            own_share: 0.38,
            shared_share: 0.4,
            min_words: 15,
            max_words: 40,
            seed,
        }
    }

    /// Every word comes from the document's own concern.
    pub fn separable(seed: u64) -> Self {
        TrainingSpec {
            own_share: 1.0,
            shared_share: 0.0,
            ..Self::overlapping(seed)
        }
    }
}

fn draw_word<'a>(rng: &mut ChaCha8Rng, own: usize, k: usize, own_share: f64, shared_share: f64) -> &'a str {
    let r: f64 = rng.gen();
    let pool: &[&str] = if r < own_share || k == 1 {
        THEMES[own].1
    } else if r < own_share + shared_share {
        SHARED
    } else {
        let mut other = rng.gen_range(0..k - 1);
        if other >= own {
            other += 1;
        }
        THEMES[other].1
    };
    pool.choose(rng).expect("non-empty pool")
}

/// Plain-text training documents grouped by concern.
pub fn training_documents(spec: &TrainingSpec) -> Vec<(String, Vec<String>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    concern_names(spec.concerns)
        .into_iter()
        .enumerate()
        .map(|(c, name)| {
            let docs = (0..spec.docs_per_concern)
                .map(|_| {
                    let len = rng.gen_range(spec.min_words..=spec.max_words);
                    (0..len)
                        .map(|_| draw_word(&mut rng, c, spec.concerns, spec.own_share, spec.shared_share))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect();
            (name, docs)
        })
        .collect()
}

pub fn training_corpus(spec: &TrainingSpec) -> TrainingCorpus {
    let groups = training_documents(spec)
        .into_iter()
        .map(|(name, docs)| (name, docs.iter().map(|d| tokenize(d)).collect()))
        .collect();
    TrainingCorpus::new(groups).expect("generated corpus is valid")
}

/// Shape of a generated source tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    pub concerns: usize,
    pub files: usize,
    pub min_lines: usize,
    pub max_lines: usize,
    /// Share of files written only with shared words.
    pub neutral_share: f64,
    pub seed: u64,
}

impl SourceSpec {
    pub fn with_files(files: usize, seed: u64) -> Self {
        SourceSpec {
            concerns: 3,
            files,
            min_lines: 20,
            max_lines: 80,
            neutral_share: 0.1,
            seed,
        }
    }

    /// About `sloc` physical source lines in total.
    pub fn with_sloc(sloc: u64, seed: u64) -> Self {
        let spec = Self::with_files(1, seed);
        // three in four body lines are code, plus about eight header lines
        let per_file = (spec.min_lines + spec.max_lines) as u64 * 3 / 8 + 8;
        SourceSpec {
            files: (sloc / per_file).max(1) as usize,
            ..spec
        }
    }
}

fn camel(words: &[&str]) -> String {
    words
        .iter()
        .map(|w| {
            let mut c = w.chars();
            c.next()
                .map(|f| f.to_ascii_uppercase().to_string() + c.as_str())
                .unwrap_or_default()
        })
        .collect()
}

fn lower_camel(words: &[&str]) -> String {
    let mut s = camel(words);
    if let Some(f) = s.get(..1) {
        let lower = f.to_ascii_lowercase();
        s.replace_range(..1, &lower);
    }
    s
}

const MODULES: [&str; 5] = ["core", "store", "view", "io", "util"];

/// Java-like files under `org/sample/<module>/<sub>/`. Each file mostly uses
/// one concern's vocabulary, imports a few earlier classes and references a
/// sibling now and then.
pub fn source_texts(spec: &SourceSpec) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5eed_f11e);
    let mut out: Vec<(String, String)> = Vec::with_capacity(spec.files);
    let mut classes: Vec<(String, String)> = Vec::new(); // (package, class)
    for i in 0..spec.files {
        let module = MODULES[rng.gen_range(0..MODULES.len())];
        let sub = ["api", "impl", "model"][rng.gen_range(0..3)];
        let package = format!("org.sample.{module}.{sub}");
        let neutral = rng.gen_bool(spec.neutral_share);
        let own = rng.gen_range(0..spec.concerns);
        let pick = |rng: &mut ChaCha8Rng| -> &'static str {
            if neutral {
                SHARED.choose(rng).expect("non-empty")
            } else {
                draw_word(rng, own, spec.concerns, 0.7, 0.25)
            }
        };
        let class = format!("{}{i}", camel(&[pick(&mut rng), pick(&mut rng)]));

        let mut text = format!("package {package};\n\n");
        let mut used = Vec::new();
        if !classes.is_empty() {
            for _ in 0..rng.gen_range(0..=3) {
                let (p, c) = &classes[rng.gen_range(0..classes.len())];
                text.push_str(&format!("import {p}.{c};\n"));
                used.push(c.clone());
            }
        }
        text.push_str("import java.util.List;\n\n");
        text.push_str(&format!("/** {} support. */\n", pick(&mut rng)));
        text.push_str(&format!("public class {class} {{\n"));
        if let Some(sibling) = classes.iter().rev().find(|(p, _)| *p == package) {
            if rng.gen_bool(0.3) {
                text.push_str(&format!("    private {} peer;\n", sibling.1));
            }
        }
        for u in &used {
            text.push_str(&format!("    private {u} {};\n", lower_camel(&[pick(&mut rng), "ref"])));
        }
        let lines = rng.gen_range(spec.min_lines..=spec.max_lines);
        for _ in 0..lines {
            let line = match rng.gen_range(0..4) {
                0 => format!(
                    "    int {} = {}({});",
                    lower_camel(&[pick(&mut rng), pick(&mut rng)]),
                    lower_camel(&[pick(&mut rng), pick(&mut rng)]),
                    lower_camel(&[pick(&mut rng)])
                ),
                1 => format!(
                    "    // {} the {} before {}",
                    pick(&mut rng),
                    pick(&mut rng),
                    pick(&mut rng)
                ),
                2 => format!(
                    "    void {}() {{ {}.{}(); }}",
                    lower_camel(&[pick(&mut rng), pick(&mut rng)]),
                    lower_camel(&[pick(&mut rng)]),
                    lower_camel(&[pick(&mut rng), pick(&mut rng)])
                ),
                _ => format!(
                    "    String {} = \"{} {}\";",
                    lower_camel(&[pick(&mut rng), pick(&mut rng)]),
                    pick(&mut rng),
                    pick(&mut rng)
                ),
            };
            text.push_str(&line);
            text.push('\n');
        }
        text.push_str("}\n");
        let path = format!("{}/{class}.java", package.replace('.', "/"));
        classes.push((package, class));
        out.push((path, text));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

pub fn source_files(spec: &SourceSpec) -> Vec<ScannedFile> {
    source_texts(spec)
        .iter()
        .map(|(p, t)| ScannedFile::from_text(p, t))
        .collect()
}
