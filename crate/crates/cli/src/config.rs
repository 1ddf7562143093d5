//! Optional TOML run configuration. Command-line flags win over file values,
//! which win over built-in defaults.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub training: Option<PathBuf>,
    #[serde(default)]
    pub include: Vec<String>,
    #[serde(default)]
    pub exclude: Vec<String>,
    pub weight_measure: Option<String>,
    pub unknown_threshold: Option<f64>,
    pub alpha: Option<f64>,
    pub n_candidates: Option<usize>,
    pub holdout_fraction: Option<f64>,
    pub base_seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub audit: Option<bool>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut config: RunConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        // relative paths in the file are relative to the file
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut config.model,
            &mut config.corpus,
            &mut config.training,
            &mut config.output,
            &mut config.cache,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }
}

/// First of flag, file value, default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// First of flag and file value, or an error naming the missing setting.
pub fn require<T>(flag: Option<T>, file: Option<T>, what: &str) -> Result<T> {
    flag.or(file)
        .with_context(|| format!("missing {what}: pass it as an argument or set it in the config file"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_resolves_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "model = \"m.model\"\ncorpus = \"/abs/src\"\nunknown_threshold = 0.6\ninclude = [\"**/*.java\"]\n",
        )
        .unwrap();
        let c = RunConfig::load(&path).unwrap();
        assert_eq!(c.model, Some(dir.path().join("m.model")));
        assert_eq!(c.corpus, Some(PathBuf::from("/abs/src")));
        assert_eq!(c.unknown_threshold, Some(0.6));
        assert_eq!(c.include, vec!["**/*.java".to_string()]);
    }

    #[test]
    fn rejects_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "modle = \"x\"\n").unwrap();
        assert!(RunConfig::load(&path).is_err());
    }

    #[test]
    fn precedence() {
        assert_eq!(pick(Some(1), Some(2), 3), 1);
        assert_eq!(pick(None, Some(2), 3), 2);
        assert_eq!(pick(None, None, 3), 3);
        assert!(require::<u8>(None, None, "model").is_err());
    }
}
