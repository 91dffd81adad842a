//! Run configuration: one versioned TOML file. Relative paths resolve
//! against the config file's directory; command-line flags override
//! config values; nothing reads the environment.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analytics::Metric;
use crate::corpus::{PartisanBucket, QueryFilter};
use crate::embeddings::TrainConfig;
use crate::{Error, Result};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub version: u32,
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub normalized: bool,
    pub paths: PathsConfig,
    #[serde(default)]
    pub query: QueryFilter,
    #[serde(default)]
    pub embedding: EmbeddingConfig,
    #[serde(default)]
    pub alignment: AlignmentConfig,
    #[serde(default)]
    pub analytics: AnalyticsConfig,
}

fn default_workers() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathsConfig {
    pub documents: PathBuf,
    pub outlets: PathBuf,
    pub sentiment_lexicon: PathBuf,
    pub offensive_lexicon: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external_scores: Option<PathBuf>,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_count: u64,
    pub n_min: usize,
    pub n_max: usize,
    pub buckets: usize,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        EmbeddingConfig {
            dim: t.dim,
            window: t.window,
            negatives: t.negatives,
            epochs: t.epochs,
            learning_rate: t.learning_rate,
            min_count: 5,
            n_min: t.n_min,
            n_max: t.n_max,
            buckets: t.buckets,
        }
    }
}

impl EmbeddingConfig {
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            dim: self.dim,
            window: self.window,
            negatives: self.negatives,
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            n_min: self.n_min,
            n_max: self.n_max,
            buckets: self.buckets,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct AlignmentConfig {
    /// Which extreme bucket is the source language: "left-to-right"
    /// (source = left) or "right-to-left".
    pub direction: String,
    /// "nearest-neighbor" or "inverted-softmax".
    pub method: String,
    pub softmax_temperature: f64,
    pub top_k: usize,
    pub top_n_seeds: usize,
    /// How many mined pairs get illustrative contexts in the report.
    pub context_pairs: usize,
    pub contexts_per_pair: usize,
}

impl Default for AlignmentConfig {
    fn default() -> Self {
        AlignmentConfig {
            // No default direction: which side is the source language
            // must be an explicit choice.
            direction: String::new(),
            method: "nearest-neighbor".to_string(),
            softmax_temperature: 10.0,
            top_k: 5000,
            top_n_seeds: 1000,
            context_pairs: 10,
            contexts_per_pair: 2,
        }
    }
}

impl AlignmentConfig {
    /// (source bucket, target bucket) per the direction flag.
    pub fn buckets(&self) -> Result<(PartisanBucket, PartisanBucket)> {
        match self.direction.as_str() {
            "left-to-right" => Ok((PartisanBucket::Left, PartisanBucket::Right)),
            "right-to-left" => Ok((PartisanBucket::Right, PartisanBucket::Left)),
            "" => Err(Error::config(
                "alignment.direction must be set explicitly (left-to-right or right-to-left)",
            )),
            other => Err(Error::config(format!(
                "alignment direction must be left-to-right or right-to-left, got {other:?}"
            ))),
        }
    }

    pub fn translation_method(&self) -> Result<crate::alignment::TranslationMethod> {
        match self.method.as_str() {
            "nearest-neighbor" => Ok(crate::alignment::TranslationMethod::NearestNeighbor),
            "inverted-softmax" => Ok(crate::alignment::TranslationMethod::InvertedSoftmax {
                temperature: self.softmax_temperature,
            }),
            other => Err(Error::config(format!(
                "translation method must be nearest-neighbor or inverted-softmax, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalyticsConfig {
    pub window: usize,
    pub metrics: Vec<String>,
}

impl Default for AnalyticsConfig {
    fn default() -> Self {
        AnalyticsConfig {
            window: 3,
            metrics: vec![
                "count".to_string(),
                "sentiment_compound".to_string(),
                "offensive".to_string(),
            ],
        }
    }
}

impl AnalyticsConfig {
    pub fn parsed_metrics(&self) -> Result<Vec<Metric>> {
        self.metrics.iter().map(|m| Metric::parse(m)).collect()
    }
}

/// A loaded config plus the hash of the raw file it came from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub config_hash: String,
}

impl RunConfig {
    /// Load, version-check, and resolve relative paths against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<LoadedConfig> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut config: RunConfig = toml::from_str(&raw)
            .map_err(|e| Error::config(format!("bad config {}: {e}", path.display())))?;
        if config.version != CONFIG_VERSION {
            return Err(Error::config(format!(
                "config version {} unsupported (expected {CONFIG_VERSION})",
                config.version
            )));
        }
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &PathBuf| -> PathBuf {
            if p.is_absolute() {
                p.clone()
            } else {
                base.join(p)
            }
        };
        config.paths.documents = resolve(&config.paths.documents);
        config.paths.outlets = resolve(&config.paths.outlets);
        config.paths.sentiment_lexicon = resolve(&config.paths.sentiment_lexicon);
        config.paths.offensive_lexicon = resolve(&config.paths.offensive_lexicon);
        config.paths.external_scores = config.paths.external_scores.as_ref().map(resolve);
        config.paths.output_dir = resolve(&config.paths.output_dir);
        Ok(LoadedConfig {
            config,
            config_hash: super::manifest::hex_digest(raw.as_bytes()),
        })
    }

    /// Check everything that can be checked without running a stage:
    /// input files exist, hyperparameters are sane, names parse.
    pub fn validate(&self) -> Result<()> {
        for (role, p) in [
            ("documents", &self.paths.documents),
            ("outlets", &self.paths.outlets),
            ("sentiment_lexicon", &self.paths.sentiment_lexicon),
            ("offensive_lexicon", &self.paths.offensive_lexicon),
        ] {
            if !p.is_file() {
                return Err(Error::config(format!(
                    "{role} path {} does not exist",
                    p.display()
                )));
            }
        }
        if let Some(p) = &self.paths.external_scores {
            if !p.is_file() {
                return Err(Error::config(format!(
                    "external_scores path {} does not exist",
                    p.display()
                )));
            }
        }
        if self.workers == 0 {
            return Err(Error::config("workers must be at least 1"));
        }
        self.embedding.train_config().validate()?;
        if self.embedding.min_count == 0 {
            return Err(Error::config("embedding min_count must be at least 1"));
        }
        self.alignment.buckets()?;
        self.alignment.translation_method()?;
        if self.alignment.top_k == 0 {
            return Err(Error::config("alignment top_k must be positive"));
        }
        if self.alignment.top_n_seeds == 0 {
            return Err(Error::config("alignment top_n_seeds must be positive"));
        }
        if self.analytics.window % 2 == 0 || self.analytics.window == 0 {
            return Err(Error::config("analytics window must be odd and positive"));
        }
        self.analytics.parsed_metrics()?;
        if self.query.group_a.is_empty() || self.query.group_b.is_empty() {
            return Err(Error::config("both query term groups must be non-empty"));
        }
        Ok(())
    }
}
