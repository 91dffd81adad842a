//! One function per subcommand stage. Every stage reads the config and
//! the artifacts of earlier stages, writes its own artifacts under the
//! output directory, and records a manifest.

use std::collections::BTreeMap;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::manifest::{derive_seed, file_sha256, RunManifest};
use crate::alignment::{
    build_seed_lexicon, find_illustrative_contexts, fit_procrustes, mine_misaligned,
    AlignmentTransform, ContextPair, MisalignmentReport, SeedLexicon, TranslationPair,
};
use crate::analytics::{
    akima_interpolate, ingest_scores, moving_average, monthly_aggregate, offensive_baseline,
    period_summary, write_series_csv, Metric, MonthlySeries, OffensiveLexicon, PeriodSummary,
};
use crate::corpus::{CorpusStore, OutletRegistry, PartisanBucket};
use crate::embeddings::{read_binary, train, write_binary, write_text, EmbeddingModel, Vocabulary};
use crate::sentiment::{score_document, SentimentClass, SentimentLexicon};
use crate::{Error, Result};

/// Config with flag overrides already applied, plus run-wide context.
pub struct StageContext {
    pub config: RunConfig,
    pub config_hash: String,
    pub quiet: bool,
}

impl StageContext {
    fn note(&self, msg: impl std::fmt::Display) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }

    fn out(&self) -> &Path {
        &self.config.paths.output_dir
    }

    fn store_dir(&self) -> PathBuf {
        self.out().join("store")
    }

    fn sentiment_csv(&self) -> PathBuf {
        self.out().join("sentiment.csv")
    }

    fn embedding_bin(&self, bucket: PartisanBucket) -> PathBuf {
        self.out().join("embeddings").join(format!("{bucket}.bin"))
    }

    fn embedding_txt(&self, bucket: PartisanBucket) -> PathBuf {
        self.out().join("embeddings").join(format!("{bucket}.txt"))
    }

    fn seeds_tsv(&self) -> PathBuf {
        self.out().join("alignment").join("seed_lexicon.tsv")
    }

    fn transform_json(&self) -> PathBuf {
        self.out().join("alignment").join("transform.json")
    }

    fn misaligned_csv(&self) -> PathBuf {
        self.out().join("alignment").join("misaligned.csv")
    }

    fn misaligned_json(&self) -> PathBuf {
        self.out().join("alignment").join("misaligned.json")
    }

    fn series_csv(&self, metric: Metric) -> PathBuf {
        self.out().join("series").join(format!("{metric}.csv"))
    }

    fn report_json(&self) -> PathBuf {
        self.out().join("report.json")
    }

    fn open_store(&self) -> Result<CorpusStore> {
        CorpusStore::open(&self.store_dir())
    }

    /// Run `body` inside a rayon pool of the configured width.
    fn in_pool<T: Send>(&self, body: impl FnOnce() -> T + Send) -> Result<T> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.workers)
            .build()
            .map_err(|e| Error::config(format!("cannot build worker pool: {e}")))?;
        Ok(pool.install(body))
    }

    fn manifest(
        &self,
        stage: &str,
        started: Instant,
        inputs: BTreeMap<String, String>,
        output_files: &[PathBuf],
    ) -> Result<()> {
        let mut outputs = BTreeMap::new();
        for path in output_files {
            let rel = path
                .strip_prefix(self.out())
                .unwrap_or(path)
                .to_string_lossy()
                .replace('\\', "/");
            outputs.insert(rel, file_sha256(path)?);
        }
        RunManifest {
            stage: stage.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: self.config_hash.clone(),
            seed: self.config.seed,
            workers: self.config.workers,
            timing_ms: if self.config.normalized {
                None
            } else {
                Some(started.elapsed().as_millis() as u64)
            },
            inputs,
            outputs,
        }
        .write(self.out())
    }
}

fn input_hashes(pairs: &[(&str, &Path)]) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (role, path) in pairs {
        map.insert(role.to_string(), file_sha256(path)?);
    }
    Ok(map)
}

pub fn run_ingest(ctx: &StageContext) -> Result<()> {
    let started = Instant::now();
    let paths = &ctx.config.paths;
    let inputs = input_hashes(&[
        ("documents", &paths.documents),
        ("outlets", &paths.outlets),
    ])?;

    let outlets = OutletRegistry::from_csv_path(&paths.outlets)?;
    let file = std::fs::File::open(&paths.documents).map_err(|e| Error::io(&paths.documents, e))?;
    let store = CorpusStore::ingest(
        BufReader::new(file),
        outlets,
        &ctx.config.query,
        &ctx.store_dir(),
    )?;
    let r = store.report();
    ctx.note(format!(
        "ingest: read {} stored {} (rejected: parse {}, query {}, outlet {})",
        r.read, r.stored, r.rejected_parse, r.rejected_query, r.rejected_outlet
    ));

    let outs: Vec<PathBuf> = ["records.jsonl", "outlets.csv", "manifest.json"]
        .iter()
        .map(|f| ctx.store_dir().join(f))
        .collect();
    ctx.manifest("ingest", started, inputs, &outs)
}

pub fn run_sentiment(ctx: &StageContext) -> Result<()> {
    let started = Instant::now();
    let paths = &ctx.config.paths;
    let inputs = input_hashes(&[
        ("sentiment_lexicon", &paths.sentiment_lexicon),
        ("store_records", &ctx.store_dir().join("records.jsonl")),
    ])?;

    let (lexicon, lex_report) = SentimentLexicon::load(&paths.sentiment_lexicon)?;
    for w in &lex_report.warnings {
        ctx.note(format!("sentiment: {w}"));
    }
    if lex_report.skipped > 0 {
        ctx.note(format!(
            "sentiment: skipped {} malformed lexicon lines",
            lex_report.skipped
        ));
    }
    let store = ctx.open_store()?;
    let docs: Vec<_> = store.documents().collect();
    let scored: Vec<(String, crate::sentiment::SentimentScore)> = ctx.in_pool(|| {
        docs.par_iter()
            .map(|d| (d.id.clone(), score_document(d, &lexicon)))
            .collect()
    })?;

    let path = ctx.sentiment_csv();
    let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["doc_id", "pos", "neu", "neg", "compound", "class"])
        .map_err(|e| Error::domain(format!("write sentiment csv: {e}")))?;
    for (id, s) in &scored {
        w.write_record([
            id.as_str(),
            &s.positive.to_string(),
            &s.neutral.to_string(),
            &s.negative.to_string(),
            &s.compound.to_string(),
            s.class().as_str(),
        ])
        .map_err(|e| Error::domain(format!("write sentiment csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    ctx.note(format!("sentiment: scored {} documents", scored.len()));
    ctx.manifest("sentiment", started, inputs, &[path])
}

/// Per-document compound scores written by the sentiment stage.
fn load_compounds(ctx: &StageContext) -> Result<BTreeMap<String, f64>> {
    let path = ctx.sentiment_csv();
    let file = std::fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let mut out = BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::domain(format!("bad sentiment csv: {e}")))?;
        let id = row.get(0).unwrap_or_default().to_string();
        let compound: f64 = row
            .get(4)
            .unwrap_or_default()
            .parse()
            .map_err(|_| Error::domain("bad compound in sentiment csv"))?;
        out.insert(id, compound);
    }
    Ok(out)
}

pub fn run_embed(ctx: &StageContext) -> Result<()> {
    let started = Instant::now();
    let inputs = input_hashes(&[("store_records", &ctx.store_dir().join("records.jsonl"))])?;
    let store = ctx.open_store()?;
    let (source, target) = ctx.config.alignment.buckets()?;
    let train_config = ctx.config.embedding.train_config();

    let dir = ctx.out().join("embeddings");
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut outs = Vec::new();
    for bucket in [source, target] {
        let docs = store.bucket_documents(bucket);
        if docs.is_empty() {
            return Err(Error::domain(format!(
                "bucket {bucket} has no documents; cannot train embeddings"
            )));
        }
        let vocab = Vocabulary::from_store(&store, bucket, ctx.config.embedding.min_count)?;
        let seed = derive_seed(ctx.config.seed, &format!("embed:{bucket}"));
        let (model, stats) = train(
            docs.iter().map(|d| d.tokens()),
            &vocab,
            &train_config,
            seed,
            ctx.config.workers,
        )?;
        ctx.note(format!(
            "embed: {bucket} vocab {} tokens {} final-loss {:.4}",
            vocab.len(),
            vocab.retained_tokens(),
            stats.epoch_losses.last().copied().unwrap_or(f64::NAN)
        ));
        let bin = ctx.embedding_bin(bucket);
        write_binary(&model, &bin)?;
        let txt = ctx.embedding_txt(bucket);
        write_text(&model, &txt)?;
        outs.push(bin);
        outs.push(txt);
    }
    ctx.manifest("embed", started, inputs, &outs)
}

fn load_models(ctx: &StageContext) -> Result<(EmbeddingModel, EmbeddingModel)> {
    let (source, target) = ctx.config.alignment.buckets()?;
    Ok((
        read_binary(&ctx.embedding_bin(source))?,
        read_binary(&ctx.embedding_bin(target))?,
    ))
}

/// Unit rows of the seed pairs in both spaces.
fn seed_matrices(
    seeds: &SeedLexicon,
    model_source: &EmbeddingModel,
    model_target: &EmbeddingModel,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let mut x = Vec::with_capacity(seeds.pairs.len());
    let mut y = Vec::with_capacity(seeds.pairs.len());
    for (s, t) in &seeds.pairs {
        let mut sv = model_source.vector(s)?;
        let mut tv = model_target.vector(t)?;
        crate::embeddings::normalize(&mut sv);
        crate::embeddings::normalize(&mut tv);
        x.push(sv);
        y.push(tv);
    }
    Ok((x, y))
}

pub fn run_align(ctx: &StageContext) -> Result<()> {
    let started = Instant::now();
    let (source, target) = ctx.config.alignment.buckets()?;
    let inputs = input_hashes(&[
        ("source_model", &ctx.embedding_bin(source)),
        ("target_model", &ctx.embedding_bin(target)),
    ])?;
    let (model_source, model_target) = load_models(ctx)?;
    let seeds = build_seed_lexicon(
        model_source.vocab(),
        model_target.vocab(),
        ctx.config.alignment.top_n_seeds,
    )?;
    let dir = ctx.out().join("alignment");
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    seeds.write_tsv(&ctx.seeds_tsv())?;

    let (x, y) = seed_matrices(&seeds, &model_source, &model_target)?;
    let (transform, warnings) = fit_procrustes(&x, &y)?;
    for w in warnings {
        ctx.note(format!("align: {w}"));
    }
    ctx.note(format!(
        "align: {} seed pairs, mean aligned cosine {:.4}",
        transform.seed_pairs, transform.mean_seed_cosine
    ));
    transform.write_json(&ctx.transform_json())?;
    ctx.manifest(
        "align",
        started,
        inputs,
        &[ctx.seeds_tsv(), ctx.transform_json()],
    )
}

/// Mined pairs plus their illustrative contexts, the JSON artifact.
#[derive(Debug, Serialize, Deserialize)]
pub struct MinedArtifact {
    pub direction: String,
    pub method: String,
    pub ranking_key: String,
    pub top_k: usize,
    pub examined_words: usize,
    pub pairs: Vec<TranslationPair>,
    pub contexts: Vec<PairContexts>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PairContexts {
    pub source: String,
    pub target: String,
    pub contexts: Vec<ContextPair>,
}

pub fn run_mine(ctx: &StageContext) -> Result<()> {
    let started = Instant::now();
    let (source, target) = ctx.config.alignment.buckets()?;
    let inputs = input_hashes(&[
        ("source_model", &ctx.embedding_bin(source)),
        ("target_model", &ctx.embedding_bin(target)),
        ("transform", &ctx.transform_json()),
    ])?;
    let (model_source, model_target) = load_models(ctx)?;
    let transform = AlignmentTransform::read_json(&ctx.transform_json())?;
    let method = ctx.config.alignment.translation_method()?;

    let report: MisalignmentReport = ctx.in_pool(|| {
        mine_misaligned(
            &model_source,
            &model_target,
            &transform,
            method,
            ctx.config.alignment.top_k,
        )
    })??;
    ctx.note(format!(
        "mine: {} misaligned of {} examined words",
        report.pairs.len(),
        report.examined_words
    ));

    let csv_path = ctx.misaligned_csv();
    let file = std::fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    let mut w = std::io::BufWriter::new(file);
    report
        .write_csv(&mut w)
        .map_err(|e| Error::io(&csv_path, e))?;
    drop(w);

    // Illustrative contexts for the leading pairs.
    let store = ctx.open_store()?;
    let source_docs = store.bucket_documents(source);
    let target_docs = store.bucket_documents(target);
    let mut contexts = Vec::new();
    for pair in report.pairs.iter().take(ctx.config.alignment.context_pairs) {
        let (found, warnings) = find_illustrative_contexts(
            pair,
            &source_docs,
            &target_docs,
            &model_source,
            &model_target,
            &transform,
            ctx.config.alignment.contexts_per_pair,
        );
        for w in warnings {
            ctx.note(format!("mine: {w}"));
        }
        contexts.push(PairContexts {
            source: pair.source.clone(),
            target: pair.target.clone(),
            contexts: found,
        });
    }

    let artifact = MinedArtifact {
        direction: ctx.config.alignment.direction.clone(),
        method: ctx.config.alignment.method.clone(),
        ranking_key: report.ranking_key.clone(),
        top_k: report.top_k,
        examined_words: report.examined_words,
        pairs: report.pairs,
        contexts,
    };
    let json_path = ctx.misaligned_json();
    let json = serde_json::to_string_pretty(&artifact)
        .map_err(|e| Error::domain(format!("serialize mined pairs: {e}")))?;
    std::fs::write(&json_path, json + "\n").map_err(|e| Error::io(&json_path, e))?;

    ctx.manifest("mine", started, inputs, &[csv_path, json_path])
}

/// Offensive-speech scores per document: the external classifier file
/// when configured, the lexicon baseline otherwise.
fn offensive_scores(ctx: &StageContext, store: &CorpusStore) -> Result<(BTreeMap<String, f64>, &'static str)> {
    match &ctx.config.paths.external_scores {
        Some(path) => {
            let ingest = ingest_scores(path, store)?;
            if ingest.malformed > 0 || ingest.unmatched > 0 {
                ctx.note(format!(
                    "scores: {} malformed, {} unmatched records",
                    ingest.malformed, ingest.unmatched
                ));
            }
            Ok((ingest.offensive_scores(), "external"))
        }
        None => {
            let lexicon = OffensiveLexicon::load(&ctx.config.paths.offensive_lexicon)?;
            Ok((
                store
                    .documents()
                    .map(|d| (d.id.clone(), offensive_baseline(d, &lexicon)))
                    .collect(),
                "lexicon_baseline",
            ))
        }
    }
}

fn build_metric_series(
    ctx: &StageContext,
    store: &CorpusStore,
    metric: Metric,
    compounds: &BTreeMap<String, f64>,
    offensive: &BTreeMap<String, f64>,
) -> Result<(Vec<MonthlySeries>, Vec<MonthlySeries>)> {
    let values = match metric {
        Metric::Count => None,
        Metric::SentimentCompound => Some(compounds),
        Metric::Offensive => Some(offensive),
    };
    let raw = monthly_aggregate(store, metric, values)?;
    let mut interpolated = Vec::new();
    let mut smoothed = Vec::new();
    for series in &raw {
        if series.values.iter().all(|v| v.is_none()) {
            // A bucket with no documents stays a flat run of gaps.
            interpolated.push(series.clone());
            smoothed.push(series.clone());
            continue;
        }
        let (filled, warnings) = akima_interpolate(series)?;
        for w in warnings {
            ctx.note(format!("series: {} {}: {w}", series.metric, series.bucket));
        }
        smoothed.push(moving_average(&filled, ctx.config.analytics.window)?);
        interpolated.push(filled);
    }
    Ok((interpolated, smoothed))
}

pub fn run_series(ctx: &StageContext) -> Result<()> {
    let started = Instant::now();
    let mut input_list: Vec<(&str, PathBuf)> = vec![
        ("store_records", ctx.store_dir().join("records.jsonl")),
        ("sentiment_scores", ctx.sentiment_csv()),
    ];
    if let Some(p) = &ctx.config.paths.external_scores {
        input_list.push(("external_scores", p.clone()));
    } else {
        input_list.push(("offensive_lexicon", ctx.config.paths.offensive_lexicon.clone()));
    }
    let refs: Vec<(&str, &Path)> = input_list.iter().map(|(r, p)| (*r, p.as_path())).collect();
    let inputs = input_hashes(&refs)?;

    let store = ctx.open_store()?;
    let compounds = load_compounds(ctx)?;
    let (offensive, source_kind) = offensive_scores(ctx, &store)?;
    ctx.note(format!("series: offensive source = {source_kind}"));

    let dir = ctx.out().join("series");
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut outs = Vec::new();
    for metric in ctx.config.analytics.parsed_metrics()? {
        let (interpolated, smoothed) =
            build_metric_series(ctx, &store, metric, &compounds, &offensive)?;
        let path = ctx.series_csv(metric);
        let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = std::io::BufWriter::new(file);
        write_series_csv(&mut w, &interpolated, &smoothed).map_err(|e| Error::io(&path, e))?;
        outs.push(path);
    }
    ctx.manifest("series", started, inputs, &outs)
}

/// The assembled run summary.
#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub meta: ReportMeta,
    pub ingest: crate::corpus::IngestReport,
    pub bucket_counts: BTreeMap<String, usize>,
    pub bucket_proportions: BTreeMap<String, f64>,
    pub period_summaries: Vec<PeriodSummary>,
    pub misaligned: ReportMisaligned,
    pub series_files: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub workers: usize,
    pub offensive_source: String,
    pub direction: String,
    pub method: String,
    /// Training hyperparameters are run configuration, not values taken
    /// from any published setup; recorded so consumers can't mistake
    /// them for such.
    pub embedding: super::config::EmbeddingConfig,
    pub smoothing_window: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportMisaligned {
    pub examined_words: usize,
    pub top_k: usize,
    pub ranking_key: String,
    pub pairs: Vec<TranslationPair>,
    pub contexts: Vec<PairContexts>,
}

/// Pairs embedded in the report are capped; the full list stays in the
/// mined artifacts.
const REPORT_PAIR_CAP: usize = 50;

pub fn run_report(ctx: &StageContext) -> Result<()> {
    let started = Instant::now();
    let inputs = input_hashes(&[
        ("store_records", &ctx.store_dir().join("records.jsonl")),
        ("sentiment_scores", &ctx.sentiment_csv()),
        ("misaligned", &ctx.misaligned_json()),
    ])?;

    let store = ctx.open_store()?;
    let compounds = load_compounds(ctx)?;
    let (offensive, source_kind) = offensive_scores(ctx, &store)?;

    let partition = store.partition();
    let bucket_counts: BTreeMap<String, usize> = PartisanBucket::ALL
        .iter()
        .map(|b| (b.to_string(), partition.ids(*b).len()))
        .collect();
    let bucket_proportions: BTreeMap<String, f64> = partition
        .proportions()
        .into_iter()
        .map(|(b, p)| (b.to_string(), p))
        .collect();

    let mut period_summaries = period_summary(&store, "sentiment_compound", &compounds);
    period_summaries.extend(period_summary(&store, "offensive", &offensive));

    let mined_text = std::fs::read_to_string(ctx.misaligned_json())
        .map_err(|e| Error::io(&ctx.misaligned_json(), e))?;
    let mined: MinedArtifact = serde_json::from_str(&mined_text)
        .map_err(|e| Error::domain(format!("bad mined artifact: {e}")))?;

    let series_files: Vec<String> = ctx
        .config
        .analytics
        .parsed_metrics()?
        .iter()
        .map(|m| format!("series/{m}.csv"))
        .collect();

    let report = Report {
        meta: ReportMeta {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: ctx.config_hash.clone(),
            seed: ctx.config.seed,
            workers: ctx.config.workers,
            offensive_source: source_kind.to_string(),
            direction: mined.direction.clone(),
            method: mined.method.clone(),
            embedding: ctx.config.embedding.clone(),
            smoothing_window: ctx.config.analytics.window,
            generated_at: if ctx.config.normalized {
                None
            } else {
                Some(chrono::Utc::now().to_rfc3339())
            },
        },
        ingest: store.report().clone(),
        bucket_counts,
        bucket_proportions,
        period_summaries,
        misaligned: ReportMisaligned {
            examined_words: mined.examined_words,
            top_k: mined.top_k,
            ranking_key: mined.ranking_key.clone(),
            pairs: mined.pairs.into_iter().take(REPORT_PAIR_CAP).collect(),
            contexts: mined.contexts,
        },
        series_files,
    };
    let path = ctx.report_json();
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::domain(format!("serialize report: {e}")))?;
    std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    ctx.note(format!("report: {}", path.display()));
    ctx.manifest("report", started, inputs, &[path])
}

pub fn run_pipeline(ctx: &StageContext) -> Result<()> {
    run_ingest(ctx)?;
    run_sentiment(ctx)?;
    run_embed(ctx)?;
    run_align(ctx)?;
    run_mine(ctx)?;
    run_series(ctx)?;
    run_report(ctx)
}

/// Sanity type left public for integration tests that need to reparse
/// sentiment rows.
#[derive(Debug, Deserialize)]
pub struct SentimentRow {
    pub doc_id: String,
    pub pos: f64,
    pub neu: f64,
    pub neg: f64,
    pub compound: f64,
    pub class: String,
}

impl SentimentRow {
    pub fn class_parsed(&self) -> Result<SentimentClass> {
        match self.class.as_str() {
            "positive" => Ok(SentimentClass::Positive),
            "neutral" => Ok(SentimentClass::Neutral),
            "negative" => Ok(SentimentClass::Negative),
            other => Err(Error::domain(format!("unknown class {other:?}"))),
        }
    }
}
