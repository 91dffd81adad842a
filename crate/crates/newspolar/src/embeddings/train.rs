//! Skip-gram negative-sampling trainer.
//!
//! The input representation of a center word is its word vector plus its
//! subword bucket vectors; each (center, context) pair is trained against
//! the context's output vector with `negatives` sampled counter-examples
//! from the unigram distribution raised to 3/4. Plain SGD, linear
//! learning-rate decay over all epochs.
//!
//! One worker processes documents in order with a seeded generator, so
//! training is bit-reproducible. More workers update the shared matrices
//! without synchronization (racy but convergent); determinism is only
//! promised for a single worker.

use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::Float;
use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::{ngram_buckets, EmbeddingModel, TrainConfig, Vocabulary};
use crate::{Error, Result};

const MIN_LR_FRACTION: f64 = 1e-4;
const PROB_FLOOR: f64 = 1e-12;

#[inline]
fn sigmoid<F: Float>(x: F) -> F {
    F::one() / (F::one() + (-x).exp())
}

/// Compose the input representation: word row plus subword rows.
#[inline]
fn compose_input<F: Float + std::ops::AddAssign>(
    words: &[F],
    word: usize,
    subwords: &[F],
    subword_ids: &[u32],
    dim: usize,
    h: &mut [F],
) {
    h.copy_from_slice(&words[word * dim..(word + 1) * dim]);
    for id in subword_ids {
        let row = &subwords[*id as usize * dim..(*id as usize + 1) * dim];
        for (o, v) in h.iter_mut().zip(row) {
            *o += *v;
        }
    }
}

/// Logistic coefficients of one example: for each (target, label) pushes
/// g_t = sigmoid(u_t . h) - label, so dL/du_t = g_t h and
/// dL/dh = sum_t g_t u_t. Returns the example's log loss.
#[inline]
fn logistic_coefficients<F: Float + std::ops::AddAssign>(
    h: &[F],
    outputs: &[F],
    targets: &[(usize, bool)],
    dim: usize,
    coeffs: &mut Vec<F>,
) -> F {
    coeffs.clear();
    let floor = F::from(PROB_FLOOR).unwrap();
    let mut loss = F::zero();
    for (target, label) in targets {
        let row = &outputs[target * dim..(target + 1) * dim];
        let mut dot = F::zero();
        for (a, b) in h.iter().zip(row) {
            dot += *a * *b;
        }
        let p = sigmoid(dot);
        if *label {
            coeffs.push(p - F::one());
            loss += -(p.max(floor)).ln();
        } else {
            coeffs.push(p);
            loss += -((F::one() - p).max(floor)).ln();
        }
    }
    loss
}

/// One training example for the gradient check: a center word with its
/// subword buckets and the (target, label) list of one window pair.
#[derive(Debug, Clone)]
pub struct CheckExample {
    pub word: usize,
    pub subwords: Vec<u32>,
    pub targets: Vec<(usize, bool)>,
}

/// Loss of a frozen mini-batch at the given parameters.
pub fn batch_loss(
    words: &[f64],
    subwords: &[f64],
    outputs: &[f64],
    dim: usize,
    examples: &[CheckExample],
) -> f64 {
    let mut h = vec![0.0f64; dim];
    let mut coeffs = Vec::new();
    let mut loss = 0.0;
    for ex in examples {
        compose_input(words, ex.word, subwords, &ex.subwords, dim, &mut h);
        loss += logistic_coefficients(&h, outputs, &ex.targets, dim, &mut coeffs);
    }
    loss
}

/// Loss and analytic gradients of a frozen mini-batch, assembled exactly
/// the way the SGD step distributes them: the input gradient goes to the
/// word row and once more to every subword occurrence.
pub fn batch_gradients(
    words: &[f64],
    subwords: &[f64],
    outputs: &[f64],
    dim: usize,
    examples: &[CheckExample],
) -> (f64, Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut grad_words = vec![0.0; words.len()];
    let mut grad_subwords = vec![0.0; subwords.len()];
    let mut grad_outputs = vec![0.0; outputs.len()];
    let mut h = vec![0.0f64; dim];
    let mut grad_h = vec![0.0f64; dim];
    let mut coeffs = Vec::new();
    let mut loss = 0.0;
    for ex in examples {
        compose_input(words, ex.word, subwords, &ex.subwords, dim, &mut h);
        loss += logistic_coefficients(&h, outputs, &ex.targets, dim, &mut coeffs);
        grad_h.iter_mut().for_each(|g| *g = 0.0);
        for ((target, _), g) in ex.targets.iter().zip(&coeffs) {
            let row = &outputs[target * dim..(target + 1) * dim];
            for d in 0..dim {
                grad_h[d] += g * row[d];
                grad_outputs[target * dim + d] += g * h[d];
            }
        }
        for d in 0..dim {
            grad_words[ex.word * dim + d] += grad_h[d];
        }
        for id in &ex.subwords {
            for d in 0..dim {
                grad_subwords[*id as usize * dim + d] += grad_h[d];
            }
        }
    }
    (loss, grad_words, grad_subwords, grad_outputs)
}

/// Per-epoch mean log loss, for convergence monitoring.
#[derive(Debug, Clone, Default)]
pub struct TrainStats {
    pub epoch_losses: Vec<f64>,
    pub pairs_trained: u64,
}

/// Cumulative table over counts^(3/4) for negative sampling.
struct NegativeTable {
    cumulative: Vec<f64>,
    total: f64,
}

impl NegativeTable {
    fn new(vocab: &Vocabulary) -> Self {
        let mut cumulative = Vec::with_capacity(vocab.len());
        let mut total = 0.0;
        for w in vocab.words() {
            total += (w.count as f64).powf(0.75);
            cumulative.push(total);
        }
        NegativeTable { cumulative, total }
    }

    #[inline]
    fn sample(&self, rng: &mut ChaCha20Rng) -> usize {
        let r = rng.gen::<f64>() * self.total;
        self.cumulative.partition_point(|&c| c <= r).min(self.cumulative.len() - 1)
    }
}

/// Raw views of the three parameter matrices, shared across workers
/// without locks. Rows are bounds-checked at construction; concurrent
/// updates may race by contract.
#[derive(Clone, Copy)]
struct SharedParams {
    words: *mut f32,
    subwords: *mut f32,
    outputs: *mut f32,
}

unsafe impl Send for SharedParams {}
unsafe impl Sync for SharedParams {}

impl SharedParams {
    #[inline]
    unsafe fn read_row(ptr: *mut f32, row: usize, dim: usize, out: &mut [f32]) {
        std::ptr::copy_nonoverlapping(ptr.add(row * dim), out.as_mut_ptr(), dim);
    }

    #[inline]
    unsafe fn add_row_into(ptr: *mut f32, row: usize, dim: usize, out: &mut [f32]) {
        let base = ptr.add(row * dim);
        for d in 0..dim {
            out[d] += *base.add(d);
        }
    }

    #[inline]
    unsafe fn axpy(ptr: *mut f32, row: usize, dim: usize, a: f32, x: &[f32]) {
        let base = ptr.add(row * dim);
        for d in 0..dim {
            *base.add(d) += a * x[d];
        }
    }
}

struct WorkerScratch {
    h: Vec<f32>,
    grad_h: Vec<f32>,
    target_rows: Vec<f32>,
    targets: Vec<(usize, bool)>,
    local_targets: Vec<(usize, bool)>,
    coeffs: Vec<f32>,
}

impl WorkerScratch {
    fn new(dim: usize) -> Self {
        WorkerScratch {
            h: vec![0.0; dim],
            grad_h: vec![0.0; dim],
            target_rows: Vec::new(),
            targets: Vec::new(),
            local_targets: Vec::new(),
            coeffs: Vec::new(),
        }
    }
}

/// Train on one worker's share of the documents for one epoch.
/// Returns (loss sum, pair count).
#[allow(clippy::too_many_arguments)]
fn run_worker_epoch(
    params: SharedParams,
    docs: &[Vec<u32>],
    subword_ids: &[Vec<u32>],
    table: &NegativeTable,
    config: &TrainConfig,
    rng: &mut ChaCha20Rng,
    progress: &AtomicU64,
    total_tokens: u64,
    scratch: &mut WorkerScratch,
) -> (f64, u64) {
    let dim = config.dim;
    let lr0 = config.learning_rate;
    let mut loss_sum = 0.0f64;
    let mut pairs = 0u64;

    for doc in docs {
        for i in 0..doc.len() {
            let done = progress.fetch_add(1, Ordering::Relaxed);
            let remaining = 1.0 - done as f64 / total_tokens.max(1) as f64;
            let lr = (lr0 * remaining.max(MIN_LR_FRACTION)) as f32;

            let center = doc[i] as usize;
            let reach = rng.gen_range(1..=config.window);
            let lo = i.saturating_sub(reach);
            let hi = (i + reach).min(doc.len() - 1);
            for j in lo..=hi {
                if j == i {
                    continue;
                }
                let context = doc[j] as usize;

                scratch.targets.clear();
                scratch.targets.push((context, true));
                for _ in 0..config.negatives {
                    let neg = table.sample(rng);
                    if neg == context {
                        continue;
                    }
                    scratch.targets.push((neg, false));
                }

                // Snapshot the rows this example touches, then compute
                // against the snapshot (hogwild workers may race).
                unsafe {
                    SharedParams::read_row(params.words, center, dim, &mut scratch.h);
                    for id in &subword_ids[center] {
                        SharedParams::add_row_into(params.subwords, *id as usize, dim, &mut scratch.h);
                    }
                    scratch.target_rows.resize(scratch.targets.len() * dim, 0.0);
                    for (t, (row, _)) in scratch.targets.iter().enumerate() {
                        SharedParams::read_row(
                            params.outputs,
                            *row,
                            dim,
                            &mut scratch.target_rows[t * dim..(t + 1) * dim],
                        );
                    }
                }

                scratch.local_targets.clear();
                scratch
                    .local_targets
                    .extend(scratch.targets.iter().enumerate().map(|(t, (_, l))| (t, *l)));
                loss_sum += logistic_coefficients(
                    &scratch.h,
                    &scratch.target_rows,
                    &scratch.local_targets,
                    dim,
                    &mut scratch.coeffs,
                ) as f64;
                pairs += 1;

                scratch.grad_h.iter_mut().for_each(|g| *g = 0.0);
                unsafe {
                    for (t, ((row, _), g)) in scratch
                        .targets
                        .iter()
                        .zip(&scratch.coeffs)
                        .enumerate()
                    {
                        let glr = *g * lr;
                        let old = &scratch.target_rows[t * dim..(t + 1) * dim];
                        for d in 0..dim {
                            scratch.grad_h[d] += glr * old[d];
                        }
                        SharedParams::axpy(params.outputs, *row, dim, -glr, &scratch.h);
                    }
                    for d in 0..dim {
                        scratch.grad_h[d] = -scratch.grad_h[d];
                    }
                    SharedParams::axpy(params.words, center, dim, 1.0, &scratch.grad_h);
                    for id in &subword_ids[center] {
                        SharedParams::axpy(params.subwords, *id as usize, dim, 1.0, &scratch.grad_h);
                    }
                }
            }
        }
    }
    (loss_sum, pairs)
}

/// Train a model over the documents of one partition. `workers = 1` is
/// the deterministic mode.
pub fn train<'a, I, T>(
    docs: I,
    vocab: &Vocabulary,
    config: &TrainConfig,
    seed: u64,
    workers: usize,
) -> Result<(EmbeddingModel, TrainStats)>
where
    I: IntoIterator<Item = T>,
    T: IntoIterator<Item = &'a String>,
{
    config.validate()?;
    if vocab.is_empty() {
        return Err(Error::domain("cannot train on an empty vocabulary"));
    }
    let workers = workers.max(1);
    let dim = config.dim;

    // Index the corpus once; out-of-vocabulary tokens drop out and
    // windows never cross document boundaries.
    let indexed: Vec<Vec<u32>> = docs
        .into_iter()
        .map(|doc| {
            doc.into_iter()
                .filter_map(|t| vocab.idx(t))
                .collect::<Vec<u32>>()
        })
        .filter(|d| !d.is_empty())
        .collect();
    if indexed.is_empty() {
        return Err(Error::domain("no in-vocabulary tokens to train on"));
    }
    let kept_tokens: u64 = indexed.iter().map(|d| d.len() as u64).sum();

    let subword_ids: Vec<Vec<u32>> = vocab
        .words()
        .iter()
        .map(|w| ngram_buckets(&w.token, config.n_min, config.n_max, config.buckets))
        .collect();

    // Seeded initialization: small uniform input vectors, zero outputs.
    let mut init_rng = ChaCha20Rng::seed_from_u64(seed);
    let bound = 0.5 / dim as f32;
    let uniform = Uniform::new_inclusive(-bound, bound);
    let mut word_vecs: Vec<f32> = Vec::with_capacity(vocab.len() * dim);
    for _ in 0..vocab.len() * dim {
        word_vecs.push(uniform.sample(&mut init_rng));
    }
    let mut subword_vecs: Vec<f32> = Vec::with_capacity(config.buckets * dim);
    for _ in 0..config.buckets * dim {
        subword_vecs.push(uniform.sample(&mut init_rng));
    }
    let mut outputs = vec![0.0f32; vocab.len() * dim];

    let table = NegativeTable::new(vocab);
    let progress = AtomicU64::new(0);
    let total_schedule = kept_tokens * config.epochs as u64;
    let params = SharedParams {
        words: word_vecs.as_mut_ptr(),
        subwords: subword_vecs.as_mut_ptr(),
        outputs: outputs.as_mut_ptr(),
    };

    let mut stats = TrainStats::default();
    let mut worker_rngs: Vec<ChaCha20Rng> = (0..workers)
        .map(|w| ChaCha20Rng::seed_from_u64(seed ^ (w as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
        .collect();

    for _epoch in 0..config.epochs {
        if workers == 1 {
            let mut scratch = WorkerScratch::new(dim);
            let (loss, pairs) = run_worker_epoch(
                params,
                &indexed,
                &subword_ids,
                &table,
                config,
                &mut worker_rngs[0],
                &progress,
                total_schedule,
                &mut scratch,
            );
            stats.epoch_losses.push(loss / pairs.max(1) as f64);
            stats.pairs_trained += pairs;
        } else {
            // Round-robin split; racy parameter updates by contract.
            let shares: Vec<Vec<Vec<u32>>> = (0..workers)
                .map(|w| {
                    indexed
                        .iter()
                        .skip(w)
                        .step_by(workers)
                        .cloned()
                        .collect()
                })
                .collect();
            let results: Vec<(f64, u64)> = std::thread::scope(|scope| {
                let mut handles = Vec::new();
                for (share, rng) in shares.iter().zip(worker_rngs.iter_mut()) {
                    let subword_ids = &subword_ids;
                    let table = &table;
                    let progress = &progress;
                    handles.push(scope.spawn(move || {
                        let mut scratch = WorkerScratch::new(dim);
                        run_worker_epoch(
                            params,
                            share,
                            subword_ids,
                            table,
                            config,
                            rng,
                            progress,
                            total_schedule,
                            &mut scratch,
                        )
                    }));
                }
                handles.into_iter().map(|h| h.join().unwrap()).collect()
            });
            let loss: f64 = results.iter().map(|(l, _)| l).sum();
            let pairs: u64 = results.iter().map(|(_, p)| p).sum();
            stats.epoch_losses.push(loss / pairs.max(1) as f64);
            stats.pairs_trained += pairs;
        }
    }

    let model = EmbeddingModel::new(*config, seed, vocab.clone(), word_vecs, subword_vecs);
    Ok((model, stats))
}
