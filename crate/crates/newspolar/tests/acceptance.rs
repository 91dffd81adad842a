//! Acceptance suite: one test per release criterion, every tolerance
//! pinned in code. Each test prints a `PASS criterion-N` line with the
//! measured values (visible with `cargo test --test acceptance --
//! --nocapture`).

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;

use newspolar::alignment::{
    build_seed_lexicon, fit_procrustes, mine_misaligned, random_orthogonal, random_unit_rows,
    translate, AlignmentTransform, TranslationMethod,
};
use newspolar::analytics::AkimaSpline;
use newspolar::cli::run_command;
use newspolar::corpus::{assign_period, bucket_outlet, PartisanBucket, Period};
use newspolar::embeddings::{
    batch_gradients, batch_loss, normalize, train, CheckExample, EmbeddingModel, TrainConfig,
    Vocabulary,
};
use newspolar::sentiment::{classify, score_text, SentimentClass, SentimentLexicon};
use newspolar::synthetic::{swap_tokens, top_frequent, write_pipeline_fixture, FixtureSpec, MarkovTemplate};

fn data_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn frobenius_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[test]
fn criterion_01_procrustes_recovers_planted_rotation() {
    let started = Instant::now();
    let dim = 50;
    let x = random_unit_rows(500, dim, 0xA11CE);
    let r = random_orthogonal(dim, 0xB0B);
    let y: Vec<Vec<f64>> = x
        .iter()
        .map(|row| {
            (0..dim)
                .map(|c| (0..dim).map(|k| row[k] * r[(k, c)]).sum())
                .collect()
        })
        .collect();
    let (t, _) = fit_procrustes(&x, &y).expect("fit succeeds");
    let err = frobenius_diff(&t.q, &r);
    let elapsed = started.elapsed();
    assert!(err < 1e-4, "recovery error {err:.2e} >= 1e-4");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1 s");
    eprintln!(
        "PASS criterion-1 procrustes-recovery: |Q - R|_F = {err:.2e} in {elapsed:?}"
    );
}

#[test]
fn criterion_02_procrustes_beats_random_candidates_on_small_instances() {
    // The fit needs 10 seed rows; tiling the n <= 6 rows leaves the
    // objective's minimizer unchanged (X^T Y just scales), so the small
    // instances are evaluated on their original rows.
    let mut worst_margin = f64::INFINITY;
    for (dim, n, seed) in [(2usize, 4usize, 31u64), (3, 5, 32), (4, 6, 33)] {
        let x_small = random_unit_rows(n, dim, seed);
        let y_small = random_unit_rows(n, dim, seed + 7);
        let tile = |rows: &[Vec<f64>]| -> Vec<Vec<f64>> {
            let mut out = Vec::new();
            while out.len() < 12 {
                out.extend(rows.iter().cloned());
            }
            out
        };
        let (t, _) = fit_procrustes(&tile(&x_small), &tile(&y_small)).expect("fit succeeds");
        let objective = |q: &DMatrix<f64>| -> f64 {
            let mut sum = 0.0;
            for (xr, yr) in x_small.iter().zip(&y_small) {
                for c in 0..dim {
                    let mapped: f64 = (0..dim).map(|k| xr[k] * q[(k, c)]).sum();
                    sum += (mapped - yr[c]).powi(2);
                }
            }
            sum
        };
        let fitted = objective(&t.q);
        for candidate in 0..1000u64 {
            let r = random_orthogonal(dim, 0xC0FFEE + candidate * 13 + dim as u64);
            let margin = objective(&r) - fitted;
            worst_margin = worst_margin.min(margin);
            assert!(
                fitted <= objective(&r) + 1e-9,
                "dim {dim}: random candidate {candidate} beat the fitted Q by {:.2e}",
                -margin
            );
        }
    }
    eprintln!(
        "PASS criterion-2 procrustes-optimality: 3000 candidates, worst margin {worst_margin:.2e}"
    );
}

struct AlignedModels {
    source: EmbeddingModel,
    target: EmbeddingModel,
    transform: AlignmentTransform,
}

fn train_and_align(
    docs_source: &[Vec<String>],
    docs_target: &[Vec<String>],
    dim: usize,
    seed_source: u64,
    seed_target: u64,
    top_n_seeds: usize,
) -> AlignedModels {
    let config = TrainConfig {
        dim,
        window: 5,
        negatives: 5,
        epochs: 5,
        learning_rate: 0.05,
        n_min: 3,
        n_max: 5,
        buckets: 1 << 16,
    };
    let vocab_source = Vocabulary::build(docs_source.iter().map(|d| d.iter()), 5).unwrap();
    let vocab_target = Vocabulary::build(docs_target.iter().map(|d| d.iter()), 5).unwrap();
    let (source, _) = train(
        docs_source.iter().map(|d| d.iter()),
        &vocab_source,
        &config,
        seed_source,
        1,
    )
    .unwrap();
    let (target, _) = train(
        docs_target.iter().map(|d| d.iter()),
        &vocab_target,
        &config,
        seed_target,
        1,
    )
    .unwrap();
    let seeds = build_seed_lexicon(source.vocab(), target.vocab(), top_n_seeds).unwrap();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (s, t) in &seeds.pairs {
        let mut sv = source.vector(s).unwrap();
        let mut tv = target.vector(t).unwrap();
        normalize(&mut sv);
        normalize(&mut tv);
        x.push(sv);
        y.push(tv);
    }
    let (transform, _) = fit_procrustes(&x, &y).unwrap();
    AlignedModels {
        source,
        target,
        transform,
    }
}

#[test]
fn criterion_03_duplicate_corpus_self_translation() {
    let started = Instant::now();
    let template = MarkovTemplate::new(520, 5, 0x5EED);
    let corpus = template.generate(200_000, 15, 0xD0C5);
    let models = train_and_align(&corpus, &corpus, 64, 101, 202, 500);

    let top_500: Vec<&str> = models.source.vocab().words()[..500]
        .iter()
        .map(|w| w.token.as_str())
        .collect();
    let mut identical = 0usize;
    for word in &top_500 {
        let pair = translate(
            word,
            &models.source,
            &models.target,
            &models.transform,
            TranslationMethod::NearestNeighbor,
        )
        .unwrap();
        if pair.target == *word {
            identical += 1;
        }
    }
    let rate = identical as f64 / top_500.len() as f64;
    assert!(
        rate >= 0.95,
        "self-translation rate {rate:.3} below 0.95 ({identical}/500)"
    );

    // On duplicated corpora any misalignment is residual training
    // noise; the full mined report stays tiny.
    let report = mine_misaligned(
        &models.source,
        &models.target,
        &models.transform,
        TranslationMethod::NearestNeighbor,
        models.source.vocab().len(),
    )
    .unwrap();
    assert!(
        report.pairs.len() * 20 <= report.examined_words,
        "{} misaligned of {} examined exceeds 5%",
        report.pairs.len(),
        report.examined_words
    );

    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 180.0,
        "took {elapsed:?}, budget 3 min"
    );
    eprintln!(
        "PASS criterion-3 self-translation: {identical}/500 = {rate:.3}, {} residual misalignments of {} words, in {elapsed:?}",
        report.pairs.len(),
        report.examined_words
    );
}

#[test]
fn criterion_04_planted_misalignment_recovery() {
    let started = Instant::now();
    let template = MarkovTemplate::new(520, 5, 0x7E41);
    let docs_a = template.generate(200_000, 15, 0xAAA);
    let mut docs_b = template.generate(200_000, 15, 0xBBB);
    let frequent = top_frequent(&docs_a, 20);
    let planted: Vec<(String, String)> = frequent
        .chunks(2)
        .map(|c| (c[0].clone(), c[1].clone()))
        .collect();
    assert_eq!(planted.len(), 10);
    swap_tokens(&mut docs_b, &planted);

    let models = train_and_align(&docs_a, &docs_b, 64, 303, 404, 500);
    let report = mine_misaligned(
        &models.source,
        &models.target,
        &models.transform,
        TranslationMethod::NearestNeighbor,
        20,
    )
    .unwrap();

    // Determinism of the mining pass itself.
    let report_again = mine_misaligned(
        &models.source,
        &models.target,
        &models.transform,
        TranslationMethod::NearestNeighbor,
        20,
    )
    .unwrap();
    assert_eq!(report, report_again, "mining is not deterministic");

    let top_entries: BTreeSet<(String, String)> = report
        .pairs
        .iter()
        .map(|p| (p.source.clone(), p.target.clone()))
        .collect();
    let recovered = planted
        .iter()
        .filter(|(a, b)| {
            top_entries.contains(&(a.clone(), b.clone()))
                || top_entries.contains(&(b.clone(), a.clone()))
        })
        .count();
    let elapsed = started.elapsed();
    assert!(
        recovered >= 8,
        "only {recovered}/10 planted pairs in the top-20 report: {:?}",
        report.pairs
    );
    assert!(
        elapsed.as_secs_f64() < 300.0,
        "took {elapsed:?}, budget 5 min"
    );
    eprintln!(
        "PASS criterion-4 planted-misalignment: {recovered}/10 pairs in top-20 in {elapsed:?}"
    );
}

#[test]
fn criterion_05_sentiment_thresholds_and_ratio_sums() {
    assert_eq!(classify(0.05), SentimentClass::Positive);
    assert_eq!(classify(-0.05), SentimentClass::Negative);
    assert_eq!(classify(0.049999), SentimentClass::Neutral);
    assert_eq!(classify(-0.049999), SentimentClass::Neutral);
    assert_eq!(classify(0.0), SentimentClass::Neutral);

    let (lexicon, _) = SentimentLexicon::load(&data_file("sentiment_lexicon.tsv")).unwrap();
    let lexicon_tokens: Vec<String> = std::fs::read_to_string(data_file("sentiment_lexicon.tsv"))
        .unwrap()
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| l.split('\t').next().map(str::to_string))
        .collect();
    let fillers = [
        "the", "a", "report", "committee", "border", "city", "families", "very", "not", "never",
        "but", "so", "hardly",
    ];
    // Simple deterministic generator for 1,000 mixed documents.
    let mut state = 0x1234_5678_9ABC_DEF0u64;
    let mut next = |n: usize| -> usize {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) as usize % n
    };
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let len = 3 + next(20);
        let mut words = Vec::with_capacity(len);
        for _ in 0..len {
            if next(3) == 0 {
                words.push(lexicon_tokens[next(lexicon_tokens.len())].clone());
            } else {
                words.push(fillers[next(fillers.len())].to_string());
            }
        }
        let mut text = words.join(" ");
        if next(4) == 0 {
            text.push('!');
        }
        let s = score_text(&text, &lexicon);
        let sum = s.positive + s.neutral + s.negative;
        worst = worst.max((sum - 1.0).abs());
        assert!(
            (sum - 1.0).abs() < 1e-6,
            "ratios sum to {sum} for {text:?}"
        );
        assert!((-1.0..=1.0).contains(&s.compound));
    }
    eprintln!(
        "PASS criterion-5 sentiment-thresholds: boundary classes exact; worst ratio-sum error {worst:.2e} over 1000 docs"
    );
}

/// The 20-sentence suite with labels frozen from a one-time run of a
/// transcription of the published lexicon-and-rule procedure over the
/// shipped lexicon file.
const SENTENCE_SUITE: [(&str, &str); 20] = [
    ("Volunteers warmly welcomed the new families at the station.", "positive"),
    ("The agency praised the generous support from local donors.", "positive"),
    ("Aid workers helped children find safe shelter.", "positive"),
    ("The camp was overcrowded and conditions were getting worse.", "negative"),
    ("Officials warned of a growing crisis at the border.", "negative"),
    ("The ceasefire collapsed and violence returned to the region.", "negative"),
    ("The committee will meet on Tuesday to review the schedule.", "neutral"),
    ("The report was published in three languages last month.", "neutral"),
    ("This is not a good outcome for the stranded families.", "negative"),
    ("The program was very successful in its first year.", "positive"),
    ("Residents were EXTREMELY angry about the new restrictions.", "negative"),
    ("What wonderful news for the whole neighborhood!", "positive"),
    ("The shelter is clean, but the food is terrible.", "negative"),
    ("They never supported the plan and refused to fund it.", "negative"),
    ("The city struggled with rising poverty and hunger.", "negative"),
    ("Doctors celebrated a major breakthrough in treatment.", "positive"),
    ("The train departs from platform nine every morning.", "neutral"),
    ("Families were hardly safe in the damaged buildings.", "negative"),
    ("It was a tragedy that shocked the entire country.", "negative"),
    ("Donations increased and the mood at the center improved.", "positive"),
];

#[test]
fn criterion_06_sentiment_reference_parity() {
    let (lexicon, _) = SentimentLexicon::load(&data_file("sentiment_lexicon.tsv")).unwrap();
    let mut agreements = 0usize;
    let mut disagreements = Vec::new();
    for (sentence, expected) in SENTENCE_SUITE {
        let got = score_text(sentence, &lexicon).class().as_str();
        if got == expected {
            agreements += 1;
        } else {
            disagreements.push((sentence, expected, got));
        }
    }
    assert!(
        agreements >= 18,
        "only {agreements}/20 labels agree with the reference: {disagreements:?}"
    );
    eprintln!("PASS criterion-6 sentiment-parity: {agreements}/20 labels agree");
}

/// Independent transcription of Akima's published procedure, kept
/// deliberately separate from the library implementation: polynomial
/// coefficients assembled per interval and evaluated directly.
fn akima_reference(x: &[f64], y: &[f64], t: f64) -> f64 {
    let n = x.len();
    let mut d = vec![0.0f64; n + 3];
    for i in 0..n - 1 {
        d[i + 2] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    }
    d[1] = 2.0 * d[2] - d[3];
    d[0] = 2.0 * d[1] - d[2];
    d[n + 1] = 2.0 * d[n] - d[n - 1];
    d[n + 2] = 2.0 * d[n + 1] - d[n];
    let slope = |i: usize| -> f64 {
        let w1 = (d[i + 3] - d[i + 2]).abs();
        let w2 = (d[i + 1] - d[i]).abs();
        if w1 + w2 == 0.0 {
            (d[i + 1] + d[i + 2]) / 2.0
        } else {
            (w1 * d[i + 1] + w2 * d[i + 2]) / (w1 + w2)
        }
    };
    let mut i = 0;
    while i < n - 2 && x[i + 1] <= t {
        i += 1;
    }
    let h = x[i + 1] - x[i];
    let u = t - x[i];
    let (s0, s1) = (slope(i), slope(i + 1));
    let di = d[i + 2];
    let p0 = y[i];
    let p1 = s0;
    let p2 = (3.0 * di - 2.0 * s0 - s1) / h;
    let p3 = (s0 + s1 - 2.0 * di) / (h * h);
    p0 + p1 * u + p2 * u * u + p3 * u * u * u
}

#[test]
fn criterion_07_akima_reference_parity() {
    // Five knots on t^2 with the gap at t = 4. The value 16.175 was
    // additionally cross-checked against an external implementation of
    // Akima's procedure.
    let x = [1.0, 2.0, 3.0, 5.0, 6.0];
    let y = [1.0, 4.0, 9.0, 25.0, 36.0];
    let spline = AkimaSpline::new(x.to_vec(), y.to_vec()).unwrap();
    let ours = spline.eval(4.0);
    let reference = akima_reference(&x, &y, 4.0);
    assert!(
        (ours - reference).abs() < 1e-9,
        "implementation {ours} vs reference {reference}"
    );
    assert!((ours - 16.175).abs() < 1e-9, "frozen oracle value mismatch: {ours}");

    // Collinear knots reproduce the line exactly.
    let xc: Vec<f64> = (0..7).map(|i| i as f64 * 1.5).collect();
    let yc: Vec<f64> = xc.iter().map(|v| -0.75 * v + 2.0).collect();
    let line = AkimaSpline::new(xc.clone(), yc).unwrap();
    let mut worst = 0.0f64;
    for t in [0.1, 1.3, 2.2, 4.9, 7.7, 8.9] {
        let err = (line.eval(t) - (-0.75 * t + 2.0)).abs();
        worst = worst.max(err);
        assert!(err < 1e-9, "collinear deviation {err:.2e} at {t}");
    }
    eprintln!(
        "PASS criterion-7 akima-parity: gap value {ours} (reference {reference}); collinear max err {worst:.2e}"
    );
}

#[test]
fn criterion_08_period_and_bucket_exactness() {
    let date = |y: i32, m: u32, d: u32| chrono::NaiveDate::from_ymd_opt(y, m, d).unwrap();
    // Event months and the month before each.
    let cases = [
        (date(2011, 3, 1), Some(Period::P1)),
        (date(2011, 2, 28), None),
        (date(2012, 7, 1), Some(Period::P2)),
        (date(2012, 6, 30), Some(Period::P1)),
        (date(2016, 1, 1), Some(Period::P3)),
        (date(2015, 12, 31), Some(Period::P2)),
        (date(2017, 7, 1), Some(Period::P4)),
        (date(2017, 6, 30), Some(Period::P3)),
        (date(2019, 10, 1), Some(Period::P5)),
        (date(2019, 9, 30), Some(Period::P4)),
    ];
    for (d, expected) in cases {
        assert_eq!(assign_period(d), expected, "period of {d}");
    }

    let buckets = [
        (-0.6, PartisanBucket::CenterLeft),
        (-0.2, PartisanBucket::Center),
        (0.2, PartisanBucket::CenterRight),
        (0.6, PartisanBucket::Right),
        (-0.6 - 1e-12, PartisanBucket::Left),
        (-0.2 - 1e-12, PartisanBucket::CenterLeft),
        (0.2 - 1e-12, PartisanBucket::Center),
        (0.6 - 1e-12, PartisanBucket::CenterRight),
        (-1.0, PartisanBucket::Left),
        (1.0, PartisanBucket::Right),
    ];
    for (score, expected) in buckets {
        assert_eq!(bucket_outlet(score).unwrap(), expected, "bucket of {score}");
    }
    eprintln!("PASS criterion-8 period-and-bucket-exactness: 10 boundary dates, 10 boundary scores");
}

#[test]
fn criterion_09_gradient_check() {
    let dim = 9;
    let n_words = 7;
    let n_buckets = 13;
    // Frozen parameters via a fixed multiplicative generator.
    let mut state = 0xDEAD_BEEF_u64;
    let mut next_f = || -> f64 {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 1.6 - 0.8
    };
    let words: Vec<f64> = (0..n_words * dim).map(|_| next_f()).collect();
    let subwords: Vec<f64> = (0..n_buckets * dim).map(|_| next_f()).collect();
    let outputs: Vec<f64> = (0..n_words * dim).map(|_| next_f()).collect();
    let examples = vec![
        CheckExample {
            word: 0,
            subwords: vec![2, 5, 5, 11],
            targets: vec![(1, true), (3, false), (4, false), (6, false)],
        },
        CheckExample {
            word: 3,
            subwords: vec![0, 7],
            targets: vec![(2, true), (0, false), (5, false)],
        },
        CheckExample {
            word: 6,
            subwords: vec![12, 4, 1],
            targets: vec![(5, true), (2, false), (1, false), (0, false), (3, false)],
        },
    ];
    let (_, gw, gs, go) = batch_gradients(&words, &subwords, &outputs, dim, &examples);

    // Probe ten coordinates spread over the three matrices.
    let probes: [(usize, usize); 10] = [
        (0, 3),
        (0, 17),
        (0, 55),
        (1, 20),
        (1, 47),
        (1, 64),
        (1, 110),
        (2, 12),
        (2, 29),
        (2, 50),
    ];
    let eps = 1e-6;
    let mut worst_rel = 0.0f64;
    for (matrix, idx) in probes {
        let analytic = match matrix {
            0 => gw[idx],
            1 => gs[idx],
            _ => go[idx],
        };
        let mut wp = words.clone();
        let mut sp = subwords.clone();
        let mut op = outputs.clone();
        let mut wm = words.clone();
        let mut sm = subwords.clone();
        let mut om = outputs.clone();
        match matrix {
            0 => {
                wp[idx] += eps;
                wm[idx] -= eps;
            }
            1 => {
                sp[idx] += eps;
                sm[idx] -= eps;
            }
            _ => {
                op[idx] += eps;
                om[idx] -= eps;
            }
        }
        let numeric = (batch_loss(&wp, &sp, &op, dim, &examples)
            - batch_loss(&wm, &sm, &om, dim, &examples))
            / (2.0 * eps);
        let scale = analytic.abs().max(numeric.abs()).max(1e-10);
        let rel = (analytic - numeric).abs() / scale;
        worst_rel = worst_rel.max(rel);
        assert!(
            rel < 1e-4,
            "matrix {matrix} idx {idx}: analytic {analytic:.8} vs numeric {numeric:.8} (rel {rel:.2e})"
        );
    }
    eprintln!("PASS criterion-9 gradient-check: worst relative error {worst_rel:.2e} over 10 probes");
}

#[test]
fn criterion_10_pipeline_reproducibility() {
    let started = Instant::now();
    let fixture_dir = tempfile::tempdir().unwrap();
    let paths = write_pipeline_fixture(fixture_dir.path(), 42, &FixtureSpec::default()).unwrap();
    let out_dir = fixture_dir.path().join("out");

    let run = || -> i32 {
        run_command(
            &[
                "newspolar",
                "pipeline",
                "--config",
                paths.config.to_str().unwrap(),
                "--normalized",
                "--quiet",
            ]
            .map(String::from),
        )
    };

    let tracked = |root: &Path| -> Vec<(String, Vec<u8>)> {
        let mut files = Vec::new();
        let mut stack = vec![root.to_path_buf()];
        while let Some(dir) = stack.pop() {
            for entry in std::fs::read_dir(&dir).unwrap() {
                let path = entry.unwrap().path();
                if path.is_dir() {
                    stack.push(path);
                } else {
                    let rel = path.strip_prefix(root).unwrap().to_string_lossy().to_string();
                    files.push((rel, std::fs::read(&path).unwrap()));
                }
            }
        }
        files.sort();
        files
    };

    assert_eq!(run(), 0, "first pipeline run failed");
    let first = tracked(&out_dir);
    std::fs::remove_dir_all(&out_dir).unwrap();
    assert_eq!(run(), 0, "second pipeline run failed");
    let second = tracked(&out_dir);

    assert_eq!(
        first.len(),
        second.len(),
        "runs produced different file sets"
    );
    for ((name_a, bytes_a), (name_b, bytes_b)) in first.iter().zip(&second) {
        assert_eq!(name_a, name_b);
        assert_eq!(bytes_a, bytes_b, "artifact {name_a} differs between runs");
    }

    // The report carries the run's substance: all five buckets and at
    // least one mined pair.
    let report: serde_json::Value =
        serde_json::from_slice(&first.iter().find(|(n, _)| n == "report.json").unwrap().1)
            .unwrap();
    let proportions = report["bucket_proportions"].as_object().unwrap();
    assert_eq!(proportions.len(), 5);
    let pairs = report["misaligned"]["pairs"].as_array().unwrap();
    assert!(!pairs.is_empty(), "report has no mined pairs");
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 300.0,
        "took {elapsed:?}, budget 5 min"
    );
    eprintln!(
        "PASS criterion-10 reproducibility: {} artifacts byte-identical across runs in {elapsed:?}",
        first.len()
    );
}
