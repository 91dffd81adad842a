//! Property tests for the invariants that hold over whole input spaces.

use proptest::prelude::*;

use newspolar::analytics::{
    akima_interpolate, moving_average, Metric, MonthlySeries, YearMonth,
};
use newspolar::corpus::{bucket_outlet, tokenize, PartisanBucket, QueryFilter};
use newspolar::sentiment::{score_text, SentimentLexicon};

fn series(values: Vec<Option<f64>>) -> MonthlySeries {
    MonthlySeries::new(
        Metric::SentimentCompound,
        PartisanBucket::Left,
        YearMonth::new(2014, 1),
        values,
    )
}

proptest! {
    #[test]
    fn tokens_are_lowercase_and_nonempty(text in "\\PC{0,120}") {
        let tokens = tokenize(&text);
        for t in &tokens {
            prop_assert!(!t.is_empty());
            prop_assert_eq!(t.clone(), t.to_lowercase());
            prop_assert!(!t.chars().any(char::is_whitespace));
        }
        // Deterministic.
        prop_assert_eq!(tokens, tokenize(&text));
    }

    #[test]
    fn query_matching_is_case_insensitive(
        body in "[a-zA-Z ]{0,80}",
        with_a in any::<bool>(),
        with_b in any::<bool>(),
    ) {
        let mut text = body;
        if with_a {
            text.push_str(" Refugee");
        }
        if with_b {
            text.push_str(" SYRIA");
        }
        let q = QueryFilter::default();
        let lower = tokenize(&text.to_lowercase());
        let upper = tokenize(&text.to_uppercase());
        prop_assert_eq!(q.matches_tokens(&lower), q.matches_tokens(&upper));
        if with_a && with_b {
            prop_assert!(q.matches_tokens(&lower));
        }
    }

    #[test]
    fn bucketing_is_total_and_monotone(a in -1.0f64..=1.0, b in -1.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let bucket_lo = bucket_outlet(lo).unwrap();
        let bucket_hi = bucket_outlet(hi).unwrap();
        prop_assert!(bucket_lo <= bucket_hi, "{lo} -> {bucket_lo:?}, {hi} -> {bucket_hi:?}");
    }

    #[test]
    fn moving_average_is_linear_and_bounded(
        xs in prop::collection::vec(-5.0f64..5.0, 4..24),
        ys_seed in prop::collection::vec(-5.0f64..5.0, 4..24),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let n = xs.len().min(ys_seed.len());
        let xs = &xs[..n];
        let ys = &ys_seed[..n];
        let sx = series(xs.iter().map(|v| Some(*v)).collect());
        let sy = series(ys.iter().map(|v| Some(*v)).collect());
        let combined = series(
            xs.iter().zip(ys).map(|(x, y)| Some(a * x + b * y)).collect(),
        );
        let mx = moving_average(&sx, 3).unwrap();
        let my = moving_average(&sy, 3).unwrap();
        let mc = moving_average(&combined, 3).unwrap();
        for i in 0..n {
            let expect = a * mx.values[i].unwrap() + b * my.values[i].unwrap();
            prop_assert!((mc.values[i].unwrap() - expect).abs() < 1e-9);
        }
        // Bounds and constants preservation.
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for v in mx.values.iter().flatten() {
            prop_assert!(*v >= lo - 1e-12 && *v <= hi + 1e-12);
        }
    }

    #[test]
    fn interpolation_preserves_known_points(
        known in prop::collection::vec(-10.0f64..10.0, 5..12),
        gap_offsets in prop::collection::vec(0usize..4, 1..4),
    ) {
        // Interleave known values with gaps at arbitrary interior spots.
        let mut values: Vec<Option<f64>> = Vec::new();
        for (i, v) in known.iter().enumerate() {
            values.push(Some(*v));
            if i + 1 < known.len() {
                for _ in 0..gap_offsets[i % gap_offsets.len()] {
                    values.push(None);
                }
            }
        }
        let s = series(values.clone());
        let (filled, _) = akima_interpolate(&s).unwrap();
        for (i, original) in values.iter().enumerate() {
            if let Some(v) = original {
                prop_assert_eq!(filled.values[i], Some(*v), "knot {} moved", i);
                prop_assert!(!filled.interpolated[i]);
            } else {
                prop_assert!(filled.values[i].is_some(), "gap {} not filled", i);
                prop_assert!(filled.interpolated[i]);
            }
        }
    }

    #[test]
    fn compound_is_odd_under_valence_negation(
        word_picks in prop::collection::vec(0usize..6, 1..12),
    ) {
        let words = ["good", "bad", "great", "horrible", "fine", "awful"];
        let valences = [1.9, -2.5, 3.1, -2.5, 0.8, -2.0];
        let text: Vec<&str> = word_picks.iter().map(|i| words[*i]).collect();
        let text = text.join(" ");
        let lex_pos = SentimentLexicon::new(
            words.iter().zip(valences).map(|(w, v)| (w.to_string(), v)),
        );
        let lex_neg = SentimentLexicon::new(
            words.iter().zip(valences).map(|(w, v)| (w.to_string(), -v)),
        );
        let a = score_text(&text, &lex_pos);
        let b = score_text(&text, &lex_neg);
        prop_assert!((a.compound + b.compound).abs() < 1e-12);
        prop_assert!((a.positive - b.negative).abs() < 1e-12);
    }
}

#[test]
fn compound_is_strictly_increasing_in_summed_valence() {
    let lex = SentimentLexicon::new([("good".to_string(), 1.9)]);
    let mut last = 0.0;
    for n in 1..40 {
        let text = vec!["good"; n].join(" ");
        let c = score_text(&text, &lex).compound;
        assert!(c > last, "compound not increasing at n={n}: {c} <= {last}");
        assert!(c < 1.0, "compound must stay below 1");
        last = c;
    }
}
