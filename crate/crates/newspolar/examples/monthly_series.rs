//! Monthly aggregation with Akima gap interpolation and a three-month
//! centered moving average, plus per-period summaries.
//!
//! Run with: cargo run --example monthly_series

use std::collections::BTreeMap;

use newspolar::analytics::{
    akima_interpolate, monthly_aggregate, moving_average, period_summary, write_series_csv,
    Metric,
};
use newspolar::corpus::{CorpusStore, Outlet, OutletRegistry, QueryFilter};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A small store: one left outlet, one right, uneven months so the
    // interpolator has gaps to fill.
    let registry = OutletRegistry::new([
        Outlet::new("l", "Leftish Daily", -0.8)?,
        Outlet::new("r", "Rightward Post", 0.8)?,
    ]);
    let mut lines = Vec::new();
    let mut compounds: BTreeMap<String, f64> = BTreeMap::new();
    let months = [
        ("2015-01", 3, 0.20),
        ("2015-02", 2, 0.10),
        ("2015-04", 4, -0.05), // March missing: a gap
        ("2015-05", 1, 0.30),
        ("2015-06", 2, -0.20),
        ("2015-08", 3, 0.15), // July missing
    ];
    let mut n = 0;
    for (month, count, compound) in months {
        for _ in 0..count {
            let id = format!("d{n:03}");
            let outlet = if n % 2 == 0 { "l" } else { "r" };
            lines.push(format!(
                r#"{{"id":"{id}","url":"u","outlet_id":"{outlet}","published":"{month}-10","title":"refugee","body":"syria update"}}"#
            ));
            compounds.insert(id, compound);
            n += 1;
        }
    }
    let dir = tempfile::tempdir()?;
    let store = CorpusStore::ingest(
        lines.join("\n").as_bytes(),
        registry,
        &QueryFilter::default(),
        dir.path(),
    )?;

    let raw = monthly_aggregate(&store, Metric::SentimentCompound, Some(&compounds))?;
    let mut interpolated = Vec::new();
    let mut smoothed = Vec::new();
    for series in &raw {
        if series.values.iter().all(Option::is_none) {
            interpolated.push(series.clone());
            smoothed.push(series.clone());
            continue;
        }
        let (filled, warnings) = akima_interpolate(series)?;
        for w in warnings {
            eprintln!("note ({}): {w}", series.bucket);
        }
        smoothed.push(moving_average(&filled, 3)?);
        interpolated.push(filled);
    }

    let mut csv = Vec::new();
    write_series_csv(&mut csv, &interpolated, &smoothed)?;
    print!("{}", String::from_utf8(csv)?);

    println!("\nper-period sentiment summaries (non-empty cells):");
    for s in period_summary(&store, "sentiment_compound", &compounds) {
        if s.summary.count > 0 {
            println!(
                "  {} {:>12}: mean {:+.3} min {:+.3} max {:+.3} over {} docs",
                s.period,
                s.bucket.to_string(),
                s.summary.mean.unwrap(),
                s.summary.min.unwrap(),
                s.summary.max.unwrap(),
                s.summary.count
            );
        }
    }
    Ok(())
}
