//! Generate the bundled synthetic fixture and run the whole pipeline
//! through the CLI entry point, then summarize the report.
//!
//! Run with: cargo run --release --example full_pipeline

use newspolar::cli::run_command;
use newspolar::synthetic::{write_pipeline_fixture, FixtureSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let spec = FixtureSpec::default();
    let paths = write_pipeline_fixture(dir.path(), 42, &spec)?;
    println!("fixture: {:?}", dir.path());
    println!("planted swaps between left and right: {:?}\n", paths.planted);

    let code = run_command(
        &[
            "newspolar",
            "pipeline",
            "--config",
            paths.config.to_str().unwrap(),
            "--normalized",
        ]
        .map(String::from),
    );
    assert_eq!(code, 0, "pipeline failed");

    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(
        dir.path().join("out/report.json"),
    )?)?;
    println!("\nbucket proportions:");
    for (bucket, p) in report["bucket_proportions"].as_object().unwrap() {
        println!("  {bucket:>12}: {:.1}%", p.as_f64().unwrap() * 100.0);
    }
    println!("\ntop mined pairs:");
    for pair in report["misaligned"]["pairs"].as_array().unwrap().iter().take(10) {
        println!(
            "  #{} {} -> {} (source count {}, cosine {:.3})",
            pair["rank"],
            pair["source"].as_str().unwrap(),
            pair["target"].as_str().unwrap(),
            pair["source_frequency"],
            pair["aligned_cosine"].as_f64().unwrap()
        );
    }
    if let Some(ctx) = report["misaligned"]["contexts"]
        .as_array()
        .and_then(|c| c.iter().find(|c| !c["contexts"].as_array().unwrap().is_empty()))
    {
        let first = &ctx["contexts"][0];
        println!(
            "\nillustrative contexts for ({}, {}):",
            ctx["source"].as_str().unwrap(),
            ctx["target"].as_str().unwrap()
        );
        println!("  source: {}", first["source_sentence"].as_str().unwrap());
        println!("  target: {}", first["target_sentence"].as_str().unwrap());
        println!("  similarity: {:.3}", first["similarity"].as_f64().unwrap());
    }
    println!("\nseries files: {:?}", report["series_files"]);
    Ok(())
}
