//! Ingest a document stream against an outlet registry and partition
//! the store by partisan bucket.
//!
//! Run with: cargo run --example ingest_corpus

use newspolar::corpus::{CorpusStore, Outlet, OutletRegistry, PartisanBucket, QueryFilter};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let registry = OutletRegistry::new([
        Outlet::new("torch", "The Torch", -0.8)?,
        Outlet::new("ledger", "City Ledger", -0.3)?,
        Outlet::new("wire", "Plain Wire", 0.0)?,
        Outlet::new("signal", "The Signal", 0.4)?,
        Outlet::new("banner", "Banner Post", 0.9)?,
    ]);

    // One record per line; two lines will be rejected (bad date, unknown
    // outlet), one fails the query.
    let stream = r#"
{"id":"a1","url":"http://t/1","outlet_id":"torch","published":"2015-09-04","title":"Refugee crossings rise","body":"Thousands left Syria this month."}
{"id":"a2","url":"http://t/2","outlet_id":"ledger","published":"2015-09-07","title":"Syrian migrant families settle in","body":"New arrivals find housing."}
{"id":"a3","url":"http://t/3","outlet_id":"wire","published":"2016-02-11","title":"Asylum-seeker hearings","body":"Backlog grows for Syrian cases."}
{"id":"a4","url":"http://t/4","outlet_id":"signal","published":"2016-03-02","title":"Border policy debate","body":"No topic terms here."}
{"id":"a5","url":"http://t/5","outlet_id":"banner","published":"not-a-date","title":"Refugee quota vote","body":"Syria debate continues."}
{"id":"a6","url":"http://t/6","outlet_id":"ghost","published":"2016-04-09","title":"Displaced by the Syrian war","body":"Voices from the camps."}
{"id":"a7","url":"http://t/7","outlet_id":"banner","published":"2017-01-20","title":"Immigrant labor study","body":"Syrian workers surveyed."}
"#;

    let dir = tempfile::tempdir()?;
    let store = CorpusStore::ingest(
        stream.trim().as_bytes(),
        registry,
        &QueryFilter::default(),
        dir.path(),
    )?;

    let r = store.report();
    println!(
        "read {}  stored {}  rejected: parse {} query {} outlet {}",
        r.read, r.stored, r.rejected_parse, r.rejected_query, r.rejected_outlet
    );

    let partition = store.partition();
    println!("\nbucket proportions:");
    for bucket in PartisanBucket::ALL {
        let ids = partition.ids(bucket);
        println!(
            "  {bucket:>12}: {} docs ({:.1}%)  {:?}",
            ids.len(),
            100.0 * partition.proportions()[&bucket],
            ids
        );
    }
    println!("\nstore on disk: {:?}", dir.path());
    Ok(())
}
