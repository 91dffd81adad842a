//! On-disk corpus store: accepted records, the outlet registry they were
//! checked against, and the ingest manifest.

use std::collections::BTreeMap;
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{parse_record_line, Document, OutletRegistry, PartisanBucket, QueryFilter};
use crate::{Error, Result};

const RECORDS_FILE: &str = "records.jsonl";
const OUTLETS_FILE: &str = "outlets.csv";
const MANIFEST_FILE: &str = "manifest.json";

/// Counts from one ingest run. Rejected records never abort the run;
/// they are counted under the first check they fail (parse, then query,
/// then outlet lookup).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub read: u64,
    pub rejected_parse: u64,
    pub rejected_query: u64,
    pub rejected_outlet: u64,
    pub stored: u64,
}

/// Document collection accepted by an ingest run, keyed by id.
#[derive(Debug)]
pub struct CorpusStore {
    root: PathBuf,
    documents: BTreeMap<String, Document>,
    outlets: OutletRegistry,
    report: IngestReport,
}

impl CorpusStore {
    /// Filter a record stream against the query and outlet registry and
    /// persist the accepted documents under `root`.
    ///
    /// The store is written in full on every run: records sorted by id,
    /// one JSON object per line, plus the outlet registry and a manifest
    /// with the ingest counts. Re-running on the same stream produces a
    /// byte-identical directory.
    pub fn ingest(
        records: impl BufRead,
        outlets: OutletRegistry,
        query: &QueryFilter,
        root: &Path,
    ) -> Result<Self> {
        let mut report = IngestReport::default();
        let mut documents: BTreeMap<String, Document> = BTreeMap::new();

        for line in records.lines() {
            let line = line.map_err(|e| Error::io("<record stream>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            report.read += 1;
            let doc = match parse_record_line(&line) {
                Ok(d) => d,
                Err(_) => {
                    report.rejected_parse += 1;
                    continue;
                }
            };
            if !query.matches(&doc) {
                report.rejected_query += 1;
                continue;
            }
            if outlets.get(&doc.outlet_id).is_none() {
                report.rejected_outlet += 1;
                continue;
            }
            // Duplicate ids: last record wins; the read count still
            // reflects every accepted record.
            if documents.insert(doc.id.clone(), doc).is_none() {
                report.stored += 1;
            }
        }

        let store = CorpusStore {
            root: root.to_path_buf(),
            documents,
            outlets,
            report,
        };
        store.write()?;
        Ok(store)
    }

    /// Load a previously written store.
    pub fn open(root: &Path) -> Result<Self> {
        let records_path = root.join(RECORDS_FILE);
        let file = std::fs::File::open(&records_path).map_err(|e| Error::io(&records_path, e))?;
        let mut documents = BTreeMap::new();
        for line in std::io::BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(&records_path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let doc = parse_record_line(&line)?;
            documents.insert(doc.id.clone(), doc);
        }
        let outlets = OutletRegistry::from_csv_path(&root.join(OUTLETS_FILE))?;
        let manifest_path = root.join(MANIFEST_FILE);
        let manifest = std::fs::read_to_string(&manifest_path)
            .map_err(|e| Error::io(&manifest_path, e))?;
        let report: IngestReport = serde_json::from_str(&manifest)
            .map_err(|e| Error::domain(format!("bad store manifest: {e}")))?;
        Ok(CorpusStore {
            root: root.to_path_buf(),
            documents,
            outlets,
            report,
        })
    }

    fn write(&self) -> Result<()> {
        std::fs::create_dir_all(&self.root).map_err(|e| Error::io(&self.root, e))?;

        let records_path = self.root.join(RECORDS_FILE);
        let file = std::fs::File::create(&records_path).map_err(|e| Error::io(&records_path, e))?;
        let mut w = BufWriter::new(file);
        for doc in self.documents.values() {
            let line = serde_json::to_string(&doc.record())
                .map_err(|e| Error::domain(format!("serialize record: {e}")))?;
            writeln!(w, "{line}").map_err(|e| Error::io(&records_path, e))?;
        }
        w.flush().map_err(|e| Error::io(&records_path, e))?;

        let outlets_path = self.root.join(OUTLETS_FILE);
        let file = std::fs::File::create(&outlets_path).map_err(|e| Error::io(&outlets_path, e))?;
        let mut w = BufWriter::new(file);
        self.outlets
            .write_csv(&mut w)
            .map_err(|e| Error::io(&outlets_path, e))?;
        w.flush().map_err(|e| Error::io(&outlets_path, e))?;

        let manifest_path = self.root.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(&self.report)
            .map_err(|e| Error::domain(format!("serialize manifest: {e}")))?;
        std::fs::write(&manifest_path, json + "\n").map_err(|e| Error::io(&manifest_path, e))?;
        Ok(())
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn report(&self) -> &IngestReport {
        &self.report
    }

    pub fn outlets(&self) -> &OutletRegistry {
        &self.outlets
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Documents in id order.
    pub fn documents(&self) -> impl Iterator<Item = &Document> {
        self.documents.values()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.documents.get(id)
    }

    /// Bucket of the outlet a document came from.
    pub fn bucket_of(&self, doc: &Document) -> PartisanBucket {
        self.outlets
            .get(&doc.outlet_id)
            .expect("stored documents reference known outlets")
            .bucket
    }

    /// Assign every stored document to its outlet's bucket.
    pub fn partition(&self) -> Partition {
        let mut by_bucket: BTreeMap<PartisanBucket, Vec<String>> = PartisanBucket::ALL
            .iter()
            .map(|b| (*b, Vec::new()))
            .collect();
        for doc in self.documents.values() {
            by_bucket
                .get_mut(&self.bucket_of(doc))
                .unwrap()
                .push(doc.id.clone());
        }
        Partition {
            total: self.documents.len(),
            by_bucket,
        }
    }

    /// Documents of one bucket, in id order.
    pub fn bucket_documents(&self, bucket: PartisanBucket) -> Vec<&Document> {
        self.documents
            .values()
            .filter(|d| self.bucket_of(d) == bucket)
            .collect()
    }
}

/// Document ids per partisan bucket, with proportions of the whole store.
#[derive(Debug, Clone)]
pub struct Partition {
    total: usize,
    by_bucket: BTreeMap<PartisanBucket, Vec<String>>,
}

impl Partition {
    pub fn ids(&self, bucket: PartisanBucket) -> &[String] {
        &self.by_bucket[&bucket]
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Fraction of stored documents per bucket (0 when the store is empty).
    pub fn proportions(&self) -> BTreeMap<PartisanBucket, f64> {
        self.by_bucket
            .iter()
            .map(|(b, ids)| {
                let p = if self.total == 0 {
                    0.0
                } else {
                    ids.len() as f64 / self.total as f64
                };
                (*b, p)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Outlet;

    fn registry() -> OutletRegistry {
        OutletRegistry::new([
            Outlet::new("far-left", "FL", -0.8).unwrap(),
            Outlet::new("lean-left", "LL", -0.3).unwrap(),
            Outlet::new("middle", "M", 0.0).unwrap(),
            Outlet::new("lean-right", "LR", 0.4).unwrap(),
            Outlet::new("far-right", "FR", 0.9).unwrap(),
        ])
    }

    fn titled_record(id: &str, outlet: &str, title: &str, body: &str) -> String {
        format!(
            r#"{{"id":"{id}","url":"http://x/{id}","outlet_id":"{outlet}","published":"2016-03-01","title":"{title}","body":"{body}"}}"#
        )
    }

    // Title supplies the topic-group term; bodies opt in to the
    // location group.
    fn record(id: &str, outlet: &str, body: &str) -> String {
        titled_record(id, outlet, "Refugee report", body)
    }

    #[test]
    fn ingest_counts_and_stores_matching_records() {
        let dir = tempfile::tempdir().unwrap();
        let input = [
            record("a", "middle", "news about syria"),
            record("b", "middle", "more refugee coverage from syria"),
            record("c", "middle", "third matching piece on syria"),
        ]
        .join("\n");
        let store =
            CorpusStore::ingest(input.as_bytes(), registry(), &QueryFilter::default(), dir.path())
                .unwrap();
        let r = store.report();
        assert_eq!((r.read, r.stored), (3, 3));
        assert_eq!(r.rejected_parse + r.rejected_query + r.rejected_outlet, 0);
    }

    #[test]
    fn unknown_outlet_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let input = record("a", "nobody", "syria report");
        let store =
            CorpusStore::ingest(input.as_bytes(), registry(), &QueryFilter::default(), dir.path())
                .unwrap();
        assert_eq!(store.report().rejected_outlet, 1);
        assert_eq!(store.report().stored, 0);
    }

    #[test]
    fn query_rejections_are_counted() {
        // 10 records; 4 lack the location-group term.
        let dir = tempfile::tempdir().unwrap();
        let mut lines = Vec::new();
        for i in 0..6 {
            lines.push(record(&format!("m{i}"), "middle", "refugees from syria"));
        }
        for i in 0..4 {
            lines.push(record(&format!("q{i}"), "middle", "refugees from elsewhere"));
        }
        let store = CorpusStore::ingest(
            lines.join("\n").as_bytes(),
            registry(),
            &QueryFilter::default(),
            dir.path(),
        )
        .unwrap();
        let r = store.report();
        assert_eq!((r.read, r.stored, r.rejected_query), (10, 6, 4));
    }

    #[test]
    fn unparseable_records_are_counted_not_fatal() {
        let dir = tempfile::tempdir().unwrap();
        let input = format!(
            "{}\nnot json at all\n{}\n",
            record("a", "middle", "syria story"),
            r#"{"id":"bad","url":"u","outlet_id":"middle","published":"not-a-date","title":"syria","body":"refugee"}"#
        );
        let store =
            CorpusStore::ingest(input.as_bytes(), registry(), &QueryFilter::default(), dir.path())
                .unwrap();
        let r = store.report();
        assert_eq!((r.read, r.stored, r.rejected_parse), (3, 1, 2));
    }

    #[test]
    fn reingest_is_byte_identical() {
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let input = [
            record("b", "middle", "refugee syria one"),
            record("a", "far-left", "refugee syria two"),
            record("b", "middle", "refugee syria one"),
        ]
        .join("\n");
        for dir in [&dir1, &dir2] {
            CorpusStore::ingest(input.as_bytes(), registry(), &QueryFilter::default(), dir.path())
                .unwrap();
        }
        for name in [RECORDS_FILE, OUTLETS_FILE, MANIFEST_FILE] {
            let x = std::fs::read(dir1.path().join(name)).unwrap();
            let y = std::fs::read(dir2.path().join(name)).unwrap();
            assert_eq!(x, y, "{name} differs between identical runs");
        }
    }

    #[test]
    fn open_round_trips_the_store() {
        let dir = tempfile::tempdir().unwrap();
        let input = record("a", "middle", "refugee syria");
        let store =
            CorpusStore::ingest(input.as_bytes(), registry(), &QueryFilter::default(), dir.path())
                .unwrap();
        let reopened = CorpusStore::open(dir.path()).unwrap();
        assert_eq!(reopened.len(), store.len());
        assert_eq!(reopened.report(), store.report());
        assert_eq!(reopened.get("a").unwrap().tokens(), store.get("a").unwrap().tokens());
    }

    #[test]
    fn partition_spreads_docs_by_outlet_score() {
        let dir = tempfile::tempdir().unwrap();
        let input = [
            record("a", "far-left", "refugee syria"),
            record("b", "lean-left", "refugee syria"),
            record("c", "middle", "refugee syria"),
            record("d", "lean-right", "refugee syria"),
            record("e", "far-right", "refugee syria"),
        ]
        .join("\n");
        let store =
            CorpusStore::ingest(input.as_bytes(), registry(), &QueryFilter::default(), dir.path())
                .unwrap();
        let partition = store.partition();
        for bucket in PartisanBucket::ALL {
            assert_eq!(partition.ids(bucket).len(), 1, "{bucket}");
        }
        let props = partition.proportions();
        let sum: f64 = props.values().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_store_has_five_empty_buckets() {
        let dir = tempfile::tempdir().unwrap();
        let store =
            CorpusStore::ingest("".as_bytes(), registry(), &QueryFilter::default(), dir.path())
                .unwrap();
        let partition = store.partition();
        for bucket in PartisanBucket::ALL {
            assert!(partition.ids(bucket).is_empty());
        }
    }
}
