//! Document ingestion, partisan bucketing, timeline periods, and the
//! on-disk corpus store.

mod store;
mod tokenize;

pub use store::{CorpusStore, IngestReport, Partition};
pub use tokenize::{split_sentences, tokenize};

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One news article. `tokens` is always `tokenize(title + " " + body)`,
/// derived at construction and cached.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub url: String,
    pub outlet_id: String,
    pub published: NaiveDate,
    pub title: String,
    pub body: String,
    tokens: Vec<String>,
}

/// Wire form of a document: the six flat fields of the line-delimited
/// input and store format, without the derived token cache.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub id: String,
    pub url: String,
    pub outlet_id: String,
    pub published: NaiveDate,
    pub title: String,
    pub body: String,
}

impl Document {
    pub fn new(
        id: impl Into<String>,
        url: impl Into<String>,
        outlet_id: impl Into<String>,
        published: NaiveDate,
        title: impl Into<String>,
        body: impl Into<String>,
    ) -> Self {
        let title = title.into();
        let body = body.into();
        let tokens = tokenize(&format!("{title} {body}"));
        Document {
            id: id.into(),
            url: url.into(),
            outlet_id: outlet_id.into(),
            published,
            title,
            body,
            tokens,
        }
    }

    /// Cached tokens of title + body.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn record(&self) -> DocumentRecord {
        DocumentRecord {
            id: self.id.clone(),
            url: self.url.clone(),
            outlet_id: self.outlet_id.clone(),
            published: self.published,
            title: self.title.clone(),
            body: self.body.clone(),
        }
    }
}

impl From<DocumentRecord> for Document {
    fn from(r: DocumentRecord) -> Self {
        Document::new(r.id, r.url, r.outlet_id, r.published, r.title, r.body)
    }
}

/// Even-quintile partisanship label for an outlet score in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartisanBucket {
    Left,
    CenterLeft,
    Center,
    CenterRight,
    Right,
}

impl PartisanBucket {
    pub const ALL: [PartisanBucket; 5] = [
        PartisanBucket::Left,
        PartisanBucket::CenterLeft,
        PartisanBucket::Center,
        PartisanBucket::CenterRight,
        PartisanBucket::Right,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PartisanBucket::Left => "left",
            PartisanBucket::CenterLeft => "center_left",
            PartisanBucket::Center => "center",
            PartisanBucket::CenterRight => "center_right",
            PartisanBucket::Right => "right",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(PartisanBucket::Left),
            "center_left" => Ok(PartisanBucket::CenterLeft),
            "center" => Ok(PartisanBucket::Center),
            "center_right" => Ok(PartisanBucket::CenterRight),
            "right" => Ok(PartisanBucket::Right),
            other => Err(Error::domain(format!("unknown partisan bucket: {other}"))),
        }
    }
}

impl fmt::Display for PartisanBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Map a partisanship score to its even-width quintile of [-1, 1].
///
/// Buckets are half-open on the left boundary except the final bucket,
/// which is closed at 1.0: a score of exactly 0.6 is `right`.
pub fn bucket_outlet(score: f64) -> Result<PartisanBucket> {
    if !score.is_finite() || !(-1.0..=1.0).contains(&score) {
        return Err(Error::domain(format!(
            "partisanship score {score} outside [-1, 1]"
        )));
    }
    Ok(if score < -0.6 {
        PartisanBucket::Left
    } else if score < -0.2 {
        PartisanBucket::CenterLeft
    } else if score < 0.2 {
        PartisanBucket::Center
    } else if score < 0.6 {
        PartisanBucket::CenterRight
    } else {
        PartisanBucket::Right
    })
}

/// One news outlet with its candidate-centric partisanship score.
#[derive(Debug, Clone, PartialEq)]
pub struct Outlet {
    pub outlet_id: String,
    pub name: String,
    pub partisanship: f64,
    pub bucket: PartisanBucket,
}

impl Outlet {
    pub fn new(outlet_id: impl Into<String>, name: impl Into<String>, partisanship: f64) -> Result<Self> {
        let bucket = bucket_outlet(partisanship)?;
        Ok(Outlet {
            outlet_id: outlet_id.into(),
            name: name.into(),
            partisanship,
            bucket,
        })
    }
}

/// Registry of known outlets, keyed by outlet id.
///
/// Loaded from comma-separated text with a header row
/// `outlet_id,name,partisanship`. Scores outside [-1, 1] fail the load.
#[derive(Debug, Clone, Default)]
pub struct OutletRegistry {
    outlets: BTreeMap<String, Outlet>,
}

impl OutletRegistry {
    pub fn new(outlets: impl IntoIterator<Item = Outlet>) -> Self {
        OutletRegistry {
            outlets: outlets
                .into_iter()
                .map(|o| (o.outlet_id.clone(), o))
                .collect(),
        }
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file)
    }

    pub fn from_csv_reader(reader: impl std::io::Read) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let mut outlets = BTreeMap::new();
        for row in csv.deserialize::<(String, String, f64)>() {
            let (outlet_id, name, partisanship) =
                row.map_err(|e| Error::domain(format!("bad outlet row: {e}")))?;
            let outlet = Outlet::new(outlet_id.clone(), name, partisanship)?;
            outlets.insert(outlet_id, outlet);
        }
        Ok(OutletRegistry { outlets })
    }

    pub fn get(&self, outlet_id: &str) -> Option<&Outlet> {
        self.outlets.get(outlet_id)
    }

    pub fn len(&self) -> usize {
        self.outlets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outlets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Outlet> {
        self.outlets.values()
    }

    pub fn write_csv(&self, w: &mut impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "outlet_id,name,partisanship")?;
        for o in self.outlets.values() {
            writeln!(w, "{},{},{}", o.outlet_id, o.name, o.partisanship)?;
        }
        Ok(())
    }
}

/// Timeline segments bounded by five key events of the Crisis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Period {
    P1,
    P2,
    P3,
    P4,
    P5,
}

impl Period {
    pub const ALL: [Period; 5] = [Period::P1, Period::P2, Period::P3, Period::P4, Period::P5];

    /// First month of the period (inclusive), as (year, month).
    pub fn start(&self) -> (i32, u32) {
        match self {
            Period::P1 => (2011, 3),
            Period::P2 => (2012, 7),
            Period::P3 => (2016, 1),
            Period::P4 => (2017, 7),
            Period::P5 => (2019, 10),
        }
    }

    /// First month after the period (exclusive); the last period is
    /// open-ended.
    pub fn end(&self) -> Option<(i32, u32)> {
        match self {
            Period::P1 => Some(Period::P2.start()),
            Period::P2 => Some(Period::P3.start()),
            Period::P3 => Some(Period::P4.start()),
            Period::P4 => Some(Period::P5.start()),
            Period::P5 => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Period::P1 => "P1",
            Period::P2 => "P2",
            Period::P3 => "P3",
            Period::P4 => "P4",
            Period::P5 => "P5",
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Assign a date to its timeline period. Dates before 2011-03 fall outside
/// the timeline and get `None`. Boundaries snap to the first day of the
/// event month: the month an event happens opens the next period.
pub fn assign_period(date: NaiveDate) -> Option<Period> {
    let ym = (date.year(), date.month());
    let mut found = None;
    for period in Period::ALL {
        if ym >= period.start() {
            found = Some(period);
        }
    }
    found
}

/// Boolean topic filter: a document matches iff at least one group-A term
/// and at least one group-B term occur among its tokens.
///
/// Terms are compared case-insensitively with hyphens and internal spaces
/// removed, so "asylum-seeker", "asylumseeker", and the bigram
/// "asylum seeker" are the same term.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct QueryFilter {
    pub group_a: Vec<String>,
    pub group_b: Vec<String>,
}

impl Default for QueryFilter {
    fn default() -> Self {
        QueryFilter {
            group_a: ["refugee", "asylum-seeker", "migrant", "immigrant", "displaced"]
                .map(String::from)
                .to_vec(),
            group_b: ["syria", "syrian"].map(String::from).to_vec(),
        }
    }
}

fn normalize_term(term: &str) -> String {
    term.to_lowercase()
        .chars()
        .filter(|c| *c != '-' && *c != ' ')
        .collect()
}

impl QueryFilter {
    fn group_matches(group: &[String], tokens: &[String]) -> bool {
        let terms: Vec<String> = group.iter().map(|t| normalize_term(t)).collect();
        let hit = |candidate: &str| terms.iter().any(|t| t == candidate);
        for (i, tok) in tokens.iter().enumerate() {
            let norm = normalize_term(tok);
            if hit(&norm) {
                return true;
            }
            // Two-token spellings of a one-word term ("asylum seeker").
            if let Some(next) = tokens.get(i + 1) {
                let joined = format!("{norm}{}", normalize_term(next));
                if hit(&joined) {
                    return true;
                }
            }
        }
        false
    }

    /// True iff both term groups are satisfied over the document's tokens.
    pub fn matches(&self, doc: &Document) -> bool {
        self.matches_tokens(doc.tokens())
    }

    pub fn matches_tokens(&self, tokens: &[String]) -> bool {
        Self::group_matches(&self.group_a, tokens) && Self::group_matches(&self.group_b, tokens)
    }
}

/// Parse one line of the document input stream.
pub fn parse_record_line(line: &str) -> Result<Document> {
    let record: DocumentRecord = serde_json::from_str(line)
        .map_err(|e| Error::domain(format!("unparseable document record: {e}")))?;
    Ok(record.into())
}

/// Read all records from a line-delimited reader, yielding per-line results.
pub fn read_records(reader: impl BufRead) -> impl Iterator<Item = Result<Document>> {
    reader.lines().filter_map(|line| match line {
        Err(e) => Some(Err(Error::io("<record stream>", e))),
        Ok(l) if l.trim().is_empty() => None,
        Ok(l) => Some(parse_record_line(&l)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn doc_with(title: &str, body: &str) -> Document {
        Document::new("d1", "http://x", "o1", date(2016, 1, 1), title, body)
    }

    #[test]
    fn bucket_boundaries_follow_half_open_rule() {
        assert_eq!(bucket_outlet(-1.0).unwrap(), PartisanBucket::Left);
        assert_eq!(bucket_outlet(-0.6).unwrap(), PartisanBucket::CenterLeft);
        assert_eq!(bucket_outlet(-0.2).unwrap(), PartisanBucket::Center);
        assert_eq!(bucket_outlet(0.0).unwrap(), PartisanBucket::Center);
        assert_eq!(bucket_outlet(0.2).unwrap(), PartisanBucket::CenterRight);
        assert_eq!(bucket_outlet(0.6).unwrap(), PartisanBucket::Right);
        assert_eq!(bucket_outlet(1.0).unwrap(), PartisanBucket::Right);
    }

    #[test]
    fn bucket_rejects_out_of_range() {
        assert!(bucket_outlet(1.01).is_err());
        assert!(bucket_outlet(-1.2).is_err());
        assert!(bucket_outlet(f64::NAN).is_err());
    }

    #[test]
    fn period_assignment_matches_event_table() {
        assert_eq!(assign_period(date(2011, 5, 1)), Some(Period::P1));
        assert_eq!(assign_period(date(2015, 12, 15)), Some(Period::P2));
        assert_eq!(assign_period(date(2020, 1, 1)), Some(Period::P5));
        assert_eq!(assign_period(date(2011, 2, 28)), None);
        assert_eq!(assign_period(date(2011, 3, 1)), Some(Period::P1));
    }

    #[test]
    fn periods_are_disjoint_and_cover_the_timeline() {
        for w in Period::ALL.windows(2) {
            assert_eq!(w[0].end(), Some(w[1].start()));
        }
        assert_eq!(Period::P5.end(), None);
    }

    #[test]
    fn period_boundaries_are_right_exclusive() {
        // Last day before each event month vs first day of the event month.
        let cases = [
            ((2012, 6, 30), Period::P1, (2012, 7, 1), Period::P2),
            ((2015, 12, 31), Period::P2, (2016, 1, 1), Period::P3),
            ((2017, 6, 30), Period::P3, (2017, 7, 1), Period::P4),
            ((2019, 9, 30), Period::P4, (2019, 10, 1), Period::P5),
        ];
        for ((y1, m1, d1), before, (y2, m2, d2), after) in cases {
            assert_eq!(assign_period(date(y1, m1, d1)), Some(before));
            assert_eq!(assign_period(date(y2, m2, d2)), Some(after));
        }
    }

    #[test]
    fn query_requires_both_groups() {
        let q = QueryFilter::default();
        assert!(q.matches(&doc_with("Refugee crisis", "unrest in Syria")));
        assert!(!q.matches(&doc_with("Refugee crisis", "no location terms")));
        assert!(q.matches(&doc_with("Displaced families", "Syrian border towns")));
    }

    #[test]
    fn query_normalizes_asylum_seeker_spellings() {
        let q = QueryFilter::default();
        assert!(q.matches(&doc_with("An asylum-seeker from Syria", "")));
        assert!(q.matches(&doc_with("An asylumseeker from Syria", "")));
        assert!(q.matches(&doc_with("An asylum seeker from Syria", "")));
    }

    #[test]
    fn query_is_case_insensitive() {
        let q = QueryFilter::default();
        assert!(q.matches(&doc_with("REFUGEE", "SYRIA")));
    }

    #[test]
    fn outlet_registry_rejects_out_of_range_scores() {
        let csv = "outlet_id,name,partisanship\no1,Example,1.5\n";
        assert!(OutletRegistry::from_csv_reader(csv.as_bytes()).is_err());
    }

    #[test]
    fn outlet_registry_loads_and_buckets() {
        let csv = "outlet_id,name,partisanship\no1,Alpha,-0.8\no2,Beta,0.61\n";
        let reg = OutletRegistry::from_csv_reader(csv.as_bytes()).unwrap();
        assert_eq!(reg.get("o1").unwrap().bucket, PartisanBucket::Left);
        assert_eq!(reg.get("o2").unwrap().bucket, PartisanBucket::Right);
        assert!(reg.get("o3").is_none());
    }

    #[test]
    fn document_tokens_cover_title_and_body() {
        let d = doc_with("Alpha beta", "gamma delta");
        assert_eq!(d.tokens(), ["alpha", "beta", "gamma", "delta"]);
    }
}
