//! Monthly metric series per partisan bucket (with three-month moving
//! average and Akima gap interpolation), per-period summaries, and
//! ingestion of externally produced offensive-speech scores.

mod akima;
mod scores;

pub use akima::{interpolate_gaps, AkimaSpline};
pub use scores::{
    ingest_scores, offensive_baseline, ExternalScoreRecord, LabelScores, OffensiveLexicon,
    ScoreIngest,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::corpus::{assign_period, CorpusStore, PartisanBucket, Period};
use crate::{Error, Result};

/// Calendar month, the resolution of all series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Self {
        assert!((1..=12).contains(&month), "month out of range: {month}");
        YearMonth { year, month }
    }

    pub fn from_date(date: NaiveDate) -> Self {
        YearMonth::new(date.year(), date.month())
    }

    /// Months since year zero; consecutive months differ by one.
    pub fn index(&self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    pub fn from_index(index: i64) -> Self {
        YearMonth {
            year: index.div_euclid(12) as i32,
            month: (index.rem_euclid(12) + 1) as u32,
        }
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (y, m) = s
            .split_once('-')
            .ok_or_else(|| Error::domain(format!("bad year-month: {s}")))?;
        let year: i32 = y.parse().map_err(|_| Error::domain(format!("bad year: {s}")))?;
        let month: u32 = m.parse().map_err(|_| Error::domain(format!("bad month: {s}")))?;
        if !(1..=12).contains(&month) {
            return Err(Error::domain(format!("month out of range: {s}")));
        }
        Ok(YearMonth { year, month })
    }
}

impl Serialize for YearMonth {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for YearMonth {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Metrics a monthly series can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Articles per month.
    Count,
    /// Mean compound sentiment per month.
    SentimentCompound,
    /// Mean offensive-speech score per month.
    Offensive,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Count => "count",
            Metric::SentimentCompound => "sentiment_compound",
            Metric::Offensive => "offensive",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "count" => Ok(Metric::Count),
            "sentiment_compound" => Ok(Metric::SentimentCompound),
            "offensive" => Ok(Metric::Offensive),
            other => Err(Error::config(format!("unknown metric: {other}"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One metric's monthly values for one bucket. `values[i]` belongs to
/// month `start + i`; `None` is a gap (a month with no observations).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthlySeries {
    pub metric: Metric,
    pub bucket: PartisanBucket,
    pub start: YearMonth,
    pub values: Vec<Option<f64>>,
    /// Per-point flag: true where the value was filled by interpolation.
    pub interpolated: Vec<bool>,
    /// Centered moving-average window, once smoothing has been applied.
    /// Endpoints use the partial window that fits.
    pub smoothing_window: Option<usize>,
}

impl MonthlySeries {
    pub fn new(
        metric: Metric,
        bucket: PartisanBucket,
        start: YearMonth,
        values: Vec<Option<f64>>,
    ) -> Self {
        let n = values.len();
        MonthlySeries {
            metric,
            bucket,
            start,
            values,
            interpolated: vec![false; n],
            smoothing_window: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn month(&self, i: usize) -> YearMonth {
        YearMonth::from_index(self.start.index() + i as i64)
    }

    pub fn points(&self) -> impl Iterator<Item = (YearMonth, Option<f64>)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (self.month(i), *v))
    }
}

/// Aggregate per-document values into one series per bucket.
///
/// All buckets share the month axis spanning the store's first to last
/// published month. `count` needs no value table; the other metrics
/// average the supplied per-document values and it is a configuration
/// error to omit them. Months without observations are gaps.
pub fn monthly_aggregate(
    store: &CorpusStore,
    metric: Metric,
    values: Option<&BTreeMap<String, f64>>,
) -> Result<Vec<MonthlySeries>> {
    if metric != Metric::Count && values.is_none() {
        return Err(Error::config(format!(
            "metric {metric} requested without its per-document value table"
        )));
    }

    let months: Vec<i64> = store
        .documents()
        .map(|d| YearMonth::from_date(d.published).index())
        .collect();
    let (Some(&first), Some(&last)) = (months.iter().min(), months.iter().max()) else {
        return Ok(PartisanBucket::ALL
            .iter()
            .map(|b| MonthlySeries::new(metric, *b, YearMonth::new(0, 1), Vec::new()))
            .collect());
    };
    let n = (last - first + 1) as usize;
    let start = YearMonth::from_index(first);

    let mut sums: BTreeMap<PartisanBucket, Vec<f64>> = BTreeMap::new();
    let mut counts: BTreeMap<PartisanBucket, Vec<u64>> = BTreeMap::new();
    for b in PartisanBucket::ALL {
        sums.insert(b, vec![0.0; n]);
        counts.insert(b, vec![0; n]);
    }

    for doc in store.documents() {
        let bucket = store.bucket_of(doc);
        let slot = (YearMonth::from_date(doc.published).index() - first) as usize;
        match metric {
            Metric::Count => {
                counts.get_mut(&bucket).unwrap()[slot] += 1;
            }
            _ => {
                if let Some(v) = values.unwrap().get(&doc.id) {
                    sums.get_mut(&bucket).unwrap()[slot] += v;
                    counts.get_mut(&bucket).unwrap()[slot] += 1;
                }
            }
        }
    }

    Ok(PartisanBucket::ALL
        .iter()
        .map(|bucket| {
            let c = &counts[bucket];
            let s = &sums[bucket];
            let values: Vec<Option<f64>> = (0..n)
                .map(|i| {
                    if c[i] == 0 {
                        None
                    } else if metric == Metric::Count {
                        Some(c[i] as f64)
                    } else {
                        Some(s[i] / c[i] as f64)
                    }
                })
                .collect();
            MonthlySeries::new(metric, *bucket, start, values)
        })
        .collect())
}

/// Fill interior gaps with Akima's method (linear fallback below five
/// known points, reported as a warning). Known points are never changed;
/// leading and trailing gaps stay gaps.
pub fn akima_interpolate(series: &MonthlySeries) -> Result<(MonthlySeries, Vec<String>)> {
    let known: Vec<(usize, f64)> = series
        .values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|val| (i, val)))
        .collect();
    if known.is_empty() {
        if series.values.is_empty() {
            return Err(Error::domain("cannot interpolate an empty series"));
        }
        return Err(Error::domain(
            "all points are gaps; nothing to interpolate from",
        ));
    }

    let first = known.first().unwrap().0;
    let last = known.last().unwrap().0;
    let targets: Vec<usize> = (first..=last)
        .filter(|i| series.values[*i].is_none())
        .collect();

    let mut out = series.clone();
    let mut warnings = Vec::new();
    if !targets.is_empty() {
        let kx: Vec<f64> = known.iter().map(|(i, _)| *i as f64).collect();
        let ky: Vec<f64> = known.iter().map(|(_, v)| *v).collect();
        let tx: Vec<f64> = targets.iter().map(|i| *i as f64).collect();
        let filled = interpolate_gaps(&kx, &ky, &tx, &mut warnings)?;
        for (slot, value) in targets.iter().zip(filled) {
            out.values[*slot] = Some(value);
            out.interpolated[*slot] = true;
        }
    }
    Ok((out, warnings))
}

/// Centered moving average with an odd window. Gap points stay gaps;
/// points near series edges (or next to remaining gaps) average over the
/// window positions that carry values.
pub fn moving_average(series: &MonthlySeries, window: usize) -> Result<MonthlySeries> {
    if window < 1 || window % 2 == 0 {
        return Err(Error::config(format!(
            "moving-average window must be odd and positive, got {window}"
        )));
    }
    let half = window / 2;
    let n = series.values.len();
    let mut out = series.clone();
    out.smoothing_window = Some(window);
    for i in 0..n {
        if series.values[i].is_none() {
            continue;
        }
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(n - 1);
        let mut sum = 0.0;
        let mut count = 0u32;
        for v in series.values[lo..=hi].iter().flatten() {
            sum += v;
            count += 1;
        }
        out.values[i] = Some(sum / count as f64);
    }
    Ok(out)
}

/// Statistics of one metric over one (period, bucket) cell, computed
/// from raw per-document values so the numbers do not depend on
/// smoothing choices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodSummary {
    pub period: Period,
    pub bucket: PartisanBucket,
    pub metric: String,
    pub summary: MetricSummary,
}

/// Summarize per-document values over the five periods and five buckets
/// (25 cells, zero-count cells included). Documents published before the
/// timeline starts are skipped.
pub fn period_summary(
    store: &CorpusStore,
    metric: &str,
    values: &BTreeMap<String, f64>,
) -> Vec<PeriodSummary> {
    let mut cells: BTreeMap<(Period, PartisanBucket), Vec<f64>> = BTreeMap::new();
    for period in Period::ALL {
        for bucket in PartisanBucket::ALL {
            cells.insert((period, bucket), Vec::new());
        }
    }
    for doc in store.documents() {
        let Some(period) = assign_period(doc.published) else {
            continue;
        };
        let Some(v) = values.get(&doc.id) else {
            continue;
        };
        cells
            .get_mut(&(period, store.bucket_of(doc)))
            .unwrap()
            .push(*v);
    }
    cells
        .into_iter()
        .map(|((period, bucket), vals)| {
            let count = vals.len() as u64;
            let summary = if vals.is_empty() {
                MetricSummary {
                    mean: None,
                    min: None,
                    max: None,
                    count,
                }
            } else {
                let sum: f64 = vals.iter().sum();
                MetricSummary {
                    mean: Some(sum / count as f64),
                    min: vals.iter().copied().reduce(f64::min),
                    max: vals.iter().copied().reduce(f64::max),
                    count,
                }
            };
            PeriodSummary {
                period,
                bucket,
                metric: metric.to_string(),
                summary,
            }
        })
        .collect()
}

/// Write the plot-ready rows `metric,bucket,month,value,smoothed,interpolated_flag`
/// for one metric. `interpolated` and `smoothed` must be the same series
/// before and after `moving_average`.
pub fn write_series_csv(
    w: &mut impl std::io::Write,
    interpolated: &[MonthlySeries],
    smoothed: &[MonthlySeries],
) -> std::io::Result<()> {
    writeln!(w, "metric,bucket,month,value,smoothed,interpolated_flag")?;
    for (series, smooth) in interpolated.iter().zip(smoothed) {
        for (i, (month, value)) in series.points().enumerate() {
            let value_s = value.map(|v| v.to_string()).unwrap_or_default();
            let smooth_s = smooth.values[i].map(|v| v.to_string()).unwrap_or_default();
            let flag = if series.interpolated[i] { 1 } else { 0 };
            writeln!(
                w,
                "{},{},{},{},{},{}",
                series.metric, series.bucket, month, value_s, smooth_s, flag
            )?;
        }
    }
    Ok(())
}
