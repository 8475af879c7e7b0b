use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{open, with_path};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreEntry {
    pub score: f64,
    /// Number of benchmark instances behind the score, when known.
    pub count: Option<u64>,
}

/// Recorded raw scores keyed by `(model, dataset)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScoreTable {
    entries: BTreeMap<(String, String), ScoreEntry>,
}

impl ScoreTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        model: impl Into<String>,
        dataset: impl Into<String>,
        score: f64,
        count: Option<u64>,
    ) -> Result<()> {
        let key = (model.into(), dataset.into());
        if !score.is_finite() {
            return Err(Error::data(format!(
                "non-finite score for ({}, {})",
                key.0, key.1
            )));
        }
        if count == Some(0) {
            return Err(Error::data(format!(
                "instance count for ({}, {}) must be positive",
                key.0, key.1
            )));
        }
        if self.entries.contains_key(&key) {
            return Err(Error::data(format!("duplicate ({}, {})", key.0, key.1)));
        }
        self.entries.insert(key, ScoreEntry { score, count });
        Ok(())
    }

    pub fn get(&self, model: &str, dataset: &str) -> Option<&ScoreEntry> {
        self.entries.get(&(model.to_string(), dataset.to_string()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in `(model, dataset)` order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, &ScoreEntry)> {
        self.entries
            .iter()
            .map(|((m, d), e)| (m.as_str(), d.as_str(), e))
    }

    pub fn models(&self) -> BTreeSet<&str> {
        self.entries.keys().map(|(m, _)| m.as_str()).collect()
    }

    pub fn datasets(&self) -> BTreeSet<&str> {
        self.entries.keys().map(|(_, d)| d.as_str()).collect()
    }

    /// `(model, entry)` pairs for one dataset, models in lexicographic order.
    pub fn dataset_column<'a>(&'a self, dataset: &'a str) -> impl Iterator<Item = (&'a str, &'a ScoreEntry)> + 'a {
        self.iter()
            .filter(move |(_, d, _)| *d == dataset)
            .map(|(m, _, e)| (m, e))
    }
}

/// Parse a score CSV with header `model,dataset,score[,count]`.
pub fn read_scores<R: Read>(reader: R) -> Result<ScoreTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::data(format!("header: {e}")))?
        .clone();
    let cols: Vec<&str> = header.iter().collect();
    let with_count = match cols.as_slice() {
        ["model", "dataset", "score"] => false,
        ["model", "dataset", "score", "count"] => true,
        [] => return Ok(ScoreTable::new()),
        _ => {
            return Err(Error::data(format!(
                "line 1: expected header model,dataset,score[,count], got {}",
                cols.join(",")
            )))
        }
    };

    let mut table = ScoreTable::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::data(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize| rec.get(i).unwrap_or("");
        let raw = field(2);
        let score: f64 = raw
            .parse()
            .map_err(|_| Error::data(format!("line {line}: unparseable score {raw:?}")))?;
        let count = if with_count && !field(3).is_empty() {
            let c = field(3);
            Some(c.parse::<u64>().ok().filter(|&c| c > 0).ok_or_else(|| {
                Error::data(format!("line {line}: count must be a positive integer, got {c:?}"))
            })?)
        } else {
            None
        };
        table
            .insert(field(0), field(1), score, count)
            .map_err(|e| Error::data(format!("line {line}: {e}")))?;
    }
    Ok(table)
}

pub fn load_scores(path: impl AsRef<Path>) -> Result<ScoreTable> {
    let path = path.as_ref();
    read_scores(open(path)?).map_err(|e| with_path(path, e))
}

/// Declared raw-score range of a dataset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScale")]
pub struct Scale {
    pub min: f64,
    pub max: f64,
}

#[derive(Deserialize)]
struct RawScale {
    min: f64,
    max: f64,
}

impl TryFrom<RawScale> for Scale {
    type Error = Error;

    fn try_from(r: RawScale) -> Result<Self> {
        Scale::new(r.min, r.max)
    }
}

impl Scale {
    pub const PERCENT: Scale = Scale { min: 0.0, max: 100.0 };

    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || max <= min {
            return Err(Error::data(format!("invalid scale: need max > min, got min={min} max={max}")));
        }
        Ok(Scale { min, max })
    }
}

/// Per-dataset score ranges.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScaleSpec {
    pub scales: BTreeMap<String, Scale>,
}

impl ScaleSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, dataset: impl Into<String>, scale: Scale) -> Self {
        self.scales.insert(dataset.into(), scale);
        self
    }

    pub fn get(&self, dataset: &str) -> Option<Scale> {
        self.scales.get(dataset).copied()
    }

    /// Fill in a `0..100` scale for every dataset of `table` that has no
    /// configured scale, provided all of its scores already lie in `0..=100`.
    /// A dataset with a score outside that range and no configured scale is
    /// an error: its scale cannot be guessed.
    pub fn with_percent_defaults(&self, table: &ScoreTable) -> Result<ScaleSpec> {
        let mut out = self.clone();
        for dataset in table.datasets() {
            if out.scales.contains_key(dataset) {
                continue;
            }
            if let Some((model, e)) = table
                .dataset_column(dataset)
                .find(|(_, e)| !(0.0..=100.0).contains(&e.score))
            {
                return Err(Error::data(format!(
                    "dataset {dataset}: no scale configured and score {} (model {model}) is outside 0..100",
                    e.score
                )));
            }
            out.scales.insert(dataset.to_string(), Scale::PERCENT);
        }
        Ok(out)
    }
}

/// Parse a scales config: `{"<dataset>": {"min": .., "max": ..}, ...}`.
pub fn read_scales<R: Read>(reader: R) -> Result<ScaleSpec> {
    serde_json::from_reader(reader).map_err(|e| Error::data(format!("scales: {e}")))
}

pub fn load_scales(path: impl AsRef<Path>) -> Result<ScaleSpec> {
    let path = path.as_ref();
    read_scales(open(path)?).map_err(|e| with_path(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_only() {
        assert!(read_scores("model,dataset,score\n".as_bytes()).unwrap().is_empty());
        assert!(read_scores("".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn two_rows() {
        let t = read_scores("model,dataset,score\nm1,ai2d,66.6\nm1,mme,1841.8\n".as_bytes()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("m1", "mme").unwrap().score, 1841.8);
        assert_eq!(t.get("m1", "ai2d").unwrap().count, None);
    }

    #[test]
    fn counts_parsed() {
        let t = read_scores("model,dataset,score,count\nm,a,1,300\nm,b,2,\n".as_bytes()).unwrap();
        assert_eq!(t.get("m", "a").unwrap().count, Some(300));
        assert_eq!(t.get("m", "b").unwrap().count, None);
        assert!(read_scores("model,dataset,score,count\nm,a,1,0\n".as_bytes()).is_err());
    }

    #[test]
    fn duplicate_pair() {
        let err = read_scores("model,dataset,score\nm1,ai2d,1\nm1,ai2d,2\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("duplicate (m1, ai2d)"), "{err}");
    }

    #[test]
    fn bad_score() {
        let err = read_scores("model,dataset,score\nm1,ai2d,abc\n".as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "line 2: unparseable score \"abc\"");
        assert!(read_scores("model,dataset,score\nm1,ai2d,NaN\n".as_bytes()).is_err());
        assert!(read_scores("model,dataset,score\nm1,ai2d,inf\n".as_bytes()).is_err());
    }

    #[test]
    fn wrong_header() {
        assert!(read_scores("a,b,c\n".as_bytes()).is_err());
    }

    #[test]
    fn scales_config() {
        let s = read_scales(r#"{"mme": {"min": 0, "max": 2800}}"#.as_bytes()).unwrap();
        assert_eq!(s.get("mme"), Some(Scale { min: 0.0, max: 2800.0 }));
        assert!(read_scales(r#"{"mme": {"min": 5, "max": 5}}"#.as_bytes()).is_err());
    }

    #[test]
    fn percent_defaults_refuse_large_scores() {
        let t = read_scores("model,dataset,score\nm1,ai2d,66.6\nm1,mme,1841.8\n".as_bytes()).unwrap();
        let err = ScaleSpec::new().with_percent_defaults(&t).unwrap_err().to_string();
        assert!(err.contains("mme"), "{err}");
        let ok = ScaleSpec::new()
            .with("mme", Scale::new(0.0, 2800.0).unwrap())
            .with_percent_defaults(&t)
            .unwrap();
        assert_eq!(ok.get("ai2d"), Some(Scale::PERCENT));
    }
}
