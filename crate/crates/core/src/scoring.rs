//! Score normalisation, cross-dataset aggregation, and full-vs-lite
//! correlation.

use std::collections::BTreeMap;

use serde::Serialize;

pub use crate::corpus::{Scale, ScaleSpec, ScoreTable};
use crate::{Error, Result};

/// Map `raw` from `scale` onto 0..100, clamping values outside the declared
/// range.
pub fn normalize_score(raw: f64, scale: Scale) -> Result<f64> {
    if !(scale.max > scale.min) {
        return Err(Error::arg(format!(
            "invalid scale: need max > min, got min={} max={}",
            scale.min, scale.max
        )));
    }
    let v = 100.0 * (raw - scale.min) / (scale.max - scale.min);
    Ok(v.clamp(0.0, 100.0))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    Unweighted,
    InstanceWeighted,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateResult {
    pub per_model: BTreeMap<String, f64>,
    pub weighting: Weighting,
}

/// Average of each model's normalised dataset scores.
pub fn aggregate(scores: &ScoreTable, scales: &ScaleSpec, weighting: Weighting) -> Result<AggregateResult> {
    // model -> (weighted sum, total weight)
    let mut acc: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for (model, dataset, entry) in scores.iter() {
        let scale = scales
            .get(dataset)
            .ok_or_else(|| Error::data(format!("no scale configured for dataset {dataset}")))?;
        let norm = normalize_score(entry.score, scale)?;
        let weight = match weighting {
            Weighting::Unweighted => 1.0,
            Weighting::InstanceWeighted => entry.count.ok_or_else(|| {
                Error::data(format!(
                    "instance-weighted aggregation needs a count for ({model}, {dataset})"
                ))
            })? as f64,
        };
        let slot = acc.entry(model).or_insert((0.0, 0.0));
        slot.0 += weight * norm;
        slot.1 += weight;
    }
    let per_model = acc
        .into_iter()
        .map(|(m, (sum, w))| (m.to_string(), (sum / w).clamp(0.0, 100.0)))
        .collect();
    Ok(AggregateResult { per_model, weighting })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMethod {
    #[default]
    Pearson,
    Spearman,
}

impl CorrelationMethod {
    pub fn apply(self, x: &[f64], y: &[f64]) -> Result<f64> {
        match self {
            CorrelationMethod::Pearson => pearson(x, y),
            CorrelationMethod::Spearman => spearman(x, y),
        }
    }
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::arg(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::arg("undefined correlation: need at least 2 samples"));
    }
    Ok(())
}

/// Product-moment correlation.
///
/// Means and co-moments are accumulated in a single streaming pass
/// (Welford-style updates), which stays accurate when values share a large
/// offset.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let (mut mx, mut my) = (0.0f64, 0.0f64);
    let (mut sxx, mut syy, mut sxy) = (0.0f64, 0.0f64, 0.0f64);
    for (i, (&a, &b)) in x.iter().zip(y).enumerate() {
        let n = (i + 1) as f64;
        let dx = a - mx;
        let dy = b - my;
        mx += dx / n;
        my += dy / n;
        // Second factor uses the updated mean.
        sxx += dx * (a - mx);
        syy += dy * (b - my);
        sxy += dx * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::arg("undefined correlation: constant input"));
    }
    // sqrt of the product keeps r exactly ±1 for identical (or negated) inputs.
    let denom = match (sxx * syy).sqrt() {
        d if d.is_finite() && d > 0.0 => d,
        _ => sxx.sqrt() * syy.sqrt(),
    };
    Ok((sxy / denom).clamp(-1.0, 1.0))
}

/// Rank correlation: Pearson over average ranks (tied values share the mean
/// of their ranks).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

/// 1-based ranks, ties averaged.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && v[order[end]] == v[order[start]] {
            end += 1;
        }
        // Positions start..end hold ranks start+1..=end.
        let r = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = r;
        }
        start = end;
    }
    ranks
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DatasetCorrelation {
    /// `None` when the correlation is undefined; `reason` says why.
    pub r: Option<f64>,
    pub sample_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationResult {
    pub method: CorrelationMethod,
    pub per_dataset: BTreeMap<String, DatasetCorrelation>,
}

/// Per dataset, correlate the full-set and lite-set scores of the models
/// present in both tables (models in lexicographic order).
pub fn correlate_lite(full: &ScoreTable, lite: &ScoreTable, method: CorrelationMethod) -> CorrelationResult {
    let mut datasets = full.datasets();
    datasets.extend(lite.datasets());
    let per_dataset = datasets
        .into_iter()
        .map(|ds| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = full
                .dataset_column(ds)
                .filter_map(|(m, e)| lite.get(m, ds).map(|l| (e.score, l.score)))
                .unzip();
            let n = xs.len();
            let result = if n < 2 {
                DatasetCorrelation {
                    r: None,
                    sample_count: n,
                    reason: Some(format!("{n} shared model(s); need at least 2")),
                }
            } else {
                match method.apply(&xs, &ys) {
                    Ok(r) => DatasetCorrelation { r: Some(r), sample_count: n, reason: None },
                    Err(e) => DatasetCorrelation {
                        r: None,
                        sample_count: n,
                        reason: Some(e.to_string()),
                    },
                }
            };
            (ds.to_string(), result)
        })
        .collect();
    CorrelationResult { method, per_dataset }
}
