use serde::Serialize;

use crate::{Error, Result};

/// Difference between the mean score over the full benchmark and the mean
/// over a subset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SubsetGap {
    pub full_mean: f64,
    pub subset_mean: f64,
    pub gap: f64,
}

pub fn subset_gap(scores: &[f64], subset: &[usize]) -> Result<SubsetGap> {
    if scores.is_empty() {
        return Err(Error::arg("score list is empty"));
    }
    if subset.is_empty() {
        return Err(Error::arg("subset is empty"));
    }
    let mut seen = vec![false; scores.len()];
    for &i in subset {
        if i >= scores.len() {
            return Err(Error::arg(format!(
                "subset index {i} out of range for {} scores",
                scores.len()
            )));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::arg(format!("subset index {i} repeated")));
        }
    }
    let full_mean = mean(scores.iter().copied());
    // A subset covering every index is summed in the same order as the full
    // set so the gap is exactly zero.
    let subset_mean = if subset.len() == scores.len() {
        full_mean
    } else {
        mean(subset.iter().map(|&i| scores[i]))
    };
    Ok(SubsetGap {
        full_mean,
        subset_mean,
        gap: (full_mean - subset_mean).abs(),
    })
}

fn mean(xs: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = xs.len() as f64;
    xs.sum::<f64>() / n
}
