//! Lite-subset selection by k-center greedy (farthest-first traversal).
//!
//! Points are rows of an [`EmbeddingMatrix`], usually the per-instance image
//! and text embeddings joined by [`concat_embeddings`]. The greedy picks a
//! seeded random first center, then repeatedly adds the point farthest from
//! the centers chosen so far. Its coverage radius is within a factor two of
//! the optimum, which [`brute_force_k_center`] computes exactly for small
//! inputs.

mod distance;
mod gap;
mod greedy;
mod oracle;
mod rng;

use serde::Serialize;

use crate::corpus::EmbeddingMatrix;

pub use distance::{concat_embeddings, distance, normalize_rows, squared_l2};
pub use gap::{subset_gap, SubsetGap};
pub use greedy::{k_center_greedy, k_center_greedy_with, GreedyOptions};
pub use oracle::{brute_force_k_center, coverage_radius, ORACLE_MAX_POINTS};
pub use rng::SplitMix64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    L2,
}

/// Chosen centers in selection order, with the radius they achieve.
#[derive(Clone, Debug, PartialEq)]
pub struct CoresetSelection {
    pub center_indices: Vec<usize>,
    pub coverage_radius: f64,
    pub k: usize,
    pub seed: u64,
    pub metric: Metric,
}

/// On-disk form of a selection, with ids resolved against the matrix.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct SelectionRecord {
    pub k: usize,
    pub seed: u64,
    pub metric: String,
    pub coverage_radius: f64,
    pub center_ids: Vec<String>,
    pub center_indices: Vec<usize>,
}

impl CoresetSelection {
    pub fn to_record(&self, e: &EmbeddingMatrix) -> SelectionRecord {
        SelectionRecord {
            k: self.k,
            seed: self.seed,
            metric: "l2".to_string(),
            coverage_radius: self.coverage_radius,
            center_ids: self
                .center_indices
                .iter()
                .map(|&i| e.ids()[i].clone())
                .collect(),
            center_indices: self.center_indices.clone(),
        }
    }
}
