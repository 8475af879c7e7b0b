use rayon::prelude::*;

use super::distance::squared_l2;
use super::rng::SplitMix64;
use super::{CoresetSelection, Metric};
use crate::corpus::EmbeddingMatrix;
use crate::{Error, Result};

/// Points per parallel work item in the min-distance sweep.
const CHUNK: usize = 2048;

/// Knobs for [`k_center_greedy_with`].
#[derive(Clone, Debug, Default)]
pub struct GreedyOptions {
    pub seed: u64,
    /// Use this index as the first center instead of drawing one from `seed`.
    pub first_center: Option<usize>,
    /// Worker threads for the sweep. `None` runs on the ambient rayon pool,
    /// `Some(1)` runs inline on the calling thread.
    pub threads: Option<usize>,
}

/// Farthest-first traversal with a seeded random first center.
pub fn k_center_greedy(e: &EmbeddingMatrix, k: usize, seed: u64) -> Result<CoresetSelection> {
    k_center_greedy_with(
        e,
        k,
        &GreedyOptions {
            seed,
            ..Default::default()
        },
    )
}

pub fn k_center_greedy_with(e: &EmbeddingMatrix, k: usize, opts: &GreedyOptions) -> Result<CoresetSelection> {
    let n = e.len();
    if n == 0 {
        return Err(Error::arg("cannot select from an empty matrix"));
    }
    if k == 0 {
        return Err(Error::arg("k must be ≥ 1"));
    }
    if k > n {
        return Err(Error::arg(format!("k = {k} exceeds the number of points n = {n}")));
    }
    let first = match opts.first_center {
        Some(i) if i >= n => {
            return Err(Error::arg(format!("first center {i} out of range for n = {n}")))
        }
        Some(i) => i,
        None => SplitMix64::new(opts.seed).next_below(n as u64) as usize,
    };

    let run = || farthest_first(e, k, first);
    let (centers, radius_sq) = match opts.threads {
        Some(1) => run_sequential(e, k, first),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|err| Error::arg(format!("thread pool: {err}")))?
            .install(run),
        None => run(),
    };

    Ok(CoresetSelection {
        center_indices: centers,
        coverage_radius: radius_sq.sqrt(),
        k,
        seed: opts.seed,
        metric: Metric::L2,
    })
}

/// Candidate for the next center: larger distance wins, equal distances go to
/// the lower index. The rule is associative and commutative, so any reduction
/// tree gives the same answer.
#[derive(Clone, Copy, Debug)]
struct Farthest {
    dist_sq: f64,
    index: usize,
}

impl Farthest {
    const NONE: Farthest = Farthest {
        dist_sq: f64::NEG_INFINITY,
        index: usize::MAX,
    };

    #[inline]
    fn better(self, other: Farthest) -> Farthest {
        if other.dist_sq > self.dist_sq || (other.dist_sq == self.dist_sq && other.index < self.index) {
            other
        } else {
            self
        }
    }
}

/// Fold the newest center into `min_sq` for one block of points and report the
/// farthest unselected point in the block.
#[inline]
fn sweep_block(
    e: &EmbeddingMatrix,
    center: &[f32],
    offset: usize,
    min_sq: &mut [f64],
    selected: &[bool],
) -> Farthest {
    let mut best = Farthest::NONE;
    for (j, (m, &sel)) in min_sq.iter_mut().zip(selected).enumerate() {
        let i = offset + j;
        if sel {
            *m = 0.0;
            continue;
        }
        let d = squared_l2(e.row(i), center);
        if d < *m {
            *m = d;
        }
        best = best.better(Farthest { dist_sq: *m, index: i });
    }
    best
}

fn farthest_first(e: &EmbeddingMatrix, k: usize, first: usize) -> (Vec<usize>, f64) {
    let n = e.len();
    let mut min_sq = vec![f64::INFINITY; n];
    let mut selected = vec![false; n];
    let mut centers = Vec::with_capacity(k);
    let mut next = first;
    loop {
        centers.push(next);
        selected[next] = true;
        let center = e.row(next);
        let best = min_sq
            .par_chunks_mut(CHUNK)
            .zip(selected.par_chunks(CHUNK))
            .enumerate()
            .map(|(c, (m, s))| sweep_block(e, center, c * CHUNK, m, s))
            .reduce(|| Farthest::NONE, Farthest::better);
        if centers.len() == k || best.index == usize::MAX {
            return (centers, best.dist_sq.max(0.0));
        }
        next = best.index;
    }
}

fn run_sequential(e: &EmbeddingMatrix, k: usize, first: usize) -> (Vec<usize>, f64) {
    let n = e.len();
    let mut min_sq = vec![f64::INFINITY; n];
    let mut selected = vec![false; n];
    let mut centers = Vec::with_capacity(k);
    let mut next = first;
    loop {
        centers.push(next);
        selected[next] = true;
        let best = sweep_block(e, e.row(next), 0, &mut min_sq, &selected);
        if centers.len() == k || best.index == usize::MAX {
            return (centers, best.dist_sq.max(0.0));
        }
        next = best.index;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f32]) -> EmbeddingMatrix {
        EmbeddingMatrix::with_index_ids(1, points.to_vec()).unwrap()
    }

    fn forced(first: usize) -> GreedyOptions {
        GreedyOptions {
            first_center: Some(first),
            ..Default::default()
        }
    }

    #[test]
    fn exhaustive_selection_has_zero_radius() {
        let e = line(&[0.0, 5.0, 2.0]);
        let s = k_center_greedy(&e, 3, 9).unwrap();
        let mut idx = s.center_indices.clone();
        idx.sort();
        assert_eq!(idx, [0, 1, 2]);
        assert_eq!(s.coverage_radius, 0.0);
    }

    #[test]
    fn single_center_radius() {
        let s = k_center_greedy_with(&line(&[0.0, 3.0, 10.0]), 1, &forced(0)).unwrap();
        assert_eq!(s.center_indices, [0]);
        assert_eq!(s.coverage_radius, 10.0);
    }

    #[test]
    fn two_clusters() {
        let s = k_center_greedy_with(&line(&[0.0, 1.0, 8.0, 9.0]), 2, &forced(0)).unwrap();
        assert_eq!(s.center_indices, [0, 3]);
        assert_eq!(s.coverage_radius, 1.0);
    }

    #[test]
    fn tie_goes_to_lower_index() {
        // Points 0 and 2 are both at distance 1 from the center at index 1.
        let s = k_center_greedy_with(&line(&[-1.0, 0.0, 1.0]), 2, &forced(1)).unwrap();
        assert_eq!(s.center_indices, [1, 0]);
        let e = EmbeddingMatrix::with_index_ids(2, vec![0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, -1.0]).unwrap();
        let s = k_center_greedy_with(&e, 2, &forced(0)).unwrap();
        assert_eq!(s.center_indices, [0, 1]);
    }

    #[test]
    fn duplicates_fill_with_unselected_points() {
        let s = k_center_greedy_with(&line(&[2.0, 2.0, 2.0]), 3, &forced(1)).unwrap();
        assert_eq!(s.center_indices, [1, 0, 2]);
        assert_eq!(s.coverage_radius, 0.0);
    }

    #[test]
    fn argument_errors() {
        let e = line(&[0.0, 1.0]);
        assert!(k_center_greedy(&e, 0, 0).is_err());
        assert!(k_center_greedy(&e, 3, 0).is_err());
        let empty = EmbeddingMatrix::with_index_ids(1, vec![]).unwrap();
        assert!(k_center_greedy(&empty, 1, 0).is_err());
        assert!(k_center_greedy_with(&e, 1, &forced(2)).is_err());
    }

    #[test]
    fn first_center_comes_from_seed() {
        let e = line(&(0..100).map(|i| i as f32).collect::<Vec<_>>());
        for seed in [0u64, 1, 2, 99] {
            let expect = SplitMix64::new(seed).next_below(100) as usize;
            assert_eq!(k_center_greedy(&e, 1, seed).unwrap().center_indices[0], expect);
        }
    }

    #[test]
    fn pool_sizes_agree() {
        let data: Vec<f32> = (0..3 * 5000).map(|i| ((i * 7919) % 1000) as f32 / 10.0).collect();
        let e = EmbeddingMatrix::with_index_ids(3, data).unwrap();
        let base = k_center_greedy_with(&e, 40, &GreedyOptions { seed: 5, threads: Some(1), ..Default::default() }).unwrap();
        for t in [2, 3, 8] {
            let s = k_center_greedy_with(&e, 40, &GreedyOptions { seed: 5, threads: Some(t), ..Default::default() }).unwrap();
            assert_eq!(s, base);
        }
        let ambient = k_center_greedy(&e, 40, 5).unwrap();
        assert_eq!(ambient, base);
    }
}
