use super::distance::squared_l2;
use super::{CoresetSelection, Metric};
use crate::corpus::EmbeddingMatrix;
use crate::{Error, Result};

/// Largest input the exhaustive solver accepts.
pub const ORACLE_MAX_POINTS: usize = 16;

/// Max over all points of the distance to the nearest center.
pub fn coverage_radius(e: &EmbeddingMatrix, centers: &[usize]) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::arg("center list is empty"));
    }
    if let Some(&bad) = centers.iter().find(|&&c| c >= e.len()) {
        return Err(Error::arg(format!(
            "center index {bad} out of range for n = {}",
            e.len()
        )));
    }
    Ok(coverage_radius_sq(e, centers).sqrt())
}

fn coverage_radius_sq(e: &EmbeddingMatrix, centers: &[usize]) -> f64 {
    e.rows()
        .map(|p| {
            centers
                .iter()
                .map(|&c| squared_l2(p, e.row(c)))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Exact k-center by enumerating every `k`-subset in lexicographic order.
/// Among subsets with the minimum radius the lexicographically smallest wins.
pub fn brute_force_k_center(e: &EmbeddingMatrix, k: usize) -> Result<CoresetSelection> {
    let n = e.len();
    if n > ORACLE_MAX_POINTS {
        return Err(Error::arg(format!("oracle limited to n ≤ {ORACLE_MAX_POINTS}")));
    }
    if n == 0 {
        return Err(Error::arg("cannot select from an empty matrix"));
    }
    if k == 0 || k > n {
        return Err(Error::arg(format!("k must be in 1..={n}, got {k}")));
    }

    let mut subset: Vec<usize> = (0..k).collect();
    let mut best = subset.clone();
    let mut best_sq = coverage_radius_sq(e, &subset);
    while next_combination(&mut subset, n) {
        let r = coverage_radius_sq(e, &subset);
        if r < best_sq {
            best_sq = r;
            best.clone_from(&subset);
        }
    }
    Ok(CoresetSelection {
        center_indices: best,
        coverage_radius: best_sq.sqrt(),
        k,
        seed: 0,
        metric: Metric::L2,
    })
}

/// Advance to the next `k`-combination of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f32]) -> EmbeddingMatrix {
        EmbeddingMatrix::with_index_ids(1, points.to_vec()).unwrap()
    }

    #[test]
    fn combinations_enumerate_binomial() {
        let mut c = vec![0, 1, 2];
        let mut count = 1;
        while next_combination(&mut c, 6) {
            count += 1;
        }
        assert_eq!(count, 20);
    }

    #[test]
    fn radius_examples() {
        let e = line(&[0.0, 1.0, 8.0, 9.0]);
        assert_eq!(coverage_radius(&e, &[0, 1, 2, 3]).unwrap(), 0.0);
        assert_eq!(coverage_radius(&e, &[0, 3]).unwrap(), 1.0);
        assert!(coverage_radius(&e, &[]).is_err());
        assert!(coverage_radius(&e, &[4]).is_err());
    }

    #[test]
    fn radius_monotone_in_centers() {
        let e = line(&[0.0, 2.0, 3.0, 7.0, 11.0]);
        let small = coverage_radius(&e, &[1]).unwrap();
        let big = coverage_radius(&e, &[1, 4]).unwrap();
        assert!(big <= small);
    }

    #[test]
    fn oracle_small_cases() {
        let e = line(&[0.0, 1.0, 8.0, 9.0]);
        let s = brute_force_k_center(&e, 2).unwrap();
        assert_eq!(s.coverage_radius, 1.0);
        // Six 2-subsets; {0,2} is the first reaching radius 1.
        assert_eq!(s.center_indices, [0, 2]);
        assert_eq!(brute_force_k_center(&e, 4).unwrap().coverage_radius, 0.0);
    }

    #[test]
    fn oracle_guard() {
        let e = line(&[0.0; 17]);
        let err = brute_force_k_center(&e, 2).unwrap_err().to_string();
        assert_eq!(err, "oracle limited to n ≤ 16");
    }
}
