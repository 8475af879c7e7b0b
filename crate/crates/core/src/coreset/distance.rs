use crate::corpus::EmbeddingMatrix;
use crate::{Error, Result};

const LANES: usize = 8;

/// Squared Euclidean distance, accumulated in `f64`.
///
/// The summation order is fixed (eight interleaved partial sums, then the
/// remainder, then a left-to-right lane reduction), so the result does not
/// depend on how callers split work across threads.
#[inline]
pub fn squared_l2(a: &[f32], b: &[f32]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; LANES];
    let ca = a.chunks_exact(LANES);
    let cb = b.chunks_exact(LANES);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..LANES {
            let d = f64::from(x[l]) - f64::from(y[l]);
            acc[l] += d * d;
        }
    }
    let mut tail = 0.0f64;
    for (x, y) in ra.iter().zip(rb) {
        let d = f64::from(*x) - f64::from(*y);
        tail += d * d;
    }
    acc.iter().sum::<f64>() + tail
}

/// Euclidean distance between two vectors of equal dimension.
pub fn distance(a: &[f32], b: &[f32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::arg(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(squared_l2(a, b).sqrt())
}

/// Concatenate image and text embeddings row by row.
///
/// With `per_modality_normalize`, each modality's row is scaled to unit L2
/// norm first; all-zero rows stay zero. A missing modality can be passed as
/// [`EmbeddingMatrix::zeros`].
pub fn concat_embeddings(
    image: &EmbeddingMatrix,
    text: &EmbeddingMatrix,
    per_modality_normalize: bool,
) -> Result<EmbeddingMatrix> {
    if image.len() != text.len() {
        return Err(Error::data(format!(
            "row count mismatch: {} image rows vs {} text rows",
            image.len(),
            text.len()
        )));
    }
    if let Some(pos) = image.ids().iter().zip(text.ids()).position(|(a, b)| a != b) {
        return Err(Error::data(format!(
            "id mismatch at position {pos}: {} vs {}",
            image.ids()[pos],
            text.ids()[pos]
        )));
    }
    let dim = image.dim() + text.dim();
    let mut data = Vec::with_capacity(image.len() * dim);
    for (a, b) in image.rows().zip(text.rows()) {
        extend_row(&mut data, a, per_modality_normalize);
        extend_row(&mut data, b, per_modality_normalize);
    }
    EmbeddingMatrix::new(image.ids().to_vec(), dim, data)
}

/// Scale every row to unit L2 norm, leaving zero rows alone.
pub fn normalize_rows(m: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
    let mut data = Vec::with_capacity(m.data().len());
    for row in m.rows() {
        extend_row(&mut data, row, true);
    }
    EmbeddingMatrix::new(m.ids().to_vec(), m.dim(), data)
}

fn extend_row(out: &mut Vec<f32>, row: &[f32], normalize: bool) {
    let norm = if normalize {
        row.iter().map(|&v| f64::from(v) * f64::from(v)).sum::<f64>().sqrt()
    } else {
        0.0
    };
    if norm > 0.0 {
        out.extend(row.iter().map(|&v| (f64::from(v) / norm) as f32));
    } else {
        out.extend_from_slice(row);
    }
}
