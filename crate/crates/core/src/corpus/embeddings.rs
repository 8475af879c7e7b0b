use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufWriter, Read, Write};
use std::path::Path;

use super::{open, with_path};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"EMB1";

/// Dense row-major `n x d` matrix of per-instance feature vectors, one id per
/// row.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix {
    ids: Vec<String>,
    dim: usize,
    data: Vec<f32>,
}

impl EmbeddingMatrix {
    /// Validates id uniqueness, `data.len() == ids.len() * dim`, `dim > 0`
    /// and finiteness.
    pub fn new(ids: Vec<String>, dim: usize, data: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::data("embedding dimension must be > 0"));
        }
        if data.len() != ids.len() * dim {
            return Err(Error::data(format!(
                "expected {} x {dim} = {} values, got {}",
                ids.len(),
                ids.len() * dim,
                data.len()
            )));
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::data(format!("duplicate id {id}")));
            }
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!("row {}: non-finite value", pos / dim)));
        }
        Ok(Self { ids, dim, data })
    }

    /// Matrix from explicit rows. Row lengths must agree.
    pub fn from_rows(ids: Vec<String>, rows: &[Vec<f32>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::data(format!("row {i}: expected {dim} columns")));
        }
        if ids.len() != rows.len() {
            return Err(Error::data(format!(
                "{} ids for {} rows",
                ids.len(),
                rows.len()
            )));
        }
        Self::new(ids, dim, rows.concat())
    }

    /// All-zero matrix, used to stand in for a missing modality.
    pub fn zeros(ids: Vec<String>, dim: usize) -> Result<Self> {
        let data = vec![0.0; ids.len() * dim];
        Self::new(ids, dim, data)
    }

    /// Matrix with ids `"0"`, `"1"`, ...
    pub fn with_index_ids(dim: usize, data: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::data("embedding dimension must be > 0"));
        }
        let n = data.len() / dim;
        Self::new((0..n).map(|i| i.to_string()).collect(), dim, data)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.data.chunks_exact(self.dim)
    }
}

/// Parse the binary embedding payload plus its sidecar id list.
pub fn read_embeddings<R: Read, I: BufRead>(mut data: R, ids: I) -> Result<EmbeddingMatrix> {
    let mut header = [0u8; 12];
    data.read_exact(&mut header)
        .map_err(|_| Error::data("truncated header"))?;
    if &header[..4] != MAGIC {
        return Err(Error::data("bad magic: expected EMB1"));
    }
    let n = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let d = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    if d == 0 {
        return Err(Error::data("embedding dimension must be > 0"));
    }

    let ids: Vec<String> = ids
        .lines()
        .collect::<std::io::Result<_>>()
        .map_err(|e| Error::data(format!("ids file: {e}")))?;
    if ids.len() != n {
        return Err(Error::data(format!(
            "header declares n={n} but ids file has {} lines",
            ids.len()
        )));
    }

    let expected = n
        .checked_mul(d)
        .and_then(|v| v.checked_mul(4))
        .ok_or_else(|| Error::data("payload size overflows"))?;
    let mut payload = Vec::with_capacity(expected);
    data.take(expected as u64 + 1)
        .read_to_end(&mut payload)
        .map_err(|e| Error::data(format!("reading payload: {e}")))?;
    if payload.len() < expected {
        return Err(Error::data(format!(
            "truncated payload: expected {expected} bytes, got {}",
            payload.len()
        )));
    }
    if payload.len() > expected {
        return Err(Error::data("trailing bytes after payload"));
    }
    let values = payload
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    EmbeddingMatrix::new(ids, d, values)
}

pub fn load_embeddings(data_path: impl AsRef<Path>, ids_path: impl AsRef<Path>) -> Result<EmbeddingMatrix> {
    let data_path = data_path.as_ref();
    let ids_path = ids_path.as_ref();
    read_embeddings(open(data_path)?, open(ids_path)?).map_err(|e| with_path(data_path, e))
}

/// Write the binary payload and the id sidecar.
pub fn write_embeddings(m: &EmbeddingMatrix, data_path: impl AsRef<Path>, ids_path: impl AsRef<Path>) -> Result<()> {
    let data_path = data_path.as_ref();
    let ids_path = ids_path.as_ref();
    let mut out = BufWriter::new(File::create(data_path).map_err(|e| Error::io(data_path, e))?);
    encode_embeddings(m, &mut out).map_err(|e| Error::io(data_path, e))?;
    out.flush().map_err(|e| Error::io(data_path, e))?;

    let mut ids = BufWriter::new(File::create(ids_path).map_err(|e| Error::io(ids_path, e))?);
    for id in m.ids() {
        writeln!(ids, "{id}").map_err(|e| Error::io(ids_path, e))?;
    }
    ids.flush().map_err(|e| Error::io(ids_path, e))
}

pub fn encode_embeddings<W: Write>(m: &EmbeddingMatrix, mut out: W) -> std::io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&(m.len() as u32).to_le_bytes())?;
    out.write_all(&(m.dim() as u32).to_le_bytes())?;
    for v in m.data() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}
