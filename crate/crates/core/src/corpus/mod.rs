//! Data model and ingestion.
//!
//! Every loader has a `read_*` twin that works on an in-memory reader, so the
//! same parsing runs in tests and in the browser demo.

mod embeddings;
mod scores;
mod tokenize;

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde_json::Value;

use crate::{Error, Result};

pub use embeddings::{load_embeddings, read_embeddings, write_embeddings, EmbeddingMatrix};
pub use scores::{load_scales, load_scores, read_scales, read_scores, Scale, ScaleSpec, ScoreEntry, ScoreTable};
pub use tokenize::{simple_fold, tokenize_text};

/// Length of an image-token sequence.
pub const IMAGE_SEQUENCE_LEN: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TextDocument {
    pub id: String,
    pub text: String,
}

impl TextDocument {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
        }
    }
}

/// A sequence of discrete token ids, e.g. the tokens of one image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenSequence {
    pub id: String,
    pub tokens: Vec<u32>,
}

impl TokenSequence {
    pub fn new(id: impl Into<String>, tokens: Vec<u32>) -> Self {
        Self {
            id: id.into(),
            tokens,
        }
    }
}

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Iterate over the non-blank lines of a reader as `(line_number, line)`,
/// line numbers 1-based.
fn numbered_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let lineno = i + 1;
            match line {
                Ok(l) if l.trim().is_empty() => None,
                Ok(l) => Some(Ok((lineno, l))),
                Err(e) if e.kind() == std::io::ErrorKind::InvalidData => {
                    Some(Err(Error::data(format!("line {lineno}: invalid UTF-8"))))
                }
                Err(e) => Some(Err(Error::data(format!("line {lineno}: {e}")))),
            }
        })
}

fn parse_object(lineno: usize, line: &str) -> Result<serde_json::Map<String, Value>> {
    match serde_json::from_str::<Value>(line) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(Error::data(format!("line {lineno}: expected a JSON object"))),
        Err(e) => Err(Error::data(format!("line {lineno}: malformed JSON: {e}"))),
    }
}

fn string_field(lineno: usize, obj: &serde_json::Map<String, Value>, name: &str) -> Result<String> {
    match obj.get(name) {
        None => Err(Error::data(format!("line {lineno}: missing field {name}"))),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(Error::data(format!("line {lineno}: field {name} must be a string"))),
    }
}

fn check_id(lineno: usize, id: &str, seen: &mut HashSet<String>) -> Result<()> {
    if id.is_empty() {
        return Err(Error::data(format!("line {lineno}: empty id")));
    }
    if !seen.insert(id.to_string()) {
        return Err(Error::data(format!("line {lineno}: duplicate id {id}")));
    }
    Ok(())
}

/// Parse a line-delimited text corpus: one `{"id": ..., "text": ...}` object
/// per line. Blank lines are skipped.
pub fn read_text_corpus<R: BufRead>(reader: R) -> Result<Vec<TextDocument>> {
    let mut seen = HashSet::new();
    let mut docs = Vec::new();
    for line in numbered_lines(reader) {
        let (lineno, line) = line?;
        let obj = parse_object(lineno, &line)?;
        let id = string_field(lineno, &obj, "id")?;
        let text = string_field(lineno, &obj, "text")?;
        check_id(lineno, &id, &mut seen)?;
        docs.push(TextDocument { id, text });
    }
    Ok(docs)
}

pub fn load_text_corpus(path: impl AsRef<Path>) -> Result<Vec<TextDocument>> {
    let path = path.as_ref();
    read_text_corpus(open(path)?).map_err(|e| with_path(path, e))
}

/// Parse a line-delimited token corpus: one `{"id": ..., "tokens": [...]}`
/// object per line, every sequence exactly `expected_len` long.
pub fn read_token_corpus<R: BufRead>(reader: R, expected_len: usize) -> Result<Vec<TokenSequence>> {
    let mut seen = HashSet::new();
    let mut seqs = Vec::new();
    for line in numbered_lines(reader) {
        let (lineno, line) = line?;
        let obj = parse_object(lineno, &line)?;
        let id = string_field(lineno, &obj, "id")?;
        let raw = match obj.get("tokens") {
            None => return Err(Error::data(format!("line {lineno}: missing field tokens"))),
            Some(Value::Array(a)) => a,
            Some(_) => {
                return Err(Error::data(format!("line {lineno}: field tokens must be an array")))
            }
        };
        let mut tokens = Vec::with_capacity(raw.len());
        for v in raw {
            let t = v
                .as_u64()
                .and_then(|t| u32::try_from(t).ok())
                .ok_or_else(|| {
                    Error::data(format!(
                        "line {lineno}: id={id}: token {v} is not an integer in 0..2^32-1"
                    ))
                })?;
            tokens.push(t);
        }
        if tokens.len() != expected_len {
            return Err(Error::data(format!(
                "id={id}: length {}, expected {expected_len}",
                tokens.len()
            )));
        }
        check_id(lineno, &id, &mut seen)?;
        seqs.push(TokenSequence { id, tokens });
    }
    Ok(seqs)
}

pub fn load_token_corpus(path: impl AsRef<Path>, expected_len: usize) -> Result<Vec<TokenSequence>> {
    let path = path.as_ref();
    read_token_corpus(open(path)?, expected_len).map_err(|e| with_path(path, e))
}

pub(crate) fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Data(msg) => Error::Data(format!("{}: {msg}", path.display())),
        other => other,
    }
}
