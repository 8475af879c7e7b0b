//! Binary index files.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! "NGI1" | version u16 | n u16 | freq_threshold u32 | entry count u64 | key kind u8
//! entry count x (key, count u64), sorted by key
//! aux count u64 | aux records, sorted
//! ```
//!
//! Key kinds: 0 = word tuple, 1 = hashed words, 2 = token-id tuple,
//! 3 = hashed token ids. Word keys are `n` length-prefixed (u32) UTF-8
//! strings, id keys `n` u32s, hashed keys one u64. For text indexes the aux
//! records are the meaningless tokens (length-prefixed UTF-8); for image
//! indexes they are the exact 32-token training sequences. Everything is
//! written in sorted order, so equal indexes produce byte-identical files.

use std::collections::BTreeSet;
use std::path::Path;

use super::image::{ImageNGramIndex, IMAGE_N};
use super::table::{CountTable, KeyMode, KeyRef};
use super::text::{TextKey, TextNGramIndex};
use crate::corpus::IMAGE_SEQUENCE_LEN;
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"NGI1";
pub const INDEX_VERSION: u16 = 1;

const KIND_WORDS: u8 = 0;
const KIND_WORDS_HASHED: u8 = 1;
const KIND_IDS: u8 = 2;
const KIND_IDS_HASHED: u8 = 3;

/// Either kind of index, as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub enum NGramIndex {
    Text(TextNGramIndex),
    Image(ImageNGramIndex),
}

impl NGramIndex {
    pub fn kind_name(&self) -> &'static str {
        match self {
            NGramIndex::Text(_) => "text",
            NGramIndex::Image(_) => "image",
        }
    }
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

fn header(out: &mut Vec<u8>, n: usize, freq_threshold: u64, entries: usize, kind: u8) -> Result<()> {
    let n = u16::try_from(n).map_err(|_| Error::arg(format!("n = {n} does not fit the index format")))?;
    let ft = u32::try_from(freq_threshold)
        .map_err(|_| Error::arg(format!("freq_threshold = {freq_threshold} does not fit the index format")))?;
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&INDEX_VERSION.to_le_bytes());
    out.extend_from_slice(&n.to_le_bytes());
    out.extend_from_slice(&ft.to_le_bytes());
    out.extend_from_slice(&(entries as u64).to_le_bytes());
    out.push(kind);
    Ok(())
}

pub fn encode_index(index: &NGramIndex) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    match index {
        NGramIndex::Text(t) => {
            let kind = match t.mode() {
                KeyMode::Exact => KIND_WORDS,
                KeyMode::Hashed => KIND_WORDS_HASHED,
            };
            let entries = t.entries();
            header(&mut out, t.n, t.freq_threshold, entries.len(), kind)?;
            for (k, c) in entries {
                match k {
                    TextKey::Words(words) => words.iter().for_each(|w| put_str(&mut out, w)),
                    TextKey::Hashed(h) => out.extend_from_slice(&h.to_le_bytes()),
                }
                out.extend_from_slice(&c.to_le_bytes());
            }
            out.extend_from_slice(&(t.meaningless_tokens.len() as u64).to_le_bytes());
            for tok in &t.meaningless_tokens {
                put_str(&mut out, tok);
            }
        }
        NGramIndex::Image(im) => {
            let kind = match im.mode() {
                KeyMode::Exact => KIND_IDS,
                KeyMode::Hashed => KIND_IDS_HASHED,
            };
            let entries = im.table.sorted();
            header(&mut out, im.n, 0, entries.len(), kind)?;
            for (k, c) in entries {
                match k {
                    KeyRef::Exact(ids) => ids.iter().for_each(|t| out.extend_from_slice(&t.to_le_bytes())),
                    KeyRef::Hashed(h) => out.extend_from_slice(&h.to_le_bytes()),
                }
                out.extend_from_slice(&c.to_le_bytes());
            }
            out.extend_from_slice(&(im.exact_sequences.len() as u64).to_le_bytes());
            for seq in &im.exact_sequences {
                seq.iter().for_each(|t| out.extend_from_slice(&t.to_le_bytes()));
            }
        }
    }
    Ok(out)
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.buf.len() < len {
            return Err(Error::data("truncated index"));
        }
        let (head, rest) = self.buf.split_at(len);
        self.buf = rest;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| Error::data("index contains invalid UTF-8"))
    }

    /// Element count, bounded by what the remaining bytes could hold.
    fn count(&mut self, min_record: usize) -> Result<usize> {
        let c = self.u64()?;
        if c > (self.buf.len() / min_record.max(1)) as u64 {
            return Err(Error::data("truncated index"));
        }
        Ok(c as usize)
    }
}

fn positive(c: u64) -> Result<u64> {
    if c == 0 {
        return Err(Error::data("index entry with zero count"));
    }
    Ok(c)
}

pub fn decode_index(bytes: &[u8]) -> Result<NGramIndex> {
    let mut r = Reader { buf: bytes };
    if r.take(4).map_err(|_| Error::data("bad magic: expected NGI1"))? != MAGIC {
        return Err(Error::data("bad magic: expected NGI1"));
    }
    let version = r.u16()?;
    if version != INDEX_VERSION {
        return Err(Error::data(format!("unsupported index version {version}")));
    }
    let n = r.u16()? as usize;
    let freq_threshold = u64::from(r.u32()?);
    let entries = r.u64()?;
    let kind = r.u8()?;
    if n == 0 {
        return Err(Error::data("index has n = 0"));
    }
    let entries = usize::try_from(entries).map_err(|_| Error::data("truncated index"))?;
    if entries > r.buf.len() / 16 {
        return Err(Error::data("truncated index"));
    }

    let index = match kind {
        KIND_WORDS | KIND_WORDS_HASHED => {
            if freq_threshold == 0 {
                return Err(Error::data("text index has freq_threshold = 0"));
            }
            let mode = if kind == KIND_WORDS { KeyMode::Exact } else { KeyMode::Hashed };
            let mut index = TextNGramIndex::empty(n, freq_threshold, mode);
            for _ in 0..entries {
                let fresh = if mode == KeyMode::Exact {
                    let key: Vec<String> = (0..n).map(|_| r.string()).collect::<Result<_>>()?;
                    let c = positive(r.u64()?)?;
                    index.insert_words(&key, c)
                } else {
                    let h = r.u64()?;
                    let c = positive(r.u64()?)?;
                    index.insert_hashed(h, c)
                };
                if !fresh {
                    return Err(Error::data("duplicate key in index"));
                }
            }
            let aux = r.count(4)?;
            index.meaningless_tokens = (0..aux).map(|_| r.string()).collect::<Result<BTreeSet<_>>>()?;
            NGramIndex::Text(index)
        }
        KIND_IDS | KIND_IDS_HASHED => {
            if n != IMAGE_N {
                return Err(Error::data(format!("image index has n = {n}, expected {IMAGE_N}")));
            }
            let mode = if kind == KIND_IDS { KeyMode::Exact } else { KeyMode::Hashed };
            let mut table = CountTable::new(mode);
            for _ in 0..entries {
                let fresh = if mode == KeyMode::Exact {
                    let key: Vec<u32> = (0..n).map(|_| r.u32()).collect::<Result<_>>()?;
                    let c = positive(r.u64()?)?;
                    table.insert_raw_exact(&key, c)
                } else {
                    let h = r.u64()?;
                    let c = positive(r.u64()?)?;
                    table.insert_raw_hashed(h, c)
                };
                if !fresh {
                    return Err(Error::data("duplicate key in index"));
                }
            }
            let aux = r.count(4 * IMAGE_SEQUENCE_LEN)?;
            let exact_sequences = (0..aux)
                .map(|_| (0..IMAGE_SEQUENCE_LEN).map(|_| r.u32()).collect::<Result<Vec<_>>>())
                .collect::<Result<BTreeSet<_>>>()?;
            NGramIndex::Image(ImageNGramIndex {
                n,
                table,
                exact_sequences,
            })
        }
        other => return Err(Error::data(format!("unknown key kind {other}"))),
    };
    if !r.buf.is_empty() {
        return Err(Error::data("trailing bytes after index"));
    }
    Ok(index)
}

pub fn save_index(index: &NGramIndex, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_index(index)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_index(path: impl AsRef<Path>) -> Result<NGramIndex> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_index(&bytes).map_err(|e| crate::corpus::with_path(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{TextDocument, TokenSequence};
    use crate::decontam::{build_image_index, build_text_index};
    use proptest::prelude::*;

    fn text_index(mode: KeyMode) -> TextNGramIndex {
        let docs: Vec<TextDocument> = (0..15)
            .map(|i| TextDocument::new(format!("d{i}"), format!("one two three four five {} six seven eight nine", i % 3)))
            .collect();
        build_text_index(&docs, 4, 3, mode).unwrap()
    }

    #[test]
    fn header_layout() {
        let bytes = encode_index(&NGramIndex::Text(text_index(KeyMode::Exact))).unwrap();
        assert_eq!(&bytes[..4], b"NGI1");
        assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), 1);
        assert_eq!(u16::from_le_bytes([bytes[6], bytes[7]]), 4);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 3);
    }

    #[test]
    fn text_round_trip() {
        for mode in [KeyMode::Exact, KeyMode::Hashed] {
            let idx = NGramIndex::Text(text_index(mode));
            let bytes = encode_index(&idx).unwrap();
            let back = decode_index(&bytes).unwrap();
            assert_eq!(back, idx);
            assert_eq!(encode_index(&back).unwrap(), bytes);
        }
    }

    #[test]
    fn image_round_trip() {
        let train: Vec<TokenSequence> = (0..4u32)
            .map(|i| TokenSequence::new(format!("i{i}"), (i * 3..i * 3 + 32).collect()))
            .collect();
        for mode in [KeyMode::Exact, KeyMode::Hashed] {
            let idx = NGramIndex::Image(build_image_index(&train, mode).unwrap());
            let bytes = encode_index(&idx).unwrap();
            assert_eq!(decode_index(&bytes).unwrap(), idx);
        }
    }

    #[test]
    fn corrupt_files() {
        let bytes = encode_index(&NGramIndex::Text(text_index(KeyMode::Exact))).unwrap();
        assert!(decode_index(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode_index(b"NGI2").is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_index(&extra).is_err());
        let mut bad_kind = bytes.clone();
        bad_kind[20] = 9;
        assert!(decode_index(&bad_kind).is_err());
    }

    proptest! {
        #[test]
        fn decoder_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
            let _ = decode_index(&bytes);
        }
    }
}
