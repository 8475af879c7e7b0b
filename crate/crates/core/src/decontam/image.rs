use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::table::{CountTable, KeyMode};
use super::{categorize, InstanceOverlap, OverlapReport, ScanParams};
use crate::corpus::{TokenSequence, IMAGE_SEQUENCE_LEN};
use crate::{Error, Result};

/// Window length over image tokens.
pub const IMAGE_N: usize = 8;

/// Stride-1 windows per image: 32 - 8 + 1.
pub const WINDOWS_PER_IMAGE: usize = IMAGE_SEQUENCE_LEN - IMAGE_N + 1;

/// 8-gram counts over training image-token sequences, plus the full sequences
/// for exact-duplicate detection.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageNGramIndex {
    pub n: usize,
    pub table: CountTable,
    pub exact_sequences: BTreeSet<Vec<u32>>,
}

impl ImageNGramIndex {
    pub fn empty(mode: KeyMode) -> Self {
        Self {
            n: IMAGE_N,
            table: CountTable::new(mode),
            exact_sequences: BTreeSet::new(),
        }
    }

    pub fn mode(&self) -> KeyMode {
        self.table.mode()
    }
}

fn check_len(seq: &TokenSequence) -> Result<()> {
    if seq.tokens.len() != IMAGE_SEQUENCE_LEN {
        return Err(Error::data(format!(
            "id={}: length {}, expected {IMAGE_SEQUENCE_LEN}",
            seq.id,
            seq.tokens.len()
        )));
    }
    Ok(())
}

pub fn build_image_index(train: &[TokenSequence], mode: KeyMode) -> Result<ImageNGramIndex> {
    train.iter().try_for_each(check_len)?;
    let table = train
        .par_iter()
        .fold(
            || CountTable::new(mode),
            |mut t, seq| {
                for w in seq.tokens.windows(IMAGE_N) {
                    t.add(w, 1);
                }
                t
            },
        )
        .reduce(|| CountTable::new(mode), CountTable::merge);
    let exact_sequences = train.iter().map(|s| s.tokens.clone()).collect();
    Ok(ImageNGramIndex {
        n: IMAGE_N,
        table,
        exact_sequences,
    })
}

/// One shared 8-token window means roughly a quarter of the image overlaps
/// (8 of 32 tokens); a full-sequence match is a duplicate image.
pub fn scan_image(bench: &[TokenSequence], index: &ImageNGramIndex) -> Result<OverlapReport> {
    bench.iter().try_for_each(check_len)?;
    let per_instance: BTreeMap<String, InstanceOverlap> = bench
        .par_iter()
        .map(|seq| {
            let matched = seq
                .tokens
                .windows(index.n)
                .filter(|w| index.table.count(w) > 0)
                .count();
            let exact_image = index.exact_sequences.contains(&seq.tokens);
            let image_hit = matched > 0;
            let flags = InstanceOverlap {
                text_hit: false,
                image_hit,
                exact_image,
                category: categorize(false, image_hit, exact_image).expect("exact implies hit"),
                matched_windows: matched,
            };
            (seq.id.clone(), flags)
        })
        .collect();
    Ok(OverlapReport::from_instances(
        per_instance,
        ScanParams::Image {
            n: index.n,
            key_mode: index.mode(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decontam::ContaminationCategory;

    fn seq(id: &str, start: u32) -> TokenSequence {
        TokenSequence::new(id, (start..start + 32).collect())
    }

    #[test]
    fn one_image_has_25_windows() {
        let idx = build_image_index(&[seq("a", 0)], KeyMode::Exact).unwrap();
        assert_eq!(idx.table.len(), 25);
        assert_eq!(WINDOWS_PER_IMAGE, 25);
    }

    #[test]
    fn identical_images_double_counts() {
        let idx = build_image_index(&[seq("a", 0), seq("b", 0)], KeyMode::Exact).unwrap();
        assert_eq!(idx.table.len(), 25);
        for w in seq("a", 0).tokens.windows(8) {
            assert_eq!(idx.table.count(w), 2);
        }
        assert_eq!(idx.exact_sequences.len(), 1);
    }

    #[test]
    fn empty_corpus() {
        let idx = build_image_index(&[], KeyMode::Exact).unwrap();
        assert!(idx.table.is_empty());
        assert!(idx.exact_sequences.is_empty());
    }

    #[test]
    fn scan_cases() {
        let idx = build_image_index(&[seq("t", 0)], KeyMode::Exact).unwrap();
        // Shares tokens 0..8 with training in one window only.
        let mut one = seq("one", 1000);
        one.tokens[..8].copy_from_slice(&[0, 1, 2, 3, 4, 5, 6, 7]);
        let bench = vec![seq("dup", 0), seq("far", 5000), one];
        let r = scan_image(&bench, &idx).unwrap();

        let dup = &r.per_instance["dup"];
        assert!(dup.exact_image && dup.image_hit);
        assert_eq!(dup.matched_windows, 25);
        assert_eq!(dup.category, ContaminationCategory::DuplicateImage);

        assert!(!r.per_instance["far"].image_hit);
        assert_eq!(r.per_instance["far"].category, ContaminationCategory::Clean);

        let one = &r.per_instance["one"];
        assert!(one.image_hit && !one.exact_image);
        assert_eq!(one.matched_windows, 1);
        assert_eq!(one.category, ContaminationCategory::SimilarImage);
        assert_eq!((IMAGE_N as f64) / (IMAGE_SEQUENCE_LEN as f64), 0.25);

        assert!((r.image_overlap_pct - 200.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn wrong_length_rejected() {
        let bad = TokenSequence::new("img7", vec![0; 31]);
        let err = build_image_index(&[bad.clone()], KeyMode::Exact).unwrap_err();
        assert_eq!(err.to_string(), "id=img7: length 31, expected 32");
        let idx = ImageNGramIndex::empty(KeyMode::Exact);
        assert!(scan_image(&[bad], &idx).is_err());
    }
}
