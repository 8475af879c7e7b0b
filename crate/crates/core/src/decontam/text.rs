use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use super::table::{add_exact, merge_maps, CountTable, GramKey, KeyMode};
use super::{categorize, InstanceOverlap, OverlapReport, ScanParams};
use crate::corpus::{tokenize_text, TextDocument};
use crate::hash::hash_words;
use crate::{Error, Result};

pub const DEFAULT_N: usize = 8;
pub const DEFAULT_FREQ_THRESHOLD: u64 = 10;
pub const DEFAULT_RATIO_THRESHOLD: f64 = 0.75;

/// Word n-gram counts over a training corpus.
///
/// An n-gram seen more than `freq_threshold` times is *meaningless*: it is
/// boilerplate rather than evidence of contamination, and is never reported
/// as a hit. Every token of a meaningless n-gram joins `meaningless_tokens`,
/// which drives [`overlap_ratio`].
///
/// Exact keys are stored as interned word ids; hashed keys are
/// [`hash_words`] of the tokens.
#[derive(Clone, Debug)]
pub struct TextNGramIndex {
    pub n: usize,
    pub freq_threshold: u64,
    pub meaningless_tokens: BTreeSet<String>,
    vocab: Vocab,
    table: CountTable,
}

/// A stored n-gram key, as returned by [`TextNGramIndex::entries`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TextKey<'a> {
    Words(Vec<&'a str>),
    Hashed(u64),
}

#[derive(Clone, Debug, Default)]
struct Vocab {
    ids: FxHashMap<String, u32>,
    words: Vec<String>,
}

impl Vocab {
    fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.ids.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.ids.insert(word.to_owned(), id);
        self.words.push(word.to_owned());
        id
    }

    fn get(&self, word: &str) -> Option<u32> {
        self.ids.get(word).copied()
    }
}

impl TextNGramIndex {
    pub(crate) fn empty(n: usize, freq_threshold: u64, mode: KeyMode) -> Self {
        TextNGramIndex {
            n,
            freq_threshold,
            meaningless_tokens: BTreeSet::new(),
            vocab: Vocab::default(),
            table: CountTable::new(mode),
        }
    }

    pub fn mode(&self) -> KeyMode {
        self.table.mode()
    }

    /// Number of distinct n-grams.
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn count(&self, gram: &[String]) -> u64 {
        match &self.table {
            CountTable::Exact(m) => {
                let ids: Option<Vec<u32>> = gram.iter().map(|w| self.vocab.get(w)).collect();
                ids.and_then(|ids| m.get(&ids[..]).copied()).unwrap_or(0)
            }
            CountTable::Hashed(m) => m.get(&hash_words(gram)).copied().unwrap_or(0),
        }
    }

    /// Count of every `n`-window of `tokens`, in order.
    pub fn window_counts(&self, tokens: &[String]) -> Vec<u64> {
        if tokens.len() < self.n {
            return Vec::new();
        }
        match &self.table {
            CountTable::Exact(m) => {
                let ids: Vec<Option<u32>> = tokens.iter().map(|w| self.vocab.get(w)).collect();
                let mut key = Vec::with_capacity(self.n);
                ids.windows(self.n)
                    .map(|w| {
                        key.clear();
                        for id in w {
                            match id {
                                Some(id) => key.push(*id),
                                None => return 0,
                            }
                        }
                        m.get(&key[..]).copied().unwrap_or(0)
                    })
                    .collect()
            }
            CountTable::Hashed(m) => tokens
                .windows(self.n)
                .map(|w| m.get(&hash_words(w)).copied().unwrap_or(0))
                .collect(),
        }
    }

    pub fn is_meaningless(&self, gram: &[String]) -> bool {
        self.count(gram) > self.freq_threshold
    }

    /// Number of distinct meaningless n-grams.
    pub fn meaningless_count(&self) -> usize {
        self.table.count_above(self.freq_threshold)
    }

    /// All `(key, count)` pairs in key order.
    pub fn entries(&self) -> Vec<(TextKey<'_>, u64)> {
        let mut v: Vec<_> = match &self.table {
            CountTable::Exact(m) => m
                .iter()
                .map(|(k, &c)| {
                    let words = k.as_slice().iter().map(|&id| self.vocab.words[id as usize].as_str()).collect();
                    (TextKey::Words(words), c)
                })
                .collect(),
            CountTable::Hashed(m) => m.iter().map(|(&h, &c)| (TextKey::Hashed(h), c)).collect(),
        };
        v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Insert a decoded exact entry; false if the key was already present.
    pub(crate) fn insert_words(&mut self, words: &[String], count: u64) -> bool {
        let key: Vec<u32> = words.iter().map(|w| self.vocab.intern(w)).collect();
        self.table.insert_raw_exact(&key, count)
    }

    pub(crate) fn insert_hashed(&mut self, key: u64, count: u64) -> bool {
        self.table.insert_raw_hashed(key, count)
    }
}

impl PartialEq for TextNGramIndex {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.freq_threshold == other.freq_threshold
            && self.mode() == other.mode()
            && self.meaningless_tokens == other.meaningless_tokens
            && self.entries() == other.entries()
    }
}

/// Count every contiguous `n`-gram of every training document.
pub fn build_text_index(
    train: &[TextDocument],
    n: usize,
    freq_threshold: u64,
    mode: KeyMode,
) -> Result<TextNGramIndex> {
    if n == 0 || n > u16::MAX as usize {
        return Err(Error::arg(format!("n must be in 1..=65535, got {n}")));
    }
    if freq_threshold == 0 {
        return Err(Error::arg("freq_threshold must be ≥ 1"));
    }
    let tokenized: Vec<Vec<String>> = train.par_iter().map(|d| tokenize_text(&d.text)).collect();
    let mut index = TextNGramIndex::empty(n, freq_threshold, mode);
    // Meaningless tokens come from the documents rather than the keys, so
    // hashed tables get them too.
    index.meaningless_tokens = match mode {
        KeyMode::Exact => {
            let docs: Vec<Vec<u32>> = tokenized
                .iter()
                .map(|toks| toks.iter().map(|t| index.vocab.intern(t)).collect())
                .collect();
            let counts = count_windows(&docs, |ids, m: &mut FxHashMap<GramKey, u64>| {
                for g in ids.windows(n) {
                    add_exact(m, g, 1);
                }
            });
            let ids = docs
                .par_iter()
                .fold(FxHashSet::default, |mut set, ids| {
                    for g in ids.windows(n) {
                        if counts[g] > freq_threshold {
                            set.extend(g.iter().copied());
                        }
                    }
                    set
                })
                .reduce(FxHashSet::default, |mut a, b| {
                    a.extend(b);
                    a
                });
            index.table = CountTable::Exact(counts);
            ids.into_iter().map(|id| index.vocab.words[id as usize].clone()).collect()
        }
        KeyMode::Hashed => {
            let hashes: Vec<Vec<u64>> = tokenized
                .par_iter()
                .map(|toks| toks.windows(n).map(hash_words).collect())
                .collect();
            let counts = count_windows(&hashes, |hs, m: &mut FxHashMap<u64, u64>| {
                for &h in hs {
                    *m.entry(h).or_insert(0) += 1;
                }
            });
            let tokens = tokenized
                .par_iter()
                .zip(&hashes)
                .fold(BTreeSet::new, |mut set, (toks, hs)| {
                    for (g, h) in toks.windows(n).zip(hs) {
                        if counts[h] > freq_threshold {
                            set.extend(g.iter().map(String::as_str));
                        }
                    }
                    set
                })
                .reduce(BTreeSet::new, |mut a, b| {
                    a.extend(b);
                    a
                });
            index.table = CountTable::Hashed(counts);
            tokens.into_iter().map(str::to_owned).collect()
        }
    };
    Ok(index)
}

/// Count per-document windows in one table per worker, sized up front to
/// avoid rehashing, then merge.
fn count_windows<D, K, F>(docs: &[Vec<D>], add: F) -> FxHashMap<K, u64>
where
    D: Sync,
    K: std::hash::Hash + Eq + Send,
    F: Fn(&[D], &mut FxHashMap<K, u64>) + Sync,
{
    let chunk = docs.len().div_ceil(rayon::current_num_threads()).max(1);
    docs.par_chunks(chunk)
        .map(|part| {
            let windows: usize = part.iter().map(Vec::len).sum();
            let mut m = FxHashMap::with_capacity_and_hasher(windows, Default::default());
            for d in part {
                add(d, &mut m);
            }
            m
        })
        .reduce(FxHashMap::default, merge_maps)
}

/// Fraction of `candidate`'s positions holding a token that occurs in some
/// meaningless n-gram.
pub fn overlap_ratio(candidate: &[String], index: &TextNGramIndex) -> f64 {
    if candidate.is_empty() {
        return 0.0;
    }
    let hits = candidate
        .iter()
        .filter(|t| index.meaningless_tokens.contains(*t))
        .count();
    hits as f64 / candidate.len() as f64
}

/// Flag benchmark documents that share a qualifying n-gram with training.
///
/// An n-gram qualifies when it is in the index, is not itself meaningless,
/// and its overlap ratio is below `ratio_threshold`.
pub fn scan_text(bench: &[TextDocument], index: &TextNGramIndex, ratio_threshold: f64) -> OverlapReport {
    let per_instance: BTreeMap<String, InstanceOverlap> = bench
        .par_iter()
        .map(|doc| {
            let toks = tokenize_text(&doc.text);
            let matched = toks
                .windows(index.n)
                .zip(index.window_counts(&toks))
                .filter(|&(g, c)| {
                    c >= 1 && c <= index.freq_threshold && overlap_ratio(g, index) < ratio_threshold
                })
                .count();
            let text_hit = matched > 0;
            let flags = InstanceOverlap {
                text_hit,
                image_hit: false,
                exact_image: false,
                category: categorize(text_hit, false, false).expect("consistent flags"),
                matched_windows: matched,
            };
            (doc.id.clone(), flags)
        })
        .collect();
    OverlapReport::from_instances(
        per_instance,
        ScanParams::Text {
            n: index.n,
            freq_threshold: index.freq_threshold,
            ratio_threshold,
            key_mode: index.mode(),
            overlap_ratio: "pooled_meaningless_tokens".into(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decontam::ContaminationCategory;

    fn doc(id: &str, text: &str) -> TextDocument {
        TextDocument::new(id, text)
    }

    fn words(range: std::ops::Range<usize>) -> String {
        range.map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ")
    }

    fn toks(s: &str) -> Vec<String> {
        tokenize_text(s)
    }

    #[test]
    fn short_doc_has_no_grams() {
        let idx = build_text_index(&[doc("a", &words(0..7))], 8, 10, KeyMode::Exact).unwrap();
        assert!(idx.is_empty());
    }

    #[test]
    fn eight_tokens_one_gram() {
        let idx = build_text_index(&[doc("a", &words(0..8))], 8, 10, KeyMode::Exact).unwrap();
        assert_eq!(idx.len(), 1);
        assert_eq!(idx.count(&toks(&words(0..8))), 1);
    }

    #[test]
    fn threshold_is_strictly_greater() {
        let gram = words(0..8);
        let ten: Vec<_> = (0..10).map(|i| doc(&format!("d{i}"), &gram)).collect();
        let idx = build_text_index(&ten, 8, 10, KeyMode::Exact).unwrap();
        assert_eq!(idx.count(&toks(&gram)), 10);
        assert!(!idx.is_meaningless(&toks(&gram)));
        assert!(idx.meaningless_tokens.is_empty());

        let eleven: Vec<_> = (0..11).map(|i| doc(&format!("d{i}"), &gram)).collect();
        let idx = build_text_index(&eleven, 8, 10, KeyMode::Exact).unwrap();
        assert!(idx.is_meaningless(&toks(&gram)));
        assert_eq!(idx.meaningless_count(), 1);
        assert_eq!(idx.meaningless_tokens.len(), 8);
    }

    #[test]
    fn ratio_counts_pooled_tokens() {
        let empty = build_text_index(&[], 8, 10, KeyMode::Exact).unwrap();
        assert_eq!(overlap_ratio(&toks(&words(0..8)), &empty), 0.0);

        // Make w0..w7 meaningless.
        let boiler: Vec<_> = (0..11).map(|i| doc(&format!("d{i}"), &words(0..8))).collect();
        let idx = build_text_index(&boiler, 8, 10, KeyMode::Exact).unwrap();
        assert_eq!(overlap_ratio(&toks(&words(0..8)), &idx), 1.0);
        assert_eq!(overlap_ratio(&toks(&words(2..10)), &idx), 0.75);
        assert_eq!(overlap_ratio(&toks(&words(100..108)), &idx), 0.0);
    }

    #[test]
    fn scan_examples() {
        let train = vec![doc("t", &words(0..20))];
        let idx = build_text_index(&train, 8, 10, KeyMode::Exact).unwrap();
        let bench = vec![
            doc("copy", &words(0..20)),
            doc("partial", &format!("{} zz yy", words(5..13))),
            doc("clean", &words(50..80)),
        ];
        let r = scan_text(&bench, &idx, 0.75);
        assert!(r.per_instance["copy"].text_hit);
        assert_eq!(r.per_instance["copy"].matched_windows, 13);
        assert_eq!(r.per_instance["copy"].category, ContaminationCategory::SimilarQuestion);
        assert!(r.per_instance["partial"].text_hit);
        assert!(!r.per_instance["clean"].text_hit);
        assert!((r.text_overlap_pct - 200.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.image_overlap_pct, 0.0);
    }

    #[test]
    fn meaningless_grams_never_hit() {
        let boiler = words(0..8);
        let mut train: Vec<_> = (0..11).map(|i| doc(&format!("d{i}"), &boiler)).collect();
        // Shares 6 of 8 tokens with the boilerplate.
        train.push(doc("x", &format!("{} q1 q2", words(2..8))));
        let idx = build_text_index(&train, 8, 10, KeyMode::Exact).unwrap();
        let bench = vec![doc("b", &boiler), doc("c", &format!("{} q1 q2", words(2..8)))];
        let strict = scan_text(&bench, &idx, 0.75);
        assert!(!strict.per_instance["b"].text_hit);
        assert!(!strict.per_instance["c"].text_hit, "ratio 0.75 is not below 0.75");
        let loose = scan_text(&bench, &idx, 0.8);
        assert!(!loose.per_instance["b"].text_hit);
        assert!(loose.per_instance["c"].text_hit);
    }

    #[test]
    fn empty_bench() {
        let idx = build_text_index(&[], 8, 10, KeyMode::Exact).unwrap();
        let r = scan_text(&[], &idx, 0.75);
        assert_eq!(r.text_overlap_pct, 0.0);
        assert!(r.per_instance.is_empty());
    }

    #[test]
    fn bad_params() {
        assert!(build_text_index(&[], 0, 10, KeyMode::Exact).is_err());
        assert!(build_text_index(&[], 8, 0, KeyMode::Exact).is_err());
    }
}
