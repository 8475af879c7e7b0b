use std::borrow::Borrow;
use std::hash::{Hash, Hasher};

use rustc_hash::FxHashMap as HashMap;

use crate::hash::hash_ids;

/// How n-gram keys are stored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KeyMode {
    /// The token tuple itself.
    #[default]
    Exact,
    /// 64-bit FNV-1a of the token tuple. Smaller, with a negligible chance of
    /// collisions.
    Hashed,
}

/// An n-gram of token ids; grams of up to [`INLINE`] ids are stored without
/// a heap allocation.
#[derive(Clone, Debug)]
pub enum GramKey {
    Inline([u32; INLINE], u8),
    Heap(Box<[u32]>),
}

pub const INLINE: usize = 8;

impl GramKey {
    #[inline]
    pub fn as_slice(&self) -> &[u32] {
        match self {
            GramKey::Inline(a, len) => &a[..*len as usize],
            GramKey::Heap(b) => b,
        }
    }
}

impl From<&[u32]> for GramKey {
    #[inline]
    fn from(ids: &[u32]) -> Self {
        if ids.len() <= INLINE {
            let mut a = [0; INLINE];
            a[..ids.len()].copy_from_slice(ids);
            GramKey::Inline(a, ids.len() as u8)
        } else {
            GramKey::Heap(ids.into())
        }
    }
}

impl Borrow<[u32]> for GramKey {
    fn borrow(&self) -> &[u32] {
        self.as_slice()
    }
}

impl PartialEq for GramKey {
    fn eq(&self, other: &Self) -> bool {
        self.as_slice() == other.as_slice()
    }
}

impl Eq for GramKey {}

impl Hash for GramKey {
    // Must agree with `[u32]`'s hash so that slice lookups work.
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.as_slice().hash(state)
    }
}

/// n-gram occurrence counts, keyed exactly or by hash.
#[derive(Clone, Debug, PartialEq)]
pub enum CountTable {
    Exact(HashMap<GramKey, u64>),
    Hashed(HashMap<u64, u64>),
}

/// A key as stored, borrowed from the table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum KeyRef<'a> {
    Exact(&'a [u32]),
    Hashed(u64),
}

impl CountTable {
    pub fn new(mode: KeyMode) -> Self {
        match mode {
            KeyMode::Exact => CountTable::Exact(HashMap::default()),
            KeyMode::Hashed => CountTable::Hashed(HashMap::default()),
        }
    }

    pub fn mode(&self) -> KeyMode {
        match self {
            CountTable::Exact(_) => KeyMode::Exact,
            CountTable::Hashed(_) => KeyMode::Hashed,
        }
    }

    #[inline]
    pub fn add(&mut self, gram: &[u32], by: u64) {
        match self {
            CountTable::Exact(m) => add_exact(m, gram, by),
            CountTable::Hashed(m) => *m.entry(hash_ids(gram)).or_insert(0) += by,
        }
    }

    /// Occurrence count, 0 when absent.
    #[inline]
    pub fn count(&self, gram: &[u32]) -> u64 {
        match self {
            CountTable::Exact(m) => m.get(gram).copied().unwrap_or(0),
            CountTable::Hashed(m) => m.get(&hash_ids(gram)).copied().unwrap_or(0),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            CountTable::Exact(m) => m.len(),
            CountTable::Hashed(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of keys counted more than `threshold` times.
    pub fn count_above(&self, threshold: u64) -> usize {
        match self {
            CountTable::Exact(m) => m.values().filter(|&&c| c > threshold).count(),
            CountTable::Hashed(m) => m.values().filter(|&&c| c > threshold).count(),
        }
    }

    /// Sum counts from `other`. Order of merging does not matter.
    pub fn merge(self, other: Self) -> Self {
        match (self, other) {
            (CountTable::Exact(a), CountTable::Exact(b)) => CountTable::Exact(merge_maps(a, b)),
            (CountTable::Hashed(a), CountTable::Hashed(b)) => CountTable::Hashed(merge_maps(a, b)),
            _ => panic!("cannot merge tables with different key modes"),
        }
    }

    /// All `(key, count)` pairs in key order.
    pub fn sorted(&self) -> Vec<(KeyRef<'_>, u64)> {
        let mut v: Vec<_> = match self {
            CountTable::Exact(m) => m.iter().map(|(k, &c)| (KeyRef::Exact(k.as_slice()), c)).collect(),
            CountTable::Hashed(m) => m.iter().map(|(&k, &c)| (KeyRef::Hashed(k), c)).collect(),
        };
        v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub(crate) fn insert_raw_exact(&mut self, key: &[u32], count: u64) -> bool {
        match self {
            CountTable::Exact(m) => m.insert(key.into(), count).is_none(),
            CountTable::Hashed(_) => false,
        }
    }

    pub(crate) fn insert_raw_hashed(&mut self, key: u64, count: u64) -> bool {
        match self {
            CountTable::Hashed(m) => m.insert(key, count).is_none(),
            CountTable::Exact(_) => false,
        }
    }
}

#[inline]
pub(crate) fn add_exact(m: &mut HashMap<GramKey, u64>, gram: &[u32], by: u64) {
    match m.get_mut(gram) {
        Some(c) => *c += by,
        None => {
            m.insert(gram.into(), by);
        }
    }
}

pub(crate) fn merge_maps<K: Hash + Eq>(mut a: HashMap<K, u64>, mut b: HashMap<K, u64>) -> HashMap<K, u64> {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    for (k, c) in b {
        *a.entry(k).or_insert(0) += c;
    }
    a
}
