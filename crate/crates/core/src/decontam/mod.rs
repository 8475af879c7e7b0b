//! Train/benchmark contamination scanning with n-gram lookup tables.
//!
//! Text is tokenized into words and indexed as 8-grams; n-grams that recur in
//! training more than the frequency threshold are treated as boilerplate.
//! Images arrive as 32-token sequences from an external tokenizer and are
//! indexed as their 25 contiguous 8-token windows.

mod image;
mod io;
mod table;
mod text;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::{Error, Result};

pub use image::{build_image_index, scan_image, ImageNGramIndex, IMAGE_N, WINDOWS_PER_IMAGE};
pub use io::{decode_index, encode_index, load_index, save_index, NGramIndex, INDEX_VERSION};
pub use table::{CountTable, GramKey, KeyMode, KeyRef};
pub use text::{
    build_text_index, overlap_ratio, scan_text, TextKey, TextNGramIndex, DEFAULT_FREQ_THRESHOLD, DEFAULT_N,
    DEFAULT_RATIO_THRESHOLD,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ContaminationCategory {
    Clean,
    DuplicateImage,
    SimilarImage,
    SimilarQuestion,
}

impl ContaminationCategory {
    pub const ALL: [ContaminationCategory; 4] = [
        ContaminationCategory::Clean,
        ContaminationCategory::DuplicateImage,
        ContaminationCategory::SimilarImage,
        ContaminationCategory::SimilarQuestion,
    ];
}

/// Pick one category from the hit flags. Image evidence outranks text:
/// duplicate image, then similar image, then similar question.
pub fn categorize(text_hit: bool, image_hit: bool, exact_image: bool) -> Result<ContaminationCategory> {
    use ContaminationCategory::*;
    if exact_image && !image_hit {
        return Err(Error::arg("inconsistent flags: exact image match without an image hit"));
    }
    Ok(if exact_image {
        DuplicateImage
    } else if image_hit {
        SimilarImage
    } else if text_hit {
        SimilarQuestion
    } else {
        Clean
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceOverlap {
    pub text_hit: bool,
    pub image_hit: bool,
    pub exact_image: bool,
    pub category: ContaminationCategory,
    /// Qualifying n-gram windows that matched the index.
    pub matched_windows: usize,
}

/// Parameters a report was produced with.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScanParams {
    Text {
        n: usize,
        freq_threshold: u64,
        ratio_threshold: f64,
        key_mode: KeyMode,
        /// How the overlap ratio was computed.
        overlap_ratio: String,
    },
    Image {
        n: usize,
        key_mode: KeyMode,
    },
    Combined {
        text: Box<ScanParams>,
        image: Box<ScanParams>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapReport {
    pub per_instance: BTreeMap<String, InstanceOverlap>,
    pub text_overlap_pct: f64,
    pub image_overlap_pct: f64,
    pub params: ScanParams,
}

fn pct(hits: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * hits as f64 / total as f64
    }
}

impl OverlapReport {
    pub fn from_instances(per_instance: BTreeMap<String, InstanceOverlap>, params: ScanParams) -> Self {
        let total = per_instance.len();
        let text = per_instance.values().filter(|f| f.text_hit).count();
        let image = per_instance.values().filter(|f| f.image_hit).count();
        Self {
            text_overlap_pct: pct(text, total),
            image_overlap_pct: pct(image, total),
            per_instance,
            params,
        }
    }

    /// Instances per category; every category is present, possibly with 0.
    pub fn category_counts(&self) -> BTreeMap<ContaminationCategory, usize> {
        let mut counts: BTreeMap<_, _> = ContaminationCategory::ALL.iter().map(|&c| (c, 0)).collect();
        for f in self.per_instance.values() {
            *counts.get_mut(&f.category).unwrap() += 1;
        }
        counts
    }

    /// Join a text report and an image report over the same benchmark. Flags
    /// are OR-ed per id, categories recomputed, window counts summed.
    pub fn combine(text: &OverlapReport, image: &OverlapReport) -> OverlapReport {
        let mut merged = text.per_instance.clone();
        for (id, f) in &image.per_instance {
            let e = merged.entry(id.clone()).or_insert(InstanceOverlap {
                text_hit: false,
                image_hit: false,
                exact_image: false,
                category: ContaminationCategory::Clean,
                matched_windows: 0,
            });
            e.text_hit |= f.text_hit;
            e.image_hit |= f.image_hit;
            e.exact_image |= f.exact_image;
            e.matched_windows += f.matched_windows;
        }
        for f in merged.values_mut() {
            f.category = categorize(f.text_hit, f.image_hit, f.exact_image).expect("flags stay consistent under OR");
        }
        Self::from_instances(
            merged,
            ScanParams::Combined {
                text: Box::new(text.params.clone()),
                image: Box::new(image.params.clone()),
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ContaminationCategory::*;

    #[test]
    fn categorize_priority() {
        assert_eq!(categorize(false, false, false).unwrap(), Clean);
        assert_eq!(categorize(true, true, true).unwrap(), DuplicateImage);
        assert_eq!(categorize(true, true, false).unwrap(), SimilarImage);
        assert_eq!(categorize(true, false, false).unwrap(), SimilarQuestion);
        assert_eq!(categorize(false, true, true).unwrap(), DuplicateImage);
        assert!(categorize(false, false, true).is_err());
        assert!(categorize(true, false, true).is_err());
    }

    fn flags(text_hit: bool, image_hit: bool, exact_image: bool) -> InstanceOverlap {
        InstanceOverlap {
            text_hit,
            image_hit,
            exact_image,
            category: categorize(text_hit, image_hit, exact_image).unwrap(),
            matched_windows: 1,
        }
    }

    #[test]
    fn combine_recategorizes() {
        let p = ScanParams::Image { n: 8, key_mode: KeyMode::Exact };
        let mut t = BTreeMap::new();
        t.insert("a".to_string(), flags(true, false, false));
        t.insert("b".to_string(), flags(false, false, false));
        let mut i = BTreeMap::new();
        i.insert("a".to_string(), flags(false, true, false));
        i.insert("c".to_string(), flags(false, true, true));
        let text = OverlapReport::from_instances(t, p.clone());
        let image = OverlapReport::from_instances(i, p);
        let c = OverlapReport::combine(&text, &image);
        assert_eq!(c.per_instance["a"].category, SimilarImage);
        assert_eq!(c.per_instance["a"].matched_windows, 2);
        assert_eq!(c.per_instance["b"].category, Clean);
        assert_eq!(c.per_instance["c"].category, DuplicateImage);
        let counts = c.category_counts();
        assert_eq!(counts.values().sum::<usize>(), 3);
        assert_eq!(counts[&SimilarQuestion], 0);
        assert!((c.text_overlap_pct - 100.0 / 3.0).abs() < 1e-12);
        assert!((c.image_overlap_pct - 200.0 / 3.0).abs() < 1e-12);
    }
}
