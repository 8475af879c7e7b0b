//! Default lite-subset sizes per dataset.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiteSize {
    pub dataset: &'static str,
    pub split: &'static str,
    pub full: usize,
    pub lite: usize,
}

const fn row(dataset: &'static str, split: &'static str, full: usize, lite: usize) -> LiteSize {
    LiteSize { dataset, split, full, lite }
}

pub const LITE_SIZES: &[LiteSize] = &[
    row("ChartQA", "test", 2500, 400),
    row("DocVQA", "val", 5349, 400),
    row("InfoVQA", "val", 2801, 200),
    row("Flickr30k", "val", 31784, 400),
    row("NoCaps", "val", 4500, 400),
    row("TextCaps", "val", 3166, 300),
    row("RefCOCO", "val", 8811, 500),
    row("TextVQA", "val", 5000, 300),
    row("MathVista", "testmini", 1000, 1000),
    row("AI2D", "test", 3088, 300),
    row("LLaVA-W", "test", 60, 60),
    row("MME", "cog. & percep.", 2374, 2374),
    row("MMMU", "val", 900, 900),
    row("CMMMU", "val", 900, 900),
    row("Seed-Bench", "test", 17990, 700),
];

/// Case-insensitive lookup; punctuation in names is ignored, so `seedbench`
/// finds `Seed-Bench`.
pub fn lite_size(dataset: &str) -> Option<&'static LiteSize> {
    let key = normalize(dataset);
    LITE_SIZES.iter().find(|r| normalize(r.dataset) == key)
}

fn normalize(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals_match_table() {
        let full: usize = LITE_SIZES.iter().map(|r| r.full).sum();
        let lite: usize = LITE_SIZES.iter().map(|r| r.lite).sum();
        assert_eq!(full, 90223);
        assert_eq!(lite, 9134);
    }

    #[test]
    fn lookup() {
        assert_eq!(lite_size("chartqa").unwrap().lite, 400);
        assert_eq!(lite_size("SEEDBench").unwrap().lite, 700);
        assert_eq!(lite_size("docvqa").unwrap().full, 5349);
        assert!(lite_size("nope").is_none());
        assert!(LITE_SIZES.iter().all(|r| r.lite <= r.full));
    }
}
