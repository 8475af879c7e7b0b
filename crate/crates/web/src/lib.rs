//! Browser bindings for the demo page in `www/`.
//!
//! Each export takes plain strings or numbers and returns a JSON string. The
//! `*_json` functions hold the logic and are what the native tests exercise;
//! the exported wrappers only convert errors into JS exceptions and take
//! `u32` where JS would otherwise need a BigInt.

use corelite::coreset::{k_center_greedy_with, GreedyOptions};
use corelite::corpus::{read_scores, EmbeddingMatrix, TextDocument};
use corelite::decontam::{build_text_index, scan_text, KeyMode};
use corelite::scoring::{correlate_lite, CorrelationMethod};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Selection {
    center_indices: Vec<usize>,
    coverage_radius: f64,
}

/// k-center greedy over 2-D points given as `[x0, y0, x1, y1, ...]`.
pub fn select_points_json(xy: &[f32], k: usize, seed: u64) -> Result<String, String> {
    if xy.len() % 2 != 0 {
        return Err("coordinates must come in (x, y) pairs".into());
    }
    let e = EmbeddingMatrix::with_index_ids(2, xy.to_vec()).map_err(|e| e.to_string())?;
    // Threads are unavailable in the browser.
    let opts = GreedyOptions { seed, threads: Some(1), ..Default::default() };
    let s = k_center_greedy_with(&e, k, &opts).map_err(|e| e.to_string())?;
    let out = Selection { center_indices: s.center_indices, coverage_radius: s.coverage_radius };
    Ok(serde_json::to_string(&out).unwrap())
}

/// Text overlap scan. Both corpora hold one document per non-empty line;
/// documents are named `line N`.
pub fn scan_text_json(
    train: &str,
    bench: &str,
    n: usize,
    freq_threshold: u64,
    ratio_threshold: f64,
) -> Result<String, String> {
    let docs = |s: &str| -> Vec<TextDocument> {
        s.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| TextDocument::new(format!("line {}", i + 1), l))
            .collect()
    };
    let idx = build_text_index(&docs(train), n, freq_threshold, KeyMode::Exact).map_err(|e| e.to_string())?;
    let report = scan_text(&docs(bench), &idx, ratio_threshold);
    Ok(serde_json::to_string(&report).unwrap())
}

/// Per-dataset correlation between full and lite score tables given as CSV
/// text with a `model,dataset,score` header.
pub fn correlate_json(full_csv: &str, lite_csv: &str, method: &str) -> Result<String, String> {
    let method = match method {
        "pearson" => CorrelationMethod::Pearson,
        "spearman" => CorrelationMethod::Spearman,
        other => return Err(format!("unknown method {other:?}")),
    };
    let full = read_scores(full_csv.as_bytes()).map_err(|e| format!("full: {e}"))?;
    let lite = read_scores(lite_csv.as_bytes()).map_err(|e| format!("lite: {e}"))?;
    Ok(serde_json::to_string(&correlate_lite(&full, &lite, method)).unwrap())
}

#[wasm_bindgen]
pub fn select_points(xy: &[f32], k: usize, seed: u32) -> Result<String, JsError> {
    select_points_json(xy, k, seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn text_overlap(
    train: &str,
    bench: &str,
    n: usize,
    freq_threshold: u32,
    ratio_threshold: f64,
) -> Result<String, JsError> {
    scan_text_json(train, bench, n, freq_threshold.into(), ratio_threshold).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn correlate(full_csv: &str, lite_csv: &str, method: &str) -> Result<String, JsError> {
    correlate_json(full_csv, lite_csv, method).map_err(|e| JsError::new(&e))
}
