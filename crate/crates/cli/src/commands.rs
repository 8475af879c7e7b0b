use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, Context};
use corelite::coreset::{self, GreedyOptions, SelectionRecord};
use corelite::corpus::{self, EmbeddingMatrix, ScaleSpec, IMAGE_SEQUENCE_LEN};
use corelite::decontam::{self, NGramIndex};
use corelite::json::{round_significant, to_sorted_string};
use corelite::scoring::{self, CorrelationMethod, Weighting};
use serde::Serialize;

use crate::manifest::RunManifest;
use crate::{
    AggregateArgs, CorrelateArgs, Failure, GapArgs, IndexImageArgs, IndexTextArgs, MethodArg, ScanImageArgs,
    ScanTextArgs, SelectArgs,
};

type CmdResult = Result<(), Failure>;

/// Digits kept in aggregate and correlation outputs.
const SIG_DIGITS: u32 = 6;

fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let s = to_sorted_string(value)?;
    std::fs::write(path, s).with_context(|| format!("{}", path.display()))
}

fn write_or_print(path: Option<&Path>, value: &impl Serialize) -> anyhow::Result<()> {
    match path {
        Some(p) => write_json(p, value),
        None => {
            print!("{}", to_sorted_string(value)?);
            Ok(())
        }
    }
}

pub fn select(a: SelectArgs) -> CmdResult {
    let k = match (a.k, &a.dataset) {
        (Some(0), _) => return Err(Failure::Usage("k must be ≥ 1".into())),
        (Some(k), _) => k,
        (None, Some(ds)) => corelite::lite::lite_size(ds)
            .ok_or_else(|| Failure::Usage(format!("no default lite size for dataset {ds:?}; pass --k")))?
            .lite,
        (None, None) => return Err(Failure::Usage("one of --k or --dataset is required".into())),
    };

    let mut manifest = RunManifest::new("select", &a)?.with_seed(a.seed);
    manifest.input("embeddings", &a.embeddings)?;
    manifest.input("ids", &a.ids)?;

    let image = corpus::load_embeddings(&a.embeddings, &a.ids)?;
    let normalize = a.normalize.is_on();
    let points: EmbeddingMatrix = match (&a.text_embeddings, &a.text_ids) {
        (Some(te), Some(ti)) => {
            manifest.input("text_embeddings", te)?;
            manifest.input("text_ids", ti)?;
            let text = corpus::load_embeddings(te, ti)?;
            coreset::concat_embeddings(&image, &text, normalize)?
        }
        _ if normalize => coreset::normalize_rows(&image)?,
        _ => image,
    };
    if k > points.len() {
        return Err(anyhow!("k = {k} exceeds the number of points n = {}", points.len()).into());
    }

    let sel = coreset::k_center_greedy_with(
        &points,
        k,
        &GreedyOptions {
            seed: a.seed,
            ..Default::default()
        },
    )?;
    write_json(&a.out, &sel.to_record(&points))?;
    println!("k={} coverage_radius={:?}", sel.k, sel.coverage_radius);
    manifest.emit(a.manifest.as_deref())?;
    Ok(())
}

#[derive(Serialize)]
struct GapOutput {
    per_model: BTreeMap<String, coreset::SubsetGap>,
    subset_size: usize,
}

pub fn gap(a: GapArgs) -> CmdResult {
    let mut manifest = RunManifest::new("gap", &a)?;
    manifest.input("scores", &a.scores)?;
    manifest.input("selection", &a.selection)?;

    let table = corpus::load_scores(&a.scores)?;
    let raw = std::fs::read(&a.selection).with_context(|| format!("{}", a.selection.display()))?;
    let selection: SelectionRecord =
        serde_json::from_slice(&raw).with_context(|| format!("{}: invalid selection", a.selection.display()))?;

    let models: Vec<&str> = match &a.model {
        Some(m) if !table.models().contains(m.as_str()) => return Err(anyhow!("model {m} not in {}", a.scores.display()).into()),
        Some(m) => vec![m.as_str()],
        None => table.models().into_iter().collect(),
    };
    let mut per_model = BTreeMap::new();
    for model in models {
        // Instances in id order.
        let rows: Vec<(&str, f64)> = table
            .iter()
            .filter(|(m, _, _)| *m == model)
            .map(|(_, inst, e)| (inst, e.score))
            .collect();
        let position: BTreeMap<&str, usize> = rows.iter().enumerate().map(|(i, (id, _))| (*id, i)).collect();
        let subset = selection
            .center_ids
            .iter()
            .map(|id| {
                position
                    .get(id.as_str())
                    .copied()
                    .ok_or_else(|| anyhow!("model {model}: no score for selected instance {id}"))
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        let scores: Vec<f64> = rows.iter().map(|(_, s)| *s).collect();
        per_model.insert(model.to_string(), coreset::subset_gap(&scores, &subset)?);
    }
    write_or_print(
        a.out.as_deref(),
        &GapOutput {
            per_model,
            subset_size: selection.center_ids.len(),
        },
    )?;
    manifest.emit(a.manifest.as_deref())?;
    Ok(())
}

pub fn index_text(a: IndexTextArgs) -> CmdResult {
    if a.n == 0 {
        return Err(Failure::Usage("n must be ≥ 1".into()));
    }
    if a.freq_threshold == 0 {
        return Err(Failure::Usage("freq-threshold must be ≥ 1".into()));
    }
    let mut manifest = RunManifest::new("index-text", &a)?;
    manifest.input("train", &a.train)?;
    let train = corpus::load_text_corpus(&a.train)?;
    let idx = decontam::build_text_index(&train, a.n, a.freq_threshold, a.key_mode.into())?;
    println!(
        "documents={} ngrams={} meaningless={}",
        train.len(),
        idx.len(),
        idx.meaningless_count()
    );
    decontam::save_index(&NGramIndex::Text(idx), &a.out)?;
    manifest.emit(a.manifest.as_deref())?;
    Ok(())
}

pub fn scan_text(a: ScanTextArgs) -> CmdResult {
    if !(0.0..=1.0).contains(&a.ratio_threshold) {
        return Err(Failure::Usage("ratio-threshold must be in [0, 1]".into()));
    }
    let mut manifest = RunManifest::new("scan-text", &a)?;
    manifest.input("index", &a.index)?;
    manifest.input("bench", &a.bench)?;
    let idx = match decontam::load_index(&a.index)? {
        NGramIndex::Text(t) => t,
        other => return Err(anyhow!("{}: expected a text index, found an {} index", a.index.display(), other.kind_name()).into()),
    };
    if let Some(n) = a.n {
        if n != idx.n {
            return Err(anyhow!("n mismatch: index built with n={} but scan requested n={n}", idx.n).into());
        }
    }
    let bench = corpus::load_text_corpus(&a.bench)?;
    let report = decontam::scan_text(&bench, &idx, a.ratio_threshold);
    write_json(&a.report, &report)?;
    println!("text_overlap_pct={:?}", report.text_overlap_pct);
    manifest.emit(a.manifest.as_deref())?;
    Ok(())
}

pub fn index_image(a: IndexImageArgs) -> CmdResult {
    let mut manifest = RunManifest::new("index-image", &a)?;
    manifest.input("train", &a.train)?;
    let train = corpus::load_token_corpus(&a.train, IMAGE_SEQUENCE_LEN)?;
    let idx = decontam::build_image_index(&train, a.key_mode.into())?;
    println!(
        "images={} windows={} distinct_sequences={}",
        train.len(),
        idx.table.len(),
        idx.exact_sequences.len()
    );
    decontam::save_index(&NGramIndex::Image(idx), &a.out)?;
    manifest.emit(a.manifest.as_deref())?;
    Ok(())
}

pub fn scan_image(a: ScanImageArgs) -> CmdResult {
    let mut manifest = RunManifest::new("scan-image", &a)?;
    manifest.input("index", &a.index)?;
    manifest.input("bench", &a.bench)?;
    let idx = match decontam::load_index(&a.index)? {
        NGramIndex::Image(i) => i,
        other => return Err(anyhow!("{}: expected an image index, found a {} index", a.index.display(), other.kind_name()).into()),
    };
    let bench = corpus::load_token_corpus(&a.bench, IMAGE_SEQUENCE_LEN)?;
    let report = decontam::scan_image(&bench, &idx)?;
    write_json(&a.report, &report)?;
    println!("image_overlap_pct={:?}", report.image_overlap_pct);
    manifest.emit(a.manifest.as_deref())?;
    Ok(())
}

#[derive(Serialize)]
struct AggregateOutput {
    per_model: BTreeMap<String, f64>,
    weighting: Weighting,
}

pub fn aggregate(a: AggregateArgs) -> CmdResult {
    let mut manifest = RunManifest::new("aggregate", &a)?;
    manifest.input("scores", &a.scores)?;
    let table = corpus::load_scores(&a.scores)?;
    let configured = match &a.scales {
        Some(p) => {
            manifest.input("scales", p)?;
            corpus::load_scales(p)?
        }
        None => ScaleSpec::new(),
    };
    let scales = configured.with_percent_defaults(&table)?;
    let weighting = if a.weighted.is_on() {
        Weighting::InstanceWeighted
    } else {
        Weighting::Unweighted
    };
    let result = scoring::aggregate(&table, &scales, weighting)?;
    let out = AggregateOutput {
        per_model: result
            .per_model
            .into_iter()
            .map(|(m, v)| (m, round_significant(v, SIG_DIGITS)))
            .collect(),
        weighting: result.weighting,
    };
    write_or_print(a.out.as_deref(), &out)?;
    manifest.emit(a.manifest.as_deref())?;
    Ok(())
}

pub fn correlate(a: CorrelateArgs) -> CmdResult {
    let mut manifest = RunManifest::new("correlate", &a)?;
    manifest.input("full", &a.full)?;
    manifest.input("lite", &a.lite)?;
    let full = corpus::load_scores(&a.full)?;
    let lite = corpus::load_scores(&a.lite)?;
    let method = match a.method {
        MethodArg::Pearson => CorrelationMethod::Pearson,
        MethodArg::Spearman => CorrelationMethod::Spearman,
    };
    let mut result = scoring::correlate_lite(&full, &lite, method);
    for c in result.per_dataset.values_mut() {
        c.r = c.r.map(|r| round_significant(r, SIG_DIGITS));
    }
    write_or_print(a.out.as_deref(), &result)?;
    manifest.emit(a.manifest.as_deref())?;
    Ok(())
}
