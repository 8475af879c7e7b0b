use corelite_web::{correlate_json, scan_text_json, select_points_json};
use serde_json::Value;

#[test]
fn selects_spread_out_points() {
    let xy = [0.0, 0.0, 0.1, 0.0, 10.0, 10.0, 10.1, 10.0, 0.0, 10.0];
    let v: Value = serde_json::from_str(&select_points_json(&xy, 3, 0).unwrap()).unwrap();
    assert_eq!(v["center_indices"].as_array().unwrap().len(), 3);
    assert!((v["coverage_radius"].as_f64().unwrap() - 0.1).abs() < 1e-6);
}

#[test]
fn rejects_bad_points() {
    assert!(select_points_json(&[1.0, 2.0, 3.0], 1, 0).is_err());
    assert!(select_points_json(&[1.0, 2.0], 2, 0).is_err());
    assert!(select_points_json(&[1.0, 2.0], 0, 0).is_err());
}

#[test]
fn flags_copied_line() {
    let train = "the quick brown fox jumps over the lazy dog again\nsomething else entirely here today ok";
    let bench = "The quick brown fox jumps over the lazy dog again!\nnothing in common whatsoever with training data";
    let v: Value = serde_json::from_str(&scan_text_json(train, bench, 8, 10, 0.75).unwrap()).unwrap();
    assert_eq!(v["per_instance"]["line 1"]["text_hit"], true);
    assert_eq!(v["per_instance"]["line 2"]["text_hit"], false);
    assert_eq!(v["text_overlap_pct"], 50.0);
}

#[test]
fn correlates_csv() {
    let full = "model,dataset,score\na,x,1\nb,x,2\nc,x,3\n";
    let lite = "model,dataset,score\na,x,10\nb,x,30\nc,x,20\n";
    let v: Value = serde_json::from_str(&correlate_json(full, lite, "spearman").unwrap()).unwrap();
    assert_eq!(v["per_dataset"]["x"]["r"], 0.5);
    assert!(correlate_json(full, lite, "kendall").is_err());
    assert!(correlate_json("nope", lite, "pearson").unwrap_err().starts_with("full:"));
}
