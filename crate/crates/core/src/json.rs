//! Deterministic JSON output: sorted object keys, shortest round-trip floats.

use serde::Serialize;

use crate::{Error, Result};

/// Serialise `value` with object keys sorted at every level, plus a trailing
/// newline.
pub fn to_sorted_string<T: Serialize>(value: &T) -> Result<String> {
    // `serde_json::Value` objects are BTreeMap-backed, so a round trip through
    // `Value` sorts every nested object.
    let v = serde_json::to_value(value).map_err(|e| Error::data(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::data(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Round to `digits` significant decimal digits.
pub fn round_significant(x: f64, digits: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    // Going through the exponent formatter avoids the drift of pow10 scaling.
    let s = format!("{:.*e}", digits.saturating_sub(1) as usize, x);
    s.parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn keys_sorted_recursively() {
        #[derive(Serialize)]
        struct Outer {
            zeta: u32,
            alpha: HashMap<String, u32>,
        }
        let mut m = HashMap::new();
        m.insert("b".to_string(), 2);
        m.insert("a".to_string(), 1);
        let s = to_sorted_string(&Outer { zeta: 0, alpha: m }).unwrap();
        let a = s.find("\"alpha\"").unwrap();
        let z = s.find("\"zeta\"").unwrap();
        assert!(a < z);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(round_significant(65.7785714285, 6), 65.7786);
        assert_eq!(round_significant(0.981980506, 6), 0.981981);
        assert_eq!(round_significant(-1234567.0, 6), -1234570.0);
        assert_eq!(round_significant(0.0, 6), 0.0);
        assert_eq!(round_significant(1.0, 6), 1.0);
    }
}
