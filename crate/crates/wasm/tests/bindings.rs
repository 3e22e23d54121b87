use serde_json::Value;

use necklace_wasm::{density_json, necklace_table_json, spectrum_json, MAX_TABLE_LENGTH};

#[test]
fn table_rows() {
    let rows: Value = serde_json::from_str(&necklace_table_json(4, false).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 6);
    assert_eq!(rows[3]["necklace"], "LRLR");
    assert_eq!(rows[3]["primitive"], "LR");
    assert_eq!(rows[3]["nu"], 2);
    let primes: Value = serde_json::from_str(&necklace_table_json(6, true).unwrap()).unwrap();
    assert_eq!(primes.as_array().unwrap().len(), 9);
    assert!(necklace_table_json(0, false).is_err());
    assert!(necklace_table_json(MAX_TABLE_LENGTH + 1, false).is_err());
}

#[test]
fn spectrum_view() {
    let v: Value = serde_json::from_str(&spectrum_json(1.0, 0.5, 10.0).unwrap()).unwrap();
    let roots = v["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 3);
    assert!((roots[0].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-10);
    assert!(spectrum_json(0.0, 0.5, 10.0).is_err());
    assert!(spectrum_json(0.5, 0.5, 1e9).is_err());
}

#[test]
fn density_view() {
    let v: Value = serde_json::from_str(&density_json(0.4, 8.0 / 9.0, 5.0, 50.0, 0.1).unwrap()).unwrap();
    assert!(v["relative_l2_error"].as_f64().unwrap() < 0.02);
    assert_eq!(v["k"].as_array().unwrap().len(), v["trace"].as_array().unwrap().len());
    assert!(density_json(0.4, 8.0 / 9.0, 0.1, 50.0, 0.1).is_err());
}
