//! Browser bindings. Each export returns a JSON string; `www/index.html`
//! renders it.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use necklace_core::necklaces::{enumerate_prime_necklaces, necklace_table, NecklaceRow};
use necklace_core::spectral::{compare_densities, make_config, solve_spectrum_scan};

/// Longest necklace length the page will tabulate.
pub const MAX_TABLE_LENGTH: usize = 16;
/// Cap on the number of roots returned by [`spectrum`].
pub const MAX_ROOTS: f64 = 5000.0;

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

pub fn necklace_table_json(length: usize, prime_only: bool) -> Result<String, String> {
    if length > MAX_TABLE_LENGTH {
        return Err(format!("length {length} exceeds {MAX_TABLE_LENGTH}"));
    }
    let rows: Vec<NecklaceRow> = if prime_only {
        enumerate_prime_necklaces(length)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(NecklaceRow::new)
            .collect()
    } else {
        necklace_table(length).map_err(|e| e.to_string())?
    };
    to_json(&rows)
}

#[derive(Serialize)]
struct SpectrumView {
    roots: Vec<f64>,
    multiplicities: Vec<u32>,
    max_residual: f64,
    mean_density: f64,
    r: f64,
}

pub fn spectrum_json(a: f64, lambda: f64, k_max: f64) -> Result<String, String> {
    let config = make_config(a, lambda).map_err(|e| e.to_string())?;
    if k_max * config.mean_density() > MAX_ROOTS {
        return Err(format!("k_max = {k_max} would give more than {MAX_ROOTS} roots"));
    }
    let s = solve_spectrum_scan(&config, k_max).map_err(|e| e.to_string())?;
    to_json(&SpectrumView {
        max_residual: s.max_residual(),
        mean_density: config.mean_density(),
        r: config.r,
        roots: s.roots,
        multiplicities: s.multiplicities,
    })
}

/// Density comparison with the smoothing width given in mean level spacings.
pub fn density_json(a: f64, lambda: f64, k_min: f64, k_max: f64, spacings: f64) -> Result<String, String> {
    let config = make_config(a, lambda).map_err(|e| e.to_string())?;
    let sigma = spacings / config.mean_density();
    let cmp = compare_densities(&config, k_min, k_max, sigma, None).map_err(|e| e.to_string())?;
    to_json(&cmp)
}

#[wasm_bindgen]
pub fn necklaces(length: usize, prime_only: bool) -> Result<String, JsError> {
    necklace_table_json(length, prime_only).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn spectrum(a: f64, lambda: f64, k_max: f64) -> Result<String, JsError> {
    spectrum_json(a, lambda, k_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn density(a: f64, lambda: f64, k_min: f64, k_max: f64, spacings: f64) -> Result<String, JsError> {
    density_json(a, lambda, k_min, k_max, spacings).map_err(|e| JsError::new(&e))
}
