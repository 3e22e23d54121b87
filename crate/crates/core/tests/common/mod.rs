#![allow(dead_code)]

use std::collections::BTreeSet;

use necklace_core::necklaces::{canonicalize, Bead, NecklaceWord};

/// Every raw word of length `len`.
pub fn all_words(len: usize) -> impl Iterator<Item = Vec<Bead>> {
    (0u64..1 << len).map(move |bits| {
        (0..len)
            .map(|i| if bits >> (len - 1 - i) & 1 == 1 { Bead::R } else { Bead::L })
            .collect()
    })
}

/// Distinct necklaces of length `len` by canonicalizing all `2^len` words.
pub fn brute_force_necklaces(len: usize) -> BTreeSet<NecklaceWord> {
    all_words(len).map(|w| canonicalize(&w).unwrap()).collect()
}

/// Multiset comparison of two sorted level lists.
pub fn max_level_gap(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    Some(a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}
