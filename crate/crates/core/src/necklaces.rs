//! Binary necklaces over the bead alphabet `{L, R}`.
//!
//! A necklace is a cyclic word: two words of equal length name the same
//! necklace when one is a rotation of the other. Each class is represented
//! by its lexicographically smallest rotation under the order `L < R`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{divisors, mobius, totient};
use crate::error::{invalid, Error, Result};

/// A single bead. `L` sorts before `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bead {
    L,
    R,
}

impl Bead {
    /// The other bead type.
    pub fn swapped(self) -> Bead {
        match self {
            Bead::L => Bead::R,
            Bead::R => Bead::L,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Bead::L => 'L',
            Bead::R => 'R',
        }
    }

    pub fn from_char(c: char) -> Result<Bead> {
        match c {
            'L' => Ok(Bead::L),
            'R' => Ok(Bead::R),
            other => Err(Error::Parse(format!("bead must be 'L' or 'R', got {other:?}"))),
        }
    }
}

/// Parses a raw (not necessarily canonical) word such as `"RRRL"`.
pub fn parse_beads(s: &str) -> Result<Vec<Bead>> {
    s.chars().map(Bead::from_char).collect()
}

/// Canonical representative of a cyclic binary word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NecklaceWord {
    beads: Vec<Bead>,
}

/// Returns the lexicographically minimal rotation of `word`.
pub fn canonicalize(word: &[Bead]) -> Result<NecklaceWord> {
    if word.is_empty() {
        return invalid("cannot canonicalize an empty word");
    }
    let start = least_rotation(word);
    let mut beads = Vec::with_capacity(word.len());
    beads.extend_from_slice(&word[start..]);
    beads.extend_from_slice(&word[..start]);
    Ok(NecklaceWord { beads })
}

// Two-pointer minimum-rotation search, O(n).
fn least_rotation(s: &[Bead]) -> usize {
    let n = s.len();
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

impl NecklaceWord {
    /// Canonicalizes an arbitrary nonempty word.
    pub fn new(beads: &[Bead]) -> Result<Self> {
        canonicalize(beads)
    }

    pub fn beads(&self) -> &[Bead] {
        &self.beads
    }

    pub fn len(&self) -> usize {
        self.beads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beads.is_empty()
    }

    /// Smallest period of the word that divides its length.
    pub fn period(&self) -> usize {
        smallest_period(&self.beads)
    }

    /// True when the word is not a repetition of a shorter word.
    pub fn is_prime(&self) -> bool {
        self.period() == self.len()
    }

    pub fn stats(&self) -> NecklaceStats {
        NecklaceStats::of_beads(&self.beads)
    }

    pub fn decompose(&self) -> PrimitiveDecomposition {
        primitive_decomposition(self)
    }

    /// The necklace obtained by concatenating this word `nu` times.
    pub fn repeat(&self, nu: usize) -> Result<NecklaceWord> {
        if nu == 0 {
            return invalid("repetition count must be at least 1");
        }
        canonicalize(&self.beads.repeat(nu))
    }

    /// Swaps every bead (`L ↔ R`) and re-canonicalizes.
    pub fn mirrored(&self) -> NecklaceWord {
        let swapped: Vec<Bead> = self.beads.iter().map(|b| b.swapped()).collect();
        canonicalize(&swapped).expect("nonempty by invariant")
    }
}

fn smallest_period(beads: &[Bead]) -> usize {
    let n = beads.len();
    for p in divisors(n as u64).into_iter().map(|d| d as usize) {
        if (p..n).all(|i| beads[i] == beads[i - p]) {
            return p;
        }
    }
    n
}

impl fmt::Display for NecklaceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.beads {
            write!(f, "{}", b.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for NecklaceWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        canonicalize(&parse_beads(s)?)
    }
}

impl Serialize for NecklaceWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for NecklaceWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A necklace written as `primitive` repeated `nu` times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitiveDecomposition {
    pub primitive: NecklaceWord,
    pub nu: usize,
}

pub fn primitive_decomposition(w: &NecklaceWord) -> PrimitiveDecomposition {
    let p = w.period();
    // A prefix of a minimal rotation that tiles it is itself minimal.
    let primitive = NecklaceWord {
        beads: w.beads[..p].to_vec(),
    };
    PrimitiveDecomposition {
        primitive,
        nu: w.len() / p,
    }
}

/// Orbit statistics of a cyclic word. All pair counts run over the `n`
/// cyclically adjacent positions `(i, i + 1 mod n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NecklaceStats {
    #[serde(rename = "n_L")]
    pub n_l: usize,
    #[serde(rename = "n_R")]
    pub n_r: usize,
    pub n: usize,
    /// Equal adjacent pairs (`LL` or `RR`): reflections at the step.
    pub alpha: usize,
    /// Unequal adjacent pairs (`LR` or `RL`): transmissions through the step.
    pub beta: usize,
    /// Weighted length `2 n_L + n_R`.
    pub gamma: usize,
    /// Phase count: `n` plus the number of adjacent `RR` pairs.
    pub chi: usize,
}

impl NecklaceStats {
    /// Statistics of a raw word; rotation invariant by construction.
    pub fn of_beads(beads: &[Bead]) -> NecklaceStats {
        let n = beads.len();
        let n_r = beads.iter().filter(|&&b| b == Bead::R).count();
        let n_l = n - n_r;
        let mut alpha = 0;
        let mut rr = 0;
        for i in 0..n {
            let (a, b) = (beads[i], beads[(i + 1) % n]);
            if a == b {
                alpha += 1;
                if a == Bead::R {
                    rr += 1;
                }
            }
        }
        NecklaceStats {
            n_l,
            n_r,
            n,
            alpha,
            beta: n - alpha,
            gamma: 2 * n_l + n_r,
            chi: n + rr,
        }
    }
}

pub fn compute_stats(w: &NecklaceWord) -> NecklaceStats {
    w.stats()
}

/// Number of binary necklaces of length `len`, `(1/ℓ) Σ_{d|ℓ} φ(d) 2^{ℓ/d}`.
pub fn count_necklaces(len: usize) -> Result<BigUint> {
    if len == 0 {
        return invalid("necklace length must be at least 1");
    }
    let mut total = BigUint::zero();
    for d in divisors(len as u64) {
        total += BigUint::from(totient(d)?) << (len / d as usize);
    }
    debug_assert!((&total % len).is_zero());
    Ok(total / len)
}

/// Number of prime (aperiodic) necklaces of length `len`, by Möbius inversion.
pub fn count_prime_necklaces(len: usize) -> Result<BigUint> {
    if len == 0 {
        return invalid("necklace length must be at least 1");
    }
    let mut plus = BigUint::zero();
    let mut minus = BigUint::zero();
    for d in divisors(len as u64) {
        let term = BigUint::one() << (len / d as usize);
        match mobius(d) {
            1 => plus += term,
            -1 => minus += term,
            _ => {}
        }
    }
    Ok((plus - minus) / len)
}

/// Visits every necklace of length `len` in lexicographic order, passing the
/// canonical beads and the smallest period.
///
/// Iterative Fredricksen–Kessler–Maiorana generation: prenecklaces are
/// produced in lexicographic order and a prenecklace whose Lyndon prefix
/// length divides `len` is a necklace.
pub fn for_each_necklace<F: FnMut(&[Bead], usize)>(len: usize, mut visit: F) -> Result<()> {
    if len == 0 {
        return invalid("necklace length must be at least 1");
    }
    let mut a = vec![Bead::L; len];
    visit(&a, 1);
    loop {
        let Some(i) = a.iter().rposition(|&b| b == Bead::L) else {
            return Ok(());
        };
        a[i] = Bead::R;
        for j in i + 1..len {
            a[j] = a[j - (i + 1)];
        }
        let p = i + 1;
        if len.is_multiple_of(p) {
            visit(&a, p);
        }
    }
}

/// Visits every prime necklace of length `len` in lexicographic order.
pub fn for_each_prime_necklace<F: FnMut(&[Bead])>(len: usize, mut visit: F) -> Result<()> {
    for_each_necklace(len, |beads, p| {
        if p == beads.len() {
            visit(beads)
        }
    })
}

pub fn enumerate_necklaces(len: usize) -> Result<Vec<NecklaceWord>> {
    let mut out = Vec::new();
    for_each_necklace(len, |beads, _| {
        out.push(NecklaceWord {
            beads: beads.to_vec(),
        })
    })?;
    Ok(out)
}

pub fn enumerate_prime_necklaces(len: usize) -> Result<Vec<NecklaceWord>> {
    let mut out = Vec::new();
    for_each_prime_necklace(len, |beads| {
        out.push(NecklaceWord {
            beads: beads.to_vec(),
        })
    })?;
    Ok(out)
}

/// One row of the necklace table: the necklace, its primitive and
/// repetition index, and the statistics of the primitive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NecklaceRow {
    pub necklace: NecklaceWord,
    pub primitive: NecklaceWord,
    pub nu: usize,
    #[serde(flatten)]
    pub stats: NecklaceStats,
}

impl NecklaceRow {
    pub fn new(necklace: NecklaceWord) -> NecklaceRow {
        let PrimitiveDecomposition { primitive, nu } = necklace.decompose();
        let stats = primitive.stats();
        NecklaceRow {
            necklace,
            primitive,
            nu,
            stats,
        }
    }
}

pub fn necklace_table(len: usize) -> Result<Vec<NecklaceRow>> {
    Ok(enumerate_necklaces(len)?
        .into_iter()
        .map(NecklaceRow::new)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn w(s: &str) -> NecklaceWord {
        s.parse().unwrap()
    }

    fn brute_force(len: usize) -> BTreeSet<NecklaceWord> {
        (0u32..1 << len)
            .map(|bits| {
                let beads: Vec<Bead> = (0..len)
                    .map(|i| if bits >> i & 1 == 1 { Bead::R } else { Bead::L })
                    .collect();
                canonicalize(&beads).unwrap()
            })
            .collect()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(w("RL").to_string(), "LR");
        assert_eq!(w("RRRL").to_string(), "LRRR");
        assert_eq!(w("LRLR").to_string(), "LRLR");
        assert_eq!(w("RLRRL").to_string(), "LRLRR");
    }

    #[test]
    fn empty_word_is_rejected() {
        assert!(matches!(canonicalize(&[]), Err(Error::InvalidArgument(_))));
        assert!("".parse::<NecklaceWord>().is_err());
        assert!("LXR".parse::<NecklaceWord>().is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(count_necklaces(1).unwrap(), BigUint::from(2u32));
        assert_eq!(count_necklaces(2).unwrap(), BigUint::from(3u32));
        assert_eq!(count_necklaces(4).unwrap(), BigUint::from(6u32));
        // brute force over 2^6 words
        assert_eq!(brute_force(6).len(), 14);
        assert_eq!(count_necklaces(6).unwrap(), BigUint::from(14u32));
        assert!(count_necklaces(0).is_err());
        assert!(count_necklaces(200).unwrap() > BigUint::from(u128::MAX));
    }

    #[test]
    fn prime_counts_match_enumeration() {
        for len in 1..=12 {
            assert_eq!(
                count_prime_necklaces(len).unwrap(),
                BigUint::from(enumerate_prime_necklaces(len).unwrap().len())
            );
        }
    }

    #[test]
    fn enumeration_small_lengths() {
        let names = |v: Vec<NecklaceWord>| v.iter().map(|w| w.to_string()).collect::<Vec<_>>();
        assert_eq!(names(enumerate_necklaces(1).unwrap()), ["L", "R"]);
        assert_eq!(names(enumerate_necklaces(2).unwrap()), ["LL", "LR", "RR"]);
        assert_eq!(
            names(enumerate_necklaces(4).unwrap()),
            ["LLLL", "LLLR", "LLRR", "LRLR", "LRRR", "RRRR"]
        );
        assert_eq!(names(enumerate_prime_necklaces(1).unwrap()), ["L", "R"]);
        assert_eq!(names(enumerate_prime_necklaces(2).unwrap()), ["LR"]);
        assert_eq!(
            names(enumerate_prime_necklaces(4).unwrap()),
            ["LLLR", "LLRR", "LRRR"]
        );
        assert!(enumerate_necklaces(0).is_err());
        assert!(enumerate_prime_necklaces(0).is_err());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for len in 1..=12 {
            let fast: Vec<NecklaceWord> = enumerate_necklaces(len).unwrap();
            let slow: Vec<NecklaceWord> = brute_force(len).into_iter().collect();
            assert_eq!(fast, slow, "length {len}");
        }
    }

    #[test]
    fn decompositions() {
        let d = w("LL").decompose();
        assert_eq!((d.primitive.to_string(), d.nu), ("L".into(), 2));
        let d = w("LRLR").decompose();
        assert_eq!((d.primitive.to_string(), d.nu), ("LR".into(), 2));
        let d = w("LLRR").decompose();
        assert_eq!((d.primitive.to_string(), d.nu), ("LLRR".into(), 1));
        assert!(w("LLRR").is_prime());
        assert!(!w("RRRR").is_prime());
    }

    #[test]
    fn stats_examples() {
        let s = w("R").stats();
        assert_eq!((s.alpha, s.beta, s.gamma, s.chi, s.n), (1, 0, 1, 2, 1));
        let s = w("LR").stats();
        assert_eq!((s.alpha, s.beta, s.gamma, s.chi, s.n), (0, 2, 3, 2, 2));
        let s = w("LLRR").stats();
        assert_eq!((s.n, s.alpha, s.beta, s.gamma, s.chi), (4, 2, 2, 6, 5));
        let s = w("LRRR").stats();
        assert_eq!((s.n, s.alpha, s.beta, s.gamma, s.chi), (4, 2, 2, 5, 6));
    }

    #[test]
    fn stats_json_keys() {
        let json = serde_json::to_value(w("LRRR").stats()).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"n_L": 1, "n_R": 3, "n": 4, "alpha": 2, "beta": 2, "gamma": 5, "chi": 6})
        );
        let list = serde_json::to_string(&enumerate_necklaces(2).unwrap()).unwrap();
        assert_eq!(list, r#"["LL","LR","RR"]"#);
        let back: Vec<NecklaceWord> = serde_json::from_str(r#"["RL"]"#).unwrap();
        assert_eq!(back, vec![w("LR")]);
    }

    #[test]
    fn mirror_swaps_bead_counts() {
        let m = w("LLLR").mirrored();
        assert_eq!(m.to_string(), "LRRR");
        assert_eq!(m.mirrored(), w("LLLR"));
    }
}
