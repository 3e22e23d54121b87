//! Necklace sum rules and combinatorial identities, assembled from exact
//! enumeration on one side and closed forms on the other.
//!
//! Every comparison in this module is exact equality of rationals or of
//! rational polynomials in `r`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{
    binomial, chebyshev_t, format_rational, parse_rational, reduce_rt_monomial, RationalPolynomial,
    Sign,
};
use crate::error::{invalid, Result};
use crate::necklaces::{
    enumerate_necklaces, for_each_prime_necklace, NecklaceStats, NecklaceWord,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityId {
    /// Odd-length necklaces sum to zero.
    ParityOdd,
    /// Even-length necklaces sum to two.
    ParityEven,
    /// Per-power refinement of the even-length rule into binomial coefficients.
    BinomialExample1,
    /// Weighted-length sum rule against the Chebyshev closed form.
    WeightedSumRule,
    /// Per-power refinement of the weighted sum rule.
    WeightedExample2,
    /// Collapse of the orbit sum to the single orbit `LR` when the step sits at the wall.
    PoissonCollapse,
}

/// Either side of an identity: a rational number or a polynomial in `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentityValue {
    Scalar(BigRational),
    Polynomial(RationalPolynomial),
}

impl IdentityValue {
    pub fn integer(n: impl Into<BigInt>) -> Self {
        IdentityValue::Scalar(BigRational::from_integer(n.into()))
    }

    /// `self − other`; mixing scalars and polynomials promotes to a polynomial.
    pub fn difference(&self, other: &IdentityValue) -> IdentityValue {
        match (self, other) {
            (IdentityValue::Scalar(a), IdentityValue::Scalar(b)) => IdentityValue::Scalar(a - b),
            _ => IdentityValue::Polynomial(&self.as_polynomial() - &other.as_polynomial()),
        }
    }

    pub fn as_polynomial(&self) -> RationalPolynomial {
        match self {
            IdentityValue::Scalar(q) => RationalPolynomial::constant(q.clone()),
            IdentityValue::Polynomial(p) => p.clone(),
        }
    }
}

impl std::fmt::Display for IdentityValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IdentityValue::Scalar(q) => write!(f, "{q}"),
            IdentityValue::Polynomial(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for IdentityValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            IdentityValue::Scalar(q) => serializer.serialize_str(&format_rational(q)),
            IdentityValue::Polynomial(p) => p.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for IdentityValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Scalar(String),
            Polynomial(RationalPolynomial),
        }
        Ok(match Raw::deserialize(deserializer)? {
            Raw::Scalar(s) => {
                IdentityValue::Scalar(parse_rational(&s).map_err(serde::de::Error::custom)?)
            }
            Raw::Polynomial(p) => IdentityValue::Polynomial(p),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: IdentityId,
    pub params: Vec<i64>,
    pub lhs: IdentityValue,
    pub rhs: IdentityValue,
    pub verified: bool,
    pub term_count: usize,
    pub contributors: Vec<NecklaceWord>,
}

impl IdentityReport {
    fn new(
        identity: IdentityId,
        params: Vec<i64>,
        lhs: IdentityValue,
        rhs: IdentityValue,
        contributors: Vec<NecklaceWord>,
    ) -> Self {
        IdentityReport {
            identity,
            params,
            verified: lhs == rhs,
            lhs,
            rhs,
            term_count: contributors.len(),
            contributors,
        }
    }
}

/// Primitive statistics and repetition index of a necklace.
fn primitive_parts(w: &NecklaceWord) -> (NecklaceStats, usize) {
    let d = w.decompose();
    (d.primitive.stats(), d.nu)
}

/// `[(−1)^χ r^α t^β]^ν` with `t` eliminated.
fn repeated_amplitude(stats: &NecklaceStats, nu: usize) -> RationalPolynomial {
    reduce_rt_monomial(
        nu * stats.alpha,
        nu * stats.beta,
        Sign::from_parity(nu * stats.chi),
    )
    .expect("β of a cyclic word is even")
}

fn rational(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `Σ_{w·ν ∈ W_ℓ} n(w) [(−1)^{χ(w)} r^{α(w)} t^{β(w)}]^ν` as an exact polynomial in `r`.
pub fn parity_sum(len: usize) -> Result<RationalPolynomial> {
    if len == 0 {
        return invalid("necklace length must be at least 1");
    }
    let mut total = RationalPolynomial::zero();
    for w in enumerate_necklaces(len)? {
        let (stats, nu) = primitive_parts(&w);
        total += &repeated_amplitude(&stats, nu).scale(&rational(stats.n));
    }
    Ok(total)
}

/// Checks the parity sum rule: zero for odd lengths, two for even lengths.
pub fn verify_parity(len: usize) -> Result<IdentityReport> {
    let lhs = parity_sum(len)?;
    let (identity, expected) = if len % 2 == 1 {
        (IdentityId::ParityOdd, RationalPolynomial::zero())
    } else {
        (IdentityId::ParityEven, RationalPolynomial::from_integers(&[2]))
    };
    Ok(IdentityReport::new(
        identity,
        vec![len as i64],
        IdentityValue::Polynomial(lhs),
        IdentityValue::Polynomial(expected),
        enumerate_necklaces(len)?,
    ))
}

/// For each `s = 0..=m`, compares `½ Σ_{w·ν ∈ W_{2m}, να(w)/2 = s} n(w) (−1)^{νχ(w)}`
/// with `C(m, s)`.
pub fn verify_binomial_identity(m: usize) -> Result<Vec<IdentityReport>> {
    if m == 0 {
        return invalid("m must be at least 1");
    }
    let mut sums = vec![BigInt::zero(); m + 1];
    let mut contributors = vec![Vec::new(); m + 1];
    for w in enumerate_necklaces(2 * m)? {
        let (stats, nu) = primitive_parts(&w);
        let reflections = nu * stats.alpha;
        // Odd reflection counts match no integer s.
        if reflections % 2 == 1 {
            continue;
        }
        let s = reflections / 2;
        let term = BigInt::from(stats.n) * Sign::from_parity(nu * stats.chi).as_i64();
        sums[s] += term;
        contributors[s].push(w);
    }
    let half = BigRational::new(BigInt::one(), 2.into());
    Ok(sums
        .into_iter()
        .zip(contributors)
        .enumerate()
        .map(|(s, (sum, who))| {
            IdentityReport::new(
                IdentityId::BinomialExample1,
                vec![m as i64, s as i64],
                IdentityValue::Scalar(rational(sum) * &half),
                IdentityValue::integer(binomial(m as i64, s as i64)),
                who,
            )
        })
        .collect())
}

/// Prime necklaces whose weighted length `γ` divides `m`, with `ν = m / γ`.
/// Since `γ ≥ n`, bead lengths up to `m` cover every candidate.
fn weighted_candidates(m: usize) -> Result<Vec<(NecklaceWord, NecklaceStats, usize)>> {
    let mut out = Vec::new();
    for len in 1..=m {
        for_each_prime_necklace(len, |beads| {
            let stats = NecklaceStats::of_beads(beads);
            debug_assert!(stats.gamma >= stats.n);
            if m.is_multiple_of(stats.gamma) {
                let w = NecklaceWord::new(beads).expect("nonempty");
                out.push((w, stats, m / stats.gamma));
            }
        })?;
    }
    Ok(out)
}

/// `Σ_{w ∈ W_p} Σ_ν γ(w) [(−1)^{χ} r^{α} (1 − r²)^{β/2}]^ν δ_{νγ(w), m}`.
pub fn weighted_sum_lhs(m: usize) -> Result<RationalPolynomial> {
    Ok(weighted_sum_lhs_with_contributors(m)?.0)
}

fn weighted_sum_lhs_with_contributors(
    m: usize,
) -> Result<(RationalPolynomial, Vec<NecklaceWord>)> {
    if m == 0 {
        return invalid("m must be at least 1");
    }
    let mut total = RationalPolynomial::zero();
    let mut who = Vec::new();
    for (w, stats, nu) in weighted_candidates(m)? {
        total += &repeated_amplitude(&stats, nu).scale(&rational(stats.gamma));
        who.push(w);
    }
    Ok((total, who))
}

/// Coefficient `2m (−1)^j / (2m − j) · C(2m − j, j)` of the closed form.
fn closed_form_coefficient(m: usize, j: usize) -> BigRational {
    let (m, j) = (m as i64, j as i64);
    let sign = if j % 2 == 0 { 1 } else { -1 };
    BigRational::new((2 * m * sign).into(), (2 * m - j).into()) * rational(binomial(2 * m - j, j))
}

/// `1 + Σ_{j=0}^{m} [2m (−1)^j / (2m − j)] C(2m − j, j) (1 + r)^{m − j}`.
pub fn weighted_sum_rhs(m: usize) -> Result<RationalPolynomial> {
    if m == 0 {
        return invalid("m must be at least 1");
    }
    let one_plus_r = RationalPolynomial::from_integers(&[1, 1]);
    let mut total = RationalPolynomial::one();
    for j in 0..=m {
        total += &one_plus_r
            .pow((m - j) as u32)
            .scale(&closed_form_coefficient(m, j));
    }
    Ok(total)
}

/// `2 T_{2m}(φ) + 1` with `φ² = (1 + r)/4`, expanded from the Chebyshev
/// recurrence by substituting for the even powers of `φ`.
pub fn weighted_sum_oracle(m: usize) -> Result<RationalPolynomial> {
    if m == 0 {
        return invalid("m must be at least 1");
    }
    let t = chebyshev_t(2 * m);
    let phi_sq = RationalPolynomial::from_coeffs(vec![
        BigRational::new(1.into(), 4.into()),
        BigRational::new(1.into(), 4.into()),
    ]);
    let mut total = RationalPolynomial::one();
    for (power, c) in t.coeffs().iter().enumerate() {
        if power % 2 == 1 {
            debug_assert!(c.is_zero(), "T_2m is even");
            continue;
        }
        total += &phi_sq.pow((power / 2) as u32).scale(&(c * rational(2)));
    }
    Ok(total)
}

/// Compares the enumerated weighted sum against the closed form and the
/// Chebyshev expansion. Verified only if all three agree.
pub fn verify_weighted_sum(m: usize) -> Result<IdentityReport> {
    let (lhs, who) = weighted_sum_lhs_with_contributors(m)?;
    let rhs = weighted_sum_rhs(m)?;
    let oracle = weighted_sum_oracle(m)?;
    let mut report = IdentityReport::new(
        IdentityId::WeightedSumRule,
        vec![m as i64],
        IdentityValue::Polynomial(lhs),
        IdentityValue::Polynomial(rhs.clone()),
        who,
    );
    report.verified &= rhs == oracle;
    Ok(report)
}

/// The coefficient of `r^s` in the weighted sum rule, written as a sum over
/// prime necklaces satisfying `γ(w) | m` and `s − mα(w)/γ(w)` even.
pub fn verify_weighted_identity(m: usize, s: usize) -> Result<IdentityReport> {
    if m == 0 {
        return invalid("m must be at least 1");
    }
    if s > m {
        return invalid(format!("s = {s} is outside [0, {m}]"));
    }
    let mut lhs = BigInt::zero();
    let mut who = Vec::new();
    for (w, stats, nu) in weighted_candidates(m)? {
        let reflections = (nu * stats.alpha) as i64;
        let excess = s as i64 - reflections;
        if excess % 2 != 0 {
            continue;
        }
        let lower = excess / 2;
        let upper = (nu * stats.beta / 2) as i64;
        let term = binomial(upper, lower);
        if term.is_zero() {
            continue;
        }
        let exponent = (nu * stats.chi) as i64 + lower;
        let sign = if exponent.rem_euclid(2) == 0 { 1 } else { -1 };
        lhs += term * stats.gamma * sign;
        who.push(w);
    }

    let mut rhs = if s == 0 {
        BigRational::one()
    } else {
        BigRational::zero()
    };
    for j in 0..=(m - s) {
        rhs += closed_form_coefficient(m, j) * rational(binomial((m - j) as i64, s as i64));
    }

    Ok(IdentityReport::new(
        IdentityId::WeightedExample2,
        vec![m as i64, s as i64],
        IdentityValue::Scalar(rational(lhs)),
        IdentityValue::Scalar(rhs),
        who,
    ))
}

/// All `s = 0..=m` of [`verify_weighted_identity`].
pub fn verify_weighted_identities(m: usize) -> Result<Vec<IdentityReport>> {
    (0..=m).map(|s| verify_weighted_identity(m, s)).collect()
}

/// Prime necklaces inspected by [`poisson_case_check`].
pub const POISSON_CHECK_MAX_LENGTH: usize = 12;

/// Structural check of the step-at-the-wall limit (`σ_R = 0`, `σ_L = 1`):
/// the orbit `LR` carries amplitude `t²`, and every prime necklace has an
/// action that is a whole multiple of the `LR` action, so the orbit sum
/// collapses onto repetitions of `LR`.
pub fn poisson_case_check() -> IdentityReport {
    let lr: NecklaceWord = "LR".parse().expect("valid word");
    let stats = lr.stats();
    let amplitude = repeated_amplitude(&stats, 1);
    let t_squared = RationalPolynomial::from_integers(&[1, 0, -1]);

    // With σ_L = 1 and σ_R = 0 the action of w is 2 n_L(w).
    let lr_action = 2 * stats.n_l;
    let mut checked = 0usize;
    let mut all_multiples = true;
    for len in 1..=POISSON_CHECK_MAX_LENGTH {
        for_each_prime_necklace(len, |beads| {
            let s = NecklaceStats::of_beads(beads);
            checked += 1;
            all_multiples &= (2 * s.n_l).is_multiple_of(lr_action);
        })
        .expect("length >= 1");
    }

    let mut report = IdentityReport::new(
        IdentityId::PoissonCollapse,
        vec![POISSON_CHECK_MAX_LENGTH as i64],
        IdentityValue::Polynomial(amplitude),
        IdentityValue::Polynomial(t_squared),
        vec![lr],
    );
    report.verified &= all_multiples;
    report.term_count = checked;
    report
}
