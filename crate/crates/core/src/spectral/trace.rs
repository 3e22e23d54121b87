//! Gaussian-smoothed periodic-orbit expansion of the level density.
//!
//! Every prime necklace `w` and repetition `ν` contributes
//! `(1/2π) S_w · 2 A_w^ν cos(ν S_w k) · exp(−(ν S_w σ)²/2)`, with
//! `S_w = 2(n_R σ_R + n_L σ_L)` and `A_w = (−1)^χ r^α t^β`. Terms sharing a
//! bead composition share a frequency, so the sum is accumulated per
//! composition before it is evaluated on a grid.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::config::WellConfig;
use crate::error::{invalid, Result};
use crate::necklaces::{for_each_prime_necklace, NecklaceStats, NecklaceWord};

/// Largest primitive length the expansion will enumerate.
pub const MAX_ENUMERATION_LENGTH: usize = 34;
/// Default ν-truncation threshold on `|A|^ν · exp(−(νSσ)²/2)`.
pub const DEFAULT_AMP_CUTOFF: f64 = 1e-12;

/// Beyond this total length the tail estimate gives up and reports infinity.
const TAIL_LENGTH_LIMIT: usize = 1500;
const MAX_REPETITIONS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceTerm {
    pub necklace: NecklaceWord,
    pub action: f64,
    pub amplitude: f64,
}

pub fn orbit_action(stats: &NecklaceStats, config: &WellConfig) -> f64 {
    2.0 * (stats.n_r as f64 * config.sigma_r + stats.n_l as f64 * config.sigma_l)
}

pub fn orbit_amplitude(stats: &NecklaceStats, config: &WellConfig) -> f64 {
    let sign = if stats.chi.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * config.r.powi(stats.alpha as i32) * config.t.powi(stats.beta as i32)
}

/// One term per prime necklace of length `<= max_length`, ordered by length
/// and then lexicographically.
pub fn prime_orbit_terms(config: &WellConfig, max_length: usize) -> Result<Vec<TraceTerm>> {
    if max_length == 0 {
        return invalid("max_length must be at least 1");
    }
    let mut terms = Vec::new();
    for len in 1..=max_length {
        for_each_prime_necklace(len, |beads| {
            let stats = NecklaceStats::of_beads(beads);
            terms.push(TraceTerm {
                necklace: NecklaceWord::new(beads).expect("nonempty"),
                action: orbit_action(&stats, config),
                amplitude: orbit_amplitude(&stats, config),
            });
        })?;
    }
    Ok(terms)
}

/// All orbit contributions at one frequency: `weight = Σ S_w A_w^ν` over
/// the `(w, ν)` whose repeated word has `n_l` L-beads and `n_r` R-beads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitMode {
    pub n_l: usize,
    pub n_r: usize,
    pub action: f64,
    pub weight: f64,
}

/// The truncated, smoothed expansion ready for evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceExpansion {
    pub mean_density: f64,
    pub sigma: f64,
    pub max_length: usize,
    pub modes: Vec<OrbitMode>,
    /// Bound on the neglected prime necklaces longer than `max_length`.
    pub length_tail: f64,
    /// Bound on the neglected repetitions beyond the amplitude cutoff.
    pub repetition_tail: f64,
    /// True when the step sits at the wall and the single-orbit form was used.
    pub poisson_form: bool,
}

fn gaussian_damping(action: f64, sigma: f64) -> f64 {
    let x = action * sigma;
    (-0.5 * x * x).exp()
}

/// Upper bound on `Σ_{ν >= ν0} exp(−(ν S σ)²/2)`.
fn damping_sum_bound(action: f64, sigma: f64, nu0: usize) -> f64 {
    let a = action * sigma;
    if a == 0.0 {
        return f64::INFINITY;
    }
    let nu0 = nu0 as f64;
    let head = gaussian_damping(nu0 * action, sigma) * (1.0 + 1.0 / (nu0 * a * a));
    let integral = (PI / 2.0).sqrt() / a;
    head.min(integral + gaussian_damping(nu0 * action, sigma))
}

impl TraceExpansion {
    pub fn build(
        config: &WellConfig,
        sigma: f64,
        max_length: usize,
        amp_cutoff: f64,
    ) -> Result<TraceExpansion> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return invalid(format!("smoothing width {sigma} must be positive"));
        }
        if !(amp_cutoff > 0.0 && amp_cutoff < 1.0) {
            return invalid(format!("amplitude cutoff {amp_cutoff} must lie in (0, 1)"));
        }
        if max_length == 0 {
            return invalid("max_length must be at least 1");
        }
        if config.step_at_wall() {
            return Ok(Self::poisson(config, sigma, amp_cutoff));
        }
        if max_length > MAX_ENUMERATION_LENGTH {
            return invalid(format!(
                "max_length {max_length} exceeds the enumeration limit {MAX_ENUMERATION_LENGTH}"
            ));
        }

        // weights[total length][n_l]
        let mut weights: Vec<Vec<f64>> = Vec::new();
        let mut repetition_tail = 0.0;
        for len in 1..=max_length {
            for_each_prime_necklace(len, |beads| {
                let stats = NecklaceStats::of_beads(beads);
                let amplitude = orbit_amplitude(&stats, config);
                if amplitude == 0.0 {
                    return;
                }
                let action = orbit_action(&stats, config);
                let mut power = 1.0;
                for nu in 1..=MAX_REPETITIONS {
                    power *= amplitude;
                    let magnitude = power.abs() * gaussian_damping(nu as f64 * action, sigma);
                    if magnitude < amp_cutoff || nu == MAX_REPETITIONS {
                        repetition_tail += action / PI
                            * power.abs()
                            * damping_sum_bound(action, sigma, nu);
                        break;
                    }
                    let total = nu * len;
                    if weights.len() <= total {
                        weights.resize_with(total + 1, Vec::new);
                    }
                    let row = &mut weights[total];
                    if row.is_empty() {
                        row.resize(total + 1, 0.0);
                    }
                    row[nu * stats.n_l] += action * power;
                }
            })?;
        }

        let modes = weights
            .iter()
            .enumerate()
            .flat_map(|(total, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &w)| w != 0.0)
                    .map(move |(n_l, &weight)| {
                        let n_r = total - n_l;
                        OrbitMode {
                            n_l,
                            n_r,
                            action: 2.0 * (n_l as f64 * config.sigma_l + n_r as f64 * config.sigma_r),
                            weight,
                        }
                    })
            })
            .collect();

        Ok(TraceExpansion {
            mean_density: config.mean_density(),
            sigma,
            max_length,
            modes,
            length_tail: length_truncation_bound(config, sigma, max_length),
            repetition_tail,
            poisson_form: false,
        })
    }

    /// Step at the wall: every necklace is a repetition of `LR` and the
    /// expansion reduces to the Poisson sum over the `LR` action `2σ_L`.
    fn poisson(config: &WellConfig, sigma: f64, amp_cutoff: f64) -> TraceExpansion {
        let action = 2.0 * config.sigma_l;
        let mut modes = Vec::new();
        let mut nu = 1;
        loop {
            if gaussian_damping(nu as f64 * action, sigma) < amp_cutoff {
                break;
            }
            modes.push(OrbitMode {
                n_l: nu,
                n_r: nu,
                action: nu as f64 * action,
                weight: action,
            });
            nu += 1;
        }
        TraceExpansion {
            mean_density: config.mean_density(),
            sigma,
            max_length: 2,
            modes,
            length_tail: 0.0,
            repetition_tail: action / PI * damping_sum_bound(action, sigma, nu),
            poisson_form: true,
        }
    }

    pub fn truncation_bound(&self) -> f64 {
        self.length_tail + self.repetition_tail
    }

    pub fn density_at(&self, k: f64) -> f64 {
        let oscillating: f64 = self
            .modes
            .iter()
            .map(|m| m.weight * (m.action * k).cos() * gaussian_damping(m.action, self.sigma))
            .sum();
        self.mean_density + oscillating / PI
    }
}

/// Smoothed trace-formula density on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDensity {
    pub values: Vec<f64>,
    pub truncation_bound: f64,
    pub max_length: usize,
    pub mode_count: usize,
    pub poisson_form: bool,
}

pub fn trace_density_smoothed(
    config: &WellConfig,
    k_grid: &[f64],
    sigma_smooth: f64,
    max_length: usize,
    amp_cutoff: f64,
) -> Result<TraceDensity> {
    let expansion = TraceExpansion::build(config, sigma_smooth, max_length, amp_cutoff)?;
    Ok(TraceDensity {
        values: k_grid.iter().map(|&k| expansion.density_at(k)).collect(),
        truncation_bound: expansion.truncation_bound(),
        max_length: expansion.max_length,
        mode_count: expansion.modes.len(),
        poisson_form: expansion.poisson_form,
    })
}

/// `Σ (−1)^χ r^α t^β` over all raw cyclic words of length `len`, indexed by
/// the number of L-beads. Computed as the trace of a power of the 2×2
/// bead-transfer matrix, independently of necklace enumeration.
pub fn cyclic_amplitude_sums(config: &WellConfig, len: usize) -> Vec<f64> {
    // Transition a → b picks up r or t, a factor −1 for the bead, another
    // −1 for an RR pair, and marks L-beads in the polynomial degree.
    let step = |from_l: bool, to_l: bool| -> f64 {
        match (from_l, to_l) {
            (true, true) => -config.r,
            (true, false) | (false, true) => -config.t,
            (false, false) => config.r,
        }
    };
    transfer_trace(len, step)
}

fn transfer_trace<F: Fn(bool, bool) -> f64>(len: usize, step: F) -> Vec<f64> {
    let mut out = vec![0.0; len + 1];
    for start_l in [true, false] {
        // paths[end][n_l]
        let mut paths = [vec![0.0; len + 1], vec![0.0; len + 1]];
        paths[if start_l { 0 } else { 1 }][0] = 1.0;
        for _ in 0..len {
            let mut next = [vec![0.0; len + 1], vec![0.0; len + 1]];
            for (from, row) in paths.iter().enumerate() {
                let from_l = from == 0;
                for (n_l, &v) in row.iter().enumerate() {
                    if v == 0.0 {
                        continue;
                    }
                    if n_l < len {
                        next[0][n_l + 1] += v * step(from_l, true);
                    }
                    next[1][n_l] += v * step(from_l, false);
                }
            }
            paths = next;
        }
        let end = &paths[if start_l { 0 } else { 1 }];
        for (acc, v) in out.iter_mut().zip(end) {
            *acc += v;
        }
    }
    out
}

/// Per-length contributions to the tail bound, indexed by primitive length.
fn length_contributions(config: &WellConfig, sigma: f64, from: usize) -> Option<Vec<(usize, f64)>> {
    let sigma_min = config.sigma_l.min(config.sigma_r);
    if sigma_min <= 0.0 {
        return None;
    }
    let g = 2.0 * sigma_min * sigma;
    let growth_ends = (std::f64::consts::LN_2 / (g * g)).ceil() as usize;
    let mut out = Vec::new();
    let mut magnitudes = [vec![0.0; 1], vec![0.0; 1]];
    let mut paths_from = [[vec![1.0], vec![0.0]], [vec![0.0], vec![1.0]]];
    let weight = |a: usize, b: usize| if a == b { config.r } else { config.t };
    for n in 1..=TAIL_LENGTH_LIMIT {
        // Advance both start states by one bead; state 0 is L.
        for start in 0..2 {
            let cur = &paths_from[start];
            let mut next = [vec![0.0; n + 1], vec![0.0; n + 1]];
            for from in 0..2 {
                for (n_l, &v) in cur[from].iter().enumerate() {
                    if v == 0.0 {
                        continue;
                    }
                    next[0][n_l + 1] += v * weight(from, 0);
                    next[1][n_l] += v * weight(from, 1);
                }
            }
            paths_from[start] = next;
        }
        magnitudes[0] = paths_from[0][0].clone();
        magnitudes[1] = paths_from[1][1].clone();
        if n <= from {
            continue;
        }
        let mut c = 0.0;
        for n_l in 0..=n {
            let total = magnitudes[0][n_l] + magnitudes[1][n_l];
            if total == 0.0 {
                continue;
            }
            let action = 2.0 * (n_l as f64 * config.sigma_l + (n - n_l) as f64 * config.sigma_r);
            c += total / n as f64 * action / PI * damping_sum_bound(action, sigma, 1);
        }
        out.push((n, c));
        let prev = out.len().checked_sub(2).map(|i| out[i].1).unwrap_or(f64::INFINITY);
        if n > growth_ends && c < 1e-20 && c <= prev {
            return Some(out);
        }
    }
    None
}

/// Bound on `|ρ_full(k) − ρ_truncated(k)|` from dropping every prime
/// necklace longer than `max_length`.
///
/// Uses `Σ_{w prime, |w| = n, composition fixed} |A_w| <= tr(|M|^n)/n`, where
/// `|M|` is the bead-transfer matrix with weights `r` and `t`, together with
/// `|A_w|^ν <= |A_w|` and a Gaussian tail bound for the ν sum.
pub fn length_truncation_bound(config: &WellConfig, sigma: f64, max_length: usize) -> f64 {
    if config.step_at_wall() {
        return 0.0;
    }
    match length_contributions(config, sigma, max_length) {
        Some(parts) => parts.iter().map(|&(_, c)| c).sum(),
        None => f64::INFINITY,
    }
}

/// Smallest primitive length whose truncation bound is below `target`.
pub fn max_length_for_bound(config: &WellConfig, sigma: f64, target: f64) -> Result<usize> {
    if config.step_at_wall() {
        return Ok(2);
    }
    let Some(parts) = length_contributions(config, sigma, 0) else {
        return invalid("tail bound does not converge for this configuration");
    };
    let mut tail: f64 = parts.iter().map(|&(_, c)| c).sum();
    for &(n, c) in &parts {
        if tail < target {
            return if n - 1 == 0 { Ok(1) } else { Ok(n - 1) };
        }
        tail -= c;
        if n >= MAX_ENUMERATION_LENGTH {
            break;
        }
    }
    invalid(format!(
        "no max_length up to {MAX_ENUMERATION_LENGTH} reaches a truncation bound of {target}"
    ))
}
