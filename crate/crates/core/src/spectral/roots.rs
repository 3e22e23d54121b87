use std::f64::consts::PI;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::config::{SecularParams, WellConfig};
use crate::algebra::chebyshev_u;
use crate::error::{invalid, Result};

/// Bisection stops once the bracket is narrower than this.
pub const ROOT_TOLERANCE: f64 = 1e-12;
/// Roots closer than this are treated as the same root.
pub const DEDUP_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveMethod {
    DirectScan,
    ChebyshevFactor,
}

/// Positive roots of the secular equation up to `k_max`, ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub roots: Vec<f64>,
    /// Multiplicity of each root; 2 marks a tangency.
    pub multiplicities: Vec<u32>,
    pub k_max: f64,
    pub method: SolveMethod,
    pub secular: SecularParams,
    /// Present when the spectrum was solved from a well geometry.
    pub config: Option<WellConfig>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Number of levels counted with multiplicity.
    pub fn level_count(&self) -> usize {
        self.multiplicities.iter().map(|&m| m as usize).sum()
    }

    /// `|secular(k)|` at every root.
    pub fn residuals(&self) -> Vec<f64> {
        self.roots
            .iter()
            .map(|&k| self.secular.value(k).abs())
            .collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().into_iter().fold(0.0, f64::max)
    }

    /// Roots repeated according to multiplicity.
    pub fn levels(&self) -> Vec<f64> {
        self.roots
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&k, &m)| std::iter::repeat_n(k, m as usize))
            .collect()
    }
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, f_lo: f64, tol: f64) -> f64 {
    let lo_negative = f_lo < 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sign-change scan over `grid` with bisection refinement. Intervals with no
/// sign change are checked for an interior extremum of `f` heading towards
/// zero; a sign flip there exposes a close pair of roots and a near-zero
/// extremum is reported as a double root.
fn isolate_roots<F, D, T>(f: F, df: D, grid: &[f64], xtol: f64, tangency: T) -> Vec<(f64, u32)>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
    T: Fn(f64) -> f64,
{
    let mut roots = Vec::new();
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    for (i, (&x, &v)) in grid.iter().zip(&values).enumerate() {
        if v == 0.0 {
            roots.push((x, 1));
        }
        let Some((&x1, &v1)) = grid.get(i + 1).zip(values.get(i + 1)) else {
            break;
        };
        if v == 0.0 || v1 == 0.0 {
            continue;
        }
        if (v < 0.0) != (v1 < 0.0) {
            roots.push((bisect(&f, x, x1, v, xtol), 1));
            continue;
        }
        // Same sign: look for an extremum approaching the axis.
        let (d0, d1) = (df(x), df(x1));
        if !(v * d0 < 0.0 && v1 * d1 > 0.0) {
            continue;
        }
        let c = bisect(&df, x, x1, d0, xtol * 1e-2);
        let fc = f(c);
        if fc != 0.0 && (fc < 0.0) != (v < 0.0) {
            roots.push((bisect(&f, x, c, v, xtol), 1));
            roots.push((bisect(&f, c, x1, fc, xtol), 1));
        } else if fc.abs() < tangency(c) {
            roots.push((c, 2));
        }
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    dedup_roots(roots)
}

fn dedup_roots(sorted: Vec<(f64, u32)>) -> Vec<(f64, u32)> {
    let mut out: Vec<(f64, u32)> = Vec::with_capacity(sorted.len());
    for (x, m) in sorted {
        match out.last_mut() {
            Some(last) if (x - last.0).abs() < DEDUP_TOLERANCE => last.1 = last.1.max(m),
            _ => out.push((x, m)),
        }
    }
    out
}

fn scan(params: SecularParams, k_max: f64) -> Vec<(f64, u32)> {
    let step = PI / (8.0 * params.omega1);
    // sin(ω₁k) > r|sin(ω₂k)| on (0, π/(2ω₁)], so the scan can start one step in.
    let mut grid: Vec<f64> = (1..)
        .map(|i| i as f64 * step)
        .take_while(|&k| k < k_max)
        .collect();
    grid.push(k_max);
    isolate_roots(
        |k| params.value(k),
        |k| params.derivative(k),
        &grid,
        ROOT_TOLERANCE,
        |k| 1e-10 * (1.0 + k.abs()),
    )
    .into_iter()
    .filter(|&(k, _)| k > 0.0 && k <= k_max)
    .collect()
}

fn spectrum_from(
    roots: Vec<(f64, u32)>,
    k_max: f64,
    method: SolveMethod,
    secular: SecularParams,
    config: Option<WellConfig>,
) -> Spectrum {
    let (roots, multiplicities) = roots.into_iter().unzip();
    Spectrum {
        roots,
        multiplicities,
        k_max,
        method,
        secular,
        config,
    }
}

/// All roots in `(0, k_max]` by scanning with step `π/(8ω₁)`.
pub fn solve_spectrum_scan(config: &WellConfig, k_max: f64) -> Result<Spectrum> {
    if !(k_max > 0.0 && k_max.is_finite()) {
        return invalid(format!("k_max = {k_max} must be positive"));
    }
    let params = config.secular_params();
    Ok(spectrum_from(
        scan(params, k_max),
        k_max,
        SolveMethod::DirectScan,
        params,
        Some(*config),
    ))
}

/// Roots of `sin(pωk) − r sin(qωk)` from the factorisation
/// `sin(ωk) [U_{p−1}(cos ωk) − r U_{q−1}(cos ωk)]`.
pub fn solve_spectrum_chebyshev(p: u32, q: u32, r: f64, omega: f64, k_max: f64) -> Result<Spectrum> {
    if q == 0 || p < q {
        return invalid(format!("need p >= q >= 1, got p = {p}, q = {q}"));
    }
    if p.gcd(&q) != 1 {
        return invalid(format!("p = {p} and q = {q} are not coprime"));
    }
    if !(0.0..1.0).contains(&r) {
        return invalid(format!("reflection coefficient r = {r} must lie in [0, 1)"));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return invalid(format!("omega = {omega} must be positive"));
    }
    if !(k_max > 0.0 && k_max.is_finite()) {
        return invalid(format!("k_max = {k_max} must be positive"));
    }

    let mut coeffs = chebyshev_u(p as usize - 1).to_f64_coeffs();
    for (c, u) in coeffs.iter_mut().zip(chebyshev_u(q as usize - 1).to_f64_coeffs()) {
        *c -= r * u;
    }
    let cosines = if coeffs.len() > 1 {
        polynomial_roots_with_multiplicity(&coeffs, -1.0, 1.0)?
    } else {
        Vec::new()
    };

    let period = 2.0 * PI / omega;
    let mut roots: Vec<(f64, u32)> = (1..)
        .map(|n| PI * n as f64 / omega)
        .take_while(|&k| k <= k_max)
        .map(|k| (k, 1))
        .collect();
    for (x, mult) in cosines {
        let base = x.clamp(-1.0, 1.0).acos() / omega;
        for n in 0.. {
            let shift = n as f64 * period;
            let (up, down) = (shift + base, shift - base);
            if down > k_max {
                break;
            }
            if down > 0.0 {
                roots.push((down, mult));
            }
            if up <= k_max {
                roots.push((up, mult));
            }
        }
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));

    let secular = SecularParams {
        omega1: p as f64 * omega,
        omega2: q as f64 * omega,
        r,
    };
    Ok(spectrum_from(
        dedup_roots(roots),
        k_max,
        SolveMethod::ChebyshevFactor,
        secular,
        None,
    ))
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as f64 * c)
        .collect()
}

fn polynomial_roots_with_multiplicity(coeffs: &[f64], lo: f64, hi: f64) -> Result<Vec<(f64, u32)>> {
    let mut coeffs = coeffs.to_vec();
    while coeffs.last() == Some(&0.0) {
        coeffs.pop();
    }
    if coeffs.len() < 2 {
        return invalid("root isolation needs a polynomial of degree >= 1");
    }
    if !(lo < hi) {
        return invalid(format!("empty interval [{lo}, {hi}]"));
    }
    let degree = coeffs.len() - 1;
    let d = derivative(&coeffs);
    let pieces = 64 * degree;
    let grid: Vec<f64> = (0..=pieces)
        .map(|i| lo + (hi - lo) * i as f64 / pieces as f64)
        .collect();
    let scale: f64 = coeffs.iter().map(|c| c.abs()).sum();
    let roots = isolate_roots(
        |x| horner(&coeffs, x),
        |x| horner(&d, x),
        &grid,
        1e-15,
        |_| 1e-12 * scale,
    );
    // Newton polish, kept only when it lowers the residual and stays inside.
    Ok(roots
        .into_iter()
        .map(|(x, m)| {
            if m > 1 {
                return (x, m);
            }
            let slope = horner(&d, x);
            if slope == 0.0 {
                return (x, m);
            }
            let polished = x - horner(&coeffs, x) / slope;
            let better = polished >= lo
                && polished <= hi
                && horner(&coeffs, polished).abs() < horner(&coeffs, x).abs();
            (if better { polished } else { x }, m)
        })
        .collect())
}

/// Real roots of the polynomial with ascending `coeffs` inside `[lo, hi]`;
/// a double root appears twice.
pub fn polynomial_roots_on_interval(coeffs: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>> {
    Ok(polynomial_roots_with_multiplicity(coeffs, lo, hi)?
        .into_iter()
        .flat_map(|(x, m)| std::iter::repeat_n(x, m as usize))
        .collect())
}

/// Least-squares slope of the staircase `N(k_n) = n` through the levels.
pub fn counting_function_check(spectrum: &Spectrum) -> Result<f64> {
    let levels = spectrum.levels();
    if levels.len() < 10 {
        return invalid(format!(
            "need at least 10 levels for a slope, got {}",
            levels.len()
        ));
    }
    let n = levels.len() as f64;
    let mean_k = levels.iter().sum::<f64>() / n;
    let mean_idx = (n + 1.0) / 2.0;
    let (mut cov, mut var) = (0.0, 0.0);
    for (i, &k) in levels.iter().enumerate() {
        let dk = k - mean_k;
        cov += dk * ((i + 1) as f64 - mean_idx);
        var += dk * dk;
    }
    Ok(cov / var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::config::{lambda_for_reflection, make_config};

    fn assert_close(actual: &[f64], expected: &[f64], tol: f64) {
        assert_eq!(actual.len(), expected.len(), "{actual:?} vs {expected:?}");
        for (a, e) in actual.iter().zip(expected) {
            assert!((a - e).abs() < tol, "{a} vs {e}");
        }
    }

    #[test]
    fn comb_when_step_at_wall() {
        let s = solve_spectrum_scan(&make_config(1.0, 0.5).unwrap(), 10.0).unwrap();
        assert_close(&s.roots, &[PI, 2.0 * PI, 3.0 * PI], 1e-10);
        assert_eq!(s.method, SolveMethod::DirectScan);
    }

    #[test]
    fn plain_box_without_step() {
        let s = solve_spectrum_scan(&make_config(2.0 / 3.0, 0.0).unwrap(), 10.0).unwrap();
        assert_close(&s.roots, &[PI, 2.0 * PI, 3.0 * PI], 1e-10);
    }

    #[test]
    fn equal_sigmas_give_half_spacing_comb() {
        let c = WellConfig::with_sigma_ratio(1.0, 0.5).unwrap();
        let s = solve_spectrum_scan(&c, 30.0).unwrap();
        let expected: Vec<f64> = (1..)
            .map(|n| PI * n as f64 / (2.0 * c.a))
            .take_while(|&k| k <= 30.0)
            .collect();
        assert_close(&s.roots, &expected, 1e-9);
    }

    #[test]
    fn residuals_are_small() {
        let c = make_config(0.37, 0.81).unwrap();
        let s = solve_spectrum_scan(&c, 200.0).unwrap();
        for (&k, res) in s.roots.iter().zip(s.residuals()) {
            assert!(res < 1e-10 * (1.0 + k), "k = {k}, residual {res}");
        }
        assert!(s.roots.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn scan_rejects_bad_ceiling() {
        let c = make_config(0.5, 0.5).unwrap();
        assert!(solve_spectrum_scan(&c, 0.0).is_err());
        assert!(solve_spectrum_scan(&c, -1.0).is_err());
    }

    #[test]
    fn chebyshev_three_one_families() {
        let r = 0.5;
        let a = 0.4;
        let s = solve_spectrum_chebyshev(3, 1, r, a / 2.0, 40.0).unwrap();
        let theta = ((1.0 + r).sqrt() / 2.0).acos();
        let mut expected = Vec::new();
        for n in -2..20 {
            for j in -1..=1 {
                let k = 2.0 * j as f64 / a * theta + 2.0 * PI * n as f64 / a;
                if k > 1e-9 && k <= 40.0 {
                    expected.push(k);
                }
            }
        }
        expected.sort_by(f64::total_cmp);
        assert_close(&s.roots, &expected, 1e-10);
    }

    #[test]
    fn chebyshev_r_zero_merges_into_unit_comb() {
        let s = solve_spectrum_chebyshev(3, 1, 0.0, 1.0 / 3.0, 20.0).unwrap();
        let expected: Vec<f64> = (1..=6).map(|n| PI * n as f64).collect();
        assert_close(&s.roots, &expected, 1e-10);
    }

    #[test]
    fn chebyshev_degenerate_ratio() {
        let s = solve_spectrum_chebyshev(1, 1, 0.4, 0.5, 20.0).unwrap();
        let expected: Vec<f64> = (1..=3).map(|n| 2.0 * PI * n as f64).collect();
        assert_close(&s.roots, &expected, 1e-12);
    }

    #[test]
    fn chebyshev_argument_checks() {
        assert!(solve_spectrum_chebyshev(4, 2, 0.3, 1.0, 10.0).is_err());
        assert!(solve_spectrum_chebyshev(2, 3, 0.3, 1.0, 10.0).is_err());
        assert!(solve_spectrum_chebyshev(3, 1, 1.0, 1.0, 10.0).is_err());
        assert!(solve_spectrum_chebyshev(3, 1, -0.1, 1.0, 10.0).is_err());
        assert!(solve_spectrum_chebyshev(3, 1, 0.1, 0.0, 10.0).is_err());
    }

    #[test]
    fn scan_matches_chebyshev_for_three_two() {
        let lambda = lambda_for_reflection(0.7).unwrap();
        let c = WellConfig::with_sigma_ratio(5.0, lambda).unwrap();
        let k_max = 200.0 / c.omega1;
        let scan = solve_spectrum_scan(&c, k_max).unwrap();
        let cheb = solve_spectrum_chebyshev(3, 2, c.r, c.omega1 / 3.0, k_max).unwrap();
        assert_close(&scan.roots, &cheb.roots, 1e-9);
    }

    #[test]
    fn polynomial_roots() {
        let r = polynomial_roots_on_interval(&[-1.5, 0.0, 4.0], -1.0, 1.0).unwrap();
        let x = 1.5f64.sqrt() / 2.0;
        assert_close(&r, &[-x, x], 1e-12);
        assert_close(&polynomial_roots_on_interval(&[0.0, 2.0], -1.0, 1.0).unwrap(), &[0.0], 1e-12);
        assert_close(
            &polynomial_roots_on_interval(&[-1.0, 0.0, 4.0], -1.0, 1.0).unwrap(),
            &[-0.5, 0.5],
            1e-12,
        );
        assert!(polynomial_roots_on_interval(&[3.0], -1.0, 1.0).is_err());
        assert!(polynomial_roots_on_interval(&[3.0, 0.0], -1.0, 1.0).is_err());
    }

    #[test]
    fn polynomial_double_root() {
        // (x − 0.3)² = x² − 0.6x + 0.09
        let r = polynomial_roots_on_interval(&[0.09, -0.6, 1.0], -1.0, 1.0).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|x| (x - 0.3).abs() < 1e-7));
    }

    #[test]
    fn close_pair_and_tangency_in_scan() {
        // cos-like bump that dips just below zero inside one grid interval.
        let f = |x: f64| (x - 1.0).powi(2) - 1e-6;
        let df = |x: f64| 2.0 * (x - 1.0);
        let roots = isolate_roots(f, df, &[0.5, 1.5], 1e-14, |_| 1e-12);
        assert_eq!(roots.len(), 2);
        assert!((roots[0].0 - 0.999).abs() < 1e-12);
        assert!((roots[1].0 - 1.001).abs() < 1e-12);
        let g = |x: f64| (x - 1.0).powi(2);
        let roots = isolate_roots(g, df, &[0.5, 1.7], 1e-14, |_| 1e-12);
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].1, 2);
        assert!((roots[0].0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn counting_slope() {
        let c = make_config(1.0, 0.5).unwrap();
        let s = solve_spectrum_scan(&c, 300.0).unwrap();
        let slope = counting_function_check(&s).unwrap();
        assert!((slope - 1.0 / PI).abs() < 1e-12);
        let short = solve_spectrum_scan(&c, 20.0).unwrap();
        assert!(counting_function_check(&short).is_err());
    }
}
