use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::config::WellConfig;
use super::roots::{solve_spectrum_scan, Spectrum};
use super::trace::{max_length_for_bound, TraceExpansion, DEFAULT_AMP_CUTOFF};
use crate::error::{invalid, Result};

/// Roots are summed only within this many widths of a grid point.
const WINDOW_WIDTHS: f64 = 10.0;
/// Required gap between the grid and the spectrum ceiling, in widths.
pub const EDGE_GUARD_WIDTHS: f64 = 5.0;

fn gaussian(x: f64, sigma: f64) -> f64 {
    (-0.5 * (x / sigma).powi(2)).exp() / (sigma * (2.0 * PI).sqrt())
}

/// Gaussian-broadened level density from the roots.
///
/// The comb runs over all real roots: the positive roots, their mirror
/// images at `−k_n`, and the trivial root at `k = 0`.
pub fn exact_density_smoothed(
    spectrum: &Spectrum,
    k_grid: &[f64],
    sigma_smooth: f64,
) -> Result<Vec<f64>> {
    if !(sigma_smooth > 0.0 && sigma_smooth.is_finite()) {
        return invalid(format!("smoothing width {sigma_smooth} must be positive"));
    }
    let Some(top) = k_grid.iter().copied().reduce(f64::max) else {
        return Ok(Vec::new());
    };
    if spectrum.k_max < top + EDGE_GUARD_WIDTHS * sigma_smooth {
        return invalid(format!(
            "spectrum ceiling {} must exceed the grid maximum {top} by {EDGE_GUARD_WIDTHS} widths",
            spectrum.k_max
        ));
    }
    let reach = WINDOW_WIDTHS * sigma_smooth;
    let roots = &spectrum.roots;
    Ok(k_grid
        .iter()
        .map(|&k| {
            let window = |centre: f64| {
                let lo = roots.partition_point(|&x| x < centre - reach);
                let hi = roots.partition_point(|&x| x <= centre + reach);
                lo..hi
            };
            let mut rho = gaussian(k, sigma_smooth);
            for i in window(k) {
                rho += spectrum.multiplicities[i] as f64 * gaussian(k - roots[i], sigma_smooth);
            }
            for i in window(-k) {
                rho += spectrum.multiplicities[i] as f64 * gaussian(k + roots[i], sigma_smooth);
            }
            rho
        })
        .collect())
}

/// Root-based and orbit-based densities on a common grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityComparison {
    pub config: WellConfig,
    pub sigma_smooth: f64,
    pub max_length: usize,
    pub k: Vec<f64>,
    pub exact: Vec<f64>,
    pub trace: Vec<f64>,
    pub diff: Vec<f64>,
    /// `‖trace − exact‖₂ / ‖exact‖₂` over the grid.
    pub relative_l2_error: f64,
    pub truncation_bound: f64,
    pub poisson_form: bool,
    pub level_count: usize,
}

/// Summary fields of a [`DensityComparison`] without the grid columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySummary {
    pub config: WellConfig,
    pub sigma_smooth: f64,
    pub max_length: usize,
    pub grid_points: usize,
    pub relative_l2_error: f64,
    pub truncation_bound: f64,
    pub poisson_form: bool,
    pub level_count: usize,
}

impl DensityComparison {
    pub fn summary(&self) -> DensitySummary {
        DensitySummary {
            config: self.config,
            sigma_smooth: self.sigma_smooth,
            max_length: self.max_length,
            grid_points: self.k.len(),
            relative_l2_error: self.relative_l2_error,
            truncation_bound: self.truncation_bound,
            poisson_form: self.poisson_form,
            level_count: self.level_count,
        }
    }
}

/// Grid points per smoothing width in [`compare_densities`].
pub const POINTS_PER_SIGMA: f64 = 4.0;

/// Evaluates both smoothed densities on `[k_min, k_max]`. With
/// `max_length = None` the primitive length is the smallest one whose
/// truncation bound is below `1e-3`.
pub fn compare_densities(
    config: &WellConfig,
    k_min: f64,
    k_max: f64,
    sigma_smooth: f64,
    max_length: Option<usize>,
) -> Result<DensityComparison> {
    if !(sigma_smooth > 0.0 && sigma_smooth.is_finite()) {
        return invalid(format!("smoothing width {sigma_smooth} must be positive"));
    }
    if !(k_min >= EDGE_GUARD_WIDTHS * sigma_smooth) {
        return invalid(format!(
            "k_min = {k_min} must be at least {EDGE_GUARD_WIDTHS} smoothing widths"
        ));
    }
    if !(k_max > k_min && k_max.is_finite()) {
        return invalid(format!("empty range [{k_min}, {k_max}]"));
    }
    let max_length = match max_length {
        Some(l) => l,
        None => max_length_for_bound(config, sigma_smooth, 1e-3)?,
    };
    let steps = ((k_max - k_min) / sigma_smooth * POINTS_PER_SIGMA).ceil().max(1.0) as usize;
    let k: Vec<f64> = (0..=steps)
        .map(|i| k_min + (k_max - k_min) * i as f64 / steps as f64)
        .collect();

    let spectrum = solve_spectrum_scan(config, k_max + 2.0 * WINDOW_WIDTHS * sigma_smooth)?;
    let exact = exact_density_smoothed(&spectrum, &k, sigma_smooth)?;
    let expansion = TraceExpansion::build(config, sigma_smooth, max_length, DEFAULT_AMP_CUTOFF)?;
    let trace: Vec<f64> = k.iter().map(|&x| expansion.density_at(x)).collect();
    let diff: Vec<f64> = trace.iter().zip(&exact).map(|(t, e)| t - e).collect();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();

    Ok(DensityComparison {
        config: *config,
        sigma_smooth,
        max_length: expansion.max_length,
        relative_l2_error: norm(&diff) / norm(&exact),
        truncation_bound: expansion.truncation_bound(),
        poisson_form: expansion.poisson_form,
        level_count: spectrum.level_count(),
        k,
        exact,
        trace,
        diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::config::make_config;

    #[test]
    fn narrow_comb_peak_height() {
        let c = make_config(1.0, 0.5).unwrap();
        let s = solve_spectrum_scan(&c, 40.0).unwrap();
        let sigma = 0.01;
        let peaks = exact_density_smoothed(&s, &[PI, 2.0 * PI, 3.0 * PI], sigma).unwrap();
        for p in peaks {
            assert!((p - 1.0 / (sigma * (2.0 * PI).sqrt())).abs() < 1e-6);
        }
    }

    #[test]
    fn empty_grid_and_guards() {
        let c = make_config(0.5, 0.5).unwrap();
        let s = solve_spectrum_scan(&c, 20.0).unwrap();
        assert!(exact_density_smoothed(&s, &[], 0.1).unwrap().is_empty());
        assert!(exact_density_smoothed(&s, &[19.9], 0.1).is_err());
        assert!(exact_density_smoothed(&s, &[5.0], 0.0).is_err());
        assert!(compare_densities(&c, 0.1, 10.0, 0.1, Some(4)).is_err());
        assert!(compare_densities(&c, 5.0, 4.0, 0.1, Some(4)).is_err());
    }

    #[test]
    fn half_spacing_comb_matches_fourier_form() {
        // Σ_n δ(k − πn/(2a)) = (2a/π) Σ_m e^{4imak}, smoothed.
        let c = WellConfig::with_sigma_ratio(1.0, 0.4).unwrap();
        let a = c.a;
        let sigma = 0.1 * PI / (2.0 * a);
        let s = solve_spectrum_scan(&c, 80.0).unwrap();
        let grid: Vec<f64> = (0..200).map(|i| 5.0 + i as f64 * 0.2).collect();
        let exact = exact_density_smoothed(&s, &grid, sigma).unwrap();
        for (&k, &e) in grid.iter().zip(&exact) {
            let mut fourier = 1.0;
            for m in 1..50 {
                let freq = 4.0 * m as f64 * a;
                fourier += 2.0 * (freq * k).cos() * (-0.5 * (freq * sigma).powi(2)).exp();
            }
            fourier *= 2.0 * a / PI;
            assert!((fourier - e).abs() < 1e-9, "k = {k}: {fourier} vs {e}");
        }
    }

    #[test]
    fn zero_reflection_comparison_is_tight() {
        let c = make_config(0.5, 0.0).unwrap();
        let cmp = compare_densities(&c, 5.0, 30.0, 0.1 / c.mean_density(), None).unwrap();
        assert!(cmp.relative_l2_error < 1e-3, "{}", cmp.relative_l2_error);
        assert_eq!(cmp.k.len(), cmp.exact.len());
        assert_eq!(cmp.diff.len(), cmp.trace.len());
    }
}
