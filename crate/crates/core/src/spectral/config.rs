use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Well geometry: zero potential on `(0, a]`, the scaled step `λE` on
/// `(a, 1)`, hard walls outside. Everything else is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellConfig {
    pub a: f64,
    pub lambda: f64,
    pub eta: f64,
    pub sigma_l: f64,
    pub sigma_r: f64,
    pub r: f64,
    pub t: f64,
    pub omega1: f64,
    /// Signed `σ_L − σ_R`.
    pub omega2: f64,
}

pub fn make_config(a: f64, lambda: f64) -> Result<WellConfig> {
    WellConfig::new(a, lambda)
}

impl WellConfig {
    pub fn new(a: f64, lambda: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return invalid(format!("step position a = {a} must lie in (0, 1]"));
        }
        if !(0.0..1.0).contains(&lambda) {
            return invalid(format!(
                "step strength lambda = {lambda} must lie in [0, 1)"
            ));
        }
        let eta = (1.0 - lambda).sqrt();
        let sigma_l = a;
        let sigma_r = eta * (1.0 - a);
        let r = (1.0 - eta) / (1.0 + eta);
        // Equal to sqrt(1 − r²) but without cancellation as r → 1.
        let t = 2.0 * eta.sqrt() / (1.0 + eta);
        Ok(WellConfig {
            a,
            lambda,
            eta,
            sigma_l,
            sigma_r,
            r,
            t,
            omega1: sigma_l + sigma_r,
            omega2: sigma_l - sigma_r,
        })
    }

    /// The configuration with `σ_L = ratio · σ_R` at the given step strength.
    pub fn with_sigma_ratio(ratio: f64, lambda: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio.is_finite()) {
            return invalid(format!("sigma ratio {ratio} must be positive"));
        }
        if !(0.0..1.0).contains(&lambda) {
            return invalid(format!(
                "step strength lambda = {lambda} must lie in [0, 1)"
            ));
        }
        let eta = (1.0 - lambda).sqrt();
        let a = ratio * eta / (1.0 + ratio * eta);
        Self::new(a, lambda)
    }

    /// Whether the step sits at the right wall (`σ_R = 0`).
    pub fn step_at_wall(&self) -> bool {
        self.a == 1.0
    }

    /// Mean level density `(σ_L + σ_R)/π`.
    pub fn mean_density(&self) -> f64 {
        self.omega1 / std::f64::consts::PI
    }

    pub fn secular_params(&self) -> SecularParams {
        SecularParams {
            omega1: self.omega1,
            omega2: self.omega2,
            r: self.r,
        }
    }

    pub fn secular(&self, k: f64) -> f64 {
        self.secular_params().value(k)
    }
}

/// Step strength that produces reflection coefficient `r`.
pub fn lambda_for_reflection(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return invalid(format!("reflection coefficient r = {r} must lie in [0, 1)"));
    }
    let eta = (1.0 - r) / (1.0 + r);
    Ok(1.0 - eta * eta)
}

/// `sin(ω₁k) − r sin(ω₂k)`.
pub fn secular(k: f64, config: &WellConfig) -> f64 {
    config.secular(k)
}

/// Coefficients of the quantisation condition `sin(ω₁k) − r sin(ω₂k) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecularParams {
    pub omega1: f64,
    pub omega2: f64,
    pub r: f64,
}

impl SecularParams {
    pub fn value(&self, k: f64) -> f64 {
        (self.omega1 * k).sin() - self.r * (self.omega2 * k).sin()
    }

    pub fn derivative(&self, k: f64) -> f64 {
        self.omega1 * (self.omega1 * k).cos() - self.r * self.omega2 * (self.omega2 * k).cos()
    }

    pub fn mean_density(&self) -> f64 {
        self.omega1 / std::f64::consts::PI
    }
}
