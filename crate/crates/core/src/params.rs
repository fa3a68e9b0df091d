//! Particle parameters in Gaussian units.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mass, charge and magnetic moment of a spin-1/2 particle, plus the unit
/// constants. The gyromagnetic ratio and the anomalous moment are stored
/// together and kept consistent: `γ_m = e/(mc) + 2μ'/ħ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleParams {
    m: f64,
    e: f64,
    gamma_m: f64,
    mu_prime: f64,
    hbar: f64,
    c: f64,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

impl ParticleParams {
    /// Build from charge and anomalous moment.
    pub fn with_anomalous_moment(m: f64, e: f64, mu_prime: f64, hbar: f64, c: f64) -> Result<Self> {
        check_positive("m", m)?;
        check_positive("hbar", hbar)?;
        check_positive("c", c)?;
        if !e.is_finite() || !mu_prime.is_finite() {
            return Err(Error::Domain("charge and anomalous moment must be finite".into()));
        }
        let gamma_m = e / (m * c) + 2.0 * mu_prime / hbar;
        Ok(Self { m, e, gamma_m, mu_prime, hbar, c })
    }

    /// Build from charge and gyromagnetic ratio.
    pub fn with_gyromagnetic_ratio(m: f64, e: f64, gamma_m: f64, hbar: f64, c: f64) -> Result<Self> {
        check_positive("m", m)?;
        check_positive("hbar", hbar)?;
        check_positive("c", c)?;
        if !e.is_finite() || !gamma_m.is_finite() {
            return Err(Error::Domain("charge and gyromagnetic ratio must be finite".into()));
        }
        let mu_prime = (gamma_m - e / (m * c)) * hbar / 2.0;
        Ok(Self { m, e, gamma_m, mu_prime, hbar, c })
    }

    /// Natural-unit preset `ħ = c = m = 1`.
    pub fn natural(e: f64, mu_prime: f64) -> Self {
        Self::with_anomalous_moment(1.0, e, mu_prime, 1.0, 1.0).expect("finite preset")
    }

    /// Dirac particle (`g = 2`, no anomalous moment).
    pub fn dirac(m: f64, e: f64, hbar: f64, c: f64) -> Result<Self> {
        Self::with_anomalous_moment(m, e, 0.0, hbar, c)
    }

    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn e(&self) -> f64 {
        self.e
    }
    pub fn gamma_m(&self) -> f64 {
        self.gamma_m
    }
    pub fn mu_prime(&self) -> f64 {
        self.mu_prime
    }
    pub fn hbar(&self) -> f64 {
        self.hbar
    }
    pub fn c(&self) -> f64 {
        self.c
    }

    /// `e/(mc)`, the Dirac gyromagnetic ratio.
    pub fn dirac_ratio(&self) -> f64 {
        self.e / (self.m * self.c)
    }

    /// Total magnetic moment `μ = γ_m ħ / 2`.
    pub fn mu(&self) -> f64 {
        self.gamma_m * self.hbar / 2.0
    }

    /// Rest energy `mc²`.
    pub fn rest_energy(&self) -> f64 {
        self.m * self.c * self.c
    }

    /// Coefficient of the Darwin term, `(ħ²/4mc)(3e/(2mc) − γ_m)`.
    pub fn darwin_coefficient(&self) -> f64 {
        self.hbar * self.hbar / (4.0 * self.m * self.c) * (1.5 * self.dirac_ratio() - self.gamma_m)
    }
}

impl Default for ParticleParams {
    fn default() -> Self {
        Self::natural(1.0, 0.0)
    }
}
