//! Periodic plane-wave lattice and band-limited field operators.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ParticleParams;

pub type CMatrix = DMatrix<Complex64>;

/// Largest admissible cutoff ratio `c|p_max| / mc²`.
pub const HARD_CUTOFF: f64 = 0.9;
pub const DEFAULT_CUTOFF: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub dimension: usize,
    pub sites: usize,
    pub period: f64,
    /// `ρ` in `c|p_max| ≤ ρ mc²`.
    pub cutoff: f64,
}

impl LatticeSpec {
    pub fn new(dimension: usize, sites: usize, period: f64, cutoff: f64) -> Result<Self> {
        let s = LatticeSpec { dimension, sites, period, cutoff };
        s.validate()?;
        Ok(s)
    }

    /// Period chosen so that the largest lattice momentum sits exactly at
    /// the cutoff.
    pub fn at_cutoff(dimension: usize, sites: usize, cutoff: f64, params: &ParticleParams) -> Result<Self> {
        let mut s = LatticeSpec { dimension, sites, period: 1.0, cutoff };
        s.validate()?;
        let n = (sites / 2 - 1) as f64 * (dimension as f64).sqrt();
        s.period = 2.0 * PI * params.hbar() * n / (cutoff * params.m() * params.c());
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension != 1 && self.dimension != 2 {
            return Err(Error::Config(format!("lattice dimension must be 1 or 2, got {}", self.dimension)));
        }
        if self.sites < 8 || self.sites % 2 != 0 {
            return Err(Error::Config(format!("sites per axis must be even and at least 8, got {}", self.sites)));
        }
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(Error::Config(format!("period must be positive, got {}", self.period)));
        }
        if !(self.cutoff > 0.0 && self.cutoff <= HARD_CUTOFF) {
            return Err(Error::Config(format!("cutoff ratio must lie in (0, {HARD_CUTOFF}], got {}", self.cutoff)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.sites as f64
    }

    /// Number of plane-wave modes, `N^dim`.
    pub fn modes(&self) -> usize {
        self.sites.pow(self.dimension as u32)
    }

    pub fn matrix_dim(&self) -> usize {
        4 * self.modes()
    }

    /// `2πħ/L`.
    pub fn momentum_quantum(&self, params: &ParticleParams) -> f64 {
        2.0 * PI * params.hbar() / self.period
    }

    /// Largest `|p|` over the lattice.
    pub fn max_momentum(&self, params: &ParticleParams) -> f64 {
        self.momentum_quantum(params) * (self.sites / 2 - 1) as f64 * (self.dimension as f64).sqrt()
    }

    pub fn check_cutoff(&self, params: &ParticleParams) -> Result<()> {
        self.validate()?;
        let ratio = params.c() * self.max_momentum(params) / params.rest_energy();
        if ratio > self.cutoff * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "lattice momenta reach c|p|/mc² = {ratio:.4}, above the cutoff {}; enlarge the period or reduce sites",
                self.cutoff
            )));
        }
        Ok(())
    }

    /// Mode number along one axis; the Nyquist slot (last index) carries no
    /// momentum and does not couple to the fields, which keeps the mode set
    /// symmetric under `n → −n`.
    pub fn axis_mode(&self, a: usize) -> Option<i64> {
        (a + 1 < self.sites).then(|| a as i64 - (self.sites as i64 / 2 - 1))
    }

    fn axis_index(&self, n: Option<i64>) -> usize {
        match n {
            Some(n) => (n + self.sites as i64 / 2 - 1) as usize,
            None => self.sites - 1,
        }
    }

    /// Per-axis indices of a flat mode index (x first).
    pub fn split(&self, idx: usize) -> [usize; 2] {
        if self.dimension == 1 {
            [idx, 0]
        } else {
            [idx / self.sites, idx % self.sites]
        }
    }

    fn join(&self, ax: usize, ay: usize) -> usize {
        if self.dimension == 1 {
            ax
        } else {
            ax * self.sites + ay
        }
    }

    /// Diagonal of `p_axis` in the mode basis.
    pub fn momentum(&self, axis: usize, params: &ParticleParams) -> Vec<f64> {
        let q = self.momentum_quantum(params);
        (0..self.modes())
            .map(|i| {
                if axis >= self.dimension {
                    return 0.0;
                }
                self.axis_mode(self.split(i)[axis]).map_or(0.0, |n| q * n as f64)
            })
            .collect()
    }

    /// Index permutation for `x → −x`.
    pub fn parity_permutation(&self) -> Vec<usize> {
        (0..self.modes())
            .map(|i| {
                let [ax, ay] = self.split(i);
                let flip = |a: usize| self.axis_index(self.axis_mode(a).map(|n| -n));
                self.join(flip(ax), if self.dimension == 2 { flip(ay) } else { 0 })
            })
            .collect()
    }

    /// Matrix of `f(x)` in the mode basis: `⟨n|f|n'⟩ = f̂_{n−n'}` along `x`,
    /// diagonal along `y`.
    pub fn toeplitz(&self, f: &TrigSeries) -> CMatrix {
        let m = self.modes();
        let mut out = CMatrix::zeros(m, m);
        if f.is_zero() {
            return out;
        }
        for i in 0..m {
            let [ix, iy] = self.split(i);
            let Some(ni) = self.axis_mode(ix) else { continue };
            for j in 0..m {
                let [jx, jy] = self.split(j);
                if iy != jy {
                    continue;
                }
                let Some(nj) = self.axis_mode(jx) else { continue };
                if let Some(c) = f.coeffs.get(&(ni - nj)) {
                    out[(i, j)] = *c;
                }
            }
        }
        out
    }
}

/// Trigonometric polynomial in `x` with period `L`: `Σ f̂_m e^{2πimx/L}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigSeries {
    pub period: f64,
    pub coeffs: BTreeMap<i64, Complex64>,
}

impl TrigSeries {
    pub fn zero(period: f64) -> Self {
        TrigSeries { period, coeffs: BTreeMap::new() }
    }

    /// `amp · sin(2πx/L)`.
    pub fn sin(amp: f64, period: f64) -> Self {
        let mut coeffs = BTreeMap::new();
        if amp != 0.0 {
            coeffs.insert(1, Complex64::new(0.0, -amp / 2.0));
            coeffs.insert(-1, Complex64::new(0.0, amp / 2.0));
        }
        TrigSeries { period, coeffs }
    }

    /// `amp · cos(2πx/L)`.
    pub fn cos(amp: f64, period: f64) -> Self {
        let mut coeffs = BTreeMap::new();
        if amp != 0.0 {
            coeffs.insert(1, Complex64::new(amp / 2.0, 0.0));
            coeffs.insert(-1, Complex64::new(amp / 2.0, 0.0));
        }
        TrigSeries { period, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.norm() == 0.0)
    }

    pub fn derivative(&self) -> Self {
        let k = 2.0 * PI / self.period;
        TrigSeries {
            period: self.period,
            coeffs: self.coeffs.iter().map(|(&m, &c)| (m, c * Complex64::new(0.0, k * m as f64))).collect(),
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let k = 2.0 * PI / self.period;
        self.coeffs.iter().map(|(&m, &c)| c * Complex64::from_polar(1.0, k * m as f64 * x)).sum()
    }

    /// Largest `|f(x)|` bound from the coefficients.
    pub fn amplitude(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(LatticeSpec::new(1, 64, 10.0, 0.5).is_ok());
        assert!(LatticeSpec::new(3, 64, 10.0, 0.5).is_err());
        assert!(LatticeSpec::new(1, 7, 10.0, 0.5).is_err());
        assert!(LatticeSpec::new(1, 6, 10.0, 0.5).is_err());
        assert!(LatticeSpec::new(1, 8, 10.0, 0.95).is_err());
        let p = ParticleParams::natural(0.0, 0.1);
        let s = LatticeSpec::new(1, 64, 10.0, 0.5).unwrap();
        assert!(matches!(s.check_cutoff(&p), Err(Error::Config(_))));
        let s = LatticeSpec::at_cutoff(2, 12, 0.5, &p).unwrap();
        assert!(s.check_cutoff(&p).is_ok());
        assert!((s.max_momentum(&p) - 0.5).abs() < 1e-14);
        assert_eq!(s.matrix_dim(), 576);
    }

    #[test]
    fn modes_are_symmetric_with_a_decoupled_nyquist_slot() {
        let s = LatticeSpec::new(1, 8, 1.0, 0.5).unwrap();
        let n: Vec<_> = (0..8).map(|a| s.axis_mode(a)).collect();
        assert_eq!(n[0], Some(-3));
        assert_eq!(n[6], Some(3));
        assert_eq!(n[7], None);
        let perm = s.parity_permutation();
        assert_eq!(perm[0], 6);
        assert_eq!(perm[3], 3);
        assert_eq!(perm[7], 7);
        let s2 = LatticeSpec::new(2, 8, 1.0, 0.5).unwrap();
        let perm = s2.parity_permutation();
        assert!((0..64).all(|i| perm[perm[i]] == i));
    }

    #[test]
    fn toeplitz_commutator_with_momentum_is_exact() {
        let p = ParticleParams::default();
        let s = LatticeSpec::new(1, 16, 7.0, 0.9).unwrap();
        let f = TrigSeries::sin(0.3, 7.0);
        let tf = s.toeplitz(&f);
        let px = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            s.momentum(0, &p).into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        ));
        let comm = &px * &tf - &tf * &px;
        let expect = s.toeplitz(&f.derivative()) * Complex64::new(0.0, -p.hbar());
        assert!((comm - expect).camax() < 1e-15);
    }

    #[test]
    fn series_evaluation_matches_trig_functions() {
        let f = TrigSeries::sin(0.7, 3.0);
        let g = TrigSeries::cos(0.7, 3.0);
        for x in [0.0, 0.4, 1.9] {
            let k = 2.0 * PI / 3.0;
            assert!((f.eval(x).re - 0.7 * (k * x).sin()).abs() < 1e-15);
            assert!((g.eval(x).re - 0.7 * (k * x).cos()).abs() < 1e-15);
            assert!((f.derivative().eval(x).re - 0.7 * k * (k * x).cos()).abs() < 1e-14);
        }
    }
}
