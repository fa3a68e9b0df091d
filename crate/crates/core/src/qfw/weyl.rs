//! Weyl-ordered matrix functions `(X f(γ_π))_Weyl`, realized as the
//! truncated series `Σ fₙ (X xⁿ)_Weyl` with `x = π²/m²c²` and
//! `(X xⁿ)_Weyl = Σₗ xˡ X xⁿ⁻ˡ / (n+1)`.

use nalgebra::SymmetricEigen;
use serde::Serialize;

use super::hamiltonian::{cx, hermitian_part};
use super::lattice::CMatrix;
use crate::error::{Error, Result};
use crate::params::ParticleParams;

/// Certified bound on the dropped tail.
pub const TAIL_TOLERANCE: f64 = 1e-12;
const MAX_TERMS: usize = 5000;

/// Functions of `γ_π = √(1+x)` that occur in the transformed Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GammaFn {
    /// `γ`
    Gamma,
    /// `1/γ`
    InvGamma,
    /// `1/(γ+1)`
    InvGammaPlusOne,
    /// `1/(γ(γ+1))`
    InvGammaGammaPlusOne,
}

/// `C(α, n)` for `n = 0..len`.
fn binomials(alpha: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut c = 1.0;
    for n in 0..len {
        out.push(c);
        c *= (alpha - n as f64) / (n as f64 + 1.0);
    }
    out
}

impl GammaFn {
    /// Taylor coefficients in `x`. Uses `1/(γ+1) = (γ−1)/x` and
    /// `1/(γ(γ+1)) = (1 − 1/γ)/x`.
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            GammaFn::Gamma => binomials(0.5, len),
            GammaFn::InvGamma => binomials(-0.5, len),
            GammaFn::InvGammaPlusOne => binomials(0.5, len + 1)[1..].to_vec(),
            GammaFn::InvGammaGammaPlusOne => binomials(-0.5, len + 1)[1..].iter().map(|c| -c).collect(),
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        let g = (1.0 + x).sqrt();
        match self {
            GammaFn::Gamma => g,
            GammaFn::InvGamma => 1.0 / g,
            GammaFn::InvGammaPlusOne => 1.0 / (g + 1.0),
            GammaFn::InvGammaGammaPlusOne => 1.0 / (g * (g + 1.0)),
        }
    }
}

/// Bound on `Σ_{n≥N} |fₙ| rⁿ` when every `|fₙ| ≤ 1`.
pub fn tail_bound(terms: usize, r: f64) -> f64 {
    if r == 0.0 {
        0.0
    } else {
        r.powi(terms as i32) / (1.0 - r)
    }
}

/// Eigenbasis of `π²` and the series truncation for one lattice
/// configuration.
#[derive(Debug, Clone)]
pub struct WeylContext {
    u: CMatrix,
    /// Eigenvalues of `π²/m²c²`.
    x: Vec<f64>,
    pub spectral_radius: f64,
    pub terms: usize,
    pub tail: f64,
}

impl WeylContext {
    pub fn new(pi_squared: &CMatrix, params: &ParticleParams) -> Result<Self> {
        let eig = SymmetricEigen::new(hermitian_part(pi_squared));
        let mc2 = (params.m() * params.c()).powi(2);
        let x: Vec<f64> = eig.eigenvalues.iter().map(|&d| (d / mc2).max(0.0)).collect();
        let r = x.iter().copied().fold(0.0, f64::max);
        if r >= 1.0 {
            return Err(Error::SeriesTruncation(format!(
                "spectral radius of π²/m²c² is {r:.4} ≥ 1, the γ_π series diverges; use a larger mass or smaller lattice momenta"
            )));
        }
        // every coefficient of the four functions is bounded by 1 in magnitude
        let mut terms = 1;
        while tail_bound(terms, r) >= TAIL_TOLERANCE {
            terms += 1;
            if terms > MAX_TERMS {
                return Err(Error::SeriesTruncation(format!(
                    "spectral radius {r:.6} needs more than {MAX_TERMS} series terms for a tail below {TAIL_TOLERANCE:e}; use a larger mass or smaller lattice momenta"
                )));
            }
        }
        Ok(WeylContext { u: eig.eigenvectors, x, spectral_radius: r, terms, tail: tail_bound(terms, r) })
    }

    /// `Σₙ fₙ hₙ(a,b)/(n+1)`, `hₙ(a,b) = Σₗ aˡ bⁿ⁻ˡ`.
    fn kernel(&self, f: GammaFn) -> CMatrix {
        let c = f.coefficients(self.terms);
        let m = self.x.len();
        CMatrix::from_fn(m, m, |i, j| {
            let (a, b) = (self.x[i], self.x[j]);
            let (mut h, mut bn, mut sum) = (1.0, 1.0, c[0]);
            for (n, cn) in c.iter().enumerate().skip(1) {
                bn *= b;
                h = a * h + bn;
                sum += cn * h / (n as f64 + 1.0);
            }
            cx(sum)
        })
    }

    /// `(X f(γ_π))_Weyl`.
    pub fn apply(&self, x: &CMatrix, f: GammaFn) -> CMatrix {
        let inner = self.u.adjoint() * x * &self.u;
        let g = self.kernel(f);
        &self.u * inner.component_mul(&g) * self.u.adjoint()
    }

    /// `f(γ_π)` from the same truncated series.
    pub fn function(&self, f: GammaFn) -> CMatrix {
        let c = f.coefficients(self.terms);
        let d = nalgebra::DVector::from_iterator(
            self.x.len(),
            self.x.iter().map(|&a| cx(c.iter().rev().fold(0.0, |acc, cn| acc * a + cn))),
        );
        &self.u * CMatrix::from_diagonal(&d) * self.u.adjoint()
    }

    /// Eigenvalues of `γ_π − 1` in ascending order of `π²`.
    pub fn gamma_minus_one(&self) -> Vec<f64> {
        self.x.iter().map(|&a| (1.0 + a).sqrt() - 1.0).collect()
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn coefficients_match_function_values() {
        for f in [GammaFn::Gamma, GammaFn::InvGamma, GammaFn::InvGammaPlusOne, GammaFn::InvGammaGammaPlusOne] {
            let c = f.coefficients(80);
            assert!(c.iter().all(|v| v.abs() <= 1.0));
            for x in [0.0, 0.1, 0.3] {
                let s: f64 = c.iter().rev().fold(0.0, |acc, cn| acc * x + cn);
                assert!((s - f.eval(x)).abs() < 1e-14, "{f:?} {x}");
            }
        }
    }

    fn random_hermitian(m: usize, seed: u64, scale: f64) -> CMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = CMatrix::from_fn(m, m, |_, _| {
            num::complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        hermitian_part(&a) * cx(scale)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        // oracle: Σ fₙ (aⁿ⁺¹ − bⁿ⁺¹)/((n+1)(a−b)) is the divided difference of ∫f
        #[test]
        fn weyl_kernel_is_a_divided_difference(seed in 0u64..10_000) {
            let p = ParticleParams::natural(1.0, 0.0);
            let pi2 = {
                let h = random_hermitian(6, seed, 1.0);
                let s = &h * &h;
                let top = SymmetricEigen::new(s.clone()).eigenvalues.amax();
                s * cx(0.3 / top)
            };
            let ctx = WeylContext::new(&pi2, &p).unwrap();
            let x = random_hermitian(6, seed + 1, 1.0);
            let got = ctx.apply(&x, GammaFn::InvGamma);
            // antiderivative of (1+x)^{-1/2} is 2√(1+x)
            let anti = |t: f64| 2.0 * (1.0 + t).sqrt();
            let u = ctx.eigenvectors();
            let inner = u.adjoint() * &x * u;
            let k = CMatrix::from_fn(6, 6, |i, j| {
                let (a, b) = (ctx.x[i], ctx.x[j]);
                cx(if (a - b).abs() < 1e-9 { GammaFn::InvGamma.eval(0.5 * (a + b)) } else { (anti(a) - anti(b)) / (a - b) })
            });
            let want = u * inner.component_mul(&k) * u.adjoint();
            prop_assert!((got - want).camax() < 1e-10);
        }

        // commuting X reduces to the plain product X f
        #[test]
        fn commuting_argument_reduces_to_product(seed in 0u64..10_000) {
            let p = ParticleParams::natural(1.0, 0.0);
            let h = random_hermitian(5, seed, 1.0);
            let s = &h * &h;
            let pi2 = &s * cx(0.5 / SymmetricEigen::new(s.clone()).eigenvalues.amax());
            let ctx = WeylContext::new(&pi2, &p).unwrap();
            let x = &pi2 * &pi2 + &pi2;
            let got = ctx.apply(&x, GammaFn::InvGammaPlusOne);
            let want = &x * ctx.function(GammaFn::InvGammaPlusOne);
            prop_assert!((got - want).camax() < 1e-12);
        }
    }

    #[test]
    fn low_order_terms_follow_the_definition() {
        // with f = 1 + f₁x + f₂x² truncated by hand
        let p = ParticleParams::natural(1.0, 0.0);
        let h = random_hermitian(4, 3, 0.05);
        let pi2 = &h * &h;
        let ctx = WeylContext::new(&pi2, &p).unwrap();
        let x = random_hermitian(4, 9, 1.0);
        let c = GammaFn::InvGamma.coefficients(3);
        let explicit = &x * cx(c[0])
            + (&pi2 * &x + &x * &pi2) * cx(c[1] / 2.0)
            + (&pi2 * &pi2 * &x + &pi2 * &x * &pi2 + &x * &pi2 * &pi2) * cx(c[2] / 3.0);
        let got = ctx.apply(&x, GammaFn::InvGamma);
        let r = ctx.spectral_radius;
        assert!((got - explicit).camax() < 10.0 * r.powi(3));
    }

    #[test]
    fn divergent_series_is_rejected() {
        let p = ParticleParams::natural(1.0, 0.0);
        let pi2 = CMatrix::identity(3, 3) * cx(1.2);
        assert!(matches!(WeylContext::new(&pi2, &p), Err(Error::SeriesTruncation(_))));
        let ok = WeylContext::new(&(CMatrix::identity(3, 3) * cx(0.25)), &p).unwrap();
        assert!(ok.tail < TAIL_TOLERANCE);
    }
}
