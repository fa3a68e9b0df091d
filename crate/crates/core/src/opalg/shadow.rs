//! Numeric shadow of an expression: commuting scalars replaced by random
//! rationals and the Dirac slot by a randomly conjugated representation.
//! Words stay symbolic, so an exact identity must vanish word by word.

use std::collections::BTreeMap;

use nalgebra::Matrix4;
use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::coeff::coef_to_f64;
use super::expr::OpExpr;
use super::letter::Word;
use super::slot::Slot;

#[derive(Debug, Clone)]
pub struct ShadowEnv {
    /// Values of `(ħ, c, m, e, μ')`.
    pub scalars: [f64; 5],
    sim: Matrix4<Complex64>,
    sim_inv: Matrix4<Complex64>,
}

impl ShadowEnv {
    pub fn random(seed: u64) -> ShadowEnv {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scalars = std::array::from_fn(|_| rng.gen_range(2..=9) as f64 / rng.gen_range(2..=7) as f64);
        loop {
            let sim = Matrix4::identity()
                + Matrix4::from_fn(|_, _| Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)));
            if let Some(inv) = sim.try_inverse() {
                return ShadowEnv { scalars, sim, sim_inv: inv };
            }
        }
    }

    pub fn slot_matrix(&self, s: Slot) -> Matrix4<Complex64> {
        let m = s.matrix();
        self.sim * Matrix4::from_fn(|i, j| m[i][j]) * self.sim_inv
    }

    fn scalar(&self, p: &[i8; 5]) -> f64 {
        p.iter().zip(self.scalars).map(|(&k, v)| v.powi(k as i32)).product()
    }
}

/// Per-word 4×4 coefficient matrices.
pub fn shadow(x: &OpExpr, env: &ShadowEnv) -> BTreeMap<Word, Matrix4<Complex64>> {
    let mut out: BTreeMap<Word, Matrix4<Complex64>> = BTreeMap::new();
    for (k, c) in x.terms() {
        let (re, im) = coef_to_f64(c);
        let v = Complex64::new(re, im) * env.scalar(&k.powers);
        *out.entry(k.word.clone()).or_insert_with(Matrix4::zeros) += env.slot_matrix(k.slot) * v;
    }
    out
}

/// Largest matrix entry over all words; zero for an identity.
pub fn shadow_norm(x: &OpExpr, env: &ShadowEnv) -> f64 {
    shadow(x, env).values().flat_map(|m| m.iter().map(|z| z.norm()).collect::<Vec<_>>()).fold(0.0, f64::max)
}
