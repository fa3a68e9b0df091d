//! The symbolic series expansion instantiated on the lattice and applied to
//! vectors, compared with the exact transform.

use std::collections::BTreeMap;

use nalgebra::{DVector, Matrix4};
use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::eriksen::eriksen_fw;
use super::hamiltonian::{hamiltonian_from_ops, LatticeOps};
use super::lattice::{CMatrix, LatticeSpec};
use crate::error::Result;
use crate::opalg::coeff::{binomial, coef_to_f64, q, to_f64};
use crate::opalg::{series_sqrt_expand, Case, Letter, OpExpr, Word};
use crate::params::ParticleParams;

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    pub lattice: LatticeSpec,
    pub lambda: f64,
    pub order: u32,
    pub words: usize,
    /// Max entry of `H'_series − H'_exact` over the probed columns.
    pub difference: f64,
    pub tail_bound: f64,
    pub field_bound: f64,
    pub spectral_radius: f64,
}

impl CrossCheck {
    pub fn tolerance(&self) -> f64 {
        self.tail_bound + self.field_bound
    }

    pub fn holds(&self) -> bool {
        self.difference <= self.tolerance()
    }
}

fn scalar_value(powers: &[i8; 5], p: &ParticleParams) -> f64 {
    let v = [p.hbar(), p.c(), p.m(), p.e(), p.mu_prime()];
    powers.iter().zip(v).map(|(&k, x)| x.powi(k as i32)).product()
}

/// Per-word `4×4` coefficient matrices with the scalar symbols evaluated.
fn instantiate(x: &OpExpr, p: &ParticleParams) -> BTreeMap<Word, Matrix4<Complex64>> {
    let mut out: BTreeMap<Word, Matrix4<Complex64>> = BTreeMap::new();
    for (k, c) in x.terms() {
        let (re, im) = coef_to_f64(c);
        let v = Complex64::new(re, im) * scalar_value(&k.powers, p);
        let s = k.slot.matrix();
        *out.entry(k.word.clone()).or_insert_with(Matrix4::zeros) += Matrix4::from_fn(|i, j| s[i][j]) * v;
    }
    out
}

fn letter_matrix(l: &Letter, ops: &LatticeOps) -> CMatrix {
    match l {
        Letter::Pi(i) => ops.pi[*i as usize].clone(),
        Letter::Field(f) => ops.field(f.kind, f.comp as usize, &f.derivs),
    }
}

/// `Σ_words (slot ⊗ word) v`.
fn apply_series(
    series: &BTreeMap<Word, Matrix4<Complex64>>,
    ops: &LatticeOps,
    v: &DVector<Complex64>,
) -> DVector<Complex64> {
    let m = ops.spec.modes();
    let mut cache: BTreeMap<Letter, CMatrix> = BTreeMap::new();
    let mut out = DVector::zeros(4 * m);
    'words: for (word, coef) in series {
        let mut comps: Vec<DVector<Complex64>> = (0..4).map(|s| v.rows(s * m, m).into_owned()).collect();
        for l in word.iter().rev() {
            let mat = cache.entry(l.clone()).or_insert_with(|| letter_matrix(l, ops));
            if mat.iter().all(|z| z.norm() == 0.0) {
                continue 'words;
            }
            for c in comps.iter_mut() {
                *c = &*mat * &*c;
            }
        }
        for r in 0..4 {
            for s in 0..4 {
                if coef[(r, s)].norm() != 0.0 {
                    let mut dst = out.rows_mut(r * m, m);
                    dst += &comps[s] * coef[(r, s)];
                }
            }
        }
    }
    out
}

/// Compares `series_sqrt_expand(I, order)` on the lattice with the exact
/// transform on randomly chosen columns.
pub fn opalg_crosscheck(
    spec: &LatticeSpec,
    lambda: f64,
    params: &ParticleParams,
    order: u32,
    probes: usize,
    seed: u64,
) -> Result<CrossCheck> {
    compare_series(&series_sqrt_expand(Case::I, order), spec, lambda, params, order, probes, seed)
}

pub(crate) fn compare_series(
    expr: &OpExpr,
    spec: &LatticeSpec,
    lambda: f64,
    params: &ParticleParams,
    order: u32,
    probes: usize,
    seed: u64,
) -> Result<CrossCheck> {
    let ops = LatticeOps::new(Case::I, spec, lambda, params)?;
    let h = hamiltonian_from_ops(&ops);
    let exact = eriksen_fw(&h, params)?;
    let mc2 = params.rest_energy();
    // spectrum of Ω/m²c² from H² = m²c⁴ + c²Ω
    let r = h.spectrum().iter().map(|e| ((e / mc2).powi(2) - 1.0).abs()).fold(0.0, f64::max);
    let next = to_f64(&binomial(&q(1, 2), order + 1)).abs();
    let tail_bound = mc2 * next * r.powi(order as i32 + 1) / (1.0 - r);
    let series = instantiate(expr, params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = spec.matrix_dim();
    let mut difference: f64 = 0.0;
    for _ in 0..probes {
        let col = rng.gen_range(0..dim);
        let mut v = DVector::zeros(dim);
        v[col] = Complex64::new(1.0, 0.0);
        let d = apply_series(&series, &ops, &v) - exact.matrix.column(col);
        difference = difference.max(d.camax());
    }
    Ok(CrossCheck {
        lattice: *spec,
        lambda,
        order,
        words: series.len(),
        difference,
        tail_bound,
        field_bound: lambda * lambda * mc2,
        spectral_radius: r,
    })
}
