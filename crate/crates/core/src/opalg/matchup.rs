//! Ordering identities: the doubly symmetrized cross product against the
//! symmetrized `(π·B)π`, equality modulo reorderings over `π²`, and the
//! `α̃` product identity.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::Zero;
use serde::Serialize;

use super::coeff::{imag_unit, int, one, powers, Coef, Powers, C, E, HBAR, NO_POWERS};
use super::expr::{canonicalize, cross, dot, field_vector, pi_squared, pi_vector, Key, OpExpr};
use super::letter::{Field, FieldKind, Letter};
use super::ops::{sym_cross, sym_cross_of, sym_dot_pipi, weyl_order};
use super::slot::Slot;
use crate::vector::levi_civita3;

type Row = BTreeMap<Key, Coef>;

fn grade(k: &Key) -> usize {
    k.word.len() + k.field().map_or(0, |f| f.derivs.len()) - usize::from(k.has_field())
}

// ħ power minus derivative count; unchanged by every rewrite
fn level(k: &Key) -> i32 {
    k.powers[HBAR] as i32 - k.field().map_or(0, |f| f.derivs.len() as i32)
}

fn class(k: &Key) -> (Slot, Powers, i32, usize) {
    let mut p = k.powers;
    p[HBAR] = 0;
    (k.slot, p, level(k), grade(k))
}

fn multisets(len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for a in 0..=len {
        for b in 0..=len - a {
            let c = len - a - b;
            let mut w = vec![0u8; a];
            w.extend(std::iter::repeat_n(1u8, b));
            w.extend(std::iter::repeat_n(2u8, c));
            out.push(w);
        }
    }
    out
}

fn derivative_sets(max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    if max >= 1 {
        out.extend((0..3).map(|i| vec![i]));
    }
    if max >= 2 {
        for i in 0..3 {
            for j in i..3 {
                out.push(vec![i, j]);
            }
        }
    }
    out
}

fn pis(w: &[u8]) -> OpExpr {
    w.iter().fold(OpExpr::one(), |acc, &i| acc.mul(&OpExpr::pi(i as usize)))
}

/// Reordering generators `L(π²Z − Zπ²)R` and `L(π_jZπ_j − Zπ²)R` spanning
/// one class of monomials.
fn generators(kinds: &BTreeSet<FieldKind>, slot: Slot, p0: Powers, lvl: i32, g: usize) -> Vec<OpExpr> {
    let p2 = pi_squared();
    let pv = pi_vector();
    let mut out = Vec::new();
    if g < 2 {
        return out;
    }
    for &kind in kinds {
        for d in derivative_sets(2.min(g - 2)) {
            let hb = lvl + d.len() as i32;
            if hb < 0 {
                continue;
            }
            let mut p = p0;
            p[HBAR] = hb as i8;
            for comp in 0..3 {
                let z = OpExpr::field(Field::with_derivs(kind, comp, &d)).scale(&one(), &p);
                let z = OpExpr::slot(slot).mul(&z);
                let zp2 = z.mul(&p2);
                let g1 = p2.mul(&z).sub(&zp2);
                let g2 = (0..3).fold(OpExpr::zero(), |acc, j| acc.add(&pv[j].mul(&z).mul(&pv[j]))).sub(&zp2);
                let free = g - 2 - d.len();
                for nl in 0..=free {
                    for l in multisets(nl) {
                        let lo = pis(&l);
                        for r in multisets(free - nl) {
                            let ro = pis(&r);
                            out.push(lo.mul(&g1).mul(&ro));
                            out.push(lo.mul(&g2).mul(&ro));
                        }
                    }
                }
            }
        }
    }
    out
}

fn leading(row: &Row) -> Option<(Key, Coef)> {
    row.iter().next().map(|(k, c)| (k.clone(), c.clone()))
}

fn axpy(row: &mut Row, c: &Coef, other: &Row) {
    for (k, v) in other {
        let e = row.entry(k.clone()).or_insert_with(Coef::zero);
        *e = &*e - c * v;
        if e.is_zero() {
            row.remove(k);
        }
    }
}

/// Row echelon basis over exact coefficients.
#[derive(Default)]
struct Echelon {
    pivots: HashMap<Key, Row>,
}

impl Echelon {
    fn reduce(&self, mut row: Row) -> Row {
        while let Some((k, c)) = leading(&row) {
            match self.pivots.get(&k) {
                Some(p) => axpy(&mut row, &c, p),
                None => break,
            }
        }
        row
    }

    fn insert(&mut self, row: Row) {
        let row = self.reduce(row);
        if let Some((k, c)) = leading(&row) {
            let inv = one() / c;
            let row = row.into_iter().map(|(k, v)| (k, v * &inv)).collect();
            self.pivots.insert(k, row);
        }
    }
}

fn to_row(x: &OpExpr) -> Row {
    x.terms().map(|(k, c)| (k.clone(), c.clone())).collect()
}

/// True when `x` is a linear combination of reorderings over `π²`, i.e.
/// `x ∼ 0`.
pub fn is_reordering(x: &OpExpr) -> bool {
    let mut classes: BTreeMap<(Slot, Powers, i32, usize), Row> = BTreeMap::new();
    let mut kinds: BTreeMap<(Slot, Powers, i32, usize), BTreeSet<FieldKind>> = BTreeMap::new();
    for (k, c) in x.terms() {
        let Some(f) = k.field() else { return false };
        let cl = class(k);
        classes.entry(cl).or_default().insert(k.clone(), c.clone());
        kinds.entry(cl).or_default().insert(f.kind);
    }
    classes.into_iter().all(|(cl, row)| {
        let mut ech = Echelon::default();
        for g in generators(&kinds[&cl], cl.0, cl.1, cl.2, cl.3) {
            ech.insert(to_row(&g));
        }
        ech.reduce(row).is_empty()
    })
}

/// `a ∼ b`: equal up to reorderings over powers of `π²`.
pub fn similar(a: &OpExpr, b: &OpExpr) -> bool {
    is_reordering(&a.sub(b))
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchupReport {
    pub order: u32,
    pub commuting_limit: bool,
    pub homogeneous_strict: bool,
    pub epsilon_contraction: bool,
    /// Per Weyl order `n ≤ N`: the difference is a pure reordering.
    pub similar_by_order: Vec<bool>,
    /// Per Weyl order: the difference vanishes outright.
    pub strict_by_order: Vec<bool>,
}

impl MatchupReport {
    pub fn holds(&self) -> bool {
        self.commuting_limit
            && self.homogeneous_strict
            && self.epsilon_contraction
            && self.similar_by_order.iter().all(|&b| b)
    }
}

fn double_cross(kind: FieldKind) -> [OpExpr; 3] {
    sym_cross_of(&sym_cross(kind))
}

fn matchup_rhs(kind: FieldKind) -> [OpExpr; 3] {
    let s = sym_dot_pipi(kind);
    let f = field_vector(kind);
    std::array::from_fn(|j| s[j].sub(&weyl_order(&f[j], 1).expect("single field letter")))
}

// Σ_k ε_ijk ε_klm π_j π_l B_m against the δ-contracted form, both as raw
// words and after canonicalization
fn epsilon_contraction_holds() -> bool {
    let mut ok = true;
    for i in 0..3 {
        let mut lhs: BTreeMap<(usize, usize, usize), i64> = BTreeMap::new();
        let mut rhs: BTreeMap<(usize, usize, usize), i64> = BTreeMap::new();
        for j in 0..3 {
            for l in 0..3 {
                for m in 0..3 {
                    let e: i64 = (0..3).map(|k| (levi_civita3(i, j, k) * levi_civita3(k, l, m)) as i64).sum();
                    let d = i64::from(i == l && j == m) - i64::from(i == m && j == l);
                    for (map, v) in [(&mut lhs, e), (&mut rhs, d)] {
                        if v != 0 {
                            *map.entry((j, l, m)).or_default() += v;
                        }
                    }
                }
            }
        }
        ok &= lhs == rhs;
        let build = |map: &BTreeMap<(usize, usize, usize), i64>| {
            canonicalize(map.iter().map(|(&(j, l, m), &v)| {
                let w = vec![Letter::Pi(j as u8), Letter::Pi(l as u8), Letter::Field(Field::new(FieldKind::B, m))];
                (int(v), NO_POWERS, Slot::ONE, w)
            }))
        };
        // π×(π×B) with the operator order kept
        let p = pi_vector();
        let direct = cross(&p, &cross(&p, &field_vector(FieldKind::B)))[i].clone();
        ok &= build(&lhs) == build(&rhs) && build(&lhs) == direct;
    }
    ok
}

/// Compares `π×(π×B)` (both crosses symmetrized) with the symmetrized
/// `(π·B)π − (π²B)_Weyl`, also under `(· π^{2n})_Weyl` for `n ≤ N`.
pub fn verify_matchup(order: u32) -> MatchupReport {
    let lhs = double_cross(FieldKind::B);
    let rhs = matchup_rhs(FieldKind::B);
    let commuting_limit = (0..3).all(|j| lhs[j].commuting_limit() == rhs[j].commuting_limit());
    let lu = double_cross(FieldKind::UniformB);
    let ru = matchup_rhs(FieldKind::UniformB);
    let homogeneous_strict = (0..3).all(|j| lu[j] == ru[j]);
    let mut similar_by_order = Vec::new();
    let mut strict_by_order = Vec::new();
    for n in 0..=order {
        let mut sim = true;
        let mut strict = true;
        for j in 0..3 {
            let d = weyl_order(&lhs[j].sub(&rhs[j]), n).expect("every term carries B");
            strict &= d.is_zero();
            sim &= is_reordering(&d);
        }
        similar_by_order.push(sim);
        strict_by_order.push(strict);
    }
    MatchupReport {
        order,
        commuting_limit,
        homogeneous_strict,
        epsilon_contraction: epsilon_contraction_holds(),
        similar_by_order,
        strict_by_order,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PauliReport {
    pub momentum_momentum: bool,
    pub momentum_cross_reduces_to_b: bool,
    pub momentum_field: bool,
    pub field_momentum: bool,
    pub divergence_reduction: bool,
    pub commuting_symbols: bool,
}

impl PauliReport {
    pub fn holds(&self) -> bool {
        self.momentum_momentum
            && self.momentum_cross_reduces_to_b
            && self.momentum_field
            && self.field_momentum
            && self.divergence_reduction
            && self.commuting_symbols
    }
}

fn alpha_dot(v: &[OpExpr; 3]) -> OpExpr {
    (0..3).fold(OpExpr::zero(), |acc, i| acc.add(&OpExpr::slot(Slot::alpha(i)).mul(&v[i])))
}

fn sigma_dot(v: &[OpExpr; 3]) -> OpExpr {
    (0..3).fold(OpExpr::zero(), |acc, i| acc.add(&OpExpr::slot(Slot::sigma(i)).mul(&v[i])))
}

fn alpha_identity(a: &[OpExpr; 3], b: &[OpExpr; 3], neutral: bool) -> bool {
    let lhs = alpha_dot(a).mul(&alpha_dot(b));
    let rhs = dot(a, b).add(&sigma_dot(&cross(a, b)).scale(&imag_unit(), &NO_POWERS));
    if neutral {
        lhs.set_zero(E) == rhs.set_zero(E)
    } else {
        lhs == rhs
    }
}

/// `α̃·A α̃·B = A·B + iσ̃·(A×B)` for operator vectors built from `π` and
/// field symbols.
pub fn pauli_identity_check() -> PauliReport {
    let p = pi_vector();
    let ef = field_vector(FieldKind::E);
    let bf = field_vector(FieldKind::B);
    let pp = alpha_dot(&p).mul(&alpha_dot(&p));
    let hb_e_c = powers(&[(HBAR, 1), (E, 1), (C, -1)]);
    // π·π + iσ̃·(π×π) with π×π = i(ħe/c)B
    let expect = pi_squared().sub(&sigma_dot(&bf).scale(&one(), &hb_e_c));
    let pxp = cross(&p, &p);
    let cross_b = (0..3).all(|k| pxp[k] == bf[k].scale(&imag_unit(), &hb_e_c));
    // (p·E − E·p) = −iħ∇·E for a neutral particle
    let div: OpExpr =
        (0..3).fold(OpExpr::zero(), |acc, i| acc.add(&OpExpr::field(Field::with_derivs(FieldKind::E, i, &[i]))));
    let pe = dot(&p, &ef).sub(&dot(&ef, &p)).set_zero(E);
    let eu = field_vector(FieldKind::UniformE);
    let bu = field_vector(FieldKind::UniformB);
    PauliReport {
        momentum_momentum: alpha_identity(&p, &p, false) && pp == expect,
        momentum_cross_reduces_to_b: cross_b,
        momentum_field: alpha_identity(&p, &ef, true) && alpha_identity(&p, &bf, false),
        field_momentum: alpha_identity(&ef, &p, true) && alpha_identity(&bf, &p, false),
        divergence_reduction: pe == div.scale(&-imag_unit(), &powers(&[(HBAR, 1)])),
        commuting_symbols: alpha_identity(&eu, &p, false)
            && alpha_identity(&p, &bu, false)
            && (0..3).all(|k| cross(&p, &bu)[k] == cross(&bu, &p)[k].scale(&int(-1), &NO_POWERS)),
    }
}
