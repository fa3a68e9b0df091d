//! Weyl ordering, symmetrized products and the square-root series of the
//! even Hamiltonian.

use serde::{Deserialize, Serialize};

use super::coeff::{binomial, frac, int, one, powers, q, re, Coef, Powers, C, E, HBAR, M, MU, NO_POWERS};
use super::expr::{cross, dot, field_vector, pi_squared, pi_vector, OpExpr};
use super::letter::{Field, FieldKind};
use super::slot::Slot;
use crate::error::{Error, Result};

/// Which field couples: the charge to a static magnetic field, or the
/// anomalous moment of a neutral particle to a static electric field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    #[serde(rename = "I")]
    I,
    #[serde(rename = "II")]
    II,
}

impl Case {
    pub fn label(self) -> &'static str {
        match self {
            Case::I => "I",
            Case::II => "II",
        }
    }

    /// Case II is a neutral particle.
    fn restrict(self, x: OpExpr) -> OpExpr {
        match self {
            Case::I => x,
            Case::II => x.set_zero(E),
        }
    }
}

fn times(a: &OpExpr, b: &OpExpr, case: Case) -> OpExpr {
    case.restrict(a.mul(b))
}

fn pi_squared_powers(n: u32, case: Case) -> Vec<OpExpr> {
    let p2 = pi_squared();
    let mut out = vec![OpExpr::one()];
    for k in 1..=n as usize {
        out.push(times(&out[k - 1], &p2, case));
    }
    out
}

/// `(X π^{2n})_Weyl = (1/(n+1)) Σ_l π^{2l} X π^{2n−2l}`. Every monomial of
/// `X` must carry exactly one field letter.
pub fn weyl_order(x: &OpExpr, n: u32) -> Result<OpExpr> {
    weyl_order_in(x, n, Case::I)
}

fn weyl_order_in(x: &OpExpr, n: u32, case: Case) -> Result<OpExpr> {
    if let Some((k, _)) = x.terms().find(|(k, _)| !k.has_field()) {
        return Err(Error::Input(format!(
            "weyl_order needs one field symbol per monomial, found field-free word of length {}",
            k.word.len()
        )));
    }
    let p = pi_squared_powers(n, case);
    let mut sum = OpExpr::zero();
    for l in 0..=n as usize {
        sum = sum.add(&times(&times(&p[l], x, case), &p[n as usize - l], case));
    }
    Ok(sum.scale(&frac(1, n as i64 + 1), &NO_POWERS))
}

/// `(1/4)[(π·F + F·π)π_j + π_j(π·F + F·π)]` for a vector operator `F`.
pub fn sym_dot_pipi_of(f: &[OpExpr; 3]) -> [OpExpr; 3] {
    let p = pi_vector();
    let s = dot(&p, f).add(&dot(f, &p));
    std::array::from_fn(|j| s.mul(&p[j]).add(&p[j].mul(&s)).scale(&frac(1, 4), &NO_POWERS))
}

/// `(1/2)(π×F − F×π)`.
pub fn sym_cross_of(f: &[OpExpr; 3]) -> [OpExpr; 3] {
    let p = pi_vector();
    let a = cross(&p, f);
    let b = cross(f, &p);
    std::array::from_fn(|i| a[i].sub(&b[i]).scale(&frac(1, 2), &NO_POWERS))
}

pub fn sym_dot_pipi(kind: FieldKind) -> [OpExpr; 3] {
    sym_dot_pipi_of(&field_vector(kind))
}

pub fn sym_cross(kind: FieldKind) -> [OpExpr; 3] {
    sym_cross_of(&field_vector(kind))
}

fn sigma_dot(v: &[OpExpr; 3]) -> OpExpr {
    (0..3).fold(OpExpr::zero(), |acc, i| acc.add(&OpExpr::slot(Slot::sigma(i)).mul(&v[i])))
}

fn div_e() -> OpExpr {
    (0..3).fold(OpExpr::zero(), |acc, i| acc.add(&OpExpr::field(Field::with_derivs(FieldKind::E, i, &[i]))))
}

fn beta() -> OpExpr {
    OpExpr::slot(Slot::BETA)
}

fn pw(p: &[(usize, i8)]) -> Powers {
    powers(p)
}

/// Field part `Y` of `Ω = π² + Y`.
pub fn omega_field_part(case: Case) -> OpExpr {
    match case {
        Case::I => sigma_dot(&field_vector(FieldKind::B)).scale(&int(-1), &pw(&[(E, 1), (HBAR, 1), (C, -1)])),
        Case::II => {
            let darwin = beta().mul(&div_e()).scale(&int(-1), &pw(&[(MU, 1), (HBAR, 1), (C, -1)]));
            let so = beta().mul(&sigma_dot(&sym_cross(FieldKind::E))).scale(&int(2), &pw(&[(MU, 1), (C, -1)]));
            Case::II.restrict(darwin.add(&so))
        }
    }
}

pub fn omega(case: Case) -> OpExpr {
    pi_squared().add(&omega_field_part(case))
}

/// `Ωⁿ` by repeated multiplication.
pub fn omega_power(case: Case, n: u32) -> OpExpr {
    let o = omega(case);
    (0..n).fold(OpExpr::one(), |acc, _| times(&acc, &o, case))
}

/// `π^{2n} + n (Y π^{2n−2})_Weyl`, the induction form of `Ωⁿ`.
pub fn omega_power_closed(case: Case, n: u32) -> OpExpr {
    if n == 0 {
        return OpExpr::one();
    }
    let p = pi_squared_powers(n, case);
    let w = weyl_order_in(&omega_field_part(case), n - 1, case).expect("field part has a field in every term");
    p[n as usize].add(&w.scale(&int(n as i64), &NO_POWERS))
}

fn mc_factor(m_pow: i8, c_pow: i8) -> Powers {
    pw(&[(M, m_pow), (C, c_pow)])
}

/// `β̃mc² Σ_{n≤N} C(1/2, n) (Ω/m²c²)ⁿ`.
pub fn series_sqrt_expand(case: Case, order: u32) -> OpExpr {
    let o = omega(case);
    let half = q(1, 2);
    let mut pow = OpExpr::one();
    let mut sum = OpExpr::zero();
    for n in 0..=order {
        if n > 0 {
            pow = times(&pow, &o, case);
        }
        let k = 2 * n as i8;
        sum = sum.add(&pow.scale(&re(binomial(&half, n)), &mc_factor(1 - k, 2 - k)));
    }
    times(&beta(), &sum, case)
}

/// The closed Weyl-ordered form of the even Hamiltonian, expanded to order
/// `N` in `π²/m²c²`.
pub fn closed_form_hamiltonian(case: Case, order: u32) -> OpExpr {
    let half = q(1, 2);
    let minus_half = q(-1, 2);
    let p = pi_squared_powers(order, case);
    let mut sqrt = OpExpr::zero();
    for n in 0..=order {
        let k = 2 * n as i8;
        sqrt = sqrt.add(&p[n as usize].scale(&re(binomial(&half, n)), &mc_factor(1 - k, 2 - k)));
    }
    // field term multiplying 1/γ_π
    let x = match case {
        Case::I => {
            sigma_dot(&field_vector(FieldKind::B)).scale(&frac(-1, 2), &pw(&[(E, 1), (HBAR, 1), (M, -1), (C, -1)]))
        }
        Case::II => {
            let darwin = beta().mul(&div_e()).scale(&frac(-1, 2), &pw(&[(MU, 1), (HBAR, 1), (M, -1), (C, -1)]));
            let so = beta().mul(&sigma_dot(&sym_cross(FieldKind::E))).scale(&one(), &pw(&[(MU, 1), (M, -1), (C, -1)]));
            Case::II.restrict(darwin.add(&so))
        }
    };
    let mut inv_gamma = OpExpr::zero();
    for k in 0..order {
        let w = weyl_order_in(&x, k, case).expect("field term has a field in every monomial");
        let kk = 2 * k as i8;
        inv_gamma = inv_gamma.add(&w.scale(&re(binomial(&minus_half, k)), &mc_factor(-kk, -kk)));
    }
    times(&beta(), &sqrt.add(&inv_gamma), case)
}

#[derive(Debug, Clone)]
pub struct CaseVerification {
    pub case: Case,
    pub order: u32,
    pub discrepancy: OpExpr,
    pub series_terms: usize,
}

impl CaseVerification {
    pub fn is_exact(&self) -> bool {
        self.discrepancy.is_zero()
    }
}

/// Closed form minus series; zero means the two agree identically through
/// order `N`.
pub fn verify_case(case: Case, order: u32) -> CaseVerification {
    let series = series_sqrt_expand(case, order);
    let discrepancy = closed_form_hamiltonian(case, order).sub(&series);
    CaseVerification { case, order, discrepancy, series_terms: series.len() }
}

/// Scalar coefficient of the field-free word `π_{i1}…π_{ik}` at the given
/// slot and powers.
pub fn coefficient_of(x: &OpExpr, slot: Slot, p: Powers, pis: &[usize]) -> Coef {
    let word = pis.iter().map(|&i| super::letter::Letter::Pi(i as u8)).collect();
    x.coefficient(&super::expr::Key { word, slot, powers: p })
}
