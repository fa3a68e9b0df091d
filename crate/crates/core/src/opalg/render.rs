//! Text and JSON renderings of operator expressions.

use std::collections::BTreeMap;

use num::Zero;
use serde::Serialize;

use super::coeff::{fmt_coef, SCALAR_ASCII, SCALAR_NAMES};
use super::expr::{Key, OpExpr};

fn superscript(n: i8) -> String {
    const D: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    let mut s = String::new();
    if n < 0 {
        s.push('⁻');
    }
    for c in n.unsigned_abs().to_string().chars() {
        s.push(D[c.to_digit(10).unwrap() as usize]);
    }
    s
}

fn factors(k: &Key) -> Vec<String> {
    let mut out = Vec::new();
    for (i, &p) in k.powers.iter().enumerate() {
        match p {
            0 => {}
            1 => out.push(SCALAR_NAMES[i].to_string()),
            _ => out.push(format!("{}{}", SCALAR_NAMES[i], superscript(p))),
        }
    }
    if k.slot != super::slot::Slot::ONE {
        out.push(k.slot.label());
    }
    out.extend(k.word.iter().map(|l| l.label()));
    out
}

/// One term per line, e.g. `-i/2 ħ c⁻¹ e β̃σ̃₃ ∂₁B₃ π₂`.
pub fn to_text(x: &OpExpr) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.terms()
        .map(|(k, c)| {
            let f = factors(k);
            if f.is_empty() {
                fmt_coef(c)
            } else {
                format!("{} {}", fmt_coef(c), f.join(" "))
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonCoefficient {
    pub re: String,
    pub im: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonTerm {
    pub coefficient: JsonCoefficient,
    pub powers: BTreeMap<String, i8>,
    pub slot: [u8; 2],
    pub slot_label: String,
    pub word: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonExpr {
    pub terms: Vec<JsonTerm>,
    pub truncated_third_order: u64,
}

pub fn to_json(x: &OpExpr) -> JsonExpr {
    let terms = x
        .terms()
        .map(|(k, c)| JsonTerm {
            coefficient: JsonCoefficient { re: c.re.to_string(), im: c.im.to_string() },
            powers: k
                .powers
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(i, &p)| (SCALAR_ASCII[i].to_string(), p))
                .collect(),
            slot: [k.slot.rho, k.slot.sigma],
            slot_label: k.slot.label(),
            word: k.word.iter().map(|l| l.label()).collect(),
        })
        .collect();
    JsonExpr { terms, truncated_third_order: x.truncated_count() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::expr::OpExpr;

    #[test]
    fn commutator_renders() {
        let c = OpExpr::pi(0).commutator(&OpExpr::pi(1));
        assert_eq!(to_text(&c), "i ħ c⁻¹ e B₃");
        let j = to_json(&c);
        assert_eq!(j.terms.len(), 1);
        assert_eq!(j.terms[0].coefficient.im, "1");
        assert_eq!(j.terms[0].powers["c"], -1);
        assert_eq!(to_text(&OpExpr::zero()), "0");
    }
}
