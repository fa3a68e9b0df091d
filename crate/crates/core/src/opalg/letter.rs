//! Alphabet of operator words: kinematic momenta and field symbols.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    E,
    B,
    /// Homogeneous electric field: commutes with every `π_i`.
    UniformE,
    /// Homogeneous magnetic field.
    UniformB,
}

impl FieldKind {
    pub fn is_uniform(self) -> bool {
        matches!(self, FieldKind::UniformE | FieldKind::UniformB)
    }

    fn symbol(self) -> &'static str {
        match self {
            FieldKind::E => "E",
            FieldKind::B => "B",
            FieldKind::UniformE => "E⁰",
            FieldKind::UniformB => "B⁰",
        }
    }
}

/// `∂_{d1}∂_{d2}… F_comp` with derivative indices kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Field {
    pub kind: FieldKind,
    pub comp: u8,
    pub derivs: Vec<u8>,
}

pub const MAX_DERIVATIVES: usize = 2;

/// Result of differentiating a field symbol.
pub enum Derived {
    Zero,
    /// Beyond second order; dropped from the truncated algebra.
    Truncated,
    Field(Field),
}

impl Field {
    pub fn new(kind: FieldKind, comp: usize) -> Field {
        Field { kind, comp: comp as u8, derivs: Vec::new() }
    }

    pub fn with_derivs(kind: FieldKind, comp: usize, derivs: &[usize]) -> Field {
        let mut d: Vec<u8> = derivs.iter().map(|&x| x as u8).collect();
        d.sort_unstable();
        Field { kind, comp: comp as u8, derivs: d }
    }

    pub fn derive(&self, i: u8) -> Derived {
        if self.kind.is_uniform() {
            return Derived::Zero;
        }
        if self.derivs.len() >= MAX_DERIVATIVES {
            return Derived::Truncated;
        }
        let mut d = self.derivs.clone();
        d.push(i);
        d.sort_unstable();
        Derived::Field(Field { derivs: d, ..self.clone() })
    }

    /// `∂_3 B_3` rewritten through `∇·B = 0`, as `(−1, ∂_1 B_1)` and
    /// `(−1, ∂_2 B_2)` with any further derivative carried along.
    pub fn eliminate_div_b(&self) -> Option<[Field; 2]> {
        if self.kind != FieldKind::B || self.comp != 2 {
            return None;
        }
        let k = self.derivs.iter().position(|&d| d == 2)?;
        let mut rest = self.derivs.clone();
        rest.remove(k);
        let mk = |c: u8| {
            let mut d = rest.clone();
            d.push(c);
            d.sort_unstable();
            Field { kind: FieldKind::B, comp: c, derivs: d }
        };
        Some([mk(0), mk(1)])
    }

    pub fn label(&self) -> String {
        let sub = ["₁", "₂", "₃"];
        let mut s = String::new();
        for &d in &self.derivs {
            s.push('∂');
            s.push_str(sub[d as usize]);
        }
        s.push_str(self.kind.symbol());
        s.push_str(sub[self.comp as usize]);
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    Field(Field),
    Pi(u8),
}

impl Letter {
    pub fn is_field(&self) -> bool {
        matches!(self, Letter::Field(_))
    }

    pub fn label(&self) -> String {
        match self {
            Letter::Field(f) => f.label(),
            Letter::Pi(i) => format!("π{}", ["₁", "₂", "₃"][*i as usize]),
        }
    }
}

pub type Word = Vec<Letter>;

/// Canonical words: at most one field letter, leftmost, then `π` indices
/// ascending, and no `∂_3 B_3` factor.
pub fn is_canonical(word: &[Letter]) -> bool {
    let fields = word.iter().filter(|l| l.is_field()).count();
    if fields > 1 || (fields == 1 && !word[0].is_field()) {
        return false;
    }
    if let Some(Letter::Field(f)) = word.first() {
        if f.eliminate_div_b().is_some() {
            return false;
        }
    }
    word.windows(2).all(|w| match (&w[0], &w[1]) {
        (Letter::Pi(a), Letter::Pi(b)) => a <= b,
        _ => true,
    })
}
