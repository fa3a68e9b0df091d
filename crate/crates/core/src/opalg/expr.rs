//! Operator expressions truncated at linear order in the fields, kept in
//! canonical form: field letter leftmost, then `π` indices ascending.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;

use num::Zero;

use super::coeff::{add_powers, imag_unit, int, one, powers, Coef, Powers, C, E, HBAR, NO_POWERS};
use super::letter::{is_canonical, Derived, Field, FieldKind, Letter, Word};
use super::slot::{Phase, Slot};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub word: Word,
    pub slot: Slot,
    pub powers: Powers,
}

impl Key {
    pub fn has_field(&self) -> bool {
        self.word.first().is_some_and(Letter::is_field)
    }

    pub fn field(&self) -> Option<&Field> {
        match self.word.first() {
            Some(Letter::Field(f)) => Some(f),
            _ => None,
        }
    }
}

/// A formal sum of canonical monomials with exact coefficients. Every
/// constructor and operation returns canonical form, so `==` is equality of
/// operators within the truncated algebra.
#[derive(Debug, Clone, Default)]
pub struct OpExpr {
    terms: BTreeMap<Key, Coef>,
    truncated: u64,
}

/// Expressions are always stored canonically.
pub type CanonicalForm = OpExpr;

impl PartialEq for OpExpr {
    fn eq(&self, o: &Self) -> bool {
        self.terms == o.terms
    }
}

impl Eq for OpExpr {}

pub(crate) fn phase_coef(p: Phase) -> Coef {
    match p % 4 {
        0 => one(),
        1 => imag_unit(),
        2 => int(-1),
        _ => -imag_unit(),
    }
}

#[derive(Default)]
struct Normal {
    terms: Vec<(Coef, Powers, Word)>,
    truncated: u64,
}

#[derive(Default)]
struct Acc {
    map: HashMap<(Powers, Word), Coef>,
    truncated: u64,
}

impl Acc {
    fn push(&mut self, c: Coef, p: Powers, w: Word) {
        let e = self.map.entry((p, w)).or_insert_with(Coef::zero);
        *e = &*e + c;
    }

    fn absorb(&mut self, c: &Coef, p: &Powers, n: &Normal) {
        self.truncated += n.truncated;
        for (k, q, w) in &n.terms {
            self.push(c * k, add_powers(p, q), w.clone());
        }
    }

    fn finish(self) -> Normal {
        let mut terms: Vec<_> =
            self.map.into_iter().filter(|(_, c)| !c.is_zero()).map(|((p, w), c)| (c, p, w)).collect();
        terms.sort_by(|a, b| (&a.2, &a.1).cmp(&(&b.2, &b.1)));
        Normal { terms, truncated: self.truncated }
    }
}

thread_local! {
    static MEMO: RefCell<HashMap<Word, Rc<Normal>>> = RefCell::new(HashMap::new());
}

fn normalize(word: &[Letter]) -> Rc<Normal> {
    if let Some(n) = MEMO.with(|m| m.borrow().get(word).cloned()) {
        return n;
    }
    let n = Rc::new(normalize_uncached(word));
    MEMO.with(|m| m.borrow_mut().insert(word.to_vec(), n.clone()));
    n
}

fn splice(word: &[Letter], from: usize, to: usize, mid: Letter) -> Word {
    let mut w = word[..from].to_vec();
    w.push(mid);
    w.extend_from_slice(&word[to..]);
    w
}

fn normalize_uncached(word: &[Letter]) -> Normal {
    let mut acc = Acc::default();
    if word.iter().filter(|l| l.is_field()).count() > 1 {
        return Normal::default();
    }
    match word.iter().position(Letter::is_field) {
        Some(k) if k > 0 => {
            let (Letter::Pi(i), Letter::Field(f)) = (&word[k - 1], &word[k]) else { unreachable!() };
            let mut swapped = word.to_vec();
            swapped.swap(k - 1, k);
            acc.absorb(&one(), &NO_POWERS, &normalize(&swapped));
            // π_i F = F π_i − iħ ∂_i F
            match f.derive(*i) {
                Derived::Zero => {}
                Derived::Truncated => acc.truncated += 1,
                Derived::Field(g) => {
                    let w = splice(word, k - 1, k + 1, Letter::Field(g));
                    acc.absorb(&-imag_unit(), &powers(&[(HBAR, 1)]), &normalize(&w));
                }
            }
        }
        Some(_) => {
            let Letter::Field(f) = &word[0] else { unreachable!() };
            if let Some(parts) = f.eliminate_div_b() {
                for g in parts {
                    let w = splice(word, 0, 1, Letter::Field(g));
                    acc.absorb(&int(-1), &NO_POWERS, &normalize(&w));
                }
            } else {
                let mut w = word.to_vec();
                w[1..].sort_unstable();
                acc.push(one(), NO_POWERS, w);
            }
        }
        None => match word.windows(2).position(|w| w[0] > w[1]) {
            None => acc.push(one(), NO_POWERS, word.to_vec()),
            Some(k) => {
                let (Letter::Pi(j), Letter::Pi(i)) = (&word[k], &word[k + 1]) else { unreachable!() };
                let mut swapped = word.to_vec();
                swapped.swap(k, k + 1);
                acc.absorb(&one(), &NO_POWERS, &normalize(&swapped));
                // [π_j, π_i] = i(ħe/c) ε_jil B_l
                let l = 3 - i - j;
                let eps = crate::vector::levi_civita3(*j as usize, *i as usize, l as usize);
                let w = splice(word, k, k + 2, Letter::Field(Field::new(FieldKind::B, l as usize)));
                let c = imag_unit() * int(eps as i64);
                acc.absorb(&c, &powers(&[(HBAR, 1), (E, 1), (C, -1)]), &normalize(&w));
            }
        },
    }
    acc.finish()
}

/// Canonical form of a raw formal sum of `(coefficient, powers, slot, word)`.
/// Words with two or more field letters are dropped.
pub fn canonicalize<I>(raw: I) -> OpExpr
where
    I: IntoIterator<Item = (Coef, Powers, Slot, Word)>,
{
    let mut out = Builder::default();
    for (c, p, s, w) in raw {
        out.push_word(&c, &p, s, &w);
    }
    out.finish()
}

#[derive(Default)]
struct Builder {
    map: HashMap<Key, Coef>,
    truncated: u64,
}

impl Builder {
    fn push(&mut self, key: Key, c: Coef) {
        let e = self.map.entry(key).or_insert_with(Coef::zero);
        *e = &*e + c;
    }

    fn push_word(&mut self, c: &Coef, p: &Powers, slot: Slot, w: &[Letter]) {
        if is_canonical(w) {
            self.push(Key { word: w.to_vec(), slot, powers: *p }, c.clone());
            return;
        }
        let n = normalize(w);
        self.truncated += n.truncated;
        for (k, q, word) in &n.terms {
            self.push(Key { word: word.clone(), slot, powers: add_powers(p, q) }, c * k);
        }
    }

    fn finish(self) -> OpExpr {
        OpExpr { terms: self.map.into_iter().filter(|(_, c)| !c.is_zero()).collect(), truncated: self.truncated }
    }
}

impl OpExpr {
    pub fn zero() -> OpExpr {
        OpExpr::default()
    }

    pub fn one() -> OpExpr {
        OpExpr::monomial(one(), NO_POWERS, Slot::ONE, Vec::new())
    }

    pub fn scalar(c: Coef, p: Powers) -> OpExpr {
        OpExpr::monomial(c, p, Slot::ONE, Vec::new())
    }

    pub fn monomial(c: Coef, p: Powers, slot: Slot, word: Word) -> OpExpr {
        canonicalize([(c, p, slot, word)])
    }

    pub fn pi(i: usize) -> OpExpr {
        OpExpr::monomial(one(), NO_POWERS, Slot::ONE, vec![Letter::Pi(i as u8)])
    }

    pub fn field(f: Field) -> OpExpr {
        OpExpr::monomial(one(), NO_POWERS, Slot::ONE, vec![Letter::Field(f)])
    }

    pub fn slot(s: Slot) -> OpExpr {
        OpExpr::monomial(one(), NO_POWERS, s, Vec::new())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Coef)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of third-order derivative terms dropped while building this
    /// expression.
    pub fn truncated_count(&self) -> u64 {
        self.truncated
    }

    pub fn coefficient(&self, key: &Key) -> Coef {
        self.terms.get(key).cloned().unwrap_or_else(Coef::zero)
    }

    pub fn scale(&self, c: &Coef, p: &Powers) -> OpExpr {
        if c.is_zero() {
            return OpExpr { terms: BTreeMap::new(), truncated: self.truncated };
        }
        let terms =
            self.terms.iter().map(|(k, v)| (Key { powers: add_powers(&k.powers, p), ..k.clone() }, v * c)).collect();
        OpExpr { terms, truncated: self.truncated }
    }

    /// Drops every term carrying a positive power of the given scalar, i.e.
    /// sets it to zero.
    pub fn set_zero(&self, scalar: usize) -> OpExpr {
        OpExpr {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.powers[scalar] <= 0)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            truncated: self.truncated,
        }
    }

    pub fn field_free_part(&self) -> OpExpr {
        self.filter(|k| !k.has_field())
    }

    pub fn field_part(&self) -> OpExpr {
        self.filter(Key::has_field)
    }

    pub fn filter(&self, f: impl Fn(&Key) -> bool) -> OpExpr {
        OpExpr {
            terms: self.terms.iter().filter(|(k, _)| f(k)).map(|(k, v)| (k.clone(), v.clone())).collect(),
            truncated: self.truncated,
        }
    }

    /// Replaces every `π` letter by nothing and every field letter's
    /// derivative chain by zero, i.e. keeps the `ħ⁰` commuting skeleton.
    pub fn commuting_limit(&self) -> OpExpr {
        self.filter(|k| k.powers[HBAR] <= 0 && k.field().is_none_or(|f| f.derivs.is_empty()))
    }

    pub fn add(&self, o: &OpExpr) -> OpExpr {
        let mut terms = self.terms.clone();
        for (k, v) in &o.terms {
            let e = terms.entry(k.clone()).or_insert_with(Coef::zero);
            *e = &*e + v;
            if e.is_zero() {
                terms.remove(k);
            }
        }
        OpExpr { terms, truncated: self.truncated + o.truncated }
    }

    pub fn sub(&self, o: &OpExpr) -> OpExpr {
        self.add(&o.scale(&int(-1), &NO_POWERS))
    }

    pub fn mul(&self, o: &OpExpr) -> OpExpr {
        let mut b = Builder { truncated: self.truncated + o.truncated, ..Default::default() };
        let mut word = Vec::new();
        for (ka, ca) in &self.terms {
            let fa = ka.has_field();
            for (kb, cb) in &o.terms {
                if fa && kb.has_field() {
                    continue;
                }
                let (ph, slot) = ka.slot.mul(kb.slot);
                let c = ca * cb * phase_coef(ph);
                let p = add_powers(&ka.powers, &kb.powers);
                word.clear();
                word.extend_from_slice(&ka.word);
                word.extend_from_slice(&kb.word);
                b.push_word(&c, &p, slot, &word);
            }
        }
        b.finish()
    }

    pub fn commutator(&self, o: &OpExpr) -> OpExpr {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn pow(&self, n: u32) -> OpExpr {
        let mut r = OpExpr::one();
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    pub fn is_canonical(&self) -> bool {
        self.terms.keys().all(|k| is_canonical(&k.word))
    }
}

impl Add for &OpExpr {
    type Output = OpExpr;
    fn add(self, o: &OpExpr) -> OpExpr {
        OpExpr::add(self, o)
    }
}

impl Sub for &OpExpr {
    type Output = OpExpr;
    fn sub(self, o: &OpExpr) -> OpExpr {
        OpExpr::sub(self, o)
    }
}

impl Mul for &OpExpr {
    type Output = OpExpr;
    fn mul(self, o: &OpExpr) -> OpExpr {
        OpExpr::mul(self, o)
    }
}

impl Neg for &OpExpr {
    type Output = OpExpr;
    fn neg(self) -> OpExpr {
        self.scale(&int(-1), &NO_POWERS)
    }
}

/// `Σ_i a_i b_i`.
pub fn dot(a: &[OpExpr; 3], b: &[OpExpr; 3]) -> OpExpr {
    (0..3).fold(OpExpr::zero(), |acc, i| acc.add(&a[i].mul(&b[i])))
}

/// `(a×b)_i = ε_ijk a_j b_k` with the operator order kept.
pub fn cross(a: &[OpExpr; 3], b: &[OpExpr; 3]) -> [OpExpr; 3] {
    std::array::from_fn(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        a[j].mul(&b[k]).sub(&a[k].mul(&b[j]))
    })
}

pub fn pi_vector() -> [OpExpr; 3] {
    std::array::from_fn(OpExpr::pi)
}

pub fn field_vector(kind: FieldKind) -> [OpExpr; 3] {
    std::array::from_fn(|i| OpExpr::field(Field::new(kind, i)))
}

/// `π² = Σ π_iπ_i`.
pub fn pi_squared() -> OpExpr {
    let p = pi_vector();
    dot(&p, &p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::coeff::frac;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn b(i: usize) -> Field {
        Field::new(FieldKind::B, i)
    }

    fn ihbar_e_over_c() -> (Coef, Powers) {
        (imag_unit(), powers(&[(HBAR, 1), (E, 1), (C, -1)]))
    }

    #[test]
    fn momentum_commutator_gives_b() {
        let c = OpExpr::pi(0).commutator(&OpExpr::pi(1));
        let (k, p) = ihbar_e_over_c();
        assert_eq!(c, OpExpr::field(b(2)).scale(&k, &p));
        let c = OpExpr::pi(2).commutator(&OpExpr::pi(0));
        assert_eq!(c, OpExpr::field(b(1)).scale(&k, &p));
    }

    #[test]
    fn momentum_moves_past_field_with_a_derivative() {
        let lhs = OpExpr::monomial(one(), NO_POWERS, Slot::ONE, vec![Letter::Pi(0), Letter::Field(b(1))]);
        let expect = OpExpr::monomial(one(), NO_POWERS, Slot::ONE, vec![Letter::Field(b(1)), Letter::Pi(0)])
            .sub(&OpExpr::field(Field::with_derivs(FieldKind::B, 1, &[0])).scale(&imag_unit(), &powers(&[(HBAR, 1)])));
        assert_eq!(lhs, expect);
    }

    #[test]
    fn field_free_descent_is_sorted_with_a_commutator() {
        let lhs = OpExpr::monomial(one(), NO_POWERS, Slot::ONE, vec![Letter::Pi(1), Letter::Pi(0)]);
        let (k, p) = ihbar_e_over_c();
        let expect = OpExpr::pi(0).mul(&OpExpr::pi(1)).sub(&OpExpr::field(b(2)).scale(&k, &p));
        assert_eq!(lhs, expect);
        assert!(lhs.is_canonical());
    }

    #[test]
    fn quadratic_field_terms_vanish() {
        let sb = (0..3).fold(OpExpr::zero(), |a, i| a.add(&OpExpr::slot(Slot::sigma(i)).mul(&OpExpr::field(b(i)))));
        assert!(sb.mul(&sb).is_zero());
        assert_eq!(OpExpr::one().mul(&sb), sb);
    }

    #[test]
    fn uniform_fields_commute_with_momenta() {
        let f = OpExpr::field(Field::new(FieldKind::UniformB, 0));
        assert!(OpExpr::pi(1).commutator(&f).is_zero());
        assert!(!OpExpr::pi(1).commutator(&OpExpr::field(b(0))).is_zero());
    }

    #[test]
    fn divergence_free_b() {
        // [π_3, B_3] = −iħ ∂_3 B_3 = iħ(∂_1B_1 + ∂_2B_2)
        let c = OpExpr::pi(2).commutator(&OpExpr::field(b(2)));
        let d1 = OpExpr::field(Field::with_derivs(FieldKind::B, 0, &[0]));
        let d2 = OpExpr::field(Field::with_derivs(FieldKind::B, 1, &[1]));
        assert_eq!(c, d1.add(&d2).scale(&imag_unit(), &powers(&[(HBAR, 1)])));
    }

    #[test]
    fn third_derivatives_are_counted() {
        let f = OpExpr::field(Field::with_derivs(FieldKind::E, 0, &[0, 1]));
        let r = OpExpr::pi(2).mul(&f);
        assert_eq!(r.truncated_count(), 1);
        assert_eq!(r.len(), 1);
    }

    // random words over a small alphabet, at most one field letter
    fn random_letter(rng: &mut ChaCha8Rng) -> Letter {
        if rng.gen_bool(0.8) {
            Letter::Pi(rng.gen_range(0..3))
        } else {
            let kind = [FieldKind::E, FieldKind::B, FieldKind::UniformB][rng.gen_range(0..3)];
            let nd = if kind.is_uniform() { 0 } else { rng.gen_range(0..2) };
            let d: Vec<usize> = (0..nd).map(|_| rng.gen_range(0..3)).collect();
            Letter::Field(Field::with_derivs(kind, rng.gen_range(0..3), &d))
        }
    }

    fn random_expr(rng: &mut ChaCha8Rng, terms: usize, len: usize) -> Vec<(Coef, Powers, Slot, Word)> {
        (0..terms)
            .map(|_| {
                let n = rng.gen_range(0..=len);
                let w: Word = (0..n).map(|_| random_letter(rng)).collect();
                let s = Slot { rho: rng.gen_range(0..4), sigma: rng.gen_range(0..4) };
                let c = frac(rng.gen_range(-5..=5), rng.gen_range(1..=4));
                let p = powers(&[(HBAR, rng.gen_range(0..2)), (C, rng.gen_range(-1..1))]);
                (c, p, s, w)
            })
            .collect()
    }

    // applies one randomly chosen rewrite at a random position until no rule
    // fires; an oracle for the memoized leftmost strategy
    fn random_order_normal_form(raw: Vec<(Coef, Powers, Slot, Word)>, rng: &mut ChaCha8Rng) -> OpExpr {
        let mut work = raw;
        let mut done = Vec::new();
        while let Some(i) = (!work.is_empty()).then(|| rng.gen_range(0..work.len())) {
            let (c, p, s, w) = work.swap_remove(i);
            if w.iter().filter(|l| l.is_field()).count() > 1 {
                continue;
            }
            let mut moves = Vec::new();
            for k in 0..w.len().saturating_sub(1) {
                match (&w[k], &w[k + 1]) {
                    (Letter::Pi(_), Letter::Field(_)) => moves.push(k),
                    (Letter::Pi(a), Letter::Pi(b)) if a > b => moves.push(k),
                    _ => {}
                }
            }
            let div = w.iter().position(|l| matches!(l, Letter::Field(f) if f.eliminate_div_b().is_some()));
            if moves.is_empty() && div.is_none() {
                done.push((c, p, s, w));
                continue;
            }
            if let Some(d) = div.filter(|_| moves.is_empty() || rng.gen_bool(0.3)) {
                let Letter::Field(f) = &w[d] else { unreachable!() };
                for g in f.eliminate_div_b().unwrap() {
                    work.push((-c.clone(), p, s, splice(&w, d, d + 1, Letter::Field(g))));
                }
                continue;
            }
            let k = moves[rng.gen_range(0..moves.len())];
            let mut sw = w.clone();
            sw.swap(k, k + 1);
            work.push((c.clone(), p, s, sw));
            let has_field = w.iter().any(Letter::is_field);
            match (&w[k], &w[k + 1]) {
                (Letter::Pi(i), Letter::Field(f)) => {
                    if let Derived::Field(g) = f.derive(*i) {
                        work.push((
                            &c * -imag_unit(),
                            add_powers(&p, &powers(&[(HBAR, 1)])),
                            s,
                            splice(&w, k, k + 2, Letter::Field(g)),
                        ));
                    }
                }
                (Letter::Pi(j), Letter::Pi(i)) if !has_field => {
                    let l = 3 - i - j;
                    let eps = crate::vector::levi_civita3(*j as usize, *i as usize, l as usize);
                    work.push((
                        &c * imag_unit() * int(eps as i64),
                        add_powers(&p, &powers(&[(HBAR, 1), (E, 1), (C, -1)])),
                        s,
                        splice(&w, k, k + 2, Letter::Field(Field::new(FieldKind::B, l as usize))),
                    ));
                }
                _ => {}
            }
        }
        canonicalize(done)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn canonicalize_is_confluent_and_idempotent(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let raw = random_expr(&mut rng, 3, 6);
            let a = canonicalize(raw.clone());
            prop_assert!(a.is_canonical());
            let b = random_order_normal_form(raw, &mut rng);
            prop_assert_eq!(&a, &b);
            let again = canonicalize(a.terms().map(|(k, c)| (c.clone(), k.powers, k.slot, k.word.clone())));
            prop_assert_eq!(a, again);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn multiplication_is_associative(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = canonicalize(random_expr(&mut rng, 3, 3));
            let y = canonicalize(random_expr(&mut rng, 3, 3));
            let z = canonicalize(random_expr(&mut rng, 3, 3));
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        }

        #[test]
        fn multiplication_is_bilinear(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = canonicalize(random_expr(&mut rng, 2, 3));
            let y = canonicalize(random_expr(&mut rng, 2, 3));
            let z = canonicalize(random_expr(&mut rng, 2, 3));
            prop_assert_eq!(x.add(&y).mul(&z), x.mul(&z).add(&y.mul(&z)));
            prop_assert_eq!(z.mul(&x.add(&y)), z.mul(&x).add(&z.mul(&y)));
        }
    }
}
