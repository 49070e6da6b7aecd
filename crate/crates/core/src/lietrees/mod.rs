//! The symplectic space H, free Lie algebra words, labeled unitrivalent
//! trees and symplectic derivations.

mod derivation;
mod lie;
mod tree;

pub use derivation::{bracket_trees, derivation_bracket, eta, eta_sum, is_in_d, DerivationElement, TreeSum};
pub use lie::{is_lie_element, lyndon_basis, lyndon_words, LieMonomial};
pub use tree::{Label, Rooted, Tree};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactlin::{scalar, Scalar};

/// A symplectic basis letter. `p_i` and `q_i` are stored as `2(i-1)` and
/// `2(i-1)+1`, so the natural order is p1 < q1 < p2 < q2 < ...
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u16);

impl Letter {
    pub fn p(i: usize) -> Letter {
        assert!(i >= 1, "letters are indexed from 1");
        Letter(2 * (i as u16 - 1))
    }

    pub fn q(i: usize) -> Letter {
        assert!(i >= 1, "letters are indexed from 1");
        Letter(2 * (i as u16 - 1) + 1)
    }

    pub fn from_code(code: u16) -> Letter {
        Letter(code)
    }

    pub fn code(self) -> u16 {
        self.0
    }

    /// The i with self ∈ {p_i, q_i}.
    pub fn genus_index(self) -> usize {
        self.0 as usize / 2 + 1
    }

    pub fn is_p(self) -> bool {
        self.0 % 2 == 0
    }

    /// The letter pairing nontrivially with this one.
    pub fn partner(self) -> Letter {
        Letter(self.0 ^ 1)
    }
}

/// ⟨a,b⟩ on basis letters: ⟨p_i,q_i⟩ = 1 = −⟨q_i,p_i⟩, all else 0.
pub fn pair(a: Letter, b: Letter) -> i64 {
    if a.0 / 2 != b.0 / 2 || a == b {
        0
    } else if a.is_p() {
        1
    } else {
        -1
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = if self.is_p() { 'p' } else { 'q' };
        write!(f, "{c}{}", self.genus_index())
    }
}

impl FromStr for Letter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse { pos: 0, msg: format!("expected a letter like p1 or q3, got {s:?}") };
        let (kind, digits) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |x| x.0));
        let i: usize = digits.parse().map_err(|_| bad())?;
        if i == 0 || i > 1 << 14 {
            return Err(bad());
        }
        match kind {
            "p" => Ok(Letter::p(i)),
            "q" => Ok(Letter::q(i)),
            _ => Err(bad()),
        }
    }
}

pub type Word = Vec<Letter>;

/// Finite linear combination of words.
pub type WordComb = BTreeMap<Word, Scalar>;

pub fn word_to_string(w: &[Letter]) -> String {
    w.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
}

pub(crate) fn add_term<K: Ord>(map: &mut BTreeMap<K, Scalar>, key: K, c: Scalar) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticSpace {
    pub genus: usize,
}

impl SymplecticSpace {
    pub fn new(genus: usize) -> Self {
        SymplecticSpace { genus }
    }

    pub fn dim(&self) -> usize {
        2 * self.genus
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..2 * self.genus as u16).map(Letter).collect()
    }

    pub fn contains(&self, l: Letter) -> bool {
        l.genus_index() <= self.genus
    }

    /// ω = Σ_i p_i q_i − q_i p_i in the tensor algebra.
    pub fn omega(&self) -> WordComb {
        let mut out = WordComb::new();
        for i in 1..=self.genus {
            add_term(&mut out, vec![Letter::p(i), Letter::q(i)], scalar(1));
            add_term(&mut out, vec![Letter::q(i), Letter::p(i)], scalar(-1));
        }
        out
    }
}

/// Element of H, as coordinates on basis letters.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HVector(BTreeMap<Letter, Scalar>);

impl HVector {
    pub fn zero() -> Self {
        HVector(BTreeMap::new())
    }

    pub fn letter(l: Letter) -> Self {
        HVector(BTreeMap::from([(l, scalar(1))]))
    }

    pub fn from_terms<I: IntoIterator<Item = (Letter, Scalar)>>(terms: I) -> Self {
        let mut m = BTreeMap::new();
        for (l, c) in terms {
            add_term(&mut m, l, c);
        }
        HVector(m)
    }

    pub fn terms(&self) -> &BTreeMap<Letter, Scalar> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// The letter, when this vector is a single basis letter.
    pub fn as_letter(&self) -> Option<Letter> {
        match self.0.iter().next() {
            Some((l, c)) if self.0.len() == 1 && *c == scalar(1) => Some(*l),
            _ => None,
        }
    }
}

impl fmt::Display for HVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|(l, c)| format!("{c}*{l}")).collect();
        write!(f, "{{{}}}", parts.join("+"))
    }
}

/// The symplectic contraction ⟨u,v⟩.
pub fn contract(u: &HVector, v: &HVector) -> Scalar {
    let mut acc = Scalar::zero();
    for (a, x) in &u.0 {
        let b = a.partner();
        if let Some(y) = v.0.get(&b) {
            acc += x * y * scalar(pair(*a, b));
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn letters_and_pairing() {
        assert_eq!(Letter::p(1).to_string(), "p1");
        assert_eq!("q3".parse::<Letter>().unwrap(), Letter::q(3));
        assert!("x1".parse::<Letter>().is_err());
        assert!("p0".parse::<Letter>().is_err());
        assert!(Letter::p(1) < Letter::q(1) && Letter::q(1) < Letter::p(2));
        let h = HVector::letter;
        assert_eq!(contract(&h(Letter::p(1)), &h(Letter::q(1))), scalar(1));
        assert_eq!(contract(&h(Letter::p(1)), &h(Letter::p(2))), scalar(0));
        assert_eq!(contract(&h(Letter::q(1)), &h(Letter::p(1))), scalar(-1));
        assert_eq!(SymplecticSpace::new(3).letters().len(), 6);
    }

    fn hvec(g: usize) -> impl Strategy<Value = HVector> {
        prop::collection::vec((0..2 * g as u16, -3i64..=3), 0..4)
            .prop_map(|ts| HVector::from_terms(ts.into_iter().map(|(l, c)| (Letter(l), scalar(c)))))
    }

    proptest! {
        #[test]
        fn contraction_is_bilinear_and_antisymmetric(u in hvec(3), v in hvec(3), w in hvec(3)) {
            prop_assert_eq!(contract(&u, &v), -contract(&v, &u));
            prop_assert_eq!(contract(&u, &u), Scalar::zero());
            let sum = HVector::from_terms(v.terms().iter().chain(w.terms()).map(|(l, c)| (*l, c.clone())));
            prop_assert_eq!(contract(&u, &sum), contract(&u, &v) + contract(&u, &w));
        }
    }
}
