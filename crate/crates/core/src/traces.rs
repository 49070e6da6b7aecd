//! The Enomoto–Satoh trace, dihedral normal forms of cyclic words, and the
//! one- and two-edge parts of the trace on trees.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactlin::{ratio, scalar, Scalar};
use crate::lietrees::{add_term, bracket_trees, contract, is_in_d, pair, word_to_string, DerivationElement, Letter, Tree, TreeSum, Word, WordComb};
use crate::omega2::{MultisetQuotients, PairWordGenerator};

/// Normal form of a word under rotations and signed reversal.
/// `sign == 0` marks a word equal to its own negative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DihedralWord {
    pub canonical: Word,
    pub sign: i8,
}

impl DihedralWord {
    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canonical.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }
}

fn reflection_sign(s: usize) -> i8 {
    if s % 2 == 1 {
        1
    } else {
        -1
    }
}

/// The orbit {rotations} ∪ {(−1)^{s+1}·reversed rotations}, with signs.
fn signed_orbit(w: &[Letter]) -> Vec<(Word, i8)> {
    let s = w.len();
    let rs = reflection_sign(s);
    let mut out = Vec::with_capacity(2 * s);
    for r in 0..s.max(1) {
        let mut rot = w[r.min(s)..].to_vec();
        rot.extend_from_slice(&w[..r.min(s)]);
        let rev: Word = rot.iter().rev().copied().collect();
        out.push((rot, 1));
        out.push((rev, rs));
    }
    out
}

pub fn dihedral_canonical(w: &[Letter]) -> DihedralWord {
    let orbit = signed_orbit(w);
    let (best, sign) = orbit.iter().min_by(|a, b| a.0.cmp(&b.0)).cloned().expect("orbit is nonempty");
    let sign = if orbit.iter().any(|(v, t)| *v == best && *t != sign) { 0 } else { sign };
    DihedralWord { canonical: best, sign }
}

/// Least rotation of the word, ignoring reflections.
pub fn rotation_canonical(w: &[Letter]) -> Word {
    (0..w.len().max(1))
        .map(|r| {
            let mut rot = w[r.min(w.len())..].to_vec();
            rot.extend_from_slice(&w[..r.min(w.len())]);
            rot
        })
        .min()
        .expect("at least one rotation")
}

/// The signed reversal b·(v1…vs) = (−1)^{s+1} vs…v1 on a combination.
pub fn reflect(x: &WordComb) -> WordComb {
    let mut out = WordComb::new();
    for (w, c) in x {
        let rev: Word = w.iter().rev().copied().collect();
        add_term(&mut out, rev, c * scalar(reflection_sign(w.len()) as i64));
    }
    out
}

/// Linear combination of canonical cyclic words.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Omega1Element {
    terms: BTreeMap<Word, Scalar>,
}

impl Omega1Element {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_word(&mut self, w: &[Letter], c: &Scalar) {
        let d = dihedral_canonical(w);
        if d.sign != 0 {
            add_term(&mut self.terms, d.canonical, c * scalar(d.sign as i64));
        }
    }

    pub fn from_words(x: &WordComb) -> Self {
        let mut out = Self::zero();
        for (w, c) in x {
            out.add_word(w, c);
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Scalar) {
        for (w, v) in &other.terms {
            add_term(&mut self.terms, w.clone(), v * c);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn terms(&self) -> &BTreeMap<Word, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for Omega1Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("{c}*({})", word_to_string(w))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Contraction of the first two tensor slots, before any identification:
/// Σ c·⟨a, w1⟩·(w2…).
pub fn es_trace_raw(x: &DerivationElement) -> WordComb {
    let mut out = WordComb::new();
    for ((a, w), c) in x.terms() {
        let k = pair(*a, w[0]);
        if k != 0 {
            add_term(&mut out, w[1..].to_vec(), c * scalar(k));
        }
    }
    out
}

pub fn es_trace(x: &DerivationElement) -> Result<Omega1Element> {
    if !is_in_d(x)? {
        return Err(Error::NotInD("argument of the trace".into()));
    }
    Ok(Omega1Element::from_words(&es_trace_raw(x)))
}

/// One added edge: for leaves x < y, ⟨ℓx,ℓy⟩ times the cyclic word read
/// from the expansion of t rooted at x along the terms starting with y.
pub fn tr_c_rank1(t: &Tree) -> Result<Omega1Element> {
    let leaves = t.leaves();
    let mut out = Omega1Element::zero();
    for (i, &x) in leaves.iter().enumerate() {
        for &y in &leaves[i + 1..] {
            let k = contract(t.vector(x)?, t.vector(y)?);
            if k.is_zero() {
                continue;
            }
            for (ids, c) in t.rooted_expansion(x) {
                if ids[0] != y {
                    continue;
                }
                for (w, d) in t.substitute(&ids[1..])? {
                    out.add_word(&w, &(&k * d * scalar(c)));
                }
            }
        }
    }
    Ok(out)
}

pub fn tr_c_rank1_sum(ts: &TreeSum) -> Result<Omega1Element> {
    let mut out = Omega1Element::zero();
    for (c, t) in ts {
        out.add_scaled(&tr_c_rank1(t)?, c);
    }
    Ok(out)
}

/// Element of the rank-2 quotient, keyed by the free generator of the
/// letter-multiset block it projects to.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Omega2Element {
    terms: BTreeMap<PairWordGenerator<Letter>, Scalar>,
}

impl Omega2Element {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Projects a combination of generators block by block.
    pub fn reduce(raw: &BTreeMap<PairWordGenerator<Letter>, Scalar>, cache: &mut MultisetQuotients) -> Result<Self> {
        let mut out = Self::zero();
        for (g, c) in raw {
            let mut ms = g.left.clone();
            ms.extend_from_slice(&g.right);
            let q = cache.get(&ms)?;
            let k = q
                .presentation
                .index_of(g)
                .ok_or_else(|| Error::Consistency(format!("{g} is not a generator of its block")))?;
            for (f, v) in q.quotient.project_unit(k) {
                let free = q.presentation.generators[q.quotient.free_columns[f]].clone();
                add_term(&mut out.terms, free, c * v);
            }
        }
        Ok(out)
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Scalar) {
        for (g, v) in &other.terms {
            add_term(&mut self.terms, g.clone(), v * c);
        }
    }

    pub fn terms(&self) -> &BTreeMap<PairWordGenerator<Letter>, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for Omega2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(g, c)| format!("{c}*{g}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

type RawRank2 = BTreeMap<PairWordGenerator<Letter>, Scalar>;

/// Chords x1–y1 and x2–y2: cut the cycle through x1,y1 at x2 and y2. A
/// term y1·A x2 B y2 C of the expansion rooted at x1 gives +[B|C A]; the
/// opposite order of x2,y2 gives −[B|C A].
fn chord_reading(t: &Tree, x1: usize, y1: usize, x2: usize, y2: usize, weight: &Scalar, out: &mut RawRank2) -> Result<()> {
    for (ids, c) in t.rooted_expansion(x1) {
        if ids[0] != y1 {
            continue;
        }
        let u = &ids[1..];
        let i = u.iter().position(|&z| z == x2).expect("leaf on the cycle side");
        let j = u.iter().position(|&z| z == y2).expect("leaf on the cycle side");
        let (a, b, sign) = if i < j { (i, j, 1) } else { (j, i, -1) };
        let left = &u[a + 1..b];
        let mut right = u[b + 1..].to_vec();
        right.extend_from_slice(&u[..a]);
        if left.is_empty() || right.is_empty() {
            continue;
        }
        let coef = weight * scalar(c * sign);
        for (lw, lc) in t.substitute(left)? {
            for (rw, rc) in t.substitute(&right)? {
                add_term(out, PairWordGenerator { left: lw.clone(), right: rw }, &coef * &lc * rc);
            }
        }
    }
    Ok(())
}

fn tr_c_rank2_raw(t: &Tree, out: &mut RawRank2, scale: &Scalar) -> Result<()> {
    let leaves = t.leaves();
    let half = ratio(1, 2);
    let mut chords = Vec::new();
    for (i, &x) in leaves.iter().enumerate() {
        for &y in &leaves[i + 1..] {
            let k = contract(t.vector(x)?, t.vector(y)?);
            if !k.is_zero() {
                chords.push((x, y, k));
            }
        }
    }
    for (n, (a, b, k1)) in chords.iter().enumerate() {
        for (c, d, k2) in &chords[n + 1..] {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            let w = scale * k1 * k2 * &half;
            chord_reading(t, *a, *b, *c, *d, &w, out)?;
            chord_reading(t, *c, *d, *a, *b, &w, out)?;
        }
    }
    Ok(())
}

/// Two added edges, summed over unordered pairs of disjoint contracting
/// leaf pairs and reduced in the rank-2 quotient of each letter multiset.
pub fn tr_c_rank2(t: &Tree, cache: &mut MultisetQuotients) -> Result<Omega2Element> {
    let mut raw = RawRank2::new();
    tr_c_rank2_raw(t, &mut raw, &scalar(1))?;
    Omega2Element::reduce(&raw, cache)
}

/// Rank-2 trace of a sum, with the pre-reduction combination alongside.
pub fn tr_c_rank2_sum(ts: &TreeSum, cache: &mut MultisetQuotients) -> Result<(RawRank2, Omega2Element)> {
    let mut raw = RawRank2::new();
    for (c, t) in ts {
        tr_c_rank2_raw(t, &mut raw, c)?;
    }
    let reduced = Omega2Element::reduce(&raw, cache)?;
    Ok((raw, reduced))
}

/// Left-normed iterated bracket [[t1,t2],t3]… as a sum of trees.
pub fn iterated_bracket(trees: &[Tree]) -> Result<TreeSum> {
    let Some((first, rest)) = trees.split_first() else {
        return Ok(TreeSum::new());
    };
    let mut cur: TreeSum = vec![(scalar(1), first.clone())];
    for t in rest {
        let mut next = TreeSum::new();
        for (c, x) in &cur {
            for (d, y) in bracket_trees(x, t)? {
                next.push((c * d, y));
            }
        }
        cur = next;
    }
    Ok(cur)
}

#[derive(Clone, Debug)]
pub struct VanishingReport {
    pub order: usize,
    pub terms: usize,
    pub rank1: Omega1Element,
    pub rank2: Omega2Element,
    /// Generator terms before reduction in the quotient.
    pub rank2_raw_terms: usize,
}

impl VanishingReport {
    pub fn passed(&self) -> bool {
        self.rank1.is_zero() && self.rank2.is_zero()
    }
}

pub fn vanishing_report(tripods: &[Tree], cache: &mut MultisetQuotients) -> Result<VanishingReport> {
    if tripods.len() < 2 {
        return Err(Error::OutOfRange("the vanishing check needs at least two tripods".into()));
    }
    if let Some(t) = tripods.iter().find(|t| t.order() != 1) {
        return Err(Error::OutOfRange(format!("expected tripods, got a tree of order {}", t.order())));
    }
    let sum = iterated_bracket(tripods)?;
    let rank1 = tr_c_rank1_sum(&sum)?;
    let (raw, rank2) = tr_c_rank2_sum(&sum, cache)?;
    Ok(VanishingReport { order: tripods.len(), terms: sum.len(), rank1, rank2, rank2_raw_terms: raw.len() })
}

pub fn vanishing_check(tripods: &[Tree]) -> Result<bool> {
    vanishing_report(tripods, &mut MultisetQuotients::new()).map(|r| r.passed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lietrees::{eta, eta_sum, HVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn l(s: &str) -> Letter {
        s.parse().unwrap()
    }

    fn w(s: &str) -> Word {
        s.split_whitespace().map(l).collect()
    }

    #[test]
    fn canonical_examples() {
        // for s = 2 the rotation gives p1 q1 = q1 p1 and the reflection
        // p1 q1 = −q1 p1, so every length-2 word vanishes
        let d = dihedral_canonical(&w("q1 p1"));
        assert_eq!(d.canonical, w("p1 q1"));
        assert!(d.is_zero());
        let d3 = dihedral_canonical(&w("q1 p2 p1"));
        assert_eq!(d3, DihedralWord { canonical: w("p1 q1 p2"), sign: 1 });
        let d4 = dihedral_canonical(&w("p2 q1 p1 q2"));
        assert_eq!(d4, DihedralWord { canonical: w("p1 q1 p2 q2"), sign: -1 });
        let pal = dihedral_canonical(&w("p1 p2 p1"));
        assert_eq!(pal.sign, 1);
        assert_eq!(pal.canonical, w("p1 p1 p2"));
        assert!(dihedral_canonical(&w("p1 p1")).is_zero());
        assert_eq!(rotation_canonical(&w("q1 p2 p1")), w("p1 q1 p2"));
    }

    #[test]
    fn canonical_is_orbit_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let s = rng.gen_range(1..7);
            let word: Word = (0..s).map(|_| Letter::from_code(rng.gen_range(0..4))).collect();
            let d = dihedral_canonical(&word);
            for (v, sg) in signed_orbit(&word) {
                let e = dihedral_canonical(&v);
                assert_eq!(e.canonical, d.canonical);
                assert_eq!(e.sign, d.sign * sg);
            }
        }
    }

    #[test]
    fn trace_of_small_trees() {
        assert!(es_trace(&DerivationElement::zero(2)).unwrap().is_zero());
        let t = Tree::letter_tripod(l("p1"), l("q1"), l("p2"));
        let x = eta(&t).unwrap();
        let es = es_trace(&x).unwrap();
        let r1 = tr_c_rank1(&t).unwrap();
        assert_eq!(r1.scaled(&scalar(2)), es);
        assert!(!es.is_zero());
        // no contracting pair
        let t0 = Tree::letter_tripod(l("p1"), l("p2"), l("p3"));
        assert!(tr_c_rank1(&t0).unwrap().is_zero());
        assert!(es_trace(&eta(&t0).unwrap()).unwrap().is_zero());
        let bad = DerivationElement::from_terms(1, [((l("p1"), w("p1 p2")), scalar(1))]).unwrap();
        assert!(matches!(es_trace(&bad), Err(Error::NotInD(_))));
    }

    #[test]
    fn traces_by_contraction() {
        // order 2 lands in length-2 words, which all vanish
        let t: Tree = "((p1,q1),p2,q2)".parse().unwrap();
        let raw = es_trace_raw(&eta(&t).unwrap());
        assert!(!raw.is_empty());
        assert!(Omega1Element::from_words(&raw).is_zero());
        // order 3: contraction done on H-vectors, independent of the
        // letter pairing table
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut nonzero = 0;
        for _ in 0..20 {
            let t = Tree::random_letters(3, 2, &mut rng).unwrap();
            let x = eta(&t).unwrap();
            let mut direct = WordComb::new();
            for ((a, word), c) in x.terms() {
                let k = contract(&HVector::letter(*a), &HVector::letter(word[0]));
                add_term(&mut direct, word[1..].to_vec(), c * k);
            }
            assert_eq!(direct, es_trace_raw(&x));
            let es = es_trace(&x).unwrap();
            nonzero += !es.is_zero() as usize;
            assert_eq!(tr_c_rank1(&t).unwrap().scaled(&scalar(2)), es);
        }
        assert!(nonzero > 0);
    }

    #[test]
    fn diagram_identity_and_reflection() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut nonzero = 0;
        for _ in 0..50 {
            let order = rng.gen_range(1..=4);
            let t = Tree::random_letters(order, 4, &mut rng).unwrap();
            let x = eta(&t).unwrap();
            let raw = es_trace_raw(&x);
            assert_eq!(reflect(&raw), raw);
            let es = es_trace(&x).unwrap();
            assert_eq!(tr_c_rank1(&t).unwrap().scaled(&scalar(2)), es);
            nonzero += !es.is_zero() as usize;
        }
        assert!(nonzero > 0);
    }

    #[test]
    fn canonicalization_needs_no_extra_rule() {
        // es_trace(x) computed from raw words equals canonicalizing the
        // rotation classes first, then the reflection
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let order = rng.gen_range(2..=4);
            let t = Tree::random_letters(order, 3, &mut rng).unwrap();
            let raw = es_trace_raw(&eta(&t).unwrap());
            let mut rot = WordComb::new();
            for (w, c) in &raw {
                add_term(&mut rot, rotation_canonical(w), c.clone());
            }
            assert_eq!(Omega1Element::from_words(&rot), Omega1Element::from_words(&raw));
        }
    }

    #[test]
    fn rank2_small_orders() {
        let mut cache = MultisetQuotients::new();
        let t: Tree = "((p1,q1),(p2,q2),p3)".parse().unwrap();
        assert_eq!(t.order(), 3);
        assert!(tr_c_rank2(&t, &mut cache).unwrap().is_zero());
        let none = Tree::letter_tripod(l("p1"), l("p2"), l("p3"));
        assert!(tr_c_rank2(&none, &mut cache).unwrap().is_zero());
    }

    #[test]
    fn rank2_of_a_single_tree_can_survive() {
        // the reduction is not trivially zero on order 6 trees
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut cache = MultisetQuotients::new();
        let mut seen = false;
        for _ in 0..60 {
            let t = Tree::random_letters(6, 2, &mut rng).unwrap();
            if !tr_c_rank2(&t, &mut cache).unwrap().is_zero() {
                seen = true;
                break;
            }
        }
        assert!(seen);
    }

    fn random_tripod<R: Rng>(rng: &mut R, g: usize) -> Tree {
        let mut letter = || Letter::from_code(rng.gen_range(0..2 * g as u16));
        Tree::letter_tripod(letter(), letter(), letter())
    }

    #[test]
    fn vanishing_on_brackets() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut cache = MultisetQuotients::new();
        let mut checked = 0;
        while checked < 12 {
            let n = rng.gen_range(2..=4);
            let ts: Vec<Tree> = (0..n).map(|_| random_tripod(&mut rng, 3)).collect();
            let r = vanishing_report(&ts, &mut cache).unwrap();
            if r.terms == 0 {
                continue;
            }
            assert!(r.passed(), "{}", r.rank1);
            let sum = iterated_bracket(&ts).unwrap();
            let es = es_trace(&eta_sum(&sum, n).unwrap()).unwrap();
            assert!(es.is_zero());
            checked += 1;
        }
        let one = [random_tripod(&mut rng, 3)];
        assert!(vanishing_check(&one).is_err());
    }
}
