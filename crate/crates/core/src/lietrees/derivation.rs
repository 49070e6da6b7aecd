use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactlin::{scalar, Scalar};

use super::lie::is_lie_element;
use super::{add_term, contract, pair, Letter, SymplecticSpace, Tree, Word, WordComb};

/// An element of H ⊗ H^{⊗(s+1)}: coefficients on (first letter, word).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DerivationElement {
    pub order: usize,
    terms: BTreeMap<(Letter, Word), Scalar>,
}

impl DerivationElement {
    pub fn zero(order: usize) -> Self {
        DerivationElement { order, terms: BTreeMap::new() }
    }

    pub fn from_terms<I>(order: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((Letter, Word), Scalar)>,
    {
        let mut x = Self::zero(order);
        for ((a, w), c) in terms {
            if w.len() != order + 1 {
                return Err(Error::DimensionMismatch { expected: order + 1, got: w.len() });
            }
            add_term(&mut x.terms, (a, w), c);
        }
        Ok(x)
    }

    pub fn terms(&self) -> &BTreeMap<(Letter, Word), Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Scalar) {
        for (k, v) in &other.terms {
            add_term(&mut self.terms, k.clone(), v * c);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        let mut out = Self::zero(self.order);
        out.add_scaled(self, c);
        out
    }

    /// Components w_a with x = Σ_a a ⊗ w_a.
    pub fn components(&self) -> BTreeMap<Letter, WordComb> {
        let mut out: BTreeMap<Letter, WordComb> = BTreeMap::new();
        for ((a, w), c) in &self.terms {
            add_term(out.entry(*a).or_default(), w.clone(), c.clone());
        }
        out
    }

    fn genus(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|(a, w)| std::iter::once(a).chain(w.iter()))
            .map(|l| l.genus_index())
            .max()
            .unwrap_or(0)
    }

    /// The derivation of the tensor algebra sending a letter z to
    /// Σ ⟨a,z⟩ w over the terms a ⊗ w.
    pub fn apply_letter(&self, z: Letter) -> WordComb {
        let a = z.partner();
        let k = scalar(pair(a, z));
        let mut out = WordComb::new();
        let lo = (a, Vec::new());
        for ((b, w), c) in self.terms.range(lo..) {
            if *b != a {
                break;
            }
            add_term(&mut out, w.clone(), c * &k);
        }
        out
    }

    /// Extends [`Self::apply_letter`] to words as a derivation.
    pub fn apply(&self, x: &WordComb) -> WordComb {
        let mut cache: BTreeMap<Letter, WordComb> = BTreeMap::new();
        let mut out = WordComb::new();
        for (w, c) in x {
            for (i, z) in w.iter().enumerate() {
                let dz = cache.entry(*z).or_insert_with(|| self.apply_letter(*z));
                for (v, d) in dz.iter() {
                    let mut u = w[..i].to_vec();
                    u.extend_from_slice(v);
                    u.extend_from_slice(&w[i + 1..]);
                    add_term(&mut out, u, c * d);
                }
            }
        }
        out
    }
}

/// η(t) = Σ_x ℓ(x) ⊗ t_x over the leaves of t.
pub fn eta(t: &Tree) -> Result<DerivationElement> {
    let mut out = DerivationElement::zero(t.order());
    for x in t.leaves() {
        let lx = t.vector(x)?.clone();
        if lx.is_zero() {
            continue;
        }
        let words = t.rooted_words(x)?;
        for (a, c) in lx.terms() {
            for (w, d) in &words {
                add_term(&mut out.terms, (*a, w.clone()), c * d);
            }
        }
    }
    Ok(out)
}

/// Membership in D: every component is a Lie element, and the element
/// lies in the kernel of the bracketing map. The kernel condition is
/// evaluated twice, directly and as X(ω) = 0, and both must agree.
pub fn is_in_d(x: &DerivationElement) -> Result<bool> {
    let lie = x.components().values().all(is_lie_element);

    let mut bracket = WordComb::new();
    for ((a, w), c) in x.terms() {
        let mut aw = vec![*a];
        aw.extend_from_slice(w);
        add_term(&mut bracket, aw, c.clone());
        let mut wa = w.clone();
        wa.push(*a);
        add_term(&mut bracket, wa, -c);
    }
    let kernel = bracket.is_empty();

    let omega = SymplecticSpace::new(x.genus()).omega();
    let kills_omega = x.apply(&omega).is_empty();

    if kernel != kills_omega {
        return Err(Error::Consistency(
            "bracketing-map kernel and ω-annihilation disagree".into(),
        ));
    }
    Ok(lie && kernel)
}

/// Commutator D_x D_y − D_y D_x of the associated derivations, read back
/// in H ⊗ H^{⊗•} coordinates.
pub fn derivation_bracket(x: &DerivationElement, y: &DerivationElement) -> Result<DerivationElement> {
    for (name, e) in [("left", x), ("right", y)] {
        if !is_in_d(e)? {
            return Err(Error::NotInD(format!("{name} argument of the bracket")));
        }
    }
    let mut out = DerivationElement::zero(x.order + y.order);
    let letters: BTreeSet<Letter> = x
        .terms()
        .keys()
        .chain(y.terms().keys())
        .map(|(a, _)| a.partner())
        .collect();
    for z in letters {
        let zc = WordComb::from([(vec![z], scalar(1))]);
        let mut d = x.apply(&y.apply(&zc));
        for (w, c) in y.apply(&x.apply(&zc)) {
            add_term(&mut d, w, -c);
        }
        let a = z.partner();
        let k = scalar(pair(a, z));
        for (w, c) in d {
            add_term(&mut out.terms, (a, w), c * &k);
        }
    }
    Ok(out)
}

/// Formal linear combination of trees.
pub type TreeSum = Vec<(Scalar, Tree)>;

/// Σ over leaves x of t1 and y of t2 of ⟨ℓ(x),ℓ(y)⟩ times the tree joining
/// t1 and t2 along x and y.
pub fn bracket_trees(t1: &Tree, t2: &Tree) -> Result<TreeSum> {
    let mut out = TreeSum::new();
    for x in t1.leaves() {
        for y in t2.leaves() {
            let c = contract(t1.vector(x)?, t2.vector(y)?);
            if !c.is_zero() {
                out.push((c, t1.join(x, t2, y)));
            }
        }
    }
    Ok(out)
}

/// η extended linearly to formal sums.
pub fn eta_sum(ts: &TreeSum, order: usize) -> Result<DerivationElement> {
    let mut out = DerivationElement::zero(order);
    for (c, t) in ts {
        out.add_scaled(&eta(t)?, c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{rank, ExactSparseMatrix};
    use crate::lietrees::{HVector, Label, Rooted};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn l(s: &str) -> Letter {
        s.parse().unwrap()
    }

    #[test]
    fn tripod_eta_by_hand() {
        let t = Tree::letter_tripod(l("p1"), l("p2"), l("p3"));
        let x = eta(&t).unwrap();
        let (p1, p2, p3) = (l("p1"), l("p2"), l("p3"));
        let expected = DerivationElement::from_terms(
            1,
            [
                ((p1, vec![p2, p3]), scalar(1)),
                ((p1, vec![p3, p2]), scalar(-1)),
                ((p2, vec![p3, p1]), scalar(1)),
                ((p2, vec![p1, p3]), scalar(-1)),
                ((p3, vec![p1, p2]), scalar(1)),
                ((p3, vec![p2, p1]), scalar(-1)),
            ],
        )
        .unwrap();
        assert_eq!(x, expected);
        assert!(is_in_d(&x).unwrap());
    }

    #[test]
    fn zero_label_and_flip() {
        let t = Tree::tripod(Label::Vector(HVector::zero()), Label::letter(l("p1")), Label::letter(l("q2")));
        assert!(eta(&t).unwrap().is_zero());
        let t = Tree::parse("(p1,(q1,p2),q3)").unwrap();
        for v in t.inner_vertices() {
            assert_eq!(eta(&t.flip_at(v)).unwrap(), eta(&t).unwrap().scaled(&scalar(-1)));
        }
        let h = Tree::parse("(p1,#2,q3)").unwrap();
        assert!(matches!(eta(&h), Err(Error::UnlabeledLeaf(_))));
    }

    #[test]
    fn membership_examples() {
        let p1 = l("p1");
        let x = DerivationElement::from_terms(2, [((p1, vec![p1, p1, p1]), scalar(1))]).unwrap();
        assert!(!is_in_d(&x).unwrap());
        assert!(is_in_d(&DerivationElement::zero(3)).unwrap());
        let y = DerivationElement::from_terms(1, [((p1, vec![l("q1"), l("p2")]), scalar(1))]).unwrap();
        assert!(!is_in_d(&y).unwrap());
    }

    #[test]
    fn bracket_of_dual_tripods() {
        let a = Tree::letter_tripod(l("p1"), l("p2"), l("p3"));
        let b = Tree::letter_tripod(l("q1"), l("q2"), l("q3"));
        let sum = bracket_trees(&a, &b).unwrap();
        assert_eq!(sum.len(), 3);
        assert!(sum.iter().all(|(c, t)| *c == scalar(1) && t.order() == 2));
        let lhs = eta_sum(&sum, 2).unwrap();
        let rhs = derivation_bracket(&eta(&a).unwrap(), &eta(&b).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert!(!lhs.is_zero());

        let c = Tree::letter_tripod(l("p1"), l("p2"), l("q3"));
        let d = Tree::letter_tripod(l("p4"), l("p5"), l("p1"));
        assert!(bracket_trees(&c, &d).unwrap().is_empty());
        assert!(bracket_trees(&a, &a).unwrap().is_empty());
    }

    #[test]
    fn bracket_rejects_non_members() {
        let p1 = l("p1");
        let bad = DerivationElement::from_terms(2, [((p1, vec![p1, p1, p1]), scalar(1))]).unwrap();
        let good = eta(&Tree::letter_tripod(p1, l("q1"), l("p2"))).unwrap();
        assert!(matches!(derivation_bracket(&good, &bad), Err(Error::NotInD(_))));
        assert!(derivation_bracket(&good, &good).unwrap().is_zero());
        assert!(derivation_bracket(&good, &DerivationElement::zero(2)).unwrap().is_zero());
    }

    #[test]
    fn tripods_span_third_exterior_power() {
        for g in 1..=3usize {
            let letters = SymplecticSpace::new(g).letters();
            let mut cols: BTreeMap<(Letter, Word), usize> = BTreeMap::new();
            let mut elems = Vec::new();
            for &a in &letters {
                for &b in &letters {
                    for &c in &letters {
                        let x = eta(&Tree::letter_tripod(a, b, c)).unwrap();
                        for k in x.terms().keys() {
                            let n = cols.len();
                            cols.entry(k.clone()).or_insert(n);
                        }
                        elems.push(x);
                    }
                }
            }
            let mut m = ExactSparseMatrix::new(cols.len());
            for x in &elems {
                m.push_row(x.terms().iter().map(|(k, c)| (cols[k], c.clone()))).unwrap();
            }
            let n = 2 * g;
            assert_eq!(rank(&m), n * (n - 1) * (n.saturating_sub(2)) / 6);
        }
    }

    fn random_rooted<R: Rng>(leaves: usize, genus: usize, rng: &mut R) -> Rooted {
        if leaves == 1 {
            return Rooted::Leaf(Label::letter(Letter::from_code(rng.gen_range(0..2 * genus as u16))));
        }
        let k = rng.gen_range(1..leaves);
        Rooted::node(random_rooted(k, genus, rng), random_rooted(leaves - k, genus, rng))
    }

    #[test]
    fn ihx_holds_in_eta_coordinates() {
        // I + H + X around a fixed outside: Jacobi on the rooted subtrees
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let part = |rng: &mut ChaCha8Rng| {
                let k = rng.gen_range(1..=2);
                random_rooted(k, 4, rng)
            };
            let (a, b, c, d, e) = (part(&mut rng), part(&mut rng), part(&mut rng), part(&mut rng), part(&mut rng));
            let i = Rooted::node(Rooted::node(a.clone(), b.clone()), c.clone());
            let h = Rooted::node(Rooted::node(b.clone(), c.clone()), a.clone());
            let x = Rooted::node(Rooted::node(c, a), b);
            let trees: Vec<Tree> = [i, h, x].into_iter().map(|sub| Tree::from_triple(d.clone(), e.clone(), sub)).collect();
            let order = trees[0].order();
            let mut total = DerivationElement::zero(order);
            for t in &trees {
                total.add_scaled(&eta(t).unwrap(), &scalar(1));
            }
            assert!(total.is_zero());
        }
    }

    #[test]
    fn membership_oracles_agree_on_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut inside = 0;
        for i in 0..100 {
            let order = rng.gen_range(1..=3);
            let t = Tree::random_letters(order, 3, &mut rng).unwrap();
            let mut x = eta(&t).unwrap();
            if i % 2 == 1 {
                // perturb by a single tensor, usually leaving D
                let a = Letter::from_code(rng.gen_range(0..6));
                let w: Word = (0..=order).map(|_| Letter::from_code(rng.gen_range(0..6))).collect();
                x.add_scaled(&DerivationElement::from_terms(order, [((a, w), scalar(1))]).unwrap(), &scalar(1));
            }
            if is_in_d(&x).unwrap() {
                inside += 1;
            }
        }
        assert!(inside >= 50);
        assert!(inside < 100);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn eta_is_a_lie_map(seed in any::<u64>(), o1 in 1usize..=3, o2 in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t1 = Tree::random_letters(o1, 3, &mut rng).unwrap();
            let t2 = Tree::random_letters(o2, 3, &mut rng).unwrap();
            let x1 = eta(&t1).unwrap();
            let x2 = eta(&t2).unwrap();
            prop_assert!(is_in_d(&x1).unwrap());
            let lhs = eta_sum(&bracket_trees(&t1, &t2).unwrap(), o1 + o2).unwrap();
            let rhs = derivation_bracket(&x1, &x2).unwrap();
            prop_assert_eq!(&lhs, &rhs);
            let back = derivation_bracket(&x2, &x1).unwrap();
            prop_assert_eq!(back.scaled(&scalar(-1)), rhs);
        }

        #[test]
        fn jacobi(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let xs: Vec<DerivationElement> = (0..3)
                .map(|_| eta(&Tree::random_letters(1, 2, &mut rng).unwrap()).unwrap())
                .collect();
            let mut total = DerivationElement::zero(3);
            for k in 0..3 {
                let (a, b, c) = (&xs[k], &xs[(k + 1) % 3], &xs[(k + 2) % 3]);
                let inner = derivation_bracket(b, c).unwrap();
                total.add_scaled(&derivation_bracket(a, &inner).unwrap(), &scalar(1));
            }
            prop_assert!(total.is_zero());
        }
    }
}
