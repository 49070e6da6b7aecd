use std::fmt;

use crate::exactlin::scalar;

use super::{add_term, Letter, Word, WordComb};

/// A bracket expression over basis letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LieMonomial {
    Letter(Letter),
    Bracket(Box<LieMonomial>, Box<LieMonomial>),
}

impl LieMonomial {
    pub fn bracket(a: LieMonomial, b: LieMonomial) -> Self {
        LieMonomial::Bracket(Box::new(a), Box::new(b))
    }

    pub fn degree(&self) -> usize {
        match self {
            LieMonomial::Letter(_) => 1,
            LieMonomial::Bracket(a, b) => a.degree() + b.degree(),
        }
    }

    /// Expansion in the tensor algebra, [a,b] = ab − ba.
    pub fn expand(&self) -> WordComb {
        match self {
            LieMonomial::Letter(l) => WordComb::from([(vec![*l], scalar(1))]),
            LieMonomial::Bracket(a, b) => commutator(&a.expand(), &b.expand()),
        }
    }
}

impl fmt::Display for LieMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieMonomial::Letter(l) => write!(f, "{l}"),
            LieMonomial::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

pub(crate) fn product(x: &WordComb, y: &WordComb) -> WordComb {
    let mut out = WordComb::new();
    for (u, a) in x {
        for (v, b) in y {
            let mut w = u.clone();
            w.extend_from_slice(v);
            add_term(&mut out, w, a * b);
        }
    }
    out
}

pub(crate) fn commutator(x: &WordComb, y: &WordComb) -> WordComb {
    let mut out = product(x, y);
    for (w, c) in product(y, x) {
        add_term(&mut out, w, -c);
    }
    out
}

/// Left-normed bracketing θ(x1…xn) = [[…[x1,x2],…],xn].
fn dynkin(w: &[Letter]) -> WordComb {
    let mut acc = WordComb::from([(vec![w[0]], scalar(1))]);
    for &l in &w[1..] {
        acc = commutator(&acc, &WordComb::from([(vec![l], scalar(1))]));
    }
    acc
}

/// Dynkin–Specht–Wever: a homogeneous element P of degree n is a Lie
/// element iff θ(P) = n·P. Inhomogeneous input is tested degree by degree.
pub fn is_lie_element(p: &WordComb) -> bool {
    let mut image = WordComb::new();
    for (w, c) in p {
        if w.is_empty() {
            return false;
        }
        for (v, d) in dynkin(w) {
            add_term(&mut image, v, c * d);
        }
    }
    for (w, c) in p {
        add_term(&mut image, w.clone(), -(c * scalar(w.len() as i64)));
    }
    image.is_empty()
}

/// Lyndon words of the given length over letters 0..k, by Duval's
/// algorithm, in lexicographic order.
pub fn lyndon_words(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 || k == 0 {
        return out;
    }
    let mut w: Vec<usize> = vec![0];
    loop {
        if w.len() == n {
            out.push(w.clone());
        }
        let m = w.len();
        while w.len() < n {
            let c = w[w.len() - m];
            w.push(c);
        }
        while let Some(&last) = w.last() {
            if last == k - 1 {
                w.pop();
            } else {
                break;
            }
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    out
}

fn is_lyndon(w: &[usize]) -> bool {
    (1..w.len()).all(|i| w[i..] > *w)
}

/// Standard bracketing: split off the longest proper Lyndon suffix.
fn standard_bracket(w: &[usize], alphabet: &[Letter]) -> LieMonomial {
    if w.len() == 1 {
        return LieMonomial::Letter(alphabet[w[0]]);
    }
    let split = (1..w.len()).find(|&i| is_lyndon(&w[i..])).expect("a single letter is Lyndon");
    LieMonomial::bracket(standard_bracket(&w[..split], alphabet), standard_bracket(&w[split..], alphabet))
}

/// Basis of the degree-`degree` part of the free Lie algebra on the first
/// `alphabet_size` letters p1 < q1 < p2 < ...
pub fn lyndon_basis(degree: usize, alphabet_size: usize) -> Vec<LieMonomial> {
    let alphabet: Word = (0..alphabet_size as u16).map(Letter::from_code).collect();
    lyndon_words(degree, alphabet_size)
        .iter()
        .map(|w| standard_bracket(w, &alphabet))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{rank, ExactSparseMatrix};
    use std::collections::BTreeMap;

    fn mobius(n: usize) -> i64 {
        let (mut n, mut k, mut sign) = (n, 2, 1);
        while k * k <= n {
            if n % k == 0 {
                n /= k;
                if n % k == 0 {
                    return 0;
                }
                sign = -sign;
            }
            k += 1;
        }
        if n > 1 {
            sign = -sign;
        }
        sign
    }

    fn witt(n: usize, k: usize) -> i64 {
        let s: i64 = (1..=n).filter(|d| n % d == 0).map(|d| mobius(d) * (k as i64).pow((n / d) as u32)).sum();
        s / n as i64
    }

    #[test]
    fn small_bases() {
        assert_eq!(lyndon_basis(1, 4).len(), 4);
        let b = lyndon_basis(2, 2);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].to_string(), "[p1,q1]");
        assert_eq!(lyndon_basis(3, 2).len(), 2);
    }

    #[test]
    fn witt_dimensions_and_independence() {
        for k in 1..=3 {
            for n in 1..=6 {
                let basis = lyndon_basis(n, k);
                assert_eq!(basis.len() as i64, witt(n, k), "n={n} k={k}");
                let mut cols: BTreeMap<Word, usize> = BTreeMap::new();
                let exps: Vec<WordComb> = basis.iter().map(|m| m.expand()).collect();
                for e in &exps {
                    for w in e.keys() {
                        let c = cols.len();
                        cols.entry(w.clone()).or_insert(c);
                    }
                }
                let mut m = ExactSparseMatrix::new(cols.len());
                for e in &exps {
                    assert!(is_lie_element(e));
                    m.push_row(e.iter().map(|(w, c)| (cols[w], c.clone()))).unwrap();
                }
                assert_eq!(rank(&m), basis.len());
            }
        }
    }

    #[test]
    fn lie_test_rejects_non_lie() {
        let p1 = Letter::p(1);
        let w: WordComb = WordComb::from([(vec![p1, p1, p1], scalar(1))]);
        assert!(!is_lie_element(&w));
        assert!(is_lie_element(&WordComb::new()));
        let q1 = Letter::q(1);
        let sym = WordComb::from([(vec![p1, q1], scalar(1)), (vec![q1, p1], scalar(1))]);
        assert!(!is_lie_element(&sym));
    }
}
