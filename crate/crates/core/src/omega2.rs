//! The rank-2 space: generators [v|w] on pairs of nonempty words, the
//! relations S3, S4, IHX1 and TRI, and its symmetric-group structure.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;

use itertools::Itertools;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::{build_quotient, checked_rank, modular_rank, random_primes, ExactSparseMatrix, QuotientModule, RankCheck, Scalar};
use crate::lietrees::Letter;
use crate::symfunc::{all_partitions, dim_irr, ClassFunction, CycleType, Partition, decompose_class_function};

/// Hair counts above this are refused.
pub const MAX_HAIRS: usize = 7;
/// Largest h for the equivariant computation.
pub const MAX_EQUIVARIANT_HAIRS: usize = 6;
/// Largest ambient dimension accepted in alphabet mode.
pub const MAX_AMBIENT: usize = 30240;
pub const DEFAULT_SEED: u64 = 20140;

/// A generator [left|right]. Symbols are hair labels 1..h or basis letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PairWordGenerator<T> {
    pub left: Vec<T>,
    pub right: Vec<T>,
}

impl<T: fmt::Display> fmt::Display for PairWordGenerator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}|{}]", self.left.iter().join(" "), self.right.iter().join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RelationKind {
    S3,
    S4,
    Ihx1,
    Tri,
}

#[derive(Clone, Debug)]
pub struct RelationSet {
    pub rows: ExactSparseMatrix,
    pub tags: Vec<RelationKind>,
}

impl RelationSet {
    pub fn count(&self, kind: RelationKind) -> usize {
        self.tags.iter().filter(|&&k| k == kind).count()
    }
}

/// Generators with an index, and the relation rows over them.
#[derive(Clone, Debug)]
pub struct Presentation<T> {
    pub generators: Vec<PairWordGenerator<T>>,
    pub relations: RelationSet,
    index: HashMap<PairWordGenerator<T>, usize>,
}

impl<T: Clone + Ord + Hash> Presentation<T> {
    pub fn index_of(&self, g: &PairWordGenerator<T>) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// ρ(w) = (−1)^|w| · reversed w.
fn bar<T: Clone>(w: &[T]) -> (i64, Vec<T>) {
    let s = if w.len() % 2 == 0 { 1 } else { -1 };
    (s, w.iter().rev().cloned().collect())
}

/// All order-preserving splittings of `w` into complementary subwords.
fn unshuffles<T: Clone>(w: &[T]) -> Vec<(Vec<T>, Vec<T>)> {
    let n = w.len();
    (0u32..1 << n)
        .map(|mask| {
            let mut i = Vec::new();
            let mut j = Vec::new();
            for (k, x) in w.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    i.push(x.clone());
                } else {
                    j.push(x.clone());
                }
            }
            (i, j)
        })
        .collect()
}

fn concat<T: Clone>(a: &[T], b: &[T]) -> Vec<T> {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    v
}

/// Distinct rearrangements of a multiset, in lexicographic order.
pub fn distinct_permutations<T: Clone + Ord>(items: &[T]) -> Vec<Vec<T>> {
    let mut cur = items.to_vec();
    cur.sort();
    let mut out = vec![cur.clone()];
    if cur.len() < 2 {
        return out;
    }
    loop {
        let Some(i) = (0..cur.len() - 1).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
}

fn generator_key<T: Ord>(g: &PairWordGenerator<T>) -> (usize, &[T], &[T]) {
    (g.left.len(), &g.left, &g.right)
}

/// Builds the presentation on all splittings of the given words. The word
/// list must be closed under rearrangement and free of duplicates.
fn present<T: Clone + Ord + Hash>(words: &[Vec<T>]) -> Result<Presentation<T>> {
    let mut generators = Vec::new();
    for u in words {
        for m in 1..u.len() {
            generators.push(PairWordGenerator { left: u[..m].to_vec(), right: u[m..].to_vec() });
        }
    }
    generators.sort_by(|a, b| generator_key(a).cmp(&generator_key(b)));
    generators.dedup();
    let index: HashMap<_, _> = generators.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
    let n = generators.len();

    let mut rows = ExactSparseMatrix::new(n);
    let mut tags = Vec::new();
    let mut add = |kind: RelationKind, terms: Vec<(i64, Vec<T>, Vec<T>)>| -> Result<()> {
        let mut row: BTreeMap<usize, i64> = BTreeMap::new();
        for (c, l, r) in terms {
            if l.is_empty() || r.is_empty() {
                continue;
            }
            let g = PairWordGenerator { left: l, right: r };
            let k = *index
                .get(&g)
                .ok_or_else(|| Error::Consistency("relation term outside the generator set".into()))?;
            *row.entry(k).or_default() += c;
        }
        let entries: Vec<(usize, i64)> = row.into_iter().filter(|e| e.1 != 0).collect();
        rows.push_row_i64(&entries)?;
        tags.push(kind);
        Ok(())
    };

    for g in &generators {
        let (v, w) = (&g.left, &g.right);
        let (sv, bv) = bar(v);
        let (sw, bw) = bar(w);
        add(RelationKind::S3, vec![(1, v.clone(), w.clone()), (-sv * sw, bv.clone(), bw.clone())])?;
        add(RelationKind::S4, vec![(1, v.clone(), w.clone()), (-sv * sw, bw, bv)])?;
    }
    // [v v0|w] − [v|v0 w] − [v0 v|w] + [v|w v0], one row per word v0·x
    for u in words.iter().filter(|u| !u.is_empty()) {
        let (v0, rest) = (&u[..1], &u[1..]);
        for m in 1..rest.len() {
            let (v, w) = (&rest[..m], &rest[m..]);
            add(
                RelationKind::Ihx1,
                vec![
                    (1, concat(v, v0), w.to_vec()),
                    (-1, v.to_vec(), concat(v0, w)),
                    (-1, concat(v0, v), w.to_vec()),
                    (1, v.to_vec(), concat(w, v0)),
                ],
            )?;
        }
    }
    for g in &generators {
        let (v, w) = (&g.left, &g.right);
        let mut terms = Vec::new();
        for (i, j) in unshuffles(v) {
            let (s, bi) = bar(&i);
            terms.push((s, bi, concat(&j, w)));
        }
        terms.push((1, v.clone(), w.clone()));
        for (i, j) in unshuffles(w) {
            let (s, bj) = bar(&j);
            terms.push((s, concat(v, &i), bj));
        }
        add(RelationKind::Tri, terms)?;
    }
    Ok(Presentation { generators, relations: RelationSet { rows, tags }, index })
}

fn labels(h: usize) -> Vec<usize> {
    (1..=h).collect()
}

fn distinct_presentation(h: usize) -> Result<Presentation<usize>> {
    present(&distinct_permutations(&labels(h)))
}

/// Generators on the labels 1..h, each used once, ordered by left length
/// and then lexicographically.
pub fn enumerate_generators(h: usize) -> Vec<PairWordGenerator<usize>> {
    distinct_presentation(h).map(|p| p.generators).unwrap_or_default()
}

pub fn relation_rows(h: usize) -> Result<RelationSet> {
    if h > MAX_HAIRS {
        return Err(Error::OutOfRange(format!("h = {h} exceeds {MAX_HAIRS}")));
    }
    Ok(distinct_presentation(h)?.relations)
}

fn guard(h: usize, max: usize) -> Result<()> {
    if h > max {
        return Err(Error::OutOfRange(format!("h = {h} exceeds {max}")));
    }
    Ok(())
}

fn verified_rank(m: &ExactSparseMatrix, seed: u64) -> Result<RankCheck> {
    let check = checked_rank(m, seed, 2);
    if !check.agrees() {
        return Err(Error::Consistency(format!(
            "exact rank {} disagrees with modular ranks {:?}",
            check.rank, check.modular
        )));
    }
    Ok(check)
}

/// Dimension of the quotient, with the rank checked modulo two primes.
pub fn quotient_dim_with_seed(h: usize, seed: u64) -> Result<(usize, RankCheck)> {
    guard(h, MAX_HAIRS)?;
    let p = distinct_presentation(h)?;
    let check = verified_rank(&p.relations.rows, seed)?;
    Ok((p.len() - check.rank, check))
}

pub fn quotient_dim(h: usize) -> Result<usize> {
    quotient_dim_with_seed(h, DEFAULT_SEED).map(|x| x.0)
}

#[derive(Clone, Debug)]
pub struct EquivariantQuotient {
    pub h: usize,
    pub generators: Vec<PairWordGenerator<usize>>,
    pub quotient: QuotientModule,
    pub character: ClassFunction,
    pub decomposition: BTreeMap<Partition, u64>,
    pub rank_check: RankCheck,
}

impl EquivariantQuotient {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    /// Σ mult·dim_irr over the decomposition.
    pub fn checksum(&self) -> u128 {
        self.decomposition.iter().map(|(l, &m)| m as u128 * dim_irr(l)).sum()
    }
}

/// A permutation of 1..h with the given cycle type, as a map on labels
/// (index 0 unused).
fn representative(mu: &CycleType) -> Vec<usize> {
    let mut perm = vec![0];
    let mut start = 1;
    for &len in mu.cycles() {
        for j in 0..len {
            perm.push(start + (j + 1) % len);
        }
        start += len;
    }
    perm
}

pub fn equivariant_decomposition(h: usize) -> Result<EquivariantQuotient> {
    equivariant_decomposition_with_seed(h, DEFAULT_SEED)
}

pub fn equivariant_decomposition_with_seed(h: usize, seed: u64) -> Result<EquivariantQuotient> {
    guard(h, MAX_EQUIVARIANT_HAIRS)?;
    let p = distinct_presentation(h)?;
    let quotient = build_quotient(p.len(), &p.relations.rows)?;
    let rank = quotient.pivot_columns.len();
    let mut modular = Vec::new();
    for prime in random_primes(seed, 2) {
        modular.push((prime, modular_rank(&p.relations.rows, prime)?));
    }
    let rank_check = RankCheck { rank, modular };
    if !rank_check.agrees() {
        return Err(Error::Consistency(format!(
            "exact rank {rank} disagrees with modular ranks {:?}",
            rank_check.modular
        )));
    }

    let mut values = BTreeMap::new();
    for mu in all_partitions(h).into_iter().map(CycleType::new) {
        let perm = representative(&mu);
        let mut trace = Scalar::zero();
        for (f, &col) in quotient.free_columns.iter().enumerate() {
            let g = &p.generators[col];
            let moved = PairWordGenerator {
                left: g.left.iter().map(|&x| perm[x]).collect(),
                right: g.right.iter().map(|&x| perm[x]).collect(),
            };
            let k = p.index_of(&moved).expect("the symmetric group permutes generators");
            trace += quotient.project_unit_at(k, f);
        }
        if !trace.is_integer() {
            return Err(Error::Consistency(format!("non-integer trace {trace} at {mu}")));
        }
        values.insert(mu, trace);
    }
    let character = ClassFunction::new(h, values)?;
    let mut decomposition = BTreeMap::new();
    for (lambda, m) in decompose_class_function(&character)? {
        if m.is_zero() {
            continue;
        }
        let m = m
            .to_integer()
            .to_u64()
            .filter(|_| m.is_integer())
            .ok_or_else(|| Error::Consistency(format!("multiplicity {m} of {lambda}")))?;
        decomposition.insert(lambda, m);
    }
    let out = EquivariantQuotient {
        h,
        generators: p.generators,
        quotient,
        character,
        decomposition,
        rank_check,
    };
    if out.checksum() != out.dim() as u128 {
        return Err(Error::Consistency(format!(
            "Σ mult·dim = {} but the quotient has dimension {}",
            out.checksum(),
            out.dim()
        )));
    }
    Ok(out)
}

/// The presentation over one multiset of basis letters, with its quotient.
#[derive(Clone, Debug)]
pub struct LetterQuotient {
    pub presentation: Presentation<Letter>,
    pub quotient: QuotientModule,
}

impl LetterQuotient {
    pub fn new(words: &[Vec<Letter>]) -> Result<Self> {
        let presentation = present(words)?;
        if presentation.len() > MAX_AMBIENT {
            return Err(Error::OutOfRange(format!("{} generators", presentation.len())));
        }
        let quotient = build_quotient(presentation.len(), &presentation.relations.rows)?;
        Ok(LetterQuotient { presentation, quotient })
    }

    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }
}

/// The presentation on all words of length h over the alphabet, repeated
/// letters allowed.
pub fn alphabet_quotient(alphabet: &[Letter], h: usize) -> Result<LetterQuotient> {
    let mut letters = alphabet.to_vec();
    letters.sort();
    letters.dedup();
    let words: usize = (h.saturating_sub(1)) * letters.len().pow(h as u32);
    if h > MAX_HAIRS || words > MAX_AMBIENT {
        return Err(Error::OutOfRange(format!("{} letters with h = {h}", letters.len())));
    }
    let all: Vec<Vec<Letter>> = (0..h).map(|_| letters.iter().copied()).multi_cartesian_product().collect();
    let all = if h == 0 { vec![Vec::new()] } else { all };
    LetterQuotient::new(&all)
}

/// Quotients of the presentation restricted to single letter multisets,
/// built on first use.
#[derive(Debug, Default)]
pub struct MultisetQuotients {
    cache: HashMap<Vec<Letter>, LetterQuotient>,
}

impl MultisetQuotients {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, multiset: &[Letter]) -> Result<&LetterQuotient> {
        let mut key = multiset.to_vec();
        key.sort();
        if !self.cache.contains_key(&key) {
            let q = LetterQuotient::new(&distinct_permutations(&key))?;
            self.cache.insert(key.clone(), q);
        }
        Ok(&self.cache[&key])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComparisonStatus {
    Match,
    Mismatch,
    TypoResolved,
    Inconsistent,
}

#[derive(Clone, Debug, Serialize)]
pub struct PaperComparison {
    pub printed: &'static str,
    pub reading: Option<BTreeMap<Partition, u64>>,
    pub status: ComparisonStatus,
    pub note: String,
}

fn parts(list: &[(&str, u64)]) -> BTreeMap<Partition, u64> {
    list.iter().map(|(s, m)| (s.parse().expect("valid partition"), *m)).collect()
}

/// The published list for h hairs, read against a computed decomposition.
pub fn paper_comparison(h: usize, computed: &BTreeMap<Partition, u64>) -> Option<PaperComparison> {
    let status = |reading: &BTreeMap<Partition, u64>, ok: ComparisonStatus| {
        if reading == computed {
            ok
        } else {
            ComparisonStatus::Mismatch
        }
    };
    match h {
        0..=3 => {
            let reading = BTreeMap::new();
            Some(PaperComparison {
                printed: "0",
                status: status(&reading, ComparisonStatus::Match),
                reading: Some(reading),
                note: String::new(),
            })
        }
        4 => {
            let reading = parts(&[("1^4", 1), ("3,1", 1)]);
            let st = status(&reading, ComparisonStatus::Match);
            let note = if st == ComparisonStatus::Mismatch {
                "dimensions agree (1+3); the one-dimensional summand computes as [4], not [1^4]".to_string()
            } else {
                String::new()
            };
            Some(PaperComparison { printed: "[1^4]+[31]", status: st, reading: Some(reading), note })
        }
        5 => {
            let reading = parts(&[("3,1,1", 2), ("2,2,1", 1), ("2,1,1,1", 1)]);
            Some(PaperComparison {
                printed: "2[31^1]+[2^21]+[21^3]",
                status: status(&reading, ComparisonStatus::TypoResolved),
                reading: Some(reading),
                note: "[31^1] has size 4; read as [3,1,1]".to_string(),
            })
        }
        6 => {
            let alt = parts(&[
                ("6", 1),
                ("5,1", 2),
                ("4,2", 3),
                ("3,3", 1),
                ("3,2,1", 3),
                ("2,2,2", 2),
                ("2,2,1,1", 2),
                ("2,1,1,1,1", 2),
                ("1^6", 1),
            ]);
            let mut note = "printed list repeats [1^6] and contains [21^5], which has size 7; the computed list is reported".to_string();
            if &alt == computed {
                note.push_str("; it coincides with the printed one if the first [1^6] is read as [6] and [21^5] as [21^4]");
            }
            Some(PaperComparison {
                printed: "[1^6]+2[51]+3[42]+[3^2]+3[321]+2[2^3]+2[2^21^2]+2[21^5]+[1^6]",
                reading: None,
                status: ComparisonStatus::Inconsistent,
                note,
            })
        }
        _ => None,
    }
}
