//! Partitions, symmetric group classes and irreducible characters.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{scalar, Scalar};

/// Weakly decreasing sequence of positive integers.
///
/// Ordered reverse-lexicographically, so `[n]` comes first and `[1^n]` last.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidPartition(format!("{parts:?} has a zero part")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("{parts:?} is not weakly decreasing")));
        }
        Ok(Partition(parts))
    }

    pub fn from_unsorted(mut parts: Vec<usize>) -> Result<Self> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn row(n: usize) -> Self {
        if n == 0 {
            Self::empty()
        } else {
            Partition(vec![n])
        }
    }

    pub fn column(n: usize) -> Self {
        Partition(vec![1; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn conjugate(&self) -> Self {
        let first = self.0.first().copied().unwrap_or(0);
        Partition((1..=first).map(|j| self.0.iter().filter(|&&p| p >= j).count()).collect())
    }

    /// Hook lengths row by row.
    pub fn hooks(&self) -> Vec<Vec<usize>> {
        let conj = self.conjugate();
        self.0
            .iter()
            .enumerate()
            .map(|(i, &row)| (0..row).map(|j| row - j + conj.0[j] - i - 1).collect())
            .collect()
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.cmp(&self.0)
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.iter().join(","))
    }
}

/// Accepts `3,2,1`, `[3,2,1]` and exponent shorthand such as `3,1^2`.
impl FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('[').trim_end_matches(']').trim();
        if t.is_empty() {
            return Ok(Partition::empty());
        }
        let mut parts = Vec::new();
        for tok in t.split(',') {
            let tok = tok.trim();
            let bad = || Error::InvalidPartition(format!("cannot read {tok:?} in {s:?}"));
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => (b.trim(), e.trim().parse::<usize>().map_err(|_| bad())?),
                None => (tok, 1),
            };
            let b = base.parse::<usize>().map_err(|_| bad())?;
            parts.extend(std::iter::repeat(b).take(exp));
        }
        Partition::new(parts)
    }
}

/// Cycle lengths of a permutation, fixed points included.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct CycleType(Partition);

impl CycleType {
    pub fn new(cycles: Partition) -> Self {
        CycleType(cycles)
    }

    pub fn from_unsorted(cycles: Vec<usize>) -> Result<Self> {
        Partition::from_unsorted(cycles).map(CycleType)
    }

    pub fn identity(n: usize) -> Self {
        CycleType(Partition::column(n))
    }

    pub fn of_permutation(perm: &[usize]) -> Self {
        let mut seen = vec![false; perm.len()];
        let mut cycles = Vec::new();
        for i in 0..perm.len() {
            let mut len = 0;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = perm[j];
                len += 1;
            }
            if len > 0 {
                cycles.push(len);
            }
        }
        CycleType::from_unsorted(cycles).expect("cycle lengths are positive")
    }

    pub fn partition(&self) -> &Partition {
        &self.0
    }

    pub fn cycles(&self) -> &[usize] {
        self.0.parts()
    }

    pub fn size(&self) -> usize {
        self.0.size()
    }

    pub fn sign(&self) -> i64 {
        if (self.size() - self.0.len()) % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0 .0.iter().join(","))
    }
}

impl FromStr for CycleType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let p: Partition = t.parse()?;
        Ok(CycleType(p))
    }
}

/// All partitions of `n`, in decreasing lexicographic order.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            rec(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn check_sizes(lambda: &Partition, mu: &CycleType) -> Result<()> {
    if lambda.size() != mu.size() {
        return Err(Error::SizeMismatch { lambda: lambda.size(), mu: mu.size() });
    }
    Ok(())
}

/// Murnaghan-Nakayama evaluation for a fixed cycle type, memoized on
/// (beta set, number of cycles consumed). All shapes are padded to `n`
/// beta numbers so one table serves every partition of `n`.
pub struct MnEvaluator {
    cycles: Vec<usize>,
    memo: HashMap<(Vec<usize>, usize), i64>,
}

impl MnEvaluator {
    pub fn new(mu: &CycleType) -> Self {
        MnEvaluator { cycles: mu.cycles().to_vec(), memo: HashMap::new() }
    }

    pub fn evaluate(&mut self, lambda: &Partition) -> Result<i64> {
        let n: usize = self.cycles.iter().sum();
        if lambda.size() != n {
            return Err(Error::SizeMismatch { lambda: lambda.size(), mu: n });
        }
        // beta numbers in increasing order
        let mut beta: Vec<usize> = (0..n)
            .map(|i| lambda.parts().get(n - 1 - i).copied().unwrap_or(0) + i)
            .collect();
        beta.sort_unstable();
        Ok(self.rec(beta, 0))
    }

    fn rec(&mut self, beta: Vec<usize>, k: usize) -> i64 {
        if k == self.cycles.len() {
            return 1;
        }
        if let Some(&v) = self.memo.get(&(beta.clone(), k)) {
            return v;
        }
        let r = self.cycles[k];
        let mut total = 0;
        for i in 0..beta.len() {
            let b = beta[i];
            if b < r || beta.binary_search(&(b - r)).is_ok() {
                continue;
            }
            let between = beta.iter().filter(|&&x| x > b - r && x < b).count();
            let mut next = beta.clone();
            next[i] = b - r;
            next.sort_unstable();
            let sign = if between % 2 == 0 { 1 } else { -1 };
            total += sign * self.rec(next, k + 1);
        }
        self.memo.insert((beta, k), total);
        total
    }
}

pub fn mn_character(lambda: &Partition, mu: &CycleType) -> Result<i64> {
    check_sizes(lambda, mu)?;
    MnEvaluator::new(mu).evaluate(lambda)
}

/// χ_λ(μ) for every λ ⊢ n, in the order of [`all_partitions`].
pub fn mn_column(mu: &CycleType) -> Vec<(Partition, i64)> {
    let mut ev = MnEvaluator::new(mu);
    all_partitions(mu.size())
        .into_iter()
        .map(|l| {
            let v = ev.evaluate(&l).expect("sizes agree");
            (l, v)
        })
        .collect()
}

pub const FROBENIUS_MAX_N: usize = 8;

/// Coefficient of x^(λ+δ) in a_δ · Π p_{μ_i}, in len(λ) variables.
pub fn frobenius_character(lambda: &Partition, mu: &CycleType) -> Result<i64> {
    check_sizes(lambda, mu)?;
    let n = lambda.size();
    if n > FROBENIUS_MAX_N {
        return Err(Error::OutOfRange(format!(
            "frobenius_character is limited to n <= {FROBENIUS_MAX_N}, got {n}"
        )));
    }
    let l = lambda.len();
    if l == 0 {
        return Ok(1);
    }
    let mut poly: HashMap<Vec<usize>, i64> = HashMap::from([(vec![0; l], 1)]);
    for &r in mu.cycles() {
        let mut next: HashMap<Vec<usize>, i64> = HashMap::new();
        for (e, c) in &poly {
            for j in 0..l {
                let mut f = e.clone();
                f[j] += r;
                *next.entry(f).or_default() += c;
            }
        }
        poly = next;
    }
    let target: Vec<usize> = (0..l).map(|j| lambda.parts()[j] + l - 1 - j).collect();
    let mut total = 0;
    for perm in (0..l).permutations(l) {
        let inversions = (0..l)
            .flat_map(|i| (i + 1..l).map(move |j| (i, j)))
            .filter(|&(i, j)| perm[i] > perm[j])
            .count();
        let sign = if inversions % 2 == 0 { 1 } else { -1 };
        let mut e = Vec::with_capacity(l);
        for j in 0..l {
            let d = l - 1 - perm[j];
            if target[j] < d {
                break;
            }
            e.push(target[j] - d);
        }
        if e.len() == l {
            total += sign * poly.get(&e).copied().unwrap_or(0);
        }
    }
    Ok(total)
}

/// Hook length formula.
pub fn dim_irr(lambda: &Partition) -> u128 {
    let hooks: u128 = lambda.hooks().iter().flatten().map(|&h| h as u128).product();
    factorial(lambda.size()) / hooks
}

/// Dimension of the GL(n) Schur functor, by the hook content formula.
pub fn dim_gl(lambda: &Partition, n: usize) -> u128 {
    if lambda.len() > n {
        return 0;
    }
    let hooks = lambda.hooks();
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for (i, &row) in lambda.parts().iter().enumerate() {
        for j in 0..row {
            num *= BigUint::from(n + j - i);
            den *= BigUint::from(hooks[i][j]);
        }
    }
    (num / den).to_u128().expect("dimension fits in u128")
}

/// n!/z_μ.
pub fn class_size(mu: &CycleType) -> u128 {
    let mut z: u128 = 1;
    for (len, group) in &mu.cycles().iter().chunk_by(|&&c| c) {
        let m = group.count();
        z *= (len as u128).pow(m as u32) * factorial(m);
    }
    factorial(mu.size()) / z
}

/// A function on the conjugacy classes of S_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFunction {
    pub n: usize,
    pub values: BTreeMap<CycleType, Scalar>,
}

impl ClassFunction {
    pub fn new(n: usize, values: BTreeMap<CycleType, Scalar>) -> Result<Self> {
        for mu in all_partitions(n) {
            if !values.contains_key(&CycleType::new(mu.clone())) {
                return Err(Error::InvalidPartition(format!("class function misses {mu}")));
            }
        }
        if let Some(mu) = values.keys().find(|m| m.size() != n) {
            return Err(Error::SizeMismatch { lambda: n, mu: mu.size() });
        }
        Ok(ClassFunction { n, values })
    }

    pub fn from_fn<F: FnMut(&CycleType) -> Scalar>(n: usize, mut f: F) -> Self {
        let values = all_partitions(n)
            .into_iter()
            .map(|p| {
                let mu = CycleType::new(p);
                let v = f(&mu);
                (mu, v)
            })
            .collect();
        ClassFunction { n, values }
    }

    pub fn character(lambda: &Partition) -> Self {
        Self::from_fn(lambda.size(), |mu| scalar(mn_character(lambda, mu).expect("sizes agree")))
    }

    pub fn value(&self, mu: &CycleType) -> &Scalar {
        &self.values[mu]
    }
}

/// Multiplicities ⟨f, χ_λ⟩ for every λ ⊢ n, checked by reconstruction.
pub fn decompose_class_function(f: &ClassFunction) -> Result<BTreeMap<Partition, Scalar>> {
    let n = f.n;
    let lambdas = all_partitions(n);
    let columns: Vec<(CycleType, Vec<(Partition, i64)>)> = f
        .values
        .keys()
        .map(|mu| (mu.clone(), mn_column(mu)))
        .collect();
    let order = scalar(factorial(n) as i64);
    let mut out = BTreeMap::new();
    for (li, lambda) in lambdas.iter().enumerate() {
        let mut acc = Scalar::zero();
        for (mu, col) in &columns {
            let size = scalar(class_size(mu) as i64);
            acc += size * &f.values[mu] * scalar(col[li].1);
        }
        out.insert(lambda.clone(), acc / &order);
    }
    for (mu, col) in &columns {
        let mut back = Scalar::zero();
        for (li, lambda) in lambdas.iter().enumerate() {
            back += &out[lambda] * scalar(col[li].1);
        }
        if back != f.values[mu] {
            return Err(Error::Consistency(format!(
                "class function is not a combination of irreducible characters at {mu}"
            )));
        }
    }
    Ok(out)
}
