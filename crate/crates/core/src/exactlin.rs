//! Exact sparse linear algebra over the rationals, with prime-field rank
//! checks.
//!
//! Row reduction is fraction-free: every row is scaled to a primitive
//! integer vector before elimination, and rows are combined with integer
//! multipliers only.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type Scalar = BigRational;

pub fn scalar(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Sparse vector with strictly increasing indices and no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseVector {
    len: usize,
    entries: Vec<(usize, Scalar)>,
}

impl SparseVector {
    pub fn zero(len: usize) -> Self {
        SparseVector { len, entries: Vec::new() }
    }

    pub fn unit(len: usize, i: usize) -> Result<Self> {
        Self::from_entries(len, [(i, Scalar::one())])
    }

    /// Builds a vector from unsorted entries; duplicate indices are summed.
    pub fn from_entries<I>(len: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Scalar)>,
    {
        let entries = normalize(entries, len)?;
        Ok(SparseVector { len, entries })
    }

    pub fn from_i64(len: usize, entries: &[(usize, i64)]) -> Result<Self> {
        Self::from_entries(len, entries.iter().map(|&(i, v)| (i, scalar(v))))
    }

    pub fn from_dense(values: &[Scalar]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, v.clone()))
            .collect();
        SparseVector { len: values.len(), entries }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, Scalar)] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> Scalar {
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.len);
        }
        SparseVector {
            len: self.len,
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch { expected: self.len, got: other.len });
        }
        Self::from_entries(
            self.len,
            self.entries.iter().chain(other.entries.iter()).cloned(),
        )
    }
}

fn normalize<I>(entries: I, ncols: usize) -> Result<Vec<(usize, Scalar)>>
where
    I: IntoIterator<Item = (usize, Scalar)>,
{
    let mut v: Vec<(usize, Scalar)> = entries.into_iter().collect();
    if let Some(&(col, _)) = v.iter().find(|e| e.0 >= ncols) {
        return Err(Error::ColumnOutOfRange { col, ncols });
    }
    v.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, Scalar)> = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += x,
            _ => out.push((i, x)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    Ok(out)
}

/// Row-major sparse matrix of rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSparseMatrix {
    ncols: usize,
    rows: Vec<Vec<(usize, Scalar)>>,
}

impl ExactSparseMatrix {
    pub fn new(ncols: usize) -> Self {
        ExactSparseMatrix { ncols, rows: Vec::new() }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        ExactSparseMatrix { ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn identity(n: usize) -> Self {
        ExactSparseMatrix {
            ncols: n,
            rows: (0..n).map(|i| vec![(i, Scalar::one())]).collect(),
        }
    }

    pub fn from_dense_i64(ncols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let mut m = Self::new(ncols);
        for r in rows {
            if r.len() != ncols {
                return Err(Error::DimensionMismatch { expected: ncols, got: r.len() });
            }
            m.push_row(r.iter().enumerate().map(|(i, &x)| (i, scalar(x))))?;
        }
        Ok(m)
    }

    /// Appends a row given by unsorted entries; duplicates are summed.
    pub fn push_row<I>(&mut self, entries: I) -> Result<()>
    where
        I: IntoIterator<Item = (usize, Scalar)>,
    {
        let row = normalize(entries, self.ncols)?;
        self.rows.push(row);
        Ok(())
    }

    pub fn push_row_i64(&mut self, entries: &[(usize, i64)]) -> Result<()> {
        self.push_row(entries.iter().map(|&(i, v)| (i, scalar(v))))
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<(usize, Scalar)>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> SparseVector {
        SparseVector { len: self.ncols, entries: self.rows[i].clone() }
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for (j, v) in r {
                rows[*j].push((i, v.clone()));
            }
        }
        ExactSparseMatrix { ncols: self.rows.len(), rows }
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }
}

pub fn transpose(m: &ExactSparseMatrix) -> ExactSparseMatrix {
    m.transpose()
}

type IntRow = Vec<(usize, BigInt)>;

/// Clears denominators and divides out the content. Returns an empty row
/// for the zero vector.
fn primitive_row(row: &[(usize, Scalar)]) -> IntRow {
    if row.is_empty() {
        return Vec::new();
    }
    let mut l = BigInt::one();
    for (_, v) in row {
        l = l.lcm(v.denom());
    }
    let mut out: IntRow = row
        .iter()
        .map(|(i, v)| (*i, v.numer() * (&l / v.denom())))
        .collect();
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v /= &g;
        }
    }
}

/// Returns `a*x - b*y`, dropping cancelled entries.
fn combine(a: &BigInt, x: &IntRow, b: &BigInt, y: &IntRow) -> IntRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let ci = x.get(i).map_or(usize::MAX, |e| e.0);
        let cj = y.get(j).map_or(usize::MAX, |e| e.0);
        if ci < cj {
            out.push((ci, a * &x[i].1));
            i += 1;
        } else if cj < ci {
            out.push((cj, -(b * &y[j].1)));
            j += 1;
        } else {
            let v = a * &x[i].1 - b * &y[j].1;
            if !v.is_zero() {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Eliminates the entry of `row` at column `col` using `pivot`, whose
/// leading entry sits in that column.
fn eliminate(row: &IntRow, pivot: &IntRow, col: usize) -> IntRow {
    let p = &pivot[0].1;
    let r = match row.binary_search_by_key(&col, |e| e.0) {
        Ok(k) => &row[k].1,
        Err(_) => return row.clone(),
    };
    let g = p.gcd(r);
    let (mut a, mut b) = (p / &g, r / &g);
    if a.is_negative() {
        a = -a;
        b = -b;
    }
    let mut out = combine(&a, row, &b, pivot);
    make_primitive(&mut out);
    out
}

/// Incremental row echelon form with integer rows.
#[derive(Clone, Debug)]
struct Echelon {
    rows: Vec<IntRow>,
    pivot_row: Vec<Option<usize>>,
}

impl Echelon {
    fn new(ncols: usize) -> Self {
        Echelon { rows: Vec::new(), pivot_row: vec![None; ncols] }
    }

    /// Reduces `row` against the current pivots and keeps the remainder.
    /// A smaller leading coefficient replaces the stored pivot row.
    fn insert(&mut self, mut row: IntRow) -> bool {
        loop {
            let Some(&(lead, _)) = row.first() else {
                return false;
            };
            match self.pivot_row[lead] {
                None => {
                    self.pivot_row[lead] = Some(self.rows.len());
                    self.rows.push(row);
                    return true;
                }
                Some(k) => {
                    if row[0].1.magnitude() < self.rows[k][0].1.magnitude() {
                        std::mem::swap(&mut row, &mut self.rows[k]);
                    }
                    row = eliminate(&row, &self.rows[k], lead);
                }
            }
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Back-substitutes to the reduced echelon form, with rows sorted by
    /// pivot column and leading coefficient 1.
    fn into_rref(mut self) -> (Vec<usize>, Vec<Vec<(usize, Scalar)>>) {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&k| self.rows[k][0].0);
        for &k in order.iter().rev() {
            let mut row = std::mem::take(&mut self.rows[k]);
            let cols: Vec<usize> = row[1..]
                .iter()
                .map(|e| e.0)
                .filter(|&c| self.pivot_row[c].is_some())
                .collect();
            for c in cols {
                let j = self.pivot_row[c].unwrap();
                row = eliminate(&row, &self.rows[j], c);
            }
            if row[0].1.is_negative() {
                for e in row.iter_mut() {
                    e.1 = -&e.1;
                }
            }
            self.rows[k] = row;
        }
        let pivots: Vec<usize> = order.iter().map(|&k| self.rows[k][0].0).collect();
        let rows = order
            .iter()
            .map(|&k| {
                let row = &self.rows[k];
                let lead = row[0].1.clone();
                row.iter()
                    .map(|(c, v)| (*c, BigRational::new(v.clone(), lead.clone())))
                    .collect()
            })
            .collect();
        (pivots, rows)
    }
}

fn echelon(m: &ExactSparseMatrix) -> Echelon {
    let mut e = Echelon::new(m.ncols);
    for r in &m.rows {
        e.insert(primitive_row(r));
    }
    e
}

/// Row rank over the rationals.
pub fn rank(m: &ExactSparseMatrix) -> usize {
    echelon(m).rank()
}

/// Quotient of a coordinate space by the span of relation rows.
///
/// The quotient basis is the set of non-pivot columns of the reduced
/// echelon form, so projection is a single lookup per ambient coordinate.
#[derive(Clone, Debug)]
pub struct QuotientModule {
    pub ambient_dim: usize,
    pub pivot_columns: Vec<usize>,
    pub reduced_relation_rows: ExactSparseMatrix,
    pub free_columns: Vec<usize>,
    pivot_index: Vec<Option<usize>>,
    free_index: Vec<Option<usize>>,
}

impl QuotientModule {
    pub fn dim(&self) -> usize {
        self.free_columns.len()
    }

    pub fn free_index(&self, col: usize) -> Option<usize> {
        self.free_index[col]
    }

    /// Coordinates of the basis vector `e_col`, as (free position, value).
    pub fn project_unit(&self, col: usize) -> Vec<(usize, Scalar)> {
        if let Some(f) = self.free_index[col] {
            return vec![(f, Scalar::one())];
        }
        let k = self.pivot_index[col].expect("column is either free or pivot");
        self.reduced_relation_rows.rows[k][1..]
            .iter()
            .map(|(c, v)| (self.free_index[*c].unwrap(), -v))
            .collect()
    }

    /// The coefficient of free position `f` in the projection of `e_col`.
    pub fn project_unit_at(&self, col: usize, f: usize) -> Scalar {
        if let Some(g) = self.free_index[col] {
            return if g == f { Scalar::one() } else { Scalar::zero() };
        }
        let k = self.pivot_index[col].expect("column is either free or pivot");
        let target = self.free_columns[f];
        let row = &self.reduced_relation_rows.rows[k];
        match row.binary_search_by_key(&target, |e| e.0) {
            Ok(i) => -&row[i].1,
            Err(_) => Scalar::zero(),
        }
    }

    pub fn project(&self, v: &SparseVector) -> Result<SparseVector> {
        if v.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, got: v.len() });
        }
        let mut acc = Vec::new();
        for (col, x) in v.entries() {
            for (f, y) in self.project_unit(*col) {
                acc.push((f, x * y));
            }
        }
        SparseVector::from_entries(self.dim(), acc)
    }

    /// Writes quotient coordinates back into the ambient space.
    pub fn embed(&self, coords: &SparseVector) -> Result<SparseVector> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: coords.len() });
        }
        SparseVector::from_entries(
            self.ambient_dim,
            coords.entries().iter().map(|(f, x)| (self.free_columns[*f], x.clone())),
        )
    }
}

pub fn build_quotient(ambient_dim: usize, relations: &ExactSparseMatrix) -> Result<QuotientModule> {
    if relations.ncols() != ambient_dim {
        return Err(Error::DimensionMismatch { expected: ambient_dim, got: relations.ncols() });
    }
    let (pivots, rows) = echelon(relations).into_rref();
    let mut pivot_index = vec![None; ambient_dim];
    for (k, &c) in pivots.iter().enumerate() {
        pivot_index[c] = Some(k);
    }
    let free_columns: Vec<usize> = (0..ambient_dim).filter(|&c| pivot_index[c].is_none()).collect();
    let mut free_index = vec![None; ambient_dim];
    for (f, &c) in free_columns.iter().enumerate() {
        free_index[c] = Some(f);
    }
    Ok(QuotientModule {
        ambient_dim,
        pivot_columns: pivots,
        reduced_relation_rows: ExactSparseMatrix { ncols: ambient_dim, rows },
        free_columns,
        pivot_index,
        free_index,
    })
}

pub fn project(q: &QuotientModule, v: &SparseVector) -> Result<SparseVector> {
    q.project(v)
}

pub fn embed(q: &QuotientModule, coords: &SparseVector) -> Result<SparseVector> {
    q.embed(coords)
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for &b in &BASES {
        let mut x = pow_mod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `count` distinct primes in (2^20, 2^31), drawn from a seeded generator.
pub fn random_primes(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<u64> = Vec::with_capacity(count);
    while out.len() < count {
        let c = rng.gen_range((1u64 << 20) + 1..1u64 << 31);
        if is_prime(c) && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

fn reduce_mod(x: &Scalar, p: u64) -> Result<u64> {
    let pb = BigInt::from(p);
    let d = x.denom().mod_floor(&pb).to_u64().unwrap();
    if d == 0 {
        return Err(Error::DenominatorDivisible(p));
    }
    let n = x.numer().mod_floor(&pb).to_u64().unwrap();
    Ok(mul_mod(n, pow_mod(d, p - 2, p), p))
}

/// Rank of the matrix reduced modulo a prime above 2^20.
pub fn modular_rank(m: &ExactSparseMatrix, prime: u64) -> Result<usize> {
    if prime <= 1 << 20 || !is_prime(prime) {
        return Err(Error::InvalidPrime(prime));
    }
    let p = prime;
    let mut rows: Vec<Vec<(usize, u64)>> = Vec::new();
    let mut pivot_row: Vec<Option<usize>> = vec![None; m.ncols()];
    for r in m.rows() {
        let mut row = Vec::with_capacity(r.len());
        for (c, v) in r {
            let x = reduce_mod(v, p)?;
            if x != 0 {
                row.push((*c, x));
            }
        }
        loop {
            let Some(&(lead, a)) = row.first() else { break };
            match pivot_row[lead] {
                None => {
                    let inv = pow_mod(a, p - 2, p);
                    for e in row.iter_mut() {
                        e.1 = mul_mod(e.1, inv, p);
                    }
                    pivot_row[lead] = Some(rows.len());
                    rows.push(row);
                    break;
                }
                Some(k) => {
                    let piv: &Vec<(usize, u64)> = &rows[k];
                    let mut out = Vec::with_capacity(row.len() + piv.len());
                    let (mut i, mut j) = (0, 0);
                    while i < row.len() || j < piv.len() {
                        let ci = row.get(i).map_or(usize::MAX, |e| e.0);
                        let cj = piv.get(j).map_or(usize::MAX, |e| e.0);
                        if ci < cj {
                            out.push(row[i]);
                            i += 1;
                        } else {
                            let sub = mul_mod(a, piv[j].1, p);
                            let base = if ci == cj { row[i].1 } else { 0 };
                            let v = (base + p - sub) % p;
                            if v != 0 {
                                out.push((cj, v));
                            }
                            if ci == cj {
                                i += 1;
                            }
                            j += 1;
                        }
                    }
                    row = out;
                }
            }
        }
    }
    Ok(rows.len())
}

/// Exact rank together with ranks modulo independently drawn primes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankCheck {
    pub rank: usize,
    pub modular: Vec<(u64, usize)>,
}

impl RankCheck {
    pub fn agrees(&self) -> bool {
        self.modular.iter().all(|&(_, r)| r == self.rank)
    }
}

/// Primes whose reduction fails on a denominator are skipped and replaced.
pub fn checked_rank(m: &ExactSparseMatrix, seed: u64, primes: usize) -> RankCheck {
    let exact = rank(m);
    let mut modular = Vec::new();
    let mut draw = 0;
    while modular.len() < primes {
        let cands = random_primes(seed.wrapping_add(draw), primes);
        draw += 1;
        for p in cands {
            if modular.len() == primes || modular.iter().any(|&(q, _)| q == p) {
                continue;
            }
            if let Ok(r) = modular_rank(m, p) {
                modular.push((p, r));
            }
        }
    }
    RankCheck { rank: exact, modular }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn dense_rank(rows: &[Vec<i64>]) -> usize {
        // plain rational Gaussian elimination, independent of the sparse code
        let mut a: Vec<Vec<Scalar>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| scalar(x)).collect())
            .collect();
        let ncols = a.first().map_or(0, |r| r.len());
        let mut r = 0;
        for c in 0..ncols {
            let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            for i in 0..a.len() {
                if i != r && !a[i][c].is_zero() {
                    let f = &a[i][c] / &a[r][c];
                    for j in 0..ncols {
                        let d = &f * &a[r][j];
                        a[i][j] -= d;
                    }
                }
            }
            r += 1;
        }
        r
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank(&ExactSparseMatrix::zeros(3, 3)), 0);
        assert_eq!(rank(&ExactSparseMatrix::identity(5)), 5);
        let m = ExactSparseMatrix::from_dense_i64(2, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn push_row_rejects_bad_column() {
        let mut m = ExactSparseMatrix::new(2);
        assert_eq!(
            m.push_row_i64(&[(2, 1)]),
            Err(Error::ColumnOutOfRange { col: 2, ncols: 2 })
        );
    }

    #[test]
    fn quotient_examples() {
        let q = build_quotient(4, &ExactSparseMatrix::new(4)).unwrap();
        assert_eq!(q.dim(), 4);
        let v = SparseVector::from_i64(4, &[(0, 3), (2, -1)]).unwrap();
        assert_eq!(q.project(&v).unwrap(), v);

        let mut rel = ExactSparseMatrix::new(2);
        rel.push_row_i64(&[(0, 1), (1, -1)]).unwrap();
        let q = build_quotient(2, &rel).unwrap();
        assert_eq!(q.dim(), 1);
        let a = q.project(&SparseVector::unit(2, 0).unwrap()).unwrap();
        let b = q.project(&SparseVector::unit(2, 1).unwrap()).unwrap();
        assert_eq!(a, b);
        let v = SparseVector::from_i64(2, &[(0, 3), (1, 5)]).unwrap();
        assert_eq!(q.project(&v).unwrap().get(0), scalar(8));

        let q = build_quotient(3, &ExactSparseMatrix::identity(3)).unwrap();
        assert_eq!(q.dim(), 0);
        assert!(q.project(&SparseVector::unit(3, 1).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn quotient_dimension_mismatch() {
        let err = build_quotient(3, &ExactSparseMatrix::new(2)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, got: 2 });
        let q = build_quotient(3, &ExactSparseMatrix::new(3)).unwrap();
        assert!(q.project(&SparseVector::zero(2)).is_err());
    }

    #[test]
    fn rref_has_unit_pivots_and_clean_pivot_columns() {
        let m = ExactSparseMatrix::from_dense_i64(
            4,
            &[vec![2, 4, 0, 6], vec![3, 1, 5, 0], vec![5, 5, 5, 6]],
        )
        .unwrap();
        let q = build_quotient(4, &m).unwrap();
        assert_eq!(q.pivot_columns, vec![0, 1]);
        for (k, row) in q.reduced_relation_rows.rows().iter().enumerate() {
            assert_eq!(row[0], (q.pivot_columns[k], Scalar::one()));
            for (c, _) in &row[1..] {
                assert!(q.free_columns.contains(c));
            }
        }
    }

    #[test]
    fn modular_rank_examples() {
        let p = random_primes(1, 1)[0];
        assert_eq!(modular_rank(&ExactSparseMatrix::identity(5), p).unwrap(), 5);
        assert_eq!(modular_rank(&ExactSparseMatrix::zeros(4, 4), p).unwrap(), 0);
        assert!(matches!(modular_rank(&ExactSparseMatrix::identity(2), 7), Err(Error::InvalidPrime(7))));
        let mut m = ExactSparseMatrix::new(1);
        m.push_row([(0, ratio(1, p as i64))]).unwrap();
        assert_eq!(modular_rank(&m, p), Err(Error::DenominatorDivisible(p)));
    }

    #[test]
    fn random_50x50_against_two_primes() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let rows: Vec<Vec<i64>> = (0..50)
            .map(|_| (0..50).map(|_| rng.gen_range(-9..=9)).collect())
            .collect();
        // make it rank deficient: last 10 rows are combinations of others
        let mut rows = rows;
        for i in 40..50 {
            let (a, b) = (i - 40, i - 30);
            rows[i] = (0..50).map(|j| 2 * rows[a][j] - 3 * rows[b][j]).collect();
        }
        let m = ExactSparseMatrix::from_dense_i64(50, &rows).unwrap();
        assert_eq!(rank(&m), 40);
        assert_eq!(rank(&m), dense_rank(&rows));
        let check = checked_rank(&m, 7, 2);
        assert_eq!(check.modular.len(), 2);
        assert!(check.agrees());
    }

    #[test]
    fn primes_are_seeded_and_large() {
        let a = random_primes(3, 4);
        assert_eq!(a, random_primes(3, 4));
        assert!(a.iter().all(|&p| p > 1 << 20 && is_prime(p)));
        assert!(!is_prime(1 << 21));
        assert!(is_prime(2_147_483_647));
    }

    fn small_matrix() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
        (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
            (Just(c), prop::collection::vec(prop::collection::vec(-3i64..=3, c), r))
        })
    }

    proptest! {
        #[test]
        fn rank_matches_dense_and_transpose((c, rows) in small_matrix()) {
            let m = ExactSparseMatrix::from_dense_i64(c, &rows).unwrap();
            let r = rank(&m);
            prop_assert_eq!(r, dense_rank(&rows));
            prop_assert_eq!(r, rank(&m.transpose()));
            let check = checked_rank(&m, 11, 2);
            prop_assert!(check.modular.iter().all(|&(_, k)| k <= r));
            prop_assert!(check.modular.iter().any(|&(_, k)| k == r));
        }

        #[test]
        fn projection_is_idempotent_and_kills_relations(
            (c, rows) in small_matrix(),
            v in prop::collection::vec(-5i64..=5, 6),
        ) {
            let m = ExactSparseMatrix::from_dense_i64(c, &rows).unwrap();
            let q = build_quotient(c, &m).unwrap();
            prop_assert_eq!(q.dim(), c - rank(&m));
            let v = SparseVector::from_dense(&v[..c].iter().map(|&x| scalar(x)).collect::<Vec<_>>());
            let p = q.project(&v).unwrap();
            prop_assert_eq!(q.project(&q.embed(&p).unwrap()).unwrap(), p);
            for i in 0..m.nrows() {
                prop_assert!(q.project(&m.row(i)).unwrap().is_zero());
            }
            for i in 0..q.reduced_relation_rows.nrows() {
                prop_assert!(q.project(&q.reduced_relation_rows.row(i)).unwrap().is_zero());
            }
        }
    }
}
