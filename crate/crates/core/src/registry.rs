//! Interchangeable algorithms, registered by name.

use crate::dihedral::{brute_force_coinvariants, character_side_coinvariants};
use crate::error::{Error, Result};
use crate::exactlin::{modular_rank, random_primes, rank, ExactSparseMatrix};
use crate::symfunc::{frobenius_character, mn_character, CycleType, Partition};

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: Vec<(&'static str, Box<T>)>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry { kind, entries: Vec::new() }
    }

    pub fn register(&mut self, name: &'static str, item: Box<T>) {
        self.entries.retain(|(n, _)| *n != name);
        self.entries.push((name, item));
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, b)| b.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                known: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &T)> {
        self.entries.iter().map(|(n, b)| (*n, b.as_ref()))
    }
}

pub trait CharacterAlgorithm: Send + Sync {
    fn character(&self, lambda: &Partition, mu: &CycleType) -> Result<i64>;
}

struct MurnaghanNakayama;
struct Frobenius;

impl CharacterAlgorithm for MurnaghanNakayama {
    fn character(&self, lambda: &Partition, mu: &CycleType) -> Result<i64> {
        mn_character(lambda, mu)
    }
}

impl CharacterAlgorithm for Frobenius {
    fn character(&self, lambda: &Partition, mu: &CycleType) -> Result<i64> {
        frobenius_character(lambda, mu)
    }
}

pub fn character_algorithms() -> Registry<dyn CharacterAlgorithm> {
    let mut r: Registry<dyn CharacterAlgorithm> = Registry::new("character algorithm");
    r.register("murnaghan-nakayama", Box::new(MurnaghanNakayama));
    r.register("frobenius", Box::new(Frobenius));
    r
}

pub trait RankBackend: Send + Sync {
    fn rank(&self, m: &ExactSparseMatrix) -> Result<usize>;
}

struct ExactRank;

/// Rank modulo one prime drawn from the seed. Can undercount.
struct ModularRank {
    seed: u64,
}

impl RankBackend for ExactRank {
    fn rank(&self, m: &ExactSparseMatrix) -> Result<usize> {
        Ok(rank(m))
    }
}

impl RankBackend for ModularRank {
    fn rank(&self, m: &ExactSparseMatrix) -> Result<usize> {
        modular_rank(m, random_primes(self.seed, 1)[0])
    }
}

pub fn rank_backends(seed: u64) -> Registry<dyn RankBackend> {
    let mut r: Registry<dyn RankBackend> = Registry::new("rank backend");
    r.register("exact", Box::new(ExactRank));
    r.register("modular", Box::new(ModularRank { seed }));
    r
}

/// Dimension of the dihedral coinvariants of the s-th tensor power of an
/// n-dimensional space.
pub trait CoinvariantCounter: Send + Sync {
    fn count(&self, s: usize, n: usize, twist: bool) -> Result<u64>;
}

struct CharacterSum;
struct OrbitEnumeration;

impl CoinvariantCounter for CharacterSum {
    fn count(&self, s: usize, n: usize, twist: bool) -> Result<u64> {
        character_side_coinvariants(s, n, twist)
    }
}

impl CoinvariantCounter for OrbitEnumeration {
    fn count(&self, s: usize, n: usize, twist: bool) -> Result<u64> {
        brute_force_coinvariants(s, n, twist)
    }
}

pub fn coinvariant_counters() -> Registry<dyn CoinvariantCounter> {
    let mut r: Registry<dyn CoinvariantCounter> = Registry::new("coinvariant counter");
    r.register("character-sum", Box::new(CharacterSum));
    r.register("orbit-enumeration", Box::new(OrbitEnumeration));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega2::relation_rows;

    #[test]
    fn lookup() {
        let r = character_algorithms();
        assert_eq!(r.names(), vec!["murnaghan-nakayama", "frobenius"]);
        let (l, m): (Partition, CycleType) = ("3,2".parse().unwrap(), "2,2,1".parse().unwrap());
        for (_, alg) in r.iter() {
            assert_eq!(alg.character(&l, &m).unwrap(), 1);
        }
        let err = r.get("hook").err().unwrap();
        assert!(err.to_string().contains("murnaghan-nakayama, frobenius"));
    }

    #[test]
    fn backends_agree() {
        let m = relation_rows(4).unwrap().rows;
        let b = rank_backends(1);
        assert_eq!(b.get("exact").unwrap().rank(&m).unwrap(), b.get("modular").unwrap().rank(&m).unwrap());
        let c = coinvariant_counters();
        for s in 3..=5 {
            let x = c.get("character-sum").unwrap().count(s, 2, s % 2 == 0).unwrap();
            assert_eq!(c.get("orbit-enumeration").unwrap().count(s, 2, s % 2 == 0).unwrap(), x);
        }
    }
}
