//! The dihedral group D_2s inside S_s and multiplicities of irreducibles in
//! dihedral coinvariants of tensor powers.

use std::collections::BTreeMap;

use num_integer::{binomial, Integer};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{ratio, scalar, Scalar};
use crate::symfunc::{all_partitions, dim_gl, mn_column, CycleType, Partition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReflectionKind {
    /// Odd s: the axis passes through one vertex and the opposite edge.
    Axis,
    /// Even s: the axis passes through two edge midpoints.
    Edge,
    /// Even s: the axis passes through two opposite vertices.
    Vertex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DihedralElement {
    Rotation(usize),
    Reflection(ReflectionKind),
}

impl DihedralElement {
    /// The permutation of positions 0..s, as `perm[i]` = image of `i`.
    pub fn permutation(&self, s: usize) -> Vec<usize> {
        match *self {
            DihedralElement::Rotation(r) => (0..s).map(|i| (i + r) % s).collect(),
            DihedralElement::Reflection(ReflectionKind::Vertex | ReflectionKind::Axis) => {
                (0..s).map(|i| (s - i) % s).collect()
            }
            DihedralElement::Reflection(ReflectionKind::Edge) => (0..s).map(|i| s - 1 - i).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DihedralClass {
    pub representative: DihedralElement,
    pub size: usize,
    pub cycle_type: CycleType,
    pub twist_sign: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DihedralClassTable {
    pub s: usize,
    pub classes: Vec<DihedralClass>,
}

fn rotation_type(s: usize, r: usize) -> CycleType {
    let g = r.gcd(&s);
    CycleType::new(Partition::new(vec![s / g; g]).expect("constant parts"))
}

fn reflection_type(twos: usize, ones: usize) -> CycleType {
    let mut parts = vec![2; twos];
    parts.extend(std::iter::repeat(1).take(ones));
    CycleType::new(Partition::new(parts).expect("descending parts"))
}

pub fn dihedral_classes(s: usize) -> Result<DihedralClassTable> {
    if s < 3 {
        return Err(Error::OutOfRange(format!("dihedral classes need s >= 3, got {s}")));
    }
    let mut classes = Vec::new();
    for r in 0..=s / 2 {
        let size = if r == 0 || 2 * r == s { 1 } else { 2 };
        classes.push(DihedralClass {
            representative: DihedralElement::Rotation(r),
            size,
            cycle_type: rotation_type(s, r),
            twist_sign: 1,
        });
    }
    if s % 2 == 1 {
        classes.push(DihedralClass {
            representative: DihedralElement::Reflection(ReflectionKind::Axis),
            size: s,
            cycle_type: reflection_type((s - 1) / 2, 1),
            twist_sign: -1,
        });
    } else {
        classes.push(DihedralClass {
            representative: DihedralElement::Reflection(ReflectionKind::Edge),
            size: s / 2,
            cycle_type: reflection_type(s / 2, 0),
            twist_sign: -1,
        });
        classes.push(DihedralClass {
            representative: DihedralElement::Reflection(ReflectionKind::Vertex),
            size: s / 2,
            cycle_type: reflection_type(s / 2 - 1, 2),
            twist_sign: -1,
        });
    }
    Ok(DihedralClassTable { s, classes })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Labeling {
    Symmetric,
    Symplectic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityTable {
    pub s: usize,
    pub twist: bool,
    pub labeling: Labeling,
    pub entries: BTreeMap<Partition, u64>,
}

impl MultiplicityTable {
    pub fn get(&self, lambda: &Partition) -> u64 {
        self.entries.get(lambda).copied().unwrap_or(0)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (&Partition, u64)> {
        self.entries.iter().filter(|e| *e.1 > 0).map(|(p, &m)| (p, m))
    }
}

/// Exact averaged character sum; errors if it is not a nonnegative integer.
fn average(s: usize, lambda: &Partition, sum: &Scalar) -> Result<u64> {
    let m = sum / scalar(2 * s as i64);
    if !m.is_integer() || m < Scalar::zero() {
        return Err(Error::Consistency(format!(
            "coinvariant multiplicity of {lambda} in degree {s} is {m}, not a nonnegative integer"
        )));
    }
    Ok(m.to_integer().to_u64().expect("nonnegative"))
}

/// Multiplicities for every λ ⊢ s from the averaged (optionally
/// sign-twisted) dihedral character sum.
pub fn coinvariant_table_with(table: &DihedralClassTable, twist: bool, fault: bool) -> Result<MultiplicityTable> {
    let s = table.s;
    let lambdas = all_partitions(s);
    let mut sums = vec![Scalar::zero(); lambdas.len()];
    for class in &table.classes {
        let mut sign = if twist { class.twist_sign } else { 1 };
        if fault && matches!(class.representative, DihedralElement::Reflection(_)) {
            sign = 1;
        }
        let weight = class.size as i64 * sign;
        for (i, (_, chi)) in mn_column(&class.cycle_type).into_iter().enumerate() {
            sums[i] += scalar(weight * chi);
        }
    }
    let mut entries = BTreeMap::new();
    for (lambda, sum) in lambdas.into_iter().zip(sums) {
        let m = average(s, &lambda, &sum)?;
        entries.insert(lambda, m);
    }
    Ok(MultiplicityTable { s, twist, labeling: Labeling::Symmetric, entries })
}

pub fn coinvariant_table(s: usize, twist: bool) -> Result<MultiplicityTable> {
    coinvariant_table_with(&dihedral_classes(s)?, twist, false)
}

pub fn coinvariant_multiplicity(s: usize, lambda: &Partition, twist: bool) -> Result<u64> {
    if lambda.size() != s {
        return Err(Error::SizeMismatch { lambda: lambda.size(), mu: s });
    }
    let table = dihedral_classes(s)?;
    let mut sum = Scalar::zero();
    for class in &table.classes {
        let sign = if twist { class.twist_sign } else { 1 };
        let chi = crate::symfunc::mn_character(lambda, &class.cycle_type)?;
        sum += scalar(class.size as i64 * sign * chi);
    }
    average(s, lambda, &sum)
}

/// The twist is applied exactly when s is even.
pub fn hs_decomposition(s: usize) -> Result<MultiplicityTable> {
    coinvariant_table(s, s % 2 == 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesFamily {
    Sign,
    Trivial,
    Hook2,
    TwoRow,
}

impl SeriesFamily {
    pub const ALL: [SeriesFamily; 4] =
        [SeriesFamily::Sign, SeriesFamily::Trivial, SeriesFamily::Hook2, SeriesFamily::TwoRow];

    pub fn partition(&self, s: usize) -> Partition {
        match self {
            SeriesFamily::Sign => Partition::column(s),
            SeriesFamily::Trivial => Partition::row(s),
            SeriesFamily::Hook2 => {
                let mut parts = vec![2];
                parts.extend(std::iter::repeat(1).take(s - 2));
                Partition::new(parts).expect("hook")
            }
            SeriesFamily::TwoRow => Partition::new(vec![s - 1, 1]).expect("two rows"),
        }
    }
}

pub fn series_probe(s: usize, family: SeriesFamily) -> Result<u64> {
    coinvariant_multiplicity(s, &family.partition(s), s % 2 == 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedFormOrder {
    /// degree p, untwisted
    P,
    /// degree 2p, twisted
    TwoP,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedFormReport {
    pub p: u64,
    pub k: u64,
    pub order: ClosedFormOrder,
    pub partition: Partition,
    pub formula: &'static str,
    #[serde(serialize_with = "serialize_scalar")]
    pub printed_value: Scalar,
    pub character_sum: u64,
    pub agrees: bool,
}

pub fn serialize_scalar<S: serde::Serializer>(x: &Scalar, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&x.to_string())
}

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        0
    } else {
        binomial(n, k)
    }
}

/// Evaluates the printed two-row closed forms and compares them with the
/// character sum on the corresponding partition.
pub fn two_row_closed_form(p: u64, k: u64, order: ClosedFormOrder) -> Result<ClosedFormReport> {
    if p < 3 || !crate::exactlin::is_prime(p) {
        return Err(Error::OutOfRange(format!("p = {p} must be an odd prime")));
    }
    let (pi, ki) = (p as i64, k as i64);
    let m = ki / 2;
    let (s, twist, formula, printed_value) = match order {
        ClosedFormOrder::P => {
            if !(1 < k && k <= (p - 1) / 2) {
                return Err(Error::OutOfRange(format!("k = {k} outside 1 < k <= {}", (p - 1) / 2)));
            }
            let alpha = binom(pi, ki) - binom(pi, ki - 1);
            if k % 2 == 1 {
                (p as usize, false, "alpha_k/(2p)", ratio(alpha, 2 * pi))
            } else {
                let half = (pi - 1) / 2;
                let beta = binom(half, m) - binom(half, m - 1);
                (p as usize, false, "(alpha_2m+beta_m)/2", ratio(alpha + beta, 2))
            }
        }
        ClosedFormOrder::TwoP => {
            if !(1 < k && k <= p) {
                return Err(Error::OutOfRange(format!("k = {k} outside 1 < k <= {p}")));
            }
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let delta = i64::from(k == p);
            let num = binom(2 * pi, ki) - binom(2 * pi, ki - 1) + sign * (pi + 1) * binom(pi, m)
                - pi * binom(pi - 2, m)
                + pi * binom(pi - 2, m - 1)
                + 2 * (pi - 1) * delta;
            (2 * p as usize, true, "two-row degree 2p formula", ratio(num, 4 * pi))
        }
    };
    let partition = Partition::new(vec![s - k as usize, k as usize])?;
    let character_sum = coinvariant_multiplicity(s, &partition, twist)?;
    let agrees = printed_value == scalar(character_sum as i64);
    Ok(ClosedFormReport { p, k, order, partition, formula, printed_value, character_sum, agrees })
}

/// Relabels S_s multiplicities as multiplicities of Sp irreducibles in the
/// traceless part, valid in the stable range.
pub fn gl_sp_dictionary(t: &MultiplicityTable) -> MultiplicityTable {
    MultiplicityTable { labeling: Labeling::Symplectic, ..t.clone() }
}

pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

/// Dimension of the D_2s coinvariants of (k^n)^{⊗s}, by orbits on basis
/// words: an orbit survives unless some stabilizer element acts by −1.
pub fn brute_force_coinvariants(s: usize, n: usize, twist: bool) -> Result<u64> {
    let total = (n as u64).checked_pow(s as u32).filter(|&t| t <= BRUTE_FORCE_LIMIT);
    let Some(total) = total else {
        return Err(Error::OutOfRange(format!("{n}^{s} basis words exceed {BRUTE_FORCE_LIMIT}")));
    };
    if s == 0 || n == 0 {
        return Ok(total);
    }
    let mut group: Vec<(Vec<usize>, bool)> = Vec::with_capacity(2 * s);
    for r in 0..s {
        group.push(((0..s).map(|i| (i + r) % s).collect(), false));
        group.push(((0..s).map(|i| (2 * s - 1 - i + r) % s).collect(), twist));
    }
    let total = total as usize;
    let mut seen = vec![false; total];
    let mut word = vec![0usize; s];
    let mut image = vec![0usize; s];
    let mut count = 0;
    for code in 0..total {
        if seen[code] {
            continue;
        }
        let mut c = code;
        for w in word.iter_mut() {
            *w = c % n;
            c /= n;
        }
        let mut killed = false;
        for (perm, negative) in &group {
            for i in 0..s {
                image[perm[i]] = word[i];
            }
            let img = image.iter().rev().fold(0, |acc, &x| acc * n + x);
            seen[img] = true;
            if img == code && *negative {
                killed = true;
            }
        }
        if !killed {
            count += 1;
        }
    }
    Ok(count)
}

/// Σ_λ mult(s, λ, twist) · dim_gl(λ, n).
pub fn character_side_coinvariants(s: usize, n: usize, twist: bool) -> Result<u64> {
    let table = coinvariant_table(s, twist)?;
    Ok(table.nonzero().map(|(l, m)| m * dim_gl(l, n) as u64).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn table(entries: &[(&str, u64)]) -> BTreeMap<Partition, u64> {
        entries.iter().map(|(l, m)| (p(l), *m)).collect()
    }

    fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
        // first b, then a
        b.iter().map(|&i| a[i]).collect()
    }

    // every symmetry of the s-gon, generated by a rotation and a reflection
    fn brute_group(s: usize) -> Vec<Vec<usize>> {
        let rot: Vec<usize> = (0..s).map(|i| (i + 1) % s).collect();
        let refl: Vec<usize> = (0..s).map(|i| (s - i) % s).collect();
        let mut elems = vec![(0..s).collect::<Vec<usize>>()];
        let mut k = 0;
        while k < elems.len() {
            for g in [&rot, &refl] {
                let h = compose(g, &elems[k]);
                if !elems.contains(&h) {
                    elems.push(h);
                }
            }
            k += 1;
        }
        elems
    }

    #[test]
    fn classes_match_enumeration() {
        for s in 3..=9 {
            let t = dihedral_classes(s).unwrap();
            assert_eq!(t.classes.iter().map(|c| c.size).sum::<usize>(), 2 * s);
            let group = brute_group(s);
            assert_eq!(group.len(), 2 * s);
            let mut by_type: HashMap<CycleType, usize> = HashMap::new();
            for g in &group {
                *by_type.entry(CycleType::of_permutation(g)).or_default() += 1;
            }
            let mut from_table: HashMap<CycleType, usize> = HashMap::new();
            for c in &t.classes {
                *from_table.entry(c.cycle_type.clone()).or_default() += c.size;
                assert_eq!(CycleType::of_permutation(&c.representative.permutation(s)), c.cycle_type);
                let reflection = matches!(c.representative, DihedralElement::Reflection(_));
                assert_eq!(c.twist_sign, if reflection { -1 } else { 1 });
            }
            assert_eq!(by_type, from_table);
        }
        assert!(dihedral_classes(2).is_err());
    }

    #[test]
    fn small_class_examples() {
        let t = dihedral_classes(5).unwrap();
        let refl = t.classes.last().unwrap();
        assert_eq!((refl.size, refl.cycle_type.to_string()), (5, "(2,2,1)".to_string()));
        let t = dihedral_classes(4).unwrap();
        assert_eq!(t.classes[2].cycle_type.to_string(), "(2,2)");
        let kinds: Vec<String> = t.classes[3..].iter().map(|c| c.cycle_type.to_string()).collect();
        assert_eq!(kinds, vec!["(2,2)", "(2,1,1)"]);
        let t = dihedral_classes(6).unwrap();
        let sizes: Vec<usize> = t.classes.iter().map(|c| c.size).collect();
        assert_eq!(sizes, vec![1, 2, 2, 1, 3, 3]);
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(coinvariant_multiplicity(4, &p("2,1,1"), true).unwrap(), 1);
        assert_eq!(coinvariant_multiplicity(5, &p("4,1"), false).unwrap(), 0);
        assert_eq!(coinvariant_multiplicity(5, &p("5"), false).unwrap(), 1);
        assert_eq!(coinvariant_multiplicity(6, &p("4,1,1"), true).unwrap(), 2);
        assert!(coinvariant_multiplicity(5, &p("4"), false).is_err());
    }

    #[test]
    fn decompositions_in_low_degree() {
        let nz = |s| -> BTreeMap<Partition, u64> {
            hs_decomposition(s).unwrap().nonzero().map(|(l, m)| (l.clone(), m)).collect()
        };
        assert_eq!(nz(4), table(&[("2,1,1", 1)]));
        assert_eq!(nz(5), table(&[("5", 1), ("3,2", 1), ("2,2,1", 1), ("1^5", 1)]));
        assert_eq!(
            nz(6),
            table(&[("3,3", 1), ("4,1,1", 2), ("3,2,1", 1), ("3,1,1,1", 1), ("2,2,1,1", 1)])
        );
    }

    #[test]
    fn integrality_up_to_twelve() {
        for s in 3..=12 {
            for twist in [false, true] {
                assert!(coinvariant_table(s, twist).is_ok());
            }
        }
    }

    #[test]
    fn fault_injection_breaks_the_table() {
        let t = dihedral_classes(4).unwrap();
        let faulty = coinvariant_table_with(&t, true, true).unwrap();
        assert_ne!(faulty, coinvariant_table(4, true).unwrap());
    }

    #[test]
    fn series_examples() {
        assert_eq!(series_probe(9, SeriesFamily::Sign).unwrap(), 1);
        assert_eq!(series_probe(8, SeriesFamily::Trivial).unwrap(), 0);
        assert_eq!(series_probe(7, SeriesFamily::Hook2).unwrap(), 0);
        assert_eq!(SeriesFamily::Hook2.partition(7), p("2,1^5"));
    }

    #[test]
    fn closed_forms() {
        let r = two_row_closed_form(7, 3, ClosedFormOrder::P).unwrap();
        assert_eq!(r.printed_value, scalar(1));
        assert_eq!(r.character_sum, 1);
        assert!(r.agrees);
        let r = two_row_closed_form(5, 2, ClosedFormOrder::P).unwrap();
        assert_eq!(r.partition, p("3,2"));
        assert_eq!(r.character_sum, 1);
        assert_eq!(r.printed_value, scalar(3));
        assert!(!r.agrees);
        let r = two_row_closed_form(3, 3, ClosedFormOrder::TwoP).unwrap();
        assert_eq!(r.character_sum, 1);
        assert_eq!(r.partition, p("3,3"));
        assert!(two_row_closed_form(7, 4, ClosedFormOrder::P).is_err());
        assert!(two_row_closed_form(9, 2, ClosedFormOrder::P).is_err());
        assert!(two_row_closed_form(5, 6, ClosedFormOrder::TwoP).is_err());
    }

    #[test]
    fn dictionary_relabels() {
        let t = hs_decomposition(4).unwrap();
        let d = gl_sp_dictionary(&t);
        assert_eq!(d.labeling, Labeling::Symplectic);
        assert_eq!(d.entries, t.entries);
        let empty = MultiplicityTable { s: 0, twist: false, labeling: Labeling::Symmetric, entries: BTreeMap::new() };
        assert!(gl_sp_dictionary(&empty).entries.is_empty());
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_coinvariants(4, 1, true).unwrap(), 0);
        assert_eq!(brute_force_coinvariants(4, 1, false).unwrap(), 1);
        // s=3, n=2 untwisted: words up to rotation and reversal
        assert_eq!(brute_force_coinvariants(3, 2, false).unwrap(), 4);
        assert_eq!(brute_force_coinvariants(5, 2, false).unwrap(), character_side_coinvariants(5, 2, false).unwrap());
        assert!(brute_force_coinvariants(24, 2, false).is_err());
    }

    #[test]
    fn brute_force_matches_characters() {
        for s in 3..=6 {
            for n in 1..=3 {
                for twist in [false, true] {
                    assert_eq!(
                        brute_force_coinvariants(s, n, twist).unwrap(),
                        character_side_coinvariants(s, n, twist).unwrap(),
                        "s={s} n={n} twist={twist}"
                    );
                }
            }
        }
    }
}
