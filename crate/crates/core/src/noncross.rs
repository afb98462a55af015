//! Non-crossing partitions of `{1, …, n}` and their permutation model: the
//! interval `[id, (1 … n)]` of the absolute order on `S_n`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{budget, Error, Result};
use crate::numeric::{binomial, factorial};
use crate::perm::{compose, leq_abs, Permutation};

/// Largest `n` accepted by [`enumerate_nc`].
pub const NC_MAX_N: usize = 14;

/// A non-crossing partition. Points are 0-based internally, blocks are
/// sorted and ordered by their least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NCPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

fn crossing(blocks: &[Vec<usize>], n: usize) -> bool {
    let mut owner = vec![usize::MAX; n];
    for (b, block) in blocks.iter().enumerate() {
        for &x in block {
            owner[x] = b;
        }
    }
    // i < j < k < l with i ~ k and j ~ l in another block.
    for i in 0..n {
        for j in i + 1..n {
            if owner[j] == owner[i] {
                continue;
            }
            for k in j + 1..n {
                if owner[k] != owner[i] {
                    continue;
                }
                if (k + 1..n).any(|l| owner[l] == owner[j]) {
                    return true;
                }
            }
        }
    }
    false
}

impl NCPartition {
    /// Validates a 0-based block list.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for &x in blocks.iter().flatten() {
            if x >= n || seen[x] {
                return Err(Error::InvalidPartition(format!(
                    "{blocks:?} is not a set partition of {n} points"
                )));
            }
            seen[x] = true;
        }
        if seen.iter().any(|s| !s) || blocks.iter().any(Vec::is_empty) {
            return Err(Error::InvalidPartition(format!(
                "{blocks:?} does not cover {n} points"
            )));
        }
        if crossing(&blocks, n) {
            return Err(Error::InvalidPartition(format!("{blocks:?} is crossing")));
        }
        Ok(Self::canonical(n, blocks))
    }

    fn canonical(n: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable();
        NCPartition { n, blocks }
    }

    /// The partition into singletons, `0_n`.
    pub fn bottom(n: usize) -> Self {
        NCPartition {
            n,
            blocks: (0..n).map(|i| vec![i]).collect(),
        }
    }

    /// The one-block partition, `1_n`.
    pub fn top(n: usize) -> Self {
        NCPartition {
            n,
            blocks: if n == 0 {
                vec![]
            } else {
                vec![(0..n).collect()]
            },
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 0-based blocks.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// `n - #blocks`, which is `|σ_P|`.
    pub fn rank(&self) -> usize {
        self.n - self.blocks.len()
    }

    /// `s[i]` counts blocks of size `i + 1`.
    pub fn type_vector(&self) -> Vec<usize> {
        let mut s = vec![0; self.n];
        for b in &self.blocks {
            s[b.len() - 1] += 1;
        }
        s
    }

    /// Each block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &NCPartition) -> bool {
        let mut owner = vec![0; other.n];
        for (i, b) in other.blocks.iter().enumerate() {
            for &x in b {
                owner[x] = i;
            }
        }
        self.n == other.n
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|&x| owner[x] == owner[b[0]]))
    }

    /// `σ_P`: each block becomes the cycle through its elements in
    /// increasing order.
    pub fn to_perm(&self) -> Permutation {
        let cycles: Vec<Vec<usize>> = self.blocks.clone();
        Permutation::from_cycles(self.n, &cycles).expect("blocks partition the points")
    }

    /// Inverse of [`to_perm`](Self::to_perm); `σ` must lie below the long
    /// cycle `(1 … n)`.
    pub fn from_perm(s: &Permutation) -> Result<Self> {
        let n = s.degree();
        if !leq_abs(s, &Permutation::long_cycle(n))? {
            return Err(Error::NotBelowCycle(s.to_string()));
        }
        Ok(Self::canonical(n, s.cycles()))
    }
}

/// All of `NC(n)`, by splitting off the block of the first point.
pub fn enumerate_nc(n: usize) -> Result<Vec<NCPartition>> {
    budget("non-crossing enumeration size", n as u128, NC_MAX_N as u128)?;
    let points: Vec<usize> = (0..n).collect();
    Ok(nc_blocks(&points)
        .into_iter()
        .map(|blocks| NCPartition::canonical(n, blocks))
        .collect())
}

fn nc_blocks(points: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = points.split_first() else {
        return vec![vec![]];
    };
    let mut out = Vec::new();
    // `first` alone.
    for mut p in nc_blocks(rest) {
        p.push(vec![first]);
        out.push(p);
    }
    // `first` joins the block of rest[j]; points strictly between are on
    // their own.
    for j in 0..rest.len() {
        let inner = nc_blocks(&rest[..j]);
        let outer = nc_blocks(&rest[j..]);
        for o in &outer {
            for i in &inner {
                let mut p = o.clone();
                for b in &mut p {
                    if b.contains(&rest[j]) {
                        b.push(first);
                    }
                }
                p.extend(i.iter().cloned());
                out.push(p);
            }
        }
    }
    out
}

/// Kreweras complement, `K(σ) = σ⁻¹ (1 … n)`.
pub fn kreweras(p: &NCPartition) -> NCPartition {
    let s = p.to_perm();
    let k = compose(&s.inverse(), &Permutation::long_cycle(p.n)).expect("same degree");
    NCPartition::from_perm(&k).expect("Kreweras complement stays below the cycle")
}

/// Kreweras complement as the coarsest `Q` for which interleaving `P` on
/// `1, 2, …` with `Q` on `1', 2', …` stays non-crossing. Exhaustive, for
/// testing.
pub fn kreweras_by_search(p: &NCPartition) -> Result<NCPartition> {
    let n = p.n;
    let mut best: Option<NCPartition> = None;
    for q in enumerate_nc(n)? {
        let mut blocks: Vec<Vec<usize>> = p
            .blocks
            .iter()
            .map(|b| b.iter().map(|&x| 2 * x).collect())
            .collect();
        blocks.extend(
            q.blocks
                .iter()
                .map(|b| b.iter().map(|&x| 2 * x + 1).collect()),
        );
        if crossing(&blocks, 2 * n) {
            continue;
        }
        if best
            .as_ref()
            .map_or(true, |b| q.blocks.len() < b.blocks.len())
        {
            best = Some(q);
        }
    }
    Ok(best.expect("the bottom element is always admissible"))
}

/// Number of partitions in `NC(n)` whose type is `s` (`s[i]` blocks of
/// size `i + 1`): `n! / ((n - b + 1)! Π s_i!)` with `b = Σ s_i`.
pub fn count_by_type(n: usize, s: &[usize]) -> Result<BigUint> {
    let total: usize = s.iter().enumerate().map(|(i, &c)| (i + 1) * c).sum();
    if total != n {
        return Err(Error::OutOfRange(format!(
            "type {s:?} has weight {total}, not {n}"
        )));
    }
    let b: usize = s.iter().sum();
    if n == 0 {
        return Ok(BigUint::one());
    }
    let denom = s.iter().fold(factorial((n - b + 1) as u64), |acc, &c| {
        acc * factorial(c as u64)
    });
    Ok(factorial(n as u64) / denom)
}

/// Saturated chains from `0_n` to `P` in `NC(n)`: with `m_j` the block
/// sizes, `(Σ(m_j - 1))! Π m_j^{m_j - 2} / (m_j - 1)!`.
pub fn count_increasing_paths(p: &NCPartition) -> BigUint {
    let mut num = factorial(p.rank() as u64);
    let mut den = BigUint::one();
    for b in &p.blocks {
        let m = b.len() as u32;
        if m >= 2 {
            num *= BigUint::from(m).pow(m - 2);
        }
        den *= factorial(u64::from(m) - 1);
    }
    num / den
}

/// `S((1 … n), k, 0) = C(n, k+1) n^{k-1}`, zero for `k ≥ n`.
pub fn s_cycle_zero_defect(n: usize, k: usize) -> BigUint {
    if k >= n {
        return BigUint::zero();
    }
    if k == 0 {
        return BigUint::one();
    }
    binomial(n as u64, k as u64 + 1) * BigUint::from(n).pow(k as u32 - 1)
}

/// Saturated chains of length `k` descending from `1_n`, via the Kreweras
/// anti-isomorphism `[Q, 1_n] ≅ [0_n, K(Q)]`.
pub fn count_decreasing_paths(n: usize, k: usize) -> Result<BigUint> {
    if k >= n.max(1) {
        return Ok(BigUint::zero());
    }
    Ok(enumerate_nc(n)?
        .iter()
        .filter(|q| q.rank() + k == n - 1)
        .map(|q| count_increasing_paths(&kreweras(q)))
        .sum())
}

/// Block notation, 1-based: `{1,3}{2}`.
impl fmt::Display for NCPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            write!(f, "{{")?;
            for (i, x) in b.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

/// Parses block notation; `n` is the largest point mentioned.
impl FromStr for NCPartition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('{')
                .and_then(|r| r.split_once('}'))
                .ok_or_else(|| Error::Parse(format!("expected a {{…}} block in {s:?}")))?;
            let block = body
                .0
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| match t.parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(Error::Parse(format!("bad point {t:?} in {s:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
            rest = body.1.trim_start();
        }
        let n = blocks.iter().flatten().map(|&x| x + 1).max().unwrap_or(0);
        NCPartition::new(n, blocks)
    }
}

/// Serialized as its block notation.
impl Serialize for NCPartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class_walk::count_paths_between;
    use crate::perm::leq_abs;

    fn catalan(n: usize) -> BigUint {
        binomial(2 * n as u64, n as u64) / (n + 1)
    }

    fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in set_partitions(n - 1) {
            for i in 0..p.len() {
                let mut q = p.clone();
                q[i].push(n - 1);
                out.push(q);
            }
            let mut q = p.clone();
            q.push(vec![n - 1]);
            out.push(q);
        }
        out
    }

    #[test]
    fn enumeration_matches_crossing_filter() {
        for n in 0..=7 {
            let mut direct: Vec<NCPartition> = set_partitions(n)
                .into_iter()
                .filter(|b| !crossing(b, n))
                .map(|b| NCPartition::canonical(n, b))
                .collect();
            let mut nc = enumerate_nc(n).unwrap();
            direct.sort();
            nc.sort();
            assert_eq!(nc, direct);
        }
        assert_eq!(enumerate_nc(3).unwrap().len(), 5);
        assert_eq!(enumerate_nc(4).unwrap().len(), 14);
        assert_eq!(enumerate_nc(1).unwrap().len(), 1);
        for n in 0..=10 {
            assert_eq!(BigUint::from(enumerate_nc(n).unwrap().len()), catalan(n));
        }
        assert!(enumerate_nc(15).is_err());
    }

    #[test]
    fn permutation_bijection() {
        assert!(NCPartition::bottom(4).to_perm().is_identity());
        assert_eq!(NCPartition::top(5).to_perm(), Permutation::long_cycle(5));
        let p: NCPartition = "{1,2}{3}".parse().unwrap();
        assert_eq!(p.to_perm().to_string(), "(1 2)(3)");
        for n in 1..=6 {
            let c = Permutation::long_cycle(n);
            let below: Vec<Permutation> = Permutation::all(n)
                .into_iter()
                .filter(|s| leq_abs(s, &c).unwrap())
                .collect();
            let nc = enumerate_nc(n).unwrap();
            assert_eq!(below.len(), nc.len());
            for p in &nc {
                assert_eq!(&NCPartition::from_perm(&p.to_perm()).unwrap(), p);
                for q in &nc {
                    assert_eq!(p.refines(q), leq_abs(&p.to_perm(), &q.to_perm()).unwrap());
                }
            }
        }
        let bad = Permutation::parse_cycles("(1 3 2)", Some(3)).unwrap();
        assert!(matches!(
            NCPartition::from_perm(&bad),
            Err(Error::NotBelowCycle(_))
        ));
    }

    #[test]
    fn kreweras_worked_example() {
        let p: NCPartition = "{1,3,12}{2}{4,8,9}{5,6,7}{10,11}".parse().unwrap();
        let k = kreweras(&p);
        assert_eq!(k.to_string(), "{1,2}{3,9,11}{4,7}{5}{6}{8}{10}{12}");
        assert_eq!(kreweras_by_search(&p).unwrap(), k);
    }

    #[test]
    fn kreweras_properties() {
        for n in 1..=7 {
            let c = Permutation::long_cycle(n);
            let nc = enumerate_nc(n).unwrap();
            assert_eq!(kreweras(&NCPartition::bottom(n)), NCPartition::top(n));
            for p in &nc {
                let k = kreweras(p);
                assert_eq!(k.rank(), n - 1 - p.rank());
                let kk = kreweras(&k).to_perm();
                let conj = compose(&compose(&c.inverse(), &p.to_perm()).unwrap(), &c).unwrap();
                assert_eq!(kk, conj);
                if n <= 6 {
                    assert_eq!(kreweras_by_search(p).unwrap(), k);
                }
                for q in &nc {
                    if p.refines(q) {
                        assert!(kreweras(q).refines(&k));
                    }
                }
            }
        }
    }

    #[test]
    fn type_counts() {
        assert_eq!(
            count_by_type(4, &[2, 1, 0, 0]).unwrap(),
            BigUint::from(6u32)
        );
        assert_eq!(count_by_type(3, &[3, 0, 0]).unwrap(), BigUint::one());
        assert_eq!(count_by_type(3, &[0, 0, 1]).unwrap(), BigUint::one());
        assert!(count_by_type(3, &[1, 0, 0]).is_err());
        for n in 1..=8 {
            let nc = enumerate_nc(n).unwrap();
            let mut by_type = std::collections::HashMap::new();
            for p in &nc {
                *by_type.entry(p.type_vector()).or_insert(0u64) += 1;
            }
            for (s, c) in by_type {
                assert_eq!(count_by_type(n, &s).unwrap(), BigUint::from(c));
            }
        }
    }

    #[test]
    fn increasing_paths() {
        assert_eq!(
            count_increasing_paths(&NCPartition::bottom(5)),
            BigUint::one()
        );
        assert_eq!(
            count_increasing_paths(&NCPartition::top(3)),
            BigUint::from(3u32)
        );
        let pair: NCPartition = "{1}{2,4}{3}".parse().unwrap();
        assert_eq!(count_increasing_paths(&pair), BigUint::one());
        for n in 1..=6 {
            let id = Permutation::identity(n);
            for p in enumerate_nc(n).unwrap() {
                let s = p.to_perm();
                assert_eq!(
                    count_increasing_paths(&p),
                    count_paths_between(&id, &s, p.rank()).unwrap()
                );
            }
        }
    }

    #[test]
    fn zero_defect_cycle_counts() {
        assert_eq!(s_cycle_zero_defect(4, 3), BigUint::from(16u32));
        assert_eq!(s_cycle_zero_defect(5, 2), BigUint::from(50u32));
        assert_eq!(s_cycle_zero_defect(4, 4), BigUint::zero());
        for n in 1..=8 {
            let nc = enumerate_nc(n).unwrap();
            for k in 0..=n {
                let by_rank: BigUint = nc
                    .iter()
                    .filter(|p| p.rank() == k)
                    .map(count_increasing_paths)
                    .sum();
                assert_eq!(by_rank, s_cycle_zero_defect(n, k));
                assert_eq!(
                    count_decreasing_paths(n, k).unwrap(),
                    s_cycle_zero_defect(n, k)
                );
            }
        }
    }

    #[test]
    fn parse_round_trip() {
        let p: NCPartition = "{1, 4}{2,3}".parse().unwrap();
        assert_eq!(p.to_string(), "{1,4}{2,3}");
        assert!("{1,3}{2,4}".parse::<NCPartition>().is_err());
        assert!("{1}{3}".parse::<NCPartition>().is_err());
        assert!("{1,2".parse::<NCPartition>().is_err());
    }
}
