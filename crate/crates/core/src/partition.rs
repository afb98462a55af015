//! Integer partitions, used both as cycle types of permutations and as
//! labels of irreducible characters.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::factorial;
use crate::perm::Permutation;

/// A weakly decreasing sequence of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

/// Conjugacy classes of the symmetric group are labelled by partitions.
pub type CycleType = Partition;

impl Partition {
    /// Builds a partition from parts in any order. Zero parts are rejected.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} has a zero part"
            )));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    /// The single-part partition `[n]`.
    pub fn row(n: usize) -> Self {
        Partition { parts: vec![n] }
    }

    /// The partition `[1, ..., 1]` of `n`.
    pub fn column(n: usize) -> Self {
        Partition { parts: vec![1; n] }
    }

    /// The hook `[n - r, 1^r]`.
    pub fn hook(n: usize, r: usize) -> Result<Self> {
        if n == 0 || r >= n {
            return Err(Error::OutOfRange(format!("hook with n={n}, r={r}")));
        }
        let mut parts = vec![n - r];
        parts.extend(std::iter::repeat(1).take(r));
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Sum of the parts.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// All partitions of `n`, in lexicographically decreasing order
    /// (`[n]` first, `[1^n]` last). This order indexes every class table.
    pub fn all(n: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            for p in (1..=rest.min(max)).rev() {
                cur.push(p);
                rec(rest - p, p, cur, out);
                cur.pop();
            }
        }
        rec(n, n, &mut cur, &mut out);
        out
    }

    /// `m[i]` is the number of parts equal to `i + 1`, for `i < n`.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.size()];
        for &p in &self.parts {
            m[p - 1] += 1;
        }
        m
    }

    /// Size of the centralizer of a permutation of this cycle type.
    pub fn z(&self) -> BigUint {
        let mut z = BigUint::one();
        for (i, &m) in self.multiplicities().iter().enumerate() {
            z *= BigUint::from(i + 1).pow(m as u32) * factorial(m as u64);
        }
        z
    }

    /// Number of permutations with this cycle type.
    pub fn class_size(&self) -> BigUint {
        factorial(self.size() as u64) / self.z()
    }

    /// Contents `j - i` of the boxes `(i, j)` of the Young diagram, row by row.
    pub fn contents(&self) -> Vec<i64> {
        let mut c = Vec::with_capacity(self.size());
        for (i, &row) in self.parts.iter().enumerate() {
            for j in 0..row {
                c.push(j as i64 - i as i64);
            }
        }
        c
    }

    /// The transposed diagram.
    pub fn conjugate(&self) -> Partition {
        let width = self.parts.first().copied().unwrap_or(0);
        let parts = (0..width)
            .map(|j| self.parts.iter().filter(|&&p| p > j).count())
            .collect();
        Partition { parts }
    }

    /// Canonical permutation of this cycle type: cycles in descending length
    /// on consecutive points, e.g. `[3,1]` gives `(1 2 3)(4)`.
    pub fn representative(&self) -> Permutation {
        let n = self.size();
        let mut images = vec![0; n];
        let mut start = 0;
        for &p in &self.parts {
            for i in 0..p {
                images[start + i] = start + (i + 1) % p;
            }
            start += p;
        }
        Permutation::from_images(images).expect("cycle layout is a bijection")
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
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

/// Parses `"3,1"`, `"[3,1]"` or `"3 1"`.
impl FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        let parts = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad partition part {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_partition_numbers() {
        let p: Vec<usize> = (0..=10).map(|n| Partition::all(n).len()).collect();
        assert_eq!(p, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
    }

    #[test]
    fn order_is_reverse_lexicographic() {
        let all = Partition::all(4);
        let shown: Vec<String> = all.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, ["[4]", "[3,1]", "[2,2]", "[2,1,1]", "[1,1,1,1]"]);
    }

    #[test]
    fn class_sizes_sum_to_factorial() {
        for n in 1..=8 {
            let total: BigUint = Partition::all(n).iter().map(|p| p.class_size()).sum();
            assert_eq!(total, factorial(n as u64));
        }
    }

    #[test]
    fn representative_has_its_type() {
        for n in 1..=7 {
            for p in Partition::all(n) {
                assert_eq!(p.representative().cycle_type(), p);
            }
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        let p: Partition = "1,3".parse().unwrap();
        assert_eq!(p.parts(), &[3, 1]);
        assert_eq!(p.to_string().parse::<Partition>().unwrap(), p);
        assert!("2,0".parse::<Partition>().is_err());
        assert!("x".parse::<Partition>().is_err());
    }

    #[test]
    fn conjugate_is_involutive() {
        for p in Partition::all(7) {
            assert_eq!(p.conjugate().conjugate(), p);
            assert_eq!(p.conjugate().size(), 7);
        }
    }
}
