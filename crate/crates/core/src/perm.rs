//! Permutations of `{1, ..., n}`, cycle structure, the transposition length
//! `|σ| = n - ℓ(σ)` and the absolute order.
//!
//! Points are stored 0-based; the cycle notation parser and printer use the
//! usual 1-based labels. Products follow the "right factor acts first"
//! convention, so `compose(a, b)(i) = a(b(i))` and a walk from `σ` through
//! transpositions `τ₁, …, τ_k` ends at `σ τ₁ ⋯ τ_k`.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{CycleType, Partition};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// From 0-based images: `images[i]` is the image of point `i`.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a bijection of 0..{n}"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// From 1-based one-line notation, e.g. `[2, 3, 1]` for `(1 2 3)`.
    pub fn from_one_line(one_line: &[usize]) -> Result<Self> {
        if one_line.contains(&0) {
            return Err(Error::InvalidPermutation(format!(
                "{one_line:?} uses 0 in 1-based notation"
            )));
        }
        Self::from_images(one_line.iter().map(|&x| x - 1).collect())
    }

    /// From disjoint 0-based cycles in degree `n`.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for c in cycles {
            for (i, &a) in c.iter().enumerate() {
                if a >= n || used[a] {
                    return Err(Error::InvalidPermutation(format!(
                        "cycles {cycles:?} are not disjoint within 0..{n}"
                    )));
                }
                used[a] = true;
                images[a] = c[(i + 1) % c.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// The transposition exchanging 0-based points `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        assert!(
            a != b && a < n && b < n,
            "invalid transposition ({a} {b}) in degree {n}"
        );
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Permutation { images }
    }

    /// The long cycle `(1 2 … n)`.
    pub fn long_cycle(n: usize) -> Self {
        Permutation {
            images: (0..n).map(|i| (i + 1) % n.max(1)).collect(),
        }
    }

    /// Degree `n`.
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// 0-based images.
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Image of the 0-based point `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { images: inv }
    }

    /// Disjoint cycles (fixed points included), each starting at its
    /// smallest point, ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut c = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                c.push(x);
                x = self.images[x];
            }
            out.push(c);
        }
        out
    }

    /// Number of cycles `ℓ(σ)`, fixed points included.
    pub fn cycle_count(&self) -> usize {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x];
            }
        }
        count
    }

    pub fn cycle_type(&self) -> CycleType {
        Partition::new(self.cycles().iter().map(Vec::len).collect())
            .expect("cycle lengths are positive")
    }

    /// `|σ| = n - ℓ(σ)`, the distance to the identity in the Cayley graph
    /// generated by transpositions.
    pub fn norm(&self) -> usize {
        self.degree() - self.cycle_count()
    }

    /// Right multiplication by the transposition of 0-based points `a`, `b`,
    /// done in place: the result is `σ ∘ (a b)`.
    pub fn mul_transposition_in_place(&mut self, a: usize, b: usize) {
        self.images.swap(a, b);
    }

    /// All permutations of degree `n` in lexicographic order of images.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation {
                images: cur.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }

    /// Lexicographic rank among `all(n)`.
    pub fn rank(&self) -> usize {
        let n = self.images.len();
        let mut rank = 0;
        let mut fact = vec![1usize; n + 1];
        for i in 1..=n {
            fact[i] = fact[i - 1] * i;
        }
        for i in 0..n {
            let smaller = self.images[i + 1..]
                .iter()
                .filter(|&&x| x < self.images[i])
                .count();
            rank += smaller * fact[n - 1 - i];
        }
        rank
    }

    /// Parses cycle notation such as `"(1 2 3)(4)"` or `"(1,2)(3,4)"`.
    /// The degree is `n` when given, otherwise the largest label used.
    /// `"id"` and `"()"` denote the identity and need an explicit degree
    /// unless other cycles fix it.
    pub fn parse_cycles(s: &str, n: Option<usize>) -> Result<Self> {
        let text = s.trim();
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        if text != "id" {
            let mut rest = text;
            while !rest.is_empty() {
                let open = rest
                    .strip_prefix('(')
                    .ok_or_else(|| Error::Parse(format!("expected '(' in {s:?}")))?;
                let close = open
                    .find(')')
                    .ok_or_else(|| Error::Parse(format!("unclosed cycle in {s:?}")))?;
                let body = &open[..close];
                let cycle = body
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|t| !t.is_empty())
                    .map(|t| match t.parse::<usize>() {
                        Ok(v) if v >= 1 => Ok(v - 1),
                        _ => Err(Error::Parse(format!("bad point {t:?} in {s:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                if !cycle.is_empty() {
                    cycles.push(cycle);
                }
                rest = open[close + 1..].trim_start();
            }
        }
        let max = cycles.iter().flatten().map(|&x| x + 1).max().unwrap_or(0);
        let degree = match n {
            Some(n) if n < max => {
                return Err(Error::Parse(format!(
                    "{s:?} uses point {max} beyond degree {n}"
                )))
            }
            Some(n) => n,
            None => max,
        };
        Self::from_cycles(degree, &cycles)
    }
}

/// `compose(a, b)` applies `b` first, then `a`.
pub fn compose(a: &Permutation, b: &Permutation) -> Result<Permutation> {
    if a.degree() != b.degree() {
        return Err(Error::DegreeMismatch {
            left: a.degree(),
            right: b.degree(),
        });
    }
    Ok(Permutation {
        images: b.images.iter().map(|&x| a.images[x]).collect(),
    })
}

/// `|σ|`; see [`Permutation::norm`].
pub fn norm(s: &Permutation) -> usize {
    s.norm()
}

/// The absolute order: `a ≼ b` iff `|b| = |a| + |a⁻¹ b|`, i.e. `a` lies on a
/// geodesic from the identity to `b`.
pub fn leq_abs(a: &Permutation, b: &Permutation) -> Result<bool> {
    let between = compose(&a.inverse(), b)?;
    Ok(b.norm() == a.norm() + between.norm())
}

impl Mul for &Permutation {
    type Output = Permutation;
    /// Same as [`compose`]; panics on a degree mismatch.
    fn mul(self, rhs: &Permutation) -> Permutation {
        compose(self, rhs).expect("degree mismatch in permutation product")
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::from_images(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}

/// Full cycle notation with 1-based labels, fixed points included:
/// `(1 2 3)(4)`. The empty permutation prints as `()`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.images.is_empty() {
            return write!(f, "()");
        }
        for c in self.cycles() {
            write!(f, "(")?;
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Permutation::parse_cycles(s, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(s, Some(n)).unwrap()
    }

    #[test]
    fn composition_convention() {
        assert!(compose(&p("(1 2)", 2), &p("(1 2)", 2))
            .unwrap()
            .is_identity());
        assert_eq!(
            compose(&p("(1 2)", 3), &p("(1 2 3)", 3)).unwrap(),
            p("(2 3)", 3)
        );
        let s = p("(1 3)(2 4)", 4);
        assert_eq!(compose(&Permutation::identity(4), &s).unwrap(), s);
        assert!(matches!(
            compose(&p("(1 2)", 2), &p("(1 2)", 3)),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn cycle_types_and_norms() {
        assert_eq!(p("(1 2 3)(4)", 4).cycle_type().parts(), &[3, 1]);
        assert_eq!(
            Permutation::identity(5).cycle_type().parts(),
            &[1, 1, 1, 1, 1]
        );
        assert_eq!(p("(1 2)(3 4)", 4).cycle_type().parts(), &[2, 2]);
        assert_eq!(Permutation::identity(4).norm(), 0);
        assert_eq!(p("(1 2)(3 4)", 4).norm(), 2);
        for n in 1..8 {
            assert_eq!(Permutation::long_cycle(n).norm(), n - 1);
        }
    }

    #[test]
    fn absolute_order_examples() {
        let id = Permutation::identity(4);
        assert!(leq_abs(&id, &p("(1 3 4)", 4)).unwrap());
        assert!(leq_abs(&p("(1 2)", 3), &p("(1 2 3)", 3)).unwrap());
        assert!(!leq_abs(&p("(1 2)", 4), &p("(3 4)", 4)).unwrap());
    }

    #[test]
    fn parse_print_round_trip() {
        let s = p("(1 2 3)(4)", 4);
        assert_eq!(s.to_string(), "(1 2 3)(4)");
        assert_eq!(s.to_string().parse::<Permutation>().unwrap(), s);
        assert_eq!(p("(1,2)(3,4)", 4), p("(1 2)(3 4)", 4));
        assert_eq!(p("id", 3), Permutation::identity(3));
        assert!(Permutation::parse_cycles("(1 2", None).is_err());
        assert!(Permutation::parse_cycles("(1 2)(2 3)", None).is_err());
        assert!(Permutation::parse_cycles("(1 5)", Some(3)).is_err());
        assert!(Permutation::parse_cycles("(0 1)", None).is_err());
    }

    #[test]
    fn enumeration_and_rank() {
        let all = Permutation::all(4);
        assert_eq!(all.len(), 24);
        for (i, s) in all.iter().enumerate() {
            assert_eq!(s.rank(), i);
        }
    }

    #[test]
    fn one_line_constructor() {
        let s = Permutation::from_one_line(&[2, 3, 1]).unwrap();
        assert_eq!(s, p("(1 2 3)", 3));
        assert!(Permutation::from_one_line(&[1, 1]).is_err());
    }
}
