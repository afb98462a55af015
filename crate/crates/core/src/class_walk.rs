//! Counting transposition walks in the Cayley graph of `S_n`.
//!
//! A walk of length `k` from `σ` multiplies `σ` on the right by `k`
//! transpositions. Its defect `d` is the number of steps that merge two
//! cycles; the terminal cycle count is then `ℓ(σ) + k - 2d`, so the defect is
//! read off from the terminal conjugacy class. Walk counts only depend on
//! classes, which lets the dynamic programme run over partitions of `n`
//! rather than over the `n!` group elements.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{budget, Error, Result};
use crate::numeric::{factorial, rational_from_biguint};
use crate::partition::{CycleType, Partition};
use crate::perm::{compose, Permutation};

/// Class-level transition counts: `count(λ, μ)` is the number of
/// transpositions `τ` with `rep(λ)·τ` in class `μ`.
#[derive(Clone, Debug, Serialize)]
pub struct ClassTransitionMatrix {
    pub n: usize,
    /// Partitions of `n` in the fixed reverse-lexicographic order.
    pub index: Vec<Partition>,
    /// Sparse rows: `(target index, count)`, targets ascending.
    rows: Vec<Vec<(usize, u64)>>,
    #[serde(skip)]
    lookup: HashMap<Partition, usize>,
}

impl ClassTransitionMatrix {
    /// Position of a partition in [`Self::index`].
    pub fn position(&self, p: &Partition) -> Option<usize> {
        self.lookup.get(p).copied()
    }

    /// `counts[λ][μ]` by partition.
    pub fn count(&self, from: &Partition, to: &Partition) -> u64 {
        let (Some(i), Some(j)) = (self.position(from), self.position(to)) else {
            return 0;
        };
        self.rows[i]
            .iter()
            .find(|(t, _)| *t == j)
            .map_or(0, |&(_, c)| c)
    }

    /// Nonzero entries of the row of class index `i`.
    pub fn row(&self, i: usize) -> &[(usize, u64)] {
        &self.rows[i]
    }

    /// Dense square matrix in index order.
    pub fn counts(&self) -> Vec<Vec<u64>> {
        let p = self.index.len();
        let mut dense = vec![vec![0; p]; p];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, c) in row {
                dense[i][j] = c;
            }
        }
        dense
    }
}

/// Builds the class transition matrix from the split and merge rules: a
/// cycle of length `m` splits into lengths `s` and `m - s` in `m` ways
/// (`m / 2` ways when `m = 2s`), and two cycles of lengths `m`, `m'` merge
/// in `m m'` ways.
pub fn transition_counts(n: usize) -> ClassTransitionMatrix {
    let index = Partition::all(n);
    let lookup: HashMap<Partition, usize> = index
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, p)| (p, i))
        .collect();
    let rows = index
        .iter()
        .map(|lambda| {
            let mut acc: HashMap<usize, u64> = HashMap::new();
            let parts = lambda.parts();
            let mut distinct: Vec<usize> = parts.to_vec();
            distinct.dedup();
            let mult = |m: usize| parts.iter().filter(|&&p| p == m).count() as u64;
            let replace = |remove: &[usize], add: &[usize]| {
                let mut v = parts.to_vec();
                for r in remove {
                    let pos = v.iter().position(|x| x == r).expect("part present");
                    v.remove(pos);
                }
                v.extend_from_slice(add);
                Partition::new(v).expect("positive parts")
            };
            for &m in &distinct {
                let c = mult(m);
                for s in 1..=m / 2 {
                    let ways = if 2 * s == m { m as u64 / 2 } else { m as u64 };
                    let target = replace(&[m], &[s, m - s]);
                    *acc.entry(lookup[&target]).or_default() += c * ways;
                }
            }
            for (a, &m) in distinct.iter().enumerate() {
                let cm = mult(m);
                if cm >= 2 {
                    let target = replace(&[m, m], &[2 * m]);
                    *acc.entry(lookup[&target]).or_default() += cm * (cm - 1) / 2 * (m * m) as u64;
                }
                for &m2 in &distinct[a + 1..] {
                    let target = replace(&[m, m2], &[m + m2]);
                    *acc.entry(lookup[&target]).or_default() += cm * mult(m2) * (m * m2) as u64;
                }
            }
            let mut row: Vec<(usize, u64)> = acc.into_iter().collect();
            row.sort_unstable();
            row
        })
        .collect();
    ClassTransitionMatrix {
        n,
        index,
        rows,
        lookup,
    }
}

/// Walk counts from a fixed representative of a class, aggregated by the
/// class of the endpoint.
#[derive(Clone, Debug)]
pub struct ClassWalk {
    matrix: ClassTransitionMatrix,
}

impl ClassWalk {
    pub fn new(n: usize) -> Self {
        ClassWalk {
            matrix: transition_counts(n),
        }
    }

    pub fn matrix(&self) -> &ClassTransitionMatrix {
        &self.matrix
    }

    /// `dist[k][μ]` = number of walks of length `k` from `rep(start)` ending
    /// in class `μ`, for `k = 0..=k_max`.
    pub fn distributions(&self, start: &Partition, k_max: usize) -> Result<Vec<Vec<BigUint>>> {
        let i0 = self.matrix.position(start).ok_or_else(|| {
            Error::InvalidPartition(format!("{start} is not a partition of {}", self.matrix.n))
        })?;
        let p = self.matrix.index.len();
        let mut cur = vec![BigUint::zero(); p];
        cur[i0] = BigUint::one();
        let mut out = Vec::with_capacity(k_max + 1);
        for _ in 0..k_max {
            let mut next = vec![BigUint::zero(); p];
            for (i, v) in cur.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                for &(j, c) in self.matrix.row(i) {
                    next[j] += v * c;
                }
            }
            out.push(std::mem::replace(&mut cur, next));
        }
        out.push(cur);
        Ok(out)
    }

    /// The table `S[k][d]` for `k ≤ k_max`.
    pub fn path_count_table(&self, start: &Partition, k_max: usize) -> Result<PathCountTable> {
        let ell = start.len();
        let dists = self.distributions(start, k_max)?;
        let table = dists
            .iter()
            .enumerate()
            .map(|(k, dist)| {
                let mut row = vec![BigUint::zero(); k + 1];
                for (j, v) in dist.iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    let end = self.matrix.index[j].len();
                    // end = ell + k - 2d
                    let d = (ell + k - end) / 2;
                    row[d] += v;
                }
                row
            })
            .collect();
        Ok(PathCountTable {
            base: start.clone(),
            k_max,
            table,
        })
    }
}

/// `S[k][d]`, the number of walks of length `k` and defect `d` from a fixed
/// permutation of class `base`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathCountTable {
    pub base: Partition,
    pub k_max: usize,
    /// `table[k][d]` for `0 ≤ d ≤ k`.
    pub table: Vec<Vec<BigUint>>,
}

impl PathCountTable {
    /// `S(base, k, d)`, zero outside the stored range.
    pub fn get(&self, k: usize, d: usize) -> BigUint {
        self.table
            .get(k)
            .and_then(|row| row.get(d))
            .cloned()
            .unwrap_or_default()
    }

    /// Rows `(k, d, S)` with `S > 0`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, &BigUint)> {
        self.table.iter().enumerate().flat_map(|(k, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(move |(d, v)| (k, d, v))
        })
    }

    /// CSV with header `k,d,S`, nonzero entries only.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,d,S\n");
        for (k, d, v) in self.nonzero() {
            s.push_str(&format!("{k},{d},{v}\n"));
        }
        s
    }
}

/// Window of walk lengths with nonzero count: `2d - (ℓ - 1) ≤ k ≤ 2d + (n - ℓ)`.
pub fn k_window(n: usize, ell: usize, d: usize) -> (usize, usize) {
    let lo = (2 * d).saturating_sub(ell - 1).max(d);
    (lo, 2 * d + (n - ell))
}

/// `S(σ, k, d)` for any `σ` of class `lambda`.
pub fn count_s(lambda: &CycleType, k: usize, d: usize) -> BigUint {
    let n = lambda.size();
    let ell = lambda.len();
    let (lo, hi) = k_window(n, ell, d);
    if k < lo || k > hi {
        return BigUint::zero();
    }
    ClassWalk::new(n)
        .path_count_table(lambda, k)
        .expect("partition of n")
        .get(k, d)
}

/// Number of ways to write a permutation of class `c` as an ordered product
/// of `k` transpositions, for every class, from the class walk out of the
/// identity.
pub fn factorization_counts(n: usize, k_max: usize) -> (Vec<Partition>, Vec<Vec<BigUint>>) {
    let walk = ClassWalk::new(n);
    let dists = walk
        .distributions(&Partition::column(n), k_max)
        .expect("identity class");
    let index = walk.matrix.index.clone();
    let sizes: Vec<BigUint> = index.iter().map(Partition::class_size).collect();
    let per_element = dists
        .into_iter()
        .map(|row| row.into_iter().zip(&sizes).map(|(w, s)| w / s).collect())
        .collect();
    (index, per_element)
}

/// `#Π_k(σ → σ')`: walks of length `k` from `σ` to `σ'`. Equals the number of
/// factorizations of `σ⁻¹σ'` into `k` transpositions, a class function.
pub fn count_paths_between(a: &Permutation, b: &Permutation, k: usize) -> Result<BigUint> {
    let target = compose(&a.inverse(), b)?;
    let n = a.degree();
    let class = target.cycle_type();
    let walk = ClassWalk::new(n);
    let dists = walk.distributions(&Partition::column(n), k)?;
    let j = walk.matrix.position(&class).expect("class of degree n");
    Ok(&dists[k][j] / class.class_size())
}

/// Defect histogram of all `C(n,2)^k` walks of length `k` from `σ`, by literal
/// enumeration. Parallel over the first step.
pub fn brute_force_defects(s: &Permutation, k: usize, limit: u128) -> Result<Vec<u64>> {
    let n = s.degree();
    let transpositions: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let total = (transpositions.len() as u128)
        .checked_pow(k as u32)
        .unwrap_or(u128::MAX);
    budget("enumeration", total, limit)?;
    let ell = s.cycle_count();

    fn walk(
        cur: &mut Permutation,
        depth: usize,
        ts: &[(usize, usize)],
        ell: usize,
        k: usize,
        hist: &mut [u64],
    ) {
        if depth == 0 {
            let end = cur.cycle_count();
            hist[(ell + k - end) / 2] += 1;
            return;
        }
        for &(a, b) in ts {
            cur.mul_transposition_in_place(a, b);
            walk(cur, depth - 1, ts, ell, k, hist);
            cur.mul_transposition_in_place(a, b);
        }
    }

    if k == 0 {
        let mut h = vec![0; 1];
        h[0] = 1;
        return Ok(h);
    }
    let hist = transpositions
        .par_iter()
        .map(|&(a, b)| {
            let mut cur = s.clone();
            cur.mul_transposition_in_place(a, b);
            let mut h = vec![0u64; k + 1];
            walk(&mut cur, k - 1, &transpositions, ell, k, &mut h);
            h
        })
        .reduce(
            || vec![0u64; k + 1],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    *a += b;
                }
                x
            },
        );
    Ok(hist)
}

/// `S(σ, k, d)` by enumerating every walk. `limit` caps `C(n,2)^k`.
pub fn brute_force_s(s: &Permutation, k: usize, d: usize, limit: u128) -> Result<BigUint> {
    let hist = brute_force_defects(s, k, limit)?;
    Ok(hist.get(d).copied().map(BigUint::from).unwrap_or_default())
}

/// The matrices `M^ε` with entries
/// `Σ_k (εt)^k/k! · #Π_k(σ→σ') / N^(k - (ℓ(σ') - ℓ(σ)))`, i.e. `exp(εtL)` for
/// the walk generator that weighs merging steps by `N^-2`.
///
/// Entries are stored in fixed point with `scale_bits` fractional bits; each
/// entry is within `2^-scale_bits` of the exact series value (rounding plus
/// the truncated tail).
#[derive(Clone, Debug)]
pub struct TransferMatrix {
    pub n: usize,
    pub sign: i8,
    pub perms: Vec<Permutation>,
    pub scale_bits: u32,
    /// Highest power of `t` kept in the series.
    pub k_cut: usize,
    entries: Vec<BigInt>,
}

impl TransferMatrix {
    pub fn dim(&self) -> usize {
        self.perms.len()
    }

    /// Entry as an exact rational (the fixed-point value).
    pub fn entry(&self, i: usize, j: usize) -> BigRational {
        BigRational::new(
            self.entries[i * self.dim() + j].clone(),
            BigInt::one() << self.scale_bits,
        )
    }

    pub fn entry_f64(&self, i: usize, j: usize) -> f64 {
        fixed_to_f64(&self.entries[i * self.dim() + j], self.scale_bits)
    }

    /// Largest `|(self · other - I)_{ij}|`, computed in fixed point.
    pub fn product_identity_deviation(&self, other: &TransferMatrix) -> Result<f64> {
        if self.dim() != other.dim() || self.scale_bits != other.scale_bits {
            return Err(Error::DegreeMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let m = self.dim();
        let bits = self.scale_bits;
        let one = BigInt::one() << (2 * bits);
        let rows: Vec<f64> = (0..m)
            .into_par_iter()
            .map(|i| {
                let mut worst = 0.0f64;
                for j in 0..m {
                    let mut acc = BigInt::zero();
                    for l in 0..m {
                        acc += &self.entries[i * m + l] * &other.entries[l * m + j];
                    }
                    if i == j {
                        acc -= &one;
                    }
                    worst = worst.max(fixed_to_f64(&acc, 2 * bits).abs());
                }
                worst
            })
            .collect();
        Ok(rows.into_iter().fold(0.0, f64::max))
    }
}

fn fixed_to_f64(x: &BigInt, bits: u32) -> f64 {
    let r = BigRational::new(x.clone(), BigInt::one() << bits);
    r.to_f64().unwrap_or(f64::NAN)
}

/// Builds `M^ε` for `S_n` with exact rational `t ≥ 0` and `N > 0`.
/// `n_max` bounds the `n! × n!` size.
pub fn transfer_matrix(
    n: usize,
    sign: i8,
    t: &BigRational,
    big_n: &BigRational,
    scale_bits: u32,
    n_max: usize,
) -> Result<TransferMatrix> {
    const K_CAP: usize = 10_000;
    if n > n_max {
        return Err(Error::Budget {
            what: "transfer matrix degree",
            requested: n as u128,
            limit: n_max as u128,
        });
    }
    if sign != 1 && sign != -1 {
        return Err(Error::OutOfRange(format!("sign must be ±1, got {sign}")));
    }
    if !big_n.is_positive() || t.is_negative() {
        return Err(Error::OutOfRange("need t ≥ 0 and N > 0".into()));
    }
    // Tail of Σ_k x^k/k! with x = t·C(n,2)/N, also scaled by the largest
    // N^{±(n-1)} prefactor.
    let beta = (n * n.saturating_sub(1) / 2) as f64;
    let nf = big_n.to_f64().unwrap_or(f64::MAX);
    let x = t.to_f64().unwrap_or(f64::MAX) * beta / nf;
    let pre = nf.max(1.0 / nf).powi(n.saturating_sub(1) as i32);
    let target = 2f64.powi(-(scale_bits as i32) - 2);
    let mut k_cut = 0usize;
    let mut term = 1.0f64; // x^(k+1)/(k+1)! for k = k_cut
    loop {
        term = term * x / (k_cut + 1) as f64;
        if term * x.exp() * pre < target || x == 0.0 {
            break;
        }
        k_cut += 1;
        if k_cut > K_CAP {
            return Err(Error::Precision(format!(
                "transfer series needs more than {K_CAP} terms"
            )));
        }
    }

    let (classes, fk) = factorization_counts(n, k_cut);
    let eps_t_over_n = if sign == 1 { t / big_n } else { -(t / big_n) };
    // g[c] = Σ_k (εt/N)^k/k! · f(c, k)
    let mut g = vec![BigRational::zero(); classes.len()];
    let mut power = BigRational::one();
    for (k, row) in fk.iter().enumerate() {
        let w = &power / rational_from_biguint(&factorial(k as u64));
        for (gc, f) in g.iter_mut().zip(row) {
            if !f.is_zero() {
                *gc += &w * rational_from_biguint(f);
            }
        }
        power *= &eps_t_over_n;
    }
    let class_pos: HashMap<Partition, usize> = classes
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, p)| (p, i))
        .collect();
    let scale = BigRational::from_integer(BigInt::one() << scale_bits);
    let perms = Permutation::all(n);
    let ells: Vec<i64> = perms.iter().map(|p| p.cycle_count() as i64).collect();
    // Fixed-point value for each (class, ℓ' - ℓ).
    let mut cache: HashMap<(usize, i64), BigInt> = HashMap::new();
    let m = perms.len();
    let mut entries = Vec::with_capacity(m * m);
    for (i, a) in perms.iter().enumerate() {
        let ainv = a.inverse();
        for (j, b) in perms.iter().enumerate() {
            let c = class_pos[&compose(&ainv, b)?.cycle_type()];
            let shift = ells[j] - ells[i];
            let v = cache.entry((c, shift)).or_insert_with(|| {
                let factor = big_n.pow(shift as i32);
                (&g[c] * factor * &scale).round().to_integer()
            });
            entries.push(v.clone());
        }
    }
    Ok(TransferMatrix {
        n,
        sign,
        perms,
        scale_bits,
        k_cut,
        entries,
    })
}
