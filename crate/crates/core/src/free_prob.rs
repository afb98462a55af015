//! The large-`N` limit: moments and free cumulants of the free unitary
//! Brownian motion `u_t`, and limits of words in independent Brownian
//! motions.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{budget, Error, Result};
use crate::noncross::{enumerate_nc, kreweras, NCPartition, NC_MAX_N};
use crate::numeric::{binomial, factorial, rational_from_f64, scaled_to_f64, CompensatedSum};
use crate::perm::Permutation;

/// Longest word accepted by [`word_moment`].
pub const WORD_MAX_LEN: usize = 16;

/// Cancellation ratio above which alternating sums are redone exactly.
const CANCELLATION_LIMIT: f64 = 1e6;

/// `φ(u_t^n) = e^{-nt/2} Σ_{k<n} C(n,k+1) (-nt)^k / (n k!)`.
pub fn limit_moment(n: usize, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let prefactor = (-(n as f64) * t / 2.0).exp();
    let mut sum = CompensatedSum::new();
    let mut power = 1.0f64; // (-nt)^k / k!
    for k in 0..n {
        if k > 0 {
            power *= -(n as f64) * t / k as f64;
        }
        let c = binomial(n as u64, k as u64 + 1)
            .to_f64()
            .unwrap_or(f64::INFINITY);
        sum.add(c * power / n as f64);
    }
    let value = sum.value();
    if sum.abs_total() <= CANCELLATION_LIMIT * value.abs() {
        return prefactor * value;
    }
    scaled_to_f64(
        &limit_moment_series_exact(n, &rational_from_f64(t)),
        -(n as f64) * t / 2.0,
    )
}

/// The polynomial part `Σ_{k<n} C(n,k+1)(-nt)^k/(n k!)` in exact arithmetic.
pub fn limit_moment_series_exact(n: usize, t: &BigRational) -> BigRational {
    let nt = -t * BigRational::from_integer(BigInt::from(n));
    let mut sum = BigRational::zero();
    let mut power = BigRational::one();
    for k in 0..n {
        if k > 0 {
            power = power * &nt / BigRational::from_integer(BigInt::from(k));
        }
        let c = BigRational::from_integer(BigInt::from(binomial(n as u64, k as u64 + 1)));
        sum += c * &power;
    }
    sum / BigRational::from_integer(BigInt::from(n))
}

/// `k_n(u_t) = e^{-nt/2} (-nt)^{n-1} / (n (n-1)!)`.
pub fn free_cumulant(n: usize, t: f64) -> f64 {
    assert!(n >= 1, "cumulants start at order one");
    let nf = n as f64;
    let mut v = (-nf * t / 2.0).exp() / nf;
    for j in 1..n {
        v *= -nf * t / j as f64;
    }
    v
}

/// `k_σ(u_t)`, multiplicative over the cycles of `σ` (fixed points
/// contribute `k_1`).
pub fn free_cumulant_perm(s: &Permutation, t: f64) -> f64 {
    s.cycles()
        .iter()
        .map(|c| free_cumulant(c.len(), t))
        .product()
}

/// Number of minimal factorizations of a permutation with the given cycle
/// lengths into transpositions: `j! Π m^{m-2}/(m-1)!` with `j = Σ(m-1)`.
pub fn geodesic_count(cycle_lengths: &[usize]) -> BigUint {
    let j: usize = cycle_lengths.iter().map(|m| m - 1).sum();
    let mut num = factorial(j as u64);
    let mut den = BigUint::one();
    for &m in cycle_lengths {
        if m >= 2 {
            num *= BigUint::from(m).pow(m as u32 - 2);
        }
        den *= factorial(m as u64 - 1);
    }
    num / den
}

/// `k_σ` in geodesic form: `e^{-nt/2} (-t)^{|σ|} #Π_{|σ|}(id → σ) / |σ|!`.
pub fn free_cumulant_geodesic(s: &Permutation, t: f64) -> f64 {
    let lengths: Vec<usize> = s.cycles().iter().map(Vec::len).collect();
    let j = s.norm();
    let count = geodesic_count(&lengths).to_f64().unwrap_or(f64::INFINITY);
    let fj = factorial(j as u64).to_f64().unwrap_or(f64::INFINITY);
    (-(s.degree() as f64) * t / 2.0).exp() * (-t).powi(j as i32) * count / fj
}

/// `Σ_{P ∈ NC(n)} Π_{B ∈ P} k_{|B|}`.
pub fn moment_from_cumulants(n: usize, t: f64) -> Result<f64> {
    let k: Vec<f64> = (0..=n)
        .map(|m| if m == 0 { 1.0 } else { free_cumulant(m, t) })
        .collect();
    let mut sum = CompensatedSum::new();
    for p in enumerate_nc(n)? {
        sum.add(p.blocks().iter().map(|b| k[b.len()]).product());
    }
    Ok(sum.value())
}

/// One term of the defect-free transition out of `σ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeadingTerm {
    pub target: Permutation,
    /// `|σ'σ⁻¹|`, the number of splitting steps.
    pub steps: usize,
    /// `#Π_steps(σ → σ')`.
    pub paths: BigUint,
}

impl LeadingTerm {
    /// `e^{-nt/2} (-t)^j / j! · paths` for `σ` of degree `n`.
    pub fn weight(&self, t: f64) -> f64 {
        let n = self.target.degree() as f64;
        let j = self.steps;
        (-n * t / 2.0).exp() * (-t).powi(j as i32) * self.paths.to_f64().unwrap_or(f64::INFINITY)
            / factorial(j as u64).to_f64().unwrap_or(f64::INFINITY)
    }
}

/// All `σ' ≼ σ` with the weight of the defect-free walks reaching them.
/// The targets are products of non-crossing refinements of each cycle.
pub fn leading_order_map(s: &Permutation) -> Result<Vec<LeadingTerm>> {
    let n = s.degree();
    let mut partial: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for cycle in s.cycles() {
        let m = cycle.len();
        let options = enumerate_nc(m)?;
        let mut next = Vec::with_capacity(partial.len() * options.len());
        for base in &partial {
            for p in &options {
                let mut cycles = base.clone();
                cycles.extend(
                    p.blocks()
                        .iter()
                        .map(|b| b.iter().map(|&i| cycle[i]).collect()),
                );
                next.push(cycles);
            }
        }
        partial = next;
    }
    let s_inv = s.inverse();
    partial
        .into_iter()
        .map(|cycles| {
            let target = Permutation::from_cycles(n, &cycles)?;
            let diff = crate::perm::compose(&s_inv, &target)?;
            let lengths: Vec<usize> = diff.cycles().iter().map(Vec::len).collect();
            Ok(LeadingTerm {
                steps: diff.norm(),
                paths: geodesic_count(&lengths),
                target,
            })
        })
        .collect()
}

/// A word in independent Brownian motions, `Tr(B^{(i_1)}_{t_{i_1}} … )`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Word {
    /// Variable index of each letter.
    pub letters: Vec<usize>,
    pub names: Vec<String>,
    /// Time of each variable.
    pub times: Vec<f64>,
}

impl Word {
    pub fn new(letters: Vec<usize>, times: Vec<f64>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::OutOfRange("empty word".into()));
        }
        if letters.iter().any(|&l| l >= times.len()) {
            return Err(Error::OutOfRange("letter without a time".into()));
        }
        if times.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
            return Err(Error::OutOfRange("times must be nonnegative".into()));
        }
        let names = (0..times.len())
            .map(|i| ((b'a' + (i % 26) as u8) as char).to_string())
            .collect();
        Ok(Word {
            letters,
            names,
            times,
        })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The same variables with the letters cyclically shifted left by `k`.
    pub fn rotate(&self, k: usize) -> Word {
        let mut w = self.clone();
        w.letters.rotate_left(k % self.len().max(1));
        w
    }
}

/// `a(0.5) b(1.0) a b`: a time is required on the first occurrence of each
/// variable and must agree on any later one.
impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut times: Vec<Option<f64>> = Vec::new();
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (name, time) = match tok.split_once('(') {
                Some((name, rest)) => {
                    let body = rest
                        .strip_suffix(')')
                        .ok_or_else(|| Error::Parse(format!("unclosed time in {tok:?}")))?;
                    let t = body
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad time in {tok:?}")))?;
                    (name, Some(t))
                }
                None => (tok, None),
            };
            if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::Parse(format!("bad variable name in {tok:?}")));
            }
            let idx = match names.iter().position(|n| n == name) {
                Some(i) => i,
                None => {
                    names.push(name.to_string());
                    times.push(None);
                    names.len() - 1
                }
            };
            match (times[idx], time) {
                (None, t) => times[idx] = t,
                (Some(a), Some(b)) if a != b => {
                    return Err(Error::Parse(format!(
                        "variable {name} given times {a} and {b}"
                    )))
                }
                _ => {}
            }
            letters.push(idx);
        }
        let times = times
            .into_iter()
            .zip(&names)
            .map(|(t, n)| t.ok_or_else(|| Error::Parse(format!("variable {n} has no time"))))
            .collect::<Result<Vec<_>>>()?;
        let mut w = Word::new(letters, times)?;
        w.names = names;
        Ok(w)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.names.len()];
        for (i, &l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if seen[l] {
                write!(f, "{}", self.names[l])?;
            } else {
                seen[l] = true;
                write!(f, "{}({})", self.names[l], self.times[l])?;
            }
        }
        Ok(())
    }
}

/// `lim_N E[tr(word)]`. Integrates out the least frequent variable `b`:
/// writing the word cyclically as `W_1 b W_2 b … W_r b`, the defect-free
/// transitions out of `(1 … r)` give
/// `Σ_{σ' ≼ (1…r)} k_{K(σ')}(b) Π_{cycles c of σ'} φ(Π_{i ∈ c} W_i)`,
/// and each factor is a shorter word.
pub fn word_moment(w: &Word) -> Result<f64> {
    budget("word length", w.len() as u128, WORD_MAX_LEN as u128)?;
    let mut memo = HashMap::new();
    word_rec(&w.letters, &w.times, &mut memo)
}

fn canonical_rotation(letters: &[usize]) -> Vec<usize> {
    (0..letters.len())
        .map(|k| {
            let mut v = letters.to_vec();
            v.rotate_left(k);
            v
        })
        .min()
        .unwrap_or_default()
}

fn word_rec(letters: &[usize], times: &[f64], memo: &mut HashMap<Vec<usize>, f64>) -> Result<f64> {
    if letters.is_empty() {
        return Ok(1.0);
    }
    let key = canonical_rotation(letters);
    if let Some(&v) = memo.get(&key) {
        return Ok(v);
    }
    let mut counts = vec![0usize; times.len()];
    for &l in letters {
        counts[l] += 1;
    }
    let present: Vec<usize> = (0..times.len()).filter(|&v| counts[v] > 0).collect();
    let value = if present.len() == 1 {
        limit_moment(letters.len(), times[present[0]])
    } else {
        let b = *present
            .iter()
            .min_by_key(|&&v| counts[v])
            .expect("nonempty word");
        let r = counts[b];
        budget("non-crossing enumeration size", r as u128, NC_MAX_N as u128)?;
        // Rotate so the word ends with b, then cut after each b.
        let last_b = letters.iter().rposition(|&l| l == b).expect("b occurs");
        let mut rotated = letters.to_vec();
        rotated.rotate_left(last_b + 1);
        let mut segments: Vec<Vec<usize>> = vec![Vec::new()];
        for &l in &rotated {
            if l == b {
                segments.push(Vec::new());
            } else {
                segments.last_mut().expect("segment").push(l);
            }
        }
        segments.pop();
        let t = times[b];
        let mut sum = CompensatedSum::new();
        for p in enumerate_nc(r)? {
            let k = kreweras(&p);
            let weight: f64 = k
                .blocks()
                .iter()
                .map(|blk| free_cumulant(blk.len(), t))
                .product();
            if weight == 0.0 {
                continue;
            }
            let mut prod = weight;
            for block in p.blocks() {
                let sub: Vec<usize> = block
                    .iter()
                    .flat_map(|&i| segments[i].iter().copied())
                    .collect();
                prod *= word_rec(&sub, times, memo)?;
            }
            sum.add(prod);
        }
        sum.value()
    };
    memo.insert(key, value);
    Ok(value)
}

/// Free cumulant `κ_n(x_1, …, x_n)` of the letters of `w`, by subtracting
/// all proper non-crossing products from the moment.
pub fn mixed_cumulant(w: &Word) -> Result<f64> {
    budget(
        "non-crossing enumeration size",
        w.len() as u128,
        NC_MAX_N as u128,
    )?;
    let mut memo = HashMap::new();
    cumulant_rec(&w.letters, &w.times, &mut memo)
}

fn cumulant_rec(
    letters: &[usize],
    times: &[f64],
    memo: &mut HashMap<Vec<usize>, f64>,
) -> Result<f64> {
    if let Some(&v) = memo.get(letters) {
        return Ok(v);
    }
    let n = letters.len();
    let mut words = HashMap::new();
    let mut acc = CompensatedSum::new();
    acc.add(word_rec(letters, times, &mut words)?);
    for p in enumerate_nc(n)? {
        if p.blocks().len() == 1 {
            continue;
        }
        let mut prod = 1.0;
        for block in p.blocks() {
            let sub: Vec<usize> = block.iter().map(|&i| letters[i]).collect();
            prod *= cumulant_rec(&sub, times, memo)?;
        }
        acc.add(-prod);
    }
    let v = acc.value();
    memo.insert(letters.to_vec(), v);
    Ok(v)
}

/// Result of the subordination check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiResidual {
    pub re: f64,
    pub im: f64,
    /// Bound on the neglected terms `n > n_cut`, using `|m_n| ≤ 1`.
    pub tail_bound: f64,
}

impl ChiResidual {
    pub fn norm(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// `Σ_{n ≥ 1} φ(u_t^n) χ_t(z)^n - z` with `χ_t(z) = z/(1+z) e^{t(z+1/2)}`,
/// which vanishes for small `z`.
pub fn chi_residual(
    t: f64,
    z: Complex64,
    radius: f64,
    n_cut: usize,
    tol: f64,
) -> Result<ChiResidual> {
    if z.norm() >= radius {
        return Err(Error::OutOfRange(format!(
            "|z|={} not below {radius}",
            z.norm()
        )));
    }
    let chi = z / (z + 1.0) * (t * (z + 0.5)).exp();
    let a = chi.norm();
    if a >= 1.0 {
        return Err(Error::Precision(format!(
            "|χ|={a} does not give a convergent series"
        )));
    }
    let tail = a.powi(n_cut as i32 + 1) / (1.0 - a);
    if tail > tol {
        return Err(Error::Precision(format!(
            "tail {tail:e} above {tol:e} with n_cut={n_cut}"
        )));
    }
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    let mut power = Complex64::new(1.0, 0.0);
    for n in 1..=n_cut {
        power *= chi;
        let term = power * limit_moment(n, t);
        re.add(term.re);
        im.add(term.im);
    }
    re.add(-z.re);
    im.add(-z.im);
    Ok(ChiResidual {
        re: re.value(),
        im: im.value(),
        tail_bound: tail,
    })
}

/// `NC(n)` blocks paired with their Kreweras complements, for display.
pub fn kreweras_pairs(n: usize) -> Result<Vec<(NCPartition, NCPartition)>> {
    Ok(enumerate_nc(n)?
        .into_iter()
        .map(|p| {
            let k = kreweras(&p);
            (p, k)
        })
        .collect())
}
