//! Exact expansions of Brownian moments in powers of `t` and `N^{-2}`.
//!
//! For `σ` of class `λ ⊢ n` and the unitary Brownian motion `B` at time
//! `t/N`, the normalized moment `N^{-ℓ(σ)} E[p_σ(B)]` equals
//!
//! ```text
//! e^{-nt/2} Σ_{k,d ≥ 0} (-1)^k t^k S(σ,k,d) / (k! N^{2d})
//! ```
//!
//! with the extra factor `e^{n²t/(2N²)}` on `SU(N)`. An [`ExpPoly`] keeps the
//! integers `S(σ,k,d)` for `d ≤ d_max`; every `d`-slice is a finite polynomial
//! in `t`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};
use serde::Deserialize;

use crate::class_walk::{k_window, ClassWalk};
use crate::error::{Error, Result};
use crate::numeric::{factorial, rational_from_biguint, rational_from_f64, to_f64, CompensatedSum};
use crate::partition::{CycleType, Partition};
use crate::sym_char::{casimir_eigenvalue, mn_character, omega_character};

/// Largest `d_max` the automatic truncation will try.
pub const AUTO_D_MAX_LIMIT: usize = 400;

/// Structure group of the Brownian motion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    U,
    SU,
}

/// Truncated expansion of one normalized moment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPoly {
    pub class: CycleType,
    pub group: Group,
    pub d_max: usize,
    /// Raw walk counts `S(σ,k,d)`, nonzero entries only, keyed by `(d, k)`.
    coeffs: BTreeMap<(usize, usize), BigUint>,
}

/// A value with its certified truncation error.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Evaluation {
    pub value: f64,
    /// Bound on the contribution of all `d > d_max`.
    pub tail_bound: f64,
    pub d_max: usize,
    /// Set when `N` is not an integer: the series still converges but no
    /// longer describes a matrix model.
    pub extrapolated: bool,
}

/// Builds the expansion of the normalized `p_λ` moment up to defect `d_max`.
pub fn moment_expansion(lambda: &CycleType, group: Group, d_max: usize) -> ExpPoly {
    let n = lambda.size();
    let ell = lambda.len();
    let k_max = 2 * d_max + n - ell;
    let table = ClassWalk::new(n)
        .path_count_table(lambda, k_max)
        .expect("partition of n");
    let coeffs = table
        .nonzero()
        .filter(|&(_, d, _)| d <= d_max)
        .map(|(k, d, s)| ((d, k), s.clone()))
        .collect();
    ExpPoly {
        class: lambda.clone(),
        group,
        d_max,
        coeffs,
    }
}

impl ExpPoly {
    pub fn n(&self) -> usize {
        self.class.size()
    }

    /// `S(σ,k,d)`, zero outside the stored range.
    pub fn s(&self, d: usize, k: usize) -> BigUint {
        self.coeffs.get(&(d, k)).cloned().unwrap_or_default()
    }

    /// Nonzero `(d, k, S)` entries in increasing `(d, k)` order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &BigUint)> {
        self.coeffs.iter().map(|(&(d, k), s)| (d, k, s))
    }

    /// Coefficients in `t` of the `N^{-2d}` slice without the exponential
    /// prefactor: entry `k` is `(-1)^k S(σ,k,d)/k!`.
    pub fn slice(&self, d: usize) -> Vec<BigRational> {
        let (_, hi) = k_window(self.n(), self.class.len(), d);
        (0..=hi)
            .map(|k| {
                let v = rational_from_biguint(&self.s(d, k))
                    / rational_from_biguint(&factorial(k as u64));
                if k % 2 == 0 {
                    v
                } else {
                    -v
                }
            })
            .collect()
    }

    /// `-n/2 + n²/(2N²)` for SU, `-n/2` for U: the prefactor is
    /// `exp(rate · t)`.
    pub fn prefactor_rate(&self, big_n: f64) -> f64 {
        let n = self.n() as f64;
        match self.group {
            Group::U => -n / 2.0,
            Group::SU => -n / 2.0 + n * n / (2.0 * big_n * big_n),
        }
    }

    /// Bound on `Σ_{d > d_max}` of the series at `(N, t)`, prefactor
    /// included. Uses `S(σ,k,d) ≤ C(n,2)^k` and the smallest walk length
    /// that can reach defect `d_max + 1`.
    pub fn tail_bound(&self, big_n: f64, t: f64) -> f64 {
        let n = self.n();
        let beta = (n * n.saturating_sub(1) / 2) as f64;
        let x = t * beta;
        let (k_min, _) = k_window(n, self.class.len(), self.d_max + 1);
        if x == 0.0 {
            return if k_min == 0 {
                big_n.powi(-2 * (self.d_max as i32 + 1))
            } else {
                0.0
            };
        }
        // Σ_{k ≥ K} x^k/k! ≤ x^K/K! e^x
        let mut lead = 1.0f64;
        for j in 1..=k_min {
            lead *= x / j as f64;
        }
        let log_tail = lead.ln() + x - 2.0 * (self.d_max as f64 + 1.0) * big_n.ln()
            + self.prefactor_rate(big_n) * t;
        log_tail.exp()
    }

    /// Exact partial sum `Σ_{d ≤ d_max} Σ_k (-t)^k S/(k! N^{2d})` at rational
    /// `t` and `N`, then multiplied by the prefactor.
    pub fn evaluate_truncated(&self, big_n: f64, t: f64) -> f64 {
        let tq = rational_from_f64(t);
        let inv_n2 = BigRational::one() / (rational_from_f64(big_n) * rational_from_f64(big_n));
        let mut sum = BigRational::zero();
        let mut cur_d = usize::MAX;
        let mut n_pow = BigRational::one();
        for (&(d, k), s) in &self.coeffs {
            if d != cur_d {
                n_pow = inv_n2.pow(d as i32);
                cur_d = d;
            }
            let mut term = rational_from_biguint(s) * tq.pow(k as i32) * &n_pow
                / rational_from_biguint(&factorial(k as u64));
            if k % 2 == 1 {
                term = -term;
            }
            sum += term;
        }
        to_f64(&sum) * (self.prefactor_rate(big_n) * t).exp()
    }

    /// Value at `(N, t)` with the truncation error certified below `tol`.
    pub fn evaluate(&self, big_n: f64, t: f64, tol: f64) -> Result<Evaluation> {
        check_domain(big_n, t)?;
        let tail = self.tail_bound(big_n, t);
        if !(tail <= tol) {
            return Err(Error::Precision(format!(
                "tail bound {tail:e} exceeds {tol:e} at d_max={} (N={big_n}, t={t})",
                self.d_max
            )));
        }
        Ok(Evaluation {
            value: self.evaluate_truncated(big_n, t),
            tail_bound: tail,
            d_max: self.d_max,
            extrapolated: big_n.fract() != 0.0,
        })
    }
}

fn check_domain(big_n: f64, t: f64) -> Result<()> {
    if !(big_n >= 1.0) || !big_n.is_finite() {
        return Err(Error::OutOfRange(format!("N={big_n} must be at least 1")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::OutOfRange(format!("t={t} must be nonnegative")));
    }
    Ok(())
}

/// Smallest `d_max` whose tail bound at `(N, t)` is below `tol`, found by
/// scanning the bound, which needs no walk counts.
pub fn required_d_max(
    lambda: &CycleType,
    group: Group,
    big_n: f64,
    t: f64,
    tol: f64,
) -> Result<usize> {
    check_domain(big_n, t)?;
    let probe = |d_max| ExpPoly {
        class: lambda.clone(),
        group,
        d_max,
        coeffs: BTreeMap::new(),
    };
    (0..=AUTO_D_MAX_LIMIT)
        .find(|&d| probe(d).tail_bound(big_n, t) <= tol)
        .ok_or_else(|| {
            Error::Precision(format!(
                "no d_max ≤ {AUTO_D_MAX_LIMIT} reaches {tol:e} at N={big_n}, t={t}"
            ))
        })
}

/// Builds and evaluates the expansion with the smallest sufficient `d_max`.
pub fn evaluate_auto(
    lambda: &CycleType,
    group: Group,
    big_n: f64,
    t: f64,
    tol: f64,
) -> Result<Evaluation> {
    let d_max = required_d_max(lambda, group, big_n, t, tol)?;
    moment_expansion(lambda, group, d_max).evaluate(big_n, t, tol)
}

/// Normalized moment by the finite character sum
/// `N^{-ℓ} Σ_{μ, ℓ(μ) ≤ N} e^{-c₂(μ)t/(2N)} χ^μ(Ω)/n! χ^μ(σ)`, with the
/// SU Casimir shifted by `-n²/N`.
pub fn fourier_moment(lambda: &CycleType, group: Group, big_n: u32, t: f64) -> Result<f64> {
    if big_n == 0 {
        return Err(Error::OutOfRange("N must be at least 1".into()));
    }
    let n = lambda.size();
    let nn = f64::from(big_n);
    let nq = BigRational::from_integer(BigInt::from(big_n));
    let n_fact = rational_from_biguint(&factorial(n as u64));
    let mut sum = CompensatedSum::new();
    for mu in Partition::all(n) {
        if mu.len() > big_n as usize {
            continue;
        }
        let chi = mn_character(&mu, lambda)?;
        if chi == 0 {
            continue;
        }
        let mut c2 = to_f64(&casimir_eigenvalue(&mu).eval(&nq));
        if group == Group::SU {
            c2 -= (n * n) as f64 / nn;
        }
        let schur =
            omega_character(&mu).eval(&nq) / &n_fact * BigRational::from_integer(chi.into());
        let schur = to_f64(&(schur / nq.pow(lambda.len() as i32)));
        sum.add((-c2 * t / (2.0 * nn)).exp() * schur);
    }
    Ok(sum.value())
}

/// `S(σ,k,0)` recomputed by shuffling independent defect-free walks on the
/// individual cycles of `σ`.
pub fn shuffle_factorize(lambda: &CycleType, k: usize) -> BigUint {
    // Exponential generating functions multiply under shuffles.
    let mut egf = vec![BigRational::zero(); k + 1];
    egf[0] = BigRational::one();
    for &m in lambda.parts() {
        let table = ClassWalk::new(m)
            .path_count_table(&Partition::row(m), k)
            .expect("cycle class");
        let cycle: Vec<BigRational> = (0..=k)
            .map(|l| {
                rational_from_biguint(&table.get(l, 0))
                    / rational_from_biguint(&factorial(l as u64))
            })
            .collect();
        let mut next = vec![BigRational::zero(); k + 1];
        for (a, x) in egf.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in cycle.iter().enumerate().take(k + 1 - a) {
                next[a + b] += x * y;
            }
        }
        egf = next;
    }
    let v = &egf[k] * rational_from_biguint(&factorial(k as u64));
    v.to_integer().to_biguint().expect("nonnegative count")
}

/// Expansion of `Var[N^{-ℓ} p_σ] = E[N^{-2ℓ} p_{σ×σ}] - E[N^{-ℓ} p_σ]²` on
/// `U(N)`: the value is `e^{-nt} Σ_d slice_d(t) N^{-2d}`.
#[derive(Clone, Debug, PartialEq)]
pub struct VarianceExpansion {
    pub class: CycleType,
    pub d_max: usize,
    /// `slices[d][k]` = coefficient of `t^k N^{-2d}`.
    pub slices: Vec<Vec<BigRational>>,
    doubled: ExpPoly,
    single: ExpPoly,
}

/// The class of `σ × σ` acting on two disjoint copies of the points.
pub fn doubled_class(lambda: &CycleType) -> CycleType {
    let mut parts = lambda.parts().to_vec();
    parts.extend_from_slice(lambda.parts());
    Partition::new(parts).expect("positive parts")
}

pub fn variance_expansion(lambda: &CycleType, d_max: usize) -> VarianceExpansion {
    let doubled = moment_expansion(&doubled_class(lambda), Group::U, d_max);
    let single = moment_expansion(lambda, Group::U, d_max);
    let single_slices: Vec<Vec<BigRational>> = (0..=d_max).map(|d| single.slice(d)).collect();
    let slices = (0..=d_max)
        .map(|d| {
            let mut out = doubled.slice(d);
            for a in 0..=d {
                let (p, q) = (&single_slices[a], &single_slices[d - a]);
                for (i, x) in p.iter().enumerate() {
                    for (j, y) in q.iter().enumerate() {
                        if i + j >= out.len() {
                            out.resize(i + j + 1, BigRational::zero());
                        }
                        out[i + j] -= x * y;
                    }
                }
            }
            while out.last().is_some_and(Zero::is_zero) {
                out.pop();
            }
            out
        })
        .collect();
    VarianceExpansion {
        class: lambda.clone(),
        d_max,
        slices,
        doubled,
        single,
    }
}

impl VarianceExpansion {
    /// Value at `(N, t)` with a tail bound derived from the two moment tails
    /// and `|N^{-ℓ} p_σ| ≤ 1`.
    pub fn evaluate(&self, big_n: f64, t: f64, tol: f64) -> Result<Evaluation> {
        check_domain(big_n, t)?;
        let td = self.doubled.tail_bound(big_n, t);
        let ts = self.single.tail_bound(big_n, t);
        let tail = td + (2.0 + ts) * ts;
        if !(tail <= tol) {
            return Err(Error::Precision(format!(
                "variance tail bound {tail:e} exceeds {tol:e} at d_max={}",
                self.d_max
            )));
        }
        let tq = rational_from_f64(t);
        let inv_n2 = BigRational::one() / (rational_from_f64(big_n) * rational_from_f64(big_n));
        let mut sum = BigRational::zero();
        for (d, slice) in self.slices.iter().enumerate() {
            let poly = crate::numeric::horner(slice, &tq);
            sum += poly * inv_n2.pow(d as i32);
        }
        let n = self.class.size() as f64;
        Ok(Evaluation {
            value: to_f64(&sum) * (-n * t).exp(),
            tail_bound: tail,
            d_max: self.d_max,
            extrapolated: big_n.fract() != 0.0,
        })
    }
}

/// Serialized with `S` values as decimal strings, plus the prefactor
/// convention spelled out.
impl Serialize for ExpPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(serde::Serialize)]
        struct Entry {
            d: usize,
            k: usize,
            s: String,
        }
        let entries: Vec<Entry> = self
            .entries()
            .map(|(d, k, v)| Entry {
                d,
                k,
                s: v.to_string(),
            })
            .collect();
        let convention = match self.group {
            Group::U => "exp(-n*t/2) * sum (-1)^k t^k S / (k! N^(2d))",
            Group::SU => "exp(-n*t/2 + n^2*t/(2*N^2)) * sum (-1)^k t^k S / (k! N^(2d))",
        };
        let mut st = s.serialize_struct("ExpPoly", 6)?;
        st.serialize_field("class", &self.class)?;
        st.serialize_field("n", &self.n())?;
        st.serialize_field("group", &self.group)?;
        st.serialize_field("d_max", &self.d_max)?;
        st.serialize_field("convention", convention)?;
        st.serialize_field("coefficients", &entries)?;
        st.end()
    }
}

/// Converts a slice to `f64` coefficients, for display.
pub fn slice_f64(slice: &[BigRational]) -> Vec<f64> {
    slice
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::NAN))
        .collect()
}
