//! Random ramified coverings of the disk on the monodromy side: a Poisson
//! number of simple branch points, each contributing a uniform transposition,
//! and the signed genus statistic `(-1)^k N^χ`.
//!
//! Branch-point positions are never sampled; every statistic here depends
//! only on the number of branch points and the monodromy.

use num_traits::ToPrimitive;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::class_walk::ClassWalk;
use crate::error::{Error, Result};
use crate::expansion::{evaluate_auto, Group};
use crate::mc_sim::SimResult;
use crate::partition::CycleType;
use crate::perm::Permutation;

/// Monodromy data of one sampled covering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoveringSample {
    /// Number of simple branch points.
    pub k: usize,
    /// Transpositions, 0-based.
    pub taus: Vec<(usize, usize)>,
    /// `σ_start·τ_1·…·τ_k`.
    pub sigma_end: Permutation,
    /// Euler characteristic `ℓ(σ_end) - k`.
    pub chi: i64,
}

/// `χ = ℓ(σ_start·τ_1·…·τ_k) - k`.
pub fn euler_char(start: &Permutation, taus: &[(usize, usize)]) -> Result<i64> {
    let n = start.degree();
    let mut s = start.clone();
    for &(a, b) in taus {
        if a == b || a >= n || b >= n {
            return Err(Error::OutOfRange(format!(
                "({}, {}) is not a transposition of degree {n}",
                a + 1,
                b + 1
            )));
        }
        s.mul_transposition_in_place(a, b);
    }
    Ok(s.cycle_count() as i64 - taus.len() as i64)
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!(
            "time must be finite and nonnegative, got {t}"
        )))
    }
}

/// Draws `k ~ Poisson(t·n(n-1)/2)` and `k` i.i.d. uniform transpositions,
/// starting from the canonical representative of `λ`.
pub fn sample_covering<R: Rng>(lambda: &CycleType, t: f64, rng: &mut R) -> Result<CoveringSample> {
    check_time(t)?;
    let n = lambda.size();
    let pairs = n * n.saturating_sub(1) / 2;
    let mean = t * pairs as f64;
    let k = if mean > 0.0 {
        Poisson::new(mean)
            .map_err(|e| Error::OutOfRange(e.to_string()))?
            .sample(rng) as usize
    } else {
        0
    };
    let mut s = lambda.representative();
    let mut taus = Vec::with_capacity(k);
    for _ in 0..k {
        let a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let tau = (a.min(b), a.max(b));
        s.mul_transposition_in_place(tau.0, tau.1);
        taus.push(tau);
    }
    let chi = s.cycle_count() as i64 - k as i64;
    Ok(CoveringSample {
        k,
        taus,
        sigma_end: s,
        chi,
    })
}

/// `e^{nt - n²t/2} N^{ℓ(λ)} E[Π_i tr_N(B_{t/N}^{m_i})]`, the expectation of
/// `(-1)^k N^χ`.
pub fn genus_target(lambda: &CycleType, big_n: usize, t: f64) -> Result<f64> {
    check_time(t)?;
    let n = lambda.size() as f64;
    let moment = evaluate_auto(lambda, Group::U, big_n as f64, t, 1e-14)?.value;
    Ok((n * t - n * n * t / 2.0).exp() * (big_n as f64).powi(lambda.len() as i32) * moment)
}

/// Outcome of a genus-estimator run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenusReport {
    pub estimate: SimResult,
    pub exact: f64,
    /// `(estimate - exact) / stderr`.
    pub sigmas_away: f64,
}

/// Monte Carlo mean of `(-1)^k N^χ`; sample `i` uses ChaCha8 stream `i`.
pub fn genus_estimator(
    lambda: &CycleType,
    big_n: usize,
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<GenusReport> {
    check_time(t)?;
    if samples == 0 || big_n == 0 {
        return Err(Error::OutOfRange("N and samples must be at least 1".into()));
    }
    let nn = big_n as f64;
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = crate::mc_sim::sample_stream(seed, i);
            let c = sample_covering(lambda, t, &mut rng).expect("time already checked");
            let sign = if c.k % 2 == 0 { 1.0 } else { -1.0 };
            sign * nn.powi(c.chi as i32)
        })
        .collect();
    let estimate = SimResult::from_values(&values);
    let exact = genus_target(lambda, big_n, t)?;
    let sigmas_away = estimate.sigmas_from(exact);
    Ok(GenusReport {
        estimate,
        exact,
        sigmas_away,
    })
}

/// Exact expectation of `(-1)^k N^χ` by summing over `k` with Poisson
/// weights and walk counts, truncated once the Poisson tail is below
/// `1e-18`.
pub fn analytic_expectation(lambda: &CycleType, big_n: usize, t: f64) -> Result<f64> {
    check_time(t)?;
    let n = lambda.size();
    let pairs = (n * n.saturating_sub(1) / 2) as f64;
    let mean = t * pairs;
    let nn = big_n as f64;
    let ell = lambda.len() as i32;
    if mean == 0.0 {
        return Ok(nn.powi(ell));
    }
    // Past the mean the terms decrease geometrically, so the tail is below
    // the last term once that term is under 1e-18 and the ratio under 1/2.
    let mut weights = Vec::new();
    let mut w = (-mean).exp();
    let mut k = 0usize;
    while w > 1e-18 || (k as f64) < 2.0 * mean {
        weights.push(w);
        k += 1;
        w *= mean / k as f64;
        if k > 10_000 {
            return Err(Error::Precision(format!(
                "Poisson mean {mean} too large for the series"
            )));
        }
    }
    let walk = ClassWalk::new(n);
    let dists = walk.distributions(lambda, weights.len() - 1)?;
    let classes = &walk.matrix().index;
    let mut total = 0.0;
    for (k, (wk, dist)) in weights.iter().zip(&dists).enumerate() {
        let norm = pairs.powi(k as i32);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut avg = 0.0;
        for (j, count) in dist.iter().enumerate() {
            let c = count.to_f64().unwrap_or(f64::INFINITY);
            avg += c / norm * nn.powi(classes[j].len() as i32 - k as i32);
        }
        total += wk * sign * avg;
    }
    Ok(total)
}
