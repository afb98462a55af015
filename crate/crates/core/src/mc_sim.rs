//! Monte Carlo Brownian motion on `U(N)` for the metric `-Tr(XY)`, moment
//! estimators, and the coupled transposition-walk martingale.
//!
//! Paths are products of exact-unitary increments `exp(√δ·G)` with `G` a
//! standard Gaussian in `u(N)`. Sample `i` draws from ChaCha8 stream `i` of
//! the configured seed, so results do not depend on scheduling.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;
use rayon::prelude::*;
use serde::Serialize;

use crate::cmatrix::{CMatrix, Expm};
use crate::error::{Error, Result};
use crate::partition::CycleType;
use crate::perm::Permutation;

/// Steps between unitarity checks.
const RECHECK_EVERY: usize = 64;

/// Largest tolerated `‖B*B - I‖_max` before a polar correction.
const UNITARITY_TOL: f64 = 1e-12;

/// How `SimConfig::t` maps to the time of the Brownian motion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeConvention {
    /// Sample `B_{t/N}`.
    Scaled,
    /// Sample `B_t`.
    Raw,
}

/// Discretization of the Brownian path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Multiplicative increments `B ← B·exp(√δ·G)`.
    GeometricEuler,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimConfig {
    #[serde(rename = "N")]
    pub big_n: usize,
    pub t: f64,
    pub time: TimeConvention,
    pub steps: usize,
    pub samples: usize,
    pub seed: u64,
    pub scheme: Scheme,
}

impl SimConfig {
    /// `B_{t/N}` with 100 steps and 10⁴ samples.
    pub fn new(big_n: usize, t: f64) -> Self {
        SimConfig {
            big_n,
            t,
            time: TimeConvention::Scaled,
            steps: 100,
            samples: 10_000,
            seed: 0,
            scheme: Scheme::GeometricEuler,
        }
    }

    pub fn steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn time(mut self, time: TimeConvention) -> Self {
        self.time = time;
        self
    }

    /// Time of the Brownian motion actually sampled.
    pub fn duration(&self) -> f64 {
        match self.time {
            TimeConvention::Scaled => self.t / self.big_n as f64,
            TimeConvention::Raw => self.t,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.big_n == 0 || self.steps == 0 || self.samples == 0 {
            return Err(Error::OutOfRange(
                "N, steps and samples must be at least 1".into(),
            ));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(Error::OutOfRange(format!(
                "time must be finite and nonnegative, got {}",
                self.t
            )));
        }
        Ok(())
    }
}

/// Sample mean with its standard error `sd/√samples`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl SimResult {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        SimResult {
            mean,
            stderr: (var / n as f64).sqrt(),
            samples: n,
        }
    }

    /// `(mean - target) / stderr`, or 0 when both are exact.
    pub fn sigmas_from(&self, target: f64) -> f64 {
        let gap = self.mean - target;
        if self.stderr > 0.0 {
            gap / self.stderr
        } else if gap == 0.0 {
            0.0
        } else {
            f64::INFINITY * gap.signum()
        }
    }
}

/// Independent ChaCha8 substream `index` of `seed`.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Reusable buffers for simulating one path after another.
struct PathSampler {
    expm: Expm,
    gen: CMatrix,
    inc: CMatrix,
    tmp: CMatrix,
}

impl PathSampler {
    fn new(dim: usize) -> Self {
        PathSampler {
            expm: Expm::new(dim),
            gen: CMatrix::zeros(dim),
            inc: CMatrix::zeros(dim),
            tmp: CMatrix::zeros(dim),
        }
    }

    /// `B_time` started at the identity.
    fn run<R: Rng>(&mut self, dim: usize, time: f64, steps: usize, rng: &mut R) -> CMatrix {
        let mut b = CMatrix::identity(dim);
        if time == 0.0 {
            return b;
        }
        let scale = (time / steps as f64).sqrt();
        for step in 1..=steps {
            self.gen.fill_lie_gaussian(scale, rng);
            self.expm.compute(&self.gen, &mut self.inc);
            b.mul_into(&self.inc, &mut self.tmp);
            std::mem::swap(&mut b, &mut self.tmp);
            if step % RECHECK_EVERY == 0 || step == steps {
                while b.unitarity_defect() > UNITARITY_TOL {
                    b.polar_correct();
                }
            }
        }
        b
    }
}

/// Sample path `index` of the configured Brownian motion, at its final time.
pub fn sample_brownian(cfg: &SimConfig, index: u64) -> Result<CMatrix> {
    cfg.validate()?;
    let mut rng = sample_stream(cfg.seed, index);
    Ok(PathSampler::new(cfg.big_n).run(cfg.big_n, cfg.duration(), cfg.steps, &mut rng))
}

/// `Π_i tr_N(B^{m_i})` with normalized traces, from `Tr(B^m)` values.
fn normalized_product(lambda: &CycleType, traces: &[Complex64], big_n: usize) -> Complex64 {
    lambda
        .parts()
        .iter()
        .map(|&m| traces[m] / big_n as f64)
        .product()
}

/// Per-sample values of `Re Π_i tr_N(B^{m_i})` for each class, all from the
/// same paths: `out[c][s]` is class `c` on sample `s`.
pub fn moment_samples(lambdas: &[CycleType], cfg: &SimConfig) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let max_m = lambdas
        .iter()
        .flat_map(|l| l.parts().iter().copied())
        .max()
        .unwrap_or(0);
    let per_sample: Vec<Vec<f64>> = (0..cfg.samples as u64)
        .into_par_iter()
        .map_init(
            || PathSampler::new(cfg.big_n),
            |sampler, i| {
                let mut rng = sample_stream(cfg.seed, i);
                let b = sampler.run(cfg.big_n, cfg.duration(), cfg.steps, &mut rng);
                let traces = b.power_traces(max_m);
                lambdas
                    .iter()
                    .map(|l| normalized_product(l, &traces, cfg.big_n).re)
                    .collect()
            },
        )
        .collect();
    Ok((0..lambdas.len())
        .map(|c| per_sample.iter().map(|row| row[c]).collect())
        .collect())
}

/// Estimates of `E[Π_i tr_N(B^{m_i})]` for several classes from shared paths.
pub fn estimate_moments(lambdas: &[CycleType], cfg: &SimConfig) -> Result<Vec<SimResult>> {
    Ok(moment_samples(lambdas, cfg)?
        .iter()
        .map(|v| SimResult::from_values(v))
        .collect())
}

pub fn estimate_moment(lambda: &CycleType, cfg: &SimConfig) -> Result<SimResult> {
    Ok(estimate_moments(std::slice::from_ref(lambda), cfg)?.remove(0))
}

/// Empirical variance of `Re Π_i tr_N(B^{m_i})` under `cfg`.
pub fn sample_variance(lambda: &CycleType, cfg: &SimConfig) -> Result<f64> {
    let v = moment_samples(std::slice::from_ref(lambda), cfg)?.remove(0);
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    Ok(v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len().max(2) - 1) as f64)
}

/// Least-squares slope of `log Var` against `log N`, one run per `N`.
pub fn variance_slope(lambda: &CycleType, ns: &[usize], cfg: &SimConfig) -> Result<f64> {
    if ns.len() < 2 {
        return Err(Error::OutOfRange(
            "slope needs at least two values of N".into(),
        ));
    }
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .map(|&nn| {
            let c = SimConfig {
                big_n: nn,
                ..cfg.clone()
            };
            sample_variance(lambda, &c).map(|v| ((nn as f64).ln(), v.ln()))
        })
        .collect::<Result<_>>()?;
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Outcome of the coupled walk-and-motion check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MartingaleReport {
    pub estimate: SimResult,
    pub expected: f64,
    /// `(estimate - expected) / stderr`.
    pub sigmas: f64,
}

/// Runs the transposition walk from `σ` (each transposition at rate 1,
/// right multiplication) alongside an independent `B_t` in raw time, and
/// compares the mean of `Re p^st_{π_t}(B_t)` with
/// `exp(-(Nn + n(n-1))t/2)·N^{ℓ(σ)}`.
pub fn martingale_check(
    sigma: &Permutation,
    big_n: usize,
    t: f64,
    steps: usize,
    samples: usize,
    seed: u64,
) -> Result<MartingaleReport> {
    let cfg = SimConfig::new(big_n, t)
        .time(TimeConvention::Raw)
        .steps(steps)
        .samples(samples)
        .seed(seed);
    cfg.validate()?;
    let n = sigma.degree();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let holding = (!pairs.is_empty()).then(|| Exp::new(pairs.len() as f64).expect("positive rate"));
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map_init(
            || PathSampler::new(big_n),
            |sampler, i| {
                let mut rng = sample_stream(seed, i);
                let b = sampler.run(big_n, t, steps, &mut rng);
                let mut pi = sigma.clone();
                if let Some(holding) = holding {
                    let mut clock = 0.0;
                    loop {
                        clock += rng.sample(holding);
                        if clock > t {
                            break;
                        }
                        let (a, c) = pairs[rng.gen_range(0..pairs.len())];
                        pi.mul_transposition_in_place(a, c);
                    }
                }
                let cycles = pi.cycles();
                let traces = b.power_traces(n);
                cycles
                    .iter()
                    .map(|c| traces[c.len()])
                    .product::<Complex64>()
                    .re
            },
        )
        .collect();
    let estimate = SimResult::from_values(&values);
    let expected = (-((big_n * n + n * n.saturating_sub(1)) as f64) * t / 2.0).exp()
        * (big_n as f64).powi(sigma.cycle_count() as i32);
    let sigmas = estimate.sigmas_from(expected);
    Ok(MartingaleReport {
        estimate,
        expected,
        sigmas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::{evaluate_auto, Group};
    use crate::partition::Partition;

    fn class(parts: &[usize]) -> CycleType {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn exact(parts: &[usize], nn: usize, t: f64) -> f64 {
        evaluate_auto(&class(parts), Group::U, nn as f64, t, 1e-13)
            .unwrap()
            .value
    }

    #[test]
    fn zero_time_is_identity() {
        let b = sample_brownian(&SimConfig::new(3, 0.0), 0).unwrap();
        assert_eq!(b, CMatrix::identity(3));
        let r = martingale_check(&Permutation::transposition(2, 0, 1), 2, 0.0, 10, 50, 1).unwrap();
        assert_eq!(r.estimate.mean, 2.0);
        assert_eq!(r.sigmas, 0.0);
    }

    #[test]
    fn paths_stay_unitary() {
        let cfg = SimConfig::new(4, 3.0).steps(500).time(TimeConvention::Raw);
        let b = sample_brownian(&cfg, 3).unwrap();
        assert!(b.unitarity_defect() < 1e-10);
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = SimConfig::new(3, 1.0).steps(20).samples(200).seed(42);
        let a = estimate_moment(&class(&[2]), &cfg).unwrap();
        let b = estimate_moment(&class(&[2]), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            sample_brownian(&cfg, 17).unwrap(),
            sample_brownian(&cfg, 17).unwrap()
        );
        let c = estimate_moment(&class(&[2]), &cfg.clone().seed(43)).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn first_moments_match_exact_values() {
        let cfg = SimConfig::new(4, 1.0).steps(50).samples(20_000).seed(7);
        let classes = [class(&[1]), class(&[2]), class(&[1, 1])];
        let res = estimate_moments(&classes, &cfg).unwrap();
        assert!(
            res[0].sigmas_from((-0.5f64).exp()).abs() < 4.0,
            "{:?}",
            res[0]
        );
        // e^{-t}(cosh(t/N) - (1/N)sinh(t/N)) is the closed form of tr(B)².
        let x = 0.25f64;
        let square = (-1.0f64).exp() * (x.cosh() - x * x.sinh());
        assert!((square - exact(&[1, 1], 4, 1.0)).abs() < 1e-12);
        assert!(
            res[1].sigmas_from(exact(&[2], 4, 1.0)).abs() < 4.0,
            "{:?}",
            res[1]
        );
        assert!(res[2].sigmas_from(square).abs() < 4.0, "{:?}", res[2]);
    }

    #[test]
    fn cube_moment_at_small_n() {
        let cfg = SimConfig::new(3, 0.5).steps(50).samples(20_000).seed(8);
        let r = estimate_moment(&class(&[3]), &cfg).unwrap();
        assert!(r.sigmas_from(exact(&[3], 3, 0.5)).abs() < 4.0, "{r:?}");
    }

    #[test]
    fn conjugation_leaves_estimates_unchanged() {
        let cfg = SimConfig::new(3, 1.0).steps(30).samples(5_000).seed(9);
        let mut rng = sample_stream(99, 0);
        let v = CMatrix::random_unitary(3, &mut rng);
        let plain: Vec<f64> = (0..cfg.samples as u64)
            .map(|i| sample_brownian(&cfg, i).unwrap().power_traces(2)[2].re / 3.0)
            .collect();
        let conj: Vec<f64> = (0..cfg.samples as u64)
            .map(|i| {
                let b = sample_brownian(&cfg, i).unwrap();
                v.mul(&b).mul(&v.adjoint()).power_traces(2)[2].re / 3.0
            })
            .collect();
        let (a, b) = (
            SimResult::from_values(&plain),
            SimResult::from_values(&conj),
        );
        assert!((a.mean - b.mean).abs() < 1e-10);
    }

    #[test]
    fn halving_the_step_changes_little() {
        let base = SimConfig::new(3, 1.0).samples(10_000).seed(12);
        let coarse = estimate_moment(&class(&[2]), &base.clone().steps(10)).unwrap();
        let fine = estimate_moment(&class(&[2]), &base.steps(20)).unwrap();
        let err = (coarse.stderr.powi(2) + fine.stderr.powi(2)).sqrt();
        assert!((coarse.mean - fine.mean).abs() < 4.0 * err);
    }

    #[test]
    fn martingale_on_two_points() {
        for s in [
            Permutation::identity(2),
            Permutation::transposition(2, 0, 1),
        ] {
            let r = martingale_check(&s, 2, 0.3, 30, 20_000, 5).unwrap();
            assert!(r.sigmas.abs() < 4.0, "{r:?}");
        }
    }

    #[test]
    fn bad_configs_are_rejected() {
        assert!(SimConfig::new(0, 1.0).validate().is_err());
        assert!(SimConfig::new(2, -1.0).validate().is_err());
        assert!(SimConfig::new(2, 1.0).steps(0).validate().is_err());
    }
}
