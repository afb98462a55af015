//! The cross-oracle and identity suite behind `verify-all`: one check per
//! acceptance criterion, each at a quick or a full budget.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::Serialize;

use crate::class_walk::{
    brute_force_defects, count_s, transfer_matrix, transition_counts, ClassWalk,
};
use crate::coverings::{analytic_expectation, genus_estimator, genus_target};
use crate::error::Result;
use crate::expansion::{
    evaluate_auto, fourier_moment, moment_expansion, variance_expansion, Group,
};
use crate::free_prob::{
    chi_residual, limit_moment, limit_moment_series_exact, mixed_cumulant, moment_from_cumulants,
    Word,
};
use crate::mc_sim::{estimate_moments, martingale_check, variance_slope, SimConfig};
use crate::noncross::{
    count_by_type, count_decreasing_paths, enumerate_nc, kreweras, s_cycle_zero_defect, NCPartition,
};
use crate::numeric::{binomial, factorial, horner, rational_from_biguint};
use crate::partition::{CycleType, Partition};
use crate::perm::Permutation;
use crate::sym_char::{c_np, char_s, cycle_factorization_egf, jm_identity_check, s_ncycle_closed};
use crate::tensor_rep::{casimir_identity_check, LieGroup, DEFAULT_MAX_DIM};

/// Budget of a verification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// Reduced ranges and sample counts; seconds.
    Quick,
    /// The acceptance budgets; the Monte Carlo checks take minutes.
    Full,
}

/// Outcome of one criterion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    /// Number of individual comparisons made.
    pub comparisons: usize,
    /// Up to a few failing comparisons, or an error message.
    pub failures: Vec<String>,
    pub seconds: f64,
}

/// Criterion ids and names, in order.
pub const CRITERIA: [(usize, &str); 11] = [
    (1, "worked-example closed forms"),
    (2, "triple-oracle walk counts"),
    (3, "closed-form count tables"),
    (4, "structural identities"),
    (5, "Casimir operator identities"),
    (6, "Fourier oracle"),
    (7, "factorization and variance"),
    (8, "free probability limit"),
    (9, "Monte Carlo moments"),
    (10, "genus expansion"),
    (11, "non-crossing partitions"),
];

const MAX_REPORTED: usize = 5;

#[derive(Default)]
struct Tally {
    comparisons: usize,
    failures: Vec<String>,
    failed: usize,
}

impl Tally {
    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.comparisons += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_REPORTED {
                self.failures.push(what());
            }
        }
    }
}

/// Runs criterion `id` (1 to 11).
pub fn run(id: usize, scale: Scale) -> Option<Check> {
    let &(id, name) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let mut tally = Tally::default();
    let full = scale == Scale::Full;
    let outcome = match id {
        1 => closed_forms(&mut tally, full),
        2 => triple_oracle(&mut tally, full),
        3 => count_tables(&mut tally, full),
        4 => structural(&mut tally, full),
        5 => casimir(&mut tally, full),
        6 => fourier(&mut tally, full),
        7 => factorization(&mut tally, full),
        8 => free_probability(&mut tally, full),
        9 => monte_carlo(&mut tally, full),
        10 => genus(&mut tally, full),
        _ => non_crossing(&mut tally, full),
    };
    if let Err(e) = outcome {
        tally.failed += 1;
        tally.failures.push(format!("error: {e}"));
    }
    if tally.failed > tally.failures.len() {
        tally
            .failures
            .push(format!("{} more", tally.failed - tally.failures.len()));
    }
    Some(Check {
        id,
        name,
        passed: tally.failed == 0 && tally.comparisons > 0,
        comparisons: tally.comparisons,
        failures: tally.failures,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs every criterion in order.
pub fn run_all(scale: Scale) -> Vec<Check> {
    CRITERIA
        .iter()
        .filter_map(|&(id, _)| run(id, scale))
        .collect()
}

fn class(parts: &[usize]) -> CycleType {
    Partition::new(parts.to_vec()).expect("positive parts")
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// Bivariate series: `(power of t, power of N) -> coefficient`.
type Series = BTreeMap<(usize, i64), BigRational>;

fn add_term(s: &mut Series, k: usize, e: i64, c: BigRational) {
    let slot = s.entry((k, e)).or_insert_with(BigRational::zero);
    *slot += c;
    if slot.is_zero() {
        s.remove(&(k, e));
    }
}

/// Adds `c N^shift · f(a t / N)` up to `t^order`, where `f` is `cosh - 1`
/// (`odd = false`) or `sinh` (`odd = true`).
fn add_hyperbolic(s: &mut Series, order: usize, a: i64, shift: i64, odd: bool, c: &BigRational) {
    for k in 1..=order {
        if (k % 2 == 1) == odd {
            let coef = c * BigRational::from_integer(BigInt::from(a).pow(k as u32))
                / rational_from_biguint(&factorial(k as u64));
            add_term(s, k, shift - k as i64, coef);
        }
    }
}

/// `e^{nt/2} E[Π tr_N(B^{m_i})]` for the six classes with `n ≤ 3`.
fn closed_form_series(parts: &[usize], order: usize) -> Series {
    let mut s = Series::new();
    let one = BigRational::one();
    let m1 = -BigRational::one();
    match parts {
        [1] => add_term(&mut s, 0, 0, one),
        [1, 1] => {
            add_term(&mut s, 0, 0, one.clone());
            add_hyperbolic(&mut s, order, 1, 0, false, &one);
            add_hyperbolic(&mut s, order, 1, -1, true, &m1);
        }
        [2] => {
            add_term(&mut s, 0, 0, one.clone());
            add_hyperbolic(&mut s, order, 1, 0, false, &one);
            add_hyperbolic(&mut s, order, 1, 1, true, &m1);
        }
        [1, 1, 1] => {
            add_term(&mut s, 0, 0, one);
            add_hyperbolic(&mut s, order, 3, 0, false, &q(1, 3));
            add_hyperbolic(&mut s, order, 3, -2, false, &q(2, 3));
            add_hyperbolic(&mut s, order, 3, -1, true, &m1);
        }
        [2, 1] => {
            add_term(&mut s, 0, 0, one.clone());
            add_hyperbolic(&mut s, order, 3, 0, false, &one);
            add_hyperbolic(&mut s, order, 3, 1, true, &q(-1, 3));
            add_hyperbolic(&mut s, order, 3, -1, true, &q(-2, 3));
        }
        [3] => {
            add_term(&mut s, 0, 0, one);
            add_hyperbolic(&mut s, order, 3, 2, false, &q(1, 3));
            add_hyperbolic(&mut s, order, 3, 0, false, &q(2, 3));
            add_hyperbolic(&mut s, order, 3, 1, true, &m1);
        }
        _ => unreachable!("closed forms are tabulated for n ≤ 3"),
    }
    s
}

fn expansion_series(lambda: &CycleType, order: usize) -> Series {
    // Defect d needs at least d steps, and at most (order + n)/2 is reachable.
    let d_max = (order + lambda.size()) / 2 + 1;
    let e = moment_expansion(lambda, Group::U, d_max);
    let mut s = Series::new();
    for d in 0..=d_max {
        for (k, c) in e.slice(d).into_iter().enumerate() {
            if k <= order && !c.is_zero() {
                add_term(&mut s, k, -2 * d as i64, c);
            }
        }
    }
    s
}

fn trimmed(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn closed_forms(t: &mut Tally, full: bool) -> Result<()> {
    let order = if full { 20 } else { 8 };
    for n in 1..=3 {
        for l in Partition::all(n) {
            let ok = closed_form_series(l.parts(), order) == expansion_series(&l, order);
            t.expect(ok, || {
                format!("closed form for {l} differs from the expansion")
            });
        }
    }
    let quoted: [(CycleType, usize, Vec<BigRational>); 4] = [
        (Partition::column(4), 1, vec![q(0, 1), q(-6, 1), q(3, 1)]),
        (
            Partition::column(4),
            2,
            vec![q(0, 1), q(0, 1), q(15, 1), q(-20, 1), q(5, 1)],
        ),
        (
            Partition::row(4),
            0,
            vec![q(1, 1), q(-6, 1), q(8, 1), q(-8, 3)],
        ),
        // Enumeration gives S((1234),k,1) = 20, 200, 640, 640 for k = 2..5.
        (
            Partition::row(4),
            1,
            vec![q(0, 1), q(0, 1), q(10, 1), q(-100, 3), q(80, 3), q(-16, 3)],
        ),
    ];
    for (l, d, want) in quoted {
        let got = trimmed(moment_expansion(&l, Group::U, d).slice(d));
        t.expect(got == want, || format!("{l} slice N^-{}: {got:?}", 2 * d));
    }
    Ok(())
}

fn triple_oracle(t: &mut Tally, full: bool) -> Result<()> {
    let (brute_n, brute_k) = if full { (5, 6) } else { (4, 4) };
    let (char_n, char_k) = if full { (6, 8) } else { (4, 5) };
    let (cyc_n, cyc_k) = if full { (7, 9) } else { (5, 6) };
    for n in 1..=brute_n {
        for l in Partition::all(n) {
            for k in 0..=brute_k {
                let hist = brute_force_defects(&l.representative(), k, 1 << 32)?;
                for d in 0..=(k + n) / 2 {
                    let counted = count_s(&l, k, d);
                    let brute = BigUint::from(hist.get(d).copied().unwrap_or(0));
                    t.expect(counted == brute, || {
                        format!("{l} k={k} d={d}: walk {counted} vs brute {brute}")
                    });
                }
            }
        }
    }
    for n in 1..=char_n {
        for l in Partition::all(n) {
            for k in 0..=char_k {
                for d in 0..=(k + n) / 2 {
                    let counted = count_s(&l, k, d);
                    let chars = char_s(&l, k, d);
                    t.expect(counted == chars, || {
                        format!("{l} k={k} d={d}: walk {counted} vs characters {chars}")
                    });
                }
            }
        }
    }
    for n in 1..=cyc_n {
        let l = Partition::row(n);
        for k in 0..=cyc_k {
            for d in 0..=(k + n) / 2 {
                let counted = count_s(&l, k, d);
                let closed = s_ncycle_closed(n, k, d);
                t.expect(counted == closed, || {
                    format!("({n}-cycle) k={k} d={d}: walk {counted} vs closed {closed}")
                });
            }
        }
    }
    Ok(())
}

fn count_tables(t: &mut Tally, full: bool) -> Result<()> {
    let (tree_n, formula_n, egf_n, zero_n) = if full { (8, 6, 7, 9) } else { (6, 5, 5, 7) };
    let egf_order = if full { 12 } else { 8 };
    for n in 1..=tree_n {
        let want = if n == 1 {
            BigUint::one()
        } else {
            BigUint::from(n).pow(n as u32 - 2)
        };
        let got = c_np(n, n - 1);
        t.expect(got == want, || {
            format!("c({n},{}) = {got}, expected {want}", n - 1)
        });
    }
    for n in 1..=formula_n {
        let nn = BigInt::from(n);
        let n2 = &nn * &nn;
        let want = (&n2 - 1) * Pow::pow(&nn, n as u32 + 1) / 24;
        let got = BigInt::from(c_np(n, n + 1));
        t.expect(got == want, || {
            format!("c({n},{}) = {got}, expected {want}", n + 1)
        });
        let want = (BigInt::from(5 * n as i64 - 7))
            * (&nn + 3)
            * (&nn + 2)
            * (&n2 - 1)
            * nn.pow(n as u32 + 3)
            / 5760;
        let got = BigInt::from(c_np(n, n + 3));
        t.expect(got == want, || {
            format!("c({n},{}) = {got}, expected {want}", n + 3)
        });
    }
    for n in 1..=egf_n {
        let (lhs, rhs) = cycle_factorization_egf(n, egf_order);
        t.expect(lhs == rhs, || {
            format!("generating function mismatch for n={n}")
        });
    }
    for n in 1..=zero_n {
        let l = Partition::row(n);
        for k in 0..=n + 2 {
            let want = rational_from_biguint(&binomial(n as u64, k as u64 + 1))
                * q(n as i64, 1).pow(k as i32 - 1);
            let got = rational_from_biguint(&count_s(&l, k, 0));
            t.expect(got == want, || {
                format!("S(({n}-cycle),{k},0) = {got}, expected {want}")
            });
        }
    }
    Ok(())
}

/// Figure of the `n = 4` class graph: `(from, to, count)`.
const FOUR_POINT_EDGES: [(&[usize], &[usize], u64); 10] = [
    (&[1, 1, 1, 1], &[2, 1, 1], 6),
    (&[2, 1, 1], &[1, 1, 1, 1], 1),
    (&[2, 1, 1], &[3, 1], 4),
    (&[2, 1, 1], &[2, 2], 1),
    (&[3, 1], &[2, 1, 1], 3),
    (&[3, 1], &[4], 3),
    (&[4], &[3, 1], 4),
    (&[4], &[2, 2], 2),
    (&[2, 2], &[2, 1, 1], 2),
    (&[2, 2], &[4], 4),
];

fn structural(t: &mut Tally, full: bool) -> Result<()> {
    let row_n = if full { 8 } else { 6 };
    let (sum_n, sum_k) = if full { (7, 8) } else { (5, 5) };
    let mm_n = if full { 5 } else { 3 };
    let jm_n = if full { 6 } else { 4 };
    for n in 1..=row_n {
        let m = transition_counts(n);
        let pairs = (n * (n - 1) / 2) as u64;
        for (i, row) in m.counts().iter().enumerate() {
            let total: u64 = row.iter().sum();
            t.expect(total == pairs, || format!("n={n} row {i} sums to {total}"));
        }
    }
    for n in 1..=sum_n {
        let walk = ClassWalk::new(n);
        let pairs = BigUint::from(n * (n - 1) / 2);
        for l in Partition::all(n) {
            let table = walk.path_count_table(&l, sum_k)?;
            for k in 0..=sum_k {
                let total: BigUint = (0..=(k + n) / 2).map(|d| table.get(k, d)).sum();
                let want = pairs.clone().pow(k as u32);
                t.expect(total == want, || {
                    format!("{l} k={k}: Σ_d S = {total}, expected {want}")
                });
            }
        }
    }
    for n in 1..=mm_n {
        for (tt, nn) in [(q(1, 1), q(1, 1)), (q(1, 2), q(3, 1))] {
            let plus = transfer_matrix(n, 1, &tt, &nn, 128, mm_n)?;
            let minus = transfer_matrix(n, -1, &tt, &nn, 128, mm_n)?;
            let dev = plus.product_identity_deviation(&minus)?;
            t.expect(dev < 1e-12, || {
                format!("n={n} t={tt} N={nn}: inverse product off by {dev:e}")
            });
        }
    }
    for n in 1..=jm_n {
        let ok = jm_identity_check(n)?;
        t.expect(ok, || format!("Jucys–Murphy identity fails at n={n}"));
    }
    let m = transition_counts(4);
    for (from, to, want) in FOUR_POINT_EDGES {
        let got = m.count(&class(from), &class(to));
        t.expect(got == want, || {
            format!("{from:?} -> {to:?}: {got}, expected {want}")
        });
    }
    Ok(())
}

fn casimir(t: &mut Tally, full: bool) -> Result<()> {
    let u_cases: &[(usize, usize)] = if full {
        &[(1, 2), (2, 2), (2, 3), (3, 2), (3, 3)]
    } else {
        &[(1, 2), (2, 2), (2, 3)]
    };
    let so_cases: &[(usize, usize)] = if full {
        &[(2, 3), (2, 4), (3, 3)]
    } else {
        &[(2, 3)]
    };
    let sp_n = if full { 3 } else { 2 };
    let mut cases = Vec::new();
    for &(n, nn) in u_cases {
        cases.push((LieGroup::U, n, nn));
        cases.push((LieGroup::SU, n, nn));
    }
    cases.extend(so_cases.iter().map(|&(n, nn)| (LieGroup::SO, n, nn)));
    for half in [1, 2] {
        cases.extend((1..=sp_n).map(|n| (LieGroup::Sp, n, half)));
    }
    for (g, n, nn) in cases {
        let r = casimir_identity_check(g, n, nn, DEFAULT_MAX_DIM)?;
        t.expect(r.holds, || {
            format!(
                "{g:?} n={n} N={nn}: deviation {} at {:?}",
                r.max_deviation, r.offending
            )
        });
    }
    Ok(())
}

fn fourier(t: &mut Tally, full: bool) -> Result<()> {
    let n_max = if full { 5 } else { 3 };
    for n in 1..=n_max {
        for l in Partition::all(n) {
            for nn in 1..=4u32 {
                for time in [0.25, 1.0] {
                    let f = fourier_moment(&l, Group::U, nn, time)?;
                    let e = evaluate_auto(&l, Group::U, f64::from(nn), time, 1e-13)?.value;
                    t.expect((f - e).abs() < 1e-10, || {
                        format!("{l} N={nn} t={time}: Fourier {f} vs expansion {e}")
                    });
                }
            }
        }
    }
    Ok(())
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn factorization(t: &mut Tally, full: bool) -> Result<()> {
    let (prod_n, var_n) = if full { (6, 4) } else { (4, 3) };
    for n in 2..=prod_n {
        for l in Partition::all(n).into_iter().filter(|l| l.len() >= 2) {
            let whole = trimmed(moment_expansion(&l, Group::U, 0).slice(0));
            let product = l
                .parts()
                .iter()
                .map(|&m| moment_expansion(&Partition::row(m), Group::U, 0).slice(0))
                .fold(vec![BigRational::one()], |acc, s| poly_mul(&acc, &s));
            t.expect(whole == trimmed(product), || {
                format!("{l}: leading slice does not factorize")
            });
        }
    }
    for n in 1..=var_n {
        for l in Partition::all(n) {
            let v = variance_expansion(&l, 0);
            t.expect(v.slices[0].iter().all(Zero::is_zero), || {
                format!("{l}: variance has an N^0 term")
            });
        }
    }
    Ok(())
}

fn free_probability(t: &mut Tally, full: bool) -> Result<()> {
    let (moment_n, word_len, slice_n) = if full { (12, 6, 9) } else { (8, 4, 6) };
    for n in 1..=moment_n {
        for time in [0.5, 1.0, 2.0] {
            let a = limit_moment(n, time);
            let b = moment_from_cumulants(n, time)?;
            t.expect((a - b).abs() < 1e-12, || {
                format!("n={n} t={time}: moment {a} vs cumulants {b}")
            });
        }
    }
    for len in 2..=word_len {
        for mask in 1..(1u32 << len) - 1 {
            let letters: Vec<usize> = (0..len).map(|i| ((mask >> i) & 1) as usize).collect();
            let w = Word::new(letters, vec![0.7, 1.3])?;
            let c = mixed_cumulant(&w)?;
            t.expect(c.abs() < 1e-10, || format!("mixed cumulant of {w} is {c}"));
        }
    }
    for time in [0.0, 1.0, 4.0] {
        for k in 0..8 {
            let z = Complex64::from_polar(0.05, k as f64 * std::f64::consts::FRAC_PI_4);
            let chi = z / (z + 1.0) * (time * (z + 0.5)).exp();
            let a = chi.norm();
            let n_cut = ((1e-14 * (1.0 - a)).ln() / a.ln()).ceil() as usize;
            let r = chi_residual(time, z, 0.1, n_cut, 1e-14)?.norm();
            t.expect(r < 1e-8, || {
                format!("t={time} z={z}: subordination residual {r:e}")
            });
        }
    }
    for n in 1..=slice_n {
        let slice = moment_expansion(&Partition::row(n), Group::U, 0).slice(0);
        // Both sides are polynomials of degree < n; agreeing at n points
        // makes them equal.
        for j in 0..n as i64 {
            let x = q(j + 1, 3);
            let a = limit_moment_series_exact(n, &x);
            let b = horner(&slice, &x);
            t.expect(a == b, || {
                format!("n={n}: limit {a} vs expansion {b} at t={x}")
            });
        }
    }
    Ok(())
}

fn monte_carlo(t: &mut Tally, full: bool) -> Result<()> {
    let (samples, steps) = if full { (100_000, 1000) } else { (2_000, 100) };
    let classes = [class(&[1]), class(&[2]), class(&[3])];
    let cfg = SimConfig::new(8, 1.0).steps(steps).samples(samples).seed(1);
    let results = estimate_moments(&classes, &cfg)?;
    for (l, r) in classes.iter().zip(&results) {
        let exact = evaluate_auto(l, Group::U, 8.0, 1.0, 1e-14)?.value;
        let sig = r.sigmas_from(exact);
        t.expect(sig.abs() < 3.0, || {
            format!("{l}: estimate {} ± {} vs exact {exact}", r.mean, r.stderr)
        });
        if full {
            let rel = r.stderr / exact.abs().max(1.0);
            t.expect(rel < 0.01, || format!("{l}: stderr {} too large", r.stderr));
        }
    }
    let mart_samples = if full { 100_000 } else { 5_000 };
    for s in [
        Permutation::identity(2),
        Permutation::transposition(2, 0, 1),
    ] {
        let r = martingale_check(&s, 2, 0.3, 100, mart_samples, 2)?;
        t.expect(r.sigmas.abs() < 3.0, || {
            format!(
                "martingale from {s}: {} ± {} vs {}",
                r.estimate.mean, r.estimate.stderr, r.expected
            )
        });
    }
    let (slope_samples, slope_steps) = if full { (2_000, 50) } else { (1_000, 30) };
    let cfg = SimConfig::new(4, 1.0)
        .steps(slope_steps)
        .samples(slope_samples)
        .seed(3);
    let slope = variance_slope(&class(&[1]), &[4, 8, 16], &cfg)?;
    t.expect((slope + 2.0).abs() < 0.4, || {
        format!("variance slope {slope}")
    });
    Ok(())
}

fn genus(t: &mut Tally, full: bool) -> Result<()> {
    let n_max = if full { 4 } else { 3 };
    for n in 1..=n_max {
        for l in Partition::all(n) {
            for nn in 1..=3 {
                for time in [0.25, 1.0] {
                    let a = analytic_expectation(&l, nn, time)?;
                    let b = genus_target(&l, nn, time)?;
                    t.expect((a - b).abs() < 1e-10, || {
                        format!("{l} N={nn} t={time}: Poisson sum {a} vs moment {b}")
                    });
                }
            }
        }
    }
    let samples = if full { 1_000_000 } else { 50_000 };
    let r = genus_estimator(&class(&[3]), 2, 0.5, samples, 4)?;
    t.expect(r.sigmas_away.abs() < 3.0, || {
        format!(
            "genus estimator {} ± {} vs {}",
            r.estimate.mean, r.estimate.stderr, r.exact
        )
    });
    Ok(())
}

fn catalan(n: usize) -> BigUint {
    binomial(2 * n as u64, n as u64) / BigUint::from(n + 1)
}

fn non_crossing(t: &mut Tally, full: bool) -> Result<()> {
    let (enum_n, path_n) = if full { (12, 8) } else { (8, 6) };
    let p: NCPartition = "{1,3,12}{2}{4,8,9}{5,6,7}{10,11}".parse()?;
    let k = kreweras(&p).to_string();
    t.expect(k == "{1,2}{3,9,11}{4,7}{5}{6}{8}{10}{12}", || {
        format!("Kreweras complement {k}")
    });
    for n in 1..=enum_n {
        let count = BigUint::from(enumerate_nc(n)?.len());
        let want = catalan(n);
        t.expect(count == want, || {
            format!("|NC({n})| = {count}, expected {want}")
        });
        let mut by_type = BigUint::zero();
        for l in Partition::all(n) {
            let mut s = vec![0; n];
            for &m in l.parts() {
                s[m - 1] += 1;
            }
            by_type += count_by_type(n, &s)?;
        }
        t.expect(by_type == want, || {
            format!("type counts for n={n} sum to {by_type}")
        });
    }
    for n in 1..=path_n {
        for k in 0..=n {
            let paths = count_decreasing_paths(n, k)?;
            let formula = s_cycle_zero_defect(n, k);
            let walks = count_s(&Partition::row(n), k, 0);
            t.expect(paths == formula && formula == walks, || {
                format!("n={n} k={k}: paths {paths}, formula {formula}, walks {walks}")
            });
        }
    }
    Ok(())
}
