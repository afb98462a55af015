//! Characters of the symmetric group and the closed formulas they give for
//! walk counts.
//!
//! Conventions: the character table is indexed by [`Partition::all`] order,
//! contents of a box `(i, j)` are `j - i`, and `Ω = Σ_σ N^{ℓ(σ)} σ` is the
//! element whose character values [`omega_character`] returns.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{budget, Error, Result};
use crate::laurent::LaurentPolyN;
use crate::numeric::{binomial, factorial, rational_from_biguint, rational_from_int};
use crate::partition::{CycleType, Partition};
use crate::perm::Permutation;

type CharKey = (Vec<usize>, Vec<usize>);

fn char_cache() -> &'static Mutex<HashMap<CharKey, i64>> {
    static CACHE: OnceLock<Mutex<HashMap<CharKey, i64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `χ^λ(μ)` by the Murnaghan–Nakayama rule, removing border strips of the
/// largest remaining cycle length. Memoized across calls and threads.
pub fn mn_character(lambda: &Partition, mu: &CycleType) -> Result<i64> {
    if lambda.size() != mu.size() {
        return Err(Error::DegreeMismatch {
            left: lambda.size(),
            right: mu.size(),
        });
    }
    Ok(mn_rec(lambda.parts(), mu.parts()))
}

fn mn_rec(lambda: &[usize], mu: &[usize]) -> i64 {
    let Some((&r, rest)) = mu.split_first() else {
        return 1;
    };
    let key = (lambda.to_vec(), mu.to_vec());
    if let Some(&v) = char_cache().lock().expect("cache poisoned").get(&key) {
        return v;
    }
    // Beta numbers λ_i + (L - 1 - i): removing an r-strip moves one bead
    // from b to b - r, with sign (-1)^(beads jumped over).
    let len = lambda.len();
    let beta: Vec<usize> = lambda
        .iter()
        .enumerate()
        .map(|(i, &p)| p + len - 1 - i)
        .collect();
    let mut total = 0i64;
    for (i, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let jumped = beta.iter().filter(|&&x| x > b - r && x < b).count();
        let mut next = beta.clone();
        next[i] = b - r;
        next.sort_unstable_by(|a, b| b.cmp(a));
        let shape: Vec<usize> = next
            .iter()
            .enumerate()
            .map(|(j, &x)| x - (len - 1 - j))
            .filter(|&p| p > 0)
            .collect();
        let v = mn_rec(&shape, rest);
        total += if jumped % 2 == 0 { v } else { -v };
    }
    char_cache()
        .lock()
        .expect("cache poisoned")
        .insert(key, total);
    total
}

/// Character table `table[λ][μ]`, both indexed in [`Partition::all`] order.
pub fn character_table(n: usize) -> Vec<Vec<i64>> {
    let parts = Partition::all(n);
    parts
        .iter()
        .map(|l| parts.iter().map(|m| mn_rec(l.parts(), m.parts())).collect())
        .collect()
}

/// `χ^λ(id)` by the hook length formula.
pub fn dimension(lambda: &Partition) -> BigUint {
    let conj = lambda.conjugate();
    let mut hooks = BigUint::one();
    for (i, &row) in lambda.parts().iter().enumerate() {
        for j in 0..row {
            hooks *= (row - j) + (conj.parts()[j] - i) - 1;
        }
    }
    factorial(lambda.size() as u64) / hooks
}

/// `e_r` of the contents of `λ`, which is `χ^λ(Σ_r)/χ^λ(id)` where `Σ_r` sums
/// the permutations at distance `r` from the identity.
pub fn content_sym(lambda: &Partition, r: usize) -> Result<BigInt> {
    let n = lambda.size();
    if n == 0 || r > n - 1 {
        return Err(Error::OutOfRange(format!("r={r} for a partition of {n}")));
    }
    Ok(elementary(&lambda.contents(), r))
}

fn elementary(values: &[i64], r: usize) -> BigInt {
    let mut e = vec![BigInt::zero(); r + 1];
    e[0] = BigInt::one();
    for &v in values {
        for j in (1..=r).rev() {
            let prev = e[j - 1].clone();
            e[j] += prev * v;
        }
    }
    e.swap_remove(r)
}

/// `χ^μ(Ω) = χ^μ(id) Π_boxes (N + c)` as a polynomial in `N`.
pub fn omega_character(mu: &Partition) -> LaurentPolyN {
    let mut p = LaurentPolyN::constant(rational_from_biguint(&dimension(mu)));
    for c in mu.contents() {
        let factor = &LaurentPolyN::n() + &LaurentPolyN::constant(rational_from_int(c));
        p = &p * &factor;
    }
    p
}

/// Eigenvalue `c₂(μ) = nN + 2 Σ contents` of the Casimir on the isotypic
/// component `μ`.
pub fn casimir_eigenvalue(mu: &Partition) -> LaurentPolyN {
    let n = mu.size() as i64;
    let s: i64 = mu.contents().iter().sum();
    &LaurentPolyN::monomial(1, rational_from_int(n))
        + &LaurentPolyN::constant(rational_from_int(2 * s))
}

/// `Σ_d S(σ, k, d) N^{-2d}` for `σ` of class `lambda`, from the character
/// expansion of `Σ_paths N^{ℓ(end)}` over walks of length `k`.
pub fn char_sum_s(lambda: &CycleType, k: usize) -> LaurentPolyN {
    let n = lambda.size();
    let mut acc = LaurentPolyN::zero();
    for mu in Partition::all(n) {
        let chi = mn_rec(mu.parts(), lambda.parts());
        if chi == 0 {
            continue;
        }
        let s: i64 = mu.contents().iter().sum();
        let weight = BigInt::from(chi) * BigInt::from(s).pow(k as u32);
        if weight.is_zero() {
            continue;
        }
        acc = &acc + &omega_character(&mu).scale(&BigRational::from_integer(weight));
    }
    let n_fact = rational_from_biguint(&factorial(n as u64));
    let out = acc
        .scale(&(BigRational::one() / n_fact))
        .shift(-((lambda.len() + k) as i64));
    debug_assert!(out.has_natural_coefficients());
    debug_assert!(out.terms().all(|(e, _)| e <= 0 && e % 2 == 0));
    out
}

/// Reads `S(σ, k, d)` off [`char_sum_s`].
pub fn char_s(lambda: &CycleType, k: usize, d: usize) -> BigUint {
    char_sum_s(lambda, k)
        .integer_coeff(-2 * d as i64)
        .and_then(|v| v.to_biguint())
        .expect("walk counts are natural numbers")
}

/// Unsigned Stirling number of the first kind: permutations of `n` points
/// with `k` cycles.
pub fn stirling_first_unsigned(n: usize, k: usize) -> BigUint {
    let mut row = vec![BigUint::one()];
    for m in 0..n {
        let mut next = vec![BigUint::zero(); m + 2];
        for (j, v) in row.iter().enumerate() {
            next[j + 1] += v;
            next[j] += v * m;
        }
        row = next;
    }
    row.get(k).cloned().unwrap_or_default()
}

/// Signed Stirling number `s(n, k) = (-1)^{n-k} [n k]`, zero for `k < 0`.
pub fn stirling_first_signed(n: usize, k: i64) -> BigInt {
    if k < 0 || k as usize > n {
        return BigInt::zero();
    }
    let v = BigInt::from(stirling_first_unsigned(n, k as usize));
    if (n as i64 - k) % 2 == 0 {
        v
    } else {
        -v
    }
}

/// `S((1…n), k, d)` by the alternating Stirling-number sum over hooks.
pub fn s_ncycle_closed(n: usize, k: usize, d: usize) -> BigUint {
    assert!(n >= 1, "cycle of length zero");
    let Some(dist) = (n - 1 + 2 * d).checked_sub(k) else {
        return BigUint::zero();
    };
    let mut total = BigRational::zero();
    for r in 0..n {
        let s = n - 1 - r;
        let x = BigRational::new(
            BigInt::from(n as i64 * (s as i64 - r as i64)),
            BigInt::from(2),
        );
        // 0^0 = 1 for the k = 0 term with s = r.
        let xk = if k == 0 {
            BigRational::one()
        } else {
            x.pow(k as i32)
        };
        let mut inner = BigInt::zero();
        for l in 0..=dist {
            let m = dist - l;
            let a = stirling_first_signed(s + 1, s as i64 + 1 - l as i64);
            let b = stirling_first_signed(r + 1, r as i64 + 1 - m as i64);
            let term = a * b;
            inner += if (l + r) % 2 == 0 { term } else { -term };
        }
        let denom = BigInt::from(factorial(r as u64) * factorial(s as u64));
        total += xk * BigRational::new(inner, denom);
    }
    total /= BigRational::from_integer(BigInt::from(n));
    assert!(
        total.is_integer() && !total.is_negative(),
        "closed form returned {total} for n={n}, k={k}, d={d}"
    );
    total.to_integer().to_biguint().expect("nonnegative")
}

/// `c_{n,p}`: factorizations of an `n`-cycle into `p` transpositions.
pub fn c_np(n: usize, p: usize) -> BigUint {
    assert!(n >= 1, "cycle of length zero");
    if p + 1 < n || (p + 1 - n) % 2 == 1 {
        return BigUint::zero();
    }
    // n^p/n! Σ_r (-1)^r C(n-1,r) ((n-1)/2 - r)^p, with halves cleared:
    // ((n-1)/2 - r)^p = (n-1-2r)^p / 2^p.
    let mut sum = BigInt::zero();
    for r in 0..n {
        let term = BigInt::from(binomial(n as u64 - 1, r as u64))
            * BigInt::from(n as i64 - 1 - 2 * r as i64).pow(p as u32);
        sum += if r % 2 == 0 { term } else { -term };
    }
    let num = sum * BigInt::from(n).pow(p as u32);
    let den = BigInt::from(factorial(n as u64)) << p;
    let q = BigRational::new(num, den);
    assert!(q.is_integer() && !q.is_negative(), "c_np({n},{p}) = {q}");
    q.to_integer().to_biguint().expect("nonnegative")
}

/// Coefficients of `Σ_p c_{n,p} x^p / p!` and of the series of
/// `e^{n(n-1)x/2} (1 - e^{-nx})^{n-1} / n!`, both up to `x^order`.
pub fn cycle_factorization_egf(n: usize, order: usize) -> (Vec<BigRational>, Vec<BigRational>) {
    let lhs = (0..=order)
        .map(|p| rational_from_biguint(&c_np(n, p)) / rational_from_biguint(&factorial(p as u64)))
        .collect();
    // Expand (1 - e^{-nx})^{n-1} = Σ_r (-1)^r C(n-1,r) e^{-rnx}; each
    // exponential e^{ax} contributes a^p/p!.
    let mut rhs = vec![BigRational::zero(); order + 1];
    let nf = rational_from_biguint(&factorial(n as u64));
    for r in 0..n {
        let a = BigRational::new(
            BigInt::from(n as i64 * (n as i64 - 1) - 2 * r as i64 * n as i64),
            BigInt::from(2),
        );
        let coef = rational_from_biguint(&binomial(n as u64 - 1, r as u64)) / &nf;
        let coef = if r % 2 == 0 { coef } else { -coef };
        let mut pw = BigRational::one();
        for (p, slot) in rhs.iter_mut().enumerate() {
            if p > 0 {
                pw = pw * &a / BigRational::from_integer(BigInt::from(p));
            }
            *slot += &coef * &pw;
        }
    }
    (lhs, rhs)
}

/// Both sides of the `d`-exponential generating function of
/// `S((1…n), k, d)`: the truncated series `Σ_{k,d≤d_max} (-t)^k S / (d! N^{2d})`
/// and the closed hook sum
/// `(-1)^n/n Σ_{r+s=n-1} e^{x²/N²} (x)_{s+1} (-x)_{r+1} / (r! s! x²)` with
/// `x = nt(s-r)/2`.
pub fn ncycle_d_generating_function(n: usize, t: f64, big_n: f64, d_max: usize) -> (f64, f64) {
    let mut series = 0.0;
    let nf = big_n;
    for d in 0..=d_max {
        let mut inv_d_fact = 1.0;
        for j in 1..=d {
            inv_d_fact /= j as f64;
        }
        let lo = d;
        let hi = 2 * d + n - 1;
        for k in lo..=hi {
            let s = s_ncycle_closed(n, k, d);
            if s.is_zero() {
                continue;
            }
            let sf = s.to_f64().unwrap_or(f64::INFINITY);
            series += (-t).powi(k as i32) * sf * inv_d_fact / nf.powi(2 * d as i32);
        }
    }
    let mut closed = 0.0;
    for r in 0..n {
        let s = n - 1 - r;
        let x = n as f64 * t * (s as f64 - r as f64) / 2.0;
        // (x)_{s+1}/x and (-x)_{r+1}/x with the x = 0 limits.
        let falling_over_x = |x: f64, m: usize| -> f64 { (1..m).map(|j| x - j as f64).product() };
        let a = falling_over_x(x, s + 1);
        let b = -falling_over_x(-x, r + 1);
        let mut fact = 1.0;
        for j in 1..=r {
            fact *= j as f64;
        }
        for j in 1..=s {
            fact *= j as f64;
        }
        closed += (x * x / (nf * nf)).exp() * a * b / fact;
    }
    closed *= if n % 2 == 0 { 1.0 } else { -1.0 } / n as f64;
    (series, closed)
}

/// Checks `Π_{i=1}^n (z + X_i) = Σ_σ z^{ℓ(σ)} σ` in the group algebra, with
/// `X_i = Σ_{j<i} (j i)` the Jucys–Murphy elements.
pub fn jm_identity_check(n: usize) -> Result<bool> {
    let size = factorial(n as u64).to_u128().unwrap_or(u128::MAX);
    budget("group algebra dimension", size, 5040)?;
    let perms = Permutation::all(n);
    let dim = perms.len();
    // elements[rank] = polynomial coefficients in z, index = degree
    let mut elem = vec![vec![0i64; n + 1]; dim];
    elem[Permutation::identity(n).rank()][0] = 1;
    for i in 0..n {
        let mut next = vec![vec![0i64; n + 1]; dim];
        for (g, poly) in perms.iter().zip(&elem) {
            if poly.iter().all(|&c| c == 0) {
                continue;
            }
            let gr = g.rank();
            for deg in 0..n {
                next[gr][deg + 1] += poly[deg];
            }
            for j in 0..i {
                let mut h = g.clone();
                h.mul_transposition_in_place(j, i);
                let hr = h.rank();
                for deg in 0..=n {
                    next[hr][deg] += poly[deg];
                }
            }
        }
        elem = next;
    }
    Ok(perms.iter().zip(&elem).all(|(g, poly)| {
        let l = g.cycle_count();
        poly.iter()
            .enumerate()
            .all(|(deg, &c)| c == i64::from(deg == l))
    }))
}

/// `Σ_λ χ^λ(σ) χ^λ(Ω) / n!` at integer `N`, which must equal `N^{ℓ(σ)}`.
pub fn schur_identity_value(sigma: &CycleType, big_n: i64) -> BigRational {
    let n = sigma.size();
    let nn = rational_from_int(big_n);
    let mut acc = BigRational::zero();
    for lambda in Partition::all(n) {
        let chi = mn_rec(lambda.parts(), sigma.parts());
        acc += omega_character(&lambda).eval(&nn) * rational_from_int(chi);
    }
    acc / rational_from_biguint(&factorial(n as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class_walk::count_s;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn known_character_values() {
        for n in 1..=6 {
            for mu in Partition::all(n) {
                assert_eq!(mn_character(&Partition::row(n), &mu).unwrap(), 1);
            }
            for r in 0..n {
                let hook = Partition::hook(n, r).unwrap();
                let expected = if r % 2 == 0 { 1 } else { -1 };
                assert_eq!(mn_character(&hook, &Partition::row(n)).unwrap(), expected);
            }
        }
        assert_eq!(mn_character(&p(&[2, 1]), &p(&[1, 1, 1])).unwrap(), 2);
        assert!(mn_character(&p(&[2]), &p(&[1])).is_err());
    }

    #[test]
    fn column_orthogonality() {
        for n in 1..=7 {
            let parts = Partition::all(n);
            let table = character_table(n);
            let nf = factorial(n as u64);
            for (a, pa) in parts.iter().enumerate() {
                for b in 0..parts.len() {
                    let s: i64 = table.iter().map(|row| row[a] * row[b]).sum();
                    let expected = if a == b {
                        (&nf / pa.class_size()).to_i64().unwrap()
                    } else {
                        0
                    };
                    assert_eq!(s, expected);
                }
            }
        }
    }

    #[test]
    fn dimension_matches_character_at_identity() {
        for n in 1..=8 {
            for l in Partition::all(n) {
                let chi = mn_character(&l, &Partition::column(n)).unwrap();
                assert_eq!(BigUint::from(chi as u64), dimension(&l));
            }
        }
    }

    #[test]
    fn content_symmetric_functions() {
        assert_eq!(content_sym(&p(&[2]), 1).unwrap(), BigInt::from(1));
        assert_eq!(content_sym(&p(&[1, 1]), 1).unwrap(), BigInt::from(-1));
        assert_eq!(content_sym(&p(&[2, 1]), 1).unwrap(), BigInt::from(0));
        assert!(content_sym(&p(&[2, 1]), 3).is_err());
        // Against the class sum at distance r computed from characters.
        for n in 1..=6 {
            for l in Partition::all(n) {
                let dim = mn_character(&l, &Partition::column(n)).unwrap();
                for r in 0..n {
                    let class_sum: BigInt = Partition::all(n)
                        .iter()
                        .filter(|m| n - m.len() == r)
                        .map(|m| BigInt::from(m.class_size()) * mn_character(&l, m).unwrap())
                        .sum();
                    assert_eq!(class_sum, content_sym(&l, r).unwrap() * dim);
                }
            }
        }
    }

    #[test]
    fn omega_and_casimir_examples() {
        assert_eq!(omega_character(&p(&[1])), LaurentPolyN::n());
        assert_eq!(omega_character(&p(&[2])).to_string(), "N^2 + N");
        assert!(omega_character(&p(&[1, 1]))
            .eval(&rational_from_int(1))
            .is_zero());
        assert_eq!(casimir_eigenvalue(&p(&[1])).to_string(), "N");
        assert_eq!(casimir_eigenvalue(&p(&[2])).to_string(), "2*N + 2");
        assert_eq!(casimir_eigenvalue(&p(&[1, 1])).to_string(), "2*N - 2");
    }

    #[test]
    fn char_sum_examples() {
        let two = char_sum_s(&p(&[2]), 3);
        assert_eq!(two.to_string(), "N^-2");
        assert_eq!(char_sum_s(&p(&[1, 1, 1]), 1).to_string(), "3*N^-2");
        for n in 1..=5 {
            for l in Partition::all(n) {
                for k in 0..=4 {
                    let total = char_sum_s(&l, k).eval(&rational_from_int(1));
                    let pairs = (n * (n - 1) / 2) as i64;
                    assert_eq!(total, rational_from_int(BigInt::from(pairs).pow(k as u32)));
                }
            }
        }
    }

    #[test]
    fn char_route_matches_class_walk() {
        for n in 1..=5 {
            for l in Partition::all(n) {
                for k in 0..=6 {
                    for d in 0..=k {
                        assert_eq!(char_s(&l, k, d), count_s(&l, k, d), "{l} k={k} d={d}");
                    }
                }
            }
        }
    }

    #[test]
    fn stirling_numbers() {
        assert_eq!(stirling_first_unsigned(3, 2), BigUint::from(3u32));
        assert_eq!(stirling_first_unsigned(5, 5), BigUint::one());
        assert_eq!(stirling_first_unsigned(4, 0), BigUint::zero());
        assert_eq!(stirling_first_unsigned(0, 0), BigUint::one());
        // Elementary symmetric form.
        for n in 1..=8 {
            let ones: Vec<i64> = (1..n as i64).collect();
            for k in 1..=n {
                assert_eq!(
                    BigInt::from(stirling_first_unsigned(n, k)),
                    elementary(&ones, n - k)
                );
            }
        }
        assert_eq!(stirling_first_signed(3, 2), BigInt::from(-3));
        assert_eq!(stirling_first_signed(3, -1), BigInt::zero());
    }

    #[test]
    fn closed_cycle_counts() {
        assert_eq!(s_ncycle_closed(3, 2, 0), BigUint::from(3u32));
        assert_eq!(s_ncycle_closed(3, 4, 1), BigUint::from(27u32));
        assert_eq!(s_ncycle_closed(1, 0, 0), BigUint::one());
        for n in 1..=6 {
            for k in 0..=7 {
                for d in 0..=k {
                    assert_eq!(s_ncycle_closed(n, k, d), count_s(&Partition::row(n), k, d));
                }
            }
        }
    }

    #[test]
    fn cycle_factorizations() {
        assert_eq!(c_np(4, 3), BigUint::from(16u32));
        assert_eq!(c_np(3, 4), BigUint::from(27u32));
        assert_eq!(c_np(3, 3), BigUint::zero());
        assert_eq!(c_np(1, 0), BigUint::one());
        for n in 1..=7 {
            let n2 = BigUint::from(n as u64);
            assert_eq!(
                c_np(n, n - 1),
                if n >= 2 {
                    n2.pow(n as u32 - 2)
                } else {
                    BigUint::one()
                }
            );
            for d in 0..=2 {
                assert_eq!(c_np(n, n - 1 + 2 * d), s_ncycle_closed(n, n - 1 + 2 * d, d));
            }
            let (lhs, rhs) = cycle_factorization_egf(n, 12);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn d_generating_function() {
        for n in 1..=5 {
            for (t, big_n) in [(0.3, 2.0), (1.0, 3.0)] {
                let (series, closed) = ncycle_d_generating_function(n, t, big_n, 40);
                let scale = closed.abs().max(1.0);
                assert!(
                    (series - closed).abs() < 1e-9 * scale,
                    "n={n}: {series} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn jucys_murphy_identity() {
        for n in 1..=6 {
            assert!(jm_identity_check(n).unwrap());
        }
        assert!(jm_identity_check(8).is_err());
    }

    #[test]
    fn schur_at_identity() {
        for n in 1..=5 {
            for s in Partition::all(n) {
                for big_n in 1..=4 {
                    let expected = rational_from_int(BigInt::from(big_n).pow(s.len() as u32));
                    assert_eq!(schur_identity_value(&s, big_n), expected);
                }
            }
        }
    }
}
