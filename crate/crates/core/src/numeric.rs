//! Small exact and compensated numeric helpers shared by the engines.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Binomial coefficient, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn rational_from_int(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

pub fn rational_from_biguint(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}

/// Nearest float to an exact rational.
pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_zero() {
            0.0
        } else if x > &BigRational::zero() {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    })
}

/// `x · e^{ln_scale}` without overflow in the intermediate: the binary
/// exponent of `x` is folded into the exponential.
pub fn scaled_to_f64(x: &BigRational, ln_scale: f64) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let shift = x.numer().bits() as i64 - x.denom().bits() as i64;
    let mantissa = if shift >= 0 {
        BigRational::new(x.numer().clone(), x.denom() << shift as u64)
    } else {
        BigRational::new(x.numer() << (-shift) as u64, x.denom().clone())
    };
    to_f64(&mantissa) * (ln_scale + shift as f64 * std::f64::consts::LN_2).exp()
}

/// Neumaier compensated summation. Also reports the sum of absolute values,
/// which callers use to detect cancellation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn abs_total(&self) -> f64 {
        self.abs
    }
}

/// Evaluates `sum_k c[k] x^k` exactly.
pub fn horner(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c)
}
