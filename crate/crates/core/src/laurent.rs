//! Laurent polynomials in a formal variable `N` with exact rational
//! coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::numeric::to_f64;

/// `Σ_e c_e N^e`, finitely supported, zero coefficients never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPolyN {
    coeffs: BTreeMap<i64, BigRational>,
}

impl LaurentPolyN {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, BigRational::one())
    }

    /// The variable `N`.
    pub fn n() -> Self {
        Self::monomial(1, BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(exp: i64, c: BigRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(exp, c);
        }
        LaurentPolyN { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `N^exp`.
    pub fn coeff(&self, exp: i64) -> BigRational {
        self.coeffs
            .get(&exp)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Multiplies by `N^shift`.
    pub fn shift(&self, shift: i64) -> Self {
        LaurentPolyN {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&e, c)| (e + shift, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPolyN {
            coeffs: self.coeffs.iter().map(|(&e, v)| (e, v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    fn add_term(&mut self, exp: i64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(exp).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    /// Exact value at a nonzero rational `N`.
    pub fn eval(&self, n: &BigRational) -> BigRational {
        assert!(!n.is_zero(), "Laurent polynomial evaluated at N = 0");
        self.coeffs
            .iter()
            .map(|(&e, c)| c * n.pow(e as i32))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn eval_f64(&self, n: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&e, c)| to_f64(c) * n.powi(e as i32))
            .sum()
    }

    /// True when every coefficient is a nonnegative integer.
    pub fn has_natural_coefficients(&self) -> bool {
        self.coeffs
            .values()
            .all(|c| c.is_integer() && !c.is_negative())
    }

    /// Integer coefficient of `N^exp`, if integral.
    pub fn integer_coeff(&self, exp: i64) -> Option<BigInt> {
        let c = self.coeff(exp);
        c.is_integer().then(|| c.to_integer())
    }
}

impl Add for &LaurentPolyN {
    type Output = LaurentPolyN;
    fn add(self, rhs: &LaurentPolyN) -> LaurentPolyN {
        let mut out = self.clone();
        for (&e, c) in &rhs.coeffs {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPolyN {
    type Output = LaurentPolyN;
    fn sub(self, rhs: &LaurentPolyN) -> LaurentPolyN {
        let mut out = self.clone();
        for (&e, c) in &rhs.coeffs {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl Mul for &LaurentPolyN {
    type Output = LaurentPolyN;
    fn mul(self, rhs: &LaurentPolyN) -> LaurentPolyN {
        let mut out = LaurentPolyN::zero();
        for (&a, x) in &self.coeffs {
            for (&b, y) in &rhs.coeffs {
                out.add_term(a + b, x * y);
            }
        }
        out
    }
}

impl Neg for &LaurentPolyN {
    type Output = LaurentPolyN;
    fn neg(self) -> LaurentPolyN {
        LaurentPolyN {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, -c.clone())).collect(),
        }
    }
}

/// Terms from the highest power down, e.g. `N^2 + N - 1/2*N^-2`.
impl fmt::Display for LaurentPolyN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (&e, c)) in self.coeffs.iter().rev().enumerate() {
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            match (e, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "N")?,
                (1, false) => write!(f, "{mag}*N")?,
                (_, true) => write!(f, "N^{e}")?,
                (_, false) => write!(f, "{mag}*N^{e}")?,
            }
        }
        Ok(())
    }
}

/// Serialized as a map from exponent to the coefficient written `p/q`.
impl Serialize for LaurentPolyN {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.coeffs.len()))?;
        for (e, c) in &self.coeffs {
            map.serialize_entry(&e.to_string(), &c.to_string())?;
        }
        map.end()
    }
}
