//! Arbitrary-precision rationals and the small amount of exact combinatorics
//! (factorials, binomials, Catalan numbers) the coefficient formulas need.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number in canonical reduced form (denominator > 0).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    /// Builds `num/den`; fails on a zero denominator.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Self(BigRational::new(num.into(), den)))
    }

    pub fn from_integer(v: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(v.into()))
    }

    pub fn from_biguint(v: BigUint) -> Self {
        Self(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    /// Multiplicative inverse; fails on zero.
    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidArgument("reciprocal of zero".into()));
        }
        Ok(Self(self.0.recip()))
    }

    /// Integer power, negative exponents allowed for non-zero values.
    pub fn pow(&self, exp: i32) -> Result<Self> {
        if exp < 0 && self.is_zero() {
            return Err(Error::InvalidArgument("negative power of zero".into()));
        }
        Ok(Self(num_traits::Pow::pow(&self.0, exp)))
    }

    /// `base^exp` for an integer base, negative exponents allowed (base ≠ 0).
    pub fn int_pow(base: i64, exp: i64) -> Result<Self> {
        let e = i32::try_from(exp).map_err(|_| Error::InvalidArgument("exponent too large".into()))?;
        Self::from_integer(base).pow(e)
    }

    /// Nearest `f64` (may overflow to ±inf for huge values).
    pub fn to_f64(&self) -> f64 {
        if let Some(v) = self.0.to_f64() {
            return v;
        }
        // Fall back on a scaled division for values whose parts overflow f64.
        let n = self.numer();
        let d = self.denom();
        let shift = n.bits().max(d.bits()).saturating_sub(1000) as usize;
        let ns = (n >> shift).to_f64().unwrap_or(f64::NAN);
        let ds = (d >> shift).to_f64().unwrap_or(f64::NAN);
        ns / ds
    }

    /// Decimal rendering with `digits` significant decimals after the point.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let neg = self.is_negative();
        let n = self.numer().abs();
        let d = self.denom().clone();
        let int_part = &n / &d;
        let mut rem = &n % &d;
        let mut out = String::new();
        if neg && !(int_part.is_zero() && rem.is_zero()) {
            out.push('-');
        }
        out.push_str(&int_part.to_string());
        if digits > 0 && !rem.is_zero() {
            out.push('.');
            for _ in 0..digits {
                rem *= 10;
                let q = &rem / &d;
                rem = &rem % &d;
                out.push_str(&q.to_string());
                if rem.is_zero() {
                    break;
                }
            }
        }
        out
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Display for ExactRational {
    /// `p` for integers, `p/q` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for ExactRational {
    type Err = Error;

    /// Accepts `p`, `p/q`, or a finite decimal such as `-0.125`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational number: {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            return Self::new(p, q);
        }
        if let Some((ip, fp)) = s.split_once('.') {
            let neg = ip.trim_start().starts_with('-');
            let ip_digits = ip.trim().trim_start_matches(['-', '+']);
            if !fp.chars().all(|c| c.is_ascii_digit()) || !ip_digits.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let digits = format!("{}{}", if ip_digits.is_empty() { "0" } else { ip_digits }, fp);
            let mut num: BigInt = digits.parse().map_err(|_| bad())?;
            if neg {
                num = -num;
            }
            let den = BigInt::from(10u32).pow(fp.len() as u32);
            return Self::new(num, den);
        }
        let p: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Self::from_integer(p))
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: ExactRational) -> ExactRational {
                ExactRational($tr::$m(self.0, rhs.0))
            }
        }
        impl<'a> $tr<&'a ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational($tr::$m(self.0, &rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: &'b ExactRational) -> ExactRational {
                ExactRational($tr::$m(&self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for ExactRational {
    type Output = ExactRational;
    /// Panics on division by zero, like the integer types.
    fn div(self, rhs: ExactRational) -> ExactRational {
        ExactRational(self.0 / rhs.0)
    }
}

impl<'a, 'b> Div<&'b ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: &'b ExactRational) -> ExactRational {
        ExactRational(&self.0 / &rhs.0)
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl AddAssign<&ExactRational> for ExactRational {
    fn add_assign(&mut self, rhs: &ExactRational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for ExactRational {
    fn add_assign(&mut self, rhs: ExactRational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&ExactRational> for ExactRational {
    fn sub_assign(&mut self, rhs: &ExactRational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&ExactRational> for ExactRational {
    fn mul_assign(&mut self, rhs: &ExactRational) {
        self.0 *= &rhs.0;
    }
}

impl Sum for ExactRational {
    fn sum<I: Iterator<Item = ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |acc, x| acc + x)
    }
}

impl Product for ExactRational {
    fn product<I: Iterator<Item = ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::one(), |acc, x| acc * x)
    }
}

impl From<i64> for ExactRational {
    fn from(v: i64) -> Self {
        Self::from_integer(v)
    }
}

impl From<BigInt> for ExactRational {
    fn from(v: BigInt) -> Self {
        Self::from_integer(v)
    }
}

const FACTORIAL_TABLE_LEN: usize = 128;

fn factorial_table() -> &'static [BigUint] {
    static TABLE: OnceLock<Vec<BigUint>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(FACTORIAL_TABLE_LEN);
        t.push(BigUint::one());
        for k in 1..FACTORIAL_TABLE_LEN {
            let next = &t[k - 1] * BigUint::from(k);
            t.push(next);
        }
        t
    })
}

/// `k!` as a big integer (cached for `k < 128`).
pub fn factorial(k: usize) -> BigUint {
    if k < FACTORIAL_TABLE_LEN {
        factorial_table()[k].clone()
    } else {
        let mut acc = factorial_table()[FACTORIAL_TABLE_LEN - 1].clone();
        for j in FACTORIAL_TABLE_LEN..=k {
            acc *= BigUint::from(j);
        }
        acc
    }
}

/// Binomial coefficient `C(n, k)` (zero when `k > n`).
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Catalan number `C(2k, k)/(k+1)`.
pub fn catalan(k: usize) -> BigUint {
    binomial(2 * k, k) / BigUint::from(k + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["0", "-3", "7/9", "-1/2"] {
            let r: ExactRational = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        let r: ExactRational = "0.125".parse().unwrap();
        assert_eq!(r, ExactRational::new(1, 8).unwrap());
        let r: ExactRational = "-1.5".parse().unwrap();
        assert_eq!(r, ExactRational::new(-3, 2).unwrap());
        assert!("1/0".parse::<ExactRational>().is_err());
        assert!("abc".parse::<ExactRational>().is_err());
    }

    #[test]
    fn canonical_form() {
        let r = ExactRational::new(6, -4).unwrap();
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(ExactRational::new(1, 8).unwrap().to_decimal_string(10), "0.125");
        assert_eq!(ExactRational::new(-1, 3).unwrap().to_decimal_string(4), "-0.3333");
        assert_eq!(ExactRational::from_integer(5).to_decimal_string(4), "5");
    }

    #[test]
    fn combinatorial_numbers() {
        assert_eq!(factorial(0), BigUint::one());
        assert_eq!(factorial(10), BigUint::from(3_628_800u32));
        assert_eq!(binomial(9, 4), BigUint::from(126u32));
        let cats: Vec<u32> = (0..8).map(|k| catalan(k).try_into().unwrap()).collect();
        assert_eq!(cats, vec![1, 1, 2, 5, 14, 42, 132, 429]);
        assert!(factorial(130) > factorial(127));
    }

    #[test]
    fn huge_values_convert_to_f64() {
        let big = ExactRational::from_biguint(factorial(200));
        let ratio = ExactRational::from_biguint(factorial(201)) / big;
        assert_eq!(ratio.to_f64(), 201.0);
        let tiny = ExactRational::new(BigInt::from(1), BigInt::from(factorial(180))).unwrap();
        assert!(tiny.to_f64() >= 0.0);
    }
}
