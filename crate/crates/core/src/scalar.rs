//! Exact rational scalars for certifying inequalities whose constants are far
//! outside double-precision range (the product constants reach 2^1702).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{GeomError, Result};

/// Direction in which an inexact quantity is rounded before it enters an
/// exact comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Down,
    Up,
}

/// Exact rational number backed by arbitrary-precision integers.
///
/// Ledger constants are always nonnegative; bound evaluations may go negative
/// when a bound is vacuous at desk scale, so the sign is not restricted here.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigScalar(BigRational);

impl BigScalar {
    pub fn zero() -> Self {
        BigScalar(BigRational::zero())
    }

    pub fn one() -> Self {
        BigScalar(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        BigScalar(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        BigScalar(BigRational::from_integer(n))
    }

    /// `num / den`, reduced. Panics on a zero denominator.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigScalar(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Exact value of a finite double; `None` for NaN or infinities.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(BigScalar)
    }

    /// `2^k` for any integer `k`, exactly.
    pub fn pow2(k: i64) -> Self {
        let mag = BigInt::one() << k.unsigned_abs() as usize;
        if k >= 0 {
            BigScalar::from_bigint(mag)
        } else {
            BigScalar(BigRational::new(BigInt::one(), mag))
        }
    }

    pub fn powi(&self, exp: u32) -> Self {
        let mut acc = BigScalar::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        BigScalar(self.0.abs())
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Nearest double, saturating to +-infinity beyond the double range.
    pub fn to_f64(&self) -> f64 {
        if let Some(v) = self.0.to_f64() {
            if v.is_finite() {
                return v;
            }
        }
        let l = self.log2_approx();
        if self.is_negative() {
            if l > 1023.0 {
                f64::NEG_INFINITY
            } else {
                -l.exp2()
            }
        } else if l > 1023.0 {
            f64::INFINITY
        } else {
            l.exp2()
        }
    }

    /// Double-precision approximation of `log2(|self|)`; `-inf` for zero.
    pub fn log2_approx(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        log2_biguint(self.0.numer().magnitude()) - log2_biguint(self.0.denom().magnitude())
    }

    /// `2^e` for a rational exponent. Integer exponents are exact; otherwise
    /// the fractional part is quantized at 1e-9 in the direction of `round`
    /// and the irrational factor is bounded through a widened double
    /// evaluation, so the result is a certified lower (or upper) bound.
    pub fn pow2_rational(e: &BigScalar, round: Rounding) -> Self {
        let floor = e.0.floor();
        let k = floor.to_integer().to_i64().expect("exponent out of i64 range");
        let frac = &e.0 - &floor;
        if frac.is_zero() {
            return BigScalar::pow2(k);
        }
        let scale = BigInt::from(1_000_000_000u64);
        let scaled = &frac * BigRational::from_integer(scale.clone());
        let m = match round {
            Rounding::Down => scaled.floor().to_integer(),
            Rounding::Up => scaled.ceil().to_integer(),
        };
        let m = m.to_i64().expect("quantized fraction fits") as f64;
        let approx = (m / 1e9).exp2();
        let widened = match round {
            Rounding::Down => approx * (1.0 - 1e-12),
            Rounding::Up => approx * (1.0 + 1e-12),
        };
        let factor = BigScalar::from_f64(widened).expect("finite factor");
        &BigScalar::pow2(k) * &factor
    }

    /// Rational bracket of a measured double: `x -+ slack`.
    pub fn bracket(x: f64, slack: f64, round: Rounding) -> Option<Self> {
        let base = BigScalar::from_f64(x)?;
        let s = BigScalar::from_f64(slack)?;
        Some(match round {
            Rounding::Down => &base - &s,
            Rounding::Up => &base + &s,
        })
    }

    pub fn floor_to_bigint(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }
}

fn log2_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().expect("fits in u64") as f64).log2();
    }
    let shift = bits - 64;
    let top = (n >> shift as usize).to_u64().expect("top 64 bits");
    (top as f64).log2() + shift as f64
}

impl fmt::Display for BigScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for BigScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.numer().bits() > 96 || self.0.denom().bits() > 96 {
            write!(f, "BigScalar(~2^{:.6})", self.log2_approx())
        } else {
            write!(f, "BigScalar({self})")
        }
    }
}

impl FromStr for BigScalar {
    type Err = GeomError;

    /// Accepts `n`, `n/d` or a plain decimal such as `1.5`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |offset: usize, message: &str| GeomError::MalformedPoint {
            input: s.to_string(),
            offset,
            message: message.to_string(),
        };
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let num: BigInt = n.trim().parse().map_err(|_| bad(0, "bad numerator"))?;
            let den: BigInt = d.trim().parse().map_err(|_| bad(n.len() + 1, "bad denominator"))?;
            if den.is_zero() {
                return Err(bad(n.len() + 1, "zero denominator"));
            }
            return Ok(BigScalar(BigRational::new(num, den)));
        }
        if let Some((ip, fp)) = t.split_once('.') {
            let neg = ip.starts_with('-');
            let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
            let mag: BigInt = digits.parse().map_err(|_| bad(0, "bad decimal"))?;
            let den = num_traits::pow(BigInt::from(10u32), fp.len());
            let v = BigRational::new(if neg { -mag } else { mag }, den);
            return Ok(BigScalar(v));
        }
        let n: BigInt = t.parse().map_err(|_| bad(0, "bad integer"))?;
        Ok(BigScalar::from_bigint(n))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a BigScalar> for &'a BigScalar {
            type Output = BigScalar;
            fn $method(self, rhs: &'a BigScalar) -> BigScalar {
                BigScalar((&self.0).$method(&rhs.0))
            }
        }
        impl $trait for BigScalar {
            type Output = BigScalar;
            fn $method(self, rhs: BigScalar) -> BigScalar {
                BigScalar(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for BigScalar {
    type Output = BigScalar;
    fn neg(self) -> BigScalar {
        BigScalar(-self.0)
    }
}

impl Mul<i64> for &BigScalar {
    type Output = BigScalar;
    fn mul(self, rhs: i64) -> BigScalar {
        BigScalar(&self.0 * BigRational::from_integer(BigInt::from(rhs)))
    }
}

impl BigScalar {
    /// Exact quotient. Panics on division by zero.
    pub fn div(&self, rhs: &BigScalar) -> BigScalar {
        assert!(!rhs.is_zero(), "division by zero");
        BigScalar(&self.0 / &rhs.0)
    }

    /// `true` when `self` is an integer.
    pub fn is_integer(&self) -> bool {
        self.0.denom().is_one()
    }

    /// Compare against a double exactly (NaN compares as `None`).
    pub fn cmp_f64(&self, x: f64) -> Option<Ordering> {
        if x.is_nan() {
            return None;
        }
        if x == f64::INFINITY {
            return Some(Ordering::Less);
        }
        if x == f64::NEG_INFINITY {
            return Some(Ordering::Greater);
        }
        BigScalar::from_f64(x).map(|v| self.cmp(&v))
    }

    pub fn is_even_integer(&self) -> bool {
        self.is_integer() && self.0.numer().is_even()
    }

    pub fn sign(&self) -> Sign {
        self.0.numer().sign()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow2_exact_both_signs() {
        assert_eq!(BigScalar::pow2(10), BigScalar::from_int(1024));
        assert_eq!(BigScalar::pow2(-3), BigScalar::from_ratio(1, 8));
        assert_eq!(BigScalar::pow2(0), BigScalar::one());
    }

    #[test]
    fn log2_of_huge_values() {
        let v = BigScalar::pow2(3000);
        assert!((v.log2_approx() - 3000.0).abs() < 1e-12);
        let w = &BigScalar::pow2(3000) * &BigScalar::from_int(3);
        assert!((w.log2_approx() - (3000.0 + 3f64.log2())).abs() < 1e-9);
        assert!((BigScalar::pow2(-900).log2_approx() + 900.0).abs() < 1e-12);
    }

    #[test]
    fn parse_forms() {
        assert_eq!("3/6".parse::<BigScalar>().unwrap(), BigScalar::from_ratio(1, 2));
        assert_eq!("7".parse::<BigScalar>().unwrap(), BigScalar::from_int(7));
        assert_eq!("1.25".parse::<BigScalar>().unwrap(), BigScalar::from_ratio(5, 4));
        assert_eq!("-0.5".parse::<BigScalar>().unwrap(), BigScalar::from_ratio(-1, 2));
        assert!("1/0".parse::<BigScalar>().is_err());
        assert!("abc".parse::<BigScalar>().is_err());
    }

    #[test]
    fn pow2_rational_brackets_the_true_value() {
        let e = BigScalar::from_ratio(1, 3);
        let lo = BigScalar::pow2_rational(&e, Rounding::Down).to_f64();
        let hi = BigScalar::pow2_rational(&e, Rounding::Up).to_f64();
        let truth = (1.0f64 / 3.0).exp2();
        assert!(lo <= truth && truth <= hi);
        assert!(hi - lo < 1e-8);
        let exact = BigScalar::pow2_rational(&BigScalar::from_int(400), Rounding::Down);
        assert_eq!(exact, BigScalar::pow2(400));
    }

    #[test]
    fn to_f64_saturates() {
        assert_eq!(BigScalar::pow2(2000).to_f64(), f64::INFINITY);
        assert_eq!((-BigScalar::pow2(2000)).to_f64(), f64::NEG_INFINITY);
        assert_eq!(BigScalar::from_ratio(3, 4).to_f64(), 0.75);
    }
}
