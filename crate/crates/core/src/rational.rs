//! Extended rational numbers: Q together with a single unsigned infinity.
//!
//! Values are kept as reduced fractions `num/den` with `den >= 0` and
//! `gcd(num, den) == 1`; infinity is the pair `1/0`. This is the projective
//! line over the integers, which is exactly what Moebius maps act on and what
//! continued fraction convergents live in — intermediate `∞` values are
//! ordinary, not an error.

use std::cmp::Ordering;
use std::fmt;

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::error::{Error, Result};

/// A reduced fraction on the projective line: `den >= 0`, `gcd(num, den) = 1`,
/// with `1/0` as the unique point at infinity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExtendedRational {
    num: BigInt,
    den: BigInt,
}

impl ExtendedRational {
    /// Builds a value from any integer pair, reducing it to canonical form.
    /// `(ka, kb)` and `(a, b)` give the same value for `k != 0`; the only
    /// rejected input is `0/0`.
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if num.is_zero() && den.is_zero() {
            return Err(Error::ZeroOverZero);
        }
        if den.is_zero() {
            return Ok(Self::infinity());
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num / &g, den / g);
        if den.sign() == Sign::Minus {
            num = -num;
            den = -den;
        }
        Ok(Self { num, den })
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self {
            num: n.into(),
            den: BigInt::one(),
        }
    }

    pub fn infinity() -> Self {
        Self {
            num: BigInt::one(),
            den: BigInt::zero(),
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// The same value as a `BigRational`, or `None` for infinity.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.is_infinite() {
            None
        } else {
            Some(BigRational::new(self.num.clone(), self.den.clone()))
        }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::new(r.numer().clone(), r.denom().clone()).expect("BigRational is never 0/0")
    }
}

impl From<BigInt> for ExtendedRational {
    fn from(n: BigInt) -> Self {
        Self::from_integer(n)
    }
}

impl From<i64> for ExtendedRational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

/// Finite values compare by cross multiplication; infinity equals itself but
/// is not ordered against finite values (the projective line has no linear
/// order through the point at infinity).
impl PartialOrd for ExtendedRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Some(Ordering::Equal),
            (true, false) | (false, true) => None,
            // Denominators are positive, so the cross product keeps the order.
            (false, false) => Some((&self.num * &other.den).cmp(&(&other.num * &self.den))),
        }
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "∞")
        } else if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Decimal string for `r` rounded toward minus infinity at `digits` fractional
/// digits. Exact: works on the integer `floor(r * 10^digits)`.
pub fn decimal_floor(r: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = r.numer() * &scale;
    let v = scaled.div_floor(r.denom());
    render_scaled(&v, digits)
}

/// Decimal string for `r` rounded toward plus infinity at `digits` fractional
/// digits.
pub fn decimal_ceil(r: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = r.numer() * &scale;
    let v = scaled.div_ceil(r.denom());
    render_scaled(&v, digits)
}

/// Writes `v / 10^digits` as a plain decimal string.
fn render_scaled(v: &BigInt, digits: u32) -> String {
    let sign = if v.sign() == Sign::Minus { "-" } else { "" };
    let abs = v.abs();
    if digits == 0 {
        return format!("{sign}{abs}");
    }
    let scale = BigInt::from(10u32).pow(digits);
    let (int_part, frac_part) = abs.div_rem(&scale);
    format!(
        "{sign}{int_part}.{frac:0>width$}",
        frac = frac_part,
        width = digits as usize
    )
}

/// Rounds an exact pixel coordinate to the nearest integer, ties to even.
pub fn round_half_even(r: &BigRational) -> BigInt {
    let floor = r.numer().div_floor(r.denom());
    let frac = r - BigRational::from_integer(floor.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    match frac.cmp(&half) {
        Ordering::Less => floor,
        Ordering::Greater => floor + 1,
        Ordering::Equal => {
            if floor.is_even() {
                floor
            } else {
                floor + 1
            }
        }
    }
}
