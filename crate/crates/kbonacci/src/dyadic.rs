//! Exact dyadic rationals `a / 2^b` with arbitrary-precision numerators.
//!
//! Every event probability in this crate has a power-of-two denominator, and
//! distances in sequence space are finite sums of powers of two, so a dyadic
//! type makes equality checks exact instead of approximate.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Non-negative dyadic rational `num / 2^exp`, kept in lowest terms:
/// `num` is odd whenever `exp > 0`, and zero is stored as `0 / 2^0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    num: BigUint,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: impl Into<BigUint>, exp: u32) -> Self {
        Self::normalized(num.into(), exp)
    }

    fn normalized(mut num: BigUint, mut exp: u32) -> Self {
        if num.is_zero() {
            return Self {
                num,
                exp: 0,
            };
        }
        let tz = num.trailing_zeros().unwrap_or(0).min(u64::from(exp)) as u32;
        if tz > 0 {
            num >>= tz as usize;
            exp -= tz;
        }
        Self { num, exp }
    }

    pub fn zero() -> Self {
        Self {
            num: BigUint::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Self {
            num: BigUint::one(),
            exp: 0,
        }
    }

    /// `1 / 2^exp`.
    pub fn half_pow(exp: u32) -> Self {
        Self {
            num: BigUint::one(),
            exp,
        }
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Divides by `2^shift` (exact; only the exponent moves).
    pub fn div_pow2(&self, shift: u32) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        Self {
            num: self.num.clone(),
            exp: self.exp + shift,
        }
    }

    /// `self - other` when non-negative, `None` otherwise.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let exp = self.exp.max(other.exp);
        let a = &self.num << (exp - self.exp) as usize;
        let b = &other.num << (exp - other.exp) as usize;
        if a < b {
            return None;
        }
        Some(Self::normalized(a - b, exp))
    }

    pub fn to_f64(&self) -> f64 {
        self.num.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(-(self.exp as i32))
    }
}

impl Add<&Dyadic> for &Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        let a = &self.num << (exp - self.exp) as usize;
        let b = &rhs.num << (exp - rhs.exp) as usize;
        Dyadic::normalized(a + b, exp)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| &acc + &x)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        let a = &self.num << (exp - self.exp) as usize;
        let b = &other.num << (exp - other.exp) as usize;
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        // Numerators can exceed every fixed-width integer type, so they are
        // serialized as decimal strings.
        let mut s = serializer.serialize_struct("Dyadic", 2)?;
        s.serialize_field("num", &self.num.to_string())?;
        s.serialize_field("exp", &self.exp)?;
        s.end()
    }
}
