use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::rational::from_biguint;
use crate::exact::Rational;

/// A binary point `i / 2^n` in `[0, 1]`, kept in canonical form: `i` odd,
/// or `(0, 0)` / `(1, 0)` for the endpoints. The generation is `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigUint,
    gen: u32,
}

impl Dyadic {
    pub fn zero() -> Self {
        Self {
            num: BigUint::zero(),
            gen: 0,
        }
    }

    pub fn one() -> Self {
        Self {
            num: BigUint::one(),
            gen: 0,
        }
    }

    /// `i / 2^n`, reduced to canonical form. Fails unless `i <= 2^n`.
    pub fn new(i: BigUint, n: u32) -> Result<Self> {
        if i > BigUint::one() << n {
            return Err(Error::IndexOutOfRange(format!("{i} / 2^{n} exceeds 1")));
        }
        if i.is_zero() {
            return Ok(Self::zero());
        }
        let tz = i.trailing_zeros().unwrap_or(0).min(n as u64) as u32;
        Ok(Self {
            num: i >> tz,
            gen: n - tz,
        })
    }

    pub fn from_u64(i: u64, n: u32) -> Result<Self> {
        Self::new(BigUint::from(i), n)
    }

    /// `Some` iff `r` is a binary point in `[0, 1]`.
    pub fn from_rational(r: &Rational) -> Option<Self> {
        if r.is_negative() || r > &Rational::one() {
            return None;
        }
        let d = r.denom().magnitude();
        if d.count_ones() != 1 {
            return None;
        }
        let n = d.trailing_zeros().unwrap_or(0) as u32;
        Self::new(r.numer().magnitude().clone(), n).ok()
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn generation(&self) -> u32 {
        self.gen
    }

    pub fn value(&self) -> Rational {
        Rational::new(
            BigInt::from(self.num.clone()),
            BigInt::from(BigUint::one() << self.gen),
        )
    }

    /// Numerator over the finer denominator `2^n`. Panics if `n < generation`.
    pub fn index_at(&self, n: u32) -> BigUint {
        assert!(n >= self.gen);
        &self.num << (n - self.gen)
    }

    pub fn is_odd_numerator(&self) -> bool {
        self.num.is_odd()
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let n = self.gen.max(other.gen);
        self.index_at(n).cmp(&other.index_at(n))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.gen)
    }
}

impl From<&Dyadic> for Rational {
    fn from(d: &Dyadic) -> Rational {
        from_biguint(&d.num) / from_biguint(&(BigUint::one() << d.gen))
    }
}
