use std::fmt;

use num_traits::{One, Signed, Zero};

use super::poly::Polynomial;
use super::rational::{format_rational, int, Rational};
use crate::error::{Error, Result};

/// A closed rational interval `[lo, hi]` certified to contain a real quantity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Enclosure {
    lo: Rational,
    hi: Rational,
}

impl Enclosure {
    /// Panics if `lo > hi`.
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "enclosure with lo > hi");
        Self { lo, hi }
    }

    pub fn exact(v: Rational) -> Self {
        Self {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    /// Multiplies both ends by a nonnegative scalar.
    pub fn scale(&self, c: &Rational) -> Self {
        assert!(!c.is_negative());
        Self {
            lo: &self.lo * c,
            hi: &self.hi * c,
        }
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            format_rational(&self.lo),
            format_rational(&self.hi)
        )
    }
}

/// Brackets the point where a nondecreasing `u` crosses `level` on `[0, 1]`
/// by exact bisection. The result satisfies `u(lo) <= level <= u(hi)` and
/// `hi - lo <= eps`.
pub fn isolate_level_crossing(
    u: &Polynomial,
    level: &Rational,
    eps: &Rational,
) -> Result<Enclosure> {
    if !eps.is_positive() {
        return Err(Error::NonpositiveTolerance);
    }
    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    let (u_lo, u_hi) = (u.eval(&lo), u.eval(&hi));
    if !(u_lo < *level && *level < u_hi) {
        return Err(Error::LevelOutOfRange {
            level: format_rational(level),
            low: format_rational(&u_lo),
            high: format_rational(&u_hi),
        });
    }
    let half = Rational::new(1.into(), 2.into());
    while &hi - &lo > *eps {
        let mid = (&lo + &hi) * &half;
        if u.eval(&mid) <= *level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Enclosure::new(lo, hi))
}

/// Encloses `∫_0^1 |1 - 2u(x)| g(x) dx` for a nonnegative `g` whose
/// normalized cumulative is `u`, with width at most `eps`.
///
/// With `A` the antiderivative of `(1 - 2u) g` and `m` the crossing
/// `u(m) = 1/2`, the integral is `2A(m) - A(0) - A(1)`. `m` is isolated to
/// an interval of width `w` and `A(m)` is bounded through
/// `|A(m) - A(lo)| <= B w` with `B` the coefficient-sum bound of `A'`.
pub fn integral_abs_split(u: &Polynomial, g: &Polynomial, eps: &Rational) -> Result<Enclosure> {
    if !eps.is_positive() {
        return Err(Error::NonpositiveTolerance);
    }
    let mass = g.integral_01();
    if mass.is_zero() {
        return Err(Error::ZeroMass);
    }
    if !u.eval(&Rational::zero()).is_zero() || u.derivative(1).scale(&mass) != *g {
        return Err(Error::Precondition(
            "u is not the normalized cumulative of g".into(),
        ));
    }

    let one_minus_2u = &Polynomial::one() - &u.scale(&int(2));
    let integrand = &one_minus_2u * g;
    let anti = integrand.antiderivative();
    let slope = integrand.sup_bound_unit();

    // total width is 4 B w
    let crossing_eps = if slope.is_zero() {
        eps.clone()
    } else {
        eps / (slope.clone() * int(4))
    };
    let crossing = isolate_level_crossing(u, &Rational::new(1.into(), 2.into()), &crossing_eps)?;
    let w = crossing.width();
    let a_lo = anti.eval(crossing.lo());
    let rest = anti.eval(&Rational::one()); // A(0) = 0
    let slack = &slope * &w;
    let center = a_lo * int(2) - rest;
    let radius = slack * int(2);
    Ok(Enclosure::new(&center - &radius, &center + &radius))
}
