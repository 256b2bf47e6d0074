use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Signed, Zero};

use super::rational::{bit_size, format_rational, parse_rational, Rational};

/// Dense univariate polynomial over the rationals in the monomial basis.
///
/// `coeffs[j]` is the coefficient of `x^j`. The coefficient vector never has
/// a trailing zero, so the zero polynomial is the empty vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Exact `m`-th derivative.
    pub fn derivative(&self, m: usize) -> Self {
        if m == 0 {
            return self.clone();
        }
        if self.coeffs.len() <= m {
            return Self::zero();
        }
        let coeffs = self.coeffs[m..]
            .iter()
            .enumerate()
            .map(|(j, c)| {
                // falling factorial (j+m)(j+m-1)...(j+1)
                let k: num_bigint::BigInt =
                    ((j + 1)..=(j + m)).map(num_bigint::BigInt::from).product();
                c * Rational::from_integer(k)
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// The antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / Rational::from_integer((j as i64 + 1).into()));
        }
        Self::from_coeffs(coeffs)
    }

    /// Exact value of the integral over `[0, 1]`.
    pub fn integral_01(&self) -> Rational {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c / Rational::from_integer((j as i64 + 1).into()))
            .sum()
    }

    /// Horner evaluation at a rational point.
    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Horner evaluation at a Gaussian-rational point.
    pub fn eval_complex(&self, z: &Complex<Rational>) -> Complex<Rational> {
        self.coeffs.iter().rev().fold(
            Complex::new(Rational::zero(), Rational::zero()),
            |acc, c| acc * z + Complex::new(c.clone(), Rational::zero()),
        )
    }

    /// `sum_j |c_j|`, an upper bound for `max_{x in [0,1]} |p(x)|`.
    pub fn sup_bound_unit(&self) -> Rational {
        self.coeffs.iter().map(Signed::abs).sum()
    }

    /// `sum_j |c_j| R^j`, an upper bound for `max_{|z| <= R} |p(z)|`.
    pub fn sup_bound_disc(&self, radius: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * radius + c.abs())
    }

    /// `p(1 - x)`.
    pub fn reflect(&self) -> Self {
        let one_minus_x = Self::one() - Self::x();
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| {
            &(&acc * &one_minus_x) + &Self::constant(c.clone())
        })
    }

    /// Largest numerator/denominator bit length over all coefficients.
    pub fn max_coeff_bits(&self) -> u64 {
        self.coeffs.iter().map(bit_size).max().unwrap_or(0)
    }

    /// Coefficients as `"p/q"` strings, index = power.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }

    /// Parses coefficient strings; the error carries the offending index.
    pub fn from_strings<S: AsRef<str>>(items: &[S]) -> Result<Self, (usize, String)> {
        let coeffs = items
            .iter()
            .enumerate()
            .map(|(j, s)| parse_rational(s.as_ref()).map_err(|e| (j, e)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_coeffs(coeffs))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match j {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => {}
                _ => write!(f, "{a}*")?,
            }
            match j {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{j}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (a, b) in coeffs.iter_mut().zip(&short.coeffs) {
            *a += b;
        }
        Polynomial::from_coeffs(coeffs)
    }
}

impl Add for Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        -&self
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::from_coeffs(coeffs)
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}
