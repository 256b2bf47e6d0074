//! Helpers around [`BigRational`], the scalar field of every coefficient in
//! the crate.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// `n / d` for small integers. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact `2^e` for any integer exponent.
pub fn pow2(e: i64) -> Rational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new_raw(BigInt::one(), p)
    }
}

/// Smallest integer `e` with `2^e >= r`. `r` must be positive.
pub fn ceil_log2(r: &Rational) -> i64 {
    assert!(r.is_positive(), "ceil_log2 of a non-positive rational");
    let guess = r.numer().bits() as i64 - r.denom().bits() as i64;
    // r lies in (2^(guess-1), 2^(guess+1))
    for e in (guess - 1)..=(guess + 1) {
        if pow2(e) >= *r {
            return e;
        }
    }
    unreachable!("bit-length bracket for ceil_log2 is exhaustive")
}

/// Number of bits of the larger of numerator and denominator.
pub fn bit_size(r: &Rational) -> u64 {
    r.numer().bits().max(r.denom().bits())
}

/// Canonical `"p/q"` text form; the denominator is always written.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"`, an integer, or a decimal literal such as `-0.125` or `7e-3`.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty rational".into());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| format!("invalid numerator in `{s}`"))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| format!("invalid denominator in `{s}`"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(Rational::new(n, d));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<Rational, String> {
    let bad = || format!("invalid number `{s}`");
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole
        .bytes()
        .chain(frac.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: String = format!("{whole}{frac}");
    let mut value = Rational::from_integer(all.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac.len() as i64;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, scale.unsigned_abs() as usize);
    }
    Ok(if negative { -value } else { value })
}

/// Plain decimal rendering with `sig` significant digits, rounded half away
/// from zero. Zero renders as `"0"`.
pub fn to_decimal(r: &Rational, sig: usize) -> String {
    assert!(sig >= 1);
    if r.is_zero() {
        return "0".into();
    }
    let negative = r.is_negative();
    let a = r.abs();
    let ten = BigInt::from(10);

    // exponent e with 10^e <= a < 10^(e+1), starting from a bit-length estimate
    let bits = a.numer().bits() as i64 - a.denom().bits() as i64;
    let mut e = (bits as f64 * std::f64::consts::LOG10_2).floor() as i64;
    let pow10 = |k: i64| -> Rational {
        let p = Rational::from_integer(num_traits::pow(ten.clone(), k.unsigned_abs() as usize));
        if k >= 0 {
            p
        } else {
            p.recip()
        }
    };
    while pow10(e) > a {
        e -= 1;
    }
    while pow10(e + 1) <= a {
        e += 1;
    }

    let mut digits = round_half_up(&(&a * pow10(sig as i64 - 1 - e)));
    if digits == num_traits::pow(ten.clone(), sig) {
        digits /= &ten;
        e += 1;
    }
    let digit_str = digits.to_string();
    debug_assert_eq!(digit_str.len(), sig);

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if e < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-e - 1) as usize));
        out.push_str(&digit_str);
    } else {
        let int_len = e as usize + 1;
        if int_len >= sig {
            out.push_str(&digit_str);
            out.extend(std::iter::repeat_n('0', int_len - sig));
        } else {
            out.push_str(&digit_str[..int_len]);
            out.push('.');
            out.push_str(&digit_str[int_len..]);
        }
    }
    out
}

fn round_half_up(a: &Rational) -> BigInt {
    let (q, rem) = a.numer().div_rem(a.denom());
    let twice = rem * 2u8;
    if twice.cmp(a.denom()) != Ordering::Less {
        q + 1u8
    } else {
        q
    }
}

/// Nearest `f64`, for display and sampling only.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn from_biguint(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from_biguint(Sign::Plus, n.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_log2_brackets() {
        assert_eq!(ceil_log2(&int(1)), 0);
        assert_eq!(ceil_log2(&int(2)), 1);
        assert_eq!(ceil_log2(&int(3)), 2);
        assert_eq!(ceil_log2(&rat(1, 2)), -1);
        assert_eq!(ceil_log2(&rat(1, 3)), -1);
        assert_eq!(ceil_log2(&rat(27, 4)), 3);
        for n in 1..200i64 {
            for d in 1..20i64 {
                let r = rat(n, d);
                let e = ceil_log2(&r);
                assert!(pow2(e) >= r && pow2(e - 1) < r, "{n}/{d}");
            }
        }
    }

    #[test]
    fn text_forms() {
        assert_eq!(format_rational(&int(3)), "3/1");
        assert_eq!(format_rational(&rat(-2, 4)), "-1/2");
        assert_eq!(parse_rational("6/8").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("0.7").unwrap(), rat(7, 10));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_rational("5e-1").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("12").unwrap(), int(12));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&rat(1, 4), 17), "0.25000000000000000");
        assert_eq!(to_decimal(&rat(1, 3), 17), "0.33333333333333333");
        assert_eq!(to_decimal(&rat(2, 3), 5), "0.66667");
        assert_eq!(to_decimal(&int(1), 3), "1.00");
        assert_eq!(to_decimal(&rat(-999, 100), 2), "-10");
        assert_eq!(to_decimal(&int(12345), 3), "12300");
        assert_eq!(to_decimal(&rat(1, 1000), 2), "0.0010");
        assert_eq!(to_decimal(&int(0), 17), "0");
    }
}
