//! Exact evaluation of the curve at binary points and certified evaluation at
//! arbitrary rational parameters.
//!
//! `F_0 = 0` and `F_1 = 1`. Walking from the root interval `[0, 1]` down the
//! binary digits of a point, every step to the right adds the left half's
//! consecutive difference `2^-s g_w`, where the word `w` picks up a letter at
//! each direction-change generation.

use std::io::{self, Write};

use num_bigint::BigUint;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::exact::rational::{from_biguint, int, pow2, to_decimal};
use crate::exact::{Polynomial, Rational};
use crate::model::{CurveModel, ShapeNode, Side, Word};

/// Added to every error bound to cover rendering the exact partial sum as a
/// float or a 17-digit decimal.
pub fn conversion_allowance() -> Rational {
    pow2(-50)
}

fn check_generation(model: &CurveModel, n: u32) -> Result<()> {
    let max = model.max_generation();
    if n > max {
        return Err(Error::GenerationOutOfRange { generation: n, max });
    }
    Ok(())
}

fn check_level(model: &CurveModel, r: u32) -> Result<()> {
    if r == 0 || r > model.levels() {
        return Err(Error::LevelIndexOutOfRange {
            r,
            levels: model.levels(),
        });
    }
    Ok(())
}

/// Word of the generation-`n` interval `[j / 2^n, (j + 1) / 2^n]`: the binary
/// digit of `j` at each direction-change generation `n_r <= n`, `0 -> L`,
/// `1 -> R`.
pub fn interval_word(model: &CurveModel, n: u32, j: &BigUint) -> Result<Word> {
    check_generation(model, n)?;
    if *j >= BigUint::one() << n {
        return Err(Error::IndexOutOfRange(format!(
            "interval {j} at generation {n}"
        )));
    }
    let changes = model.schedule.changes_through(n);
    Ok(model.schedule.entries()[..changes]
        .iter()
        .map(|e| Side::from_bit(j.bit((n - e.n) as u64)))
        .collect::<Vec<_>>()
        .into())
}

fn shape<'a>(model: &'a CurveModel, word: &Word) -> &'a ShapeNode {
    model
        .node(word)
        .expect("interval words never exceed the built tree depth")
}

/// Exact polynomial `F_q`.
pub fn eval_dyadic(model: &CurveModel, q: &Dyadic) -> Result<Polynomial> {
    let n = q.generation();
    check_generation(model, n)?;
    if *q == Dyadic::one() {
        return Ok(Polynomial::one());
    }
    let j = q.numerator();
    let mut acc = Polynomial::zero();
    let mut node = &model.root;
    for s in 1..=n {
        let bit = j.bit((n - s) as u64);
        let change = model.schedule.level_at(s).is_some();
        if bit {
            let left = if change {
                node.child(Side::L)
                    .expect("tree covers every scheduled change")
            } else {
                node
            };
            acc = &acc + &left.g.scale(&pow2(-(s as i64)));
        }
        if change {
            node = node
                .child(Side::from_bit(bit))
                .expect("tree covers every scheduled change");
        }
    }
    Ok(acc)
}

/// `F_{i/2^n} - F_{(i-1)/2^n} = 2^-n g_w`, `1 <= i <= 2^n`.
pub fn consecutive_difference(model: &CurveModel, n: u32, i: &BigUint) -> Result<Polynomial> {
    check_generation(model, n)?;
    if i.is_zero() || *i > BigUint::one() << n {
        return Err(Error::IndexOutOfRange(format!("i = {i} at generation {n}")));
    }
    let word = interval_word(model, n, &(i - 1u8))?;
    Ok(shape(model, &word).g.scale(&pow2(-(n as i64))))
}

fn check_unit(t: &Rational, what: &str) -> Result<()> {
    if t.is_negative() || *t > Rational::one() {
        return Err(Error::Precondition(format!("{what} must lie in [0, 1]")));
    }
    Ok(())
}

/// `p(r, t)`: the multiple of `2^-(n_r - 1)` nearest to `t`; exact halfway
/// ties go to the smaller point.
pub fn p_sequence(model: &CurveModel, t: &Rational, r: u32) -> Result<Dyadic> {
    check_level(model, r)?;
    check_unit(t, "t")?;
    let h = model.schedule.n(r) - 1;
    let scaled = t * pow2(h as i64);
    let floor = scaled.floor();
    let frac = &scaled - &floor;
    let idx = if frac > Rational::new(1.into(), 2.into()) {
        floor + Rational::one()
    } else {
        floor
    };
    let idx = idx
        .to_integer()
        .to_biguint()
        .expect("t >= 0 gives a nonnegative index");
    Dyadic::new(idx, h)
}

/// Partial-sum value with a certified radius.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult<V> {
    /// Exact value of the partial sum `F_{p(r_max, t)}`.
    pub value: V,
    /// The projection point `p(r_max, t)`.
    pub anchor: Dyadic,
    /// Bound on the omitted series tail.
    pub truncation: Rational,
    /// `truncation` plus the conversion allowance.
    pub error_bound: Rational,
}

fn truncation_bound(model: &CurveModel, t: &Rational, r_max: u32) -> Rational {
    // Binary t of generation <= n_{r_max} - 1 is hit exactly by p(r_max, t),
    // and every later projection equals t.
    let exact = Dyadic::from_rational(t).is_some_and(|d| d.generation() < model.schedule.n(r_max));
    if exact {
        Rational::zero()
    } else {
        pow2(1 - r_max as i64)
    }
}

/// `F_t(x)` for rational `t, x ∈ [0, 1]` from the first `r_max` series terms.
pub fn eval_real(
    model: &CurveModel,
    t: &Rational,
    x: &Rational,
    r_max: u32,
) -> Result<EvalResult<Rational>> {
    check_unit(x, "x")?;
    let anchor = p_sequence(model, t, r_max)?;
    let value = eval_dyadic(model, &anchor)?.eval(x);
    let truncation = truncation_bound(model, t, r_max);
    Ok(EvalResult {
        value,
        anchor,
        error_bound: &truncation + conversion_allowance(),
        truncation,
    })
}

/// `F_t(z)` for complex `z` with `|z| <= r_max`, so that every omitted term
/// (index `>= r_max`) is controlled on a disc containing `z`.
pub fn eval_complex(
    model: &CurveModel,
    t: &Rational,
    z: &Complex<Rational>,
    r_max: u32,
) -> Result<EvalResult<Complex<Rational>>> {
    let radius = int(r_max as i64);
    if z.norm_sqr() > &radius * &radius {
        return Err(Error::Precondition(format!(
            "|z| exceeds r_max = {r_max}; raise r_max to at least ceil(|z|)"
        )));
    }
    let anchor = p_sequence(model, t, r_max)?;
    let value = eval_dyadic(model, &anchor)?.eval_complex(z);
    let truncation = truncation_bound(model, t, r_max);
    Ok(EvalResult {
        value,
        anchor,
        error_bound: &truncation + conversion_allowance(),
        truncation,
    })
}

/// Certified upper bound for `sup_{[0,1]} |F_t^{(m)}|`: the coefficient-sum
/// bound of the partial sum's derivative plus the tail `ω_m 2^{1 - r_max}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivativeBound {
    pub head: Rational,
    pub tail: Rational,
}

impl DerivativeBound {
    pub fn total(&self) -> Rational {
        &self.head + &self.tail
    }
}

pub fn derivative_bound(
    model: &CurveModel,
    t: &Rational,
    m: usize,
    r_max: u32,
) -> Result<DerivativeBound> {
    if m == 0 {
        return Err(Error::Precondition(
            "derivative order must be at least 1".into(),
        ));
    }
    let anchor = p_sequence(model, t, r_max)?;
    let head = eval_dyadic(model, &anchor)?.derivative(m).sup_bound_unit();
    let tail = model.omega.omega(m) * pow2(1 - r_max as i64);
    Ok(DerivativeBound { head, tail })
}

/// Difference `F_{p(r+1,t)} - F_{p(r,t)}`, the `r`-th series term. Needs
/// `r + 1 <= levels`.
pub fn series_term(model: &CurveModel, t: &Rational, r: u32) -> Result<Polynomial> {
    let hi = eval_dyadic(model, &p_sequence(model, t, r + 1)?)?;
    let lo = eval_dyadic(model, &p_sequence(model, t, r)?)?;
    Ok(&hi - &lo)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleRow {
    pub t: Rational,
    pub x: Rational,
    pub value: Rational,
    pub error_bound: Rational,
}

/// Evenly spaced grid `j / (points - 1)` on `[0, 1]`; a single point is `0`.
pub fn unit_grid(points: usize) -> Vec<Rational> {
    match points {
        0 => Vec::new(),
        1 => vec![Rational::zero()],
        _ => (0..points)
            .map(|j| Rational::new((j as i64).into(), (points as i64 - 1).into()))
            .collect(),
    }
}

/// One row per `(t, x)`, `t`-major.
pub fn sample_grid(
    model: &CurveModel,
    ts: &[Rational],
    xs: &[Rational],
    r_max: u32,
) -> Result<Vec<SampleRow>> {
    let mut rows = Vec::with_capacity(ts.len() * xs.len());
    for t in ts {
        let anchor = p_sequence(model, t, r_max)?;
        let f = eval_dyadic(model, &anchor)?;
        let error_bound = truncation_bound(model, t, r_max) + conversion_allowance();
        for x in xs {
            check_unit(x, "x")?;
            rows.push(SampleRow {
                t: t.clone(),
                x: x.clone(),
                value: f.eval(x),
                error_bound: error_bound.clone(),
            });
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "t,x,value,error_bound";

/// CSV with header `t,x,value,error_bound`; numbers as 17-significant-digit
/// decimals.
pub fn write_csv<W: Write>(rows: &[SampleRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{}",
            to_decimal(&row.t, 17),
            to_decimal(&row.x, 17),
            to_decimal(&row.value, 17),
            to_decimal(&row.error_bound, 17)
        )?;
    }
    Ok(())
}

/// Odd `i` with `t ∈ [(i-1)/2^n, (i+1)/2^n]` (for `n >= 1`).
pub fn bracketing_odd(t: &Rational, n: u32) -> Result<BigUint> {
    check_unit(t, "t")?;
    assert!(n >= 1);
    let top = BigUint::one() << n;
    let j = (t * from_biguint(&top))
        .floor()
        .to_integer()
        .to_biguint()
        .expect("nonnegative");
    let i = if j.is_odd() { j } else { j + 1u8 };
    Ok(if i >= top { top - 1u8 } else { i })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;
    use crate::model::build_model;
    use crate::omega::OmegaSpec;

    fn model(levels: u32) -> CurveModel {
        build_model(OmegaSpec::Constant(int(1)), levels).unwrap()
    }

    fn d(i: u64, n: u32) -> Dyadic {
        Dyadic::from_u64(i, n).unwrap()
    }

    fn pi(cs: &[(i64, i64)]) -> Polynomial {
        Polynomial::from_coeffs(cs.iter().map(|&(a, b)| rat(a, b)).collect())
    }

    #[test]
    fn words_of_intervals() {
        let m = model(1);
        assert_eq!(
            interval_word(&m, 3, &BigUint::from(0u8))
                .unwrap()
                .to_string(),
            "L"
        );
        assert_eq!(
            interval_word(&m, 3, &BigUint::from(7u8))
                .unwrap()
                .to_string(),
            "R"
        );
        assert_eq!(
            interval_word(&m, 2, &BigUint::from(1u8))
                .unwrap()
                .to_string(),
            ""
        );
        assert!(interval_word(&m, 4, &BigUint::from(0u8)).is_err());
        assert!(interval_word(&m, 3, &BigUint::from(8u8)).is_err());
    }

    #[test]
    fn constant_prefix() {
        let m = model(1);
        for n in 1..=2u32 {
            for i in 0..=(1u64 << n) {
                let f = eval_dyadic(&m, &d(i, n)).unwrap();
                assert_eq!(f, Polynomial::constant(rat(i as i64, 1 << n)));
            }
        }
    }

    #[test]
    fn first_change_point_two_routes() {
        let m = model(1);
        let descent = eval_dyadic(&m, &d(1, 3)).unwrap();
        // direct: U_1 F_0 + (1 - U_1) F_{1/4} with F_{1/4} = 1/4
        let direct = &(&Polynomial::one() - &Polynomial::x()) * &Polynomial::constant(rat(1, 4));
        assert_eq!(descent, direct);
        assert_eq!(descent, pi(&[(1, 4), (-1, 4)]));
        assert_eq!(eval_dyadic(&m, &Dyadic::one()).unwrap(), Polynomial::one());
        assert!(eval_dyadic(&m, &d(1, 4)).is_err());
    }

    #[test]
    fn differences() {
        let m = model(1);
        assert_eq!(
            consecutive_difference(&m, 2, &BigUint::from(3u8)).unwrap(),
            Polynomial::constant(rat(1, 4))
        );
        assert_eq!(
            consecutive_difference(&m, 3, &BigUint::from(1u8)).unwrap(),
            pi(&[(1, 4), (-1, 4)])
        );
        assert!(consecutive_difference(&m, 3, &BigUint::zero()).is_err());
        assert!(consecutive_difference(&m, 3, &BigUint::from(9u8)).is_err());
    }

    #[test]
    fn projections() {
        let m = model(2);
        assert_eq!(p_sequence(&m, &rat(1, 3), 1).unwrap(), d(1, 2));
        assert_eq!(p_sequence(&m, &rat(3, 8), 1).unwrap(), d(1, 2));
        assert_eq!(p_sequence(&m, &rat(3, 4), 1).unwrap(), d(3, 2));
        assert_eq!(p_sequence(&m, &rat(0, 1), 2).unwrap(), Dyadic::zero());
        assert_eq!(p_sequence(&m, &rat(1, 1), 2).unwrap(), Dyadic::one());
        // generation n_2 - 1 = 8
        assert_eq!(p_sequence(&m, &rat(1, 3), 2).unwrap(), d(85, 8));
        assert!(p_sequence(&m, &rat(1, 3), 3).is_err());
        assert!(p_sequence(&m, &rat(4, 3), 1).is_err());
    }

    #[test]
    fn real_evaluation() {
        let m = model(3);
        let r = eval_real(&m, &rat(1, 4), &rat(7, 10), 1).unwrap();
        assert_eq!(r.value, rat(1, 4));
        assert_eq!(r.truncation, int(0));
        let z = eval_real(&m, &int(0), &rat(1, 2), 3).unwrap();
        assert_eq!(z.value, int(0));
        assert_eq!(z.truncation, int(0));
        let a = eval_real(&m, &rat(1, 3), &rat(1, 2), 3).unwrap();
        let b = eval_real(&m, &rat(1, 3), &rat(1, 2), 2).unwrap();
        assert_eq!(a.truncation, rat(1, 4));
        assert!((&a.value - &b.value).abs() <= b.truncation);
    }

    #[test]
    fn complex_evaluation() {
        let m = model(3);
        let zero = Complex::new(int(0), int(0));
        let r = eval_complex(&m, &rat(1, 4), &zero, 1).unwrap();
        assert_eq!(r.value, Complex::new(rat(1, 4), int(0)));
        let one = Complex::new(int(1), int(0));
        let c = eval_complex(&m, &rat(1, 3), &one, 3).unwrap();
        let x = eval_real(&m, &rat(1, 3), &int(1), 3).unwrap();
        assert_eq!(c.value.re, x.value);
        let far = Complex::new(int(2), int(1));
        assert!(eval_complex(&m, &rat(1, 3), &far, 2).is_err());
        assert!(eval_complex(&m, &rat(1, 3), &far, 3).is_ok());
    }

    #[test]
    fn derivative_bounds() {
        let m = model(3);
        let b = derivative_bound(&m, &rat(1, 4), 1, 1).unwrap();
        assert_eq!(b.head, int(0));
        assert_eq!(b.total(), int(1));
        let far = derivative_bound(&m, &rat(1, 3), 50, 3).unwrap();
        assert_eq!(far.head, int(0));
        assert_eq!(far.total(), rat(1, 4));
    }

    #[test]
    fn brackets() {
        assert_eq!(bracketing_odd(&rat(1, 3), 3).unwrap(), BigUint::from(3u8));
        assert_eq!(bracketing_odd(&int(0), 3).unwrap(), BigUint::from(1u8));
        assert_eq!(bracketing_odd(&int(1), 3).unwrap(), BigUint::from(7u8));
        assert_eq!(bracketing_odd(&rat(1, 4), 3).unwrap(), BigUint::from(3u8));
    }

    #[test]
    fn csv_layout() {
        let m = model(2);
        let ts = [int(0), rat(1, 4)];
        let rows = sample_grid(&m, &ts, &unit_grid(3), 2).unwrap();
        assert_eq!(rows.len(), 6);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(
            lines[4],
            "0.25000000000000000,0,0.25000000000000000,0.00000000000000088817841970012523"
        );
        let mut empty = Vec::new();
        write_csv(&[], &mut empty).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap(), "t,x,value,error_bound\n");
    }
}
