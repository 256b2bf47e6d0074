//! Machine checks of the construction's claims on a built model.
//!
//! Exact identities are decided in rational arithmetic and yield
//! `pass-exact` or `fail`. Quantities that need an enclosure yield
//! `pass-enclosure`. Claims that rest on coefficient-sum over-estimates yield
//! `inconclusive` when the estimate is too coarse, never `fail`.

mod certificate;
mod report;
mod suite;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::curve::{
    bracketing_odd, derivative_bound, eval_dyadic, interval_word, p_sequence, series_term,
};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::exact::rational::{format_rational, int, pow2};
use crate::exact::{integral_abs_split, Enclosure, Polynomial, Rational};
use crate::model::CurveModel;

pub use certificate::{certify_path, dyadic_tiling, Certificate};
pub use report::{CheckReport, SuiteReport, Summary, Verdict, Witness};
pub use suite::{run_suite, Suite, SuiteConfig};

fn odd_point(model: &CurveModel, n: u32, i: &BigUint) -> Result<()> {
    if n == 0 || n > model.max_generation() {
        return Err(Error::GenerationOutOfRange {
            generation: n,
            max: model.max_generation(),
        });
    }
    if i.is_even() || *i >= BigUint::one() << n {
        return Err(Error::IndexOutOfRange(format!(
            "i = {i} must be odd and below 2^{n}"
        )));
    }
    Ok(())
}

fn f_at(model: &CurveModel, i: &BigUint, n: u32) -> Result<Polynomial> {
    eval_dyadic(model, &Dyadic::new(i.clone(), n)?)
}

/// `(F_{(i-1)/2^n}, F_{i/2^n}, F_{(i+1)/2^n})`.
fn triple(model: &CurveModel, n: u32, i: &BigUint) -> Result<[Polynomial; 3]> {
    Ok([
        f_at(model, &(i - 1u8), n)?,
        f_at(model, i, n)?,
        f_at(model, &(i + 1u8), n)?,
    ])
}

/// `F_{(i-1)/2^n} + F_{(i+1)/2^n} - 2 F_{i/2^n}` for odd `i`.
pub fn second_difference(model: &CurveModel, n: u32, i: &BigUint) -> Result<Polynomial> {
    odd_point(model, n, i)?;
    let [a, b, c] = triple(model, n, i)?;
    Ok(&(&a + &c) - &b.scale(&int(2)))
}

/// Both halves around `i / 2^n` carry exactly `2^-n` of mass.
pub fn check_bisection(model: &CurveModel, n: u32, i: &BigUint) -> Result<CheckReport> {
    odd_point(model, n, i)?;
    let [a, b, c] = triple(model, n, i)?;
    let left = (&b - &a).integral_01();
    let right = (&c - &b).integral_01();
    let target = pow2(-(n as i64));
    let mut report = CheckReport::new("bisection").param("n", n).param("i", i);
    if left != target || right != target {
        report.fail(format!("expected both masses {}", format_rational(&target)));
    }
    report.exact("left_mass", left);
    report.exact("right_mass", right);
    Ok(report)
}

/// Enclosure of `‖F_{(i-1)/2^n} + F_{(i+1)/2^n} - 2F_{i/2^n}‖_1` at a
/// direction-change generation `n = n_r`, after confirming exactly that the
/// second difference equals `(2U - 1) G` with `G = F_{(i+1)/2^n} - F_{(i-1)/2^n}`
/// and `U` the cumulative of the enclosing coarse interval's shape.
fn direction_change_norm(
    model: &CurveModel,
    r: u32,
    i: &BigUint,
    eps: &Rational,
) -> Result<std::result::Result<Enclosure, String>> {
    if r == 0 || r > model.levels() {
        return Err(Error::LevelIndexOutOfRange {
            r,
            levels: model.levels(),
        });
    }
    if eps <= &Rational::zero() {
        return Err(Error::NonpositiveTolerance);
    }
    let n = model.schedule.n(r);
    odd_point(model, n, i)?;
    let [a, b, c] = triple(model, n, i)?;
    let big_g = &c - &a;
    let second = &(&a + &c) - &b.scale(&int(2));
    let word = interval_word(model, n - 1, &(i >> 1u8))?;
    let u = &model
        .node(&word)
        .ok_or_else(|| Error::Consistency(format!("missing shape `{word}`")))?
        .u;
    let expected = &(&u.scale(&int(2)) - &Polynomial::one()) * &big_g;
    if second != expected {
        return Ok(Err("second difference is not (2U - 1) G".into()));
    }
    Ok(integral_abs_split(u, &big_g, eps).map_err(|e| e.to_string()))
}

/// The second difference at `i / 2^{n_r}` has L1 norm `2^{-n_r}`.
pub fn check_direction_change(
    model: &CurveModel,
    r: u32,
    i: &BigUint,
    eps: &Rational,
) -> Result<CheckReport> {
    let norm = direction_change_norm(model, r, i, eps)?;
    let n = model.schedule.n(r);
    let target = pow2(-(n as i64));
    let mut report = CheckReport::new("direction-change")
        .param("r", r)
        .param("n", n)
        .param("i", i)
        .param("eps", format_rational(eps))
        .with_verdict(Verdict::PassEnclosure);
    match norm {
        Ok(enc) => {
            if !enc.contains(&target) {
                report.fail(format!("enclosure excludes {}", format_rational(&target)));
            } else if enc.width() > *eps {
                report.fail("enclosure wider than requested");
            }
            report.interval("norm", enc);
        }
        Err(why) => report.fail(why),
    }
    report.exact("expected", target);
    Ok(report)
}

/// Away from direction-change generations the second difference vanishes.
pub fn check_midpoint_fill(model: &CurveModel, n: u32, i: &BigUint) -> Result<CheckReport> {
    if model.schedule.level_at(n).is_some() {
        return Err(Error::Precondition(format!(
            "generation {n} is a direction-change generation"
        )));
    }
    let second = second_difference(model, n, i)?;
    let mut report = CheckReport::new("midpoint-fill")
        .param("n", n)
        .param("i", i);
    if !second.is_zero() {
        report.fail("second difference is not identically zero");
    }
    report.exact("sup_bound", second.sup_bound_unit());
    Ok(report)
}

/// `‖F_t - F_s‖_1 = t - s`: the integral matches exactly and `F_t - F_s`
/// carries a structural nonnegativity certificate.
pub fn check_isometry(model: &CurveModel, s: &Dyadic, t: &Dyadic) -> Result<CheckReport> {
    if s >= t {
        return Err(Error::Precondition("isometry check needs s < t".into()));
    }
    let diff = &eval_dyadic(model, t)? - &eval_dyadic(model, s)?;
    let integral = diff.integral_01();
    let gap = t.value() - s.value();
    let mut report = CheckReport::new("isometry")
        .param("s", format_rational(&s.value()))
        .param("t", format_rational(&t.value()));
    if integral != gap {
        report.fail("integral of F_t - F_s differs from t - s");
    }
    let cert = Certificate::build(model, s, t)?;
    if let Err(why) = cert.verify(model, &diff) {
        report.fail(why);
    }
    report.exact("integral", integral);
    report.exact("t_minus_s", gap);
    report.witness.insert(
        "certificate_pieces".into(),
        Witness::Text(cert.pieces.len().to_string()),
    );
    Ok(report)
}

/// Every shape satisfies its invariants: unit mass, `U = ∫g` with
/// `U(0) = 0`, `U(1) = 1`, degree `2^depth - 1`, and the split-product link
/// to its parent.
pub fn check_shapes(model: &CurveModel) -> CheckReport {
    let mut report = CheckReport::new("shapes");
    let nodes = model.nodes();
    for node in &nodes {
        let depth = node.depth();
        if node.g.integral_01() != Rational::one() {
            report.fail(format!("`{}` does not have unit mass", node.word));
        }
        if node.g.degree() != Some((1usize << depth) - 1) {
            report.fail(format!("`{}` has degree {:?}", node.word, node.g.degree()));
        }
        if node.is_leaf() != (depth == model.levels() as usize) {
            report.fail(format!("tree is not complete at `{}`", node.word));
        }
        if depth == model.levels() as usize {
            if let Err(why) = certify_path(model, &node.word) {
                report.fail(why);
            }
        }
    }
    report
        .witness
        .insert("nodes".into(), Witness::Text(nodes.len().to_string()));
    report
}

/// Derivative and disc bounds of every generation-`n_r` consecutive
/// difference `2^{-n_r} g_w`: `≤ ω_m / 2^r` on `[0, 1]` and `≤ 2^{-r}` on
/// the disc of radius `r`.
pub fn check_term_bounds(model: &CurveModel, r: u32) -> Result<CheckReport> {
    if r == 0 || r > model.levels() {
        return Err(Error::LevelIndexOutOfRange {
            r,
            levels: model.levels(),
        });
    }
    let n = model.schedule.n(r);
    let scale = pow2(-(n as i64));
    let limit = pow2(-(r as i64));
    let radius = int(r as i64);
    let mut worst_derivative = Rational::zero();
    let mut worst_disc = Rational::zero();
    for node in model.nodes_at_depth(r as usize) {
        let diff = node.g.scale(&scale);
        for m in 1..=diff.degree().unwrap_or(0) {
            let ratio = diff.derivative(m).sup_bound_unit() / model.omega.omega(m);
            worst_derivative = worst_derivative.max(ratio);
        }
        worst_disc = worst_disc.max(diff.sup_bound_disc(&radius));
    }
    let mut report = CheckReport::new("term-bounds").param("r", r).param("n", n);
    if worst_derivative > limit {
        report.fail("a derivative bound exceeds ω_m / 2^r");
    }
    if worst_disc > limit {
        report.fail("a disc bound exceeds 2^-r");
    }
    report.exact("max_derivative_over_omega", worst_derivative);
    report.exact("max_disc_bound", worst_disc);
    report.exact("limit", limit);
    Ok(report)
}

/// `sup_{[0,1]} |F_t^{(m)}| ≤ ω_m` for `m = 1..=m_max` using the full
/// built series.
pub fn check_derivative_bounds(
    model: &CurveModel,
    t: &Rational,
    m_max: usize,
) -> Result<CheckReport> {
    if m_max == 0 {
        return Err(Error::Precondition("m_max must be at least 1".into()));
    }
    let r_max = model.levels();
    let mut report = CheckReport::new("derivative-bounds")
        .param("t", format_rational(t))
        .param("m_max", m_max)
        .with_verdict(Verdict::PassEnclosure);
    let mut coarse = Vec::new();
    for m in 1..=m_max {
        let bound = derivative_bound(model, t, m, r_max)?.total();
        if bound > model.omega.omega(m) {
            coarse.push(m);
        }
        report.exact(format!("m={m:02}"), bound);
    }
    if !coarse.is_empty() {
        report.verdict = Verdict::Inconclusive;
        report.note = Some(format!(
            "coefficient-sum bound exceeds ω_m for m in {coarse:?}"
        ));
    }
    Ok(report)
}

/// Successive partial sums `F_{p(r+1,t)} - F_{p(r,t)}` obey the disc bound
/// `2^{-r}` on radius `r` and the derivative bounds `ω_m / 2^r`, for
/// `r = 1..levels - 1`.
pub fn check_series_terms(model: &CurveModel, t: &Rational) -> Result<CheckReport> {
    p_sequence(model, t, 1)?;
    let mut report = CheckReport::new("convergence").param("t", format_rational(t));
    for r in 1..model.levels() {
        let term = series_term(model, t, r)?;
        let limit = pow2(-(r as i64));
        let disc = term.sup_bound_disc(&int(r as i64));
        if disc > limit {
            report.fail(format!("term {r} exceeds 2^-{r} on the disc"));
        }
        for m in 1..=term.degree().unwrap_or(0) {
            let b = term.derivative(m).sup_bound_unit();
            if b > &model.omega.omega(m) * &limit {
                report.fail(format!("term {r}, derivative {m} exceeds ω_m / 2^{r}"));
            }
        }
        report.exact(format!("r={r:02}.disc"), disc);
    }
    Ok(report)
}

/// For each level `r`, the scaled second difference
/// `2^{n_r} ‖F_{(i-1)/2^{n_r}} + F_{(i+1)/2^{n_r}} - 2F_{i/2^{n_r}}‖_1`
/// at the odd `i` bracketing `t`. `rel_eps` is the requested width of the
/// scaled enclosure.
pub fn secant_probe(
    model: &CurveModel,
    t: &Rational,
    rel_eps: &Rational,
) -> Result<Vec<(u32, std::result::Result<Enclosure, String>)>> {
    (1..=model.levels())
        .map(|r| {
            let n = model.schedule.n(r);
            let i = bracketing_odd(t, n)?;
            let scale = pow2(n as i64);
            let enc = direction_change_norm(model, r, &i, &(rel_eps / &scale))?;
            Ok((r, enc.map(|e| e.scale(&scale))))
        })
        .collect()
}

pub fn check_secant(model: &CurveModel, t: &Rational, rel_eps: &Rational) -> Result<CheckReport> {
    let mut report = CheckReport::new("secant")
        .param("t", format_rational(t))
        .with_verdict(Verdict::PassEnclosure);
    for (r, enc) in secant_probe(model, t, rel_eps)? {
        match enc {
            Ok(e) => {
                if !e.contains(&Rational::one()) {
                    report.fail(format!("level {r}: scaled second difference excludes 1"));
                }
                report.interval(format!("r={r:02}"), e);
            }
            Err(why) => report.fail(format!("level {r}: {why}")),
        }
    }
    Ok(report)
}

/// `‖Σ_k c_k 1_{[0, a_k]}‖_1` on `[0, 1]`, exactly, for endpoints in `[0, 1]`.
pub fn indicator_combination_l1(terms: &[(Rational, Rational)]) -> Rational {
    let mut cuts: Vec<&Rational> = terms.iter().map(|(_, a)| a).collect();
    cuts.sort();
    cuts.dedup();
    let mut total = Rational::zero();
    let mut prev = Rational::zero();
    for cut in cuts {
        // value on (prev, cut): terms whose interval covers it
        let value: Rational = terms
            .iter()
            .filter(|(_, a)| a >= cut)
            .map(|(c, _)| c.clone())
            .sum();
        total += num_traits::Signed::abs(&value) * (cut - &prev);
        prev = cut.clone();
    }
    total
}

/// Clarkson's curve `t ↦ 1_{[0,t]}`:
/// `‖1_{[0,(i-1)/2^n]} + 1_{[0,(i+1)/2^n]} - 2·1_{[0,i/2^n]}‖_1`.
pub fn clarkson_second_difference(n: u32, i: u64) -> Result<Rational> {
    if i.is_multiple_of(2) || n == 0 || n > 62 || i >= 1u64 << n {
        return Err(Error::IndexOutOfRange(format!(
            "i = {i} must be odd and below 2^{n}"
        )));
    }
    let at = |j: u64| Rational::new((j as i64).into(), ((1u64 << n) as i64).into());
    Ok(indicator_combination_l1(&[
        (int(1), at(i - 1)),
        (int(1), at(i + 1)),
        (int(-2), at(i)),
    ]))
}
