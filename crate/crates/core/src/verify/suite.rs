use std::fmt;
use std::str::FromStr;

use num_bigint::{BigUint, RandBigInt};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::exact::rational::rat;
use crate::model::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Shapes,
    Bisection,
    DirectionChange,
    Isometry,
    TermBounds,
    DerivativeBounds,
    Convergence,
    Secant,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Shapes,
        Suite::Bisection,
        Suite::DirectionChange,
        Suite::Isometry,
        Suite::TermBounds,
        Suite::DerivativeBounds,
        Suite::Convergence,
        Suite::Secant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Shapes => "shapes",
            Suite::Bisection => "bisection",
            Suite::DirectionChange => "direction-change",
            Suite::Isometry => "isometry",
            Suite::TermBounds => "term-bounds",
            Suite::DerivativeBounds => "derivative-bounds",
            Suite::Convergence => "convergence",
            Suite::Secant => "secant",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub suites: Vec<Suite>,
    /// Enclosure width relative to the quantity's scale `2^-n`.
    pub rel_eps: Rational,
    pub seed: u64,
    /// Bisection is exhaustive up to this generation, sampled beyond it.
    pub exhaustive_cap: u32,
    /// Random samples per generation (bisection) or per suite (midpoint fills).
    pub samples: usize,
    pub isometry_pairs: usize,
    /// Parameters for the derivative, convergence and secant suites.
    pub ts: Vec<Rational>,
    /// Highest derivative order checked; `None` means the leaf degree.
    pub m_max: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suites: Suite::ALL.to_vec(),
            rel_eps: pow2(-20),
            seed: 0,
            exhaustive_cap: 10,
            samples: 8,
            isometry_pairs: 50,
            ts: vec![rat(1, 3), rat(2, 7), rat(5, 11), rat(1, 4), int(0), int(1)],
            m_max: None,
        }
    }
}

fn random_below_pow2(rng: &mut ChaCha8Rng, n: u32) -> BigUint {
    rng.gen_biguint_below(&(BigUint::one() << n))
}

fn random_odd(rng: &mut ChaCha8Rng, n: u32) -> BigUint {
    // odd numbers below 2^n are 2j + 1 with j < 2^(n-1)
    (random_below_pow2(rng, n - 1) << 1u8) + 1u8
}

/// Odd `i` at generation `n_r` whose enclosing generation-`(n_r - 1)`
/// interval has shape `word` (length `r - 1`).
pub(super) fn representative_index(model: &CurveModel, r: u32, word: &Word) -> BigUint {
    let n = model.schedule.n(r);
    let mut j = BigUint::from(0u8);
    for (s, side) in word.sides().iter().enumerate() {
        if side.bit() {
            j.set_bit((n - 1 - model.schedule.n(s as u32 + 1)) as u64, true);
        }
    }
    (j << 1u8) + 1u8
}

/// Failure report for a check that could not even run.
fn errored(check: &str, err: Error) -> CheckReport {
    let mut rep = CheckReport::new(check);
    rep.fail(err.to_string());
    rep
}

fn push(out: &mut Vec<CheckReport>, check: &str, result: Result<CheckReport>) {
    out.push(result.unwrap_or_else(|e| errored(check, e)));
}

/// Runs the selected suites; deterministic for a fixed seed.
pub fn run_suite(model: &CurveModel, config: &SuiteConfig) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::new();
    let max_n = model.max_generation();
    let levels = model.levels();
    let m_max = config
        .m_max
        .unwrap_or_else(|| (1usize << levels) - 1)
        .max(1);

    for suite in &config.suites {
        match suite {
            Suite::Shapes => out.push(check_shapes(model)),
            Suite::Bisection => {
                for n in 1..=max_n {
                    if n <= config.exhaustive_cap {
                        for i in (1u64..(1u64 << n)).step_by(2) {
                            push(
                                &mut out,
                                "bisection",
                                check_bisection(model, n, &BigUint::from(i)),
                            );
                        }
                    } else {
                        for _ in 0..config.samples {
                            let i = random_odd(&mut rng, n);
                            push(&mut out, "bisection", check_bisection(model, n, &i));
                        }
                    }
                }
            }
            Suite::DirectionChange => {
                for r in 1..=levels {
                    let n = model.schedule.n(r);
                    let eps = &config.rel_eps * pow2(-(n as i64));
                    for word in Word::all_of_len(r as usize - 1) {
                        let i = representative_index(model, r, &word);
                        push(
                            &mut out,
                            "direction-change",
                            check_direction_change(model, r, &i, &eps)
                                .map(|rep| rep.param("word", &word)),
                        );
                    }
                }
                let flat: Vec<u32> = (1..=max_n)
                    .filter(|&n| model.schedule.level_at(n).is_none())
                    .collect();
                for _ in 0..config.samples {
                    let n = flat[rng.gen_range(0..flat.len())];
                    let i = random_odd(&mut rng, n);
                    push(&mut out, "midpoint-fill", check_midpoint_fill(model, n, &i));
                }
            }
            Suite::Isometry => {
                push(
                    &mut out,
                    "isometry",
                    check_isometry(model, &Dyadic::zero(), &Dyadic::one()),
                );
                let mut done = 0;
                while done < config.isometry_pairs {
                    let a = random_dyadic(&mut rng, max_n);
                    let b = random_dyadic(&mut rng, max_n);
                    let (s, t) = match a.cmp(&b) {
                        std::cmp::Ordering::Less => (a, b),
                        std::cmp::Ordering::Greater => (b, a),
                        std::cmp::Ordering::Equal => continue,
                    };
                    push(&mut out, "isometry", check_isometry(model, &s, &t));
                    done += 1;
                }
            }
            Suite::TermBounds => {
                for r in 1..=levels {
                    push(&mut out, "term-bounds", check_term_bounds(model, r));
                }
            }
            Suite::DerivativeBounds => {
                for t in &config.ts {
                    push(
                        &mut out,
                        "derivative-bounds",
                        check_derivative_bounds(model, t, m_max),
                    );
                }
            }
            Suite::Convergence => {
                for t in &config.ts {
                    push(&mut out, "convergence", check_series_terms(model, t));
                }
            }
            Suite::Secant => {
                for t in &config.ts {
                    push(&mut out, "secant", check_secant(model, t, &config.rel_eps));
                }
            }
        }
    }
    SuiteReport::from_reports(out)
}

/// Uniform generation in `0..=max_n`, then a uniform numerator in `0..=2^n`.
pub(crate) fn random_dyadic(rng: &mut ChaCha8Rng, max_n: u32) -> Dyadic {
    let n = rng.gen_range(0..=max_n);
    let i = rng.gen_biguint_below(&((BigUint::one() << n) + 1u8));
    Dyadic::new(i, n).expect("numerator is at most 2^n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_model;
    use crate::omega::OmegaSpec;

    #[test]
    fn representative_words_match() {
        let m = build_model(OmegaSpec::Constant(int(1)), 3).unwrap();
        for r in 1..=3u32 {
            let n = m.schedule.n(r);
            for word in Word::all_of_len(r as usize - 1) {
                let i = representative_index(&m, r, &word);
                let got = crate::curve::interval_word(&m, n - 1, &(&i >> 1u8)).unwrap();
                assert_eq!(got, word);
            }
        }
    }

    #[test]
    fn full_suite_passes_small_model() {
        let m = build_model(OmegaSpec::Constant(int(1)), 2).unwrap();
        let config = SuiteConfig {
            isometry_pairs: 10,
            ..SuiteConfig::default()
        };
        let report = run_suite(&m, &config);
        assert!(
            report.is_ok(false),
            "{:#?}",
            report.failures().collect::<Vec<_>>()
        );
        assert_eq!(report.summary.total, report.reports.len());
    }

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn deterministic_reports() {
        let m = build_model(OmegaSpec::Constant(int(1)), 2).unwrap();
        let config = SuiteConfig {
            isometry_pairs: 5,
            seed: 7,
            ..SuiteConfig::default()
        };
        assert_eq!(
            run_suite(&m, &config).to_json(),
            run_suite(&m, &config).to_json()
        );
    }
}
