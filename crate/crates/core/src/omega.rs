//! The derivative-bound sequence `ω_m > 0`, `m >= 1`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::exact::rational::{format_rational, parse_rational};
use crate::exact::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OmegaSpec {
    /// `ω_m = c`.
    Constant(Rational),
    /// `ω_m = ρ^m`.
    Geometric(Rational),
    /// `ω_m = 1 / m!`.
    FactorialReciprocal,
    /// `ω_m = table[m - 1]`, and the last entry repeats for larger `m`.
    ExplicitTable(Vec<Rational>),
}

impl OmegaSpec {
    pub fn new(kind: &str, params: Vec<Rational>) -> Result<Self> {
        let spec = match kind {
            "constant" => match params.as_slice() {
                [c] => OmegaSpec::Constant(c.clone()),
                _ => return Err(Error::Omega("constant takes exactly one parameter".into())),
            },
            "geometric" => match params.as_slice() {
                [rho] => OmegaSpec::Geometric(rho.clone()),
                _ => return Err(Error::Omega("geometric takes exactly one parameter".into())),
            },
            "factorial-reciprocal" => {
                if !params.is_empty() {
                    return Err(Error::Omega(
                        "factorial-reciprocal takes no parameters".into(),
                    ));
                }
                OmegaSpec::FactorialReciprocal
            }
            "explicit-table" => OmegaSpec::ExplicitTable(params),
            other => return Err(Error::Omega(format!("unknown kind `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |r: &Rational| r.is_positive();
        let ok = match self {
            OmegaSpec::Constant(c) => positive(c),
            OmegaSpec::Geometric(rho) => positive(rho),
            OmegaSpec::FactorialReciprocal => true,
            OmegaSpec::ExplicitTable(t) => !t.is_empty() && t.iter().all(positive),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Omega(format!(
                "{self}: every ω_m must be positive (and a table must be non-empty)"
            )))
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            OmegaSpec::Constant(_) => "constant",
            OmegaSpec::Geometric(_) => "geometric",
            OmegaSpec::FactorialReciprocal => "factorial-reciprocal",
            OmegaSpec::ExplicitTable(_) => "explicit-table",
        }
    }

    pub fn params(&self) -> Vec<Rational> {
        match self {
            OmegaSpec::Constant(c) => vec![c.clone()],
            OmegaSpec::Geometric(rho) => vec![rho.clone()],
            OmegaSpec::FactorialReciprocal => Vec::new(),
            OmegaSpec::ExplicitTable(t) => t.clone(),
        }
    }

    /// `ω_m` for `m >= 1`.
    pub fn omega(&self, m: usize) -> Rational {
        assert!(m >= 1, "ω is indexed from 1");
        match self {
            OmegaSpec::Constant(c) => c.clone(),
            OmegaSpec::Geometric(rho) => num_traits::pow(rho.clone(), m),
            OmegaSpec::FactorialReciprocal => {
                let f: BigInt = (1..=m).map(BigInt::from).product();
                Rational::new(BigInt::one(), f)
            }
            OmegaSpec::ExplicitTable(t) => t[(m - 1).min(t.len() - 1)].clone(),
        }
    }
}

impl fmt::Display for OmegaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind())?;
        let params = self.params();
        if !params.is_empty() {
            let joined: Vec<String> = params.iter().map(format_rational).collect();
            write!(f, ":{}", joined.join(","))?;
        }
        Ok(())
    }
}

/// Parses `constant:1`, `geometric:1/2`, `factorial-reciprocal`,
/// `explicit-table:1,1/2,1/4`.
impl FromStr for OmegaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let params = rest
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| parse_rational(p).map_err(Error::Omega))
            .collect::<Result<Vec<_>>>()?;
        OmegaSpec::new(kind.trim(), params)
    }
}
