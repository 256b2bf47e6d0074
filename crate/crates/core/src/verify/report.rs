use std::collections::BTreeMap;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::exact::rational::format_rational;
use crate::exact::{Enclosure, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    PassExact,
    PassEnclosure,
    /// A coarse bound could not settle the claim. Never a refutation.
    Inconclusive,
    /// An exact-arithmetic contradiction.
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::PassExact => "pass-exact",
            Verdict::PassEnclosure => "pass-enclosure",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Fail => "fail",
        }
    }

    pub fn is_pass(self) -> bool {
        matches!(self, Verdict::PassExact | Verdict::PassEnclosure)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Exact(Rational),
    Interval(Enclosure),
    Text(String),
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Witness::Exact(r) => s.serialize_str(&format_rational(r)),
            Witness::Text(t) => s.serialize_str(t),
            Witness::Interval(e) => {
                let mut map = s.serialize_map(Some(3))?;
                map.serialize_entry("lo", &format_rational(e.lo()))?;
                map.serialize_entry("hi", &format_rational(e.hi()))?;
                map.serialize_entry("width", &format_rational(&e.width()))?;
                map.end()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub params: BTreeMap<String, String>,
    pub verdict: Verdict,
    pub witness: BTreeMap<String, Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn new(check: &str) -> Self {
        Self {
            check: check.to_string(),
            params: BTreeMap::new(),
            verdict: Verdict::PassExact,
            witness: BTreeMap::new(),
            note: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn exact(&mut self, key: impl Into<String>, value: Rational) {
        self.witness.insert(key.into(), Witness::Exact(value));
    }

    pub fn interval(&mut self, key: impl Into<String>, value: Enclosure) {
        self.witness.insert(key.into(), Witness::Interval(value));
    }

    /// Marks the report failed; the first note is kept.
    pub fn fail(&mut self, note: impl Into<String>) {
        self.verdict = Verdict::Fail;
        self.note.get_or_insert_with(|| note.into());
    }

    pub fn with_verdict(mut self, verdict: Verdict) -> Self {
        self.verdict = verdict;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    #[serde(rename = "pass-exact")]
    pub pass_exact: usize,
    #[serde(rename = "pass-enclosure")]
    pub pass_enclosure: usize,
    pub inconclusive: usize,
    pub fail: usize,
    pub total: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub reports: Vec<CheckReport>,
    pub summary: Summary,
}

impl SuiteReport {
    pub fn from_reports(reports: Vec<CheckReport>) -> Self {
        let mut summary = Summary {
            total: reports.len(),
            ..Summary::default()
        };
        for r in &reports {
            match r.verdict {
                Verdict::PassExact => summary.pass_exact += 1,
                Verdict::PassEnclosure => summary.pass_enclosure += 1,
                Verdict::Inconclusive => summary.inconclusive += 1,
                Verdict::Fail => summary.fail += 1,
            }
        }
        Self { reports, summary }
    }

    /// Ok iff nothing failed and, unless `allow_inconclusive`, nothing is
    /// inconclusive.
    pub fn is_ok(&self, allow_inconclusive: bool) -> bool {
        self.summary.fail == 0 && (allow_inconclusive || self.summary.inconclusive == 0)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckReport> {
        self.reports.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}
