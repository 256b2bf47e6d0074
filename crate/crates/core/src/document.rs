//! JSON model document.
//!
//! ```json
//! { "omega": {"kind": "constant", "params": ["1/1"]},
//!   "levels": 1,
//!   "schedule": [{"r": 1, "k": 2, "n": 3}],
//!   "shapes": [{"word": "", "g": ["1/1"], "U": ["0/1", "1/1"]}, ...] }
//! ```
//!
//! Every rational is a `"p/q"` string and shapes are listed in breadth-first
//! word order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{format_rational, parse_rational};
use crate::exact::Polynomial;
use crate::model::{CurveModel, Schedule, ShapeNode, Word};
use crate::omega::OmegaSpec;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaDoc {
    pub kind: String,
    pub params: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleDoc {
    pub r: u32,
    pub k: u32,
    pub n: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeDoc {
    pub word: String,
    pub g: Vec<String>,
    #[serde(rename = "U")]
    pub u: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDoc {
    pub omega: OmegaDoc,
    pub levels: u32,
    pub schedule: Vec<ScheduleDoc>,
    pub shapes: Vec<ShapeDoc>,
}

impl From<&CurveModel> for ModelDoc {
    fn from(model: &CurveModel) -> Self {
        ModelDoc {
            omega: OmegaDoc {
                kind: model.omega.kind().to_string(),
                params: model.omega.params().iter().map(format_rational).collect(),
            },
            levels: model.levels(),
            schedule: model
                .schedule
                .entries()
                .iter()
                .map(|e| ScheduleDoc {
                    r: e.r,
                    k: e.k,
                    n: e.n,
                })
                .collect(),
            shapes: model
                .nodes()
                .into_iter()
                .map(|n| ShapeDoc {
                    word: n.word.to_string(),
                    g: n.g.to_strings(),
                    u: n.u.to_strings(),
                })
                .collect(),
        }
    }
}

impl TryFrom<ModelDoc> for CurveModel {
    type Error = Error;

    fn try_from(doc: ModelDoc) -> Result<Self> {
        let params = doc
            .omega
            .params
            .iter()
            .enumerate()
            .map(|(j, s)| {
                parse_rational(s).map_err(|e| Error::parse(format!("omega.params[{j}]"), e))
            })
            .collect::<Result<Vec<_>>>()?;
        let omega = OmegaSpec::new(&doc.omega.kind, params)
            .map_err(|e| Error::parse("omega", e.to_string()))?;

        if doc.levels == 0 {
            return Err(Error::Consistency("levels must be at least 1".into()));
        }
        let mut schedule = Schedule::default();
        for (idx, entry) in doc.schedule.iter().enumerate() {
            let expected_r = idx as u32 + 1;
            if entry.r != expected_r {
                return Err(Error::Consistency(format!(
                    "schedule[{idx}] has r = {}, expected r = {expected_r}",
                    entry.r
                )));
            }
            schedule
                .push(entry.k)
                .map_err(|e| Error::Consistency(format!("schedule[{idx}]: {e}")))?;
            let n = schedule.n(expected_r);
            if entry.n != n {
                return Err(Error::Consistency(format!(
                    "schedule[{idx}] has n = {}, but n_{{r-1}} + k + 1 = {n}",
                    entry.n
                )));
            }
        }

        let mut nodes = Vec::with_capacity(doc.shapes.len());
        for (idx, shape) in doc.shapes.iter().enumerate() {
            let word: Word = shape
                .word
                .parse()
                .map_err(|e| Error::parse(format!("shapes[{idx}].word"), e))?;
            let g = Polynomial::from_strings(&shape.g)
                .map_err(|(j, e)| Error::parse(format!("shapes[{idx}].g[{j}]"), e))?;
            let u = Polynomial::from_strings(&shape.u)
                .map_err(|(j, e)| Error::parse(format!("shapes[{idx}].U[{j}]"), e))?;
            nodes.push(ShapeNode {
                word,
                g,
                u,
                children: None,
            });
        }

        let depth = nodes.iter().map(ShapeNode::depth).max().unwrap_or(0) as u32;
        if depth > schedule.levels() {
            return Err(Error::Consistency(format!(
                "schedule missing entry r = {} but shapes reach depth {depth}",
                schedule.levels() + 1
            )));
        }
        if schedule.levels() != doc.levels {
            return Err(Error::Consistency(format!(
                "levels = {} but schedule has {} entries",
                doc.levels,
                schedule.levels()
            )));
        }
        let expected: Vec<Word> = (0..=doc.levels as usize)
            .flat_map(Word::all_of_len)
            .collect();
        if nodes.len() != expected.len() {
            return Err(Error::Consistency(format!(
                "expected {} shapes for a complete tree of depth {}, found {}",
                expected.len(),
                doc.levels,
                nodes.len()
            )));
        }
        for (idx, (node, want)) in nodes.iter().zip(&expected).enumerate() {
            if node.word != *want {
                return Err(Error::Consistency(format!(
                    "shapes[{idx}] has word `{}`, expected `{want}` (breadth-first order)",
                    node.word
                )));
            }
        }

        Ok(CurveModel {
            omega,
            schedule,
            root: assemble(&mut nodes.into_iter().map(Some).collect::<Vec<_>>(), 0),
        })
    }
}

/// Rebuilds the tree from breadth-first (heap-indexed) storage.
fn assemble(slots: &mut [Option<ShapeNode>], idx: usize) -> ShapeNode {
    let mut node = slots[idx].take().expect("each slot is used once");
    let (l, r) = (2 * idx + 1, 2 * idx + 2);
    if r < slots.len() {
        let left = assemble(slots, l);
        let right = assemble(slots, r);
        node.children = Some(Box::new((left, right)));
    }
    node
}

impl CurveModel {
    /// Pretty-printed JSON with a trailing newline; deterministic.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&ModelDoc::from(self))
            .expect("model documents always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDoc = serde_json::from_str(text).map_err(|e| {
            Error::parse(
                format!("line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        CurveModel::try_from(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::int;
    use crate::model::build_model;

    fn model(levels: u32) -> CurveModel {
        build_model(OmegaSpec::Constant(int(1)), levels).unwrap()
    }

    #[test]
    fn round_trip() {
        let m = model(2);
        let text = m.to_json();
        let back = CurveModel::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn schema_shape() {
        let v: serde_json::Value = serde_json::from_str(&model(1).to_json()).unwrap();
        assert_eq!(v["omega"]["kind"], "constant");
        assert_eq!(v["omega"]["params"][0], "1/1");
        assert_eq!(v["levels"], 1);
        assert_eq!(
            v["schedule"][0],
            serde_json::json!({"r": 1, "k": 2, "n": 3})
        );
        assert_eq!(
            v["shapes"][0],
            serde_json::json!({"word": "", "g": ["1/1"], "U": ["0/1", "1/1"]})
        );
        assert_eq!(v["shapes"][1]["word"], "L");
        assert_eq!(v["shapes"][2]["word"], "R");
    }

    #[test]
    fn zero_denominator_names_path() {
        let text = model(1).to_json().replacen("\"2/1\"", "\"2/0\"", 1);
        match CurveModel::from_json(&text).unwrap_err() {
            Error::Parse { path, .. } => assert_eq!(path, "shapes[1].g[0]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_schedule_entry_is_inconsistent() {
        let mut doc = ModelDoc::from(&model(2));
        doc.schedule.pop();
        let err = CurveModel::try_from(doc).unwrap_err();
        assert!(
            matches!(err, Error::Consistency(ref m) if m.contains("r = 2")),
            "{err}"
        );
    }

    #[test]
    fn wrong_generation_is_inconsistent() {
        let mut doc = ModelDoc::from(&model(2));
        doc.schedule[1].n += 1;
        assert!(matches!(
            CurveModel::try_from(doc).unwrap_err(),
            Error::Consistency(_)
        ));
    }

    #[test]
    fn shapes_out_of_order() {
        let mut doc = ModelDoc::from(&model(1));
        doc.shapes.swap(1, 2);
        assert!(matches!(
            CurveModel::try_from(doc).unwrap_err(),
            Error::Consistency(_)
        ));
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(
            CurveModel::from_json("{\"omega\": 3}").unwrap_err(),
            Error::Parse { .. }
        ));
    }
}
