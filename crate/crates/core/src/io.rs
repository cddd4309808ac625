//! JSON file formats for models, operators and relations.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::believability::{BelievabilityRelation, MultiBelievabilityRelation};
use crate::error::{Error, Result};
use crate::graph::BitMatrix;
use crate::logic::{BeliefSet, InputSet, Language, SentenceClass};
use crate::model::RelationalModel;
use crate::operator::{ChoiceOperator, Universe, UniverseSpec};

/// Outcomes in order; position 0 is `K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub atoms: u8,
    pub outcomes: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorEntry {
    pub input: Vec<Vec<String>>,
    pub output: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub atoms: u8,
    pub max_input_size: usize,
    #[serde(rename = "K")]
    pub k: Vec<String>,
    pub entries: Vec<OperatorEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Single,
    Multi,
}

/// Pairs where the relation holds. A single relation pairs class model
/// lists; a multi relation pairs lists of them and also records the
/// universe bound it is total on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationFile {
    pub atoms: u8,
    pub kind: RelationKind,
    #[serde(rename = "K")]
    pub k: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_input_size: Option<usize>,
    pub pairs: Vec<[Value; 2]>,
}

/// A relation read from a file.
#[derive(Debug, Clone)]
pub enum LoadedRelation {
    Single(BelievabilityRelation),
    Multi(MultiBelievabilityRelation),
}

fn lang_of(atoms: u8) -> Result<Language> {
    Language::new(atoms).map_err(|e| Error::Format(format!("atoms: {e}")))
}

fn belief(lang: &Language, items: &[String], at: &str) -> Result<BeliefSet> {
    BeliefSet::from_bitstrings(lang, items).map_err(|e| Error::Format(format!("{at}: {e}")))
}

fn class(lang: &Language, items: &[String], at: &str) -> Result<SentenceClass> {
    SentenceClass::from_bitstrings(lang, items).map_err(|e| Error::Format(format!("{at}: {e}")))
}

fn input_set(lang: &Language, items: &[Vec<String>], at: &str) -> Result<InputSet> {
    items
        .iter()
        .enumerate()
        .map(|(i, c)| class(lang, c, &format!("{at}[{i}]")))
        .collect()
}

fn encode_set(a: &InputSet) -> Vec<Vec<String>> {
    a.iter().map(|c| c.bitstrings()).collect()
}

fn decode<T: for<'de> Deserialize<'de>>(v: &Value, at: &str) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::Format(format!("{at}: {e}")))
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

pub fn model_to_file(m: &RelationalModel) -> ModelFile {
    ModelFile {
        atoms: m.atoms(),
        outcomes: m.outcomes.iter().map(|x| x.bitstrings()).collect(),
    }
}

/// The order is read as given; validity is checked where the model is used.
pub fn model_from_file(f: &ModelFile) -> Result<RelationalModel> {
    let lang = lang_of(f.atoms)?;
    let outcomes = f
        .outcomes
        .iter()
        .enumerate()
        .map(|(i, x)| belief(&lang, x, &format!("outcomes[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    RelationalModel::from_outcomes(outcomes).map_err(|e| Error::Format(e.to_string()))
}

pub fn operator_to_file(op: &ChoiceOperator) -> OperatorFile {
    let u = op.universe();
    OperatorFile {
        atoms: op.lang().atoms(),
        max_input_size: u.spec().max_input_size,
        k: op.k().bitstrings(),
        entries: u
            .sets()
            .iter()
            .zip(op.table())
            .map(|(a, x)| OperatorEntry {
                input: encode_set(a),
                output: x.bitstrings(),
            })
            .collect(),
    }
}

/// Every universe input must appear exactly once.
pub fn operator_from_file(f: &OperatorFile) -> Result<ChoiceOperator> {
    let lang = lang_of(f.atoms)?;
    let u = Universe::enumerate(UniverseSpec::new(lang, f.max_input_size))?;
    let k = belief(&lang, &f.k, "K")?;
    let mut table: Vec<Option<BeliefSet>> = vec![None; u.len()];
    for (i, e) in f.entries.iter().enumerate() {
        let at = format!("entries[{i}]");
        let a = input_set(&lang, &e.input, &format!("{at}.input"))?;
        let idx = u
            .index_of(&a)
            .ok_or_else(|| Error::Format(format!("{at}.input: outside the universe")))?;
        if table[idx].is_some() {
            return Err(Error::Format(format!("{at}.input: listed twice")));
        }
        table[idx] = Some(belief(&lang, &e.output, &format!("{at}.output"))?);
    }
    let table = table
        .into_iter()
        .enumerate()
        .map(|(i, x)| x.ok_or_else(|| Error::Format(format!("no entry for input {}", u.get(i)))))
        .collect::<Result<Vec<_>>>()?;
    ChoiceOperator::new(u, k, table).map_err(|e| Error::Format(e.to_string()))
}

pub fn single_relation_to_file(r: &BelievabilityRelation) -> RelationFile {
    RelationFile {
        atoms: r.lang().atoms(),
        kind: RelationKind::Single,
        k: r.k().bitstrings(),
        max_input_size: None,
        pairs: r
            .pairs()
            .into_iter()
            .map(|(a, b)| [Value::from(a.bitstrings()), Value::from(b.bitstrings())])
            .collect(),
    }
}

/// The relation as it stands on `u`.
pub fn multi_relation_to_file(
    mb: &MultiBelievabilityRelation,
    u: &Arc<Universe>,
) -> Result<RelationFile> {
    let m = mb.materialize(u)?;
    let mut pairs = Vec::new();
    for a in 0..u.len() {
        for b in m.successors(a) {
            pairs.push([
                serde_json::to_value(encode_set(u.get(a))).expect("plain strings"),
                serde_json::to_value(encode_set(u.get(b))).expect("plain strings"),
            ]);
        }
    }
    Ok(RelationFile {
        atoms: mb.lang().atoms(),
        kind: RelationKind::Multi,
        k: mb.k().bitstrings(),
        max_input_size: Some(u.spec().max_input_size),
        pairs,
    })
}

pub fn relation_from_file(f: &RelationFile) -> Result<LoadedRelation> {
    let lang = lang_of(f.atoms)?;
    let k = belief(&lang, &f.k, "K")?;
    match f.kind {
        RelationKind::Single => {
            let mut r = BelievabilityRelation::empty(lang, k)?;
            for (i, [l, rr]) in f.pairs.iter().enumerate() {
                let at = format!("pairs[{i}]");
                let a = class(&lang, &decode::<Vec<String>>(l, &at)?, &at)?;
                let b = class(&lang, &decode::<Vec<String>>(rr, &at)?, &at)?;
                r.set(a, b, true);
            }
            Ok(LoadedRelation::Single(r))
        }
        RelationKind::Multi => {
            let max = f
                .max_input_size
                .ok_or_else(|| Error::Format("multi relation needs max_input_size".into()))?;
            let u = Universe::enumerate(UniverseSpec::new(lang, max))?;
            let mut m = BitMatrix::new(u.len());
            for (i, [l, rr]) in f.pairs.iter().enumerate() {
                let at = format!("pairs[{i}]");
                let side = |v: &Value| -> Result<usize> {
                    let a = input_set(&lang, &decode::<Vec<Vec<String>>>(v, &at)?, &at)?;
                    u.index_of(&a)
                        .ok_or_else(|| Error::Format(format!("{at}: outside the universe")))
                };
                let (a, b) = (side(l)?, side(rr)?);
                m.set(a, b, true);
            }
            Ok(LoadedRelation::Multi(
                MultiBelievabilityRelation::from_table(u, k, m)?,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::believability::{lift, random_quasi_linear, random_standard};
    use crate::model::{generate_model, ModelFlags};
    use crate::operator::random_operator;

    fn universe(atoms: u8, max: usize) -> Arc<Universe> {
        Universe::enumerate(UniverseSpec::new(Language::new(atoms).unwrap(), max)).unwrap()
    }

    #[test]
    fn model_round_trip() {
        let lang = Language::new(2).unwrap();
        let m = generate_model(5, &lang, 6, ModelFlags::default()).unwrap();
        let text = serde_json::to_string(&model_to_file(&m)).unwrap();
        let back = model_from_file(&parse_json(&text).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn operator_round_trip() {
        let u = universe(2, 2);
        let op = random_operator(8, &u);
        let text = serde_json::to_string(&operator_to_file(&op)).unwrap();
        let back = operator_from_file(&parse_json(&text).unwrap()).unwrap();
        assert_eq!(back, op);
    }

    #[test]
    fn operator_missing_entry_is_rejected() {
        let u = universe(1, 2);
        let mut f = operator_to_file(&random_operator(1, &u));
        f.entries.pop();
        assert!(matches!(operator_from_file(&f), Err(Error::Format(_))));
        let mut f = operator_to_file(&random_operator(1, &u));
        f.entries.push(f.entries[0].clone());
        assert!(matches!(operator_from_file(&f), Err(Error::Format(m)) if m.contains("twice")));
    }

    #[test]
    fn malformed_text_reports_location() {
        let err =
            parse_json::<ModelFile>("{\"atoms\": 1,\n \"outcomes\": [[\"1\"], 3]}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let f = ModelFile {
            atoms: 1,
            outcomes: vec![vec!["2".into()]],
        };
        assert!(model_from_file(&f)
            .unwrap_err()
            .to_string()
            .contains("outcomes[0]"));
    }

    #[test]
    fn relations_round_trip() {
        let u = universe(2, 2);
        let r = random_quasi_linear(3, &u.lang()).unwrap();
        let text = serde_json::to_string(&single_relation_to_file(&r)).unwrap();
        match relation_from_file(&parse_json(&text).unwrap()).unwrap() {
            LoadedRelation::Single(back) => assert_eq!(back, r),
            LoadedRelation::Multi(_) => panic!("kind changed"),
        }

        let u1 = universe(1, 4);
        let mb = random_standard(4, &u1).unwrap();
        let f = multi_relation_to_file(&mb, &u1).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        match relation_from_file(&parse_json(&text).unwrap()).unwrap() {
            LoadedRelation::Multi(back) => {
                assert_eq!(back.materialize(&u1).unwrap(), mb.materialize(&u1).unwrap())
            }
            LoadedRelation::Single(_) => panic!("kind changed"),
        }

        let lifted = lift(&r);
        let f = multi_relation_to_file(&lifted, &u).unwrap();
        assert_eq!(f.max_input_size, Some(2));
    }
}
