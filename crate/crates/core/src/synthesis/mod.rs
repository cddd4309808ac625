//! Building models and relations back from operators, and checking that
//! the rebuilt artifact reproduces what it came from.

mod sentential;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::believability::{
    check_multi_all, check_single_all, derive_mb_from_operator, lift, operator_via_mb, project,
    BelievabilityRelation, MultiBelievabilityRelation, RelationPostulateId,
};
use crate::error::{Error, Result};
use crate::graph::{strongly_connected_components, BitMatrix};
use crate::io::{model_to_file, LoadedRelation};
use crate::logic::{BeliefSet, InputSet};
use crate::model::{
    check_extended_conditions, choice_revise_via_model, ModelFlags, RelationalModel,
};
use crate::operator::{check_postulate, ChoiceOperator, PostulateId, Universe};
use crate::report::{PostulateReport, Verdict, Witness};

pub use sentential::{
    check_sentential_postulate, check_sentential_postulates, footnote7_operator,
    SententialOperator, SententialPostulateId,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundTripKind {
    /// operator → model → operator
    Model,
    /// as `Model`, for operators with success, vacuity and consistency; the
    /// model must also contain `Cn({⊥})` and place every complete theory
    /// before it
    ExtendedModel,
    /// operator → relation satisfying the basic relation postulates → operator
    Relation,
    /// operator → standard relation → operator
    StandardRelation,
    /// sentence relation → lift → project
    LiftProject,
    /// set relation → project → lift
    ProjectLift,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub input: InputSet,
    pub expected: BeliefSet,
    pub regenerated: BeliefSet,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundTripReport {
    pub kind: RoundTripKind,
    pub verdict: Verdict,
    /// Number of inputs (or relation pairs) compared.
    pub compared: usize,
    /// Name of the postulate or model condition that failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violated: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<Mismatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extended_conditions: Option<ModelFlags>,
    /// sha256 of the synthesized artifact's canonical encoding.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artifact_hash: Option<String>,
    #[serde(skip)]
    pub model: Option<RelationalModel>,
}

impl RoundTripReport {
    fn new(kind: RoundTripKind) -> Self {
        RoundTripReport {
            kind,
            verdict: Verdict::Pass,
            compared: 0,
            violated: None,
            witness: None,
            mismatch: None,
            detail: None,
            extended_conditions: None,
            artifact_hash: None,
            model: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    fn fail_postulate(mut self, name: &str, witness: Option<Witness>) -> Self {
        self.verdict = Verdict::Fail;
        self.violated = Some(name.to_string());
        self.witness = witness;
        self
    }

    fn fail_detail(mut self, detail: impl Into<String>) -> Self {
        self.verdict = Verdict::Fail;
        self.detail = Some(detail.into());
        self
    }
}

fn first_failure(op: &ChoiceOperator, ids: &[PostulateId]) -> Option<PostulateReport<PostulateId>> {
    ids.iter()
        .map(|&p| check_postulate(op, p))
        .find(|r| !r.passed())
}

fn hash_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn model_hash(m: &RelationalModel) -> String {
    hash_bytes(
        serde_json::to_string(&model_to_file(m))
            .expect("plain data")
            .as_bytes(),
    )
}

fn matrix_hash(k: BeliefSet, m: &BitMatrix) -> String {
    let mut bytes = k.bits().to_le_bytes().to_vec();
    for i in 0..m.len() {
        for w in m.row(i) {
            bytes.extend_from_slice(&w.to_le_bytes());
        }
    }
    hash_bytes(&bytes)
}

/// `X ≤′ Y` over the distinct outcomes of an operator: some chain
/// `A0, …, An` has `X = K ∗c A0`, `Y = K ∗c An` and each `A_i` meets
/// `K ∗c A_{i+1}`.
#[derive(Debug, Clone)]
pub struct ChainRelation {
    pub outcomes: Vec<BeliefSet>,
    /// One-step links between outcomes.
    pub graph: BitMatrix,
    /// Reflexive-transitive closure of `graph`.
    pub leq: BitMatrix,
    /// For each outcome, an input with that outcome which meets its own
    /// outcome: the one-element chain that makes `X ≤′ X`.
    pub self_witness: Vec<Option<usize>>,
}

impl ChainRelation {
    pub fn of(op: &ChoiceOperator) -> Self {
        let outcomes = op.outcomes();
        let id: Vec<usize> = op
            .table()
            .iter()
            .map(|x| outcomes.binary_search(x).expect("listed"))
            .collect();
        let hits = op.hits();
        let mut graph = BitMatrix::new(outcomes.len());
        let mut self_witness = vec![None; outcomes.len()];
        for a in 0..id.len() {
            for b in hits.successors(a) {
                graph.set(id[a], id[b], true);
            }
            if hits.get(a, a) {
                self_witness[id[a]].get_or_insert(a);
            }
        }
        let leq = graph.reflexive_transitive_closure();
        ChainRelation {
            outcomes,
            graph,
            leq,
            self_witness,
        }
    }

    pub fn index(&self, x: &BeliefSet) -> Option<usize> {
        self.outcomes.binary_search(x).ok()
    }

    pub fn is_reflexive(&self) -> bool {
        self.self_witness.iter().all(Option::is_some)
    }

    pub fn is_transitive(&self) -> bool {
        let n = self.outcomes.len();
        (0..n).all(|i| self.leq.successors(i).all(|j| self.leq.row_contains(i, j)))
    }

    /// The first pair of distinct outcomes below each other, if any.
    pub fn antisymmetry_violation(&self) -> Option<(usize, usize)> {
        let comp = strongly_connected_components(&self.graph);
        let n = self.outcomes.len();
        (0..n).find_map(|i| (i + 1..n).find(|&j| comp[i] == comp[j]).map(|j| (i, j)))
    }

    /// Kahn's algorithm over `≤′`, always taking the canonically smallest
    /// available outcome.
    pub fn linear_extension(&self) -> Result<Vec<BeliefSet>> {
        if let Some((i, j)) = self.antisymmetry_violation() {
            return Err(Error::AntisymmetryViolation(
                self.outcomes[i].to_string(),
                self.outcomes[j].to_string(),
            ));
        }
        let n = self.outcomes.len();
        let mut indegree = vec![0usize; n];
        for i in 0..n {
            for j in self.graph.successors(i).filter(|&j| j != i) {
                indegree[j] += 1;
            }
        }
        // outcomes are sorted canonically, so index order is canonical order
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_first() {
            order.push(self.outcomes[i]);
            for j in self.graph.successors(i).filter(|&j| j != i) {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.insert(j);
                }
            }
        }
        debug_assert_eq!(order.len(), n);
        Ok(order)
    }
}

/// A relational model whose induced choice revision is `op`, built from
/// the chain relation between outcomes. Fails if `op` violates one of the
/// basic postulates.
pub fn synthesize_model(op: &ChoiceOperator) -> Result<RelationalModel> {
    if let Some(r) = first_failure(op, &PostulateId::BASIC) {
        return Err(Error::PostulateViolation(match &r.witness {
            Some(w) => format!("{} at {:?}", r.postulate, w.inputs),
            None => r.postulate.to_string(),
        }));
    }
    synthesize_unchecked(op)
}

fn synthesize_unchecked(op: &ChoiceOperator) -> Result<RelationalModel> {
    let chain = ChainRelation::of(op);
    if let Some(i) = chain.self_witness.iter().position(Option::is_none) {
        return Err(Error::PostulateViolation(format!(
            "no input with outcome {} meets it, so the chain relation is not reflexive",
            chain.outcomes[i]
        )));
    }
    let order = chain.linear_extension()?;
    if order.first() != Some(&op.k()) {
        return Err(Error::InvalidOperator(format!(
            "K = {} is not the least outcome",
            op.k()
        )));
    }
    Ok(RelationalModel::new(op.k(), order))
}

fn compare_outcomes(
    mut report: RoundTripReport,
    original: &ChoiceOperator,
    regenerate: impl Fn(usize, &InputSet) -> BeliefSet,
) -> RoundTripReport {
    let u = original.universe();
    for (i, a) in u.sets().iter().enumerate() {
        report.compared += 1;
        let got = regenerate(i, a);
        if got != original.outcome(i) {
            report.verdict = Verdict::Fail;
            report.mismatch = Some(Mismatch {
                input: a.clone(),
                expected: original.outcome(i),
                regenerated: got,
            });
            break;
        }
    }
    report
}

/// Synthesize a model and check that it regenerates `op` on every universe
/// input. When `op` also satisfies success, vacuity and consistency, the
/// model must contain `Cn({⊥})` with every complete theory before it.
pub fn verify_roundtrip_model(op: &ChoiceOperator) -> RoundTripReport {
    roundtrip_model(op, RoundTripKind::Model)
}

/// As [`verify_roundtrip_model`], but an operator lacking any of the
/// supplemented postulates fails outright.
pub fn verify_roundtrip_extended_model(op: &ChoiceOperator) -> RoundTripReport {
    let report = RoundTripReport::new(RoundTripKind::ExtendedModel);
    if let Some(r) = first_failure(op, &PostulateId::SUPPLEMENTED) {
        return report.fail_postulate(r.postulate.name(), r.witness);
    }
    roundtrip_model(op, RoundTripKind::ExtendedModel)
}

fn roundtrip_model(op: &ChoiceOperator, kind: RoundTripKind) -> RoundTripReport {
    let report = RoundTripReport::new(kind);
    if let Some(r) = first_failure(op, &PostulateId::BASIC) {
        return report.fail_postulate(r.postulate.name(), r.witness);
    }
    let m = match synthesize_unchecked(op) {
        Ok(m) => m,
        Err(e) => return report.fail_detail(e.to_string()),
    };
    let mut report = compare_outcomes(report, op, |_, a| choice_revise_via_model(&m, a));
    report.artifact_hash = Some(model_hash(&m));
    if report.passed() && first_failure(op, &PostulateId::SUPPLEMENTED).is_none() {
        let flags = check_extended_conditions(&m);
        report.extended_conditions = Some(flags);
        if !flags.has_x3 {
            report = report.fail_postulate("X3", None);
        } else if !flags.has_leq3 {
            report = report.fail_postulate("leq3", None);
        }
    }
    report.model = Some(m);
    report
}

/// Derive a relation from `op`, check the relation postulates, and check
/// that the relation determines `op` again. With `standard`, all nine
/// relation postulates are required; otherwise the basic five.
pub fn verify_roundtrip_relation(op: &ChoiceOperator, standard: bool) -> RoundTripReport {
    let kind = if standard {
        RoundTripKind::StandardRelation
    } else {
        RoundTripKind::Relation
    };
    let mut report = RoundTripReport::new(kind);
    if let Some(r) = first_failure(op, &PostulateId::BASIC) {
        return report.fail_postulate(r.postulate.name(), r.witness);
    }
    let u = op.universe();
    let mb = derive_mb_from_operator(op);
    let table = match mb.materialize(u) {
        Ok(t) => t,
        Err(e) => return report.fail_detail(e.to_string()),
    };
    report.artifact_hash = Some(matrix_hash(op.k(), &table));

    let ids: &[RelationPostulateId] = if standard {
        &RelationPostulateId::STANDARD
    } else {
        &RelationPostulateId::BASIC
    };
    let reports = match check_multi_all(&mb, ids, u) {
        Ok(r) => r,
        Err(e) => return report.fail_detail(e.to_string()),
    };
    if let Some(r) = reports.into_iter().find(|r| !r.passed()) {
        return report.fail_postulate(r.postulate.name(), r.witness);
    }
    let regenerated = match operator_via_mb(&mb, op.k(), u) {
        Ok(o) => o,
        Err(e) => {
            return report.fail_detail(format!("relation does not determine an operator: {e}"))
        }
    };
    report = compare_outcomes(report, op, |i, _| regenerated.outcome(i));
    if report.passed() && standard {
        if let Some(r) = first_failure(op, &PostulateId::SUPPLEMENTED) {
            report = report
                .fail_postulate(r.postulate.name(), r.witness)
                .fail_detail(
                    "relation is standard but the operator lacks a supplemented postulate",
                );
        }
    }
    report
}

fn first_relation_failure(
    reports: Vec<PostulateReport<RelationPostulateId>>,
) -> Option<PostulateReport<RelationPostulateId>> {
    reports.into_iter().find(|r| !r.passed())
}

/// Lift a quasi-linear sentence relation to sets, check that the lift is
/// standard on `u`, and read the sentence relation back from the singleton
/// pairs of the lifted table.
pub fn verify_translation_single(r: &BelievabilityRelation, u: &Arc<Universe>) -> RoundTripReport {
    let report = RoundTripReport::new(RoundTripKind::LiftProject);
    match check_single_all(r, &RelationPostulateId::SINGLE).map(first_relation_failure) {
        Err(e) => return report.fail_detail(e.to_string()),
        Ok(Some(f)) => return report.fail_postulate(f.postulate.name(), f.witness),
        Ok(None) => {}
    }
    let lifted = lift(r);
    match check_multi_all(&lifted, &RelationPostulateId::ALL, u).map(first_relation_failure) {
        Err(e) => return report.fail_detail(e.to_string()),
        Ok(Some(f)) => {
            return report
                .fail_postulate(f.postulate.name(), f.witness)
                .fail_detail("lifted relation is not standard")
        }
        Ok(None) => {}
    }
    // project from an explicit table so the comparison does not just hand
    // back the relation the lift was built from
    let result = lifted
        .to_table(u)
        .and_then(|t| Ok((t.materialize(u)?, project(&t)?)));
    let (table, back) = match result {
        Ok(x) => x,
        Err(e) => return report.fail_detail(e.to_string()),
    };
    let mut report = report;
    report.artifact_hash = Some(matrix_hash(r.k(), &table));
    let lang = r.lang();
    for a in lang.classes() {
        for b in lang.classes() {
            report.compared += 1;
            if back.holds(&a, &b) != r.holds(&a, &b) {
                let w = Witness::inputs(vec![InputSet::singleton(a), InputSet::singleton(b)]);
                report.witness = Some(w);
                return report.fail_detail(format!("projection differs at ({a}, {b})"));
            }
        }
    }
    report
}

/// Project a standard set relation to sentences, check that the projection
/// is quasi-linear, and lift it back over `u`.
pub fn verify_translation_multi(
    mb: &MultiBelievabilityRelation,
    u: &Arc<Universe>,
) -> RoundTripReport {
    let report = RoundTripReport::new(RoundTripKind::ProjectLift);
    match check_multi_all(mb, &RelationPostulateId::STANDARD, u).map(first_relation_failure) {
        Err(e) => return report.fail_detail(e.to_string()),
        Ok(Some(f)) => return report.fail_postulate(f.postulate.name(), f.witness),
        Ok(None) => {}
    }
    let result = mb.materialize(u).and_then(|m| Ok((m, project(mb)?)));
    let (original, single) = match result {
        Ok(x) => x,
        Err(e) => return report.fail_detail(e.to_string()),
    };
    match check_single_all(&single, &RelationPostulateId::SINGLE).map(first_relation_failure) {
        Err(e) => return report.fail_detail(e.to_string()),
        Ok(Some(f)) => {
            return report
                .fail_postulate(f.postulate.name(), f.witness)
                .fail_detail("projected relation is not quasi-linear")
        }
        Ok(None) => {}
    }
    let relifted = match lift(&single).materialize(u) {
        Ok(m) => m,
        Err(e) => return report.fail_detail(e.to_string()),
    };
    let mut report = report;
    report.artifact_hash = Some(matrix_hash(mb.k(), &relifted));
    for a in 0..u.len() {
        for b in 0..u.len() {
            report.compared += 1;
            if original.get(a, b) != relifted.get(a, b) {
                report.witness = Some(Witness::inputs(vec![u.get(a).clone(), u.get(b).clone()]));
                return report.fail_detail(format!("lift differs at ({}, {})", u.get(a), u.get(b)));
            }
        }
    }
    report
}

pub fn verify_translation(r: &LoadedRelation, u: &Arc<Universe>) -> RoundTripReport {
    match r {
        LoadedRelation::Single(r) => verify_translation_single(r, u),
        LoadedRelation::Multi(mb) => verify_translation_multi(mb, u),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::believability::{random_quasi_linear, random_standard};
    use crate::logic::Language;
    use crate::model::{all_models, generate_model, induced_operator};
    use crate::operator::{random_operator, UniverseSpec};

    fn universe(atoms: u8, max: usize) -> Arc<Universe> {
        Universe::enumerate(UniverseSpec::new(Language::new(atoms).unwrap(), max)).unwrap()
    }

    #[test]
    fn constant_operator_collapses_to_k() {
        let u = universe(2, 2);
        let k = u.lang().belief_from_bits(0b0011);
        let op = ChoiceOperator::from_fn(u.clone(), k, |_| k).unwrap();
        let m = synthesize_model(&op).unwrap();
        assert_eq!(m.outcomes, vec![k]);
        assert!(verify_roundtrip_model(&op).passed());
    }

    #[test]
    fn model_operators_round_trip() {
        let u = universe(2, 2);
        let lang = u.lang();
        for seed in 0..40 {
            let size = 1 + (seed as usize % 8);
            let m = generate_model(seed, &lang, size, ModelFlags::default()).unwrap();
            let op = induced_operator(&m, &u).unwrap();
            let chain = ChainRelation::of(&op);
            assert!(chain.is_reflexive() && chain.is_transitive());
            assert!(chain.antisymmetry_violation().is_none());
            let rep = verify_roundtrip_model(&op);
            assert!(rep.passed(), "seed {seed}: {rep:?}");
            let hash = rep.artifact_hash.clone().unwrap();
            assert_eq!(hash.len(), 64);
            assert_eq!(verify_roundtrip_model(&op).artifact_hash, Some(hash));
        }
    }

    #[test]
    fn every_one_atom_model_round_trips() {
        let u = universe(1, 4);
        for m in all_models(&u.lang()).unwrap() {
            let op = induced_operator(&m, &u).unwrap();
            assert!(verify_roundtrip_model(&op).passed(), "{m:?}");
        }
    }

    #[test]
    fn extended_operators_get_bottom_and_complete_theories() {
        let u = universe(2, 2);
        let lang = u.lang();
        for seed in 0..20 {
            let m = generate_model(
                seed,
                &lang,
                6 + seed as usize % 4,
                ModelFlags::new(true, true),
            )
            .unwrap();
            let op = induced_operator(&m, &u).unwrap();
            let rep = verify_roundtrip_extended_model(&op);
            assert!(rep.passed(), "seed {seed}: {rep:?}");
            let synthesized = rep.model.unwrap();
            assert!(synthesized.outcomes.contains(&lang.inconsistent()));
            assert_eq!(rep.extended_conditions, Some(ModelFlags::new(true, true)));
        }
    }

    #[test]
    fn random_operators_are_rejected_with_a_postulate() {
        let u = universe(1, 4);
        let mut rejected = 0;
        for seed in 0..50 {
            let op = random_operator(seed, &u);
            if let Err(e) = synthesize_model(&op) {
                assert!(matches!(e, Error::PostulateViolation(_)));
                let rep = verify_roundtrip_model(&op);
                assert!(!rep.passed());
                let name = rep.violated.unwrap();
                assert!(PostulateId::BASIC.iter().any(|p| p.name() == name));
                rejected += 1;
            }
        }
        assert!(rejected > 40);
    }

    #[test]
    fn extended_round_trip_names_missing_postulate() {
        let u = universe(1, 4);
        let lang = u.lang();
        let m = generate_model(1, &lang, 2, ModelFlags::default()).unwrap();
        let op = induced_operator(&m, &u).unwrap();
        let rep = verify_roundtrip_extended_model(&op);
        assert!(!rep.passed());
        assert!(PostulateId::SUPPLEMENTED
            .iter()
            .any(|p| Some(p.name()) == rep.violated.as_deref()));
    }

    #[test]
    fn relation_round_trips() {
        let u = universe(2, 2);
        let lang = u.lang();
        for seed in 0..6 {
            let m = generate_model(seed, &lang, 3 + seed as usize, ModelFlags::default()).unwrap();
            let op = induced_operator(&m, &u).unwrap();
            let rep = verify_roundtrip_relation(&op, false);
            assert!(rep.passed(), "seed {seed}: {rep:?}");
            let m = generate_model(seed, &lang, 8, ModelFlags::new(true, true)).unwrap();
            let op = induced_operator(&m, &u).unwrap();
            let rep = verify_roundtrip_relation(&op, true);
            assert!(rep.passed(), "seed {seed}: {rep:?}");
        }
    }

    #[test]
    fn inconsistent_outcome_breaks_maximality() {
        // a model with Cn({⊥}) early: a consistent sentence can pick it
        let u = universe(1, 4);
        let lang = u.lang();
        let p = lang.belief_from_bits(0b10);
        let m = RelationalModel::from_outcomes(vec![p, lang.inconsistent(), lang.tautologies()])
            .unwrap();
        let op = induced_operator(&m, &u).unwrap();
        assert!(!check_postulate(&op, PostulateId::Consistency).passed());
        let rep = verify_roundtrip_relation(&op, true);
        assert_eq!(rep.violated.as_deref(), Some("maximality"), "{rep:?}");
        // the maximal set is a consistent input that is nonetheless revised to Cn({⊥})
        let w = rep.witness.unwrap();
        assert!(w.inputs.iter().any(|b| !b.is_empty() && !b.is_falsum()));
    }

    #[test]
    fn translations_round_trip() {
        let u = universe(2, 2);
        for seed in 0..5 {
            let r = random_quasi_linear(seed, &u.lang()).unwrap();
            let rep = verify_translation_single(&r, &u);
            assert!(rep.passed(), "seed {seed}: {rep:?}");
        }
        let u1 = universe(1, 4);
        for seed in 0..5 {
            let mb = random_standard(seed, &u1).unwrap();
            let rep = verify_translation_multi(&mb, &u1);
            assert!(rep.passed(), "seed {seed}: {rep:?}");
        }
    }

    #[test]
    fn incomparable_pair_is_named() {
        let u = universe(2, 2);
        let lang = u.lang();
        let base = random_quasi_linear(2, &lang).unwrap();
        let (p0, p1) = (lang.atom(0).unwrap(), lang.atom(1).unwrap());
        let mut r = base.clone();
        r.set(p0, p1, false);
        r.set(p1, p0, false);
        let rep = verify_translation_single(&r, &u);
        assert!(!rep.passed());
        assert!(rep.violated.is_some());
    }
}
