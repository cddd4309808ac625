//! Relational select-direct models: a set of candidate outcomes ordered so
//! that revision selects the first outcome meeting the success condition.
//!
//! The order is stored as list position, so it is always total.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::descriptor::{choice_descriptor, Descriptor};
use crate::error::{Error, Result};
use crate::logic::{BeliefSet, InputSet, Language};
use crate::operator::{ChoiceOperator, Universe};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationalModel {
    pub k: BeliefSet,
    pub outcomes: Vec<BeliefSet>,
}

impl RelationalModel {
    pub fn new(k: BeliefSet, outcomes: Vec<BeliefSet>) -> Self {
        RelationalModel { k, outcomes }
    }

    /// Model whose first outcome is taken as `K`.
    pub fn from_outcomes(outcomes: Vec<BeliefSet>) -> Result<Self> {
        let k = *outcomes
            .first()
            .ok_or_else(|| Error::InvalidModel("no outcomes".into()))?;
        Ok(RelationalModel { k, outcomes })
    }

    pub fn atoms(&self) -> u8 {
        self.k.atoms()
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn position(&self, x: &BeliefSet) -> Option<usize> {
        self.outcomes.iter().position(|y| y == x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionCheck {
    pub condition: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<ConditionCheck>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, condition: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.condition == condition)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn condition(condition: &'static str, witness: Option<String>) -> ConditionCheck {
    ConditionCheck {
        condition,
        passed: witness.is_none(),
        witness,
    }
}

/// Check `(X1)`, `(X2)`, `(≤1)`, `(≤2)` and consistency of `K`. With a total
/// stored order, `(≤2)` amounts to the absence of duplicate outcomes.
pub fn validate_model(m: &RelationalModel) -> ValidationReport {
    let atoms = m.atoms();
    let x1 = m
        .outcomes
        .iter()
        .find(|x| x.atoms() != atoms)
        .map(|x| format!("{x} is over a different language"));
    let x2 = (!m.outcomes.contains(&m.k)).then(|| format!("K = {} is not an outcome", m.k));
    let leq1 = match m.outcomes.first() {
        Some(first) if *first == m.k => None,
        Some(first) => Some(format!("{first} precedes K = {}", m.k)),
        None => Some("empty outcome list".to_string()),
    };
    let leq2 = m.outcomes.iter().enumerate().find_map(|(i, x)| {
        m.outcomes[..i]
            .contains(x)
            .then(|| format!("{x} occurs twice"))
    });
    let consistent = (!m.k.is_consistent()).then(|| "K is inconsistent".to_string());
    ValidationReport {
        checks: vec![
            condition("X1", x1),
            condition("X2", x2),
            condition("leq1", leq1),
            condition("leq2", leq2),
            condition("k_consistent", consistent),
        ],
    }
}

/// `K ∘ Φ`: the first outcome satisfying `Φ`, or `K` when none does.
pub fn descriptor_revise(m: &RelationalModel, phi: &Descriptor) -> BeliefSet {
    m.outcomes
        .iter()
        .copied()
        .find(|x| phi.satisfied_by(x))
        .unwrap_or(m.k)
}

/// `K ∗c A` through the choice descriptor of `A`; `K` for the empty set.
pub fn choice_revise_via_model(m: &RelationalModel, a: &InputSet) -> BeliefSet {
    match choice_descriptor(a) {
        Ok(d) => descriptor_revise(m, &d),
        Err(_) => m.k,
    }
}

/// Same outcome as [`choice_revise_via_model`], without building the
/// descriptor.
fn choice_revise_fast(m: &RelationalModel, a: &InputSet) -> BeliefSet {
    m.outcomes
        .iter()
        .copied()
        .find(|x| x.meets(a))
        .unwrap_or(m.k)
}

/// The choice revision a valid model induces on a universe.
pub fn induced_operator(m: &RelationalModel, universe: &Arc<Universe>) -> Result<ChoiceOperator> {
    let report = validate_model(m);
    if let Some(bad) = report.failures().next() {
        return Err(Error::InvalidModel(format!(
            "{} fails: {}",
            bad.condition,
            bad.witness.clone().unwrap_or_default()
        )));
    }
    if m.atoms() != universe.lang().atoms() {
        return Err(Error::InvalidModel(
            "model and universe differ in atom count".into(),
        ));
    }
    ChoiceOperator::from_fn(universe.clone(), m.k, |a| choice_revise_fast(m, a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ModelFlags {
    /// `Cn({⊥})` is an outcome.
    pub has_x3: bool,
    /// Every consistent sentence is entailed by some consistent outcome
    /// placed before `Cn({⊥})`.
    pub has_leq3: bool,
}

impl ModelFlags {
    pub fn new(has_x3: bool, has_leq3: bool) -> Self {
        ModelFlags { has_x3, has_leq3 }
    }
}

pub fn check_extended_conditions(m: &RelationalModel) -> ModelFlags {
    let lang = Language::new(m.atoms()).expect("atoms come from a language");
    let bottom = m.position(&lang.inconsistent());
    let before = &m.outcomes[..bottom.unwrap_or(m.outcomes.len())];
    // a consistent φ has a consistent first satisfier iff one of its complete
    // theories does, so checking the complete theories suffices
    let has_leq3 = lang
        .valuations()
        .all(|v| before.contains(&lang.belief_from_bits(1 << v.index())));
    ModelFlags {
        has_x3: bottom.is_some(),
        has_leq3,
    }
}

/// Draw a valid model of exactly `size` outcomes. A flag set to `true` is
/// a requirement; `false` leaves the condition unconstrained.
pub fn generate_model(
    seed: u64,
    lang: &Language,
    size: usize,
    flags: ModelFlags,
) -> Result<RelationalModel> {
    let all = lang.belief_sets();
    let complete: Vec<BeliefSet> = lang
        .valuations()
        .map(|v| lang.belief_from_bits(1 << v.index()))
        .collect();
    let min_size = if flags.has_leq3 { complete.len() } else { 1 } + usize::from(flags.has_x3);
    if size == 0 || size < min_size || size > all.len() {
        return Err(Error::Infeasible(format!(
            "{size} outcomes cannot satisfy {flags:?} over {} belief sets",
            all.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = if flags.has_leq3 && size == min_size {
        complete[rng.gen_range(0..complete.len())]
    } else {
        let consistent: Vec<BeliefSet> =
            all.iter().copied().filter(|b| b.is_consistent()).collect();
        consistent[rng.gen_range(0..consistent.len())]
    };

    let mut rest: Vec<BeliefSet> = Vec::new();
    if flags.has_leq3 {
        rest.extend(complete.iter().copied().filter(|x| *x != k));
    }
    if flags.has_x3 {
        rest.push(lang.inconsistent());
    }
    let mut pool: Vec<BeliefSet> = all
        .iter()
        .copied()
        .filter(|x| *x != k && !rest.contains(x))
        .collect();
    pool.shuffle(&mut rng);
    rest.extend(pool.into_iter().take(size - 1 - rest.len()));
    rest.shuffle(&mut rng);

    if flags.has_leq3 {
        if let Some(b) = rest.iter().position(|x| !x.is_consistent()) {
            let bottom = rest.remove(b);
            let last = rest
                .iter()
                .rposition(|x| complete.contains(x))
                .map_or(0, |i| i + 1);
            rest.insert(last, bottom);
        }
    }

    let mut outcomes = vec![k];
    outcomes.extend(rest);
    let m = RelationalModel { k, outcomes };
    debug_assert!(validate_model(&m).is_valid());
    let got = check_extended_conditions(&m);
    if (flags.has_x3 && !got.has_x3) || (flags.has_leq3 && !got.has_leq3) {
        return Err(Error::Infeasible(format!(
            "generated model misses {flags:?}"
        )));
    }
    Ok(m)
}

/// Every valid model over the language: a consistent `K` followed by any
/// arrangement of distinct other belief sets. Only one atom is supported.
pub fn all_models(lang: &Language) -> Result<Vec<RelationalModel>> {
    if lang.atoms() > 1 {
        return Err(Error::CapExceeded(
            "exhaustive model enumeration needs one atom".into(),
        ));
    }
    let all = lang.belief_sets();
    let mut out = Vec::new();
    for k in all.iter().copied().filter(|b| b.is_consistent()) {
        let others: Vec<BeliefSet> = all.iter().copied().filter(|x| *x != k).collect();
        let mut prefix = vec![k];
        arrangements(
            &others,
            &mut vec![false; others.len()],
            &mut prefix,
            &mut out,
        );
    }
    Ok(out)
}

fn arrangements(
    items: &[BeliefSet],
    used: &mut Vec<bool>,
    prefix: &mut Vec<BeliefSet>,
    out: &mut Vec<RelationalModel>,
) {
    out.push(RelationalModel {
        k: prefix[0],
        outcomes: prefix.clone(),
    });
    for i in 0..items.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        prefix.push(items[i]);
        arrangements(items, used, prefix, out);
        prefix.pop();
        used[i] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::parse_descriptor;
    use crate::logic::parse_input_set;
    use crate::operator::{check_postulate, PostulateId, UniverseSpec};

    fn lang(n: u8) -> Language {
        Language::new(n).unwrap()
    }

    fn cn(l: &Language, text: &str) -> BeliefSet {
        let a = parse_input_set(text, l).unwrap();
        BeliefSet::cn_of(l, a.as_slice())
    }

    #[test]
    fn validation_examples() {
        let l = lang(2);
        let k = l.tautologies();
        let x = cn(&l, "p0");
        assert!(validate_model(&RelationalModel::new(k, vec![k])).is_valid());

        let r = validate_model(&RelationalModel::new(k, vec![x, k]));
        assert!(!r.get("leq1").unwrap().passed);
        assert!(r.get("leq1").unwrap().witness.is_some());

        let r = validate_model(&RelationalModel::new(k, vec![k, x, x]));
        assert!(!r.get("leq2").unwrap().passed);
        assert!(
            !validate_model(&RelationalModel::new(k, vec![x]))
                .get("X2")
                .unwrap()
                .passed
        );
        let bad = RelationalModel::new(l.inconsistent(), vec![l.inconsistent()]);
        assert!(!validate_model(&bad).is_valid());
    }

    #[test]
    fn descriptor_revision_examples() {
        let l = lang(2);
        let k = cn(&l, "p0");
        let m = RelationalModel::new(k, vec![k, cn(&l, "p1"), l.inconsistent()]);
        assert_eq!(
            descriptor_revise(&m, &parse_descriptor("B(p0)", &l).unwrap()),
            k
        );
        assert_eq!(descriptor_revise(&m, &Descriptor::default()), k);
        assert_eq!(
            descriptor_revise(&m, &parse_descriptor("B(p1)", &l).unwrap()),
            cn(&l, "p1")
        );
        let no_bottom = RelationalModel::new(k, vec![k, cn(&l, "p1")]);
        assert_eq!(
            descriptor_revise(&no_bottom, &parse_descriptor("B(F)", &l).unwrap()),
            k
        );
    }

    #[test]
    fn choice_revision_examples() {
        let l = lang(2);
        let top = l.tautologies();
        let m = RelationalModel::new(top, vec![top, cn(&l, "p0"), cn(&l, "p1")]);
        assert_eq!(
            choice_revise_via_model(&m, &parse_input_set("p1", &l).unwrap()),
            cn(&l, "p1")
        );
        assert_eq!(choice_revise_via_model(&m, &InputSet::empty()), top);
        assert_eq!(
            choice_revise_via_model(&m, &parse_input_set("p1, p0 | ~p0", &l).unwrap()),
            top
        );
    }

    #[test]
    fn fast_path_matches_descriptor_path() {
        let l = lang(2);
        let u = Universe::enumerate(UniverseSpec::new(l, 2)).unwrap();
        for seed in 0..40 {
            let m = generate_model(seed, &l, 1 + seed as usize % 8, ModelFlags::default()).unwrap();
            for a in u.sets() {
                assert_eq!(choice_revise_fast(&m, a), choice_revise_via_model(&m, a));
            }
        }
    }

    // scan every consistent class for its first satisfier
    fn leq3_by_scan(m: &RelationalModel) -> bool {
        let l = Language::new(m.atoms()).unwrap();
        l.classes().into_iter().filter(|c| !c.is_bottom()).all(|c| {
            m.outcomes
                .iter()
                .find(|x| x.entails(&c))
                .is_some_and(|x| x.is_consistent())
        })
    }

    #[test]
    fn extended_condition_examples() {
        let l = lang(2);
        let top = l.tautologies();
        let f = check_extended_conditions(&RelationalModel::new(top, vec![top]));
        assert!(!f.has_x3);

        let mut all: Vec<BeliefSet> = l
            .belief_sets()
            .into_iter()
            .filter(|b| b.is_consistent())
            .collect();
        all.sort_by_key(|b| std::cmp::Reverse(b.bits().count_ones()));
        all.push(l.inconsistent());
        assert_eq!(all[0], top);
        let f = check_extended_conditions(&RelationalModel::new(top, all));
        assert_eq!(f, ModelFlags::new(true, true));

        let m = RelationalModel::new(top, vec![top, l.inconsistent()]);
        assert_eq!(check_extended_conditions(&m), ModelFlags::new(true, false));
        assert!(!leq3_by_scan(&m));
    }

    #[test]
    fn leq3_matches_scan() {
        for m in all_models(&lang(1)).unwrap() {
            assert_eq!(check_extended_conditions(&m).has_leq3, leq3_by_scan(&m));
        }
        let l = lang(2);
        for seed in 0..200 {
            let flags = ModelFlags::new(seed % 2 == 0, seed % 3 == 0);
            let size = 5 + seed as usize % 6;
            let m = generate_model(seed, &l, size, flags).unwrap();
            assert_eq!(check_extended_conditions(&m).has_leq3, leq3_by_scan(&m));
        }
    }

    #[test]
    fn generation_is_deterministic_and_honours_flags() {
        let l = lang(2);
        let f = ModelFlags::new(true, true);
        assert_eq!(
            generate_model(5, &l, 7, f).unwrap(),
            generate_model(5, &l, 7, f).unwrap()
        );
        for seed in 0..100 {
            for size in 1..=8 {
                for flags in [
                    ModelFlags::new(false, false),
                    ModelFlags::new(true, false),
                    ModelFlags::new(false, true),
                    ModelFlags::new(true, true),
                ] {
                    match generate_model(seed, &l, size, flags) {
                        Ok(m) => {
                            assert!(validate_model(&m).is_valid());
                            assert_eq!(m.len(), size);
                            assert!(m.k.is_consistent());
                            let got = check_extended_conditions(&m);
                            assert!(!flags.has_x3 || got.has_x3);
                            assert!(!flags.has_leq3 || got.has_leq3);
                        }
                        Err(Error::Infeasible(_)) => {
                            let min =
                                if flags.has_leq3 { 4 } else { 1 } + usize::from(flags.has_x3);
                            assert!(size < min);
                        }
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
        assert!(generate_model(0, &l, 0, ModelFlags::default()).is_err());
        assert!(generate_model(0, &l, 17, ModelFlags::default()).is_err());
    }

    #[test]
    fn one_atom_model_count() {
        let models = all_models(&lang(1)).unwrap();
        assert_eq!(models.len(), 48);
        assert!(models.iter().all(|m| validate_model(m).is_valid()));
        assert!(all_models(&lang(2)).is_err());
    }

    #[test]
    fn outcomes_are_k_or_successful() {
        let l = lang(2);
        let u = Universe::enumerate(UniverseSpec::new(l, 2)).unwrap();
        for seed in 0..50 {
            let m = generate_model(seed, &l, 1 + seed as usize % 8, ModelFlags::default()).unwrap();
            for a in u.sets().iter().filter(|a| !a.is_empty()) {
                let x = choice_revise_via_model(&m, a);
                assert!(x == m.k || a.iter().any(|c| x.entails(c)));
            }
        }
    }

    #[test]
    fn induced_operators_satisfy_basic_postulates() {
        let l = lang(2);
        let u = Universe::enumerate(UniverseSpec::new(l, 2)).unwrap();
        for seed in 0..30 {
            let m = generate_model(seed, &l, 1 + seed as usize % 8, ModelFlags::default()).unwrap();
            let op = induced_operator(&m, &u).unwrap();
            for p in PostulateId::BASIC {
                assert!(check_postulate(&op, p).passed(), "seed {seed} {p}");
            }
        }
        for seed in 0..30 {
            let m = generate_model(seed, &l, 6, ModelFlags::new(true, true)).unwrap();
            let op = induced_operator(&m, &u).unwrap();
            for p in PostulateId::SUPPLEMENTED {
                assert!(check_postulate(&op, p).passed(), "seed {seed} {p}");
            }
        }
        let bad = RelationalModel::new(l.tautologies(), vec![cn(&l, "p0")]);
        assert!(induced_operator(&bad, &u).is_err());
    }
}
