use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use super::{BelievabilityRelation, MultiBelievabilityRelation};
use crate::error::{Error, Result};
use crate::graph::BitMatrix;
use crate::logic::{InputSet, SentenceClass};
use crate::operator::Universe;
use crate::report::{PostulateReport, Tally, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationPostulateId {
    Transitivity,
    WeakCoupling,
    Coupling,
    CounterDominance,
    Minimality,
    Maximality,
    Completeness,
    Determination,
    Union,
}

impl RelationPostulateId {
    pub const ALL: [RelationPostulateId; 9] = [
        RelationPostulateId::Transitivity,
        RelationPostulateId::WeakCoupling,
        RelationPostulateId::Coupling,
        RelationPostulateId::CounterDominance,
        RelationPostulateId::Minimality,
        RelationPostulateId::Maximality,
        RelationPostulateId::Completeness,
        RelationPostulateId::Determination,
        RelationPostulateId::Union,
    ];

    /// The postulates with a single-sentence form; together they define
    /// quasi-linear relations.
    pub const SINGLE: [RelationPostulateId; 7] = [
        RelationPostulateId::Transitivity,
        RelationPostulateId::WeakCoupling,
        RelationPostulateId::Coupling,
        RelationPostulateId::CounterDominance,
        RelationPostulateId::Minimality,
        RelationPostulateId::Maximality,
        RelationPostulateId::Completeness,
    ];

    /// All nine; together they define standard relations.
    pub const STANDARD: [RelationPostulateId; 9] = RelationPostulateId::ALL;

    /// What a relation needs to determine an operator satisfying the basic
    /// choice-revision postulates.
    pub const BASIC: [RelationPostulateId; 5] = [
        RelationPostulateId::Transitivity,
        RelationPostulateId::WeakCoupling,
        RelationPostulateId::CounterDominance,
        RelationPostulateId::Minimality,
        RelationPostulateId::Union,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RelationPostulateId::Transitivity => "transitivity",
            RelationPostulateId::WeakCoupling => "weak_coupling",
            RelationPostulateId::Coupling => "coupling",
            RelationPostulateId::CounterDominance => "counter_dominance",
            RelationPostulateId::Minimality => "minimality",
            RelationPostulateId::Maximality => "maximality",
            RelationPostulateId::Completeness => "completeness",
            RelationPostulateId::Determination => "determination",
            RelationPostulateId::Union => "union",
        }
    }

    pub fn has_single_form(&self) -> bool {
        RelationPostulateId::SINGLE.contains(self)
    }
}

impl fmt::Display for RelationPostulateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationPostulateId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RelationPostulateId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown relation postulate '{s}'")))
    }
}

type Report = PostulateReport<RelationPostulateId>;

fn singles(cs: &[SentenceClass]) -> Witness {
    Witness::inputs(cs.iter().map(|c| InputSet::singleton(*c)).collect())
}

pub fn check_single_postulate(r: &BelievabilityRelation, p: RelationPostulateId) -> Result<Report> {
    let lang = r.lang();
    let k = r.k();
    let classes = lang.classes();
    let m: &BitMatrix = r.matrix();
    let idx = |c: &SentenceClass| c.bits() as usize;
    let le = |a: &SentenceClass, b: &SentenceClass| r.holds(a, b);
    let eqv = |a: &SentenceClass, b: &SentenceClass| le(a, b) && le(b, a);
    let mut t = Tally::default();

    match p {
        RelationPostulateId::Transitivity => {
            'outer: for a in &classes {
                for b in &classes {
                    if !le(a, b) {
                        continue;
                    }
                    let c = m
                        .row_difference(idx(b), idx(a))
                        .map(|bits| lang.class_from_bits(bits as u16));
                    if !t.check(c.is_none(), || singles(&[*a, *b, c.unwrap_or(*a)])) {
                        break 'outer;
                    }
                }
            }
        }
        RelationPostulateId::WeakCoupling => {
            'outer: for a in &classes {
                let s: Vec<SentenceClass> = classes
                    .iter()
                    .copied()
                    .filter(|b| eqv(a, &a.and(b)))
                    .collect();
                for (i, b) in s.iter().enumerate() {
                    for c in &s[i..] {
                        let holds = eqv(a, &a.and(b).and(c));
                        if !t.check(holds, || singles(&[*a, *b, *c])) {
                            break 'outer;
                        }
                    }
                }
            }
        }
        RelationPostulateId::Coupling => {
            'outer: for a in &classes {
                for b in &classes {
                    if eqv(a, b) && !t.check(eqv(a, &a.and(b)), || singles(&[*a, *b])) {
                        break 'outer;
                    }
                }
            }
        }
        RelationPostulateId::CounterDominance => {
            'outer: for a in &classes {
                for b in &classes {
                    if a.entails(b) && !t.check(le(b, a), || singles(&[*a, *b])) {
                        break 'outer;
                    }
                }
            }
        }
        RelationPostulateId::Minimality => {
            for a in &classes {
                let below_all = classes.iter().all(|b| le(a, b));
                if !t.check(below_all == k.entails(a), || singles(&[*a])) {
                    break;
                }
            }
        }
        RelationPostulateId::Maximality => {
            for a in &classes {
                let above_all = classes.iter().all(|b| le(b, a));
                if !t.check(!above_all || a.is_bottom(), || singles(&[*a])) {
                    break;
                }
            }
        }
        RelationPostulateId::Completeness => {
            'outer: for (i, a) in classes.iter().enumerate() {
                for b in &classes[i..] {
                    if !t.check(le(a, b) || le(b, a), || singles(&[*a, *b])) {
                        break 'outer;
                    }
                }
            }
        }
        RelationPostulateId::Determination | RelationPostulateId::Union => {
            return Err(Error::NotApplicable(format!(
                "{p} has no single-sentence form"
            )));
        }
    }
    Ok(t.finish(p))
}

pub fn check_single_all(
    r: &BelievabilityRelation,
    ids: &[RelationPostulateId],
) -> Result<Vec<Report>> {
    ids.iter().map(|&p| check_single_postulate(r, p)).collect()
}

/// All seven single-sentence postulates hold.
pub fn is_quasi_linear(r: &BelievabilityRelation) -> bool {
    RelationPostulateId::SINGLE
        .iter()
        .all(|&p| check_single_postulate(r, p).is_ok_and(|rep| rep.passed()))
}

/// A relation materialized over a universe. Sets built by `∪` or `⩕` that
/// fall outside the universe are sent back to the relation itself.
struct View<'a> {
    mb: &'a MultiBelievabilityRelation,
    u: &'a Arc<Universe>,
    m: BitMatrix,
}

impl View<'_> {
    fn q(&self, a: &InputSet, b: &InputSet) -> Option<bool> {
        match (self.u.index_of(a), self.u.index_of(b)) {
            (Some(i), Some(j)) => Some(self.m.get(i, j)),
            _ => self.mb.query(a, b),
        }
    }

    fn eqv(&self, a: &InputSet, b: &InputSet) -> Option<bool> {
        Some(self.q(a, b)? && self.q(b, a)?)
    }

    fn le(&self, a: usize, b: usize) -> bool {
        self.m.get(a, b)
    }
}

fn sets(u: &Universe, idx: &[usize]) -> Witness {
    Witness::inputs(idx.iter().map(|&i| u.get(i).clone()).collect())
}

fn check_view(v: &View<'_>, p: RelationPostulateId) -> Report {
    let u = v.u;
    let n = u.len();
    let k = v.mb.k();
    let empty = u.index_of(&InputSet::empty());
    let mut t = Tally::default();

    match p {
        RelationPostulateId::Transitivity => {
            'outer: for a in 0..n {
                for b in v.m.successors(a) {
                    let c = v.m.row_difference(b, a);
                    if !t.check(c.is_none(), || sets(u, &[a, b, c.unwrap_or(a)])) {
                        break 'outer;
                    }
                }
            }
        }
        RelationPostulateId::WeakCoupling => {
            'outer: for a in 0..n {
                let sa = u.get(a);
                let mut s: Vec<(usize, InputSet)> = Vec::new();
                for b in 0..n {
                    let ab = sa.pairwise_conj(u.get(b));
                    match v.eqv(sa, &ab) {
                        Some(true) => s.push((b, ab)),
                        Some(false) => {}
                        None => t.skip(),
                    }
                }
                let mut memo: HashMap<InputSet, Option<bool>> = HashMap::new();
                for (i, (b, ab)) in s.iter().enumerate() {
                    for (c, _) in &s[i..] {
                        let abc = ab.pairwise_conj(u.get(*c));
                        let got = *memo.entry(abc).or_insert_with_key(|x| v.eqv(sa, x));
                        match got {
                            None => t.skip(),
                            Some(holds) => {
                                if !t.check(holds, || sets(u, &[a, *b, *c])) {
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
        }
        RelationPostulateId::Coupling => {
            'outer: for a in 0..n {
                for b in v.m.successors(a) {
                    if !v.le(b, a) {
                        continue;
                    }
                    let ab = u.get(a).pairwise_conj(u.get(b));
                    match v.eqv(u.get(a), &ab) {
                        None => t.skip(),
                        Some(holds) => {
                            if !t.check(holds, || sets(u, &[a, b])) {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        RelationPostulateId::CounterDominance => {
            'outer: for a in 0..n {
                let sa = u.get(a);
                for b in 0..n {
                    let dominated = u
                        .get(b)
                        .iter()
                        .all(|phi| sa.iter().any(|psi| phi.entails(psi)));
                    if dominated && !t.check(v.le(a, b), || sets(u, &[a, b])) {
                        break 'outer;
                    }
                }
            }
        }
        RelationPostulateId::Minimality => {
            for a in 0..n {
                let missing = (0..n).find(|&b| !v.le(a, b));
                let holds = missing.is_none() == k.meets(u.get(a));
                let w = || match missing {
                    Some(b) => sets(u, &[a, b]),
                    None => sets(u, &[a]),
                };
                if !t.check(holds, w) {
                    break;
                }
            }
        }
        RelationPostulateId::Maximality => {
            for b in 0..n {
                let sb = u.get(b);
                if sb.is_empty() {
                    continue;
                }
                let top = (0..n).all(|a| u.get(a).is_empty() || v.le(a, b));
                if !t.check(!top || sb.is_falsum(), || sets(u, &[b])) {
                    break;
                }
            }
        }
        RelationPostulateId::Completeness => {
            'outer: for a in 0..n {
                for b in a..n {
                    if !t.check(v.le(a, b) || v.le(b, a), || sets(u, &[a, b])) {
                        break 'outer;
                    }
                }
            }
        }
        RelationPostulateId::Determination => {
            if let Some(e) = empty {
                for a in 0..n {
                    if a == e {
                        continue;
                    }
                    let holds = v.le(a, e) && !v.le(e, a);
                    if !t.check(holds, || sets(u, &[a, e])) {
                        break;
                    }
                }
            }
        }
        RelationPostulateId::Union => {
            'outer: for a in 0..n {
                for b in a + 1..n {
                    let (sa, sb) = (u.get(a), u.get(b));
                    let c = sa.union(sb);
                    let verdict = match (v.q(sa, &c), v.q(sb, &c)) {
                        (Some(true), _) | (_, Some(true)) => Some(true),
                        (Some(false), Some(false)) => Some(false),
                        _ => None,
                    };
                    match verdict {
                        None => t.skip(),
                        Some(holds) => {
                            let w = || Witness::inputs(vec![sa.clone(), sb.clone(), c.clone()]);
                            if !t.check(holds, w) {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
    }
    t.finish(p)
}

pub fn check_multi_postulate(
    mb: &MultiBelievabilityRelation,
    p: RelationPostulateId,
    u: &Arc<Universe>,
) -> Result<Report> {
    Ok(check_multi_all(mb, &[p], u)?.remove(0))
}

pub fn check_multi_all(
    mb: &MultiBelievabilityRelation,
    ids: &[RelationPostulateId],
    u: &Arc<Universe>,
) -> Result<Vec<Report>> {
    let view = View {
        mb,
        u,
        m: mb.materialize(u)?,
    };
    Ok(ids.iter().map(|&p| check_view(&view, p)).collect())
}

/// All nine multi-set postulates hold on `u`.
pub fn is_standard(mb: &MultiBelievabilityRelation, u: &Arc<Universe>) -> Result<bool> {
    Ok(check_multi_all(mb, &RelationPostulateId::STANDARD, u)?
        .iter()
        .all(|r| r.passed()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::believability::{derive_mb_from_operator, lift, random_quasi_linear};
    use crate::logic::{parse_input_set, BeliefSet, Language};
    use crate::model::{generate_model, induced_operator, ModelFlags};
    use crate::operator::{random_operator, UniverseSpec};
    use crate::report::Verdict;

    fn universe(atoms: u8, max: usize) -> Arc<Universe> {
        Universe::enumerate(UniverseSpec::new(Language::new(atoms).unwrap(), max)).unwrap()
    }

    // direct evaluation of the quantifiers over classes
    fn naive_single(r: &BelievabilityRelation, p: RelationPostulateId) -> bool {
        let cs = r.lang().classes();
        let le = |a: &SentenceClass, b: &SentenceClass| r.holds(a, b);
        let eq = |a: &SentenceClass, b: &SentenceClass| le(a, b) && le(b, a);
        match p {
            RelationPostulateId::Transitivity => cs.iter().all(|a| {
                cs.iter()
                    .all(|b| cs.iter().all(|c| !(le(a, b) && le(b, c)) || le(a, c)))
            }),
            RelationPostulateId::WeakCoupling => cs.iter().all(|a| {
                cs.iter().all(|b| {
                    cs.iter().all(|c| {
                        !(eq(a, &a.and(b)) && eq(a, &a.and(c))) || eq(a, &a.and(&b.and(c)))
                    })
                })
            }),
            RelationPostulateId::Coupling => cs
                .iter()
                .all(|a| cs.iter().all(|b| !eq(a, b) || eq(a, &a.and(b)))),
            RelationPostulateId::Completeness => {
                cs.iter().all(|a| cs.iter().all(|b| le(a, b) || le(b, a)))
            }
            _ => unimplemented!(),
        }
    }

    #[test]
    fn names_round_trip() {
        for p in RelationPostulateId::ALL {
            assert_eq!(p.name().parse::<RelationPostulateId>().unwrap(), p);
        }
    }

    #[test]
    fn reverse_entailment_is_incomplete() {
        let l = Language::new(2).unwrap();
        let r = BelievabilityRelation::from_fn(l, l.tautologies(), |a, b| b.entails(&a)).unwrap();
        let rep = check_single_postulate(&r, RelationPostulateId::Completeness).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
        assert!(
            check_single_postulate(&r, RelationPostulateId::CounterDominance)
                .unwrap()
                .passed()
        );
        assert!(check_single_postulate(&r, RelationPostulateId::Union).is_err());
        let p0 = l.atom(0).unwrap();
        let p1 = l.atom(1).unwrap();
        assert!(!r.holds(&p0, &p1) && !r.holds(&p1, &p0));
    }

    #[test]
    fn single_checks_match_naive() {
        let l = Language::new(2).unwrap();
        let k = BeliefSet::cn(l.atom(0).unwrap());
        let mut state = 12345u64;
        for round in 0..60 {
            let r = BelievabilityRelation::from_fn(l, k, |a, b| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                // mostly a preorder by model count, with random noise
                let base = a.bits().count_ones() >= b.bits().count_ones();
                if (state >> 33) % 10 < (round % 4) {
                    !base
                } else {
                    base
                }
            })
            .unwrap();
            for p in [
                RelationPostulateId::Transitivity,
                RelationPostulateId::WeakCoupling,
                RelationPostulateId::Coupling,
                RelationPostulateId::Completeness,
            ] {
                let rep = check_single_postulate(&r, p).unwrap();
                assert_eq!(rep.passed(), naive_single(&r, p), "round {round} {p}");
            }
        }
    }

    #[test]
    fn generated_quasi_linear_relations_lift_to_standard() {
        let l = Language::new(2).unwrap();
        let u = universe(2, 2);
        for seed in 0..10 {
            let r = random_quasi_linear(seed, &l).unwrap();
            assert!(is_quasi_linear(&r));
            let mb = lift(&r);
            for rep in check_multi_all(&mb, &RelationPostulateId::STANDARD, &u).unwrap() {
                assert!(rep.passed(), "seed {seed} {}", rep.postulate);
            }
        }
    }

    #[test]
    fn minimality_example() {
        let l = Language::new(2).unwrap();
        let u = universe(2, 2);
        let mb = lift(&random_quasi_linear(4, &l).unwrap());
        let k = mb.k();
        for a in u.sets().iter().filter(|a| k.meets(a)) {
            for b in u.sets() {
                assert_eq!(mb.query(a, b), Some(true));
            }
        }
        let a = parse_input_set("T", &l).unwrap();
        assert!(k.meets(&a));
    }

    #[test]
    fn derived_relations_of_model_operators() {
        let l = Language::new(2).unwrap();
        let u = universe(2, 2);
        for seed in 0..10 {
            let m = generate_model(seed, &l, 1 + seed as usize % 8, ModelFlags::default()).unwrap();
            let mb = derive_mb_from_operator(&induced_operator(&m, &u).unwrap());
            for rep in check_multi_all(&mb, &RelationPostulateId::BASIC, &u).unwrap() {
                assert!(rep.passed(), "seed {seed} {}", rep.postulate);
            }
            let m = generate_model(seed, &l, 7, ModelFlags::new(true, true)).unwrap();
            let mb = derive_mb_from_operator(&induced_operator(&m, &u).unwrap());
            assert!(is_standard(&mb, &u).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn random_operators_give_failing_relations() {
        let u = universe(1, 4);
        let failing = (0..50)
            .map(|s| derive_mb_from_operator(&random_operator(s, &u)))
            .filter(|mb| !is_standard(mb, &u).unwrap())
            .count();
        assert!(failing > 0);
    }
}
