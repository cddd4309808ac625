use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::ChoiceOperator;
use crate::error::Error;
use crate::graph::{cycle_through, strongly_connected_components};
use crate::logic::InputSet;
use crate::report::{ImplicationCheck, ImplicationReport, PostulateReport, Tally, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PostulateId {
    Closure,
    RelativeSuccess,
    Regularity,
    Confirmation,
    Reciprocity,
    Success,
    Vacuity,
    Consistency,
    SyntaxIrrelevance,
    Cautiousness,
    Dichotomy,
    StrongReciprocity,
}

impl PostulateId {
    pub const ALL: [PostulateId; 12] = [
        PostulateId::Closure,
        PostulateId::RelativeSuccess,
        PostulateId::Regularity,
        PostulateId::Confirmation,
        PostulateId::Reciprocity,
        PostulateId::Success,
        PostulateId::Vacuity,
        PostulateId::Consistency,
        PostulateId::SyntaxIrrelevance,
        PostulateId::Cautiousness,
        PostulateId::Dichotomy,
        PostulateId::StrongReciprocity,
    ];

    /// `(∗c1)` through `(∗c5)`.
    pub const BASIC: [PostulateId; 5] = [
        PostulateId::Closure,
        PostulateId::RelativeSuccess,
        PostulateId::Regularity,
        PostulateId::Confirmation,
        PostulateId::Reciprocity,
    ];

    /// Closure, success, vacuity, confirmation, reciprocity, consistency.
    pub const SUPPLEMENTED: [PostulateId; 6] = [
        PostulateId::Closure,
        PostulateId::Success,
        PostulateId::Vacuity,
        PostulateId::Confirmation,
        PostulateId::Reciprocity,
        PostulateId::Consistency,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PostulateId::Closure => "closure",
            PostulateId::RelativeSuccess => "relative_success",
            PostulateId::Regularity => "regularity",
            PostulateId::Confirmation => "confirmation",
            PostulateId::Reciprocity => "reciprocity",
            PostulateId::Success => "success",
            PostulateId::Vacuity => "vacuity",
            PostulateId::Consistency => "consistency",
            PostulateId::SyntaxIrrelevance => "syntax_irrelevance",
            PostulateId::Cautiousness => "cautiousness",
            PostulateId::Dichotomy => "dichotomy",
            PostulateId::StrongReciprocity => "strong_reciprocity",
        }
    }
}

impl fmt::Display for PostulateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PostulateId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        PostulateId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown postulate '{s}'")))
    }
}

pub fn check_postulate(op: &ChoiceOperator, p: PostulateId) -> PostulateReport<PostulateId> {
    let u = op.universe();
    let n = u.len();
    let k = op.k();
    let hits = op.hits();
    let out = |i: usize| op.outcome(i);
    let w1 = |a: usize| Witness::new(vec![u.get(a).clone()], vec![out(a)]);
    let w2 = |a: usize, b: usize| {
        Witness::new(
            vec![u.get(a).clone(), u.get(b).clone()],
            vec![out(a), out(b)],
        )
    };
    let mut t = Tally::default();

    match p {
        // outcomes are belief sets by construction
        PostulateId::Closure | PostulateId::SyntaxIrrelevance => {
            for _ in 0..n {
                t.check(true, || unreachable!());
            }
        }
        PostulateId::RelativeSuccess => {
            for a in 0..n {
                if !t.check(out(a) == k || hits.get(a, a), || w1(a)) {
                    break;
                }
            }
        }
        PostulateId::Regularity => {
            for a in 0..n {
                if hits.get(a, a) {
                    t.check(true, || unreachable!());
                    continue;
                }
                let bad = hits.successors(a).next();
                if !t.check(bad.is_none(), || w2(a, bad.unwrap_or(a))) {
                    break;
                }
            }
        }
        PostulateId::Confirmation => {
            for a in 0..n {
                let holds = !k.meets(u.get(a)) || out(a) == k;
                if !t.check(holds, || w1(a)) {
                    break;
                }
            }
        }
        PostulateId::Reciprocity => {
            'outer: for a in 0..n {
                for b in hits.successors(a) {
                    if b < a {
                        continue;
                    }
                    let holds = !hits.get(b, a) || out(a) == out(b);
                    if !t.check(holds, || w2(a, b)) {
                        break 'outer;
                    }
                }
            }
        }
        PostulateId::Success => {
            for a in 0..n {
                let holds = u.get(a).is_empty() || hits.get(a, a);
                if !t.check(holds, || w1(a)) {
                    break;
                }
            }
        }
        PostulateId::Vacuity => {
            if let Some(e) = u.index_of(&InputSet::empty()) {
                t.check(out(e) == k, || w1(e));
            }
        }
        PostulateId::Consistency => {
            for a in 0..n {
                let holds = u.get(a).is_falsum() || out(a).is_consistent();
                if !t.check(holds, || w1(a)) {
                    break;
                }
            }
        }
        PostulateId::Cautiousness => {
            'outer: for b in 0..n {
                let sb = u.get(b);
                for a in 0..n {
                    let sa = u.get(a);
                    if sa.len() > sb.len() || !hits.get(a, b) || !sa.is_subset(sb) {
                        continue;
                    }
                    if !t.check(out(a) == out(b), || w2(a, b)) {
                        break 'outer;
                    }
                }
            }
        }
        PostulateId::Dichotomy => {
            'outer: for a in 0..n {
                for b in a + 1..n {
                    match u.index_of(&u.get(a).union(u.get(b))) {
                        None => t.skip(),
                        Some(c) => {
                            let holds = out(c) == out(a) || out(c) == out(b);
                            let w = || {
                                Witness::new(
                                    vec![u.get(a).clone(), u.get(b).clone(), u.get(c).clone()],
                                    vec![out(a), out(b), out(c)],
                                )
                            };
                            if !t.check(holds, w) {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        PostulateId::StrongReciprocity => {
            let comp = strongly_connected_components(hits);
            let mut rep: Vec<Option<usize>> = vec![None; n];
            for a in 0..n {
                match rep[comp[a]] {
                    None => {
                        rep[comp[a]] = Some(a);
                        t.check(true, || unreachable!());
                    }
                    Some(r) => {
                        let w = || {
                            let cycle =
                                cycle_through(hits, &comp, r, a).unwrap_or_else(|| vec![r, a]);
                            let outs = cycle.iter().map(|&i| out(i)).collect();
                            Witness::new(cycle.iter().map(|&i| u.get(i).clone()).collect(), outs)
                        };
                        if !t.check(out(r) == out(a), w) {
                            break;
                        }
                    }
                }
            }
        }
    }
    t.finish(p)
}

pub fn check_all(op: &ChoiceOperator, ids: &[PostulateId]) -> Vec<PostulateReport<PostulateId>> {
    ids.iter().map(|&p| check_postulate(op, p)).collect()
}

pub fn passes_all(op: &ChoiceOperator, ids: &[PostulateId]) -> bool {
    ids.iter().all(|&p| check_postulate(op, p).passed())
}

/// Re-evaluate a failure witness against the operator; true iff the
/// witness really violates `p`.
pub fn recheck_witness(op: &ChoiceOperator, p: PostulateId, w: &Witness) -> bool {
    let k = op.k();
    let outs: Option<Vec<_>> = w.inputs.iter().map(|a| op.revise(a)).collect();
    let Some(outs) = outs else {
        return false;
    };
    if outs != w.outcomes {
        return false;
    }
    let meets = |x: usize, y: usize| outs[y].meets(&w.inputs[x]);
    let ins = &w.inputs;
    match (p, ins.len()) {
        (PostulateId::RelativeSuccess, 1) => outs[0] != k && !meets(0, 0),
        (PostulateId::Regularity, 2) => meets(0, 1) && !meets(0, 0),
        (PostulateId::Confirmation, 1) => k.meets(&ins[0]) && outs[0] != k,
        (PostulateId::Reciprocity, 2) => meets(0, 1) && meets(1, 0) && outs[0] != outs[1],
        (PostulateId::Success, 1) => !ins[0].is_empty() && !meets(0, 0),
        (PostulateId::Vacuity, 1) => ins[0].is_empty() && outs[0] != k,
        (PostulateId::Consistency, 1) => !ins[0].is_falsum() && !outs[0].is_consistent(),
        (PostulateId::Cautiousness, 2) => {
            ins[0].is_subset(&ins[1]) && meets(0, 1) && outs[0] != outs[1]
        }
        (PostulateId::Dichotomy, 3) => {
            ins[2] == ins[0].union(&ins[1]) && outs[2] != outs[0] && outs[2] != outs[1]
        }
        (PostulateId::StrongReciprocity, m) if m >= 1 => {
            let closed = (0..m).all(|i| meets(i, (i + 1) % m));
            closed && outs.iter().any(|x| *x != outs[0])
        }
        _ => false,
    }
}

/// Implications between postulates, evaluated on one operator.
///
/// Directions whose argument constructs unions of inputs are only sound on
/// a universe closed under union; elsewhere they are reported as not
/// applicable.
pub fn check_equivalences(op: &ChoiceOperator) -> ImplicationReport {
    let holds = |p| check_postulate(op, p).passed();
    let closure = holds(PostulateId::Closure);
    let rel = holds(PostulateId::RelativeSuccess);
    let reg = holds(PostulateId::Regularity);
    let rec = holds(PostulateId::Reciprocity);
    let succ = holds(PostulateId::Success);
    let vac = holds(PostulateId::Vacuity);
    let caut = holds(PostulateId::Cautiousness);
    let strong = holds(PostulateId::StrongReciprocity);
    let union_closed = op.universe().is_union_closed();

    let items = vec![
        ImplicationCheck::implication(
            "basic_implies_syntax_irrelevance",
            closure && rel && reg && rec,
            holds(PostulateId::SyntaxIrrelevance),
        ),
        ImplicationCheck::implication("reciprocity_implies_cautiousness", rel && reg && rec, caut),
        ImplicationCheck::implication(
            "cautiousness_implies_reciprocity",
            union_closed && rel && reg && caut,
            rec,
        ),
        ImplicationCheck::implication(
            "reciprocity_implies_dichotomy",
            rel && reg && rec,
            holds(PostulateId::Dichotomy),
        ),
        ImplicationCheck::implication(
            "reciprocity_implies_strong_reciprocity",
            union_closed && reg && rec,
            strong,
        ),
        ImplicationCheck::implication("strong_reciprocity_implies_reciprocity", reg && strong, rec),
        ImplicationCheck::implication("relative_success_implies_vacuity", rel, vac),
        ImplicationCheck::implication(
            "success_and_vacuity_imply_relative_success",
            succ && vac,
            rel,
        ),
        ImplicationCheck::implication("success_implies_regularity", succ, reg),
    ];
    ImplicationReport { items }
}
