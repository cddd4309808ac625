//! Consequences of the relation postulates, checked on concrete relations.
//! Each item is an implication: it is confirmed when its antecedent holds
//! and its conclusion holds on every evaluable instance.

use std::sync::Arc;

use super::postulates::{check_multi_all, RelationPostulateId as R};
use super::{derive_mb_from_operator, representation_element, MultiBelievabilityRelation};
use crate::error::Result;
use crate::logic::InputSet;
use crate::operator::{check_postulate, ChoiceOperator, PostulateId, Universe};
use crate::report::{ImplicationCheck, ImplicationReport};

fn holding(mb: &MultiBelievabilityRelation, u: &Arc<Universe>, ids: &[R]) -> Result<Vec<bool>> {
    Ok(check_multi_all(mb, ids, u)?
        .iter()
        .map(|r| r.passed())
        .collect())
}

/// Under counter dominance and transitivity: every nonempty `A` has a
/// representation element once union holds, and for `φ ∈ A`,
/// `A ≃c A ⩕ {φ}` iff `{φ} ≃c A`.
pub fn check_representation_lemma(
    mb: &MultiBelievabilityRelation,
    u: &Arc<Universe>,
) -> Result<ImplicationReport> {
    let h = holding(mb, u, &[R::CounterDominance, R::Transitivity, R::Union])?;
    let base = h[0] && h[1];

    let exists = u
        .sets()
        .iter()
        .filter(|a| !a.is_empty())
        .all(|a| representation_element(mb, a).is_ok());

    let biconditional = u.sets().iter().all(|a| {
        a.iter().all(|phi| {
            let single = InputSet::singleton(*phi);
            let conj = a.pairwise_conj(&single);
            match (mb.equivalent(a, &conj), mb.equivalent(&single, a)) {
                (Some(x), Some(y)) => x == y,
                _ => true,
            }
        })
    });

    Ok(ImplicationReport {
        items: vec![
            ImplicationCheck::implication("representation_element_exists", base && h[2], exists),
            ImplicationCheck::implication("conjunction_equivalence", base, biconditional),
        ],
    })
}

/// Under determination, transitivity and counter dominance, for nonempty
/// `A` and `B`: `A ≼c B` iff some `φ ∈ A` has `{φ} ≼c B`, and iff
/// `A ≼c {ψ}` for every `ψ ∈ B`.
pub fn check_member_reduction(
    mb: &MultiBelievabilityRelation,
    u: &Arc<Universe>,
) -> Result<ImplicationReport> {
    let h = holding(
        mb,
        u,
        &[R::Determination, R::Transitivity, R::CounterDominance],
    )?;
    let antecedent = h.iter().all(|&x| x);
    let m = mb.materialize(u)?;
    let single = |c| {
        u.singleton(c)
            .expect("singletons lie in every nonempty universe")
    };
    let nonempty: Vec<usize> = (0..u.len()).filter(|&i| !u.get(i).is_empty()).collect();

    let mut some_member = true;
    let mut every_member = true;
    for &a in &nonempty {
        for &b in &nonempty {
            let lhs = m.get(a, b);
            some_member &= lhs == u.get(a).iter().any(|&phi| m.get(single(phi), b));
            every_member &= lhs == u.get(b).iter().all(|&psi| m.get(a, single(psi)));
        }
    }
    Ok(ImplicationReport {
        items: vec![
            ImplicationCheck::implication("reduces_to_some_member", antecedent, some_member),
            ImplicationCheck::implication("reduces_to_every_member", antecedent, every_member),
        ],
    })
}

/// Under transitivity, counter dominance and union: completeness holds, and
/// weak coupling holds iff coupling does. Only asserted on a universe closed
/// under union, since the argument passes through `A ∪ B`.
pub fn check_union_consequences(
    mb: &MultiBelievabilityRelation,
    u: &Arc<Universe>,
) -> Result<ImplicationReport> {
    let h = holding(
        mb,
        u,
        &[
            R::Transitivity,
            R::CounterDominance,
            R::Union,
            R::Completeness,
            R::WeakCoupling,
            R::Coupling,
        ],
    )?;
    let antecedent = u.is_union_closed() && h[0] && h[1] && h[2];
    Ok(ImplicationReport {
        items: vec![
            ImplicationCheck::implication("union_implies_completeness", antecedent, h[3]),
            ImplicationCheck::implication("weak_coupling_iff_coupling", antecedent, h[4] == h[5]),
        ],
    })
}

/// For the relation derived from an operator satisfying the basic
/// postulates, `A ≃c B` forces `K ∗c A = K ∗c B`.
pub fn check_outcome_agreement(op: &ChoiceOperator) -> ImplicationReport {
    let basic = PostulateId::BASIC
        .iter()
        .all(|&p| check_postulate(op, p).passed());
    let mb = derive_mb_from_operator(op);
    let u = op.universe();
    let n = u.len();
    let agree = (0..n).all(|a| {
        (a..n).all(|b| {
            let eq = mb.query_idx(u, a, b) == Some(true) && mb.query_idx(u, b, a) == Some(true);
            !eq || op.outcome(a) == op.outcome(b)
        })
    });
    ImplicationReport {
        items: vec![ImplicationCheck::implication(
            "equivalent_inputs_share_outcomes",
            basic,
            agree,
        )],
    }
}
