//! Believability relations on sentences and multi-believability relations
//! on finite input sets, the translations between them, and choice revision
//! built from a multi-believability relation.

mod generate;
mod lemmas;
mod postulates;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::BitMatrix;
use crate::logic::{BeliefSet, InputSet, Language, SentenceClass};
use crate::operator::{ChoiceOperator, Universe};

pub use generate::{random_quasi_linear, random_standard};
pub use lemmas::{
    check_member_reduction, check_outcome_agreement, check_representation_lemma,
    check_union_consequences,
};
pub use postulates::{
    check_multi_all, check_multi_postulate, check_single_all, check_single_postulate,
    is_quasi_linear, is_standard, RelationPostulateId,
};

/// Largest language whose class-by-class relations are stored densely.
pub const MAX_RELATION_ATOMS: u8 = 3;

/// `φ ≼ ψ` over all sentence classes, with the belief set `K` it is read
/// against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BelievabilityRelation {
    lang: Language,
    k: BeliefSet,
    m: BitMatrix,
}

impl BelievabilityRelation {
    pub fn empty(lang: Language, k: BeliefSet) -> Result<Self> {
        if lang.atoms() > MAX_RELATION_ATOMS {
            return Err(Error::CapExceeded(format!(
                "sentence relations are limited to {MAX_RELATION_ATOMS} atoms"
            )));
        }
        Ok(BelievabilityRelation {
            lang,
            k,
            m: BitMatrix::new(lang.class_count()),
        })
    }

    pub fn from_fn(
        lang: Language,
        k: BeliefSet,
        mut f: impl FnMut(SentenceClass, SentenceClass) -> bool,
    ) -> Result<Self> {
        let mut r = BelievabilityRelation::empty(lang, k)?;
        let classes = lang.classes();
        for &a in &classes {
            for &b in &classes {
                if f(a, b) {
                    r.set(a, b, true);
                }
            }
        }
        Ok(r)
    }

    pub fn lang(&self) -> Language {
        self.lang
    }

    pub fn k(&self) -> BeliefSet {
        self.k
    }

    /// `φ ≼ ψ`
    pub fn holds(&self, a: &SentenceClass, b: &SentenceClass) -> bool {
        self.m.get(a.bits() as usize, b.bits() as usize)
    }

    pub fn set(&mut self, a: SentenceClass, b: SentenceClass, value: bool) {
        self.m.set(a.bits() as usize, b.bits() as usize, value);
    }

    /// Pairs in the relation, in canonical class order.
    pub fn pairs(&self) -> Vec<(SentenceClass, SentenceClass)> {
        let classes = self.lang.classes();
        let mut out = Vec::new();
        for &a in &classes {
            for &b in &classes {
                if self.holds(&a, &b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub(crate) fn matrix(&self) -> &BitMatrix {
        &self.m
    }
}

#[derive(Debug, Clone)]
enum Backing {
    Table {
        universe: Arc<Universe>,
        m: BitMatrix,
    },
    Lifted(BelievabilityRelation),
    Derived {
        op: ChoiceOperator,
        success: Vec<bool>,
        outcome_id: Vec<usize>,
        reach: BitMatrix,
    },
}

/// `A ≼c B`, backed by an explicit table, a lifted sentence relation, or
/// an operator.
#[derive(Debug, Clone)]
pub struct MultiBelievabilityRelation {
    lang: Language,
    k: BeliefSet,
    backing: Backing,
}

impl MultiBelievabilityRelation {
    /// Explicit relation over a universe, total on it.
    pub fn from_table(universe: Arc<Universe>, k: BeliefSet, m: BitMatrix) -> Result<Self> {
        if m.len() != universe.len() {
            return Err(Error::InvalidOperator(format!(
                "relation table has {} rows, universe has {}",
                m.len(),
                universe.len()
            )));
        }
        Ok(MultiBelievabilityRelation {
            lang: universe.lang(),
            k,
            backing: Backing::Table { universe, m },
        })
    }

    pub fn table_from_fn(
        universe: Arc<Universe>,
        k: BeliefSet,
        f: impl Fn(&InputSet, &InputSet) -> bool,
    ) -> Result<Self> {
        let n = universe.len();
        let mut m = BitMatrix::new(n);
        for a in 0..n {
            for b in 0..n {
                if f(universe.get(a), universe.get(b)) {
                    m.set(a, b, true);
                }
            }
        }
        MultiBelievabilityRelation::from_table(universe, k, m)
    }

    pub fn lang(&self) -> Language {
        self.lang
    }

    pub fn k(&self) -> BeliefSet {
        self.k
    }

    pub fn kind(&self) -> &'static str {
        match self.backing {
            Backing::Table { .. } => "table",
            Backing::Lifted(_) => "lifted",
            Backing::Derived { .. } => "derived",
        }
    }

    /// The universe a table or operator backing is defined on.
    pub fn domain(&self) -> Option<&Arc<Universe>> {
        match &self.backing {
            Backing::Table { universe, .. } => Some(universe),
            Backing::Lifted(_) => None,
            Backing::Derived { op, .. } => Some(op.universe()),
        }
    }

    /// `A ≼c B`, or `None` when a bounded backing cannot answer.
    pub fn query(&self, a: &InputSet, b: &InputSet) -> Option<bool> {
        match &self.backing {
            Backing::Table { universe, m } => {
                Some(m.get(universe.index_of(a)?, universe.index_of(b)?))
            }
            Backing::Lifted(base) => {
                Some(b.is_empty() || a.iter().any(|phi| b.iter().all(|psi| base.holds(phi, psi))))
            }
            Backing::Derived { op, .. } => {
                let u = op.universe();
                Some(self.derived_idx(u.index_of(a)?, u.index_of(b)?))
            }
        }
    }

    fn derived_idx(&self, i: usize, j: usize) -> bool {
        match &self.backing {
            Backing::Derived {
                success,
                outcome_id,
                reach,
                ..
            } => !success[j] || (success[i] && reach.get(outcome_id[i], outcome_id[j])),
            _ => unreachable!("derived backing"),
        }
    }

    pub(crate) fn query_idx(&self, u: &Universe, a: usize, b: usize) -> Option<bool> {
        match &self.backing {
            Backing::Table { universe, m } if universe.spec() == u.spec() => Some(m.get(a, b)),
            Backing::Derived { op, .. } if op.universe().spec() == u.spec() => {
                Some(self.derived_idx(a, b))
            }
            _ => self.query(u.get(a), u.get(b)),
        }
    }

    /// The relation as a matrix over `u`.
    pub fn materialize(&self, u: &Arc<Universe>) -> Result<BitMatrix> {
        if let Backing::Table { universe, m } = &self.backing {
            if universe.spec() == u.spec() {
                return Ok(m.clone());
            }
        }
        let n = u.len();
        let mut m = BitMatrix::new(n);
        for a in 0..n {
            for b in 0..n {
                if self.query_idx(u, a, b).ok_or(Error::OutsideDomain)? {
                    m.set(a, b, true);
                }
            }
        }
        Ok(m)
    }

    /// A table-backed copy over `u`.
    pub fn to_table(&self, u: &Arc<Universe>) -> Result<MultiBelievabilityRelation> {
        MultiBelievabilityRelation::from_table(u.clone(), self.k, self.materialize(u)?)
    }

    /// `A ≃c B`
    pub fn equivalent(&self, a: &InputSet, b: &InputSet) -> Option<bool> {
        Some(self.query(a, b)? && self.query(b, a)?)
    }

    /// `A ≺c B`
    pub fn strictly(&self, a: &InputSet, b: &InputSet) -> Option<bool> {
        Some(self.query(a, b)? && !self.query(b, a)?)
    }
}

/// `A ≼c B` iff `B = ∅` or some `φ ∈ A` has `φ ≼ ψ` for every `ψ ∈ B`.
pub fn lift(base: &BelievabilityRelation) -> MultiBelievabilityRelation {
    MultiBelievabilityRelation {
        lang: base.lang,
        k: base.k,
        backing: Backing::Lifted(base.clone()),
    }
}

/// `φ ≼ ψ` iff `{φ} ≼c {ψ}`.
pub fn project(mb: &MultiBelievabilityRelation) -> Result<BelievabilityRelation> {
    if let Backing::Lifted(base) = &mb.backing {
        return Ok(base.clone());
    }
    let mut r = BelievabilityRelation::empty(mb.lang, mb.k)?;
    let classes = mb.lang.classes();
    let singles: Vec<InputSet> = classes.iter().map(|c| InputSet::singleton(*c)).collect();
    for (i, &a) in classes.iter().enumerate() {
        for (j, &b) in classes.iter().enumerate() {
            if mb
                .query(&singles[i], &singles[j])
                .ok_or(Error::OutsideDomain)?
            {
                r.set(a, b, true);
            }
        }
    }
    Ok(r)
}

/// `A ≼p B`, reduced to `&A ≼ &B` with `&∅ = ⊤`.
pub fn package_relation(base: &BelievabilityRelation, a: &InputSet, b: &InputSet) -> bool {
    let lang = base.lang();
    base.holds(
        &crate::logic::conj_all(&lang, a),
        &crate::logic::conj_all(&lang, b),
    )
}

/// The canonically smallest `φ ∈ A` with `{φ} ≃c A`.
pub fn representation_element(
    mb: &MultiBelievabilityRelation,
    a: &InputSet,
) -> Result<SentenceClass> {
    if a.is_empty() {
        return Err(Error::EmptyInput("representation element of an empty set"));
    }
    a.iter()
        .copied()
        .find(|phi| mb.equivalent(&InputSet::singleton(*phi), a) == Some(true))
        .ok_or(Error::NoRepresentationElement)
}

/// `K ∗c A` determined by `mb`: the classes `φ` with `A ≃c A ⩕ {φ}` when
/// `A ≺c ∅`, and `K` otherwise.
pub fn revise_via_mb(
    mb: &MultiBelievabilityRelation,
    k: BeliefSet,
    a: &InputSet,
) -> Result<BeliefSet> {
    let empty = InputSet::empty();
    if !mb.strictly(a, &empty).ok_or(Error::OutsideDomain)? {
        return Ok(k);
    }
    let lang = mb.lang();
    let mut count: u64 = 0;
    let mut bits = lang.full_bits();
    for phi in lang.classes() {
        let conj = a.pairwise_conj(&InputSet::singleton(phi));
        if mb.equivalent(a, &conj).ok_or(Error::OutsideDomain)? {
            count += 1;
            bits &= phi.bits();
        }
    }
    // a closed theory with model set X holds exactly 2^(#valuations - |X|) classes
    let free = lang.valuation_count() as u32 - bits.count_ones();
    if count == 0 || count != 1u64 << free {
        return Err(Error::ResultNotClosed);
    }
    Ok(lang.belief_from_bits(bits))
}

/// The operator `revise_via_mb` determines on a universe.
pub fn operator_via_mb(
    mb: &MultiBelievabilityRelation,
    k: BeliefSet,
    u: &Arc<Universe>,
) -> Result<ChoiceOperator> {
    let table = u
        .sets()
        .iter()
        .map(|a| revise_via_mb(mb, k, a))
        .collect::<Result<Vec<_>>>()?;
    ChoiceOperator::new(u.clone(), k, table)
}

/// `A ≼c B` iff `B` is not hit by its own outcome, or `A` is and a chain of
/// hits leads from the outcome of `A` to the outcome of `B`.
pub fn derive_mb_from_operator(op: &ChoiceOperator) -> MultiBelievabilityRelation {
    let n = op.universe().len();
    let hits = op.hits();
    let outcomes = op.outcomes();
    let outcome_id: Vec<usize> = op
        .table()
        .iter()
        .map(|x| outcomes.binary_search(x).expect("outcome listed"))
        .collect();
    let success: Vec<bool> = (0..n).map(|a| hits.get(a, a)).collect();
    let mut quotient = BitMatrix::new(outcomes.len());
    for c in 0..n {
        for b in hits.successors(c) {
            quotient.set(outcome_id[c], outcome_id[b], true);
        }
    }
    MultiBelievabilityRelation {
        lang: op.lang(),
        k: op.k(),
        backing: Backing::Derived {
            op: op.clone(),
            success,
            outcome_id,
            reach: quotient.reflexive_transitive_closure(),
        },
    }
}
