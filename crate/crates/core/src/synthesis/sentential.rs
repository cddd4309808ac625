//! Revision by single sentences, and an operator that satisfies the basic
//! sentential postulates while failing strong reciprocity.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{cycle_through, strongly_connected_components, BitMatrix};
use crate::logic::{BeliefSet, InputSet, Language, SentenceClass};
use crate::report::{PostulateReport, Tally, Witness};

/// Largest language a sentential table is built for.
const MAX_SENTENTIAL_ATOMS: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SententialPostulateId {
    Closure,
    RelativeSuccess,
    Confirmation,
    Regularity,
    Reciprocity,
    Extensionality,
    StrongReciprocity,
}

impl SententialPostulateId {
    pub const ALL: [SententialPostulateId; 7] = [
        SententialPostulateId::Closure,
        SententialPostulateId::RelativeSuccess,
        SententialPostulateId::Confirmation,
        SententialPostulateId::Regularity,
        SententialPostulateId::Reciprocity,
        SententialPostulateId::Extensionality,
        SententialPostulateId::StrongReciprocity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SententialPostulateId::Closure => "closure",
            SententialPostulateId::RelativeSuccess => "relative_success",
            SententialPostulateId::Confirmation => "confirmation",
            SententialPostulateId::Regularity => "regularity",
            SententialPostulateId::Reciprocity => "reciprocity",
            SententialPostulateId::Extensionality => "extensionality",
            SententialPostulateId::StrongReciprocity => "strong_reciprocity",
        }
    }

    /// `(∗1)` to `(∗5)`.
    pub fn is_basic(&self) -> bool {
        !matches!(
            self,
            SententialPostulateId::Extensionality | SententialPostulateId::StrongReciprocity
        )
    }
}

impl fmt::Display for SententialPostulateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `K ∗ φ` for every sentence class `φ`, indexed by the class's model bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SententialOperator {
    lang: Language,
    k: BeliefSet,
    table: Vec<BeliefSet>,
}

impl SententialOperator {
    pub fn from_fn(
        lang: Language,
        k: BeliefSet,
        f: impl Fn(SentenceClass) -> BeliefSet,
    ) -> Result<Self> {
        if lang.atoms() > MAX_SENTENTIAL_ATOMS {
            return Err(Error::CapExceeded(format!(
                "sentential operators are limited to {MAX_SENTENTIAL_ATOMS} atoms"
            )));
        }
        let table = (0..lang.class_count())
            .map(|b| f(lang.class_from_bits(b as u16)))
            .collect();
        Ok(SententialOperator { lang, k, table })
    }

    pub fn lang(&self) -> Language {
        self.lang
    }

    pub fn k(&self) -> BeliefSet {
        self.k
    }

    pub fn revise(&self, phi: &SentenceClass) -> BeliefSet {
        self.table[phi.bits() as usize]
    }
}

fn single(phi: SentenceClass) -> InputSet {
    InputSet::singleton(phi)
}

/// Evaluate one postulate over every class (or pair of classes).
pub fn check_sentential_postulate(
    op: &SententialOperator,
    p: SententialPostulateId,
) -> PostulateReport<SententialPostulateId> {
    let classes = op.lang.classes();
    let k = op.k;
    let mut t = Tally::default();
    match p {
        // outcomes are stored as model sets, which are closed by construction;
        // extensionality holds because the table is keyed by class
        SententialPostulateId::Closure | SententialPostulateId::Extensionality => {
            for _ in &classes {
                t.check(true, || unreachable!());
            }
        }
        SententialPostulateId::RelativeSuccess => {
            for &phi in &classes {
                let x = op.revise(&phi);
                let ok = x == k || x.entails(&phi);
                if !t.check(ok, || Witness::new(vec![single(phi)], vec![x])) {
                    break;
                }
            }
        }
        SententialPostulateId::Confirmation => {
            for &phi in &classes {
                let x = op.revise(&phi);
                let ok = !k.entails(&phi) || x == k;
                if !t.check(ok, || Witness::new(vec![single(phi)], vec![x])) {
                    break;
                }
            }
        }
        SententialPostulateId::Regularity => {
            'outer: for &phi in &classes {
                let x = op.revise(&phi);
                for &psi in classes.iter().filter(|psi| x.entails(psi)) {
                    let y = op.revise(&psi);
                    if !t.check(y.entails(&psi), || {
                        Witness::new(vec![single(phi), single(psi)], vec![x, y])
                    }) {
                        break 'outer;
                    }
                }
            }
        }
        SententialPostulateId::Reciprocity => {
            'outer: for (i, &phi) in classes.iter().enumerate() {
                let x = op.revise(&phi);
                for &psi in &classes[i + 1..] {
                    let y = op.revise(&psi);
                    if x.entails(&psi) && y.entails(&phi) {
                        if !t.check(x == y, || {
                            Witness::new(vec![single(phi), single(psi)], vec![x, y])
                        }) {
                            break 'outer;
                        }
                    }
                }
            }
        }
        SententialPostulateId::StrongReciprocity => strong_reciprocity(op, &classes, &mut t),
    }
    t.finish(p)
}

/// Links `φ → ψ` when `φ ∈ K ∗ ψ`. A cycle is a strongly connected set of
/// classes, so the postulate fails exactly when some component holds two
/// classes with different outcomes; the witness is a cycle through them.
fn strong_reciprocity(op: &SententialOperator, classes: &[SentenceClass], t: &mut Tally) {
    let n = classes.len();
    let mut g = BitMatrix::new(n);
    for (j, psi) in classes.iter().enumerate() {
        let y = op.revise(psi);
        for (i, phi) in classes.iter().enumerate() {
            if y.entails(phi) {
                g.set(i, j, true);
            }
        }
    }
    let comp = strongly_connected_components(&g);
    let mut first: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let leader = *first[comp[i]].get_or_insert(i);
        let same = op.revise(&classes[leader]) == op.revise(&classes[i]);
        let cycle = || {
            let path = cycle_through(&g, &comp, leader, i).expect("same component");
            Witness::new(
                path.iter().map(|&c| single(classes[c])).collect(),
                path.iter().map(|&c| op.revise(&classes[c])).collect(),
            )
        };
        if !t.check(same, cycle) {
            return;
        }
    }
}

pub fn check_sentential_postulates(
    op: &SententialOperator,
) -> Vec<PostulateReport<SententialPostulateId>> {
    SententialPostulateId::ALL
        .iter()
        .map(|&p| check_sentential_postulate(op, p))
        .collect()
}

/// `K = Cn({⊤})`, and `K ∗ φ` is `Cn({p0 ∧ p1})` when `p0 ∧ p1 ⊢ φ ⊢ p0`,
/// `Cn({p1 ∧ p2})` when `p1 ∧ p2 ⊢ φ ⊢ p1`, `Cn({p0 ∧ p2})` when
/// `p0 ∧ p2 ⊢ φ ⊢ p2`, taking the first that applies, and `Cn({φ})`
/// otherwise.
pub fn footnote7_operator(lang: &Language) -> Result<SententialOperator> {
    if lang.atoms() < 3 {
        return Err(Error::Infeasible(
            "the construction needs at least 3 atoms".into(),
        ));
    }
    let p = |i| lang.atom(i).expect("atom in range");
    let clauses = [
        (p(0).and(&p(1)), p(0)),
        (p(1).and(&p(2)), p(1)),
        (p(0).and(&p(2)), p(2)),
    ];
    SententialOperator::from_fn(*lang, lang.tautologies(), |phi| {
        clauses
            .iter()
            .find(|(low, high)| low.entails(&phi) && phi.entails(high))
            .map_or(BeliefSet::cn(phi), |(low, _)| BeliefSet::cn(*low))
    })
}
