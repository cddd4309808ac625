//! Choice-revision operators as total tables over a bounded universe of
//! input sets, plus the postulate checker.

mod postulates;
mod probe;

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::BitMatrix;
use crate::logic::{BeliefSet, InputSet, Language, SentenceClass};

pub use postulates::{
    check_all, check_equivalences, check_postulate, passes_all, recheck_witness, PostulateId,
};
pub use probe::{classes_of, syntax_probe, ProbeDifference, SyntaxProbeReport};

/// Largest universe the checker will enumerate.
pub const MAX_UNIVERSE_SETS: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UniverseSpec {
    pub lang: Language,
    pub max_input_size: usize,
}

impl UniverseSpec {
    pub fn new(lang: Language, max_input_size: usize) -> Self {
        UniverseSpec {
            lang,
            max_input_size,
        }
    }

    pub fn bounds(&self) -> Bounds {
        Bounds {
            atoms: self.lang.atoms(),
            max_input_size: self.max_input_size,
        }
    }

    /// `Σ_{k ≤ max} C(#classes, k)`
    pub fn size(&self) -> Option<usize> {
        let n = self.lang.class_count() as u128;
        let mut total: u128 = 0;
        let mut binom: u128 = 1;
        for k in 0..=self.max_input_size.min(n as usize) as u128 {
            if k > 0 {
                binom = binom * (n - k + 1) / k;
            }
            total += binom;
            if total > usize::MAX as u128 {
                return None;
            }
        }
        Some(total as usize)
    }
}

/// Universe bounds, reported alongside every bounded claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub atoms: u8,
    pub max_input_size: usize,
}

/// All input sets of size at most `max_input_size`, in a fixed order:
/// by size, then lexicographically over the canonical class order.
#[derive(Debug)]
pub struct Universe {
    spec: UniverseSpec,
    sets: Vec<InputSet>,
    index: HashMap<InputSet, usize>,
}

impl Universe {
    pub fn enumerate(spec: UniverseSpec) -> Result<Arc<Universe>> {
        let size = spec.size().unwrap_or(usize::MAX);
        if size > MAX_UNIVERSE_SETS {
            return Err(Error::CapExceeded(format!(
                "universe of {size} input sets exceeds the cap of {MAX_UNIVERSE_SETS}"
            )));
        }
        let classes = spec.lang.classes();
        let mut sets = Vec::with_capacity(size);
        for k in 0..=spec.max_input_size.min(classes.len()) {
            combinations(&classes, k, &mut Vec::new(), 0, &mut sets);
        }
        let index = sets
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        Ok(Arc::new(Universe { spec, sets, index }))
    }

    pub fn spec(&self) -> UniverseSpec {
        self.spec
    }

    pub fn lang(&self) -> Language {
        self.spec.lang
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[InputSet] {
        &self.sets
    }

    pub fn get(&self, i: usize) -> &InputSet {
        &self.sets[i]
    }

    pub fn index_of(&self, a: &InputSet) -> Option<usize> {
        self.index.get(a).copied()
    }

    /// Every union of two members is again a member.
    pub fn is_union_closed(&self) -> bool {
        self.spec.max_input_size >= self.spec.lang.class_count()
    }

    pub fn singleton(&self, c: SentenceClass) -> Option<usize> {
        self.index_of(&InputSet::singleton(c))
    }
}

fn combinations(
    classes: &[SentenceClass],
    k: usize,
    prefix: &mut Vec<SentenceClass>,
    start: usize,
    out: &mut Vec<InputSet>,
) {
    if prefix.len() == k {
        out.push(prefix.iter().copied().collect());
        return;
    }
    for i in start..classes.len() {
        prefix.push(classes[i]);
        combinations(classes, k, prefix, i + 1, out);
        prefix.pop();
    }
}

/// The enumerated universe as a list.
pub fn enumerate_universe(spec: UniverseSpec) -> Result<Vec<InputSet>> {
    Ok(Universe::enumerate(spec)?.sets().to_vec())
}

/// A choice revision `K ∗c ·`, total on its universe.
#[derive(Debug, Clone)]
pub struct ChoiceOperator {
    universe: Arc<Universe>,
    k: BeliefSet,
    table: Vec<BeliefSet>,
    hits: OnceLock<BitMatrix>,
}

impl ChoiceOperator {
    pub fn new(universe: Arc<Universe>, k: BeliefSet, table: Vec<BeliefSet>) -> Result<Self> {
        if !k.is_consistent() {
            return Err(Error::InvalidOperator("K must be consistent".into()));
        }
        if table.len() != universe.len() {
            return Err(Error::InvalidOperator(format!(
                "table has {} entries, universe has {}",
                table.len(),
                universe.len()
            )));
        }
        Ok(ChoiceOperator {
            universe,
            k,
            table,
            hits: OnceLock::new(),
        })
    }

    pub fn from_fn(
        universe: Arc<Universe>,
        k: BeliefSet,
        f: impl Fn(&InputSet) -> BeliefSet,
    ) -> Result<Self> {
        let table = universe.sets().iter().map(f).collect();
        ChoiceOperator::new(universe, k, table)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn lang(&self) -> Language {
        self.universe.lang()
    }

    pub fn k(&self) -> BeliefSet {
        self.k
    }

    pub fn table(&self) -> &[BeliefSet] {
        &self.table
    }

    pub fn outcome(&self, i: usize) -> BeliefSet {
        self.table[i]
    }

    /// `K ∗c A`, if `A` lies in the universe.
    pub fn revise(&self, a: &InputSet) -> Option<BeliefSet> {
        self.universe.index_of(a).map(|i| self.table[i])
    }

    /// `hits[a][b]` iff `A_a ∩ (K ∗c A_b) ≠ ∅`.
    pub fn hits(&self) -> &BitMatrix {
        self.hits.get_or_init(|| {
            let n = self.universe.len();
            let mut m = BitMatrix::new(n);
            for b in 0..n {
                let x = self.table[b];
                for a in 0..n {
                    if x.meets(self.universe.get(a)) {
                        m.set(a, b, true);
                    }
                }
            }
            m
        })
    }

    /// Distinct outcomes, in canonical order.
    pub fn outcomes(&self) -> Vec<BeliefSet> {
        let mut v = self.table.clone();
        v.sort();
        v.dedup();
        v
    }
}

impl PartialEq for ChoiceOperator {
    fn eq(&self, other: &Self) -> bool {
        self.universe.spec() == other.universe.spec()
            && self.k == other.k
            && self.table == other.table
    }
}

/// Operator with every table entry drawn uniformly from all belief sets
/// and `K` drawn uniformly from the consistent ones.
pub fn random_operator(seed: u64, universe: &Arc<Universe>) -> ChoiceOperator {
    let lang = universe.lang();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all = lang.belief_sets();
    let consistent: Vec<BeliefSet> = all.iter().copied().filter(|b| b.is_consistent()).collect();
    let k = consistent[rng.gen_range(0..consistent.len())];
    let table = (0..universe.len())
        .map(|_| all[rng.gen_range(0..all.len())])
        .collect();
    ChoiceOperator::new(universe.clone(), k, table).expect("table matches universe")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(atoms: u8, max: usize) -> UniverseSpec {
        UniverseSpec::new(Language::new(atoms).unwrap(), max)
    }

    #[test]
    fn universe_sizes() {
        assert_eq!(enumerate_universe(spec(1, 4)).unwrap().len(), 16);
        assert_eq!(enumerate_universe(spec(2, 2)).unwrap().len(), 137);
        assert_eq!(
            enumerate_universe(spec(2, 0)).unwrap(),
            vec![InputSet::empty()]
        );
        assert_eq!(spec(2, 3).size(), Some(1 + 16 + 120 + 560));
        assert!(Universe::enumerate(spec(3, 2)).is_err());
        assert!(Universe::enumerate(spec(4, 2)).is_err());
    }

    #[test]
    fn universe_is_deterministic_and_indexed() {
        let u = Universe::enumerate(spec(2, 2)).unwrap();
        let again = enumerate_universe(spec(2, 2)).unwrap();
        assert_eq!(u.sets(), &again[..]);
        for (i, s) in u.sets().iter().enumerate() {
            assert_eq!(u.index_of(s), Some(i));
            assert!(s.len() <= 2);
        }
        assert!(u.get(0).is_empty());
    }

    #[test]
    fn random_operator_is_seeded() {
        let u = Universe::enumerate(spec(1, 4)).unwrap();
        assert_eq!(random_operator(7, &u), random_operator(7, &u));
        assert_ne!(random_operator(7, &u), random_operator(8, &u));
    }

    #[test]
    fn operator_construction_errors() {
        let u = Universe::enumerate(spec(1, 4)).unwrap();
        let l = u.lang();
        assert!(
            ChoiceOperator::new(u.clone(), l.inconsistent(), vec![l.tautologies(); 16]).is_err()
        );
        assert!(ChoiceOperator::new(u.clone(), l.tautologies(), vec![l.tautologies(); 3]).is_err());
    }
}
