//! Finite propositional language: formulas, valuations, sentence classes,
//! belief sets and finite input sets.
//!
//! Sentences are handled semantically. A [`SentenceClass`] is the set of
//! valuations satisfying a formula, so two formulas share a class exactly
//! when they are logically equivalent. A [`BeliefSet`] is a closed theory,
//! stored as the set of valuations satisfying all of its members.

mod formula;
mod semantics;

pub use formula::{class_of, parse_formula, parse_formula_list, Formula};
pub(crate) use formula::{syntax, tokenize, Parser, Token};
pub use semantics::{
    conj_all, entails, pairwise_conj, set_equiv, BeliefSet, InputSet, Language, SentenceClass,
    Valuation, MAX_ATOMS,
};

use crate::error::Result;

/// Parse a comma-separated list of formulas into an input set.
pub fn parse_input_set(text: &str, lang: &Language) -> Result<InputSet> {
    Ok(parse_formula_list(text, lang)?
        .iter()
        .map(|f| class_of(f, lang))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lang() -> Language {
        Language::new(3).unwrap()
    }

    fn truth_table(f: &Formula, lang: &Language) -> Vec<bool> {
        lang.valuations().map(|v| f.eval(&v)).collect()
    }

    proptest! {
        #[test]
        fn class_of_factors_through_equivalence(seed in any::<u64>()) {
            let l = lang();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = Formula::random(&mut rng, &l, 4);
            let g = Formula::random(&mut rng, &l, 4);
            let same_table = truth_table(&f, &l) == truth_table(&g, &l);
            prop_assert_eq!(same_table, class_of(&f, &l) == class_of(&g, &l));
            // a syntactically different equivalent
            let h = Formula::not(Formula::not(Formula::and(f.clone(), Formula::Top)));
            prop_assert_eq!(class_of(&f, &l), class_of(&h, &l));
        }

        #[test]
        fn printer_round_trip(seed in any::<u64>()) {
            let l = lang();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = Formula::random(&mut rng, &l, 5);
            prop_assert_eq!(parse_formula(&f.to_string(), &l).unwrap(), f);
        }

        #[test]
        fn deduction_property(seed in any::<u64>()) {
            // φ ∈ Cn(A ∪ {ψ}) iff ψ → φ ∈ Cn(A)
            let l = lang();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = class_of(&Formula::random(&mut rng, &l, 3), &l);
            let psi = Formula::random(&mut rng, &l, 3);
            let phi = Formula::random(&mut rng, &l, 3);
            let lhs = BeliefSet::cn(a.and(&class_of(&psi, &l))).entails(&class_of(&phi, &l));
            let rhs = BeliefSet::cn(a).entails(&class_of(&Formula::implies(psi, phi), &l));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn supraclassicality(seed in any::<u64>()) {
            // classically valid consequences of a set belong to its closure
            let l = lang();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = Formula::random(&mut rng, &l, 3);
            let g = Formula::random(&mut rng, &l, 3);
            let x = BeliefSet::cn_of(&l, &[class_of(&f, &l), class_of(&g, &l)]);
            prop_assert!(x.entails(&class_of(&Formula::and(f.clone(), g.clone()), &l)));
            prop_assert!(x.entails(&class_of(&Formula::or(f, Formula::Bottom), &l)));
        }
    }

    #[test]
    fn entails_agrees_with_brute_force() {
        // X ⊢ c iff c is among the classes containing every model of X
        let l = Language::new(2).unwrap();
        for x in l.belief_sets() {
            let members: Vec<SentenceClass> = l
                .classes()
                .into_iter()
                .filter(|c| x.models().all(|v| c.models().any(|w| w == v)))
                .collect();
            for c in l.classes() {
                assert_eq!(entails(&x, &c), members.contains(&c));
            }
        }
    }

    #[test]
    fn conj_all_is_a_fold() {
        let l = Language::new(2).unwrap();
        let classes = l.classes();
        for a in &classes {
            for b in &classes {
                let set: InputSet = [*a, *b].into_iter().collect();
                assert_eq!(conj_all(&l, &set), a.and(b));
            }
        }
    }

    #[test]
    fn input_set_parsing() {
        let l = Language::new(2).unwrap();
        let a = parse_input_set("p0 & p1, p1 & p0", &l).unwrap();
        assert_eq!(a.len(), 1);
        assert!(parse_input_set("", &l).unwrap().is_empty());
    }
}
