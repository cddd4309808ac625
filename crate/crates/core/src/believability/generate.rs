use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{derive_mb_from_operator, is_quasi_linear, is_standard};
use super::{BelievabilityRelation, MultiBelievabilityRelation};
use crate::error::{Error, Result};
use crate::logic::Language;
use crate::model::{generate_model, induced_operator, ModelFlags, RelationalModel};
use crate::operator::Universe;

fn chain(seed: u64, lang: &Language) -> Result<RelationalModel> {
    let complete = lang.valuation_count();
    let total = lang.belief_sets().len();
    let min = complete + 1;
    let max = total.min(min + 3 * complete);
    let size = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9).gen_range(min..=max);
    generate_model(seed, lang, size, ModelFlags::new(true, true))
}

/// Quasi-linear relation ranking each sentence by the first belief set of a
/// random chain that contains it. The chain starts at `K`, ends at
/// `Cn({⊥})`, and places every complete theory before `Cn({⊥})`.
pub fn random_quasi_linear(seed: u64, lang: &Language) -> Result<BelievabilityRelation> {
    let m = chain(seed, lang)?;
    let rank = |c: &crate::logic::SentenceClass| {
        m.outcomes
            .iter()
            .position(|x| x.entails(c))
            .expect("Cn({⊥}) entails everything")
    };
    let r = BelievabilityRelation::from_fn(*lang, m.k, |a, b| rank(&a) <= rank(&b))?;
    if !is_quasi_linear(&r) {
        return Err(Error::Infeasible(
            "generated relation is not quasi-linear".into(),
        ));
    }
    Ok(r)
}

/// Standard relation derived from the operator of a random model with
/// `Cn({⊥})` among its outcomes, stored as a table over `u`.
pub fn random_standard(seed: u64, u: &Arc<Universe>) -> Result<MultiBelievabilityRelation> {
    let m = chain(seed, &u.lang())?;
    let op = induced_operator(&m, u)?;
    let mb = derive_mb_from_operator(&op).to_table(u)?;
    if !is_standard(&mb, u)? {
        return Err(Error::Infeasible(
            "generated relation is not standard".into(),
        ));
    }
    Ok(mb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::UniverseSpec;

    #[test]
    fn generators_are_deterministic() {
        let l = Language::new(2).unwrap();
        assert_eq!(
            random_quasi_linear(9, &l).unwrap(),
            random_quasi_linear(9, &l).unwrap()
        );
        let u = Universe::enumerate(UniverseSpec::new(l, 2)).unwrap();
        let a = random_standard(9, &u).unwrap().materialize(&u).unwrap();
        let b = random_standard(9, &u).unwrap().materialize(&u).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generators_cover_small_languages() {
        for n in 1..=3 {
            let l = Language::new(n).unwrap();
            for seed in 0..5 {
                assert!(random_quasi_linear(seed, &l).is_ok());
            }
        }
        let u = Universe::enumerate(UniverseSpec::new(Language::new(1).unwrap(), 4)).unwrap();
        for seed in 0..20 {
            assert!(random_standard(seed, &u).is_ok());
        }
    }
}
