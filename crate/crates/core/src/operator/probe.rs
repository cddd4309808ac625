//! Sampling probe for operators that see formulas rather than classes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::logic::{class_of, BeliefSet, Formula, InputSet, Language};

#[derive(Debug, Clone, Serialize)]
pub struct SyntaxProbeReport {
    pub samples: usize,
    pub differences: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_difference: Option<ProbeDifference>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeDifference {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub left_outcome: BeliefSet,
    pub right_outcome: BeliefSet,
}

impl SyntaxProbeReport {
    pub fn passed(&self) -> bool {
        self.differences == 0
    }
}

fn rewrite<R: Rng>(f: &Formula, rng: &mut R) -> Formula {
    match (f, rng.gen_range(0..4)) {
        (Formula::And(a, b), 0) => Formula::and((**b).clone(), (**a).clone()),
        (Formula::Or(a, b), 0) => Formula::or((**b).clone(), (**a).clone()),
        (Formula::Not(a), 1) => Formula::not(rewrite(a, rng)),
        (_, 2) => Formula::and(f.clone(), Formula::Top),
        _ => Formula::not(Formula::not(f.clone())),
    }
}

/// A list of formulas that differs from `fs` as syntax but denotes the same
/// set of classes.
fn variant<R: Rng>(fs: &[Formula], rng: &mut R) -> Vec<Formula> {
    let mut out = fs.to_vec();
    loop {
        match rng.gen_range(0..3) {
            0 => {
                let i = rng.gen_range(0..out.len());
                out[i] = rewrite(&out[i], rng);
            }
            1 => out.shuffle(rng),
            _ => {
                let i = rng.gen_range(0..out.len());
                let dup = rewrite(&out[i], rng);
                out.push(dup);
            }
        }
        if out != fs {
            return out;
        }
    }
}

/// Sample pairs of syntactically distinct, equivalent input lists and
/// report any pair the operator treats differently. Only lists with at
/// most `max_input_size` distinct classes are drawn.
pub fn syntax_probe(
    op: impl Fn(&[Formula]) -> BeliefSet,
    lang: &Language,
    max_input_size: usize,
    samples: usize,
    seed: u64,
) -> SyntaxProbeReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SyntaxProbeReport {
        samples,
        differences: 0,
        first_difference: None,
    };
    let max = max_input_size.max(1);
    for _ in 0..samples {
        let len = rng.gen_range(1..=max);
        let fs: Vec<Formula> = (0..len)
            .map(|_| Formula::random(&mut rng, lang, 3))
            .collect();
        let gs = variant(&fs, &mut rng);
        let (x, y) = (op(&fs), op(&gs));
        if x != y {
            report.differences += 1;
            report
                .first_difference
                .get_or_insert_with(|| ProbeDifference {
                    left: fs.iter().map(|f| f.to_string()).collect(),
                    right: gs.iter().map(|f| f.to_string()).collect(),
                    left_outcome: x,
                    right_outcome: y,
                });
        }
    }
    report
}

/// The class-level input set named by a list of formulas.
pub fn classes_of(fs: &[Formula], lang: &Language) -> InputSet {
    fs.iter().map(|f| class_of(f, lang)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;
    use crate::operator::{random_operator, Universe, UniverseSpec};

    #[test]
    fn variants_are_distinct_and_equivalent() {
        let lang = Language::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let fs: Vec<Formula> = (0..2)
                .map(|_| Formula::random(&mut rng, &lang, 3))
                .collect();
            let gs = variant(&fs, &mut rng);
            assert_ne!(fs, gs);
            assert_eq!(classes_of(&fs, &lang), classes_of(&gs, &lang));
        }
    }

    #[test]
    fn quotient_adapter_has_no_differences() {
        let u = Universe::enumerate(UniverseSpec::new(Language::new(2).unwrap(), 2)).unwrap();
        let op = random_operator(3, &u);
        let lang = u.lang();
        let adapter = |fs: &[Formula]| op.revise(&classes_of(fs, &lang)).unwrap();
        let r = syntax_probe(adapter, &lang, 2, 500, 9);
        assert!(r.passed());
    }

    #[test]
    fn text_keyed_adapter_is_caught() {
        let lang = Language::new(2).unwrap();
        let sets = lang.belief_sets();
        let keyed = |fs: &[Formula]| {
            let text: String = fs
                .iter()
                .map(|f| f.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let key = text
                .bytes()
                .fold(0usize, |acc, b| (acc * 31 + b as usize) % sets.len());
            sets[key]
        };
        let r = syntax_probe(keyed, &lang, 2, 200, 4);
        assert!(r.differences > 0);
        assert!(r.first_difference.is_some());

        let a = [parse_formula("p0 & p1", &lang).unwrap()];
        let b = [parse_formula("p1 & p0", &lang).unwrap()];
        assert_eq!(classes_of(&a, &lang), classes_of(&b, &lang));
        assert_ne!(keyed(&a), keyed(&b));
    }
}
