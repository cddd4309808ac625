use std::cmp::Ordering;
use std::fmt;

use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};

/// Hard cap on the number of propositional variables.
pub const MAX_ATOMS: u8 = 4;

/// A finite propositional language over the atoms `p0 .. p(n-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Language {
    atoms: u8,
}

impl Language {
    pub fn new(atoms: u8) -> Result<Self> {
        if atoms == 0 {
            return Err(Error::CapExceeded(
                "a language needs at least one atom".into(),
            ));
        }
        if atoms > MAX_ATOMS {
            return Err(Error::CapExceeded(format!(
                "{atoms} atoms requested, at most {MAX_ATOMS} supported"
            )));
        }
        Ok(Language { atoms })
    }

    pub fn atoms(&self) -> u8 {
        self.atoms
    }

    pub fn valuation_count(&self) -> usize {
        1 << self.atoms
    }

    pub fn class_count(&self) -> usize {
        1 << self.valuation_count()
    }

    pub(crate) fn full_bits(&self) -> u16 {
        ((1u32 << self.valuation_count()) - 1) as u16
    }

    /// Valuations in index order. Index `v` assigns `p_i` the bit
    /// `n - 1 - i` of `v`, so index order coincides with bitstring order.
    pub fn valuations(&self) -> impl Iterator<Item = Valuation> + '_ {
        (0..self.valuation_count() as u8).map(move |index| Valuation {
            atoms: self.atoms,
            index,
        })
    }

    /// Every sentence class of the language, in canonical order.
    pub fn classes(&self) -> Vec<SentenceClass> {
        let mut out: Vec<SentenceClass> = (0..self.class_count())
            .map(|bits| SentenceClass(Models::new(self.atoms, bits as u16)))
            .collect();
        out.sort();
        out
    }

    /// Every belief set of the language, in canonical order (`Cn({⊥})` first).
    pub fn belief_sets(&self) -> Vec<BeliefSet> {
        self.classes().into_iter().map(BeliefSet::cn).collect()
    }

    pub fn top(&self) -> SentenceClass {
        SentenceClass(Models::new(self.atoms, self.full_bits()))
    }

    pub fn bottom(&self) -> SentenceClass {
        SentenceClass(Models::new(self.atoms, 0))
    }

    /// The class of the atom `p_i`.
    pub fn atom(&self, i: u8) -> Result<SentenceClass> {
        if i >= self.atoms {
            return Err(Error::AtomOutOfRange {
                index: i as usize,
                atoms: self.atoms,
            });
        }
        let bits = self
            .valuations()
            .filter(|v| v.get(i))
            .fold(0u16, |acc, v| acc | v.bit());
        Ok(SentenceClass(Models::new(self.atoms, bits)))
    }

    pub fn class_from_bits(&self, bits: u16) -> SentenceClass {
        SentenceClass(Models::new(self.atoms, bits & self.full_bits()))
    }

    pub fn belief_from_bits(&self, bits: u16) -> BeliefSet {
        BeliefSet(Models::new(self.atoms, bits & self.full_bits()))
    }

    /// `Cn({⊤})`
    pub fn tautologies(&self) -> BeliefSet {
        BeliefSet::cn(self.top())
    }

    /// `Cn({⊥})`, the inconsistent belief set.
    pub fn inconsistent(&self) -> BeliefSet {
        BeliefSet::cn(self.bottom())
    }
}

/// One total truth assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation {
    atoms: u8,
    index: u8,
}

impl Valuation {
    pub fn index(&self) -> usize {
        self.index as usize
    }

    pub fn get(&self, atom: u8) -> bool {
        (self.index >> (self.atoms - 1 - atom)) & 1 == 1
    }

    pub(crate) fn bit(&self) -> u16 {
        1 << self.index
    }

    pub fn bitstring(&self) -> String {
        (0..self.atoms)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }

    pub fn parse(lang: &Language, text: &str) -> Result<Valuation> {
        if text.len() != lang.atoms as usize || !text.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::Format(format!(
                "bad valuation {text:?}: expected {} binary digits",
                lang.atoms
            )));
        }
        let index = u8::from_str_radix(text, 2).map_err(|e| Error::Format(e.to_string()))?;
        Ok(Valuation {
            atoms: lang.atoms,
            index,
        })
    }
}

/// A set of valuations, the shared representation of sentence classes
/// and belief sets.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Models {
    atoms: u8,
    bits: u16,
}

impl Models {
    pub(crate) fn new(atoms: u8, bits: u16) -> Self {
        Models { atoms, bits }
    }

    fn is_subset(&self, other: &Models) -> bool {
        self.bits & !other.bits == 0
    }

    fn valuations(&self) -> impl Iterator<Item = Valuation> + '_ {
        (0..(1u8 << self.atoms))
            .filter(move |i| self.bits >> i & 1 == 1)
            .map(move |index| Valuation {
                atoms: self.atoms,
                index,
            })
    }

    fn bitstrings(&self) -> Vec<String> {
        self.valuations().map(|v| v.bitstring()).collect()
    }
}

/// Lexicographic order on the sorted lists of valuation indices.
impl Ord for Models {
    fn cmp(&self, other: &Self) -> Ordering {
        self.atoms.cmp(&other.atoms).then_with(|| {
            let diff = self.bits ^ other.bits;
            if diff == 0 {
                return Ordering::Equal;
            }
            let low = diff.trailing_zeros();
            let above = if low >= 15 { 0 } else { !((2u16 << low) - 1) };
            // whichever list holds the first differing valuation is smaller,
            // unless the other list stops there (it is then a prefix)
            let (holder_is_self, other_bits) = if self.bits >> low & 1 == 1 {
                (true, other.bits)
            } else {
                (false, self.bits)
            };
            let other_continues = other_bits & above != 0;
            match (holder_is_self, other_continues) {
                (true, true) | (false, false) => Ordering::Less,
                (true, false) | (false, true) => Ordering::Greater,
            }
        })
    }
}

impl PartialOrd for Models {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A sentence up to logical equivalence: the set of its models.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SentenceClass(pub(crate) Models);

impl SentenceClass {
    pub fn atoms(&self) -> u8 {
        self.0.atoms
    }

    pub fn bits(&self) -> u16 {
        self.0.bits
    }

    pub fn is_bottom(&self) -> bool {
        self.0.bits == 0
    }

    pub fn is_top(&self) -> bool {
        self.0.bits == ((1u32 << (1u32 << self.0.atoms)) - 1) as u16
    }

    pub fn models(&self) -> impl Iterator<Item = Valuation> + '_ {
        self.0.valuations()
    }

    /// `self ⊢ other`
    pub fn entails(&self, other: &SentenceClass) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn and(&self, other: &SentenceClass) -> SentenceClass {
        SentenceClass(Models::new(self.0.atoms, self.0.bits & other.0.bits))
    }

    pub fn or(&self, other: &SentenceClass) -> SentenceClass {
        SentenceClass(Models::new(self.0.atoms, self.0.bits | other.0.bits))
    }

    pub fn not(&self) -> SentenceClass {
        let full = ((1u32 << (1u32 << self.0.atoms)) - 1) as u16;
        SentenceClass(Models::new(self.0.atoms, !self.0.bits & full))
    }

    /// Canonical JSON form: the sorted list of model bitstrings.
    pub fn bitstrings(&self) -> Vec<String> {
        self.0.bitstrings()
    }

    pub fn from_bitstrings<S: AsRef<str>>(lang: &Language, items: &[S]) -> Result<Self> {
        let mut bits = 0u16;
        for s in items {
            bits |= Valuation::parse(lang, s.as_ref())?.bit();
        }
        Ok(lang.class_from_bits(bits))
    }

    /// A canonical formula text for this class: a disjunction of maximal
    /// conjunctions of literals, chosen greedily to cover every model.
    pub fn to_formula_text(&self) -> String {
        if self.is_bottom() {
            return "F".into();
        }
        if self.is_top() {
            return "T".into();
        }
        let atoms = self.0.atoms;
        let bits = self.0.bits;
        // a cube fixes some atoms: (mask of fixed atoms, their values)
        let cube_bits = |mask: u8, vals: u8| -> u16 {
            (0..1u16 << atoms)
                .filter(|&v| (v as u8) & mask == vals)
                .fold(0, |acc, v| acc | 1 << v)
        };
        let mut cubes: Vec<(u8, u8, u16)> = Vec::new();
        for mask in 0..1u8 << atoms {
            for vals in 0..1u8 << atoms {
                if vals & !mask != 0 {
                    continue;
                }
                let c = cube_bits(mask, vals);
                if c & !bits == 0 {
                    cubes.push((mask, vals, c));
                }
            }
        }
        let maximal: Vec<(u8, u8, u16)> = cubes
            .iter()
            .copied()
            .filter(|&(_, _, c)| !cubes.iter().any(|&(_, _, d)| d != c && c & !d == 0))
            .collect();
        let mut uncovered = bits;
        let mut chosen = Vec::new();
        while uncovered != 0 {
            let best = maximal
                .iter()
                .copied()
                .max_by_key(|&(mask, _, c)| {
                    (
                        (c & uncovered).count_ones(),
                        std::cmp::Reverse(mask.count_ones()),
                    )
                })
                .expect("every model lies in some cube");
            uncovered &= !best.2;
            chosen.push(best);
        }
        let literal = |i: u8, vals: u8| {
            // valuation bit for atom i is bit (atoms - 1 - i)
            if vals >> (atoms - 1 - i) & 1 == 1 {
                format!("p{i}")
            } else {
                format!("~p{i}")
            }
        };
        let terms: Vec<String> = chosen
            .iter()
            .map(|&(mask, vals, _)| {
                (0..atoms)
                    .filter(|&i| mask >> (atoms - 1 - i) & 1 == 1)
                    .map(|i| literal(i, vals))
                    .collect::<Vec<_>>()
                    .join(" & ")
            })
            .collect();
        if terms.len() > 1 {
            terms
                .iter()
                .map(|t| {
                    if t.contains('&') {
                        format!("({t})")
                    } else {
                        t.clone()
                    }
                })
                .collect::<Vec<_>>()
                .join(" | ")
        } else {
            terms.join("")
        }
    }
}

impl fmt::Debug for SentenceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.bitstrings())
    }
}

/// A deductively closed theory, identified with its set of models.
/// The empty model set is `Cn({⊥})`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BeliefSet(pub(crate) Models);

impl BeliefSet {
    /// `Cn({φ})`
    pub fn cn(class: SentenceClass) -> BeliefSet {
        BeliefSet(class.0)
    }

    /// `Cn(A)` for a finite set of sentence classes.
    pub fn cn_of(lang: &Language, members: &[SentenceClass]) -> BeliefSet {
        BeliefSet::cn(conj_classes(lang, members.iter()))
    }

    pub fn atoms(&self) -> u8 {
        self.0.atoms
    }

    pub fn bits(&self) -> u16 {
        self.0.bits
    }

    pub fn is_consistent(&self) -> bool {
        self.0.bits != 0
    }

    /// `X ⊢ φ`, i.e. `φ` belongs to the theory.
    pub fn entails(&self, class: &SentenceClass) -> bool {
        self.0.is_subset(&class.0)
    }

    /// The strongest sentence of the theory.
    pub fn as_class(&self) -> SentenceClass {
        SentenceClass(self.0)
    }

    /// `A ∩ X ≠ ∅`
    pub fn meets(&self, input: &InputSet) -> bool {
        input.iter().any(|c| self.entails(c))
    }

    pub fn models(&self) -> impl Iterator<Item = Valuation> + '_ {
        self.0.valuations()
    }

    pub fn bitstrings(&self) -> Vec<String> {
        self.0.bitstrings()
    }

    pub fn from_bitstrings<S: AsRef<str>>(lang: &Language, items: &[S]) -> Result<Self> {
        SentenceClass::from_bitstrings(lang, items).map(BeliefSet::cn)
    }

    /// Every member class of the theory, in canonical order.
    pub fn members(&self, lang: &Language) -> Vec<SentenceClass> {
        lang.classes()
            .into_iter()
            .filter(|c| self.entails(c))
            .collect()
    }
}

impl fmt::Debug for BeliefSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cn{:?}", self.bitstrings())
    }
}

impl fmt::Display for BeliefSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cn({{{}}})", self.as_class().to_formula_text())
    }
}

/// A finite set of sentences with equivalent members collapsed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct InputSet(Vec<SentenceClass>);

impl InputSet {
    pub fn empty() -> Self {
        InputSet(Vec::new())
    }

    pub fn singleton(c: SentenceClass) -> Self {
        InputSet(vec![c])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SentenceClass> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[SentenceClass] {
        &self.0
    }

    pub fn contains(&self, c: &SentenceClass) -> bool {
        self.0.binary_search(c).is_ok()
    }

    pub fn is_subset(&self, other: &InputSet) -> bool {
        self.0.iter().all(|c| other.contains(c))
    }

    pub fn union(&self, other: &InputSet) -> InputSet {
        self.0.iter().chain(other.0.iter()).copied().collect()
    }

    /// `A ⩕ B`
    pub fn pairwise_conj(&self, other: &InputSet) -> InputSet {
        self.0
            .iter()
            .flat_map(|a| other.0.iter().map(move |b| a.and(b)))
            .collect()
    }

    /// True iff the set is exactly `{⊥}` up to equivalence.
    pub fn is_falsum(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_bottom()
    }
}

impl FromIterator<SentenceClass> for InputSet {
    fn from_iter<I: IntoIterator<Item = SentenceClass>>(iter: I) -> Self {
        let mut v: Vec<SentenceClass> = iter.into_iter().collect();
        v.sort();
        v.dedup();
        InputSet(v)
    }
}

impl<'a> IntoIterator for &'a InputSet {
    type Item = &'a SentenceClass;
    type IntoIter = std::slice::Iter<'a, SentenceClass>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for InputSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for SentenceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_formula_text())
    }
}

impl fmt::Display for InputSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(|c| c.to_formula_text()).collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

impl Serialize for SentenceClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.bitstrings().serialize(s)
    }
}

impl Serialize for BeliefSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.bitstrings().serialize(s)
    }
}

impl Serialize for InputSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for c in &self.0 {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

fn conj_classes<'a>(lang: &Language, it: impl Iterator<Item = &'a SentenceClass>) -> SentenceClass {
    it.fold(lang.top(), |acc, c| acc.and(c))
}

/// `X ⊢ φ`
pub fn entails(x: &BeliefSet, c: &SentenceClass) -> bool {
    x.entails(c)
}

/// `&A`, with `&∅ = ⊤`.
pub fn conj_all(lang: &Language, a: &InputSet) -> SentenceClass {
    conj_classes(lang, a.iter())
}

/// `A ⩕ B`
pub fn pairwise_conj(a: &InputSet, b: &InputSet) -> InputSet {
    a.pairwise_conj(b)
}

/// `A ≡ B`: every member of each side has an equivalent on the other.
pub fn set_equiv(a: &InputSet, b: &InputSet) -> bool {
    a == b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lang2() -> Language {
        Language::new(2).unwrap()
    }

    #[test]
    fn formula_text_parses_back() {
        for atoms in 1..=3 {
            let lang = Language::new(atoms).unwrap();
            for c in lang.classes() {
                let f = crate::logic::parse_formula(&c.to_formula_text(), &lang).unwrap();
                assert_eq!(
                    crate::logic::class_of(&f, &lang),
                    c,
                    "{}",
                    c.to_formula_text()
                );
            }
        }
        let l = Language::new(3).unwrap();
        let (p0, p1, p2) = (l.atom(0).unwrap(), l.atom(1).unwrap(), l.atom(2).unwrap());
        assert_eq!(p0.and(&p1).to_formula_text(), "p0 & p1");
        assert_eq!(p1.not().to_formula_text(), "~p1");
        assert_eq!(p0.or(&p2.not()).to_formula_text(), "p0 | ~p2");
    }

    #[test]
    fn language_caps() {
        assert!(Language::new(0).is_err());
        assert!(Language::new(5).is_err());
        let l = Language::new(4).unwrap();
        assert_eq!(l.valuation_count(), 16);
        assert_eq!(l.class_count(), 65536);
    }

    #[test]
    fn atom_models_follow_bitstring_convention() {
        let l = lang2();
        assert_eq!(l.atom(0).unwrap().bitstrings(), vec!["10", "11"]);
        assert_eq!(l.atom(1).unwrap().bitstrings(), vec!["01", "11"]);
        assert!(l.atom(2).is_err());
    }

    #[test]
    fn canonical_order_is_lexicographic_on_bitstring_lists() {
        let l = lang2();
        let classes = l.classes();
        let keys: Vec<Vec<String>> = classes.iter().map(|c| c.bitstrings()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(classes[0].is_bottom());
        let l3 = Language::new(3).unwrap();
        let keys: Vec<Vec<String>> = l3.classes().iter().map(|c| c.bitstrings()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn entailment_edge_cases() {
        let l = lang2();
        let p0 = l.atom(0).unwrap();
        let p1 = l.atom(1).unwrap();
        let k = BeliefSet::cn_of(&l, &[p0, p1]);
        assert!(entails(&k, &p0.and(&p1)));
        assert!(!entails(&l.tautologies(), &p0));
        for c in l.classes() {
            assert!(entails(&l.inconsistent(), &c));
        }
    }

    #[test]
    fn conj_and_pairwise_conj() {
        let l = lang2();
        let p0 = l.atom(0).unwrap();
        let p1 = l.atom(1).unwrap();
        let a: InputSet = [p0, p1].into_iter().collect();
        assert_eq!(conj_all(&l, &a).bitstrings(), vec!["11"]);
        assert_eq!(conj_all(&l, &InputSet::empty()), l.top());
        let contra: InputSet = [p0, p0.not()].into_iter().collect();
        assert_eq!(conj_all(&l, &contra), l.bottom());

        assert_eq!(
            pairwise_conj(&InputSet::singleton(p0), &InputSet::singleton(p1)),
            InputSet::singleton(p0.and(&p1))
        );
        assert!(pairwise_conj(&a, &InputSet::empty()).is_empty());
        let expect: InputSet = [p0, p0.and(&p1)].into_iter().collect();
        assert_eq!(pairwise_conj(&a, &InputSet::singleton(p0)), expect);
    }

    #[test]
    fn set_equivalence() {
        let l = lang2();
        let p0 = l.atom(0).unwrap();
        let p1 = l.atom(1).unwrap();
        assert!(set_equiv(
            &InputSet::singleton(p0.and(&p1)),
            &InputSet::singleton(p1.and(&p0))
        ));
        let with_top: InputSet = [p0, l.top()].into_iter().collect();
        assert!(!set_equiv(&InputSet::singleton(p0), &with_top));
        let a: InputSet = [p0, p0.not()].into_iter().collect();
        let b: InputSet = [p1, p1.not()].into_iter().collect();
        assert!(!set_equiv(&a, &b));
    }

    #[test]
    fn duplicates_collapse() {
        let l = lang2();
        let p0 = l.atom(0).unwrap();
        let a: InputSet = [p0, p0, p0.not().not()].into_iter().collect();
        assert_eq!(a.len(), 1);
    }
}
