//! Belief descriptors. `B(φ)` holds of a belief set that contains `φ`;
//! molecular descriptors combine these truth-functionally and a composite
//! descriptor is a set of molecular ones, satisfied when all of them are.
//!
//! Text form: `B( formula )` for atoms, then `!`, `&`, `|`, `->` at the
//! descriptor level, with commas separating the members of a composite.

use std::fmt;

use crate::error::{Error, Result};
use crate::logic::{
    class_of, syntax, tokenize, BeliefSet, InputSet, Language, Parser, SentenceClass, Token,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Molecular {
    Bel(SentenceClass),
    Not(Box<Molecular>),
    And(Box<Molecular>, Box<Molecular>),
    Or(Box<Molecular>, Box<Molecular>),
    Implies(Box<Molecular>, Box<Molecular>),
}

impl Molecular {
    pub fn satisfied_by(&self, x: &BeliefSet) -> bool {
        match self {
            Molecular::Bel(c) => x.entails(c),
            Molecular::Not(d) => !d.satisfied_by(x),
            Molecular::And(a, b) => a.satisfied_by(x) && b.satisfied_by(x),
            Molecular::Or(a, b) => a.satisfied_by(x) || b.satisfied_by(x),
            Molecular::Implies(a, b) => !a.satisfied_by(x) || b.satisfied_by(x),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Molecular::Implies(..) => 1,
            Molecular::Or(..) => 2,
            Molecular::And(..) => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for Molecular {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |f: &mut fmt::Formatter<'_>, c: &Molecular, min: u8| {
            if c.precedence() < min {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        };
        match self {
            Molecular::Bel(c) => write!(f, "B({})", c.to_formula_text()),
            Molecular::Not(d) => {
                write!(f, "!")?;
                child(f, d, 4)
            }
            Molecular::And(a, b) => {
                child(f, a, 3)?;
                write!(f, " & ")?;
                child(f, b, 4)
            }
            Molecular::Or(a, b) => {
                child(f, a, 2)?;
                write!(f, " | ")?;
                child(f, b, 3)
            }
            Molecular::Implies(a, b) => {
                child(f, a, 2)?;
                write!(f, " -> ")?;
                child(f, b, 1)
            }
        }
    }
}

/// A composite descriptor. The empty descriptor is satisfied by every
/// belief set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Descriptor(Vec<Molecular>);

impl Descriptor {
    pub fn new(elements: Vec<Molecular>) -> Self {
        Descriptor(elements)
    }

    pub fn elements(&self) -> &[Molecular] {
        &self.0
    }

    pub fn satisfied_by(&self, x: &BeliefSet) -> bool {
        self.0.iter().all(|d| d.satisfied_by(x))
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join(", "))
    }
}

pub fn satisfies(x: &BeliefSet, d: &Molecular) -> bool {
    d.satisfied_by(x)
}

pub fn satisfies_composite(x: &BeliefSet, d: &Descriptor) -> bool {
    d.satisfied_by(x)
}

/// `{B(φ0) ∨ … ∨ B(φn)}` for a nonempty input set.
pub fn choice_descriptor(a: &InputSet) -> Result<Descriptor> {
    let mut it = a.iter();
    let first = it
        .next()
        .ok_or(Error::EmptyInput("choice descriptor of an empty set"))?;
    let disj = it.fold(Molecular::Bel(*first), |acc, c| {
        Molecular::Or(Box::new(acc), Box::new(Molecular::Bel(*c)))
    });
    Ok(Descriptor(vec![disj]))
}

struct DescriptorParser<'a> {
    inner: Parser<'a>,
}

impl DescriptorParser<'_> {
    fn molecular(&mut self) -> Result<Molecular> {
        let lhs = self.disjunction()?;
        if self.inner.peek() == Some(&Token::Arrow) {
            self.inner.pos += 1;
            let rhs = self.molecular()?;
            return Ok(Molecular::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Molecular> {
        let mut lhs = self.conjunction()?;
        while self.inner.peek() == Some(&Token::Pipe) {
            self.inner.pos += 1;
            lhs = Molecular::Or(Box::new(lhs), Box::new(self.conjunction()?));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Molecular> {
        let mut lhs = self.unary()?;
        while self.inner.peek() == Some(&Token::Amp) {
            self.inner.pos += 1;
            lhs = Molecular::And(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Molecular> {
        let at = self.inner.offset();
        match self.inner.bump() {
            Some(Token::Bang) => Ok(Molecular::Not(Box::new(self.unary()?))),
            Some(Token::Bel) => {
                self.inner.expect(Token::LParen)?;
                let f = self.inner.formula()?;
                self.inner.expect(Token::RParen)?;
                Ok(Molecular::Bel(class_of(&f, &self.inner.lang)))
            }
            Some(Token::LParen) => {
                let d = self.molecular()?;
                self.inner.expect(Token::RParen)?;
                Ok(d)
            }
            Some(Token::Tilde) => Err(syntax(at, "'~' is object-level; use '!' outside B(...)")),
            Some(t) => Err(syntax(
                at,
                &format!("expected a descriptor, found {}", t.describe()),
            )),
            None => Err(syntax(at, "unexpected end of input")),
        }
    }
}

/// Parse a composite descriptor. Empty text gives the empty descriptor.
pub fn parse_descriptor(text: &str, lang: &Language) -> Result<Descriptor> {
    let tokens = tokenize(text)?;
    let mut p = DescriptorParser {
        inner: Parser::new(&tokens, text.len(), *lang),
    };
    let mut out = Vec::new();
    if p.inner.at_end() {
        return Ok(Descriptor(out));
    }
    loop {
        out.push(p.molecular()?);
        let at = p.inner.offset();
        match p.inner.bump() {
            None => break,
            Some(Token::Comma) => continue,
            Some(t) => return Err(syntax(at, &format!("expected ',' found {}", t.describe()))),
        }
    }
    Ok(Descriptor(out))
}
