use std::fmt;

use rand::Rng;

use super::semantics::{Language, SentenceClass, Valuation};
use crate::error::{Error, Result};

/// Object-language formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(u8),
    Top,
    Bottom,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn eval(&self, v: &Valuation) -> bool {
        match self {
            Formula::Atom(i) => v.get(*i),
            Formula::Top => true,
            Formula::Bottom => false,
            Formula::Not(f) => !f.eval(v),
            Formula::And(a, b) => a.eval(v) && b.eval(v),
            Formula::Or(a, b) => a.eval(v) || b.eval(v),
            Formula::Implies(a, b) => !a.eval(v) || b.eval(v),
        }
    }

    pub fn max_atom(&self) -> Option<u8> {
        match self {
            Formula::Atom(i) => Some(*i),
            Formula::Top | Formula::Bottom => None,
            Formula::Not(f) => f.max_atom(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.max_atom().max(b.max_atom())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            _ => 4,
        }
    }

    /// Draw a random formula of bounded depth.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, lang: &Language, depth: u32) -> Formula {
        if depth == 0 || rng.gen_ratio(1, 3) {
            return match rng.gen_range(0..10) {
                0 => Formula::Top,
                1 => Formula::Bottom,
                _ => Formula::Atom(rng.gen_range(0..lang.atoms())),
            };
        }
        let a = Formula::random(rng, lang, depth - 1);
        match rng.gen_range(0..4) {
            0 => Formula::not(a),
            1 => Formula::and(a, Formula::random(rng, lang, depth - 1)),
            2 => Formula::or(a, Formula::random(rng, lang, depth - 1)),
            _ => Formula::implies(a, Formula::random(rng, lang, depth - 1)),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // binary operands get parentheses when they bind looser, or equally
        // loose on the side the operator does not associate towards
        let child = |f: &mut fmt::Formatter<'_>, c: &Formula, min: u8| {
            if c.precedence() < min {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        };
        match self {
            Formula::Atom(i) => write!(f, "p{i}"),
            Formula::Top => write!(f, "T"),
            Formula::Bottom => write!(f, "F"),
            Formula::Not(a) => {
                write!(f, "~")?;
                child(f, a, 4)
            }
            Formula::And(a, b) => {
                child(f, a, 3)?;
                write!(f, " & ")?;
                child(f, b, 4)
            }
            Formula::Or(a, b) => {
                child(f, a, 2)?;
                write!(f, " | ")?;
                child(f, b, 3)
            }
            Formula::Implies(a, b) => {
                child(f, a, 2)?;
                write!(f, " -> ")?;
                child(f, b, 1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token {
    Atom(usize),
    Top,
    Bottom,
    Tilde,
    Bang,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    Comma,
    Bel,
}

impl Token {
    pub(crate) fn describe(&self) -> String {
        match self {
            Token::Atom(i) => format!("atom p{i}"),
            Token::Top => "'T'".into(),
            Token::Bottom => "'F'".into(),
            Token::Tilde => "'~'".into(),
            Token::Bang => "'!'".into(),
            Token::Amp => "'&'".into(),
            Token::Pipe => "'|'".into(),
            Token::Arrow => "'->'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
            Token::Comma => "','".into(),
            Token::Bel => "'B'".into(),
        }
    }
}

/// Tokens paired with their byte offsets.
pub(crate) fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'~' => Token::Tilde,
            b'!' => Token::Bang,
            b'&' => Token::Amp,
            b'|' => Token::Pipe,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b',' => Token::Comma,
            b'T' => Token::Top,
            b'F' => Token::Bottom,
            b'B' => Token::Bel,
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 1;
                    Token::Arrow
                } else {
                    return Err(syntax(start, "expected '->'"));
                }
            }
            b'p' => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(syntax(start, "expected digits after 'p'"));
                }
                let index = text[i + 1..j]
                    .parse::<usize>()
                    .map_err(|_| syntax(start, "atom index too large"))?;
                i = j - 1;
                Token::Atom(index)
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(start, &format!("unexpected character {ch:?}")));
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

pub(crate) fn syntax(position: usize, message: &str) -> Error {
    Error::Syntax {
        position,
        message: message.to_string(),
    }
}

/// Recursive-descent parser over a token stream, shared with the
/// descriptor grammar.
pub(crate) struct Parser<'a> {
    pub(crate) tokens: &'a [(usize, Token)],
    pub(crate) pos: usize,
    pub(crate) end: usize,
    pub(crate) lang: Language,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(tokens: &'a [(usize, Token)], end: usize, lang: Language) -> Self {
        Parser {
            tokens,
            pos: 0,
            end,
            lang,
        }
    }

    pub(crate) fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    pub(crate) fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(o, _)| *o)
            .unwrap_or(self.end)
    }

    pub(crate) fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    pub(crate) fn expect(&mut self, tok: Token) -> Result<()> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(syntax(
                self.offset(),
                &format!("expected {}, found {}", tok.describe(), t.describe()),
            )),
            None => Err(syntax(
                self.offset(),
                &format!("expected {}, found end of input", tok.describe()),
            )),
        }
    }

    pub(crate) fn formula(&mut self) -> Result<Formula> {
        self.implication()
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Token::Arrow) {
            self.pos += 1;
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Token::Pipe) {
            self.pos += 1;
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Token::Amp) {
            self.pos += 1;
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        let at = self.offset();
        match self.bump() {
            Some(Token::Tilde) => Ok(Formula::not(self.unary()?)),
            Some(Token::Top) => Ok(Formula::Top),
            Some(Token::Bottom) => Ok(Formula::Bottom),
            Some(Token::Atom(i)) => {
                if i >= self.lang.atoms() as usize {
                    return Err(Error::AtomOutOfRange {
                        index: i,
                        atoms: self.lang.atoms(),
                    });
                }
                Ok(Formula::Atom(i as u8))
            }
            Some(Token::LParen) => {
                let f = self.formula()?;
                self.expect(Token::RParen)?;
                Ok(f)
            }
            Some(t) => Err(syntax(at, &format!("unexpected {}", t.describe()))),
            None => Err(syntax(at, "unexpected end of input")),
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }
}

/// Parse a formula: atoms `p0..`, constants `T`/`F`, and `~`, `&`, `|`, `->`
/// from tightest to loosest, with `->` associating to the right.
pub fn parse_formula(text: &str, lang: &Language) -> Result<Formula> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(&tokens, text.len(), *lang);
    let f = p.formula()?;
    if !p.at_end() {
        let t = p.peek().map(|t| t.describe()).unwrap_or_default();
        return Err(syntax(p.offset(), &format!("unexpected {t}")));
    }
    Ok(f)
}

/// Comma-separated formulas; empty text yields no formulas.
pub fn parse_formula_list(text: &str, lang: &Language) -> Result<Vec<Formula>> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(&tokens, text.len(), *lang);
    let mut out = Vec::new();
    if p.at_end() {
        return Ok(out);
    }
    loop {
        out.push(p.formula()?);
        match p.bump() {
            None => break,
            Some(Token::Comma) => continue,
            Some(t) => {
                p.pos -= 1;
                return Err(syntax(
                    p.offset(),
                    &format!("expected ',' found {}", t.describe()),
                ));
            }
        }
    }
    Ok(out)
}

/// The models of `f` as a sentence class.
pub fn class_of(f: &Formula, lang: &Language) -> SentenceClass {
    let bits = lang
        .valuations()
        .filter(|v| f.eval(v))
        .fold(0u16, |acc, v| acc | 1 << v.index());
    lang.class_from_bits(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lang(n: u8) -> Language {
        Language::new(n).unwrap()
    }

    #[test]
    fn parses_contradiction() {
        let f = parse_formula("p0 & ~p0", &lang(1)).unwrap();
        assert_eq!(
            f,
            Formula::and(Formula::Atom(0), Formula::not(Formula::Atom(0)))
        );
    }

    #[test]
    fn conditional_is_loosest() {
        let f = parse_formula("p0 -> (p1 | p2)", &lang(3)).unwrap();
        assert_eq!(
            f,
            Formula::implies(
                Formula::Atom(0),
                Formula::or(Formula::Atom(1), Formula::Atom(2))
            )
        );
        let g = parse_formula("p0 -> p1 -> p2", &lang(3)).unwrap();
        assert_eq!(
            g,
            Formula::implies(
                Formula::Atom(0),
                Formula::implies(Formula::Atom(1), Formula::Atom(2))
            )
        );
        let h = parse_formula("p0 | p1 & ~p2", &lang(3)).unwrap();
        assert_eq!(
            h,
            Formula::or(
                Formula::Atom(0),
                Formula::and(Formula::Atom(1), Formula::not(Formula::Atom(2)))
            )
        );
    }

    #[test]
    fn atom_bound_is_checked() {
        let err = parse_formula("p9", &lang(2)).unwrap_err();
        assert_eq!(err, Error::AtomOutOfRange { index: 9, atoms: 2 });
        assert!(err.to_string().contains("atom out of range"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_formula("p0 & ", &lang(1)) {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 5),
            other => panic!("unexpected {other:?}"),
        }
        match parse_formula("p0 p0", &lang(1)) {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_formula("p0 - p0", &lang(1)).is_err());
        assert!(parse_formula("(p0", &lang(1)).is_err());
        assert!(parse_formula("q", &lang(1)).is_err());
    }

    #[test]
    fn class_of_examples() {
        let l = lang(2);
        assert!(class_of(&parse_formula("p0 & ~p0", &l).unwrap(), &l).is_bottom());
        assert!(class_of(&Formula::Top, &l).is_top());
        assert_eq!(
            class_of(&Formula::Atom(0), &l).bitstrings(),
            vec!["10", "11"]
        );
    }

    #[test]
    fn printer_round_trips() {
        let l = lang(3);
        for text in [
            "p0 & ~p0",
            "p0 -> (p1 | p2)",
            "(p0 -> p1) -> p2",
            "~(p0 & p1) | T",
            "p0 & (p1 & p2)",
        ] {
            let f = parse_formula(text, &l).unwrap();
            let printed = f.to_string();
            assert_eq!(
                parse_formula(&printed, &l).unwrap(),
                f,
                "{text} -> {printed}"
            );
        }
    }

    #[test]
    fn formula_list() {
        let l = lang(2);
        assert!(parse_formula_list("", &l).unwrap().is_empty());
        assert_eq!(parse_formula_list("p0, ~p1", &l).unwrap().len(), 2);
        assert!(parse_formula_list("p0,", &l).is_err());
        assert!(parse_formula_list("p0 p1", &l).is_err());
    }
}
