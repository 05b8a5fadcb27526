//! Boolean formulas over states, read as conditions on the set of states
//! visited infinitely often.

use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::game::StateId;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(StateId),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula error at column {column}: {message}")]
pub struct FormulaError {
    /// 1-based column in the formula text.
    pub column: usize,
    pub message: String,
}

impl Formula {
    pub fn atom(s: StateId) -> Self {
        Formula::Atom(s)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// Disjunction of all items; `false` when empty.
    pub fn any(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::or).unwrap_or(Formula::False)
    }

    /// Conjunction of all items; `true` when empty.
    pub fn all(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Evaluates with atom `s` true iff `s` is in `inf`.
    pub fn eval(&self, inf: &FixedBitSet) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(s) => inf.contains(s.0),
            Formula::Not(f) => !f.eval(inf),
            Formula::And(a, b) => a.eval(inf) && b.eval(inf),
            Formula::Or(a, b) => a.eval(inf) || b.eval(inf),
        }
    }

    pub fn atoms(&self, out: &mut Vec<StateId>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(s) => out.push(*s),
            Formula::Not(f) => f.atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }

    /// Parses `!`, `&`, `|`, parentheses, `true`, `false` and state names;
    /// `!` binds tightest, then `&`, then `|`.
    pub fn parse(text: &str, resolve: impl Fn(&str) -> Option<StateId>) -> Result<Formula, FormulaError> {
        let mut p = Parser { chars: text.char_indices().collect(), pos: 0, resolve: &resolve };
        let f = p.or()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(f)
    }

    /// Renders with `name` for atoms, in the syntax accepted by [`Formula::parse`].
    pub fn display<'a>(&'a self, name: &'a dyn Fn(StateId) -> String) -> impl fmt::Display + 'a {
        Shown { f: self, name }
    }
}

struct Shown<'a> {
    f: &'a Formula,
    name: &'a dyn Fn(StateId) -> String,
}

impl Shown<'_> {
    fn write(&self, f: &Formula, prec: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f {
            Formula::True => write!(out, "true"),
            Formula::False => write!(out, "false"),
            Formula::Atom(s) => write!(out, "{}", (self.name)(*s)),
            Formula::Not(g) => {
                write!(out, "!")?;
                self.write(g, 3, out)
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                let (op, p) = if matches!(f, Formula::And(..)) { ("&", 2) } else { ("|", 1) };
                if prec > p {
                    write!(out, "(")?;
                }
                self.write(a, p, out)?;
                write!(out, " {op} ")?;
                self.write(b, p, out)?;
                if prec > p {
                    write!(out, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Shown<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.f, 0, out)
    }
}

struct Parser<'r> {
    chars: Vec<(usize, char)>,
    pos: usize,
    resolve: &'r dyn Fn(&str) -> Option<StateId>,
}

fn is_ident(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '\'' | '{' | '}' | '-')
}

impl Parser<'_> {
    fn error(&self, message: &str) -> FormulaError {
        FormulaError { column: self.pos + 1, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut f = self.and()?;
        while self.peek() == Some('|') {
            self.pos += 1;
            f = Formula::or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut f = self.unary()?;
        while self.peek() == Some('&') {
            self.pos += 1;
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Some('!') => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some('(') => {
                self.pos += 1;
                let f = self.or()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(f)
            }
            Some(c) if is_ident(c) => {
                let start = self.pos;
                while self.pos < self.chars.len() && is_ident(self.chars[self.pos].1) {
                    self.pos += 1;
                }
                let word: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
                match word.as_str() {
                    "true" => Ok(Formula::True),
                    "false" => Ok(Formula::False),
                    _ => (self.resolve)(&word)
                        .map(Formula::Atom)
                        .ok_or(FormulaError { column: start + 1, message: format!("unknown state '{word}'") }),
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of formula")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(s: &str) -> Option<StateId> {
        ["s0", "s1", "s2"].iter().position(|n| *n == s).map(StateId)
    }

    fn set(items: &[usize]) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(3);
        items.iter().for_each(|&i| b.insert(i));
        b
    }

    #[test]
    fn parses_conjunction_with_negation() {
        let f = Formula::parse("s2 & !s0", names).unwrap();
        assert_eq!(f, Formula::and(Formula::atom(StateId(2)), Formula::not(Formula::atom(StateId(0)))));
        assert!(f.eval(&set(&[2])));
        assert!(!f.eval(&set(&[0, 2])));
    }

    #[test]
    fn precedence_and_parentheses() {
        let f = Formula::parse("s0 | s1 & s2", names).unwrap();
        assert_eq!(f, Formula::or(Formula::atom(StateId(0)), Formula::and(Formula::atom(StateId(1)), Formula::atom(StateId(2)))));
        let g = Formula::parse("(s0 | s1) & !(s2)", names).unwrap();
        assert!(g.eval(&set(&[1])));
        assert!(!g.eval(&set(&[1, 2])));
        assert_eq!(Formula::parse("true", names).unwrap(), Formula::True);
    }

    #[test]
    fn reports_errors_with_columns() {
        assert_eq!(Formula::parse("s0 & s9", names).unwrap_err().column, 6);
        assert!(Formula::parse("s0 &", names).is_err());
        assert!(Formula::parse("(s0", names).is_err());
        assert!(Formula::parse("s0 s1", names).is_err());
    }

    #[test]
    fn display_roundtrips() {
        let name = |s: StateId| format!("s{}", s.0);
        for text in ["s2 & !s0", "(s0 | s1) & s2", "!(s0 & s1) | false", "s0 | s1 | s2"] {
            let f = Formula::parse(text, names).unwrap();
            let shown = f.display(&name).to_string();
            assert_eq!(Formula::parse(&shown, names).unwrap(), f, "{shown}");
        }
    }
}
