//! Concrete syntax for patterns.
//!
//! ```text
//! p ::= p <-> p | p -> p | p \/ p | p /\ p | p = p | ~p
//!     | E{x1,...,xn}. p | mu #X. p
//!     | [p] | _|_ | _T_ | x | #X | f | f(p,...,p) | (p @ p @ ... @ p) | (p)
//! ```
//!
//! Tightest first: `~`, `=`, `/\`, `\/`, `->`, `<->`. Binders extend as far
//! right as possible. An identifier is a symbol when it is applied with `(`
//! or listed among the known symbols, otherwise an element variable.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use super::{mu, try_exists, Pattern};
use crate::term::Name;

const BINDER: u8 = 1;
const ATOM: u8 = 10;

fn prec(p: &Pattern) -> u8 {
    match p {
        Pattern::Exists(..) | Pattern::Mu(..) => BINDER,
        Pattern::Iff(..) => 3,
        Pattern::Implies(..) => 4,
        Pattern::Or(..) => 5,
        Pattern::And(..) => 6,
        Pattern::Eq(..) => 7,
        Pattern::Not(..) => 9,
        _ => ATOM,
    }
}

fn right_assoc(p: &Pattern) -> bool {
    matches!(p, Pattern::And(..) | Pattern::Or(..) | Pattern::Implies(..) | Pattern::Not(..))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pat(self, f, true)
    }
}

fn write_child(
    c: &Pattern,
    parent: &Pattern,
    side: Side,
    rightmost: bool,
    f: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    let (cp, pp) = (prec(c), prec(parent));
    let parens = if cp == BINDER {
        !(side == Side::Right && rightmost)
    } else if cp == ATOM {
        false
    } else {
        match side {
            Side::Left => cp <= pp,
            Side::Right => {
                cp < pp
                    || (cp == pp
                        && !(std::mem::discriminant(c) == std::mem::discriminant(parent)
                            && right_assoc(c)))
            }
        }
    };
    if parens {
        f.write_str("(")?;
        write_pat(c, f, true)?;
        f.write_str(")")
    } else {
        write_pat(c, f, rightmost && side == Side::Right)
    }
}

fn write_pat(p: &Pattern, f: &mut fmt::Formatter<'_>, rightmost: bool) -> fmt::Result {
    let bin = |a: &Pattern, op: &str, b: &Pattern, f: &mut fmt::Formatter<'_>| {
        write_child(a, p, Side::Left, rightmost, f)?;
        write!(f, " {op} ")?;
        write_child(b, p, Side::Right, rightmost, f)
    };
    match p {
        Pattern::EVar(x) | Pattern::Sym(x) => write!(f, "{x}"),
        Pattern::SVar(x) => write!(f, "#{x}"),
        Pattern::Bot => f.write_str("_|_"),
        Pattern::Top => f.write_str("_T_"),
        Pattern::Defined(a) => {
            f.write_str("[")?;
            write_pat(a, f, true)?;
            f.write_str("]")
        }
        Pattern::Not(a) => {
            f.write_str("~")?;
            write_child(a, p, Side::Right, rightmost, f)
        }
        Pattern::App(..) => {
            if let Some((head, args)) = p.spine() {
                write!(f, "{head}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write_pat(a, f, true)?;
                }
                return f.write_str(")");
            }
            let mut items = Vec::new();
            let mut cur = p;
            while let Pattern::App(l, r) = cur {
                items.push(r.as_ref());
                cur = l;
            }
            items.push(cur);
            items.reverse();
            f.write_str("(")?;
            for (i, a) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str(" @ ")?;
                }
                write_pat(a, f, true)?;
            }
            f.write_str(")")
        }
        Pattern::Implies(a, b) => bin(a, "->", b, f),
        Pattern::And(a, b) => bin(a, "/\\", b, f),
        Pattern::Or(a, b) => bin(a, "\\/", b, f),
        Pattern::Iff(a, b) => bin(a, "<->", b, f),
        Pattern::Eq(a, b) => bin(a, "=", b, f),
        Pattern::Exists(bs, a) => {
            f.write_str("E{")?;
            for (i, b) in bs.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{b}")?;
            }
            f.write_str("}. ")?;
            write_pat(a, f, true)
        }
        Pattern::Mu(x, a) => {
            write!(f, "mu #{x}. ")?;
            write_pat(a, f, true)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message} at offset {offset}")]
pub struct PatternParseError {
    pub message: String,
    pub offset: usize,
}

/// Parses the concrete syntax; `symbols` lists names that denote nullary
/// (or unapplied) symbols rather than variables.
pub fn parse_pattern<S: AsRef<str>>(input: &str, symbols: &[S]) -> Result<Pattern, PatternParseError> {
    let syms: HashSet<&str> = symbols.iter().map(|s| s.as_ref()).collect();
    let mut p = Parser { src: input, pos: 0, syms };
    let out = p.iff()?;
    p.ws();
    if p.pos < p.src.len() {
        return p.fail("unexpected trailing input");
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    syms: HashSet<&'a str>,
}

type PResult<T> = Result<T, PatternParseError>;

impl<'a> Parser<'a> {
    fn fail<T>(&self, message: &str) -> PResult<T> {
        Err(PatternParseError { message: message.to_string(), offset: self.pos })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> PResult<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.fail(&format!("expected `{tok}`"))
        }
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.ws();
        let rest = self.rest();
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_ascii_alphabetic() => {}
            _ => return None,
        }
        let end = chars
            .find(|&(_, c)| !(c.is_ascii_alphanumeric() || c == '_'))
            .map_or(rest.len(), |(i, _)| i);
        self.pos += end;
        Some(&rest[..end])
    }

    fn expect_ident(&mut self) -> PResult<&'a str> {
        match self.ident() {
            Some(s) => Ok(s),
            None => self.fail("expected identifier"),
        }
    }

    fn iff(&mut self) -> PResult<Pattern> {
        let lhs = self.implies()?;
        if self.eat("<->") {
            return Ok(super::iff(lhs, self.iff()?));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> PResult<Pattern> {
        let lhs = self.or()?;
        if self.eat("->") {
            return Ok(super::implies(lhs, self.implies()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Pattern> {
        let lhs = self.and()?;
        if self.eat("\\/") {
            return Ok(super::or(lhs, self.or()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Pattern> {
        let lhs = self.eq()?;
        if self.eat("/\\") {
            return Ok(super::and(lhs, self.and()?));
        }
        Ok(lhs)
    }

    fn eq(&mut self) -> PResult<Pattern> {
        let lhs = self.unary()?;
        if self.eat("=") {
            let rhs = self.unary()?;
            self.ws();
            if self.rest().starts_with('=') {
                return self.fail("`=` does not associate; add parentheses");
            }
            return Ok(super::eq(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Pattern> {
        if self.eat("~") {
            return Ok(super::not(self.unary()?));
        }
        self.ws();
        if self.rest().starts_with("E{") {
            self.pos += 2;
            let mut binders = Vec::new();
            if !self.eat("}") {
                loop {
                    binders.push(Name::new(self.expect_ident()?));
                    if self.eat("}") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            self.expect(".")?;
            let start = self.pos;
            let body = self.iff()?;
            return try_exists(binders, body)
                .map_err(|e| PatternParseError { message: e.to_string(), offset: start });
        }
        let save = self.pos;
        if self.ident() == Some("mu") && self.eat("#") {
            let x = self.expect_ident()?;
            self.expect(".")?;
            let start = self.pos;
            let body = self.iff()?;
            return mu(x, body).map_err(|e| PatternParseError { message: e.to_string(), offset: start });
        }
        self.pos = save;
        self.atom()
    }

    fn atom(&mut self) -> PResult<Pattern> {
        if self.eat("(") {
            let first = self.iff()?;
            let mut acc = first;
            while self.eat("@") {
                let next = self.iff()?;
                acc = super::app(acc, next);
            }
            self.expect(")")?;
            return Ok(acc);
        }
        if self.eat("[") {
            let inner = self.iff()?;
            self.expect("]")?;
            return Ok(super::defined(inner));
        }
        if self.eat("_|_") {
            return Ok(Pattern::Bot);
        }
        if self.eat("_T_") {
            return Ok(Pattern::Top);
        }
        if self.eat("#") {
            return Ok(Pattern::SVar(Name::new(self.expect_ident()?)));
        }
        let Some(id) = self.ident() else {
            return self.fail("expected pattern");
        };
        if self.rest().starts_with('(') {
            self.pos += 1;
            let mut acc = Pattern::Sym(Name::new(id));
            if self.eat(")") {
                return Ok(acc);
            }
            loop {
                let arg = self.iff()?;
                acc = Pattern::App(Arc::new(acc), Arc::new(arg));
                if self.eat(")") {
                    return Ok(acc);
                }
                self.expect(",")?;
            }
        }
        if self.syms.contains(id) {
            Ok(Pattern::Sym(Name::new(id)))
        } else {
            Ok(Pattern::EVar(Name::new(id)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::arb_pattern;
    use super::super::*;
    use proptest::prelude::*;

    const SYMS: [&str; 4] = ["cons", "succ", "zero", "nil"];

    fn parse(s: &str) -> Pattern {
        parse_pattern(s, &SYMS).unwrap()
    }

    #[test]
    fn prints_terms_compactly() {
        let p = app(app(sym("cons"), app(sym("succ"), evar("x1"))), sym("nil"));
        assert_eq!(p.to_string(), "cons(succ(x1),nil)");
        assert_eq!(app(evar("g"), evar("a")).to_string(), "(g @ a)");
    }

    #[test]
    fn precedence_and_binders() {
        let p = parse("E{z}. z /\\ z = a \\/ z = b");
        let expected = exists(
            vec!["z".into()],
            or(and(evar("z"), eq(evar("z"), evar("a"))), eq(evar("z"), evar("b"))),
        );
        assert_eq!(p, expected);
        assert_eq!(p.to_string(), "E{z}. z /\\ z = a \\/ z = b");

        let q = and(exists(vec!["x".into()], evar("x")), evar("y"));
        assert_eq!(q.to_string(), "(E{x}. x) /\\ y");
        let r = and(evar("y"), exists(vec!["x".into()], evar("x")));
        assert_eq!(r.to_string(), "y /\\ E{x}. x");
        let s = iff(and(evar("y"), exists(vec!["x".into()], evar("x"))), evar("w"));
        assert_eq!(s.to_string(), "y /\\ (E{x}. x) <-> w");
        assert_eq!(parse(&s.to_string()), s);
    }

    #[test]
    fn associativity() {
        assert_eq!(parse("a -> b -> c"), implies(evar("a"), implies(evar("b"), evar("c"))));
        assert_eq!(parse("a <-> b <-> c"), iff(evar("a"), iff(evar("b"), evar("c"))));
        assert_eq!(iff(evar("a"), iff(evar("b"), evar("c"))).to_string(), "a <-> (b <-> c)");
        assert_eq!(and(and(evar("a"), evar("b")), evar("c")).to_string(), "(a /\\ b) /\\ c");
        assert!(parse_pattern("a = b = c", &SYMS).is_err());
    }

    #[test]
    fn misc_forms() {
        assert_eq!(parse("zero()"), sym("zero"));
        assert_eq!(parse("E{}. zero"), sym("zero"));
        assert_eq!(parse("[x] -> _|_ \\/ _T_").to_string(), "[x] -> _|_ \\/ _T_");
        let m = parse("mu #X. zero \\/ succ(#X)");
        assert_eq!(m.to_string(), "mu #X. zero \\/ succ(#X)");
        assert!(parse_pattern("mu #X. ~#X", &SYMS).is_err());
        assert!(parse_pattern("E{a,a}. a", &SYMS).is_err());
        assert!(parse_pattern("(a /\\ b", &SYMS).is_err());
        let e = parse_pattern("a /\\ ", &SYMS).unwrap_err();
        assert_eq!(e.offset, 5);
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(p in arb_pattern()) {
            let printed = p.to_string();
            let back = parse_pattern(&printed, &SYMS).map_err(|e| TestCaseError::fail(format!("{printed}: {e}")))?;
            prop_assert_eq!(back, p);
        }
    }
}
