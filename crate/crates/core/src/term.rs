//! First-order terms, substitutions and signatures with inferred arities.
//!
//! Terms use the concrete syntax `f(t1,...,tn)`; nullary symbols are written
//! bare (`zero`) and `zero()` is accepted on input. Identifiers follow
//! `[A-Za-z][A-Za-z0-9_]*`.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An interned-by-refcount identifier. Cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name(Arc::from(s))
    }
}

impl Borrow<str> for Name {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Name {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Serialize for Name {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Name {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Name::from(String::deserialize(d)?))
    }
}

/// True for `[A-Za-z][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub name: Name,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<Name>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Name),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<Name>) -> Term {
        Term::Var(name.into())
    }

    /// Application; the symbol's arity is taken from the argument count.
    pub fn app(name: impl Into<Name>, args: Vec<Term>) -> Term {
        let arity = args.len();
        Term::App(Symbol::new(name, arity), args)
    }

    pub fn constant(name: impl Into<Name>) -> Term {
        Term::app(name, Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&Name> {
        match self {
            Term::Var(x) => Some(x),
            Term::App(..) => None,
        }
    }

    pub fn head(&self) -> Option<&Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Variables in order of first occurrence (left to right).
    pub fn vars_in_order(&self) -> Vec<Name> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.walk(&mut |t| {
            if let Term::Var(x) = t {
                if seen.insert(x.clone()) {
                    out.push(x.clone());
                }
            }
        });
        out
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.walk(&mut |t| {
            if let Term::App(f, _) = t {
                out.insert(f.clone());
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk<F: FnMut(&Term)>(&self, f: &mut F) {
        f(self);
        if let Term::App(_, args) = self {
            for a in args {
                a.walk(f);
            }
        }
    }

    pub fn occurrences(&self, x: &str) -> usize {
        match self {
            Term::Var(y) => usize::from(y.as_str() == x),
            Term::App(_, args) => args.iter().map(|a| a.occurrences(x)).sum(),
        }
    }

    /// `self[replacement/x]`.
    pub fn replace_var(&self, x: &str, replacement: &Term) -> Term {
        match self {
            Term::Var(y) if y.as_str() == x => replacement.clone(),
            Term::Var(_) => self.clone(),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|a| a.replace_var(x, replacement)).collect(),
            ),
        }
    }

    pub fn apply(&self, s: &Substitution) -> Term {
        apply_subst(self, s)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::App(s, args) if args.is_empty() => write!(f, "{}", s.name),
            Term::App(s, args) => {
                write!(f, "{}(", s.name)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Simultaneous substitution. Identity bindings are never stored.
#[derive(Clone, Default, PartialEq, Eq, Serialize)]
pub struct Substitution {
    bindings: BTreeMap<Name, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `x ↦ t`; a binding `x ↦ x` is dropped.
    pub fn insert(&mut self, x: impl Into<Name>, t: Term) {
        let x = x.into();
        if t.as_var() == Some(&x) {
            self.bindings.remove(&x);
        } else {
            self.bindings.insert(x, t);
        }
    }

    pub fn get(&self, x: &str) -> Option<&Term> {
        self.bindings.get(x)
    }

    pub fn domain(&self) -> BTreeSet<Name> {
        self.bindings.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Term)> {
        self.bindings.iter()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl<N: Into<Name>> FromIterator<(N, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (N, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (x, t) in iter {
            s.insert(x, t);
        }
        s
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} -> {t}")?;
        }
        f.write_str("}")
    }
}

/// Replaces every occurrence of a domain variable at once; the images are
/// not revisited.
pub fn apply_subst(t: &Term, s: &Substitution) -> Term {
    if s.is_empty() {
        return t.clone();
    }
    match t {
        Term::Var(x) => s.get(x.as_str()).cloned().unwrap_or_else(|| t.clone()),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| apply_subst(a, s)).collect()),
    }
}

pub fn term_vars(t: &Term) -> BTreeSet<Name> {
    t.vars()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("unknown identifier `{name}` at column {}", .offset + 1)]
    UnknownIdentifier { name: String, offset: usize },
    #[error("symbol `{symbol}` used with {found} argument(s) at column {}, but earlier with {expected}", .offset + 1)]
    ArityConflict {
        symbol: String,
        expected: usize,
        found: usize,
        offset: usize,
    },
    #[error("syntax error at column {}: {message}", .offset + 1)]
    Syntax { message: String, offset: usize },
    #[error("`{0}` is not a valid identifier")]
    InvalidIdentifier(String),
    #[error("`{0}` is declared both as a variable and as a symbol")]
    Overlap(String),
    #[error("`{0}` is declared twice")]
    Duplicate(String),
}

impl TermError {
    /// Byte offset into the parsed text, when the error has one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            TermError::UnknownIdentifier { offset, .. }
            | TermError::ArityConflict { offset, .. }
            | TermError::Syntax { offset, .. } => Some(*offset),
            _ => None,
        }
    }

    pub(crate) fn shifted(self, by: usize) -> TermError {
        match self {
            TermError::UnknownIdentifier { name, offset } => TermError::UnknownIdentifier {
                name,
                offset: offset + by,
            },
            TermError::ArityConflict {
                symbol,
                expected,
                found,
                offset,
            } => TermError::ArityConflict {
                symbol,
                expected,
                found,
                offset: offset + by,
            },
            TermError::Syntax { message, offset } => TermError::Syntax {
                message,
                offset: offset + by,
            },
            other => other,
        }
    }
}

/// Declared variables and symbols. Symbol arities are fixed by first use.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeMap<Name, Option<usize>>,
    variables: BTreeSet<Name>,
}

impl Signature {
    pub fn new<V, S>(variables: V, symbols: S) -> Result<Self, TermError>
    where
        V: IntoIterator,
        V::Item: AsRef<str>,
        S: IntoIterator,
        S::Item: AsRef<str>,
    {
        let mut sig = Signature::default();
        for v in variables {
            let v = v.as_ref();
            if !is_identifier(v) {
                return Err(TermError::InvalidIdentifier(v.to_string()));
            }
            if !sig.variables.insert(Name::new(v)) {
                return Err(TermError::Duplicate(v.to_string()));
            }
        }
        for s in symbols {
            let s = s.as_ref();
            if !is_identifier(s) {
                return Err(TermError::InvalidIdentifier(s.to_string()));
            }
            if sig.variables.contains(s) {
                return Err(TermError::Overlap(s.to_string()));
            }
            if sig.symbols.insert(Name::new(s), None).is_some() {
                return Err(TermError::Duplicate(s.to_string()));
            }
        }
        Ok(sig)
    }

    pub fn is_variable(&self, name: &str) -> bool {
        self.variables.contains(name)
    }

    pub fn is_symbol(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    /// Arity if the symbol has been used at least once.
    pub fn arity(&self, name: &str) -> Option<usize> {
        self.symbols.get(name).copied().flatten()
    }

    pub fn variables(&self) -> impl Iterator<Item = &Name> {
        self.variables.iter()
    }

    /// Symbols whose arity is known.
    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.symbols
            .iter()
            .filter_map(|(n, a)| a.map(|a| Symbol::new(n.clone(), a)))
    }

    pub fn declared_symbols(&self) -> impl Iterator<Item = &Name> {
        self.symbols.keys()
    }

    /// Records (or checks) the arity of `name`.
    pub fn record_arity(&mut self, name: &str, arity: usize, offset: usize) -> Result<(), TermError> {
        match self.symbols.get_mut(name) {
            None => Err(TermError::UnknownIdentifier {
                name: name.to_string(),
                offset,
            }),
            Some(slot @ None) => {
                *slot = Some(arity);
                Ok(())
            }
            Some(Some(expected)) if *expected == arity => Ok(()),
            Some(Some(expected)) => Err(TermError::ArityConflict {
                symbol: name.to_string(),
                expected: *expected,
                found: arity,
                offset,
            }),
        }
    }

    /// A signature declaring exactly the variables and symbols of `terms`.
    pub fn from_terms<'a>(terms: impl IntoIterator<Item = &'a Term>) -> Result<Self, TermError> {
        let mut sig = Signature::default();
        for t in terms {
            let mut err = None;
            t.walk(&mut |n| {
                if err.is_some() {
                    return;
                }
                match n {
                    Term::Var(x) => {
                        sig.variables.insert(x.clone());
                    }
                    Term::App(f, _) => {
                        let slot = sig.symbols.entry(f.name.clone()).or_insert(None);
                        match slot {
                            None => *slot = Some(f.arity),
                            Some(a) if *a != f.arity => {
                                err = Some(TermError::ArityConflict {
                                    symbol: f.name.to_string(),
                                    expected: *a,
                                    found: f.arity,
                                    offset: 0,
                                })
                            }
                            Some(_) => {}
                        }
                    }
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        if let Some(x) = sig.variables.iter().find(|x| sig.symbols.contains_key(x.as_str())) {
            return Err(TermError::Overlap(x.to_string()));
        }
        Ok(sig)
    }
}

/// Parses one term against `sig`, recording symbol arities as they are seen.
pub fn parse_term(input: &str, sig: &mut Signature) -> Result<Term, TermError> {
    let mut p = TermParser {
        src: input.as_bytes(),
        pos: 0,
        sig,
    };
    p.skip_ws();
    let t = p.term()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(t)
}

struct TermParser<'a, 's> {
    src: &'a [u8],
    pos: usize,
    sig: &'s mut Signature,
}

impl TermParser<'_, '_> {
    fn syntax(&self, message: &str) -> TermError {
        TermError::Syntax {
            message: message.to_string(),
            offset: self.pos,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn ident(&mut self) -> Result<(String, usize), TermError> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => self.pos += 1,
            Some(b'(') | Some(b')') | Some(b',') | None => {
                return Err(self.syntax("expected an identifier"))
            }
            Some(_) => return Err(self.syntax("invalid character")),
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok((name.to_string(), start))
    }

    fn term(&mut self) -> Result<Term, TermError> {
        let (name, start) = self.ident()?;
        self.skip_ws();
        if self.sig.is_variable(&name) {
            if self.peek() == Some(b'(') {
                return Err(self.syntax(&format!("variable `{name}` cannot take arguments")));
            }
            return Ok(Term::Var(Name::from(name)));
        }
        if !self.sig.is_symbol(&name) {
            return Err(TermError::UnknownIdentifier { name, offset: start });
        }
        let mut args = Vec::new();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            self.skip_ws();
            if self.peek() == Some(b')') {
                self.pos += 1;
            } else {
                loop {
                    args.push(self.term()?);
                    self.skip_ws();
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                            self.skip_ws();
                        }
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        None => return Err(self.syntax("unbalanced parentheses")),
                        Some(_) => return Err(self.syntax("expected `,` or `)`")),
                    }
                }
            }
        }
        self.sig.record_arity(&name, args.len(), start)?;
        Ok(Term::app(name, args))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(["x1", "x2", "l1", "l2"], ["cons", "succ", "zero"]).unwrap()
    }

    #[test]
    fn parses_sample_term() {
        let mut s = sig();
        let t = parse_term("cons(succ(x1),cons(zero,l1))", &mut s).unwrap();
        let expected = Term::app(
            "cons",
            vec![
                Term::app("succ", vec![Term::var("x1")]),
                Term::app("cons", vec![Term::constant("zero"), Term::var("l1")]),
            ],
        );
        assert_eq!(t, expected);
        assert_eq!(s.arity("cons"), Some(2));
        assert_eq!(s.arity("zero"), Some(0));
    }

    #[test]
    fn nullary_forms() {
        let mut s = sig();
        assert_eq!(parse_term("zero", &mut s).unwrap(), Term::constant("zero"));
        assert_eq!(parse_term("zero()", &mut s).unwrap(), Term::constant("zero"));
        assert_eq!(parse_term("zero()", &mut s).unwrap().to_string(), "zero");
    }

    #[test]
    fn arity_conflict() {
        let mut s = sig();
        parse_term("succ(x1)", &mut s).unwrap();
        let err = parse_term("succ(x1,x2)", &mut s).unwrap_err();
        assert!(matches!(err, TermError::ArityConflict { expected: 1, found: 2, .. }));
    }

    #[test]
    fn unknown_and_syntax_errors() {
        let mut s = sig();
        assert!(matches!(
            parse_term("plus(x1)", &mut s),
            Err(TermError::UnknownIdentifier { .. })
        ));
        assert!(matches!(parse_term("cons(x1,l1", &mut s), Err(TermError::Syntax { .. })));
        assert!(matches!(parse_term("cons(x1,,l1)", &mut s), Err(TermError::Syntax { .. })));
        assert!(matches!(parse_term("cons(x1,l1))", &mut s), Err(TermError::Syntax { .. })));
        assert!(matches!(parse_term("x1(zero)", &mut s), Err(TermError::Syntax { .. })));
    }

    #[test]
    fn signature_rejects_overlap() {
        assert_eq!(
            Signature::new(["a"], ["a"]).unwrap_err(),
            TermError::Overlap("a".into())
        );
        assert!(Signature::new(["1x"], ["f"]).is_err());
    }

    #[test]
    fn substitution_examples() {
        let lgg = Term::app("cons", vec![Term::var("z1"), Term::var("z2")]);
        let s: Substitution = [
            ("z1", Term::app("succ", vec![Term::var("x1")])),
            ("z2", Term::app("cons", vec![Term::constant("zero"), Term::var("l1")])),
        ]
        .into_iter()
        .collect();
        assert_eq!(apply_subst(&lgg, &s).to_string(), "cons(succ(x1),cons(zero,l1))");
        assert_eq!(apply_subst(&Term::constant("zero"), &s), Term::constant("zero"));
        assert_eq!(apply_subst(&Term::var("z"), &Substitution::new()), Term::var("z"));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let t = Term::app("cons", vec![Term::var("x"), Term::var("y")]);
        let s: Substitution = [("x", Term::var("y")), ("y", Term::constant("zero"))]
            .into_iter()
            .collect();
        assert_eq!(apply_subst(&t, &s).to_string(), "cons(y,zero)");
    }

    #[test]
    fn identity_bindings_dropped() {
        let mut s = Substitution::new();
        s.insert("x", Term::var("x"));
        assert!(s.is_empty());
    }

    #[test]
    fn vars_examples() {
        let mut s = Signature::new(["x1", "l1", "z1", "z3", "z4"], ["cons", "succ", "zero"]).unwrap();
        let names = |t: &Term| t.vars().into_iter().map(|n| n.to_string()).collect::<Vec<_>>();
        let t = parse_term("cons(succ(x1),cons(zero,l1))", &mut s).unwrap();
        assert_eq!(names(&t), ["l1", "x1"]);
        assert!(term_vars(&Term::constant("zero")).is_empty());
        let t = parse_term("cons(z1,cons(z3,z4))", &mut s).unwrap();
        assert_eq!(names(&t), ["z1", "z3", "z4"]);
    }
}
