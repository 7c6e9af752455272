//! Matching-logic patterns.
//!
//! Derived connectives (`/\`, `\/`, `<->`, `=`, `~`, top) are kept as first-class
//! nodes so that proof lines read the way the schemas are written. Children are
//! reference counted; cloning a pattern is O(1) and large encodings are shared
//! between proof lines.

mod text;

pub use text::{parse_pattern, PatternParseError};

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::term::{Name, Term};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Pattern {
    EVar(Name),
    SVar(Name),
    Sym(Name),
    App(Arc<Pattern>, Arc<Pattern>),
    Bot,
    Top,
    Defined(Arc<Pattern>),
    Not(Arc<Pattern>),
    Implies(Arc<Pattern>, Arc<Pattern>),
    And(Arc<Pattern>, Arc<Pattern>),
    Or(Arc<Pattern>, Arc<Pattern>),
    Iff(Arc<Pattern>, Arc<Pattern>),
    Eq(Arc<Pattern>, Arc<Pattern>),
    /// `∃{x1,...,xn}. body`, n >= 1, binders pairwise distinct.
    Exists(Arc<[Name]>, Arc<Pattern>),
    Mu(Name, Arc<Pattern>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("duplicate binder `{0}`")]
    DuplicateBinder(Name),
    #[error("set variable `{0}` occurs negatively under its mu binder")]
    NotPositive(Name),
}

pub fn evar(x: impl Into<Name>) -> Pattern {
    Pattern::EVar(x.into())
}

pub fn sym(f: impl Into<Name>) -> Pattern {
    Pattern::Sym(f.into())
}

pub fn app(f: Pattern, a: Pattern) -> Pattern {
    Pattern::App(Arc::new(f), Arc::new(a))
}

pub fn and(a: Pattern, b: Pattern) -> Pattern {
    Pattern::And(Arc::new(a), Arc::new(b))
}

pub fn or(a: Pattern, b: Pattern) -> Pattern {
    Pattern::Or(Arc::new(a), Arc::new(b))
}

pub fn iff(a: Pattern, b: Pattern) -> Pattern {
    Pattern::Iff(Arc::new(a), Arc::new(b))
}

pub fn implies(a: Pattern, b: Pattern) -> Pattern {
    Pattern::Implies(Arc::new(a), Arc::new(b))
}

pub fn eq(a: Pattern, b: Pattern) -> Pattern {
    Pattern::Eq(Arc::new(a), Arc::new(b))
}

pub fn not(a: Pattern) -> Pattern {
    Pattern::Not(Arc::new(a))
}

pub fn defined(a: Pattern) -> Pattern {
    Pattern::Defined(Arc::new(a))
}

/// `∃binders. body`; an empty binder list yields `body` itself.
///
/// Panics on duplicate binders; use [`try_exists`] for untrusted input.
pub fn exists(binders: Vec<Name>, body: Pattern) -> Pattern {
    try_exists(binders, body).expect("exists: duplicate binder")
}

pub fn try_exists(binders: Vec<Name>, body: Pattern) -> Result<Pattern, PatternError> {
    if binders.is_empty() {
        return Ok(body);
    }
    let mut seen = BTreeSet::new();
    for b in &binders {
        if !seen.insert(b) {
            return Err(PatternError::DuplicateBinder(b.clone()));
        }
    }
    Ok(Pattern::Exists(binders.into(), Arc::new(body)))
}

/// `μX. body`, checking that `X` occurs only positively.
pub fn mu(x: impl Into<Name>, body: Pattern) -> Result<Pattern, PatternError> {
    let x = x.into();
    if !body.positive_in(&x, true) {
        return Err(PatternError::NotPositive(x));
    }
    Ok(Pattern::Mu(x, Arc::new(body)))
}

/// Right-associated conjunction; `⊤` when empty.
pub fn conj(items: impl IntoIterator<Item = Pattern>) -> Pattern {
    let mut items: Vec<Pattern> = items.into_iter().collect();
    let Some(mut acc) = items.pop() else {
        return Pattern::Top;
    };
    while let Some(p) = items.pop() {
        acc = and(p, acc);
    }
    acc
}

/// Curried, left-associated embedding of a first-order term.
pub fn embed_term(t: &Term) -> Pattern {
    match t {
        Term::Var(x) => Pattern::EVar(x.clone()),
        Term::App(f, args) => args
            .iter()
            .fold(Pattern::Sym(f.name.clone()), |acc, a| app(acc, embed_term(a))),
    }
}

impl Pattern {
    pub fn is_term_like(&self) -> bool {
        match self {
            Pattern::EVar(_) | Pattern::Sym(_) => true,
            Pattern::App(f, a) => f.is_term_like() && a.is_term_like(),
            _ => false,
        }
    }

    /// Splits `f a1 ... an` (with `f` a symbol) into its head and arguments.
    pub fn spine(&self) -> Option<(&Name, Vec<&Pattern>)> {
        let mut args = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Pattern::App(f, a) => {
                    args.push(a.as_ref());
                    cur = f;
                }
                Pattern::Sym(f) => {
                    args.reverse();
                    return Some((f, args));
                }
                _ => return None,
            }
        }
    }

    /// Inverse of [`embed_term`] for term-like patterns.
    pub fn to_term(&self) -> Option<Term> {
        match self {
            Pattern::EVar(x) => Some(Term::Var(x.clone())),
            _ => {
                let (f, args) = self.spine()?;
                let args = args.into_iter().map(Pattern::to_term).collect::<Option<Vec<_>>>()?;
                Some(Term::app(f.clone(), args))
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Pattern::EVar(_) | Pattern::SVar(_) | Pattern::Sym(_) | Pattern::Bot | Pattern::Top => 1,
            Pattern::Defined(a) | Pattern::Not(a) | Pattern::Exists(_, a) | Pattern::Mu(_, a) => {
                1 + a.size()
            }
            Pattern::App(a, b)
            | Pattern::Implies(a, b)
            | Pattern::And(a, b)
            | Pattern::Or(a, b)
            | Pattern::Iff(a, b)
            | Pattern::Eq(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Free element variables.
    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Pattern::EVar(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Pattern::SVar(_) | Pattern::Sym(_) | Pattern::Bot | Pattern::Top => {}
            Pattern::Defined(a) | Pattern::Not(a) | Pattern::Mu(_, a) => a.collect_free(bound, out),
            Pattern::Exists(bs, a) => {
                let n = bound.len();
                bound.extend(bs.iter().cloned());
                a.collect_free(bound, out);
                bound.truncate(n);
            }
            Pattern::App(a, b)
            | Pattern::Implies(a, b)
            | Pattern::And(a, b)
            | Pattern::Or(a, b)
            | Pattern::Iff(a, b)
            | Pattern::Eq(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
        }
    }

    pub fn occurs_free(&self, x: &str) -> bool {
        match self {
            Pattern::EVar(y) => y.as_str() == x,
            Pattern::SVar(_) | Pattern::Sym(_) | Pattern::Bot | Pattern::Top => false,
            Pattern::Defined(a) | Pattern::Not(a) | Pattern::Mu(_, a) => a.occurs_free(x),
            Pattern::Exists(bs, a) => !bs.iter().any(|b| b.as_str() == x) && a.occurs_free(x),
            Pattern::App(a, b)
            | Pattern::Implies(a, b)
            | Pattern::And(a, b)
            | Pattern::Or(a, b)
            | Pattern::Iff(a, b)
            | Pattern::Eq(a, b) => a.occurs_free(x) || b.occurs_free(x),
        }
    }

    /// Every name appearing anywhere (free, bound, symbol or set variable).
    pub fn all_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Pattern::EVar(x) | Pattern::SVar(x) | Pattern::Sym(x) => {
                out.insert(x.clone());
            }
            Pattern::Bot | Pattern::Top => {}
            Pattern::Defined(a) | Pattern::Not(a) => a.collect_names(out),
            Pattern::Mu(x, a) => {
                out.insert(x.clone());
                a.collect_names(out);
            }
            Pattern::Exists(bs, a) => {
                out.extend(bs.iter().cloned());
                a.collect_names(out);
            }
            Pattern::App(a, b)
            | Pattern::Implies(a, b)
            | Pattern::And(a, b)
            | Pattern::Or(a, b)
            | Pattern::Iff(a, b)
            | Pattern::Eq(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
        }
    }

    /// Symbol names with the number of arguments they are applied to.
    pub fn symbol_uses(&self) -> BTreeSet<(Name, usize)> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<(Name, usize)>) {
        if let Some((f, args)) = self.spine() {
            out.insert((f.clone(), args.len()));
            for a in args {
                a.collect_symbols(out);
            }
            return;
        }
        match self {
            Pattern::EVar(_) | Pattern::SVar(_) | Pattern::Sym(_) | Pattern::Bot | Pattern::Top => {}
            Pattern::Defined(a) | Pattern::Not(a) | Pattern::Mu(_, a) | Pattern::Exists(_, a) => {
                a.collect_symbols(out)
            }
            Pattern::App(a, b)
            | Pattern::Implies(a, b)
            | Pattern::And(a, b)
            | Pattern::Or(a, b)
            | Pattern::Iff(a, b)
            | Pattern::Eq(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
        }
    }

    fn positive_in(&self, x: &Name, positive: bool) -> bool {
        match self {
            Pattern::SVar(y) => y != x || positive,
            Pattern::EVar(_) | Pattern::Sym(_) | Pattern::Bot | Pattern::Top => true,
            Pattern::Mu(y, _) if y == x => true,
            Pattern::Mu(_, a) | Pattern::Exists(_, a) | Pattern::Defined(a) => a.positive_in(x, positive),
            Pattern::Not(a) => a.positive_in(x, !positive),
            Pattern::Implies(a, b) => a.positive_in(x, !positive) && b.positive_in(x, positive),
            Pattern::App(a, b) | Pattern::And(a, b) | Pattern::Or(a, b) => {
                a.positive_in(x, positive) && b.positive_in(x, positive)
            }
            // both polarities
            Pattern::Iff(a, b) | Pattern::Eq(a, b) => {
                a.positive_in(x, positive)
                    && a.positive_in(x, !positive)
                    && b.positive_in(x, positive)
                    && b.positive_in(x, !positive)
            }
        }
    }

    /// Capture-avoiding `self[q/x]`.
    pub fn subst(&self, x: &str, q: &Pattern) -> Pattern {
        ml_subst(self, x, q)
    }

    /// Rewrites into the core grammar: variables, symbols, application, `⊥`,
    /// definedness, `→`, single-binder `∃` and `μ`.
    pub fn desugar(&self) -> Pattern {
        let neg = |p: Pattern| implies(p, Pattern::Bot);
        match self {
            Pattern::EVar(_) | Pattern::SVar(_) | Pattern::Sym(_) | Pattern::Bot => self.clone(),
            Pattern::Top => neg(Pattern::Bot),
            Pattern::App(a, b) => app(a.desugar(), b.desugar()),
            Pattern::Defined(a) => defined(a.desugar()),
            Pattern::Not(a) => neg(a.desugar()),
            Pattern::Implies(a, b) => implies(a.desugar(), b.desugar()),
            Pattern::Or(a, b) => implies(neg(a.desugar()), b.desugar()),
            Pattern::And(a, b) => neg(implies(neg(neg(a.desugar())), neg(b.desugar()))),
            Pattern::Iff(a, b) => {
                let (a, b) = (a.desugar(), b.desugar());
                let l = implies(a.clone(), b.clone());
                let r = implies(b, a);
                neg(implies(neg(neg(l)), neg(r)))
            }
            Pattern::Eq(a, b) => {
                // ⌊φ⌋ = ¬⌈¬φ⌉
                let body = iff((**a).clone(), (**b).clone()).desugar();
                neg(defined(neg(body)))
            }
            Pattern::Exists(bs, a) => bs
                .iter()
                .rev()
                .fold(a.desugar(), |acc, b| Pattern::Exists(Arc::from(vec![b.clone()]), Arc::new(acc))),
            Pattern::Mu(x, a) => Pattern::Mu(x.clone(), Arc::new(a.desugar())),
        }
    }
}

/// A name based on `base` that is not in `avoid`: `base_1`, `base_2`, ...
pub fn fresh_name(base: &str, avoid: &BTreeSet<Name>) -> Name {
    (1..)
        .map(|i| Name::from(format!("{base}_{i}")))
        .find(|n| !avoid.contains(n))
        .expect("unbounded")
}

/// Capture-avoiding substitution of `q` for the free occurrences of `x`.
pub fn ml_subst(p: &Pattern, x: &str, q: &Pattern) -> Pattern {
    let fvq = q.free_vars();
    subst_in(p, x, q, &fvq)
}

fn subst_in(p: &Pattern, x: &str, q: &Pattern, fvq: &BTreeSet<Name>) -> Pattern {
    if !p.occurs_free(x) {
        return p.clone();
    }
    let rec = |a: &Arc<Pattern>| Arc::new(subst_in(a, x, q, fvq));
    match p {
        Pattern::EVar(_) => q.clone(),
        Pattern::SVar(_) | Pattern::Sym(_) | Pattern::Bot | Pattern::Top => p.clone(),
        Pattern::App(a, b) => Pattern::App(rec(a), rec(b)),
        Pattern::Defined(a) => Pattern::Defined(rec(a)),
        Pattern::Not(a) => Pattern::Not(rec(a)),
        Pattern::Implies(a, b) => Pattern::Implies(rec(a), rec(b)),
        Pattern::And(a, b) => Pattern::And(rec(a), rec(b)),
        Pattern::Or(a, b) => Pattern::Or(rec(a), rec(b)),
        Pattern::Iff(a, b) => Pattern::Iff(rec(a), rec(b)),
        Pattern::Eq(a, b) => Pattern::Eq(rec(a), rec(b)),
        Pattern::Mu(y, a) => Pattern::Mu(y.clone(), rec(a)),
        Pattern::Exists(bs, body) => {
            let mut body = (**body).clone();
            let mut binders: Vec<Name> = bs.to_vec();
            if binders.iter().any(|b| fvq.contains(b)) {
                let mut avoid = fvq.clone();
                avoid.extend(body.all_names());
                avoid.extend(binders.iter().cloned());
                avoid.insert(Name::new(x));
                for b in binders.iter_mut() {
                    if fvq.contains(b) {
                        let fresh = fresh_name(b.as_str(), &avoid);
                        avoid.insert(fresh.clone());
                        body = ml_subst(&body, b.as_str(), &Pattern::EVar(fresh.clone()));
                        *b = fresh;
                    }
                }
            }
            Pattern::Exists(binders.into(), Arc::new(subst_in(&body, x, q, fvq)))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum VarKind {
    Elem,
    Set,
}

/// Equality up to renaming of bound variables. Binder lists of `∃` are
/// matched positionally.
pub fn alpha_eq(p: &Pattern, q: &Pattern) -> bool {
    alpha_in(p, q, &mut Vec::new(), &mut Vec::new(), true)
}

fn lookup(stack: &[(VarKind, Name)], kind: VarKind, x: &Name) -> Option<usize> {
    stack.iter().rposition(|(k, n)| *k == kind && n == x)
}

fn alpha_in(
    p: &Pattern,
    q: &Pattern,
    sp: &mut Vec<(VarKind, Name)>,
    sq: &mut Vec<(VarKind, Name)>,
    aligned: bool,
) -> bool {
    fn child(
        a: &Arc<Pattern>,
        b: &Arc<Pattern>,
        sp: &mut Vec<(VarKind, Name)>,
        sq: &mut Vec<(VarKind, Name)>,
        aligned: bool,
    ) -> bool {
        (aligned && Arc::ptr_eq(a, b)) || alpha_in(a, b, sp, sq, aligned)
    }
    let var = |kind, x: &Name, y: &Name, sp: &[(VarKind, Name)], sq: &[(VarKind, Name)]| {
        match (lookup(sp, kind, x), lookup(sq, kind, y)) {
            (None, None) => x == y,
            (Some(i), Some(j)) => i == j,
            _ => false,
        }
    };
    match (p, q) {
        (Pattern::EVar(x), Pattern::EVar(y)) => var(VarKind::Elem, x, y, sp, sq),
        (Pattern::SVar(x), Pattern::SVar(y)) => var(VarKind::Set, x, y, sp, sq),
        (Pattern::Sym(f), Pattern::Sym(g)) => f == g,
        (Pattern::Bot, Pattern::Bot) | (Pattern::Top, Pattern::Top) => true,
        (Pattern::Defined(a), Pattern::Defined(b)) | (Pattern::Not(a), Pattern::Not(b)) => {
            child(a, b, sp, sq, aligned)
        }
        (Pattern::App(a1, b1), Pattern::App(a2, b2))
        | (Pattern::Implies(a1, b1), Pattern::Implies(a2, b2))
        | (Pattern::And(a1, b1), Pattern::And(a2, b2))
        | (Pattern::Or(a1, b1), Pattern::Or(a2, b2))
        | (Pattern::Iff(a1, b1), Pattern::Iff(a2, b2))
        | (Pattern::Eq(a1, b1), Pattern::Eq(a2, b2)) => {
            child(a1, a2, sp, sq, aligned) && child(b1, b2, sp, sq, aligned)
        }
        (Pattern::Exists(xs, a), Pattern::Exists(ys, b)) => {
            if xs.len() != ys.len() {
                return false;
            }
            let (np, nq) = (sp.len(), sq.len());
            sp.extend(xs.iter().map(|x| (VarKind::Elem, x.clone())));
            sq.extend(ys.iter().map(|y| (VarKind::Elem, y.clone())));
            let r = child(a, b, sp, sq, aligned && xs == ys);
            sp.truncate(np);
            sq.truncate(nq);
            r
        }
        (Pattern::Mu(x, a), Pattern::Mu(y, b)) => {
            sp.push((VarKind::Set, x.clone()));
            sq.push((VarKind::Set, y.clone()));
            let r = child(a, b, sp, sq, aligned && x == y);
            sp.pop();
            sq.pop();
            r
        }
        _ => false,
    }
}

/// Hash that is invariant under renaming of bound variables, so that
/// `alpha_eq(p, q)` implies `alpha_hash(p) == alpha_hash(q)`.
pub fn alpha_hash(p: &Pattern) -> u64 {
    let mut h = DefaultHasher::new();
    hash_in(p, &mut Vec::new(), &mut h);
    h.finish()
}

fn hash_in(p: &Pattern, stack: &mut Vec<(VarKind, Name)>, h: &mut DefaultHasher) {
    std::mem::discriminant(p).hash(h);
    match p {
        Pattern::EVar(x) => match lookup(stack, VarKind::Elem, x) {
            Some(i) => (0u8, i).hash(h),
            None => (1u8, x).hash(h),
        },
        Pattern::SVar(x) => match lookup(stack, VarKind::Set, x) {
            Some(i) => (0u8, i).hash(h),
            None => (1u8, x).hash(h),
        },
        Pattern::Sym(f) => f.hash(h),
        Pattern::Bot | Pattern::Top => {}
        Pattern::Defined(a) | Pattern::Not(a) => hash_in(a, stack, h),
        Pattern::App(a, b)
        | Pattern::Implies(a, b)
        | Pattern::And(a, b)
        | Pattern::Or(a, b)
        | Pattern::Iff(a, b)
        | Pattern::Eq(a, b) => {
            hash_in(a, stack, h);
            hash_in(b, stack, h);
        }
        Pattern::Exists(xs, a) => {
            xs.len().hash(h);
            let n = stack.len();
            stack.extend(xs.iter().map(|x| (VarKind::Elem, x.clone())));
            hash_in(a, stack, h);
            stack.truncate(n);
        }
        Pattern::Mu(x, a) => {
            stack.push((VarKind::Set, x.clone()));
            hash_in(a, stack, h);
            stack.pop();
        }
    }
}

/// Free element variables of `p`.
pub fn free_vars(p: &Pattern) -> BTreeSet<Name> {
    p.free_vars()
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;
    use proptest::prelude::*;

    fn t(s: &str) -> Pattern {
        parse_pattern(s, &["cons", "succ", "zero", "nil"]).unwrap()
    }

    #[test]
    fn embedding_examples() {
        let succ = Term::app("succ", vec![Term::var("x1")]);
        assert_eq!(embed_term(&succ), app(sym("succ"), evar("x1")));
        let cons = Term::app("cons", vec![Term::var("z1"), Term::var("z2")]);
        assert_eq!(embed_term(&cons), app(app(sym("cons"), evar("z1")), evar("z2")));
        assert_eq!(embed_term(&Term::constant("zero")), sym("zero"));
        assert_eq!(embed_term(&cons).to_term(), Some(cons));
    }

    #[test]
    fn subst_examples() {
        let q = t("cons(z1,z2)");
        assert_eq!(ml_subst(&evar("z"), "z", &q), q);
        let bound = exists(vec!["z".into()], evar("z"));
        assert_eq!(ml_subst(&bound, "z", &t("zero")), bound);

        let p = exists(vec!["y".into()], eq(evar("x"), evar("y")));
        let r = ml_subst(&p, "x", &evar("y"));
        let expected = exists(vec!["y0".into()], eq(evar("y"), evar("y0")));
        assert!(alpha_eq(&r, &expected), "{r}");
        assert_eq!(r.free_vars(), ["y".into()].into_iter().collect());
    }

    #[test]
    fn alpha_examples() {
        let a = exists(vec!["z".into()], evar("z"));
        let b = exists(vec!["w".into()], evar("w"));
        let c = exists(vec!["z".into()], sym("zero"));
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&a, &c));
        assert_eq!(alpha_hash(&a), alpha_hash(&b));
        // positional binder lists
        let p = exists(vec!["a".into(), "b".into()], eq(evar("a"), evar("b")));
        let q = exists(vec!["b".into(), "a".into()], eq(evar("b"), evar("a")));
        let r = exists(vec!["b".into(), "a".into()], eq(evar("a"), evar("b")));
        assert!(alpha_eq(&p, &q));
        assert!(!alpha_eq(&p, &r));
        // free vs bound
        assert!(!alpha_eq(&exists(vec!["x".into()], evar("x")), &exists(vec!["y".into()], evar("x"))));
    }

    #[test]
    fn free_vars_examples() {
        let t1 = t("cons(succ(x1),cons(zero,l1))");
        let p = exists(vec!["z".into()], and(evar("z"), eq(evar("z"), t1)));
        let names: Vec<String> = p.free_vars().iter().map(|n| n.to_string()).collect();
        assert_eq!(names, ["l1", "x1"]);
        assert!(sym("zero").free_vars().is_empty());
        assert_eq!(eq(evar("z"), t("succ(x2)")).free_vars().len(), 2);
    }

    #[test]
    fn empty_exists_is_body() {
        assert_eq!(exists(vec![], sym("zero")), sym("zero"));
        assert!(try_exists(vec!["a".into(), "a".into()], Pattern::Top).is_err());
    }

    #[test]
    fn mu_positivity() {
        let x = Pattern::SVar("X".into());
        assert!(mu("X", or(sym("zero"), app(sym("succ"), x.clone()))).is_ok());
        assert!(mu("X", not(x.clone())).is_err());
        assert!(mu("X", implies(not(x.clone()), Pattern::Bot)).is_ok());
    }

    #[test]
    fn desugar_is_core() {
        fn core(p: &Pattern) -> bool {
            match p {
                Pattern::EVar(_) | Pattern::SVar(_) | Pattern::Sym(_) | Pattern::Bot => true,
                Pattern::App(a, b) | Pattern::Implies(a, b) => core(a) && core(b),
                Pattern::Defined(a) | Pattern::Mu(_, a) => core(a),
                Pattern::Exists(bs, a) => bs.len() == 1 && core(a),
                _ => false,
            }
        }
        let p = t("E{z1,z2}. cons(z1,z2) /\\ (z1 = x \\/ ~(z2 = y) <-> _T_)");
        let d = p.desugar();
        assert!(core(&d));
        assert_eq!(d.free_vars(), p.free_vars());
    }

    pub(crate) fn arb_pattern() -> impl Strategy<Value = Pattern> {
        let names = prop::sample::select(vec!["a", "b", "c", "x", "y"]);
        let leaf = prop_oneof![
            names.clone().prop_map(evar),
            prop::sample::select(vec!["zero", "nil"]).prop_map(sym),
            Just(Pattern::Top),
            Just(Pattern::Bot),
        ];
        leaf.prop_recursive(5, 48, 3, move |inner| {
            let names = prop::sample::select(vec!["a", "b", "c", "x", "y"]);
            prop_oneof![
                inner.clone().prop_map(|a| app(sym("succ"), a)),
                (names.clone(), inner.clone()).prop_map(|(x, a)| app(evar(x), a)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| app(app(sym("cons"), a), b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| iff(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| implies(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| eq(a, b)),
                inner.clone().prop_map(not),
                inner.clone().prop_map(defined),
                (prop::collection::btree_set(names, 1..3), inner.clone()).prop_map(|(bs, a)| {
                    exists(bs.into_iter().map(Name::from).collect(), a)
                }),
            ]
        })
    }

    /// Consistent renaming of every binder to a primed-style fresh name.
    fn rename_binders(p: &Pattern, k: &mut usize) -> Pattern {
        match p {
            Pattern::Exists(bs, body) => {
                let mut body = (**body).clone();
                let mut fresh = Vec::new();
                for b in bs.iter() {
                    *k += 1;
                    let n = Name::from(format!("r{k}"));
                    body = ml_subst(&body, b.as_str(), &Pattern::EVar(n.clone()));
                    fresh.push(n);
                }
                Pattern::Exists(fresh.into(), Arc::new(rename_binders(&body, k)))
            }
            Pattern::App(a, b) => app(rename_binders(a, k), rename_binders(b, k)),
            Pattern::And(a, b) => and(rename_binders(a, k), rename_binders(b, k)),
            Pattern::Or(a, b) => or(rename_binders(a, k), rename_binders(b, k)),
            Pattern::Iff(a, b) => iff(rename_binders(a, k), rename_binders(b, k)),
            Pattern::Implies(a, b) => implies(rename_binders(a, k), rename_binders(b, k)),
            Pattern::Eq(a, b) => eq(rename_binders(a, k), rename_binders(b, k)),
            Pattern::Not(a) => not(rename_binders(a, k)),
            Pattern::Defined(a) => defined(rename_binders(a, k)),
            _ => p.clone(),
        }
    }

    proptest! {
        #[test]
        fn alpha_is_equivalence(p in arb_pattern(), q in arb_pattern()) {
            prop_assert!(alpha_eq(&p, &p));
            prop_assert_eq!(alpha_eq(&p, &q), alpha_eq(&q, &p));
            let r = rename_binders(&p, &mut 0);
            prop_assert!(alpha_eq(&p, &r));
            prop_assert_eq!(alpha_hash(&p), alpha_hash(&r));
            // transitivity through the renamed copy
            prop_assert_eq!(alpha_eq(&r, &q), alpha_eq(&p, &q));
        }

        #[test]
        fn subst_identity(p in arb_pattern(), x in prop::sample::select(vec!["a", "x"])) {
            prop_assert!(alpha_eq(&ml_subst(&p, x, &evar(x)), &p));
        }

        #[test]
        fn subst_free_vars(p in arb_pattern(), q in arb_pattern(), x in prop::sample::select(vec!["a", "x"])) {
            let r = ml_subst(&p, x, &q);
            if p.free_vars().contains(x) {
                let mut expected = p.free_vars();
                expected.remove(x);
                expected.extend(q.free_vars());
                prop_assert_eq!(r.free_vars(), expected);
            } else {
                prop_assert_eq!(r, p);
            }
        }
    }
}
