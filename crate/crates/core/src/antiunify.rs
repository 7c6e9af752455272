//! Plotkin-style antiunification over an ordered pair sequence, with a full
//! step trace for proof generation.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::term::{Name, Substitution, Symbol, Term};

/// `z ↦ left ⊔ right`. Pairs are not commutative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuPair {
    pub z: Name,
    pub left: Term,
    pub right: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuProblem {
    pub t: Term,
    pub pairs: Vec<AuPair>,
}

impl AuProblem {
    pub fn binders(&self) -> Vec<Name> {
        self.pairs.iter().map(|p| p.z.clone()).collect()
    }

    pub fn sigma1(&self) -> Substitution {
        self.pairs.iter().map(|p| (p.z.clone(), p.left.clone())).collect()
    }

    pub fn sigma2(&self) -> Substitution {
        self.pairs.iter().map(|p| (p.z.clone(), p.right.clone())).collect()
    }

    /// Index of the first pair whose sides share a head symbol.
    pub fn first_decomposable(&self) -> Option<usize> {
        self.pairs.iter().position(|p| match (p.left.head(), p.right.head()) {
            (Some(f), Some(g)) => f == g,
            _ => false,
        })
    }

    pub fn is_solved(&self) -> bool {
        self.first_decomposable().is_none()
    }

    /// Checks that pair names are distinct, occur at most once in `t`, and
    /// coincide with the variables of `t`.
    pub fn validate(&self) -> Result<(), String> {
        let mut zs = BTreeSet::new();
        for p in &self.pairs {
            if !zs.insert(p.z.clone()) {
                return Err(format!("pair variable {} repeated", p.z));
            }
            if self.t.occurrences(p.z.as_str()) > 1 {
                return Err(format!("pair variable {} occurs more than once in {}", p.z, self.t));
            }
        }
        if self.t.vars() != zs {
            return Err(format!("variables of {} differ from the pair variables", self.t));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuStep {
    pub index: usize,
    /// Position of the selected pair in `before.pairs`.
    pub position: usize,
    pub selected: AuPair,
    pub symbol: Symbol,
    pub fresh: Vec<Name>,
    pub left_args: Vec<Term>,
    pub right_args: Vec<Term>,
    pub before: AuProblem,
    pub after: AuProblem,
}

impl AuStep {
    /// Re-derives `after` from `before` and the recorded choice.
    pub fn replay(&self) -> Result<AuProblem, String> {
        let pair = self
            .before
            .pairs
            .get(self.position)
            .ok_or_else(|| format!("step {}: position out of range", self.index))?;
        if pair != &self.selected {
            return Err(format!("step {}: selected pair mismatch", self.index));
        }
        let (Some(f), Some(g)) = (pair.left.head(), pair.right.head()) else {
            return Err(format!("step {}: selected pair has a variable side", self.index));
        };
        if f != g || f != &self.symbol || self.fresh.len() != f.arity {
            return Err(format!("step {}: head symbols differ", self.index));
        }
        if pair.left.args() != self.left_args.as_slice() || pair.right.args() != self.right_args.as_slice() {
            return Err(format!("step {}: argument lists differ", self.index));
        }
        let generalized = Term::App(f.clone(), self.fresh.iter().cloned().map(Term::Var).collect());
        let mut pairs = self.before.pairs[..self.position].to_vec();
        pairs.extend(self.fresh.iter().zip(self.left_args.iter().zip(&self.right_args)).map(
            |(z, (u, v))| AuPair { z: z.clone(), left: u.clone(), right: v.clone() },
        ));
        pairs.extend_from_slice(&self.before.pairs[self.position + 1..]);
        Ok(AuProblem { t: self.before.t.replace_var(pair.z.as_str(), &generalized), pairs })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuResult {
    pub t1: Term,
    pub t2: Term,
    pub lgg: Term,
    pub sigma1: Substitution,
    pub sigma2: Substitution,
    pub initial: AuProblem,
    pub steps: Vec<AuStep>,
    pub solved: AuProblem,
}

#[derive(Serialize)]
struct TraceEntry<'a> {
    index: usize,
    z: &'a Name,
    f: &'a Name,
    fresh: &'a [Name],
    left_args: &'a [Term],
    right_args: &'a [Term],
}

impl AuResult {
    /// Compact JSON rendering of the step trace.
    pub fn trace_json(&self) -> serde_json::Value {
        let entries: Vec<TraceEntry> = self
            .steps
            .iter()
            .map(|s| TraceEntry {
                index: s.index,
                z: &s.selected.z,
                f: &s.symbol.name,
                fresh: &s.fresh,
                left_args: &s.left_args,
                right_args: &s.right_args,
            })
            .collect();
        serde_json::json!({
            "lgg": self.lgg,
            "steps": entries,
        })
    }
}

/// Generator of `z0, z1, ...`, skipping reserved names.
#[derive(Debug, Clone)]
pub struct FreshNames {
    reserved: BTreeSet<Name>,
    next: usize,
}

impl FreshNames {
    pub fn new(reserved: BTreeSet<Name>) -> Self {
        FreshNames { reserved, next: 0 }
    }

    /// Reserves every variable and symbol name of the given terms.
    pub fn avoiding<'a>(terms: impl IntoIterator<Item = &'a Term>) -> Self {
        let mut reserved = BTreeSet::new();
        for t in terms {
            t.walk(&mut |s| match s {
                Term::Var(x) => {
                    reserved.insert(x.clone());
                }
                Term::App(f, _) => {
                    reserved.insert(f.name.clone());
                }
            });
        }
        FreshNames::new(reserved)
    }

    pub fn for_problem(p: &AuProblem) -> Self {
        let mut fresh = FreshNames::avoiding(
            std::iter::once(&p.t).chain(p.pairs.iter().flat_map(|q| [&q.left, &q.right])),
        );
        fresh.reserved.extend(p.binders());
        fresh
    }

    pub fn next_name(&mut self) -> Name {
        loop {
            let n = Name::from(format!("z{}", self.next));
            self.next += 1;
            if self.reserved.insert(n.clone()) {
                return n;
            }
        }
    }
}

pub fn init_problem(t1: &Term, t2: &Term) -> AuProblem {
    Antiunifier::new(t1, t2).state
}

/// Performs one decomposition on the first decomposable pair, or returns
/// `None` when `p` is in solved form.
pub fn step(p: &AuProblem, fresh: &mut FreshNames, index: usize) -> Option<AuStep> {
    let position = p.first_decomposable()?;
    let selected = p.pairs[position].clone();
    let symbol = selected.left.head().expect("decomposable").clone();
    let names: Vec<Name> = (0..symbol.arity).map(|_| fresh.next_name()).collect();
    let mut s = AuStep {
        index,
        position,
        left_args: selected.left.args().to_vec(),
        right_args: selected.right.args().to_vec(),
        selected,
        symbol,
        fresh: names,
        before: p.clone(),
        after: p.clone(),
    };
    s.after = s.replay().expect("step built from a consistent state");
    Some(s)
}

/// Incremental engine; fresh-name state is local to one run.
pub struct Antiunifier {
    t1: Term,
    t2: Term,
    fresh: FreshNames,
    initial: AuProblem,
    state: AuProblem,
    steps: Vec<AuStep>,
}

impl Antiunifier {
    pub fn new(t1: &Term, t2: &Term) -> Self {
        let mut fresh = FreshNames::avoiding([t1, t2]);
        let z = fresh.next_name();
        let state = AuProblem {
            t: Term::Var(z.clone()),
            pairs: vec![AuPair { z, left: t1.clone(), right: t2.clone() }],
        };
        Antiunifier {
            t1: t1.clone(),
            t2: t2.clone(),
            fresh,
            initial: state.clone(),
            state,
            steps: Vec::new(),
        }
    }

    pub fn state(&self) -> &AuProblem {
        &self.state
    }

    pub fn step(&mut self) -> Option<&AuStep> {
        let s = step(&self.state, &mut self.fresh, self.steps.len())?;
        self.state = s.after.clone();
        self.steps.push(s);
        self.steps.last()
    }

    pub fn finish(mut self) -> AuResult {
        while self.step().is_some() {}
        AuResult {
            lgg: self.state.t.clone(),
            sigma1: self.state.sigma1(),
            sigma2: self.state.sigma2(),
            t1: self.t1,
            t2: self.t2,
            initial: self.initial,
            steps: self.steps,
            solved: self.state,
        }
    }
}

pub fn antiunify(t1: &Term, t2: &Term) -> AuResult {
    Antiunifier::new(t1, t2).finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{apply_subst, parse_term, Signature};

    fn sig() -> Signature {
        Signature::new(["x1", "x2", "l1", "l2", "x", "y"], ["cons", "succ", "zero", "nil", "f", "g"]).unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(s, &mut sig()).unwrap()
    }

    #[test]
    fn worked_example() {
        let t1 = t("cons(succ(x1),cons(zero,l1))");
        let t2 = t("cons(x2,cons(succ(x2),l2))");
        let r = antiunify(&t1, &t2);
        assert_eq!(r.steps.len(), 2);
        assert_eq!(r.lgg.to_string(), "cons(z1,cons(z3,z4))");
        assert_eq!(format!("{:?}", r.sigma1), "{z1 -> succ(x1), z3 -> zero, z4 -> l1}");
        assert_eq!(format!("{:?}", r.sigma2), "{z1 -> x2, z3 -> succ(x2), z4 -> l2}");
        let mid = &r.steps[0].after;
        assert_eq!(mid.t.to_string(), "cons(z1,z2)");
        assert_eq!(mid.pairs[1].left.to_string(), "cons(zero,l1)");
        assert_eq!(apply_subst(&r.lgg, &r.sigma1), t1);
        assert_eq!(apply_subst(&r.lgg, &r.sigma2), t2);
    }

    #[test]
    fn trivial_cases() {
        let r = antiunify(&t("zero"), &t("zero"));
        assert_eq!(r.initial.t.to_string(), "z0");
        assert_eq!(r.steps.len(), 1);
        assert_eq!(r.lgg, t("zero"));
        assert!(r.solved.pairs.is_empty());
        assert!(r.sigma1.is_empty());

        let r = antiunify(&t("x"), &t("x"));
        assert!(r.steps.is_empty());
        assert_eq!(r.lgg.to_string(), "z0");

        let r = antiunify(&t("zero"), &t("succ(x)"));
        assert!(r.steps.is_empty());

        // variables are never merged
        let r = antiunify(&t("f(x)"), &t("f(x)"));
        assert_eq!(r.lgg.to_string(), "f(z1)");
        assert_eq!(r.solved.pairs.len(), 1);
    }

    #[test]
    fn fresh_names_skip_inputs() {
        let mut s = Signature::new(["z0", "z2"], ["z1"]).unwrap();
        let a = parse_term("z1(z0,z2)", &mut s).unwrap();
        let b = parse_term("z1(z2,z0)", &mut s).unwrap();
        let r = antiunify(&a, &b);
        assert_eq!(r.initial.t.to_string(), "z3");
        assert_eq!(r.lgg.to_string(), "z1(z4,z5)");
    }

    #[test]
    fn trace_json_shape() {
        let r = antiunify(&t("cons(zero,nil)"), &t("cons(x,nil)"));
        let j = r.trace_json();
        assert_eq!(j["steps"][0]["f"], "cons");
        assert_eq!(j["steps"][0]["fresh"][1], "z2");
        assert_eq!(j["lgg"], "cons(z1,nil)");
    }
}
