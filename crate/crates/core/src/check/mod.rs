//! Trusted proof kernel. Depends only on the pattern and term layers; it
//! rebuilds the expected shape of every rule instance itself and never
//! consults generator logic.

mod prop;

pub use prop::{is_tautology, TRUTH_TABLE_MAX_ATOMS};

use std::collections::BTreeSet;
use std::fmt;

use crate::exec::Exec;
use crate::pattern::{alpha_eq, ml_subst, Pattern};
use crate::proof::{ProofLine, ProofObject, Rule};
use crate::term::Name;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub line: usize,
    pub rule: String,
    pub reason: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}: {}", self.line, self.rule, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineVerdict {
    Accepted,
    Rejected(Rejection),
}

impl LineVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, LineVerdict::Accepted)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub lines: Vec<LineVerdict>,
    pub goal_matched: bool,
    pub overall: bool,
}

impl Verdict {
    pub fn rejections(&self) -> impl Iterator<Item = &Rejection> {
        self.lines.iter().filter_map(|l| match l {
            LineVerdict::Rejected(r) => Some(r),
            LineVerdict::Accepted => None,
        })
    }
}

type Check = Result<(), String>;

fn fail(msg: impl Into<String>) -> Check {
    Err(msg.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn iff_parts(p: &Pattern) -> Option<(&Pattern, &Pattern)> {
    match p {
        Pattern::Iff(a, b) => Some((a, b)),
        _ => None,
    }
}

fn expect_iff<'a>(p: &'a Pattern, what: &str) -> Result<(&'a Pattern, &'a Pattern), String> {
    iff_parts(p).ok_or_else(|| format!("{what} is not an equivalence"))
}

fn binders_disjoint(bs: &[Name], p: &Pattern) -> Option<Name> {
    let fv = p.free_vars();
    bs.iter().find(|b| fv.contains(*b)).cloned()
}

/// `∃z. ((t ∧ z=u) ↔ t[u/z])`, inner `↔` in either orientation.
fn exists_subst(p: &Pattern) -> Check {
    let Pattern::Exists(bs, body) = p else {
        return fail("expected an existential over a single variable");
    };
    let [z] = bs.as_ref() else {
        return fail("expected exactly one binder");
    };
    let (a, b) = expect_iff(body, "body")?;
    let attempt = |conj: &Pattern, result: &Pattern| -> Check {
        let Pattern::And(t, e) = conj else {
            return fail("expected t /\\ z = u");
        };
        let Pattern::Eq(zv, u) = e.as_ref() else {
            return fail("expected z = u");
        };
        ensure(matches!(zv.as_ref(), Pattern::EVar(x) if x == z), || {
            format!("equation does not constrain bound variable {z}")
        })?;
        ensure(t.is_term_like() && u.is_term_like(), || "t and u must be term patterns".into())?;
        ensure(!u.occurs_free(z.as_str()), || format!("{z} occurs in {u}"))?;
        ensure(alpha_eq(&ml_subst(t, z.as_str(), u), result), || {
            "right side is not the substitution instance".into()
        })
    };
    attempt(a, b).or_else(|e| attempt(b, a).map_err(|_| e))
}

/// `z=(f t̄) ↔ ∃ȳ. z=(f ȳ) ∧ ȳ=t̄`.
fn exists_gen(p: &Pattern) -> Check {
    let (l, r) = expect_iff(p, "line")?;
    let Pattern::Eq(z, ft) = l else {
        return fail("left side is not z = f(t...)");
    };
    let Pattern::EVar(z) = z.as_ref() else {
        return fail("left side does not equate a variable");
    };
    let Some((f, ts)) = ft.spine() else {
        return fail("left side is not a symbol application");
    };
    ensure(ft.is_term_like(), || "arguments must be term patterns".into())?;
    let (ys, body): (Vec<Name>, &Pattern) = match (ts.len(), r) {
        (0, _) => return fail("constant instances are propositional"),
        (n, Pattern::Exists(ys, body)) if ys.len() == n => (ys.to_vec(), body),
        (n, _) => return fail(format!("expected {n} binders on the right")),
    };
    let mut avoid = ft.free_vars();
    avoid.insert(z.clone());
    if let Some(y) = ys.iter().find(|y| avoid.contains(*y)) {
        return fail(format!("binder {y} is not fresh"));
    }
    let fy = ys
        .iter()
        .fold(Pattern::Sym(f.clone()), |acc, y| crate::pattern::app(acc, Pattern::EVar(y.clone())));
    let eqs = crate::pattern::conj(
        ys.iter().zip(ts).map(|(y, t)| crate::pattern::eq(Pattern::EVar(y.clone()), t.clone())),
    );
    let expected = crate::pattern::and(crate::pattern::eq(Pattern::EVar(z.clone()), fy), eqs);
    ensure(alpha_eq(body, &expected), || "right side does not match the generalization".into())
}

fn same_op<'a>(op: &Pattern, p: &'a Pattern) -> Option<(&'a Pattern, &'a Pattern)> {
    match (op, p) {
        (Pattern::And(..), Pattern::And(a, b)) | (Pattern::Iff(..), Pattern::Iff(a, b)) => Some((a, b)),
        _ => None,
    }
}

fn rebuild(op: &Pattern, a: Pattern, b: Pattern) -> Pattern {
    match op {
        Pattern::And(..) => crate::pattern::and(a, b),
        _ => crate::pattern::iff(a, b),
    }
}

/// `((∃x̄.φ1) ⊙ φ2) ↔ ∃x̄.(φ1 ⊙ φ2)` and its mirror, `⊙ ∈ {∧, ↔}`,
/// `x̄` not free in `φ2`; outer `↔` in either orientation.
fn exists_scope(p: &Pattern) -> Check {
    let (l, r) = expect_iff(p, "line")?;
    let attempt = |quantified: &Pattern, split: &Pattern| -> Check {
        if !matches!(split, Pattern::And(..) | Pattern::Iff(..)) {
            return fail("expected a conjunction or equivalence");
        }
        let (s1, s2) = same_op(split, split).expect("checked above");
        let mut reasons = Vec::new();
        if let Pattern::Exists(xs, a) = s1 {
            match binders_disjoint(xs, s2) {
                Some(x) => reasons.push(format!("binder {x} free in the other operand")),
                None => {
                    let expected = Pattern::Exists(xs.clone(), rebuild(split, (**a).clone(), s2.clone()).into());
                    if alpha_eq(quantified, &expected) {
                        return Ok(());
                    }
                }
            }
        }
        if let Pattern::Exists(xs, a) = s2 {
            match binders_disjoint(xs, s1) {
                Some(x) => reasons.push(format!("binder {x} free in the other operand")),
                None => {
                    let expected = Pattern::Exists(xs.clone(), rebuild(split, s1.clone(), (**a).clone()).into());
                    if alpha_eq(quantified, &expected) {
                        return Ok(());
                    }
                }
            }
        }
        Err(reasons.pop().unwrap_or_else(|| "sides do not match the scope-extrusion shape".into()))
    };
    attempt(r, l).or_else(|e| attempt(l, r).map_err(|_| e))
}

/// `((∃x̄.φ1) ∨ (∃x̄.φ2)) ↔ ∃x̄.(φ1 ∨ φ2)`.
fn exists_collapse(p: &Pattern) -> Check {
    let (l, r) = expect_iff(p, "line")?;
    let Pattern::Or(a, b) = l else {
        return fail("left side is not a disjunction");
    };
    if let (Pattern::Exists(xs, a), Pattern::Exists(ys, b)) = (a.as_ref(), b.as_ref()) {
        if xs == ys {
            let expected = Pattern::Exists(xs.clone(), crate::pattern::or((**a).clone(), (**b).clone()).into());
            if alpha_eq(r, &expected) {
                return Ok(());
            }
        }
    }
    fail("sides do not match the collapse shape")
}

/// Bodies under a common non-empty binder list.
fn under_common_binders<'a>(l: &'a Pattern, r: &'a Pattern) -> Option<(&'a Pattern, &'a Pattern)> {
    match (l, r) {
        (Pattern::Exists(xs, a), Pattern::Exists(ys, b)) if xs == ys && !xs.is_empty() => Some((a, b)),
        _ => None,
    }
}

fn exists_ctx(p: &Pattern, premise: &Pattern, pos: Option<&str>) -> Check {
    let (l, r) = expect_iff(p, "line")?;
    let (pl, pr) = expect_iff(premise, "premise")?;
    let pos = pos.ok_or("missing pos witness")?;
    let ok = match pos {
        "body" => under_common_binders(l, r).is_some_and(|(a, b)| alpha_eq(a, pl) && alpha_eq(b, pr)),
        "left" => under_common_binders(l, r).is_some_and(|(a, b)| match (a, b) {
            (Pattern::And(a1, a2), Pattern::And(b1, b2)) => {
                alpha_eq(a1, pl) && alpha_eq(b1, pr) && alpha_eq(a2, b2)
            }
            _ => false,
        }),
        "right" => under_common_binders(l, r).is_some_and(|(a, b)| match (a, b) {
            (Pattern::And(a1, a2), Pattern::And(b1, b2)) => {
                alpha_eq(a2, pl) && alpha_eq(b2, pr) && alpha_eq(a1, b1)
            }
            _ => false,
        }),
        "split" => return exists_ctx_split(l, r, pl, pr),
        other => return fail(format!("unknown position `{other}`")),
    };
    ensure(ok, || format!("conclusion is not the premise lifted at `{pos}`"))
}

/// Premise `∃ā.P ↔ B`; conclusion `∃w̄.P ↔ ∃ȳ.B` where the binders peeled
/// off the left side are exactly `ȳ ++ ā` as a set of distinct names.
fn exists_ctx_split(l: &Pattern, r: &Pattern, pl: &Pattern, pr: &Pattern) -> Check {
    let Pattern::Exists(inner, body) = pl else {
        return fail("premise left side is not an existential");
    };
    let mut peeled: Vec<Name> = Vec::new();
    let mut cur = l;
    let found = loop {
        if !peeled.is_empty() && alpha_eq(cur, body) {
            break true;
        }
        match cur {
            Pattern::Exists(xs, b) => {
                peeled.extend(xs.iter().cloned());
                cur = b;
            }
            _ => break false,
        }
    };
    if !found {
        return fail("left side does not reach the premise body");
    }
    let mut candidates: Vec<Vec<Name>> = Vec::new();
    if let Pattern::Exists(ys, b) = r {
        if alpha_eq(b, pr) {
            candidates.push(ys.to_vec());
        }
    }
    if alpha_eq(r, pr) {
        candidates.push(Vec::new());
    }
    if candidates.is_empty() {
        return fail("right side does not wrap the premise right side");
    }
    let distinct: BTreeSet<&Name> = peeled.iter().collect();
    if distinct.len() != peeled.len() {
        return fail("peeled binders are not distinct");
    }
    for ys in candidates {
        let mut expected: Vec<&Name> = ys.iter().chain(inner.iter()).collect();
        expected.sort();
        let mut got: Vec<&Name> = peeled.iter().collect();
        got.sort();
        if expected == got {
            return Ok(());
        }
    }
    fail("binder sets differ between the two sides")
}

/// Consequence of the premises, each of which is needed.
fn propositional(p: &Pattern, ps: &[&Pattern], refs: &[usize]) -> Check {
    ensure(is_tautology(ps, p), || "not a propositional consequence of its premises".into())?;
    for (i, r) in refs.iter().enumerate() {
        let rest: Vec<&Pattern> = ps.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| *q).collect();
        if is_tautology(&rest, p) {
            return fail(format!("premise {r} is not needed"));
        }
    }
    Ok(())
}

fn modus_ponens(p: &Pattern, a: &Pattern, b: &Pattern) -> Check {
    let (h, c) = match b {
        Pattern::Iff(h, c) | Pattern::Implies(h, c) => (h, c),
        _ => return fail("second premise is neither an implication nor an equivalence"),
    };
    ensure(alpha_eq(h, a), || "first premise does not match the antecedent".into())?;
    ensure(alpha_eq(c, p), || "conclusion does not match the consequent".into())
}

fn iff_trans(p: &Pattern, a: &Pattern, b: &Pattern) -> Check {
    let (a1, a2) = expect_iff(a, "first premise")?;
    let (b1, b2) = expect_iff(b, "second premise")?;
    let (c1, c2) = expect_iff(p, "line")?;
    ensure(alpha_eq(a2, b1), || "middle patterns differ".into())?;
    ensure(alpha_eq(c1, a1) && alpha_eq(c2, b2), || "conclusion does not join the premises".into())
}

fn arity(rule: Rule) -> std::ops::RangeInclusive<usize> {
    match rule {
        Rule::ExistsSubst | Rule::ExistsGen | Rule::ExistsScope | Rule::ExistsCollapse => 0..=0,
        Rule::ExistsCtx => 1..=1,
        Rule::Propositional => 0..=2,
        Rule::ModusPonens | Rule::IffTrans => 2..=2,
    }
}

/// Checks one line. `context[i]` is the pattern of line `i + 1` if that line
/// was accepted, `None` if it was rejected.
pub fn check_line(line: &ProofLine, context: &[Option<&Pattern>]) -> LineVerdict {
    let rule = line.just.rule;
    let reject = |reason: String| {
        LineVerdict::Rejected(Rejection { line: line.index, rule: rule.to_string(), reason })
    };
    let premises = &line.just.premises;
    if !arity(rule).contains(&premises.len()) {
        return reject(format!("wrong number of premises ({})", premises.len()));
    }
    let mut ps = Vec::with_capacity(premises.len());
    for &r in premises {
        if r == 0 || r >= line.index || r > context.len() {
            return reject(format!("dangling reference to line {r}"));
        }
        match context[r - 1] {
            Some(p) => ps.push(p),
            None => return reject(format!("premise line {r} was rejected")),
        }
    }
    let p = &line.pattern;
    let result = match rule {
        Rule::ExistsSubst => exists_subst(p),
        Rule::ExistsGen => exists_gen(p),
        Rule::ExistsScope => exists_scope(p),
        Rule::ExistsCollapse => exists_collapse(p),
        Rule::ExistsCtx => exists_ctx(p, ps[0], line.just.witness("pos")),
        Rule::Propositional => propositional(p, &ps, premises),
        Rule::ModusPonens => modus_ponens(p, ps[0], ps[1]),
        Rule::IffTrans => iff_trans(p, ps[0], ps[1]),
    };
    match result {
        Ok(()) => LineVerdict::Accepted,
        Err(reason) => reject(reason),
    }
}

/// Checks every line in order. The proof holds iff all lines are accepted
/// and the last line is the goal.
pub fn check_proof(po: &ProofObject) -> Verdict {
    let mut context: Vec<Option<&Pattern>> = Vec::with_capacity(po.lines.len());
    let mut lines = Vec::with_capacity(po.lines.len());
    for (i, line) in po.lines.iter().enumerate() {
        let v = if line.index != i + 1 {
            LineVerdict::Rejected(Rejection {
                line: line.index,
                rule: line.just.rule.to_string(),
                reason: format!("index out of sequence (expected {})", i + 1),
            })
        } else {
            check_line(line, &context)
        };
        context.push(v.is_accepted().then_some(&line.pattern));
        lines.push(v);
    }
    let goal_matched = po.lines.last().is_some_and(|l| alpha_eq(&l.pattern, &po.goal));
    let overall = goal_matched && lines.iter().all(LineVerdict::is_accepted);
    Verdict { lines, goal_matched, overall }
}

/// Checks independent proofs, possibly in parallel.
pub fn check_many(proofs: &[ProofObject], exec: Exec) -> Vec<Verdict> {
    exec.map(proofs, check_proof)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::parse_pattern;
    use crate::proof::Justification;

    const SYMS: [&str; 4] = ["cons", "succ", "zero", "nil"];

    fn p(s: &str) -> Pattern {
        parse_pattern(s, &SYMS).unwrap()
    }

    fn line(index: usize, pat: &str, rule: Rule, premises: Vec<usize>) -> ProofLine {
        ProofLine { index, pattern: p(pat), just: Justification::new(rule, premises) }
    }

    fn alone(pat: &str, rule: Rule) -> LineVerdict {
        check_line(&line(1, pat, rule, vec![]), &[])
    }

    #[test]
    fn exists_subst_cases() {
        assert!(alone("E{z}. (succ(z) /\\ z = zero <-> succ(zero))", Rule::ExistsSubst).is_accepted());
        assert!(alone("E{z}. (succ(zero) <-> succ(z) /\\ z = zero)", Rule::ExistsSubst).is_accepted());
        assert!(!alone("E{z}. (z /\\ z = z <-> z)", Rule::ExistsSubst).is_accepted());
        assert!(!alone("E{z}. (succ(z) /\\ z = zero <-> succ(succ(zero)))", Rule::ExistsSubst).is_accepted());
    }

    #[test]
    fn exists_gen_cases() {
        assert!(alone("z = cons(a,b) <-> E{y1,y2}. z = cons(y1,y2) /\\ y1 = a /\\ y2 = b", Rule::ExistsGen).is_accepted());
        assert!(!alone("z = zero <-> z = zero /\\ _T_", Rule::ExistsGen).is_accepted());
        assert!(alone("z = zero <-> z = zero /\\ _T_", Rule::Propositional).is_accepted());
        assert!(!alone("z = cons(a,b) <-> E{a,y2}. z = cons(a,y2) /\\ a = a /\\ y2 = b", Rule::ExistsGen).is_accepted());
        assert!(!alone("z = cons(a,b) <-> E{y1,y2}. z = cons(y1,y2) /\\ y1 = b /\\ y2 = a", Rule::ExistsGen).is_accepted());
    }

    #[test]
    fn exists_scope_cases() {
        assert!(alone("(E{x}. x = a) /\\ b <-> E{x}. x = a /\\ b", Rule::ExistsScope).is_accepted());
        assert!(alone("(E{x}. x = a /\\ b) <-> (E{x}. x = a) /\\ b", Rule::ExistsScope).is_accepted());
        assert!(alone("b /\\ (E{x}. x = a) <-> E{x}. b /\\ x = a", Rule::ExistsScope).is_accepted());
        assert!(alone("(E{x}. (x <-> b)) <-> ((E{x}. x) <-> b)", Rule::ExistsScope).is_accepted());
        assert!(!alone("(E{x}. x = a) /\\ x <-> E{x}. x = a /\\ x", Rule::ExistsScope).is_accepted());
        assert!(!alone("(E{x}. x = a) \\/ b <-> E{x}. x = a \\/ b", Rule::ExistsScope).is_accepted());
        assert!(!alone("a /\\ b <-> a /\\ b", Rule::ExistsScope).is_accepted());
    }

    #[test]
    fn propositional_premises_must_be_needed() {
        let a = p("a");
        let ab = p("a <-> b");
        assert!(check_line(&line(3, "b", Rule::Propositional, vec![1, 2]), &[Some(&a), Some(&ab)]).is_accepted());
        assert!(!check_line(&line(3, "a", Rule::Propositional, vec![1, 2]), &[Some(&a), Some(&ab)]).is_accepted());
        assert!(!check_line(&line(3, "a", Rule::Propositional, vec![1, 1]), &[Some(&a), Some(&ab)]).is_accepted());
        assert!(!check_line(&line(3, "b \\/ ~b", Rule::Propositional, vec![1]), &[Some(&a), Some(&ab)]).is_accepted());
    }

    #[test]
    fn collapse_and_ctx() {
        assert!(alone("(E{x}. a) \\/ (E{x}. b) <-> E{x}. a \\/ b", Rule::ExistsCollapse).is_accepted());
        assert!(!alone("(E{x}. a) \\/ (E{y}. b) <-> E{x}. a \\/ b", Rule::ExistsCollapse).is_accepted());
        assert!(!alone("a \\/ b <-> a \\/ b", Rule::ExistsCollapse).is_accepted());

        let prem = p("a <-> b");
        let mut l = line(2, "(E{x}. c /\\ a) <-> E{x}. c /\\ b", Rule::ExistsCtx, vec![1]);
        l.just = l.just.with("pos", "right");
        assert!(check_line(&l, &[Some(&prem)]).is_accepted());
        l.just = l.just.with("pos", "left");
        assert!(!check_line(&l, &[Some(&prem)]).is_accepted());
        let mut l = line(2, "c /\\ a <-> c /\\ b", Rule::ExistsCtx, vec![1]);
        l.just = l.just.with("pos", "right");
        assert!(!check_line(&l, &[Some(&prem)]).is_accepted());

        let prem = p("(E{z}. m) <-> q");
        let mut l = line(2, "(E{x,z}. E{y}. m) <-> E{y,x}. q", Rule::ExistsCtx, vec![1]);
        l.just = l.just.with("pos", "split");
        assert!(check_line(&l, &[Some(&prem)]).is_accepted());
        let mut l = line(2, "(E{x,z}. E{y}. m) <-> E{x}. q", Rule::ExistsCtx, vec![1]);
        l.just = l.just.with("pos", "split");
        assert!(!check_line(&l, &[Some(&prem)]).is_accepted());
    }

    #[test]
    fn references() {
        let a = p("a");
        let ab = p("a <-> b");
        assert!(check_line(&line(3, "b", Rule::ModusPonens, vec![1, 2]), &[Some(&a), Some(&ab)]).is_accepted());
        let v = check_line(&line(3, "b", Rule::ModusPonens, vec![1, 3]), &[Some(&a), Some(&ab)]);
        assert!(matches!(v, LineVerdict::Rejected(r) if r.reason.contains("dangling")));
        let v = check_line(&line(3, "b", Rule::ModusPonens, vec![1, 2]), &[Some(&a), None]);
        assert!(matches!(v, LineVerdict::Rejected(r) if r.reason.contains("rejected")));
        let bc = p("b <-> c");
        assert!(check_line(&line(3, "a <-> c", Rule::IffTrans, vec![1, 2]), &[Some(&ab), Some(&bc)]).is_accepted());
        assert!(!check_line(&line(3, "a <-> b", Rule::IffTrans, vec![1, 2]), &[Some(&ab), Some(&bc)]).is_accepted());
    }

    #[test]
    fn empty_proof_fails() {
        let po = ProofObject { symbols: vec![], goal: p("a <-> a"), lines: vec![] };
        assert!(!check_proof(&po).overall);
    }
}
