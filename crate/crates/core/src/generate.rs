//! Proof-object generation: `∨gen`, then one block per decomposition step,
//! then one transitivity line per step chaining the blocks together.
//!
//! The `∃-Gen′` and `Dec` sub-schemas are fully inlined, so the emitted
//! proofs only cite kernel rules.

use std::collections::BTreeSet;

use crate::antiunify::{AuResult, AuStep};
use crate::check::is_tautology;
use crate::encode::{encode_problem, side_constraint};
use crate::pattern::{and, conj, embed_term, eq, exists, iff, or, Pattern};
use crate::proof::{Justification, ProofLine, ProofObject, Rule};
use crate::term::Name;

/// Lines in the `∨gen` block.
pub const OR_GEN_LINES: usize = 12;
/// Lines in one `∃-Gen′` expansion.
pub const EXISTS_GEN_PRIME_LINES: usize = 4;
/// Lines in one `Dec` expansion.
pub const DEC_LINES: usize = 2 * EXISTS_GEN_PRIME_LINES + 6;
/// Lines in one step block, including its `Dec`.
pub const STEP_LINES: usize = DEC_LINES + 20;
/// Total proof length for `k` decomposition steps.
pub const fn proof_lines(k: usize) -> usize {
    OR_GEN_LINES + k * (STEP_LINES + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("freshness violated: {0}")]
    FreshnessViolation(String),
    #[error("branch mismatch: {0}")]
    BranchMismatch(String),
    #[error("corrupt trace: {0}")]
    TraceCorrupt(String),
}

struct Builder {
    lines: Vec<ProofLine>,
    block: String,
}

impl Builder {
    fn new(block: &str) -> Self {
        Builder { lines: Vec::new(), block: block.to_string() }
    }

    fn push(&mut self, pattern: Pattern, just: Justification) -> usize {
        let index = self.lines.len() + 1;
        let just = self.settle(&pattern, just).with("block", self.block.clone());
        self.lines.push(ProofLine { index, pattern, just });
        index
    }

    /// The kernel wants exact justifications: quantifier rules only for
    /// instances that need them, and no superfluous propositional premises.
    fn settle(&self, pattern: &Pattern, just: Justification) -> Justification {
        let premises: Vec<&Pattern> = just.premises.iter().map(|&i| self.pattern(i)).collect();
        match just.rule {
            Rule::Propositional => {}
            Rule::ExistsScope | Rule::ExistsCollapse | Rule::ExistsCtx | Rule::ExistsGen
                if is_tautology(&premises, pattern) => {}
            _ => return just,
        }
        let mut keep = just.premises.clone();
        let mut i = 0;
        while i < keep.len() {
            let rest: Vec<&Pattern> =
                keep.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &k)| self.pattern(k)).collect();
            if is_tautology(&rest, pattern) {
                keep.remove(i);
            } else {
                i += 1;
            }
        }
        prop(keep)
    }

    fn pattern(&self, index: usize) -> &Pattern {
        &self.lines[index - 1].pattern
    }

    /// Right-hand side of the `↔` on line `index`.
    fn rhs(&self, index: usize) -> Pattern {
        match self.pattern(index) {
            Pattern::Iff(_, r) => (**r).clone(),
            p => panic!("line {index} is not an equivalence: {p}"),
        }
    }
}

fn var(x: &Name) -> Pattern {
    Pattern::EVar(x.clone())
}

fn applied(f: &Name, args: impl IntoIterator<Item = Pattern>) -> Pattern {
    args.into_iter().fold(Pattern::Sym(f.clone()), crate::pattern::app)
}

fn equalities(zs: &[Name], ts: &[Pattern]) -> Pattern {
    conj(zs.iter().zip(ts).map(|(z, t)| eq(var(z), t.clone())))
}

fn ctx(premise: usize, pos: &str) -> Justification {
    Justification::new(Rule::ExistsCtx, vec![premise]).with("pos", pos)
}

fn trans(a: usize, b: usize) -> Justification {
    Justification::new(Rule::IffTrans, vec![a, b])
}

fn prop(premises: Vec<usize>) -> Justification {
    Justification::new(Rule::Propositional, premises)
}

fn or_gen(b: &mut Builder, t1: &Pattern, t2: &Pattern, z: &Name) -> usize {
    let zs = vec![z.clone()];
    let zp = var(z);
    let bridge = |b: &mut Builder, t: &Pattern| {
        let inner = and(zp.clone(), eq(zp.clone(), t.clone()));
        let subst = b.push(
            exists(zs.clone(), iff(t.clone(), inner.clone())),
            Justification::new(Rule::ExistsSubst, vec![]).with("var", z.as_str()),
        );
        let scope = b.push(
            iff(exists(zs.clone(), iff(t.clone(), inner.clone())), iff(t.clone(), exists(zs.clone(), inner))),
            Justification::new(Rule::ExistsScope, vec![]),
        );
        b.push(b.rhs(scope), Justification::new(Rule::ModusPonens, vec![subst, scope]))
    };
    let l1 = bridge(b, t1);
    let l2 = bridge(b, t2);
    let a1 = and(zp.clone(), eq(zp.clone(), t1.clone()));
    let a2 = and(zp.clone(), eq(zp.clone(), t2.clone()));
    let split = b.push(
        iff(or(t1.clone(), t2.clone()), or(exists(zs.clone(), a1.clone()), exists(zs.clone(), a2.clone()))),
        prop(vec![l1, l2]),
    );
    let collapse = b.push(
        iff(
            or(exists(zs.clone(), a1.clone()), exists(zs.clone(), a2.clone())),
            exists(zs.clone(), or(a1.clone(), a2.clone())),
        ),
        Justification::new(Rule::ExistsCollapse, vec![]),
    );
    let factored = and(zp.clone(), or(eq(zp.clone(), t1.clone()), eq(zp.clone(), t2.clone())));
    let dist = b.push(iff(or(a1.clone(), a2.clone()), factored.clone()), prop(vec![]));
    let lifted = b.push(
        iff(exists(zs.clone(), or(a1, a2)), exists(zs.clone(), factored)),
        ctx(dist, "body"),
    );
    let joined = b.push(iff(or(t1.clone(), t2.clone()), b.rhs(collapse)), trans(split, collapse));
    b.push(iff(or(t1.clone(), t2.clone()), b.rhs(lifted)), trans(joined, lifted))
}

fn check_fresh(zs: &[Name], avoid: &BTreeSet<Name>) -> Result<(), GenError> {
    let mut seen = BTreeSet::new();
    for z in zs {
        if avoid.contains(z) || !seen.insert(z) {
            return Err(GenError::FreshnessViolation(format!("`{z}` is not fresh")));
        }
    }
    Ok(())
}

/// `(φ ∧ z=f ū) ↔ ∃z̄. φ ∧ (z=f z̄ ∧ z̄=ū)`.
fn exists_gen_prime(
    b: &mut Builder,
    phi: &Pattern,
    z: &Name,
    f: &Name,
    us: &[Pattern],
    zs: &[Name],
) -> Result<usize, GenError> {
    let fu = applied(f, us.iter().cloned());
    let mut avoid = phi.free_vars();
    avoid.extend(fu.free_vars());
    avoid.insert(z.clone());
    check_fresh(zs, &avoid)?;
    if zs.len() != us.len() {
        return Err(GenError::BranchMismatch(format!("{} fresh names for {} arguments", zs.len(), us.len())));
    }
    let fz = applied(f, zs.iter().map(var));
    let x = and(eq(var(z), fz), equalities(zs, us));
    let z_eq = eq(var(z), fu);
    let gen = b.push(
        iff(z_eq.clone(), exists(zs.to_vec(), x.clone())),
        Justification::new(Rule::ExistsGen, vec![])
            .with("symbol", f.as_str())
            .with("fresh", zs.iter().map(Name::as_str).collect::<Vec<_>>().join(",")),
    );
    let lhs = and(phi.clone(), z_eq);
    let framed = b.push(iff(lhs.clone(), and(phi.clone(), exists(zs.to_vec(), x.clone()))), prop(vec![gen]));
    let scope = b.push(
        iff(and(phi.clone(), exists(zs.to_vec(), x.clone())), exists(zs.to_vec(), and(phi.clone(), x))),
        Justification::new(Rule::ExistsScope, vec![]),
    );
    Ok(b.push(iff(lhs, b.rhs(scope)), trans(framed, scope)))
}

/// `((φ ∧ z=f ū) ∨ (φ′ ∧ z=f v̄)) ↔ ∃z̄. z=f z̄ ∧ ((φ ∧ z̄=ū) ∨ (φ′ ∧ z̄=v̄))`.
#[allow(clippy::too_many_arguments)]
fn dec(
    b: &mut Builder,
    phi1: &Pattern,
    phi2: &Pattern,
    z: &Name,
    f: &Name,
    us: &[Pattern],
    vs: &[Pattern],
    zs: &[Name],
) -> Result<usize, GenError> {
    if us.len() != vs.len() {
        return Err(GenError::BranchMismatch(format!("{} vs {} arguments", us.len(), vs.len())));
    }
    let left = exists_gen_prime(b, phi1, z, f, us, zs)?;
    let right = exists_gen_prime(b, phi2, z, f, vs, zs)?;
    let fz = applied(f, zs.iter().map(var));
    let ez = eq(var(z), fz);
    let a = and(phi1.clone(), and(ez.clone(), equalities(zs, us)));
    let c = and(phi2.clone(), and(ez.clone(), equalities(zs, vs)));
    let d = or(
        and(phi1.clone(), eq(var(z), applied(f, us.iter().cloned()))),
        and(phi2.clone(), eq(var(z), applied(f, vs.iter().cloned()))),
    );
    let split = b.push(
        iff(d.clone(), or(exists(zs.to_vec(), a.clone()), exists(zs.to_vec(), c.clone()))),
        prop(vec![left, right]),
    );
    let collapse = b.push(
        iff(
            or(exists(zs.to_vec(), a.clone()), exists(zs.to_vec(), c.clone())),
            exists(zs.to_vec(), or(a.clone(), c.clone())),
        ),
        Justification::new(Rule::ExistsCollapse, vec![]),
    );
    let joined = b.push(iff(d.clone(), b.rhs(collapse)), trans(split, collapse));
    let q = or(and(phi1.clone(), equalities(zs, us)), and(phi2.clone(), equalities(zs, vs)));
    let factored = and(ez, q);
    let dist = b.push(iff(or(a.clone(), c.clone()), factored.clone()), prop(vec![]));
    let lifted = b.push(
        iff(exists(zs.to_vec(), or(a, c)), exists(zs.to_vec(), factored)),
        ctx(dist, "body"),
    );
    Ok(b.push(iff(d, b.rhs(lifted)), trans(joined, lifted)))
}

fn step_block(b: &mut Builder, s: &AuStep) -> Result<usize, GenError> {
    let replayed = s.replay().map_err(GenError::TraceCorrupt)?;
    if replayed != s.after {
        return Err(GenError::TraceCorrupt(format!("step {}: recorded after-state differs", s.index)));
    }
    let before = &s.before;
    let z = &s.selected.z;
    let f = &s.symbol.name;
    let zs = &s.fresh;
    let xs = before.binders();
    let ys = s.after.binders();
    let t = embed_term(&before.t);
    let t_after = embed_term(&s.after.t);
    let us: Vec<Pattern> = s.left_args.iter().map(embed_term).collect();
    let vs: Vec<Pattern> = s.right_args.iter().map(embed_term).collect();

    let c1 = side_constraint(&before.pairs, true);
    let c2 = side_constraint(&before.pairs, false);
    let mut rest = before.pairs.clone();
    rest.remove(s.position);
    let phi1 = side_constraint(&rest, true);
    let phi2 = side_constraint(&rest, false);

    let dec_line = dec(b, &phi1, &phi2, z, f, &us, &vs, zs)?;

    let fz = applied(f, zs.iter().map(var));
    let ez = eq(var(z), fz);
    let d = or(
        and(phi1.clone(), eq(var(z), applied(f, us.iter().cloned()))),
        and(phi2.clone(), eq(var(z), applied(f, vs.iter().cloned()))),
    );
    let q = or(and(phi1.clone(), equalities(zs, &us)), and(phi2.clone(), equalities(zs, &vs)));
    let r = exists(zs.clone(), and(ez.clone(), q.clone()));
    let cs = or(c1, c2);
    let before_p = encode_problem(before);
    let after_p = encode_problem(&s.after);

    // constraint rewritten into Dec's shape and lifted under ∃x̄
    let reorder = b.push(iff(cs.clone(), d), prop(vec![]));
    let to_r = b.push(iff(cs.clone(), r.clone()), trans(reorder, dec_line));
    let lift = b.push(
        iff(exists(xs.clone(), and(t.clone(), cs)), exists(xs.clone(), and(t.clone(), r.clone()))),
        ctx(to_r, "right"),
    );
    let m = and(t.clone(), and(ez.clone(), q.clone()));
    let pull = b.push(
        iff(and(t.clone(), r.clone()), exists(zs.clone(), m.clone())),
        Justification::new(Rule::ExistsScope, vec![]),
    );
    let nested = exists(xs.clone(), exists(zs.clone(), m.clone()));
    let pulled = b.push(iff(exists(xs.clone(), and(t.clone(), r)), nested.clone()), ctx(pull, "body"));
    let merged = b.push(iff(before_p.clone(), nested.clone()), trans(lift, pulled));

    // isolate ∃z. t ∧ z=f z̄ next to the remaining constraint
    let tz = and(t.clone(), ez.clone());
    let m2 = and(tz.clone(), q.clone());
    let zb = vec![z.clone()];
    let assoc = b.push(iff(m.clone(), m2.clone()), prop(vec![]));
    let assoc_z = b.push(iff(exists(zb.clone(), m.clone()), exists(zb.clone(), m2.clone())), ctx(assoc, "body"));
    let ez_t = exists(zb.clone(), tz.clone());
    let narrowed = b.push(
        iff(exists(zb.clone(), m2), and(ez_t.clone(), q.clone())),
        Justification::new(Rule::ExistsScope, vec![]),
    );
    let isolated = b.push(iff(exists(zb.clone(), m), and(ez_t.clone(), q.clone())), trans(assoc_z, narrowed));
    // binder split: ∃{x̄,z̄} becomes ∃ȳ.∃z with ȳ = x̄ where z is replaced by z̄
    let regrouped = exists(ys.clone(), and(ez_t.clone(), q.clone()));
    let split = b.push(iff(nested, regrouped.clone()), ctx(isolated, "split"));
    let grouped = b.push(iff(before_p.clone(), regrouped.clone()), trans(merged, split));

    // ∃z. t ∧ z=f z̄  ↔  t[f z̄/z]
    let subst = b.push(
        exists(zb.clone(), iff(tz.clone(), t_after.clone())),
        Justification::new(Rule::ExistsSubst, vec![]).with("var", z.as_str()),
    );
    let scope = b.push(
        iff(exists(zb.clone(), iff(tz, t_after.clone())), iff(ez_t.clone(), t_after.clone())),
        Justification::new(Rule::ExistsScope, vec![]),
    );
    let collapsed = b.push(iff(ez_t, t_after.clone()), Justification::new(Rule::ModusPonens, vec![subst, scope]));
    let instantiated = exists(ys.clone(), and(t_after.clone(), q.clone()));
    let inst = b.push(iff(regrouped, instantiated.clone()), ctx(collapsed, "left"));
    let reached = b.push(iff(before_p.clone(), instantiated), trans(grouped, inst));

    // restore the pair order of the after-state
    let after_body = match &after_p {
        Pattern::Exists(_, body) => (**body).clone(),
        p => p.clone(),
    };
    let sorted = b.push(iff(and(t_after, q), after_body), prop(vec![]));
    let closed = b.push(iff(b.rhs(inst), after_p.clone()), ctx(sorted, "body"));
    Ok(b.push(iff(before_p, after_p), trans(reached, closed)))
}

/// The 12-line `∨gen` block: `t1 ∨ t2 ↔ ∃z. z ∧ (z=t1 ∨ z=t2)`.
pub fn gen_or_gen(t1: &Pattern, t2: &Pattern, z: &Name) -> Result<Vec<ProofLine>, GenError> {
    if t1.free_vars().contains(z) || t2.free_vars().contains(z) {
        return Err(GenError::FreshnessViolation(format!("`{z}` occurs in the inputs")));
    }
    let mut b = Builder::new("1");
    or_gen(&mut b, t1, t2, z);
    Ok(b.lines)
}

/// The 4-line `∃-Gen′` expansion.
pub fn gen_exists_gen_prime(
    phi: &Pattern,
    z: &Name,
    f: &Name,
    args: &[Pattern],
    fresh: &[Name],
) -> Result<Vec<ProofLine>, GenError> {
    let mut b = Builder::new("gen");
    exists_gen_prime(&mut b, phi, z, f, args, fresh)?;
    Ok(b.lines)
}

/// The 14-line `Dec` expansion.
#[allow(clippy::too_many_arguments)]
pub fn gen_dec(
    phi1: &Pattern,
    phi2: &Pattern,
    z: &Name,
    f: &Name,
    us: &[Pattern],
    vs: &[Pattern],
    fresh: &[Name],
) -> Result<Vec<ProofLine>, GenError> {
    let mut b = Builder::new("dec");
    dec(&mut b, phi1, phi2, z, f, us, vs, fresh)?;
    Ok(b.lines)
}

/// One step block, ending in `enc(before) ↔ enc(after)`.
pub fn gen_step(s: &AuStep) -> Result<Vec<ProofLine>, GenError> {
    let mut b = Builder::new(&format!("2.{}", s.index + 1));
    step_block(&mut b, s)?;
    Ok(b.lines)
}

/// Full certificate for `t1 ∨ t2 ↔ enc(solved)`.
pub fn gen_full(r: &AuResult) -> Result<ProofObject, GenError> {
    let t1 = embed_term(&r.t1);
    let t2 = embed_term(&r.t2);
    let z = &r.initial.pairs[0].z;
    let mut b = Builder::new("1");
    let mut last = or_gen(&mut b, &t1, &t2, z);
    let mut ends = Vec::with_capacity(r.steps.len());
    for s in &r.steps {
        b.block = format!("2.{}", s.index + 1);
        ends.push(step_block(&mut b, s)?);
    }
    let lhs = or(t1, t2);
    for (i, end) in ends.into_iter().enumerate() {
        b.block = format!("3.{}", i + 1);
        last = b.push(iff(lhs.clone(), b.rhs(end)), trans(last, end));
    }
    let goal = iff(lhs, encode_problem(&r.solved));
    debug_assert_eq!(b.pattern(last), &goal);
    let mut symbols: Vec<(Name, usize)> = r
        .t1
        .symbols()
        .into_iter()
        .chain(r.t2.symbols())
        .map(|s| (s.name, s.arity))
        .collect();
    symbols.sort();
    symbols.dedup();
    Ok(ProofObject { symbols, goal, lines: b.lines })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antiunify::antiunify;
    use crate::term::{parse_term, Signature, Term};

    fn t(s: &str) -> Term {
        let mut sig = Signature::new(["x1", "x2", "l1", "l2", "x"], ["cons", "succ", "zero", "nil"]).unwrap();
        parse_term(s, &mut sig).unwrap()
    }

    #[test]
    fn sizes_follow_constants() {
        let r = antiunify(&t("cons(succ(x1),cons(zero,l1))"), &t("cons(x2,cons(succ(x2),l2))"));
        let po = gen_full(&r).unwrap();
        assert_eq!(po.lines.len(), proof_lines(2));
        assert_eq!(po.lines.len(), 82);
        assert_eq!(gen_step(&r.steps[0]).unwrap().len(), STEP_LINES);
        let r = antiunify(&t("zero"), &t("zero"));
        assert_eq!(gen_full(&r).unwrap().lines.len(), proof_lines(1));
    }

    #[test]
    fn or_gen_conclusion() {
        let zero = embed_term(&t("zero"));
        let lines = gen_or_gen(&zero, &zero, &"z0".into()).unwrap();
        assert_eq!(lines.len(), OR_GEN_LINES);
        assert_eq!(
            lines.last().unwrap().pattern.to_string(),
            "zero \\/ zero <-> E{z0}. z0 /\\ (z0 = zero \\/ z0 = zero)"
        );
        assert!(gen_or_gen(&embed_term(&t("x")), &zero, &"x".into()).is_err());
    }

    #[test]
    fn sub_schema_errors() {
        let top = Pattern::Top;
        let us = [embed_term(&t("x"))];
        assert!(matches!(
            gen_exists_gen_prime(&top, &"z".into(), &"succ".into(), &us, &["x".into()]),
            Err(GenError::FreshnessViolation(_))
        ));
        assert!(matches!(
            gen_dec(&top, &top, &"z".into(), &"succ".into(), &us, &[], &["y".into()]),
            Err(GenError::BranchMismatch(_))
        ));
        assert_eq!(gen_dec(&top, &top, &"z".into(), &"succ".into(), &us, &us, &["y".into()]).unwrap().len(), DEC_LINES);
        let nullary = gen_exists_gen_prime(&top, &"z".into(), &"zero".into(), &[], &[]).unwrap();
        assert_eq!(nullary[0].pattern.to_string(), "z = zero <-> z = zero /\\ _T_");
    }

    #[test]
    fn corrupt_trace_rejected() {
        let r = antiunify(&t("succ(zero)"), &t("succ(x)"));
        let mut s = r.steps[0].clone();
        s.fresh = vec!["q".into(), "w".into()];
        assert!(matches!(gen_step(&s), Err(GenError::TraceCorrupt(_))));
    }
}
