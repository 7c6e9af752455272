//! Antiunification problems as matching-logic patterns:
//! `∃z̄. t ∧ (φ^σ1 ∨ φ^σ2)`, where `φ^σ` is the conjunction of `z = σ(z)`.

use std::collections::BTreeSet;

use crate::antiunify::{AuPair, AuProblem};
use crate::pattern::{and, conj, embed_term, eq, exists, or, Pattern};
use crate::term::{Name, Substitution};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("variable order does not enumerate the substitution domain")]
    OrderMismatch,
}

/// Right-associated conjunction of `x = s(x)` in the given order; `⊤` if empty.
pub fn encode_subst(s: &Substitution, order: &[Name]) -> Result<Pattern, EncodeError> {
    let listed: BTreeSet<Name> = order.iter().cloned().collect();
    if listed.len() != order.len() || listed != s.domain() {
        return Err(EncodeError::OrderMismatch);
    }
    Ok(conj(order.iter().map(|x| {
        eq(Pattern::EVar(x.clone()), embed_term(s.get(x.as_str()).expect("in domain")))
    })))
}

/// Constraint of one side of the pair list: `left` picks `u` in `z ↦ u ⊔ v`.
pub fn side_constraint(pairs: &[AuPair], left: bool) -> Pattern {
    conj(pairs.iter().map(|p| {
        let side = if left { &p.left } else { &p.right };
        eq(Pattern::EVar(p.z.clone()), embed_term(side))
    }))
}

/// `∃z̄. t ∧ (C1 ∨ C2)`; with no pairs this is just `t`.
pub fn encode_problem(p: &AuProblem) -> Pattern {
    let t = embed_term(&p.t);
    if p.pairs.is_empty() {
        return t;
    }
    let body = and(t, or(side_constraint(&p.pairs, true), side_constraint(&p.pairs, false)));
    exists(p.binders(), body)
}
