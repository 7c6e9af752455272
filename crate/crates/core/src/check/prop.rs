//! Propositional tautology checking over abstracted skeletons.
//!
//! Every maximal subpattern that is not a propositional connective becomes an
//! atom; atoms are identified modulo alpha-equivalence. Small skeletons are
//! decided by truth table, larger ones by an invertible sequent calculus.

use std::collections::HashMap;

use crate::pattern::{alpha_eq, alpha_hash, Pattern};

/// Atoms at or below this count are decided by truth table.
pub const TRUTH_TABLE_MAX_ATOMS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Node {
    Atom(u32),
    True,
    False,
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
    Imp(u32, u32),
    Iff(u32, u32),
}

#[derive(Default)]
pub(crate) struct Skeleton<'a> {
    pub(crate) nodes: Vec<Node>,
    atoms: Vec<&'a Pattern>,
    buckets: HashMap<u64, Vec<u32>>,
}

impl<'a> Skeleton<'a> {
    pub(crate) fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    fn node(&mut self, n: Node) -> u32 {
        self.nodes.push(n);
        (self.nodes.len() - 1) as u32
    }

    fn atom(&mut self, p: &'a Pattern) -> u32 {
        let h = alpha_hash(p);
        let bucket = self.buckets.entry(h).or_default();
        let id = match bucket.iter().find(|&&i| alpha_eq(self.atoms[i as usize], p)) {
            Some(&i) => i,
            None => {
                let i = self.atoms.len() as u32;
                self.atoms.push(p);
                bucket.push(i);
                i
            }
        };
        self.node(Node::Atom(id))
    }

    pub(crate) fn add(&mut self, p: &'a Pattern) -> u32 {
        let n = match p {
            Pattern::Top => Node::True,
            Pattern::Bot => Node::False,
            Pattern::Not(a) => Node::Not(self.add(a)),
            Pattern::And(a, b) => Node::And(self.add(a), self.add(b)),
            Pattern::Or(a, b) => Node::Or(self.add(a), self.add(b)),
            Pattern::Implies(a, b) => Node::Imp(self.add(a), self.add(b)),
            Pattern::Iff(a, b) => Node::Iff(self.add(a), self.add(b)),
            _ => return self.atom(p),
        };
        self.node(n)
    }

    #[cfg(test)]
    pub(crate) fn raw(nodes: Vec<Node>, atoms: usize) -> Skeleton<'static> {
        static TOP: Pattern = Pattern::Top;
        Skeleton { nodes, atoms: vec![&TOP; atoms], buckets: HashMap::new() }
    }
}

fn eval(nodes: &[Node], n: u32, bits: u64) -> bool {
    match nodes[n as usize] {
        Node::Atom(a) => bits >> a & 1 == 1,
        Node::True => true,
        Node::False => false,
        Node::Not(a) => !eval(nodes, a, bits),
        Node::And(a, b) => eval(nodes, a, bits) && eval(nodes, b, bits),
        Node::Or(a, b) => eval(nodes, a, bits) || eval(nodes, b, bits),
        Node::Imp(a, b) => !eval(nodes, a, bits) || eval(nodes, b, bits),
        Node::Iff(a, b) => eval(nodes, a, bits) == eval(nodes, b, bits),
    }
}

pub(crate) fn truth_table(s: &Skeleton, root: u32) -> bool {
    assert!(s.atom_count() < 64);
    (0..1u64 << s.atom_count()).all(|bits| eval(&s.nodes, root, bits))
}

/// Proof search in a G3-style sequent calculus; all rules are invertible, so
/// failure on any branch means the sequent is not valid.
pub(crate) fn sequent(s: &Skeleton, root: u32) -> bool {
    let mut st = Sequent {
        pending_l: Vec::new(),
        pending_r: vec![root],
        deferred_l: Vec::new(),
        deferred_r: Vec::new(),
        atoms_l: vec![false; s.atom_count()],
        atoms_r: vec![false; s.atom_count()],
    };
    st.prove(&s.nodes)
}

#[derive(Clone)]
struct Sequent {
    pending_l: Vec<u32>,
    pending_r: Vec<u32>,
    deferred_l: Vec<u32>,
    deferred_r: Vec<u32>,
    atoms_l: Vec<bool>,
    atoms_r: Vec<bool>,
}

impl Sequent {
    /// Three-valued value under the partial assignment: atoms on the left
    /// are true, atoms on the right false, the rest unknown.
    fn value(&self, nodes: &[Node], n: u32) -> Option<bool> {
        match nodes[n as usize] {
            Node::Atom(a) => {
                if self.atoms_l[a as usize] {
                    Some(true)
                } else if self.atoms_r[a as usize] {
                    Some(false)
                } else {
                    None
                }
            }
            Node::True => Some(true),
            Node::False => Some(false),
            Node::Not(a) => self.value(nodes, a).map(|v| !v),
            Node::And(a, b) => match self.value(nodes, a) {
                Some(false) => Some(false),
                va => match (va, self.value(nodes, b)) {
                    (_, Some(false)) => Some(false),
                    (Some(true), Some(true)) => Some(true),
                    _ => None,
                },
            },
            Node::Or(a, b) => match self.value(nodes, a) {
                Some(true) => Some(true),
                va => match (va, self.value(nodes, b)) {
                    (_, Some(true)) => Some(true),
                    (Some(false), Some(false)) => Some(false),
                    _ => None,
                },
            },
            Node::Imp(a, b) => match self.value(nodes, a) {
                Some(false) => Some(true),
                va => match (va, self.value(nodes, b)) {
                    (_, Some(true)) => Some(true),
                    (Some(true), Some(false)) => Some(false),
                    _ => None,
                },
            },
            Node::Iff(a, b) => Some(self.value(nodes, a)? == self.value(nodes, b)?),
        }
    }

    fn prove(&mut self, nodes: &[Node]) -> bool {
        loop {
            while let Some(n) = self.pending_l.pop() {
                match nodes[n as usize] {
                    Node::Atom(a) => {
                        if self.atoms_r[a as usize] {
                            return true;
                        }
                        self.atoms_l[a as usize] = true;
                    }
                    Node::True => {}
                    Node::False => return true,
                    Node::Not(a) => self.pending_r.push(a),
                    Node::And(a, b) => self.pending_l.extend([a, b]),
                    Node::Or(..) | Node::Imp(..) | Node::Iff(..) => self.deferred_l.push(n),
                }
            }
            while let Some(n) = self.pending_r.pop() {
                match nodes[n as usize] {
                    Node::Atom(a) => {
                        if self.atoms_l[a as usize] {
                            return true;
                        }
                        self.atoms_r[a as usize] = true;
                    }
                    Node::True => return true,
                    Node::False => {}
                    Node::Not(a) => self.pending_l.push(a),
                    Node::Or(a, b) => self.pending_r.extend([a, b]),
                    Node::Imp(a, b) => {
                        self.pending_l.push(a);
                        self.pending_r.push(b);
                    }
                    Node::And(..) | Node::Iff(..) => self.deferred_r.push(n),
                }
            }
            if !self.pending_l.is_empty() {
                continue;
            }
            break;
        }
        // formulas already decided by the atoms seen so far close the branch or drop out
        let mut i = 0;
        while i < self.deferred_l.len() {
            match self.value(nodes, self.deferred_l[i]) {
                Some(false) => return true,
                Some(true) => {
                    self.deferred_l.swap_remove(i);
                }
                None => i += 1,
            }
        }
        let mut i = 0;
        while i < self.deferred_r.len() {
            match self.value(nodes, self.deferred_r[i]) {
                Some(true) => return true,
                Some(false) => {
                    self.deferred_r.swap_remove(i);
                }
                None => i += 1,
            }
        }
        let (left, n) = if let Some(n) = self.deferred_l.pop() {
            (true, n)
        } else if let Some(n) = self.deferred_r.pop() {
            (false, n)
        } else {
            return false;
        };
        let mut other = self.clone();
        match (left, nodes[n as usize]) {
            (true, Node::Or(a, b)) => {
                self.pending_l.push(a);
                other.pending_l.push(b);
            }
            (true, Node::Imp(a, b)) => {
                self.pending_r.push(a);
                other.pending_l.push(b);
            }
            (true, Node::Iff(a, b)) => {
                self.pending_l.extend([a, b]);
                other.pending_r.extend([a, b]);
            }
            (false, Node::And(a, b)) => {
                self.pending_r.push(a);
                other.pending_r.push(b);
            }
            (false, Node::Iff(a, b)) => {
                self.pending_l.push(a);
                self.pending_r.push(b);
                other.pending_l.push(b);
                other.pending_r.push(a);
            }
            _ => unreachable!("only branching connectives are deferred"),
        }
        self.prove(nodes) && other.prove(nodes)
    }
}

/// True iff `premises → conclusion` is a propositional tautology after
/// abstracting non-propositional subpatterns to atoms.
pub fn is_tautology(premises: &[&Pattern], conclusion: &Pattern) -> bool {
    let mut s = Skeleton::default();
    let c = s.add(conclusion);
    let root = premises.iter().rev().fold(c, |acc, p| {
        let h = s.add(p);
        s.node(Node::Imp(h, acc))
    });
    if s.atom_count() <= TRUTH_TABLE_MAX_ATOMS {
        truth_table(&s, root)
    } else {
        sequent(&s, root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::parse_pattern;
    use proptest::prelude::*;

    fn p(s: &str) -> Pattern {
        parse_pattern(s, &["zero", "succ"]).unwrap()
    }

    #[test]
    fn examples() {
        assert!(is_tautology(&[], &p("a \\/ ~a")));
        assert!(!is_tautology(&[], &p("a \\/ b")));
        assert!(is_tautology(&[], &p("(a /\\ b \\/ a /\\ c) <-> a /\\ (b \\/ c)")));
        assert!(is_tautology(&[&p("a <-> b")], &p("c /\\ a <-> c /\\ b")));
        assert!(is_tautology(&[], &p("_T_ /\\ x = zero <-> x = zero")));
        // atoms modulo alpha
        assert!(is_tautology(&[], &p("(E{x}. x = y) -> E{w}. w = y")));
        assert!(!is_tautology(&[], &p("(E{x}. x = y) -> E{w}. w = x")));
    }

    #[test]
    fn large_skeleton_uses_sequents() {
        let n = 40;
        let conj = |vars: &mut dyn Iterator<Item = usize>| {
            vars.map(|i| format!("a{i} = succ(b{i})")).collect::<Vec<_>>().join(" /\\ ")
        };
        let fwd = conj(&mut (0..n));
        let rev = conj(&mut (0..n).rev());
        assert!(is_tautology(&[], &p(&format!("({fwd}) <-> ({rev})"))));
        let short = conj(&mut (1..n));
        assert!(!is_tautology(&[], &p(&format!("({short}) -> ({fwd})"))));
    }

    fn arb_nodes() -> impl Strategy<Value = (Vec<Node>, u32)> {
        // random DAG: each node refers only to earlier nodes
        (1usize..40).prop_flat_map(|len| {
            prop::collection::vec((0u8..8, 0u32..1000, 0u32..1000), len).prop_map(move |raw| {
                let mut nodes = Vec::new();
                for (k, a, b) in raw {
                    let i = nodes.len() as u32;
                    let (a, b) = if i == 0 { (0, 0) } else { (a % i, b % i) };
                    let n = match (i, k) {
                        (0, _) | (_, 0) | (_, 1) => Node::Atom(a % 6),
                        (_, 2) => Node::Not(a),
                        (_, 3) => Node::And(a, b),
                        (_, 4) => Node::Or(a, b),
                        (_, 5) => Node::Imp(a, b),
                        (_, 6) => Node::Iff(a, b),
                        _ => {
                            if a % 2 == 0 {
                                Node::True
                            } else {
                                Node::False
                            }
                        }
                    };
                    nodes.push(n);
                }
                let root = nodes.len() as u32 - 1;
                (nodes, root)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]
        #[test]
        fn deciders_agree((nodes, root) in arb_nodes()) {
            let s = Skeleton::raw(nodes, 6);
            prop_assert_eq!(truth_table(&s, root), sequent(&s, root));
        }
    }
}
