//! Seeded random term pairs and synthetic configuration-shaped inputs.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::term::{Name, Symbol, Term};

pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symbols and variables to draw from.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    pub symbols: Vec<Symbol>,
    pub variables: Vec<Name>,
}

impl Vocabulary {
    pub fn new(symbols: &[(&str, usize)], variables: &[&str]) -> Self {
        Vocabulary {
            symbols: symbols.iter().map(|&(n, a)| Symbol::new(n, a)).collect(),
            variables: variables.iter().map(|&v| Name::from(v)).collect(),
        }
    }

    /// `zero/0, nil/0, succ/1, cons/2` over `x, y`.
    pub fn small() -> Self {
        Vocabulary::new(&[("zero", 0), ("nil", 0), ("succ", 1), ("cons", 2)], &["x", "y"])
    }

    fn constants(&self) -> Vec<&Symbol> {
        self.symbols.iter().filter(|s| s.arity == 0).collect()
    }
}

/// A random term with exactly `size` nodes when the vocabulary allows it.
pub fn random_term(rng: &mut CorpusRng, voc: &Vocabulary, size: usize) -> Term {
    let leaf = |rng: &mut CorpusRng| {
        let consts = voc.constants();
        if !voc.variables.is_empty() && (consts.is_empty() || rng.gen_bool(0.4)) {
            Term::Var(voc.variables.choose(rng).expect("non-empty").clone())
        } else {
            let c = consts.choose(rng).expect("vocabulary needs a leaf");
            Term::App((*c).clone(), Vec::new())
        }
    };
    if size <= 1 {
        return leaf(rng);
    }
    let fits: Vec<&Symbol> = voc.symbols.iter().filter(|s| s.arity >= 1 && s.arity < size).collect();
    let Some(f) = fits.choose(rng) else {
        return leaf(rng);
    };
    let mut budget = vec![1usize; f.arity];
    for _ in 0..size - 1 - f.arity {
        budget[rng.gen_range(0..f.arity)] += 1;
    }
    Term::App((*f).clone(), budget.into_iter().map(|b| random_term(rng, voc, b)).collect())
}

/// Replaces each subterm with probability `p` by a fresh random term of
/// similar size, keeping most head symbols shared.
pub fn mutate(rng: &mut CorpusRng, voc: &Vocabulary, t: &Term, p: f64) -> Term {
    if rng.gen_bool(p) {
        let size = rng.gen_range(1..=t.size().clamp(1, 4));
        return random_term(rng, voc, size);
    }
    match t {
        Term::Var(_) => t.clone(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| mutate(rng, voc, a, p)).collect()),
    }
}

/// A pair whose first component has `size` nodes; the second is either a
/// light mutation of the first or independent.
pub fn random_pair(rng: &mut CorpusRng, voc: &Vocabulary, size: usize) -> (Term, Term) {
    let t1 = random_term(rng, voc, size);
    let t2 = if rng.gen_bool(0.8) {
        let p = rng.gen_range(0.02..0.3);
        mutate(rng, voc, &t1, p)
    } else {
        let other = rng.gen_range(1..=size.max(1));
        random_term(rng, voc, other)
    };
    (t1, t2)
}

/// Pair whose antiunification takes exactly `k` decomposition steps, built
/// from a unary/binary spine with a differing leaf at the end.
pub fn step_family(k: usize) -> (Term, Term) {
    let mut a = Term::constant("zero");
    let mut b = Term::var("x");
    for i in 0..k {
        if i % 3 == 2 {
            // binary node whose second argument heads differ immediately
            a = Term::app("cons", vec![a, Term::constant("nil")]);
            b = Term::app("cons", vec![b, Term::var("y")]);
        } else {
            a = Term::app("succ", vec![a]);
            b = Term::app("succ", vec![b]);
        }
    }
    (a, b)
}

const CONFIG_SYMBOLS: &[(&str, usize)] = &[
    ("cfg", 4),
    ("k", 1),
    ("kseq", 2),
    ("env", 1),
    ("store", 1),
    ("map", 2),
    ("bind", 2),
    ("loc", 1),
    ("block", 1),
    ("stmts", 2),
    ("assign", 2),
    ("ite", 3),
    ("loop", 2),
    ("call", 2),
    ("args", 2),
    ("plus", 2),
    ("lt", 2),
    ("ident", 1),
    ("int", 1),
    ("succ", 1),
    ("zero", 0),
    ("nil", 0),
    ("skip", 0),
    ("unit", 0),
    ("dot", 0),
];

/// Configuration-shaped pair: a term of roughly `nodes` nodes and a copy
/// where a few positions were replaced by variables or other constructs.
pub fn config_pair(seed: u64, nodes: usize, mutations: usize) -> (Term, Term) {
    let mut r = rng(seed);
    let voc = Vocabulary::new(CONFIG_SYMBOLS, &[]);
    let sub = |r: &mut CorpusRng, n: usize| random_term(r, &voc, n.max(1));
    let quarter = nodes.saturating_sub(5) / 4;
    let t1 = Term::app(
        "cfg",
        vec![
            Term::app("k", vec![sub(&mut r, quarter)]),
            Term::app("env", vec![sub(&mut r, quarter)]),
            Term::app("store", vec![sub(&mut r, quarter)]),
            sub(&mut r, nodes.saturating_sub(5 + 3 * quarter)),
        ],
    );
    let vars: Vec<Term> = (0..mutations).map(|i| Term::var(format!("v{i}"))).collect();
    let mut positions = Vec::new();
    collect_positions(&t1, &mut Vec::new(), &mut positions);
    positions.retain(|p| p.len() >= 3);
    let mut chosen: Vec<Vec<usize>> = Vec::new();
    positions.shuffle(&mut r);
    for p in positions {
        if chosen.len() == mutations {
            break;
        }
        if chosen.iter().all(|c| !p.starts_with(c) && !c.starts_with(&p)) {
            chosen.push(p);
        }
    }
    let mut t2 = t1.clone();
    for (i, p) in chosen.iter().enumerate() {
        t2 = replace_at(&t2, p, &vars[i]);
    }
    (t1, t2)
}

fn collect_positions(t: &Term, here: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(here.clone());
    for (i, a) in t.args().iter().enumerate() {
        here.push(i);
        collect_positions(a, here, out);
        here.pop();
    }
}

fn replace_at(t: &Term, pos: &[usize], by: &Term) -> Term {
    match (pos.split_first(), t) {
        (None, _) => by.clone(),
        (Some((&i, rest)), Term::App(f, args)) => {
            let mut args = args.clone();
            args[i] = replace_at(&args[i], rest, by);
            Term::App(f.clone(), args)
        }
        (Some(_), Term::Var(_)) => t.clone(),
    }
}

/// About 130 nodes, emulating a C-semantics configuration.
pub fn c_like() -> (Term, Term) {
    config_pair(0xC, 130, 6)
}

/// About 65 nodes, emulating a Java-semantics configuration.
pub fn java_like() -> (Term, Term) {
    config_pair(0x1A7A, 65, 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antiunify::antiunify;

    #[test]
    fn sizes_are_exact() {
        let mut r = rng(1);
        let voc = Vocabulary::small();
        for size in 1..60 {
            assert_eq!(random_term(&mut r, &voc, size).size(), size);
        }
    }

    #[test]
    fn family_has_k_steps() {
        for k in 0..20 {
            let (a, b) = step_family(k);
            assert_eq!(antiunify(&a, &b).steps.len(), k);
        }
    }

    #[test]
    fn config_sizes() {
        let (a, b) = c_like();
        assert!((120..=140).contains(&a.size()), "{}", a.size());
        assert_ne!(a, b);
        let (a, _) = java_like();
        assert!((55..=75).contains(&a.size()), "{}", a.size());
    }

    #[test]
    fn deterministic() {
        let voc = Vocabulary::small();
        let a = random_pair(&mut rng(7), &voc, 30);
        let b = random_pair(&mut rng(7), &voc, 30);
        assert_eq!(a, b);
    }
}
