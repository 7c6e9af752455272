//! Brute-force semantic validation over a depth-bounded ground term model.
//!
//! Patterns denote sets of ground terms of depth at most `d`. Term patterns
//! denote the singleton of their instance (or nothing when the instance is
//! too deep), equalities are predicates (everything or nothing), `∃` ranges
//! over the universe and connectives are set operations. The check is bounded
//! and therefore weaker than validity in the full term model.

use std::collections::{BTreeSet, HashMap};

use crate::exec::Exec;
use crate::pattern::Pattern;
use crate::term::{Name, Symbol, Term};

pub const DEFAULT_DEPTH: usize = 3;
pub const MAX_DEPTH: usize = 5;
/// Largest universe that will be materialized.
pub const MAX_UNIVERSE: usize = 1 << 21;
/// Constructor tables larger than this fall back to hashing.
const DENSE_LIMIT: usize = 1 << 22;
const OUT: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("unsupported construct: {0}")]
    UnsupportedConstruct(String),
    #[error("depth {0} outside 1..={MAX_DEPTH}")]
    BadDepth(usize),
    #[error("universe exceeds {MAX_UNIVERSE} terms")]
    UniverseTooLarge,
    #[error("universe is empty: the signature has no constants")]
    EmptyUniverse,
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(Name),
}

enum Table {
    Dense(Vec<u32>),
    Sparse(HashMap<Box<[u32]>, u32>),
}

/// All ground terms of depth at most `depth` (constants have depth 1).
pub struct GroundUniverse {
    symbols: Vec<Symbol>,
    depth: usize,
    /// `(symbol index, argument indices)` for each element.
    elems: Vec<(u32, Box<[u32]>)>,
    tables: Vec<Table>,
    sym_index: HashMap<Name, u32>,
    words: usize,
}

impl GroundUniverse {
    pub fn new(symbols: &[Symbol], depth: usize) -> Result<Self, SemanticsError> {
        if depth == 0 || depth > MAX_DEPTH {
            return Err(SemanticsError::BadDepth(depth));
        }
        let mut elems: Vec<(u32, Box<[u32]>)> = Vec::new();
        // new terms at level d use at least one argument first built at level d-1
        let mut prev_start = 0usize;
        for level in 1..=depth {
            let level_start = elems.len();
            for (si, s) in symbols.iter().enumerate() {
                if level == 1 {
                    if s.arity == 0 {
                        elems.push((si as u32, Box::new([])));
                    }
                    continue;
                }
                let avail = level_start as u32;
                if s.arity == 0 || avail == 0 {
                    continue;
                }
                let mut args = vec![0u32; s.arity];
                'odometer: loop {
                    if args.iter().any(|&a| (a as usize) >= prev_start) {
                        elems.push((si as u32, args.clone().into_boxed_slice()));
                        if elems.len() > MAX_UNIVERSE {
                            return Err(SemanticsError::UniverseTooLarge);
                        }
                    }
                    for a in args.iter_mut() {
                        *a += 1;
                        if *a < avail {
                            continue 'odometer;
                        }
                        *a = 0;
                    }
                    break;
                }
            }
            prev_start = level_start;
        }
        if elems.is_empty() {
            return Err(SemanticsError::EmptyUniverse);
        }
        let n = elems.len();
        let mut tables: Vec<Table> = symbols
            .iter()
            .map(|s| match n.checked_pow(s.arity as u32) {
                Some(size) if size <= DENSE_LIMIT => Table::Dense(vec![OUT; size]),
                _ => Table::Sparse(HashMap::new()),
            })
            .collect();
        for (id, (s, args)) in elems.iter().enumerate() {
            match &mut tables[*s as usize] {
                Table::Dense(v) => v[dense_index(args, n)] = id as u32,
                Table::Sparse(m) => {
                    m.insert(args.clone(), id as u32);
                }
            }
        }
        Ok(GroundUniverse {
            symbols: symbols.to_vec(),
            depth,
            elems,
            tables,
            sym_index: symbols.iter().enumerate().map(|(i, s)| (s.name.clone(), i as u32)).collect(),
            words: n.div_ceil(64),
        })
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn term(&self, i: u32) -> Term {
        let (s, args) = &self.elems[i as usize];
        Term::App(self.symbols[*s as usize].clone(), args.iter().map(|&a| self.term(a)).collect())
    }

    pub fn index_of(&self, t: &Term) -> Option<u32> {
        match t {
            Term::Var(_) => None,
            Term::App(f, args) => {
                let s = *self.sym_index.get(&f.name)?;
                if self.symbols[s as usize].arity != args.len() {
                    return None;
                }
                let args: Option<Vec<u32>> = args.iter().map(|a| self.index_of(a)).collect();
                let id = self.lookup(s, &args?);
                (id != OUT).then_some(id)
            }
        }
    }

    fn lookup(&self, s: u32, args: &[u32]) -> u32 {
        match &self.tables[s as usize] {
            Table::Dense(v) => v[dense_index(args, self.elems.len())],
            Table::Sparse(m) => m.get(args).copied().unwrap_or(OUT),
        }
    }
}

fn dense_index(args: &[u32], n: usize) -> usize {
    args.iter().rev().fold(0, |acc, &a| acc * n + a as usize)
}

/// A set of universe elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Denotation {
    Empty,
    Full,
    One(u32),
    Bits(Box<[u64]>),
}

impl Denotation {
    fn bits(&self, words: usize, n: usize) -> Box<[u64]> {
        match self {
            Denotation::Empty => vec![0; words].into(),
            Denotation::Full => {
                let mut b = vec![u64::MAX; words];
                if n % 64 != 0 {
                    b[words - 1] = (1u64 << (n % 64)) - 1;
                }
                b.into()
            }
            Denotation::One(i) => {
                let mut b = vec![0; words];
                b[*i as usize / 64] |= 1 << (i % 64);
                b.into()
            }
            Denotation::Bits(b) => b.clone(),
        }
    }

    fn normalize(bits: Box<[u64]>, n: usize) -> Denotation {
        let count: u32 = bits.iter().map(|w| w.count_ones()).sum();
        if count == 0 {
            Denotation::Empty
        } else if count as usize == n {
            Denotation::Full
        } else if count == 1 {
            let w = bits.iter().position(|&w| w != 0).expect("one bit");
            Denotation::One((w * 64) as u32 + bits[w].trailing_zeros())
        } else {
            Denotation::Bits(bits)
        }
    }

    pub fn contains(&self, i: u32) -> bool {
        match self {
            Denotation::Empty => false,
            Denotation::Full => true,
            Denotation::One(j) => *j == i,
            Denotation::Bits(b) => b[i as usize / 64] >> (i % 64) & 1 == 1,
        }
    }

    pub fn elements(&self, u: &GroundUniverse) -> Vec<u32> {
        (0..u.len() as u32).filter(|&i| self.contains(i)).collect()
    }
}

/// Term with variables resolved to environment slots.
enum TermIr {
    Slot(usize),
    /// Symbol index; `None` when the arity does not match the signature.
    App(Option<u32>, Vec<TermIr>),
}

enum Ir {
    Term(TermIr),
    Top,
    Bot,
    Not(Box<Ir>),
    And(Box<Ir>, Box<Ir>),
    Or(Box<Ir>, Box<Ir>),
    Implies(Box<Ir>, Box<Ir>),
    Iff(Box<Ir>, Box<Ir>),
    Eq(Box<Ir>, Box<Ir>),
    /// One binder: its slot, the values worth trying, and the body.
    Exists(usize, Cand, Box<Ir>),
}

/// Values of a binder outside the candidate set make the body empty.
enum Cand {
    All,
    Is(TermIr),
    Both(Box<Cand>, Box<Cand>),
    Either(Box<Cand>, Box<Cand>),
}

struct Compiler<'u> {
    u: &'u GroundUniverse,
    scope: Vec<(Name, usize)>,
    slots: usize,
}

impl Compiler<'_> {
    fn slot(&self, x: &Name) -> Option<usize> {
        self.scope.iter().rev().find(|(y, _)| y == x).map(|&(_, s)| s)
    }

    fn term(&self, p: &Pattern) -> Result<Option<TermIr>, SemanticsError> {
        if let Pattern::EVar(x) = p {
            return Ok(Some(TermIr::Slot(self.slot(x).expect("free variables have slots"))));
        }
        let Some((f, args)) = p.spine() else {
            return Ok(None);
        };
        if !matches!(p, Pattern::Sym(_) | Pattern::App(..)) {
            return Ok(None);
        }
        let s = *self.u.sym_index.get(f).ok_or_else(|| SemanticsError::UnknownSymbol(f.clone()))?;
        let mut ir = Vec::with_capacity(args.len());
        for a in &args {
            match self.term(a)? {
                Some(t) => ir.push(t),
                None => return Ok(None),
            }
        }
        let s = (self.u.symbols[s as usize].arity == ir.len()).then_some(s);
        Ok(Some(TermIr::App(s, ir)))
    }

    fn compile(&mut self, p: &Pattern) -> Result<Ir, SemanticsError> {
        if let Some(t) = self.term(p)? {
            return Ok(Ir::Term(t));
        }
        let bin = |c: &mut Self, a: &Pattern, b: &Pattern| -> Result<(Box<Ir>, Box<Ir>), SemanticsError> {
            Ok((Box::new(c.compile(a)?), Box::new(c.compile(b)?)))
        };
        Ok(match p {
            Pattern::Top => Ir::Top,
            Pattern::Bot => Ir::Bot,
            Pattern::Not(a) => Ir::Not(Box::new(self.compile(a)?)),
            Pattern::And(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Ir::And(a, b)
            }
            Pattern::Or(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Ir::Or(a, b)
            }
            Pattern::Implies(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Ir::Implies(a, b)
            }
            Pattern::Iff(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Ir::Iff(a, b)
            }
            Pattern::Eq(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Ir::Eq(a, b)
            }
            Pattern::Exists(xs, body) => {
                let depth = self.scope.len();
                let mut slots = Vec::new();
                for x in xs.iter() {
                    self.scope.push((x.clone(), self.slots));
                    slots.push(self.slots);
                    self.slots += 1;
                }
                // candidates for binder i may only mention binders before it
                let mut cands = Vec::new();
                for (i, x) in xs.iter().enumerate() {
                    let later: BTreeSet<&Name> = xs[i..].iter().collect();
                    cands.push(self.candidates(x, body, &later)?);
                }
                let mut ir = self.compile(body)?;
                self.scope.truncate(depth);
                for (slot, cand) in slots.into_iter().zip(cands).rev() {
                    ir = Ir::Exists(slot, cand, Box::new(ir));
                }
                ir
            }
            Pattern::App(..) => {
                return Err(SemanticsError::UnsupportedConstruct("application of a non-symbol".into()))
            }
            Pattern::Defined(_) => return Err(SemanticsError::UnsupportedConstruct("definedness".into())),
            Pattern::Mu(..) => return Err(SemanticsError::UnsupportedConstruct("mu".into())),
            Pattern::SVar(x) => return Err(SemanticsError::UnsupportedConstruct(format!("set variable #{x}"))),
            Pattern::EVar(_) | Pattern::Sym(_) => unreachable!("term-like"),
        })
    }

    fn candidates(&self, x: &Name, p: &Pattern, unbound: &BTreeSet<&Name>) -> Result<Cand, SemanticsError> {
        Ok(match p {
            Pattern::And(a, b) => match (self.candidates(x, a, unbound)?, self.candidates(x, b, unbound)?) {
                (Cand::All, c) | (c, Cand::All) => c,
                (a, b) => Cand::Both(Box::new(a), Box::new(b)),
            },
            Pattern::Or(a, b) => match (self.candidates(x, a, unbound)?, self.candidates(x, b, unbound)?) {
                (Cand::All, _) | (_, Cand::All) => Cand::All,
                (a, b) => Cand::Either(Box::new(a), Box::new(b)),
            },
            Pattern::Eq(l, r) => {
                let other = match (l.as_ref(), r.as_ref()) {
                    (Pattern::EVar(y), e) if y == x => e,
                    (e, Pattern::EVar(y)) if y == x => e,
                    _ => return Ok(Cand::All),
                };
                if other.free_vars().iter().any(|v| unbound.contains(v)) {
                    return Ok(Cand::All);
                }
                match self.term(other)? {
                    Some(t) => Cand::Is(t),
                    None => Cand::All,
                }
            }
            _ => Cand::All,
        })
    }
}

struct Program {
    ir: Ir,
    slots: usize,
}

fn compile(p: &Pattern, u: &GroundUniverse, free: &[Name]) -> Result<Program, SemanticsError> {
    let mut c = Compiler { u, scope: free.iter().cloned().zip(0..).collect(), slots: free.len() };
    for x in p.free_vars() {
        if c.slot(&x).is_none() {
            return Err(SemanticsError::UnsupportedConstruct(format!("unassigned variable {x}")));
        }
    }
    let ir = c.compile(p)?;
    Ok(Program { ir, slots: c.slots })
}

struct Eval<'u> {
    u: &'u GroundUniverse,
}

impl Eval<'_> {
    fn inst(&self, t: &TermIr, env: &[u32]) -> u32 {
        match t {
            TermIr::Slot(s) => env[*s],
            TermIr::App(None, _) => OUT,
            TermIr::App(Some(f), args) => {
                let mut ids = [0u32; 4];
                let mut big = Vec::new();
                let small = args.len() <= ids.len();
                for (i, a) in args.iter().enumerate() {
                    let v = self.inst(a, env);
                    if v == OUT {
                        return OUT;
                    }
                    if small {
                        ids[i] = v;
                    } else {
                        big.push(v);
                    }
                }
                if small {
                    self.u.lookup(*f, &ids[..args.len()])
                } else {
                    self.u.lookup(*f, &big)
                }
            }
        }
    }

    fn binop(&self, a: Denotation, b: Denotation, f: impl Fn(u64, u64) -> u64) -> Denotation {
        let n = self.u.len();
        let w = self.u.words;
        let (a, b) = (a.bits(w, n), b.bits(w, n));
        let mut out: Box<[u64]> = a.iter().zip(b.iter()).map(|(&x, &y)| f(x, y)).collect();
        if n % 64 != 0 {
            out[w - 1] &= (1u64 << (n % 64)) - 1;
        }
        Denotation::normalize(out, n)
    }

    fn and(&self, a: Denotation, b: Denotation) -> Denotation {
        match (&a, &b) {
            (Denotation::Empty, _) | (_, Denotation::Empty) => Denotation::Empty,
            (Denotation::Full, _) => b,
            (_, Denotation::Full) => a,
            (Denotation::One(i), _) => if b.contains(*i) { a } else { Denotation::Empty },
            (_, Denotation::One(i)) => if a.contains(*i) { b } else { Denotation::Empty },
            _ => self.binop(a, b, |x, y| x & y),
        }
    }

    fn or(&self, a: Denotation, b: Denotation) -> Denotation {
        match (&a, &b) {
            (Denotation::Full, _) | (_, Denotation::Full) => Denotation::Full,
            (Denotation::Empty, _) => b,
            (_, Denotation::Empty) => a,
            (Denotation::One(i), Denotation::One(j)) if i == j => a,
            _ => self.binop(a, b, |x, y| x | y),
        }
    }

    fn not(&self, a: Denotation) -> Denotation {
        match a {
            Denotation::Empty => Denotation::Full,
            Denotation::Full => Denotation::Empty,
            a => self.binop(a, Denotation::Empty, |x, _| !x),
        }
    }

    fn iff(&self, a: Denotation, b: Denotation) -> Denotation {
        match (&a, &b) {
            (Denotation::Full, _) => b,
            (_, Denotation::Full) => a,
            (Denotation::Empty, _) => self.not(b),
            (_, Denotation::Empty) => self.not(a),
            _ => self.binop(a, b, |x, y| !(x ^ y)),
        }
    }

    fn denote(&self, p: &Ir, env: &mut [u32]) -> Denotation {
        match p {
            Ir::Term(t) => match self.inst(t, env) {
                OUT => Denotation::Empty,
                i => Denotation::One(i),
            },
            Ir::Top => Denotation::Full,
            Ir::Bot => Denotation::Empty,
            Ir::Not(a) => {
                let a = self.denote(a, env);
                self.not(a)
            }
            Ir::And(a, b) => {
                let a = self.denote(a, env);
                if a == Denotation::Empty {
                    return a;
                }
                let b = self.denote(b, env);
                self.and(a, b)
            }
            Ir::Or(a, b) => {
                let a = self.denote(a, env);
                if a == Denotation::Full {
                    return a;
                }
                let b = self.denote(b, env);
                self.or(a, b)
            }
            Ir::Implies(a, b) => {
                let a = self.denote(a, env);
                let b = self.denote(b, env);
                let na = self.not(a);
                self.or(na, b)
            }
            Ir::Iff(a, b) => {
                let a = self.denote(a, env);
                let b = self.denote(b, env);
                self.iff(a, b)
            }
            Ir::Eq(a, b) => match (self.denote(a, env), self.denote(b, env)) {
                (Denotation::One(i), Denotation::One(j)) if i == j => Denotation::Full,
                _ => Denotation::Empty,
            },
            Ir::Exists(slot, cand, body) => {
                let mut acc = Denotation::Empty;
                let try_value = |v: u32, acc: &mut Denotation, env: &mut [u32]| {
                    env[*slot] = v;
                    let d = self.denote(body, env);
                    *acc = self.or(std::mem::replace(acc, Denotation::Empty), d);
                    *acc == Denotation::Full
                };
                match cand {
                    Cand::All => {
                        for v in 0..self.u.len() as u32 {
                            if try_value(v, &mut acc, env) {
                                break;
                            }
                        }
                    }
                    c => {
                        let mut vs = Vec::new();
                        self.candidates(c, env, &mut vs);
                        vs.sort_unstable();
                        vs.dedup();
                        for v in vs {
                            if try_value(v, &mut acc, env) {
                                break;
                            }
                        }
                    }
                }
                acc
            }
        }
    }

    /// Appends candidate values; `All` never reaches here below `Either`.
    fn candidates(&self, c: &Cand, env: &[u32], out: &mut Vec<u32>) {
        match c {
            Cand::All => out.extend(0..self.u.len() as u32),
            Cand::Is(t) => match self.inst(t, env) {
                OUT => {}
                v => out.push(v),
            },
            Cand::Either(a, b) => {
                self.candidates(a, env, out);
                self.candidates(b, env, out);
            }
            Cand::Both(a, b) => {
                let start = out.len();
                self.candidates(a, env, out);
                let mut right = Vec::new();
                self.candidates(b, env, &mut right);
                let mut k = start;
                for i in start..out.len() {
                    if right.contains(&out[i]) {
                        out[k] = out[i];
                        k += 1;
                    }
                }
                out.truncate(k);
            }
        }
    }
}

/// Denotation of `p` under `env` (pairs of variable and universe index).
pub fn denote(p: &Pattern, u: &GroundUniverse, env: &[(Name, u32)]) -> Result<Denotation, SemanticsError> {
    let names: Vec<Name> = env.iter().map(|(x, _)| x.clone()).collect();
    let prog = compile(p, u, &names)?;
    let mut slots = vec![0u32; prog.slots];
    for (i, (_, v)) in env.iter().enumerate() {
        slots[i] = *v;
    }
    Ok(Eval { u }.denote(&prog.ir, &mut slots))
}

/// Outcome of an equivalence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Holds { envs: u64 },
    /// An assignment under which the denotations differ.
    Counterexample(Vec<(Name, Term)>),
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        matches!(self, Equivalence::Holds { .. })
    }
}

/// Compares the denotations of `p` and `q` under every assignment of their
/// free variables to universe elements.
pub fn check_equiv(p: &Pattern, q: &Pattern, u: &GroundUniverse) -> Result<Equivalence, SemanticsError> {
    check_equiv_with(p, q, u, Exec::default())
}

pub fn check_equiv_with(
    p: &Pattern,
    q: &Pattern,
    u: &GroundUniverse,
    exec: Exec,
) -> Result<Equivalence, SemanticsError> {
    let mut vars = p.free_vars();
    vars.extend(q.free_vars());
    let vars: Vec<Name> = vars.into_iter().collect();
    let (pp, qp) = (compile(p, u, &vars)?, compile(q, u, &vars)?);
    let n = u.len() as u64;
    let total = n.checked_pow(vars.len() as u32).ok_or(SemanticsError::UniverseTooLarge)?;
    let eval = Eval { u };
    let width = pp.slots.max(qp.slots);
    let decode = |mut i: u64, env: &mut [u32]| {
        for slot in env.iter_mut().take(vars.len()) {
            *slot = (i % n) as u32;
            i /= n;
        }
    };
    let found = exec.find_first(total, |i| {
        let mut env = vec![0u32; width];
        decode(i, &mut env);
        let a = eval.denote(&pp.ir, &mut env);
        let b = eval.denote(&qp.ir, &mut env);
        (a != b).then_some(i)
    });
    Ok(match found {
        None => Equivalence::Holds { envs: total },
        Some(i) => {
            let mut env = vec![0u32; vars.len()];
            decode(i, &mut env);
            Equivalence::Counterexample(vars.into_iter().zip(env).map(|(x, v)| (x, u.term(v))).collect())
        }
    })
}
