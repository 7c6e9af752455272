//! Problem files and the parse → antiunify → generate → check pipeline.
//!
//! ```text
//! variables: x1, x2, l1, l2
//! symbols: cons, succ, zero
//! problem: cons(succ(x1),cons(zero,l1))=?cons(x2,cons(succ(x2),l2))
//! ```

use std::fmt;

use crate::antiunify::{antiunify, AuResult};
use crate::check::{check_proof, Verdict};
use crate::encode::encode_problem;
use crate::exec::Exec;
use crate::generate::{gen_full, GenError};
use crate::pattern::{embed_term, or};
use crate::proof::ProofObject;
use crate::semantics::{check_equiv_with, Equivalence, GroundUniverse, SemanticsError};
use crate::term::{parse_term, Name, Signature, Term, TermError};

const SECTIONS: [&str; 3] = ["variables", "symbols", "problem"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSpec {
    pub variables: Vec<Name>,
    pub symbols: Vec<Name>,
    pub left: Term,
    pub right: Term,
    /// Declarations with arities inferred from both sides.
    pub signature: Signature,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("missing `{0}:` line")]
    MissingSection(&'static str),
    #[error("line {line}: duplicate `{section}:` line")]
    DuplicateSection { section: &'static str, line: usize },
    #[error("line {line}: expected `variables:`, `symbols:` or `problem:`")]
    UnknownLine { line: usize },
    #[error("line {line}: problem must contain exactly one `=?`")]
    Separator { line: usize },
    #[error("line {line}, column {column}: {source}")]
    Term {
        line: usize,
        column: usize,
        #[source]
        source: TermError,
    },
    #[error("line {line}: {source}")]
    Declaration {
        line: usize,
        #[source]
        source: TermError,
    },
}

struct Section<'a> {
    line: usize,
    /// Byte offset of `body` within its line.
    offset: usize,
    body: &'a str,
}

fn names(body: &str) -> Vec<&str> {
    body.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

pub fn parse_spec(text: &str) -> Result<ProblemSpec, SpecError> {
    let mut found: [Option<Section>; 3] = [None, None, None];
    for (i, raw) in text.split('\n').enumerate() {
        let line = i + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() {
            continue;
        }
        let lead = raw.len() - raw.trim_start().len();
        let content = raw.trim_start();
        let Some(k) = SECTIONS.iter().position(|s| {
            content.strip_prefix(s).is_some_and(|r| r.trim_start().starts_with(':'))
        }) else {
            return Err(SpecError::UnknownLine { line });
        };
        if found[k].is_some() {
            return Err(SpecError::DuplicateSection { section: SECTIONS[k], line });
        }
        let colon = content.find(':').expect("checked above") + 1;
        found[k] = Some(Section { line, offset: lead + colon, body: &content[colon..] });
    }
    let [vars, syms, problem] = found;
    let vars = vars.ok_or(SpecError::MissingSection("variables"))?;
    let syms = syms.ok_or(SpecError::MissingSection("symbols"))?;
    let problem = problem.ok_or(SpecError::MissingSection("problem"))?;

    let variables = names(vars.body);
    let symbols = names(syms.body);
    let mut signature = Signature::new(&variables, &symbols).map_err(|source| {
        // blame whichever line holds the offending name
        let line = match &source {
            TermError::InvalidIdentifier(n) | TermError::Duplicate(n) if !variables.contains(&n.as_str()) => syms.line,
            TermError::Overlap(_) => syms.line,
            _ => vars.line,
        };
        SpecError::Declaration { line, source }
    })?;

    let body = problem.body;
    let mut seps = body.match_indices("=?");
    let (Some((sep, _)), None) = (seps.next(), seps.next()) else {
        return Err(SpecError::Separator { line: problem.line });
    };
    let mut side = |text: &str, at: usize| {
        parse_term(text, &mut signature).map_err(|e| {
            let e = e.shifted(problem.offset + at);
            SpecError::Term { line: problem.line, column: e.offset().map_or(1, |o| o + 1), source: e }
        })
    };
    let left = side(&body[..sep], 0)?;
    let right = side(&body[sep + 2..], sep + 2)?;
    Ok(ProblemSpec {
        variables: variables.into_iter().map(Name::new).collect(),
        symbols: symbols.into_iter().map(Name::new).collect(),
        left,
        right,
        signature,
    })
}

/// Problem file text for a pair of terms, declaring exactly what they use.
pub fn problem_file(t1: &Term, t2: &Term) -> String {
    let mut vars = t1.vars();
    vars.extend(t2.vars());
    let mut syms: Vec<Name> = t1.symbols().into_iter().chain(t2.symbols()).map(|s| s.name).collect();
    syms.sort();
    syms.dedup();
    let join = |xs: Vec<String>| xs.join(", ");
    format!(
        "variables: {}\nsymbols: {}\nproblem: {}=?{}\n",
        join(vars.iter().map(|x| x.to_string()).collect()),
        join(syms.iter().map(|x| x.to_string()).collect()),
        t1,
        t2
    )
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Depth of the bounded semantic check, if requested.
    pub verify_depth: Option<usize>,
    pub exec: Exec,
}

#[derive(Debug)]
pub struct Outcome {
    pub result: AuResult,
    pub proof: ProofObject,
    pub verdict: Verdict,
    pub semantics: Option<Result<Equivalence, SemanticsError>>,
}

impl Outcome {
    pub fn steps(&self) -> usize {
        self.result.steps.len()
    }

    /// Proof checked and, when requested, the bounded semantic check held.
    pub fn success(&self) -> bool {
        self.verdict.overall && self.semantics.as_ref().is_none_or(|s| matches!(s, Ok(e) if e.holds()))
    }
}

pub fn run(spec: &ProblemSpec, opts: RunOptions) -> Result<Outcome, GenError> {
    let result = antiunify(&spec.left, &spec.right);
    let proof = gen_full(&result)?;
    let verdict = check_proof(&proof);
    let semantics = opts.verify_depth.map(|d| {
        let syms: Vec<_> = spec.signature.symbols().collect();
        let u = GroundUniverse::new(&syms, d)?;
        let goal = or(embed_term(&result.t1), embed_term(&result.t2));
        check_equiv_with(&goal, &encode_problem(&result.solved), &u, opts.exec)
    });
    Ok(Outcome { result, proof, verdict, semantics })
}

/// `Checked: true|false` in the layout used for terminal output.
pub struct CheckedLine(pub bool);

impl fmt::Display for CheckedLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Checked: {}", self.0)
    }
}

/// Human-readable report: goal, proof text and status.
pub fn render(outcome: &Outcome) -> String {
    format!("Proof of: {}\n{}{}\n", outcome.proof.goal, outcome.proof, CheckedLine(outcome.verdict.overall))
}
