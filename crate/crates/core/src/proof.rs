//! Proof objects and their text and JSON formats.
//!
//! Text format:
//!
//! ```text
//! symbols: cons/2, succ/1, zero/0
//! goal: <pattern>
//! 1 | <pattern> | ExistsSubst [block=1]
//! 3 | <pattern> | ModusPonens(1, 2) [block=1]
//! ```
//!
//! Blank lines and lines starting with `//` are ignored. Witnesses are
//! `key=value` entries separated by `; `.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::pattern::{parse_pattern, Pattern};
use crate::term::Name;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    ExistsSubst,
    ExistsGen,
    ExistsScope,
    ExistsCollapse,
    ExistsCtx,
    Propositional,
    ModusPonens,
    IffTrans,
}

impl Rule {
    pub const ALL: [Rule; 8] = [
        Rule::ExistsSubst,
        Rule::ExistsGen,
        Rule::ExistsScope,
        Rule::ExistsCollapse,
        Rule::ExistsCtx,
        Rule::Propositional,
        Rule::ModusPonens,
        Rule::IffTrans,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::ExistsSubst => "ExistsSubst",
            Rule::ExistsGen => "ExistsGen",
            Rule::ExistsScope => "ExistsScope",
            Rule::ExistsCollapse => "ExistsCollapse",
            Rule::ExistsCtx => "ExistsCtx",
            Rule::Propositional => "Propositional",
            Rule::ModusPonens => "ModusPonens",
            Rule::IffTrans => "IffTrans",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown rule `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Justification {
    pub rule: Rule,
    /// 1-based indices of earlier lines.
    pub premises: Vec<usize>,
    pub witnesses: BTreeMap<String, String>,
}

impl Justification {
    pub fn new(rule: Rule, premises: Vec<usize>) -> Self {
        Justification { rule, premises, witnesses: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl Into<String>) -> Self {
        self.witnesses.insert(key.to_string(), value.into());
        self
    }

    pub fn witness(&self, key: &str) -> Option<&str> {
        self.witnesses.get(key).map(String::as_str)
    }
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rule)?;
        if !self.premises.is_empty() {
            let refs: Vec<String> = self.premises.iter().map(usize::to_string).collect();
            write!(f, "({})", refs.join(", "))?;
        }
        if !self.witnesses.is_empty() {
            let ws: Vec<String> = self.witnesses.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, " [{}]", ws.join("; "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub index: usize,
    pub pattern: Pattern,
    pub just: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofObject {
    /// Symbols with their arities, used to tell constants from variables
    /// when reading patterns back.
    pub symbols: Vec<(Name, usize)>,
    pub goal: Pattern,
    pub lines: Vec<ProofLine>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ProofParseError {
    /// 1-based line of the input text (0 for document-level errors).
    pub line: usize,
    pub message: String,
}

fn perr<T>(line: usize, message: impl Into<String>) -> Result<T, ProofParseError> {
    Err(ProofParseError { line, message: message.into() })
}

impl ProofObject {
    pub fn symbol_names(&self) -> Vec<&str> {
        self.symbols.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<ProofObject, ProofParseError> {
        let mut symbols: Option<Vec<(Name, usize)>> = None;
        let mut goal: Option<Pattern> = None;
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.trim_end_matches('\r').trim();
            if line.is_empty() || line.starts_with("//") {
                continue;
            }
            if let Some(rest) = line.strip_prefix("symbols:") {
                if symbols.is_some() {
                    return perr(n, "duplicate `symbols:` header");
                }
                symbols = Some(parse_symbols(rest).map_err(|m| ProofParseError { line: n, message: m })?);
                continue;
            }
            let Some(syms) = &symbols else {
                return perr(n, "missing `symbols:` header");
            };
            let names: Vec<&str> = syms.iter().map(|(s, _)| s.as_str()).collect();
            if let Some(rest) = line.strip_prefix("goal:") {
                if goal.is_some() {
                    return perr(n, "duplicate `goal:` header");
                }
                goal = Some(
                    parse_pattern(rest.trim(), &names)
                        .map_err(|e| ProofParseError { line: n, message: format!("goal: {e}") })?,
                );
                continue;
            }
            if goal.is_none() {
                return perr(n, "missing `goal:` header");
            }
            lines.push(parse_line(line, &names).map_err(|m| ProofParseError { line: n, message: m })?);
        }
        let Some(symbols) = symbols else {
            return perr(0, "missing `symbols:` header");
        };
        let Some(goal) = goal else {
            return perr(0, "missing `goal:` header");
        };
        Ok(ProofObject { symbols, goal, lines })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(JsonProof::from(self)).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<ProofObject, ProofParseError> {
        let j: JsonProof =
            serde_json::from_str(text).map_err(|e| ProofParseError { line: e.line(), message: e.to_string() })?;
        j.try_into()
    }
}

fn parse_symbols(rest: &str) -> Result<Vec<(Name, usize)>, String> {
    let rest = rest.trim();
    if rest.is_empty() {
        return Ok(Vec::new());
    }
    rest.split(',')
        .map(|item| {
            let item = item.trim();
            let (name, arity) = item.split_once('/').ok_or_else(|| format!("expected name/arity, got `{item}`"))?;
            let arity = arity.trim().parse().map_err(|_| format!("bad arity in `{item}`"))?;
            Ok((Name::new(name.trim()), arity))
        })
        .collect()
}

fn parse_line(line: &str, symbols: &[&str]) -> Result<ProofLine, String> {
    let (first, last) = match (line.find(" | "), line.rfind(" | ")) {
        (Some(a), Some(b)) if a < b => (a, b),
        _ => return Err("expected `index | pattern | justification`".into()),
    };
    let index: usize = line[..first].trim().parse().map_err(|_| "bad line index".to_string())?;
    let pattern = parse_pattern(line[first + 3..last].trim(), symbols).map_err(|e| e.to_string())?;
    let just = parse_justification(line[last + 3..].trim())?;
    Ok(ProofLine { index, pattern, just })
}

fn parse_justification(s: &str) -> Result<Justification, String> {
    let (head, witnesses) = match s.find('[') {
        Some(i) => {
            let w = s[i + 1..].strip_suffix(']').ok_or("unterminated witness list")?;
            (s[..i].trim(), Some(w))
        }
        None => (s, None),
    };
    let (rule, premises) = match head.find('(') {
        Some(i) => {
            let inner = head[i + 1..].strip_suffix(')').ok_or("unterminated premise list")?;
            let refs = inner
                .split(',')
                .map(|r| r.trim().parse::<usize>().map_err(|_| format!("bad premise `{}`", r.trim())))
                .collect::<Result<Vec<_>, _>>()?;
            (head[..i].trim(), refs)
        }
        None => (head, Vec::new()),
    };
    let mut just = Justification::new(rule.parse()?, premises);
    if let Some(w) = witnesses {
        for entry in w.split(';').map(str::trim).filter(|e| !e.is_empty()) {
            let (k, v) = entry.split_once('=').ok_or_else(|| format!("bad witness `{entry}`"))?;
            just.witnesses.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    Ok(just)
}

impl fmt::Display for ProofObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let syms: Vec<String> = self.symbols.iter().map(|(n, a)| format!("{n}/{a}")).collect();
        writeln!(f, "symbols: {}", syms.join(", "))?;
        writeln!(f, "goal: {}", self.goal)?;
        for l in &self.lines {
            writeln!(f, "{} | {} | {}", l.index, l.pattern, l.just)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct JsonLine {
    index: usize,
    pattern: String,
    rule: String,
    #[serde(default)]
    premises: Vec<usize>,
    #[serde(default)]
    witnesses: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct JsonProof {
    symbols: Vec<String>,
    goal: String,
    lines: Vec<JsonLine>,
}

impl From<&ProofObject> for JsonProof {
    fn from(po: &ProofObject) -> Self {
        JsonProof {
            symbols: po.symbols.iter().map(|(n, a)| format!("{n}/{a}")).collect(),
            goal: po.goal.to_string(),
            lines: po
                .lines
                .iter()
                .map(|l| JsonLine {
                    index: l.index,
                    pattern: l.pattern.to_string(),
                    rule: l.just.rule.to_string(),
                    premises: l.just.premises.clone(),
                    witnesses: l.just.witnesses.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<JsonProof> for ProofObject {
    type Error = ProofParseError;

    fn try_from(j: JsonProof) -> Result<Self, Self::Error> {
        let symbols = parse_symbols(&j.symbols.join(","))
            .map_err(|m| ProofParseError { line: 0, message: m })?;
        let names: Vec<&str> = symbols.iter().map(|(n, _)| n.as_str()).collect();
        let goal = parse_pattern(&j.goal, &names)
            .map_err(|e| ProofParseError { line: 0, message: format!("goal: {e}") })?;
        let mut lines = Vec::with_capacity(j.lines.len());
        for l in j.lines {
            let err = |m: String| ProofParseError { line: l.index, message: m };
            let pattern = parse_pattern(&l.pattern, &names).map_err(|e| err(e.to_string()))?;
            let mut just = Justification::new(l.rule.parse().map_err(err)?, l.premises);
            just.witnesses = l.witnesses;
            lines.push(ProofLine { index: l.index, pattern, just });
        }
        Ok(ProofObject { symbols, goal, lines })
    }
}
