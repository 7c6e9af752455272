//! `aucert`: antiunify two terms, emit a proof object for the equivalence of
//! their disjunction and the encoded solution, and check it.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aucert_core::check::{check_proof, Verdict};
use aucert_core::exec::Exec;
use aucert_core::frontend::{parse_spec, render, run, CheckedLine, Outcome, RunOptions};
use aucert_core::generate::proof_lines;
use aucert_core::proof::ProofObject;
use aucert_core::semantics::{Equivalence, MAX_DEPTH};
use clap::Parser;

#[derive(Parser, Debug)]
#[command(name = "aucert", version, about = "Certified antiunification: generate and check proof objects")]
struct Cli {
    /// Problem files (`variables:`, `symbols:`, `problem: t1 =? t2`).
    #[arg(required_unless_present = "check_only", conflicts_with = "check_only")]
    files: Vec<PathBuf>,

    /// Write the proof to PATH (a directory when several files are given).
    #[arg(long, value_name = "PATH")]
    emit_proof: Option<PathBuf>,

    /// Use JSON for emitted and printed proofs.
    #[arg(long)]
    json: bool,

    /// Only check an existing proof file (text or JSON).
    #[arg(long, value_name = "PATH")]
    check_only: Option<PathBuf>,

    /// Also compare both sides over ground terms up to the given depth.
    #[arg(long, value_name = "depth=N", value_parser = parse_depth)]
    verify_semantics: Option<usize>,

    /// Print the number of decomposition steps and proof lines.
    #[arg(long)]
    stats: bool,

    /// Print only the status lines, not the proof.
    #[arg(short, long)]
    quiet: bool,

    /// Disable data parallelism.
    #[arg(long)]
    sequential: bool,
}

fn parse_depth(s: &str) -> Result<usize, String> {
    let n = s.strip_prefix("depth=").unwrap_or(s);
    let d: usize = n.parse().map_err(|_| format!("expected depth=N, got `{s}`"))?;
    if d == 0 || d > MAX_DEPTH {
        return Err(format!("depth must be between 1 and {MAX_DEPTH}"));
    }
    Ok(d)
}

const EXIT_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;

/// Per-file result; the report is printed in input order.
struct Report {
    stdout: String,
    stderr: String,
    code: u8,
}

impl Report {
    fn input_error(path: &Path, msg: impl std::fmt::Display) -> Report {
        Report { stdout: String::new(), stderr: format!("{}: {msg}\n", path.display()), code: EXIT_INPUT }
    }
}

fn proof_text(p: &ProofObject, json: bool) -> String {
    if json {
        format!("{:#}\n", p.to_json())
    } else {
        p.to_text()
    }
}

fn emit_target(cli: &Cli, input: &Path) -> Option<PathBuf> {
    let target = cli.emit_proof.as_ref()?;
    if cli.files.len() == 1 {
        return Some(target.clone());
    }
    let ext = if cli.json { "json" } else { "proof" };
    let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "proof".into());
    Some(target.join(format!("{stem}.{ext}")))
}

fn process(cli: &Cli, path: &Path, exec: Exec) -> Report {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Report::input_error(path, e),
    };
    let spec = match parse_spec(&text) {
        Ok(s) => s,
        Err(e) => return Report::input_error(path, e),
    };
    let outcome = match run(&spec, RunOptions { verify_depth: cli.verify_semantics, exec }) {
        Ok(o) => o,
        Err(e) => return Report::input_error(path, e),
    };
    let mut out = String::new();
    let mut err = String::new();
    if cli.files.len() > 1 {
        out.push_str(&format!("== {} ==\n", path.display()));
    }
    if cli.quiet {
        out.push_str(&format!("{}\n", CheckedLine(outcome.verdict.overall)));
    } else if cli.json {
        out.push_str(&format!("Proof of: {}\n", outcome.proof.goal));
        out.push_str(&proof_text(&outcome.proof, true));
        out.push_str(&format!("{}\n", CheckedLine(outcome.verdict.overall)));
    } else {
        out.push_str(&render(&outcome));
    }
    if cli.stats {
        out.push_str(&stats(&outcome));
    }
    semantics_report(&outcome, cli.verify_semantics, &mut out, &mut err);
    for r in outcome.verdict.rejections() {
        err.push_str(&format!("{}: rejected {r}\n", path.display()));
    }
    if let Some(target) = emit_target(cli, path) {
        if let Err(e) = fs::write(&target, proof_text(&outcome.proof, cli.json)) {
            return Report::input_error(&target, e);
        }
    }
    let code = if outcome.success() { 0 } else { EXIT_FAILED };
    Report { stdout: out, stderr: err, code }
}

fn stats(o: &Outcome) -> String {
    let k = o.steps();
    let lines = o.proof.lines.len();
    debug_assert_eq!(lines, proof_lines(k));
    format!("steps: {k}\nlines: {lines}\nlgg: {}\n", o.result.lgg)
}

fn semantics_report(o: &Outcome, depth: Option<usize>, out: &mut String, err: &mut String) {
    let (Some(d), Some(s)) = (depth, &o.semantics) else {
        return;
    };
    match s {
        Ok(Equivalence::Holds { envs }) => out.push_str(&format!("Semantics (depth {d}): equivalent under {envs} assignments\n")),
        Ok(Equivalence::Counterexample(env)) => {
            let env: Vec<String> = env.iter().map(|(x, t)| format!("{x} = {t}")).collect();
            out.push_str(&format!("Semantics (depth {d}): counterexample {}\n", env.join(", ")));
        }
        Err(e) => err.push_str(&format!("semantic check failed: {e}\n")),
    }
}

fn check_only(path: &Path) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let parsed = if text.trim_start().starts_with('{') {
        ProofObject::from_json(&text)
    } else {
        ProofObject::from_text(&text)
    };
    let proof = match parsed {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let verdict: Verdict = check_proof(&proof);
    for r in verdict.rejections() {
        eprintln!("{}: rejected {r}", path.display());
    }
    if !verdict.goal_matched {
        eprintln!("{}: last line does not match the goal", path.display());
    }
    println!("{}", CheckedLine(verdict.overall));
    ExitCode::from(if verdict.overall { 0 } else { EXIT_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(p) = &cli.check_only {
        return check_only(p);
    }
    if cli.files.len() > 1 {
        if let Some(dir) = &cli.emit_proof {
            if let Err(e) = fs::create_dir_all(dir) {
                eprintln!("{}: {e}", dir.display());
                return ExitCode::from(EXIT_INPUT);
            }
        }
    }
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    // one file: parallelism goes to the semantic check; several: to the files
    let (outer, inner) = if cli.files.len() > 1 { (exec, Exec::Sequential) } else { (Exec::Sequential, exec) };
    let reports = outer.map(&cli.files, |f| process(&cli, f, inner));
    let mut code = 0;
    for r in reports {
        print!("{}", r.stdout);
        eprint!("{}", r.stderr);
        code = code.max(r.code);
    }
    ExitCode::from(code)
}
