use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use outf3::pipeline::{self, format_automorphism, parse_input, Budgets, Certificate, Decision, Envelope};
use outf3::{Automorphism, Verdict};

mod selftest;

const DECIDE_SCHEMA: &str = "outf3.decide/1";
const CORPUS_SCHEMA: &str = "outf3.corpus/1";

#[derive(Parser)]
#[command(name = "outf3", version, about = "Conjugacy of outer automorphisms of F_3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two automorphisms are conjugate in Out(F_3).
    Decide {
        left: PathBuf,
        right: PathBuf,
        /// Longest conjugator tried by the bounded search (1..=6).
        #[arg(long, env = pipeline::BUDGET_ENV)]
        budget: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Print the invariant profile of an automorphism as JSON.
    Profile {
        file: PathBuf,
        #[arg(long, env = pipeline::BUDGET_ENV)]
        budget: Option<usize>,
    },
    /// Run every case file in a directory and write a report.
    Corpus {
        dir: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, env = pipeline::BUDGET_ENV)]
        budget: Option<usize>,
    },
    /// Built-in checks on the introduction examples.
    Selftest,
}

/// One corpus case: two envelopes and an optional expected verdict kind.
#[derive(Debug, Serialize, Deserialize)]
pub struct Case {
    #[serde(default)]
    pub name: String,
    pub left: Envelope,
    pub right: Envelope,
    #[serde(default)]
    pub expect: Option<String>,
}

fn budgets(n: Option<usize>) -> anyhow::Result<Budgets> {
    Ok(match n {
        Some(n) => Budgets::with_search(n)?,
        None => Budgets::default(),
    })
}

fn read_automorphism(path: &Path) -> anyhow::Result<Automorphism> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_input(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn exit_code(v: &Verdict<Automorphism, Certificate>) -> u8 {
    match v {
        Verdict::Yes(_) => 0,
        Verdict::No(_) => 1,
        Verdict::Unknown(_) => 2,
    }
}

pub fn report(d: &Decision, budgets: &Budgets, millis: u128) -> Value {
    let mut out = json!({
        "schema": DECIDE_SCHEMA,
        "verdict": d.verdict.kind(),
        "branch": d.branch,
        "transcript": d.transcript,
        "timings": { "total_ms": millis },
        "budgets": budgets,
    });
    match &d.verdict {
        Verdict::Yes(w) => out["witness"] = json!(format_automorphism(w)),
        Verdict::No(c) => out["certificate"] = serde_json::to_value(c).expect("certificate serializes"),
        Verdict::Unknown(r) => out["reason"] = json!(r),
    }
    out
}

fn run_decide(left: &Path, right: &Path, budget: Option<usize>, as_json: bool) -> anyhow::Result<u8> {
    let b = budgets(budget)?;
    let (phi, psi) = (read_automorphism(left)?, read_automorphism(right)?);
    let start = Instant::now();
    let d = pipeline::decide(&phi, &psi, &b)?;
    let millis = start.elapsed().as_millis();
    if as_json {
        println!("{}", serde_json::to_string_pretty(&report(&d, &b, millis))?);
    } else {
        match &d.verdict {
            Verdict::Yes(w) => println!("yes: conjugator {}", format_automorphism(w)),
            Verdict::No(Certificate::Invariant { invariant, left, right }) => println!("no: {invariant} differs ({left} vs {right})"),
            Verdict::No(Certificate::Relative { .. }) => println!("no: not conjugate relative to the invariant factor"),
            Verdict::Unknown(r) => println!("unknown: {r}"),
        }
        for step in &d.transcript {
            println!("  {step}");
        }
    }
    Ok(exit_code(&d.verdict))
}

fn run_profile(file: &Path, budget: Option<usize>) -> anyhow::Result<u8> {
    let b = budgets(budget)?;
    let phi = read_automorphism(file)?;
    let p = pipeline::profile(&phi, &b)?;
    println!("{}", serde_json::to_string_pretty(&p)?);
    Ok(0)
}

fn run_corpus(dir: &Path, report_path: &Path, budget: Option<usize>) -> anyhow::Result<u8> {
    let b = budgets(budget)?;
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut cases = Vec::new();
    let (mut violations, mut mismatches) = (0usize, 0usize);
    let mut counts = [0usize; 3];
    for path in &paths {
        let text = fs::read_to_string(path)?;
        let case: Case = serde_json::from_str(&text).map_err(|e| anyhow!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))?;
        let phi = case.left.automorphism().map_err(|e| anyhow!("{}: left: {e}", path.display()))?;
        let psi = case.right.automorphism().map_err(|e| anyhow!("{}: right: {e}", path.display()))?;
        let start = Instant::now();
        let d = pipeline::decide(&phi, &psi, &b)?;
        let millis = start.elapsed().as_millis();
        let sound = pipeline::recheck(&phi, &psi, &d, &b);
        let kind = d.verdict.kind();
        counts[exit_code(&d.verdict) as usize] += 1;
        violations += usize::from(!sound);
        let matches = case.expect.as_deref().map_or(true, |e| e == kind);
        mismatches += usize::from(!matches);
        let mut entry = report(&d, &b, millis);
        entry["name"] = json!(if case.name.is_empty() { path.file_stem().unwrap().to_string_lossy().into_owned() } else { case.name });
        entry["rechecked"] = json!(sound);
        entry["expected"] = json!(case.expect);
        cases.push(entry);
    }
    let summary = json!({
        "schema": CORPUS_SCHEMA,
        "cases": paths.len(),
        "yes": counts[0],
        "no": counts[1],
        "unknown": counts[2],
        "soundness_violations": violations,
        "expectation_mismatches": mismatches,
        "results": cases,
    });
    fs::write(report_path, serde_json::to_string_pretty(&summary)?).with_context(|| format!("writing {}", report_path.display()))?;
    println!("{} cases: {} yes, {} no, {} unknown; {violations} soundness violations, {mismatches} expectation mismatches", paths.len(), counts[0], counts[1], counts[2]);
    Ok(if violations == 0 && mismatches == 0 { 0 } else { 3 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Decide { left, right, budget, json } => run_decide(&left, &right, budget, json),
        Command::Profile { file, budget } => run_profile(&file, budget),
        Command::Corpus { dir, report, budget } => run_corpus(&dir, &report, budget),
        Command::Selftest => Ok(selftest::run()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
