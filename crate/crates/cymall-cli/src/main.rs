//! `cymall` — a command-line workbench for cyclic MLL/MALL.
//!
//! Every subcommand is a thin wrapper over the `cymall` library: parse the
//! input, call one library entry point, print the result.  Results go to
//! stdout in a stable format; diagnostics go to stderr.
//!
//! Exit codes:
//!
//! * `0` — positive verdict (provable / square / equal / holds / no
//!   counterexample up to the bound), or the work simply succeeded;
//! * `1` — negative verdict (unprovable / non-square / not equal / fails /
//!   counterexample found);
//! * `2` — input or usage error (parse failure, ill-typed term, bad file);
//! * `3` — the node budget ran out before a verdict was reached.
//!
//! Sequents and terms use the library's concrete syntax (`~x * top, ~y,
//! top * x`; `1 + x.x*`; `s . (top \ r)`).  Environment files bind one
//! variable per line, `x : n -> m`, with `#` comments.  Model queries are
//! a single containment, `LHS <= RHS`, split on the first `<=`.  Valuation
//! files are described in [`valfile`].

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cymall::{
    decorate, decide_typed, decide_untyped, eval_le, infer_sequent, parse_env, parse_ka_term,
    parse_rm_term, parse_sequent, prove, rejection_rate, run_bench, search_counterexample,
    write_csv, Formula, Fragment, GenParams, KaVerdict, ObjectTerm, ProverError, RmTerm,
    SearchConfig, Sequent, Side, TypeEnv,
};

mod valfile;

#[derive(Parser)]
#[command(
    name = "cymall",
    version,
    about = "Provers and deciders for cyclic multiplicative-additive linear logic",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide provability of a sequent; optionally print and type the proof.
    Prove(ProveArgs),
    /// Infer a sequent's most general type and report whether it is square.
    Infer(InferArgs),
    /// Kleene algebra decisions.
    #[command(subcommand)]
    Ka(KaCmd),
    /// Finite heterogeneous-relation models.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Generate random sequents, race pruned against unpruned search, write CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Logic {
    /// Multiplicatives only: `*`, `|`, `1`, `bot`.
    Mll,
    /// Multiplicatives and additives: adds `+`, `&`, `0`, `top`.
    Mall,
}

#[derive(Args)]
struct ProveArgs {
    /// Accepted fragment; `mll` rejects additive connectives and constants.
    #[arg(long, value_enum, default_value = "mall")]
    logic: Logic,
    /// Disable square-type pruning.  Required for sequents containing
    /// `top` or `0`, where the pruned search would be incomplete.
    #[arg(long)]
    no_prune: bool,
    /// Object environment file (`x : n -> m` lines).  A provable sequent
    /// that is square under it is also decorated into a typed proof.
    #[arg(long, value_name = "FILE")]
    env: Option<PathBuf>,
    /// Print the proof tree when provable.
    #[arg(long)]
    proof: bool,
    /// Abort after this many expanded search states (exit code 3).
    #[arg(long, value_name = "N")]
    budget: Option<u64>,
    /// The sequent, e.g. "~x, x".
    sequent: String,
}

#[derive(Args)]
struct InferArgs {
    /// Object environment file constraining some variables.
    #[arg(long, value_name = "FILE")]
    env: Option<PathBuf>,
    /// The sequent; an empty string denotes the empty sequent.
    sequent: String,
}

#[derive(Subcommand)]
enum KaCmd {
    /// Decide whether two regular terms denote the same language.
    Eq(KaEqArgs),
}

#[derive(Args)]
struct KaEqArgs {
    /// Object environment file for the typed decision.
    #[arg(long, value_name = "FILE", requires = "at")]
    env: Option<PathBuf>,
    /// Endpoint objects; switches to the typed decision at `N -> M`.
    #[arg(long, num_args = 2, value_names = ["N", "M"])]
    at: Option<Vec<String>>,
    /// Left term, e.g. "1 + x.x*".
    a: String,
    /// Right term, e.g. "x*".
    b: String,
}

#[derive(Subcommand)]
enum ModelCmd {
    /// Evaluate both sides under a concrete valuation and decide `lhs <= rhs`.
    Check(ModelCheckArgs),
    /// Search all valuations up to a carrier-size bound for a counterexample.
    Search(ModelSearchArgs),
}

#[derive(Args)]
struct ModelCheckArgs {
    /// Valuation file: `carrier A = 2` and `rel R : A -> B = {(0,1)}` lines.
    #[arg(long, value_name = "FILE")]
    val: PathBuf,
    /// The containment, e.g. "x . y <= x . top".
    query: String,
}

#[derive(Args)]
struct ModelSearchArgs {
    /// Object environment file pinning some variables' endpoint objects;
    /// endpoints left free get synthesized objects `o0`, `o1`, ...
    #[arg(long, value_name = "FILE")]
    shape: Option<PathBuf>,
    /// Largest carrier size to enumerate.
    #[arg(long, value_name = "K")]
    max_size: usize,
    /// Also enumerate empty carriers.
    #[arg(long)]
    allow_empty: bool,
    /// The containment, e.g. "s . (top \ r) <= top . r".
    query: String,
}

#[derive(Args)]
struct BenchArgs {
    /// Leaves per generated sequent (1..=64).
    #[arg(long, value_name = "N")]
    leaves: u32,
    /// Size of the variable pool.
    #[arg(long, value_name = "V")]
    vars: u32,
    /// Number of sequents to generate.
    #[arg(long, value_name = "C")]
    count: usize,
    /// Generator seed; equal seeds reproduce the run exactly.
    #[arg(long, value_name = "S")]
    seed: u64,
    /// CSV output path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Connectives drawn by the generator.
    #[arg(long, value_enum, default_value = "mall")]
    fragment: Logic,
    /// Per-search node budget; searches that exhaust it are recorded,
    /// excluded from the summary statistics, and do not fail the run.
    #[arg(long, value_name = "N", default_value_t = 100_000)]
    budget: u64,
}

fn main() -> ExitCode {
    // Die quietly when the reader of a pipeline closes early
    // (`cymall ... | head`) instead of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match Cli::parse().cmd {
        Cmd::Prove(a) => cmd_prove(&a),
        Cmd::Infer(a) => cmd_infer(&a),
        Cmd::Ka(KaCmd::Eq(a)) => cmd_ka_eq(&a),
        Cmd::Model(ModelCmd::Check(a)) => cmd_model_check(&a),
        Cmd::Model(ModelCmd::Search(a)) => cmd_model_search(&a),
        Cmd::Bench(a) => cmd_bench(&a),
    }
    .unwrap_or_else(|code| code)
}

/// Commands return `Ok(exit_code)` on a verdict and `Err(exit_code)`
/// after printing a diagnostic; both carry the process exit status.
type CmdResult = Result<ExitCode, ExitCode>;

const NEGATIVE: u8 = 1;
const INPUT_ERROR: u8 = 2;
const BUDGET: u8 = 3;

fn fail(code: u8, msg: impl Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn verdict(positive: bool, text_pos: &str, text_neg: &str) -> ExitCode {
    if positive {
        println!("{text_pos}");
        ExitCode::SUCCESS
    } else {
        println!("{text_neg}");
        ExitCode::from(NEGATIVE)
    }
}

fn read_file(path: &Path) -> Result<String, ExitCode> {
    fs::read_to_string(path).map_err(|e| fail(INPUT_ERROR, format!("{}: {e}", path.display())))
}

fn load_env(path: Option<&PathBuf>) -> Result<TypeEnv, ExitCode> {
    match path {
        None => Ok(TypeEnv::new()),
        Some(p) => parse_env(&read_file(p)?).map_err(|e| fail(INPUT_ERROR, e)),
    }
}

/// Splits a containment query on its first `<=` and parses both sides.
fn split_query(q: &str) -> Result<(RmTerm, RmTerm), ExitCode> {
    let (l, r) = q
        .split_once("<=")
        .ok_or_else(|| fail(INPUT_ERROR, "query must contain `<=`"))?;
    let parse = |s: &str| parse_rm_term(s).map_err(|e| fail(INPUT_ERROR, e));
    Ok((parse(l)?, parse(r)?))
}

fn cmd_prove(a: &ProveArgs) -> CmdResult {
    let seq = parse_sequent(&a.sequent).map_err(|e| fail(INPUT_ERROR, e))?;
    if a.logic == Logic::Mll && seq.items().iter().any(Formula::has_additive) {
        return Err(fail(
            INPUT_ERROR,
            "sequent contains additives; pass --logic mall to allow them",
        ));
    }
    let env = load_env(a.env.as_ref())?;
    let cfg = SearchConfig {
        prune: !a.no_prune,
        env: env.clone(),
        node_budget: a.budget,
        ..SearchConfig::default()
    };
    let (found, _stats) = prove(&seq, &cfg).map_err(|e| match e {
        ProverError::PruneUnsound => fail(INPUT_ERROR, e),
        ProverError::BudgetExceeded { .. } => fail(BUDGET, e),
    })?;
    let Some(p) = found else {
        return Ok(verdict(false, "provable", "unprovable"));
    };
    println!("provable");
    if a.proof {
        print!("{p}");
    }
    if a.env.is_some() {
        let mgu = infer_sequent(&seq, &env);
        if !mgu.is_consistent() || !mgu.square() {
            eprintln!("note: the environment admits no square typing; decoration skipped");
        } else {
            match decorate(&p, &env, &mgu.start()) {
                Ok(typed) => print!("{typed}"),
                Err(e) => println!("decoration failed: {e}"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_infer(a: &InferArgs) -> CmdResult {
    let seq = if a.sequent.trim().is_empty() {
        Sequent::new()
    } else {
        parse_sequent(&a.sequent).map_err(|e| fail(INPUT_ERROR, e))?
    };
    let env = load_env(a.env.as_ref())?;
    let mgu = infer_sequent(&seq, &env);
    if !mgu.is_consistent() {
        println!("INCONSISTENT");
        return Ok(ExitCode::from(NEGATIVE));
    }
    for (name, s, e) in mgu.variables() {
        println!("{name} : {s} -> {e}");
    }
    println!("sequent : {} -> {}", mgu.start(), mgu.end());
    Ok(verdict(mgu.square(), "SQUARE", "NON-SQUARE"))
}

fn cmd_ka_eq(a: &KaEqArgs) -> CmdResult {
    let parse = |s: &str| parse_ka_term(s).map_err(|e| fail(INPUT_ERROR, e));
    let (l, r) = (parse(&a.a)?, parse(&a.b)?);
    let Some(at) = &a.at else {
        return Ok(verdict(decide_untyped(&l, &r), "Equal", "NotEqual"));
    };
    let env = load_env(a.env.as_ref())?;
    let (n, m) = (ObjectTerm::constant(&at[0]), ObjectTerm::constant(&at[1]));
    match decide_typed(&l, &r, &env, &n, &m) {
        KaVerdict::Equal => Ok(verdict(true, "Equal", "NotEqual")),
        KaVerdict::NotEqual => Ok(verdict(false, "Equal", "NotEqual")),
        KaVerdict::IllTyped(side) => {
            let side = match side {
                Side::Left => "left",
                Side::Right => "right",
            };
            println!("IllTyped({side})");
            Ok(ExitCode::from(INPUT_ERROR))
        }
    }
}

fn cmd_model_check(a: &ModelCheckArgs) -> CmdResult {
    let (lhs, rhs) = split_query(&a.query)?;
    let v = valfile::parse_valuation(&read_file(&a.val)?)
        .map_err(|e| fail(INPUT_ERROR, format!("{}: {e}", a.val.display())))?;
    let (lv, rv) = eval_le(&lhs, &rhs, &v).map_err(|e| fail(INPUT_ERROR, e))?;
    println!("lhs = {lv} : {} -> {}", lv.dom().name, lv.cod().name);
    println!("rhs = {rv} : {} -> {}", rv.dom().name, rv.cod().name);
    Ok(verdict(lv.le(&rv), "holds", "fails"))
}

fn cmd_model_search(a: &ModelSearchArgs) -> CmdResult {
    let (lhs, rhs) = split_query(&a.query)?;
    let shape = load_env(a.shape.as_ref())?;
    let witness = search_counterexample(&lhs, &rhs, &shape, a.max_size, a.allow_empty)
        .map_err(|e| fail(INPUT_ERROR, e))?;
    match witness {
        Some(v) => {
            print!("{v}");
            Ok(ExitCode::from(NEGATIVE))
        }
        None => {
            println!("none up to bound");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_bench(a: &BenchArgs) -> CmdResult {
    if a.leaves == 0 || a.leaves > 64 {
        return Err(fail(INPUT_ERROR, "--leaves must be between 1 and 64"));
    }
    if a.vars == 0 {
        return Err(fail(INPUT_ERROR, "--vars must be at least 1"));
    }
    if a.count == 0 {
        return Err(fail(INPUT_ERROR, "--count must be at least 1"));
    }
    let params = GenParams {
        leaves: a.leaves,
        var_pool: a.vars,
        fragment: match a.fragment {
            Logic::Mll => Fragment::Mll,
            Logic::Mall => Fragment::Mall,
        },
        seed: a.seed,
    };
    let records = run_bench(&params, a.count, a.budget);
    let file = fs::File::create(&a.out)
        .map_err(|e| fail(INPUT_ERROR, format!("{}: {e}", a.out.display())))?;
    write_csv(&records, file).map_err(|e| fail(INPUT_ERROR, e))?;
    match rejection_rate(&records) {
        Some(rate) => println!("rejection rate: {rate:.3}"),
        None => println!("rejection rate: n/a"),
    }
    let ms = |total: u128| total as f64 / 1e6;
    let unpruned: u128 = records.iter().map(|r| r.time_unpruned_ns).sum();
    let pruned: u128 = records.iter().map(|r| r.time_pruned_ns).sum();
    println!("total unpruned time: {:.1} ms", ms(unpruned));
    println!("total pruned time: {:.1} ms", ms(pruned));
    let exceeded = records.iter().filter(|r| r.budget_exceeded).count();
    println!("budget exceeded: {exceeded}/{}", records.len());
    Ok(ExitCode::SUCCESS)
}
