//! Command-line driver. Every command maps its result to an exit status:
//! 0 affirmative, 1 negative (with a witness), 2 usage, resolution or
//! definedness error, 3 a trajectory that never settles.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ars_core::regularity::{self, GenerationReport, TheoremId, TheoremReport};
use ars_core::solver::{self, DEFAULT_MAX_EVENTS};
use ars_core::systems::{self, Combination, ComputationFunction, Computations, ExplicitSystem};
use ars_core::{BitVector, GeneratorFunction};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use crate::report;
use crate::trace;
use crate::workspace::{self, Workspace, WorkspaceError};

pub const EXIT_AFFIRMATIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_NON_STABILIZING: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ars", version, about = "Regular asynchronous systems: solve, decide membership, verify combinators")]
pub struct Cli {
    /// Event budget for each solver run
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_EVENTS)]
    max_events: usize,
    /// Worker threads for generation checks (output does not depend on it)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the evolution equation and write the trajectory
    Solve(SolveArgs),
    /// Decide whether a trajectory is reachable under some schedule
    Member(MemberArgs),
    /// Decide whether a generator function generates a system
    Check(CheckArgs),
    /// Build a generator function for a system
    Synth(SynthArgs),
    /// Combine systems and print the result as a workspace
    Combine(CombineArgs),
    /// Verify a combinator theorem on explicit systems
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Vcd,
}

#[derive(Args, Debug)]
struct SolveArgs {
    workspace: PathBuf,
    #[arg(long)]
    genfn: String,
    /// Initial state as a bit string
    #[arg(long)]
    mu: String,
    /// Input signal name or literal
    #[arg(long)]
    input: String,
    /// Schedule name or literal
    #[arg(long)]
    schedule: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MemberArgs {
    workspace: PathBuf,
    #[arg(long)]
    genfn: String,
    #[arg(long)]
    input: String,
    #[arg(long)]
    state: String,
}

#[derive(Args, Debug)]
struct CheckArgs {
    workspace: PathBuf,
    #[arg(long)]
    genfn: String,
    #[arg(long)]
    system: String,
    /// Also print the witness computation function under this name
    #[arg(long)]
    emit_pi: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SynthArgs {
    workspace: PathBuf,
    #[arg(long)]
    system: String,
    #[arg(long, default_value = "synth")]
    name: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Op {
    Dual,
    Product,
    Parallel,
    Serial,
    SerialStar,
    Intersect,
    Union,
}

#[derive(Args, Debug)]
struct CombineArgs {
    workspace: PathBuf,
    #[arg(long, value_enum)]
    op: Op,
    /// First operand (`f`; the first stage for serial operators)
    #[arg(long)]
    left: String,
    /// Second operand (`g`; the second stage `h` for serial operators)
    #[arg(long)]
    right: Option<String>,
    #[arg(long, default_value = "combined")]
    name: String,
    /// Also print the closed-form initial-state function, and the derived
    /// computation function when the operands' ones are given
    #[arg(long)]
    derived: bool,
    #[arg(long)]
    pi_left: Option<String>,
    #[arg(long)]
    pi_right: Option<String>,
    /// Generator function used to filter schedules of an intersection
    #[arg(long)]
    genfn: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    workspace: PathBuf,
    #[arg(long)]
    theorem: TheoremId,
    #[arg(long)]
    left: String,
    #[arg(long)]
    right: Option<String>,
    /// Generator function of the left operand (of both where they share one)
    #[arg(long)]
    genfn: String,
    /// Generator function of the right operand for product, parallel, serial
    #[arg(long)]
    genfn_right: Option<String>,
    /// Computation functions; built from membership witnesses when omitted
    #[arg(long)]
    pi_left: Option<String>,
    #[arg(long)]
    pi_right: Option<String>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{source}")]
    Workspace { path: String, source: WorkspaceError },
    #[error("no {kind} named `{name}`")]
    Unresolved { kind: &'static str, name: String },
    #[error("{0}")]
    Core(#[from] ars_core::Error),
    #[error("{0}")]
    Parse(#[from] ars_core::ParseError),
    #[error("{0}")]
    Trace(#[from] trace::TraceError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("premise fails: {0}")]
    Premise(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(ars_core::Error::NonStabilizing(_)) => EXIT_NON_STABILIZING,
            _ => EXIT_ERROR,
        }
    }
}

/// `check_generated` with the per-pair work spread over the rayon pool;
/// the report is the one the sequential check returns.
pub fn check_generated_parallel(
    f: &ExplicitSystem,
    generator: &GeneratorFunction,
    max_events: usize,
) -> Result<GenerationReport, ars_core::Error> {
    regularity::check_widths(f, generator)?;
    let pairs: Vec<_> = f.pairs().collect();
    let outcomes: Vec<_> = pairs
        .par_iter()
        .map(|(u, x)| regularity::witness_for(generator, u, x, max_events))
        .collect();
    GenerationReport::from_outcomes(f, outcomes)
}

struct Context {
    ws: Workspace,
    max_events: usize,
}

fn lookup<'a, T>(map: &'a std::collections::BTreeMap<String, T>, kind: &'static str, name: &str) -> Result<&'a T, CliError> {
    map.get(name).ok_or_else(|| CliError::Unresolved {
        kind,
        name: name.to_string(),
    })
}

impl Context {
    fn load(path: &Path, max_events: usize) -> Result<Context, CliError> {
        let text = fs::read_to_string(path)?;
        let ws = Workspace::parse(&text).map_err(|source| CliError::Workspace {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Context { ws, max_events })
    }

    fn genfn(&self, name: &str) -> Result<&GeneratorFunction, CliError> {
        lookup(&self.ws.genfns, "genfn", name)
    }

    fn system(&self, name: &str) -> Result<&ExplicitSystem, CliError> {
        lookup(&self.ws.systems, "system", name)
    }

    fn computation(&self, name: &str) -> Result<&ComputationFunction, CliError> {
        lookup(&self.ws.computations, "pi", name)
    }

    /// The named computation function, or one built from membership
    /// witnesses.
    fn computation_or_witnesses(
        &self,
        name: Option<&str>,
        f: &ExplicitSystem,
        generator: &GeneratorFunction,
    ) -> Result<ComputationFunction, CliError> {
        if let Some(name) = name {
            return Ok(self.computation(name)?.clone());
        }
        let report = check_generated_parallel(f, generator, self.max_events)?;
        match report.counterexample() {
            Some(c) => Err(CliError::Premise(format!(
                "operand not generated: input [{}] state [{}]: {}",
                c.input, c.state, c.refutation
            ))),
            None => Ok(report.into_computation().expect("generated")),
        }
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn right<'a>(arg: &'a Option<String>, what: &str) -> Result<&'a str, CliError> {
    arg.as_deref()
        .ok_or_else(|| CliError::Usage(format!("--right is required for {what}")))
}

fn solve(ctx: &Context, args: &SolveArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let f = ctx.genfn(&args.genfn)?;
    let mu: BitVector = args.mu.parse()?;
    let u = ctx.ws.signal_or_literal(&args.input)?;
    let r = ctx.ws.schedule_or_literal(&args.schedule)?;
    let x = solver::solve(f, mu, &u, &r, ctx.max_events)?;
    let mut buf = Vec::new();
    match args.format {
        Format::Csv => trace::write_csv(&x, &mut buf)?,
        Format::Vcd => {
            trace::write_vcd(&x, &mut buf)?;
        }
    }
    match &args.out {
        Some(p) => fs::write(p, buf)?,
        None => out.write_all(&buf)?,
    }
    Ok(EXIT_AFFIRMATIVE)
}

fn member(ctx: &Context, args: &MemberArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let f = ctx.genfn(&args.genfn)?;
    let u = ctx.ws.signal_or_literal(&args.input)?;
    let x = ctx.ws.signal_or_literal(&args.state)?;
    let result = solver::membership(f, &x, &u)?;
    match (result.witness(), result.conflict()) {
        (Some(w), _) => {
            writeln!(out, "member: yes\nwitness: {w}")?;
            Ok(EXIT_AFFIRMATIVE)
        }
        (None, Some(c)) => {
            writeln!(out, "member: no\nconflict: {c}")?;
            Ok(EXIT_NEGATIVE)
        }
        (None, None) => unreachable!("membership yields a witness or a conflict"),
    }
}

fn check(ctx: &Context, args: &CheckArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let f = ctx.system(&args.system)?;
    let g = ctx.genfn(&args.genfn)?;
    let report = check_generated_parallel(f, g, ctx.max_events)?;
    let mut text = if args.json {
        report::generation_json(&report) + "\n"
    } else {
        report::generation_text(&report)
    };
    if let (Some(name), Some(pi)) = (&args.emit_pi, report.computation()) {
        workspace::write_computation(&mut text, name, pi);
    }
    out.write_all(text.as_bytes())?;
    Ok(if report.generated() { EXIT_AFFIRMATIVE } else { EXIT_NEGATIVE })
}

fn synth(ctx: &Context, args: &SynthArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let f = ctx.system(&args.system)?;
    match regularity::synthesize_generator(f)? {
        Some(g) => {
            writeln!(out, "genfn {} {{ {g} }}", args.name)?;
            Ok(EXIT_AFFIRMATIVE)
        }
        None => {
            writeln!(out, "# no generator function: the constraints of {} conflict", args.system)?;
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn combine(ctx: &Context, args: &CombineArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let f = ctx.system(&args.left)?;
    let g = match (&args.op, &args.right) {
        (Op::Dual, _) => None,
        (op, r) => Some(ctx.system(right(r, &format!("{op:?}"))?)?),
    };
    let combination = match (args.op, g) {
        (Op::Dual, _) => Combination::Dual(f),
        (Op::Product, Some(g)) => Combination::Product(f, g),
        (Op::Parallel, Some(g)) => Combination::Parallel(f, g),
        (Op::SerialStar, Some(h)) => Combination::SerialStar { h, f },
        (Op::Intersect, Some(g)) => Combination::Intersection(f, g),
        (Op::Union, Some(g)) => Combination::Union(f, g),
        (Op::Serial, Some(h)) => {
            let combined = systems::serial_compose(h, f)?;
            let mut text = String::new();
            workspace::write_system(&mut text, &args.name, &combined);
            emit(out, args.out.as_deref(), &text)?;
            return Ok(EXIT_AFFIRMATIVE);
        }
        _ => unreachable!("binary operators have a right operand"),
    };
    let combined = combination.system()?;
    let mut text = String::new();
    workspace::write_system(&mut text, &args.name, &combined);
    if args.derived {
        let i = systems::derived_initial(&combination)?;
        workspace::write_initial_comment(&mut text, &args.name, &i.0);
        let pi_f = args.pi_left.as_deref().map(|n| ctx.computation(n)).transpose()?;
        let pi_g = args.pi_right.as_deref().map(|n| ctx.computation(n)).transpose()?;
        let operands = match (combination, pi_f, pi_g) {
            (Combination::Dual(_), Some(pi_f), _) => Some(Computations::Dual { pi_f }),
            (Combination::Product(..), Some(pi_f), Some(pi_g)) => Some(Computations::Product { pi_f, pi_g }),
            (Combination::Parallel(..), Some(pi_f), Some(pi_g)) => Some(Computations::Parallel { pi_f, pi_g }),
            (Combination::SerialStar { h, f }, Some(pi_f), Some(pi_h)) => {
                Some(Computations::SerialStar { f, h, pi_f, pi_h })
            }
            (Combination::Union(..), Some(pi_f), Some(pi_g)) => Some(Computations::Union { pi_f, pi_g }),
            (Combination::Intersection(f, g), Some(pi_f), Some(pi_g)) => {
                let name = args
                    .genfn
                    .as_deref()
                    .ok_or_else(|| CliError::Usage("--genfn is required to derive an intersection's pi".into()))?;
                Some(Computations::Intersection {
                    f,
                    g,
                    pi_f,
                    pi_g,
                    generator: ctx.genfn(name)?,
                    max_events: ctx.max_events,
                })
            }
            _ => None,
        };
        if let Some(operands) = operands {
            let pi = systems::derived_computation(&operands)?;
            workspace::write_computation(&mut text, &format!("{}_pi", args.name), &pi);
        }
    }
    emit(out, args.out.as_deref(), &text)?;
    Ok(EXIT_AFFIRMATIVE)
}

fn verify(ctx: &Context, args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let f = ctx.system(&args.left)?;
    let gen_f = ctx.genfn(&args.genfn)?;
    let gen_g = match &args.genfn_right {
        Some(name) => ctx.genfn(name)?,
        None => gen_f,
    };
    let pi_f = ctx.computation_or_witnesses(args.pi_left.as_deref(), f, gen_f)?;
    let what = args.theorem.name();
    let k = ctx.max_events;
    let report: TheoremReport = if args.theorem == TheoremId::Dual {
        regularity::verify_dual_theorem(f, gen_f, &pi_f, k)?
    } else {
        let g = ctx.system(right(&args.right, what)?)?;
        let separate = matches!(args.theorem, TheoremId::Product | TheoremId::Parallel | TheoremId::Serial);
        let gen_for_g = if separate { gen_g } else { gen_f };
        let pi_g = ctx.computation_or_witnesses(args.pi_right.as_deref(), g, gen_for_g)?;
        match args.theorem {
            TheoremId::Subsystem => regularity::verify_subsystem_theorem(f, g, gen_f, &pi_f, &pi_g, k)?,
            TheoremId::Product => regularity::verify_product_theorem(f, g, gen_f, gen_g, &pi_f, &pi_g, k)?,
            TheoremId::Parallel => regularity::verify_parallel_theorem(f, g, gen_f, gen_g, &pi_f, &pi_g, k)?,
            TheoremId::Serial => regularity::verify_serial_theorem(f, g, gen_f, gen_g, &pi_f, &pi_g, k)?,
            TheoremId::Intersection => regularity::verify_intersection_theorem(f, g, gen_f, &pi_f, &pi_g, k)?,
            TheoremId::Union => regularity::verify_union_theorem(f, g, gen_f, &pi_f, &pi_g, k)?,
            TheoremId::Dual => unreachable!("handled above"),
        }
    };
    let text = if args.json {
        report::theorem_json(&report) + "\n"
    } else {
        report::theorem_text(&report)
    };
    emit(out, args.out.as_deref(), &text)?;
    Ok(if report.holds() { EXIT_AFFIRMATIVE } else { EXIT_NEGATIVE })
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let path = match &cli.command {
        Command::Solve(a) => &a.workspace,
        Command::Member(a) => &a.workspace,
        Command::Check(a) => &a.workspace,
        Command::Synth(a) => &a.workspace,
        Command::Combine(a) => &a.workspace,
        Command::Verify(a) => &a.workspace,
    };
    let ctx = Context::load(path, cli.max_events)?;
    match &cli.command {
        Command::Solve(a) => solve(&ctx, a, out),
        Command::Member(a) => member(&ctx, a, out),
        Command::Check(a) => check(&ctx, a, out),
        Command::Synth(a) => synth(&ctx, a, out),
        Command::Combine(a) => combine(&ctx, a, out),
        Command::Verify(a) => verify(&ctx, a, out),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`. Returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_AFFIRMATIVE };
            let stream: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(stream, "{}", e.render());
            return code;
        }
    };
    let mut buf: Vec<u8> = Vec::new();
    let result = match cli.jobs {
        Some(jobs) => match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, &mut buf)),
            Err(e) => Err(CliError::Usage(format!("cannot start {jobs} worker(s): {e}"))),
        },
        None => dispatch(&cli, &mut buf),
    };
    let _ = out.write_all(&buf);
    match result {
        Ok(code) => code,
        Err(e) => {
            match &e {
                CliError::Core(ars_core::Error::NonStabilizing(report)) => {
                    let _ = writeln!(err, "non-stabilizing: {report}");
                }
                other => {
                    let _ = writeln!(err, "error: {other}");
                }
            }
            e.exit_code()
        }
    }
}
