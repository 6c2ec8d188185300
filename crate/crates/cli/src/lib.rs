//! `tsred` command-line front end.
//!
//! Exit codes: 0 success or VALID, 1 INVALID verdict, 2 usage error,
//! 3 instance error.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tsred_core::bench::{bench_suite, run_many, Algorithm, SolverSettings};
use tsred_core::fuzzy::{default_rule_base, parse_rule_base, RuleBase};
use tsred_core::io::{parse_instance, write_report};
use tsred_core::oracle::{enumerate_minimum_covers, minimum_cover, DEFAULT_ENUMERATION_CAP};
use tsred_core::{builtin, reduction_percent, validate_instance, Instance, BUILTIN_NAMES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INSTANCE: i32 = 3;

/// Environment variable naming a rule-base file to use instead of the default.
pub const RULEBASE_ENV: &str = "TSRED_RULEBASE";

#[derive(Parser, Debug)]
#[command(name = "tsred", version, about = "Test-suite redundancy reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one algorithm K times with consecutive seeds and print the report.
    Solve(SolveArgs),
    /// Exact minimum cover.
    Oracle(OracleArgs),
    /// Check whether a selection covers every requirement.
    Validate(ValidateArgs),
    /// Run every algorithm on every built-in benchmark.
    Bench(BenchArgs),
    /// Print an instance as JSON.
    Export(ExportArgs),
}

#[derive(Args, Debug)]
struct SolverArgs {
    /// FIS population size.
    #[arg(long, default_value_t = 20)]
    population: usize,
    /// FIS iteration budget.
    #[arg(long, default_value_t = 100)]
    iterations: usize,
    /// Annealing cooling factor.
    #[arg(long, default_value_t = 0.990)]
    alpha: f64,
    /// Annealing start temperature.
    #[arg(long = "t-initial", default_value_t = 2984.975)]
    t_initial: f64,
    /// Annealing final temperature.
    #[arg(long = "t-final", default_value_t = 0.0)]
    t_final: f64,
    /// Rule-base file (overrides $TSRED_RULEBASE).
    #[arg(long = "rule-base")]
    rule_base: Option<PathBuf>,
    /// Record 0 ms for every run so output is reproducible byte for byte.
    #[arg(long = "no-timing")]
    no_timing: bool,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    algorithm: Algorithm,
    /// Instance file or `builtin:NAME`.
    #[arg(long)]
    instance: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[command(flatten)]
    solver: SolverArgs,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    instance: String,
    /// List every minimum cover.
    #[arg(long)]
    enumerate: bool,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long)]
    instance: String,
    /// Comma-separated test ids.
    #[arg(long, value_delimiter = ',')]
    selection: Vec<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Builtin,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_enum, default_value_t = Suite::Builtin)]
    suite: Suite,
    #[arg(long, default_value_t = 15)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Also write the JSON summary to this file.
    #[arg(long)]
    json: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[arg(long)]
    instance: String,
}

/// A failure carrying the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    error: anyhow::Error,
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        error: error.into(),
    }
}

fn instance_error(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: EXIT_INSTANCE,
        error: error.into(),
    }
}

/// Resolves `builtin:NAME` or reads and validates an instance file.
pub fn load_instance(spec: &str) -> anyhow::Result<Instance> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return builtin(name).with_context(|| {
            format!("available builtins: {}", BUILTIN_NAMES.join(", "))
        });
    }
    let text = std::fs::read_to_string(Path::new(spec))
        .with_context(|| format!("cannot read instance file `{spec}`"))?;
    let doc = parse_instance(&text).with_context(|| format!("cannot parse `{spec}`"))?;
    Ok(validate_instance(&doc)?)
}

fn load_rule_base(path: Option<&Path>) -> anyhow::Result<RuleBase<f64>> {
    let env_path = std::env::var_os(RULEBASE_ENV).map(PathBuf::from);
    match path.map(Path::to_path_buf).or(env_path) {
        None => Ok(default_rule_base()),
        Some(p) => {
            let text = std::fs::read_to_string(&p)
                .with_context(|| format!("cannot read rule base `{}`", p.display()))?;
            parse_rule_base(&text).with_context(|| format!("invalid rule base `{}`", p.display()))
        }
    }
}

fn settings(args: &SolverArgs) -> Result<SolverSettings, Failure> {
    let mut s = SolverSettings {
        rule_base: load_rule_base(args.rule_base.as_deref()).map_err(usage)?,
        timing: !args.no_timing,
        ..SolverSettings::default()
    };
    s.fis.population_size = args.population;
    s.fis.max_iterations = args.iterations;
    s.fis.validate().map_err(usage)?;
    s.sa.alpha = args.alpha;
    s.sa.t_initial = args.t_initial;
    s.sa.t_final = args.t_final;
    s.sa.validate().map_err(usage)?;
    Ok(s)
}

fn write_output(out: &mut dyn Write, path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n"))
            .with_context(|| format!("cannot write `{}`", p.display())),
        None => Ok(writeln!(out, "{text}")?),
    }
}

fn solve(args: SolveArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if args.runs == 0 {
        return Err(usage(anyhow::anyhow!("--runs must be at least 1")));
    }
    let instance = load_instance(&args.instance).map_err(instance_error)?;
    let settings = settings(&args.solver)?;
    let report = run_many(&instance, args.algorithm, args.seed, args.runs, &settings)
        .map_err(|e| usage(e))?;
    let text = write_report(&report, &instance).map_err(instance_error)?;
    write_output(out, args.output.as_deref(), &text).map_err(usage)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct OracleOutput {
    instance: String,
    minimum: usize,
    reduction_percent: String,
    witness: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    covers: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    complete: Option<bool>,
}

fn oracle(args: OracleArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let instance = load_instance(&args.instance).map_err(instance_error)?;
    let ids = |sel: &[usize]| -> Vec<String> {
        sel.iter().map(|&t| instance.test_id(t).to_string()).collect()
    };
    let result = minimum_cover(&instance).map_err(instance_error)?;
    let (covers, complete) = if args.enumerate {
        let e = enumerate_minimum_covers(&instance, args.cap).map_err(instance_error)?;
        (Some(e.covers.iter().map(|c| ids(c)).collect()), Some(e.complete))
    } else {
        (None, None)
    };
    let output = OracleOutput {
        instance: instance.name().to_string(),
        minimum: result.minimum,
        reduction_percent: reduction_percent(instance.n_tests(), result.minimum).display(),
        witness: ids(&result.witness),
        covers,
        complete,
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&output).unwrap()).map_err(usage)?;
    Ok(EXIT_OK)
}

fn validate(args: ValidateArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let instance = load_instance(&args.instance).map_err(instance_error)?;
    let mut selection = Vec::new();
    for id in args.selection.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        let t = instance
            .test_index(id)
            .ok_or_else(|| usage(anyhow::anyhow!("unknown test id `{id}` in {}", instance.name())))?;
        if !selection.contains(&t) {
            selection.push(t);
        }
    }
    let uncovered = instance.uncovered(selection.iter().copied());
    if uncovered.is_empty() {
        writeln!(
            out,
            "VALID size {} reduction {}",
            selection.len(),
            reduction_percent(instance.n_tests(), selection.len())
        )
        .map_err(usage)?;
        Ok(EXIT_OK)
    } else {
        let names: Vec<&str> = uncovered
            .iter()
            .map(|&r| instance.requirements()[r].id.as_str())
            .collect();
        writeln!(out, "INVALID uncovered: {}", names.join(", ")).map_err(usage)?;
        Ok(EXIT_INVALID)
    }
}

fn bench(args: BenchArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if args.runs == 0 {
        return Err(usage(anyhow::anyhow!("--runs must be at least 1")));
    }
    let Suite::Builtin = args.suite;
    let instances: Vec<Instance> = BUILTIN_NAMES.iter().map(|n| builtin(n).unwrap()).collect();
    let settings = settings(&args.solver)?;
    let summary = bench_suite(&instances, args.runs, args.seed, &settings).map_err(usage)?;
    let json = summary.to_json();
    if let Some(path) = &args.json {
        std::fs::write(path, format!("{json}\n"))
            .with_context(|| format!("cannot write `{}`", path.display()))
            .map_err(usage)?;
    }
    match args.format {
        Format::Table => write!(out, "{}", summary.render_table()),
        Format::Json => writeln!(out, "{json}"),
    }
    .map_err(usage)?;
    Ok(EXIT_OK)
}

fn export(args: ExportArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let instance = load_instance(&args.instance).map_err(instance_error)?;
    writeln!(out, "{}", tsred_core::io::write_instance(&instance.to_document())).map_err(usage)?;
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a, out),
        Command::Oracle(a) => oracle(a, out),
        Command::Validate(a) => validate(a, out),
        Command::Bench(a) => bench(a, out),
        Command::Export(a) => export(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, error }) => {
            let _ = writeln!(err, "error: {error:#}");
            code
        }
    }
}
