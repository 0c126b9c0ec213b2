//! The `cobench` command line: generate, encode, solve, oracle, verify,
//! reward, evaluate, dataset and report.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error
//! (including an infeasible solution passed to `verify` and an instance
//! over the oracle budget), 3 endpoint failure. Diagnostics go to
//! standard error as one line each.
//!
//! Defaults can be supplied by a JSON config file (`--config`) holding one
//! object per subcommand, keyed by long flag name:
//! `{"generate": {"kind": "tsp", "size-range": "10-30"}}`. Flags given on
//! the command line win over the file.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::Value;

use crate::eval::{
    evaluate, load_records, ChatCompletionsClient, Endpoint, EndpointConfig, EndpointError, EvalError, EvalOptions,
    EvalRecord, EvalReport, MockEndpoint, MockPolicyConfig,
};
use crate::heuristics::reference::best_reference;
use crate::heuristics::{brute_force, solve, AcoConfig, Budget, HeuristicError, HeuristicMethod};
use crate::problems::{
    gen_instance, Distribution, GenConfig, GraphFamily, Instance, InstanceFile, ProblemError, ProblemKind,
    ReferenceSolution, Solution, SolutionSource,
};
use crate::rewards::{total_reward, RewardConfig, RewardError, RewardWeights};
use crate::tai::{encode, parse, render_prompt, DEFAULT_FEATURE_K};
use crate::verify::{check, objective};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Endpoint(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Endpoint(_) => 3,
        }
    }
}

impl From<ProblemError> for CliError {
    fn from(e: ProblemError) -> Self {
        match e {
            ProblemError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<HeuristicError> for CliError {
    fn from(e: HeuristicError) -> Self {
        match e {
            HeuristicError::UnknownMethod(_) | HeuristicError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Endpoint(EndpointError::InvalidConfig(_)) | EvalError::InvalidConfig(_) => {
                CliError::Usage(e.to_string())
            }
            EvalError::Endpoint(_) => CliError::Endpoint(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<EndpointError> for CliError {
    fn from(e: EndpointError) -> Self {
        EvalError::from(e).into()
    }
}

impl From<RewardError> for CliError {
    fn from(e: RewardError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(format!("malformed JSON: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "cobench", version, about = "Combinatorial optimization benchmark toolkit", args_override_self = true)]
struct Cli {
    /// JSON file with per-subcommand flag defaults; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate random instances.
    Generate(GenerateArgs),
    /// Render instances as text-attributed instances or prompts.
    Encode(EncodeArgs),
    /// Solve instances with a baseline heuristic or the reference pipeline.
    Solve(SolveArgs),
    /// Prove optima by exhaustive search; refuses instances over budget.
    Oracle(OracleArgs),
    /// Check a solution and print its feasibility report.
    Verify(VerifyArgs),
    /// Print the feasibility, optimality and total reward of a solution.
    Reward(RewardArgs),
    /// Evaluate a model endpoint (or the mock policy) on instances.
    Evaluate(EvaluateArgs),
    /// Export supervised fine-tuning records.
    Dataset(DatasetArgs),
    /// Render an evaluation report or results file as text.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DistArg {
    Uniform,
    /// Gaussian mixture with 2 clusters, scale 5.
    Gm2,
    /// Gaussian mixture with 3 clusters, scale 10.
    Gm3,
    Clustered,
    Mixed,
}

impl From<DistArg> for Distribution {
    fn from(d: DistArg) -> Self {
        match d {
            DistArg::Uniform => Distribution::Uniform,
            DistArg::Gm2 => Distribution::Gm { clusters: 2, scale: 5 },
            DistArg::Gm3 => Distribution::Gm { clusters: 3, scale: 10 },
            DistArg::Clustered => Distribution::Clustered,
            DistArg::Mixed => Distribution::Mixed,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GraphArg {
    Er,
    Ba,
}

fn parse_kind(s: &str) -> Result<ProblemKind, String> {
    s.parse().map_err(|e: ProblemError| e.to_string())
}

/// `"10-30"`, `"10..30"` or `"10"`.
fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    let (lo, hi) = match s.split_once("..").or_else(|| s.split_once('-')) {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {lo}-{hi}"));
    }
    Ok((lo, hi))
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: ProblemKind,
    /// Exact size: nodes, or jobs for scheduling kinds.
    #[arg(long, conflicts_with = "size_range")]
    n: Option<usize>,
    /// Inclusive size range, e.g. `10-30`.
    #[arg(long, value_parser = parse_range)]
    size_range: Option<(usize, usize)>,
    /// Machine-count range for scheduling kinds (defaults to the job range).
    #[arg(long, value_parser = parse_range)]
    machines: Option<(usize, usize)>,
    #[arg(long, value_enum, default_value = "uniform")]
    dist: DistArg,
    /// Graph family for MIS/MVC (default: ER or BA at random).
    #[arg(long, value_enum)]
    graph: Option<GraphArg>,
    /// Number of instances; instance i uses seed + i.
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (default standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    /// Instance file (single instance or JSON lines).
    #[arg(long)]
    input: PathBuf,
    /// Features per entity.
    #[arg(long, default_value_t = DEFAULT_FEATURE_K)]
    k: usize,
    /// Emit the full fine-tuning prompt instead of TAI records.
    #[arg(long)]
    prompt: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    /// Heuristic name (nn, fi, aco, neh, ...) or `reference` for the
    /// strongest available solver.
    #[arg(long)]
    method: String,
    /// Override the ACO ant count.
    #[arg(long)]
    ants: Option<usize>,
    /// Override the ACO iteration count.
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
    /// Expected problem kind; instances of another kind are rejected.
    #[arg(long, value_parser = parse_kind)]
    kind: Option<ProblemKind>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(id = "answer", required = true, multiple = false, args = ["solution", "solution_file"])]
struct SolutionInput {
    /// Solution text in the model output format, e.g. `Set: [0, 2]`.
    #[arg(long)]
    solution: Option<String>,
    /// File holding solution text or a reference-solution JSON document.
    #[arg(long)]
    solution_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    /// Instance id when the input holds several instances.
    #[arg(long)]
    id: Option<String>,
    #[command(flatten)]
    answer: SolutionInput,
}

#[derive(Debug, Args)]
struct RewardArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    id: Option<String>,
    #[command(flatten)]
    answer: SolutionInput,
    /// Reference objective; computed with the reference solver when absent.
    #[arg(long)]
    reference: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Reference solutions (as written by `solve`/`oracle`).
    #[arg(long)]
    references: PathBuf,
    /// Chat-completions base URL; the bearer token is read from COBENCH_API_KEY.
    #[arg(long, required_unless_present = "mock")]
    endpoint_url: Option<String>,
    #[arg(long, default_value = "default")]
    model: String,
    /// Use the built-in mock policy instead of a remote endpoint.
    #[arg(long, conflicts_with = "endpoint_url")]
    mock: bool,
    #[arg(long, default_value_t = 0.0)]
    mock_infeasible_prob: f64,
    #[arg(long, default_value_t = 0)]
    mock_swaps: usize,
    #[arg(long, default_value_t = 0.0)]
    mock_format_fail_prob: f64,
    /// Samples per instance (Best-of-N).
    #[arg(long, default_value_t = 1)]
    bon: usize,
    /// Sampling temperature (default 0 for N = 1, 1.0 for Best-of-N).
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long, default_value_t = 0.7)]
    top_p: f64,
    #[arg(long, default_value_t = 4096)]
    max_tokens: u32,
    /// Request timeout in seconds.
    #[arg(long, default_value_t = 120)]
    timeout: u64,
    #[arg(long, default_value_t = 3)]
    retries: u32,
    #[arg(long, default_value_t = 500)]
    backoff_ms: u64,
    /// The server ignores `n`; send one request per sample.
    #[arg(long)]
    no_n: bool,
    /// Independent repetitions per instance, best kept (repeat-best).
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long, default_value_t = DEFAULT_FEATURE_K)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Concurrent instances (default: available cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// JSON-lines results file to persist to and resume from.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Report file (JSON); the text summary always goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DatasetArgs {
    #[arg(long)]
    input: PathBuf,
    /// Labels (reference solutions as written by `solve`/`oracle`).
    #[arg(long)]
    solutions: PathBuf,
    #[arg(long, default_value_t = DEFAULT_FEATURE_K)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Evaluation report (JSON) or results file (JSON lines).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs the command line and returns the process exit code, printing any
/// error to standard error as a single line.
pub fn main_with(argv: Vec<OsString>) -> i32 {
    let stdout = std::io::stdout();
    match run(argv, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace(['\n', '\r'], " ");
            eprintln!("cobench: error: {}", msg.trim());
            e.exit_code()
        }
    }
}

/// Parses `argv` (including the program name) and executes the command,
/// writing human-readable output to `stdout`.
pub fn run(argv: Vec<OsString>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let original: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let merged = merge_config(argv)?;
    let cli = match Cli::try_parse_from(merged) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                write!(stdout, "{e}")?;
                return Ok(());
            }
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            return Err(CliError::Usage(first.trim_start_matches("error: ").to_string()));
        }
    };
    let ctx = Context { command_line: command_line(&original) };
    match cli.command {
        Command::Generate(a) => cmd_generate(&ctx, a, stdout),
        Command::Encode(a) => cmd_encode(&ctx, a, stdout),
        Command::Solve(a) => cmd_solve(&ctx, a, stdout),
        Command::Oracle(a) => cmd_oracle(&ctx, a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Reward(a) => cmd_reward(a, stdout),
        Command::Evaluate(a) => cmd_evaluate(&ctx, a, stdout),
        Command::Dataset(a) => cmd_dataset(&ctx, a, stdout),
        Command::Report(a) => cmd_report(a, stdout),
    }
}

const SUBCOMMANDS: [&str; 9] = ["generate", "encode", "solve", "oracle", "verify", "reward", "evaluate", "dataset", "report"];

/// Inserts the config file's flags for the chosen subcommand right after
/// the subcommand name, so that explicit flags (parsed later) override them.
fn merge_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let args: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if a == "--config" {
            path = args.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let Some(pos) = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("config file {path}: {e}")))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config file {path}: {e}")))?;
    let Some(root) = doc.as_object() else {
        return Err(CliError::Usage(format!("config file {path}: expected a JSON object")));
    };
    let mut injected = Vec::new();
    if let Some(section) = root.get(&args[pos]) {
        let section = section
            .as_object()
            .ok_or_else(|| CliError::Usage(format!("config file {path}: section `{}` is not an object", args[pos])))?;
        for (key, value) in section {
            let flag = format!("--{key}");
            let values = match value {
                Value::Array(items) => items.clone(),
                other => vec![other.clone()],
            };
            for v in values {
                match v {
                    Value::Bool(true) => injected.push(flag.clone()),
                    Value::Bool(false) | Value::Null => {}
                    Value::String(s) => injected.extend([flag.clone(), s]),
                    Value::Number(n) => injected.extend([flag.clone(), n.to_string()]),
                    _ => return Err(CliError::Usage(format!("config file {path}: unsupported value for `{key}`"))),
                }
            }
        }
    }
    let mut out: Vec<OsString> = argv[..=pos].to_vec();
    out.extend(injected.into_iter().map(OsString::from));
    out.extend(argv[pos + 1..].iter().cloned());
    Ok(out)
}

fn command_line(args: &[String]) -> String {
    let quote = |a: &String| {
        if a.is_empty() || a.contains(|c: char| c.is_whitespace() || c == '"' || c == '\'') {
            format!("'{}'", a.replace('\'', "'\\''"))
        } else {
            a.clone()
        }
    };
    std::iter::once("cobench".to_string()).chain(args.iter().skip(1).map(quote)).collect::<Vec<_>>().join(" ")
}

struct Context {
    command_line: String,
}

impl Context {
    fn provenance(&self, seed: Option<u64>) -> BTreeMap<String, String> {
        BTreeMap::from([
            ("tool_version".to_string(), TOOL_VERSION.to_string()),
            ("command_line".to_string(), self.command_line.clone()),
            ("seed".to_string(), seed.map_or_else(|| "none".to_string(), |s| s.to_string())),
        ])
    }
}

fn emit(out: &Option<PathBuf>, content: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) if path.as_os_str() != "-" => {
            std::fs::write(path, content).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
        }
        _ => Ok(stdout.write_all(content.as_bytes())?),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

/// Reads a file holding one pretty-printed JSON document or JSON lines.
fn read_documents<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let text = read_text(path)?;
    if let Ok(one) = serde_json::from_str::<T>(&text) {
        return Ok(vec![one]);
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(no, l)| {
            serde_json::from_str(l).map_err(|e| CliError::Data(format!("{}:{}: {e}", path.display(), no + 1)))
        })
        .collect()
}

fn read_instances(path: &Path) -> Result<Vec<Instance>, CliError> {
    let files: Vec<InstanceFile> = read_documents(path)?;
    if files.is_empty() {
        return Err(CliError::Data(format!("{} holds no instances", path.display())));
    }
    files.into_iter().map(|f| Instance::try_from(f).map_err(CliError::from)).collect()
}

fn pick_instance(path: &Path, id: Option<&str>) -> Result<Instance, CliError> {
    let mut all = read_instances(path)?;
    match id {
        Some(id) => all
            .into_iter()
            .find(|i| i.id == id)
            .ok_or_else(|| CliError::Data(format!("no instance `{id}` in {}", path.display()))),
        None if all.len() == 1 => Ok(all.remove(0)),
        None => Err(CliError::Usage(format!("{} holds {} instances; pass --id", path.display(), all.len()))),
    }
}

fn read_references(path: &Path) -> Result<BTreeMap<String, ReferenceSolution>, CliError> {
    Ok(read_documents::<ReferenceSolution>(path)?.into_iter().map(|r| (r.instance_id.clone(), r)).collect())
}

/// Serializes documents: one pretty document, or JSON lines for several.
fn render_documents<T: serde::Serialize>(docs: &[T]) -> Result<String, CliError> {
    let mut out = String::new();
    if docs.len() == 1 {
        out.push_str(&serde_json::to_string_pretty(&docs[0])?);
        out.push('\n');
    } else {
        for d in docs {
            out.push_str(&serde_json::to_string(d)?);
            out.push('\n');
        }
    }
    Ok(out)
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let threads = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        return Err(CliError::Usage("--jobs must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| CliError::Usage(e.to_string()))
}

fn cmd_generate(ctx: &Context, a: GenerateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if a.count == 0 {
        return Err(CliError::Usage("--count must be positive".into()));
    }
    let mut docs = Vec::with_capacity(a.count as usize);
    for i in 0..a.count {
        let seed = a.seed.wrapping_add(i);
        let mut cfg = GenConfig::default_for(a.kind, seed).with_distribution(a.dist.into());
        if let Some(n) = a.n {
            cfg = cfg.with_size(n, n);
        }
        if let Some((lo, hi)) = a.size_range {
            cfg = cfg.with_size(lo, hi);
        }
        if let Some((lo, hi)) = a.machines {
            cfg = cfg.with_machines(lo, hi);
        }
        match a.graph {
            Some(GraphArg::Er) => cfg = cfg.with_graph_family(GraphFamily::DEFAULT_ER),
            Some(GraphArg::Ba) => cfg = cfg.with_graph_family(GraphFamily::DEFAULT_BA),
            None => {}
        }
        let mut inst = gen_instance(a.kind, &cfg)?;
        inst.meta.extend(ctx.provenance(Some(seed)));
        docs.push(InstanceFile::from(inst));
    }
    emit(&a.out, &render_documents(&docs)?, stdout)
}

fn cmd_encode(ctx: &Context, a: EncodeArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let instances = read_instances(&a.input)?;
    let provenance = ctx.provenance(None);
    let mut out = String::new();
    for inst in &instances {
        let tai = encode(inst, a.k);
        let record = if a.prompt {
            serde_json::json!({ "instance_id": inst.id, "kind": inst.kind, "prompt": render_prompt(&tai), "provenance": provenance })
        } else {
            serde_json::json!({
                "instance_id": inst.id,
                "kind": inst.kind,
                "instruction": tai.instruction,
                "input": tai.input,
                "expected_output": tai.expected_output,
                "provenance": provenance,
            })
        };
        out.push_str(&serde_json::to_string(&record)?);
        out.push('\n');
    }
    emit(&a.out, &out, stdout)
}

fn solve_one(inst: &Instance, a: &SolveArgs) -> Result<ReferenceSolution, CliError> {
    let (solution, value, source) = if a.method == "reference" {
        let (sol, value, source) = best_reference(inst, a.seed)?;
        (sol, value.value, source)
    } else {
        let mut method = HeuristicMethod::parse_for(&a.method, inst.kind)?;
        if let HeuristicMethod::Aco { ants, iterations } = &mut method {
            *ants = a.ants.unwrap_or(*ants);
            *iterations = a.iterations.unwrap_or(*iterations);
            AcoConfig { ants: *ants, iterations: *iterations, ..AcoConfig::default_for(inst.kind, a.seed) }.validate()?;
        }
        let sol = solve(inst, method, a.seed)?;
        let value = objective(inst, &sol).map_err(|e| CliError::Data(format!("{}: {e}", inst.id)))?.value;
        (sol, value, SolutionSource::Heuristic(method.name().to_string()))
    };
    Ok(ReferenceSolution { instance_id: inst.id.clone(), solution, objective: value, source, provenance: BTreeMap::new() })
}

fn cmd_solve(ctx: &Context, a: SolveArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let instances = read_instances(&a.input)?;
    let results: Vec<Result<ReferenceSolution, CliError>> =
        pool(a.jobs)?.install(|| instances.par_iter().map(|inst| solve_one(inst, &a)).collect());
    let provenance = ctx.provenance(Some(a.seed));
    let mut docs = Vec::with_capacity(results.len());
    for (inst, r) in instances.iter().zip(results) {
        let mut doc = r.map_err(|e| prefix(e, &inst.id))?;
        doc.provenance = provenance.clone();
        docs.push(doc);
    }
    emit(&a.out, &render_documents(&docs)?, stdout)
}

fn prefix(e: CliError, id: &str) -> CliError {
    match e {
        CliError::Usage(m) => CliError::Usage(m),
        CliError::Data(m) => CliError::Data(format!("{id}: {m}")),
        CliError::Endpoint(m) => CliError::Endpoint(format!("{id}: {m}")),
    }
}

fn cmd_oracle(ctx: &Context, a: OracleArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let instances = read_instances(&a.input)?;
    let budget = Budget::default();
    for inst in &instances {
        if let Some(kind) = a.kind {
            if inst.kind != kind {
                return Err(CliError::Data(format!("{}: expected a {kind} instance, found {}", inst.id, inst.kind)));
            }
        }
        budget.admit(inst).map_err(|e| prefix(e.into(), &inst.id))?;
    }
    let results: Vec<_> = pool(a.jobs)?.install(|| instances.par_iter().map(|inst| brute_force(inst, &budget)).collect());
    let provenance = ctx.provenance(None);
    let mut docs = Vec::with_capacity(results.len());
    for (inst, r) in instances.iter().zip(results) {
        let (solution, value) = r.map_err(|e| prefix(e.into(), &inst.id))?;
        docs.push(ReferenceSolution {
            instance_id: inst.id.clone(),
            solution,
            objective: value.value,
            source: SolutionSource::Oracle,
            provenance: provenance.clone(),
        });
    }
    emit(&a.out, &render_documents(&docs)?, stdout)
}

/// The solution given on the command line: model-format text, or a
/// reference-solution document.
fn read_answer(answer: &SolutionInput, inst: &Instance) -> Result<(Option<Solution>, String), CliError> {
    let text = match (&answer.solution, &answer.solution_file) {
        (Some(t), _) => t.clone(),
        (None, Some(path)) => read_text(path)?,
        (None, None) => return Err(CliError::Usage("pass --solution or --solution-file".into())),
    };
    if let Ok(doc) = serde_json::from_str::<ReferenceSolution>(&text) {
        return Ok((Some(doc.solution), text));
    }
    Ok((parse(&text, inst.kind).solution, text))
}

fn cmd_verify(a: VerifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let inst = pick_instance(&a.input, a.id.as_deref())?;
    let (solution, _) = read_answer(&a.answer, &inst)?;
    let Some(sol) = solution else {
        writeln!(stdout, "format error: no {} solution found", inst.kind)?;
        return Err(CliError::Data(format!("{}: solution text could not be parsed", inst.id)));
    };
    let report = check(&inst, &sol);
    if report.feasible {
        let value = objective(&inst, &sol).map_err(|e| CliError::Data(e.to_string()))?.value;
        writeln!(stdout, "feasible, objective {}", format_objective(value, inst.kind))?;
        for m in &report.margins {
            writeln!(stdout, "margin {}: {:.4}", m.name, m.value)?;
        }
        Ok(())
    } else {
        let failed = report.failed().join(", ");
        writeln!(stdout, "infeasible, failed constraints: {failed}")?;
        Err(CliError::Data(format!("{}: infeasible solution ({failed})", inst.id)))
    }
}

fn format_objective(value: f64, kind: ProblemKind) -> String {
    if kind.is_routing() && kind != ProblemKind::Op {
        format!("{value:.2}")
    } else {
        format!("{}", value.round() as i64)
    }
}

fn cmd_reward(a: RewardArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let inst = pick_instance(&a.input, a.id.as_deref())?;
    let (_, text) = read_answer(&a.answer, &inst)?;
    let parsed = match serde_json::from_str::<ReferenceSolution>(&text) {
        Ok(doc) => crate::tai::ParsedSolution { solution: Some(doc.solution), stated_objective: None, format_ok: true },
        Err(_) => parse(&text, inst.kind),
    };
    let report = crate::verify::check_parsed(&inst, &parsed);
    let value = match (&parsed.solution, report.feasible) {
        (Some(sol), true) => objective(&inst, sol).ok().map(|o| o.value),
        _ => None,
    };
    let reference = match (a.reference, report.feasible) {
        (Some(r), _) => Some(r),
        (None, true) => Some(best_reference(&inst, a.seed)?.1.value),
        (None, false) => None,
    };
    let w = RewardWeights::for_kind(inst.kind);
    let r = total_reward(&report, value, reference, inst.kind, &w, &RewardConfig::default())?;
    writeln!(stdout, "R_f {:.4}", r.feasibility)?;
    writeln!(stdout, "R_o {:.4}", r.optimality)?;
    writeln!(stdout, "total {:.4}", r.total)?;
    Ok(())
}

fn cmd_evaluate(ctx: &Context, a: EvaluateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let instances = read_instances(&a.input)?;
    let refs = read_references(&a.references)?;
    let mut objectives = BTreeMap::new();
    for inst in &instances {
        let r = refs.get(&inst.id).ok_or_else(|| CliError::Data(format!("no reference for instance {}", inst.id)))?;
        objectives.insert(inst.id.clone(), r.objective);
    }
    let jobs = a.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let opts = EvalOptions {
        n_samples: a.bon,
        repeats: a.repeats,
        seed: a.seed,
        max_parallel: jobs,
        feature_k: a.k,
        results_path: a.resume.clone(),
    };
    let endpoint: Box<dyn Endpoint> = if a.mock {
        let cfg = MockPolicyConfig {
            infeasible_prob: a.mock_infeasible_prob,
            swap_count: a.mock_swaps,
            format_fail_prob: a.mock_format_fail_prob,
            seed: a.seed,
        };
        let entries = instances.iter().map(|i| (i.clone(), refs[&i.id].solution.clone()));
        Box::new(MockEndpoint::new(cfg, entries).map_err(|e| CliError::Usage(e.to_string()))?)
    } else {
        let default_temperature = if a.bon > 1 { EndpointConfig::BON_TEMPERATURE } else { 0.0 };
        let cfg = EndpointConfig {
            base_url: a.endpoint_url.clone().expect("clap requires --endpoint-url without --mock"),
            model: a.model.clone(),
            temperature: a.temperature.unwrap_or(default_temperature),
            top_p: a.top_p,
            max_tokens: a.max_tokens,
            n_samples: a.bon,
            timeout_secs: a.timeout,
            max_parallel: jobs,
            retries: a.retries,
            backoff_ms: a.backoff_ms,
            supports_n: !a.no_n,
        };
        Box::new(ChatCompletionsClient::new(cfg)?)
    };
    let records = evaluate(endpoint.as_ref(), &instances, &objectives, &opts)?;
    let failures = records.iter().filter(|r| r.error.is_some()).count();
    let report = EvalReport::new(records, ctx.provenance(Some(a.seed)));
    if let Some(path) = &a.out {
        let mut json = serde_json::to_string_pretty(&report)?;
        json.push('\n');
        emit(&Some(path.clone()), &json, stdout)?;
    }
    stdout.write_all(report.render_text().as_bytes())?;
    if failures > 0 {
        let first = report.records.iter().find_map(|r| r.error.clone()).unwrap_or_default();
        return Err(CliError::Endpoint(format!("{failures} of {} instances failed at the endpoint: {first}", report.records.len())));
    }
    Ok(())
}

fn cmd_dataset(ctx: &Context, a: DatasetArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let instances = read_instances(&a.input)?;
    let labels = read_references(&a.solutions)?;
    let provenance = ctx.provenance(None);
    let mut out = String::new();
    for inst in &instances {
        let label = labels.get(&inst.id).ok_or_else(|| CliError::Data(format!("no label for instance {}", inst.id)))?;
        let record = crate::eval::sft_record(inst, &label.solution, Some(label.objective), a.k)?;
        let mut value = serde_json::to_value(&record)?;
        value["provenance"] = serde_json::to_value(&provenance)?;
        out.push_str(&serde_json::to_string(&value)?);
        out.push('\n');
    }
    emit(&a.out, &out, stdout)
}

fn cmd_report(a: ReportArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let text = read_text(&a.input)?;
    let report = match serde_json::from_str::<EvalReport>(&text) {
        Ok(r) => r,
        Err(_) => {
            let records: Vec<EvalRecord> = load_records(&a.input)?;
            if records.is_empty() {
                return Err(CliError::Data(format!("{} holds neither a report nor records", a.input.display())));
            }
            EvalReport::new(records, BTreeMap::new())
        }
    };
    let mut rendered = report.render_text();
    if report.records.iter().any(|r| r.error.is_some()) {
        let _ = writeln!(rendered, "# {} records carry endpoint errors", report.records.iter().filter(|r| r.error.is_some()).count());
    }
    emit(&a.out, &rendered, stdout)
}
