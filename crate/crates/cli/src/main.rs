//! Command-line front end for the rendezvous game toolkit.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation/data error,
//! 3 value mismatch when `--check` is given.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rendezvous_core as core;
use rendezvous_core::{
    build_table, closed_form_cycle_quantum, exact_win_probability, nst_attainable, nst_bound,
    optimize, simulate, ClassicalStrategy, GameConfig, Graph, Mitigation, NoiseParams,
    OptimizerConfig, QuantumTable, QubitStrategy, QutritStrategy, RoleSplitC3, SameStartRule,
    Sampler, SimSource, Strategy, TableMode, TieComponents,
};

const USAGE_EXIT: u8 = 1;
const VALIDATION_EXIT: u8 = 2;
const CHECK_EXIT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "rendezvous",
    version,
    about = "One-step rendezvous games on cycle and cubic graphs: exact values, optimization, tables, simulation"
)]
struct Cli {
    /// Cap the worker thread count for parallel sections.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact winning probability of a strategy on a graph.
    Exact(ExactArgs),
    /// Closed-form winning probability across an angle grid on a cycle.
    Sweep(SweepArgs),
    /// Maximize the winning probability over per-site rotations (cubic graphs).
    Optimize(OptimizeArgs),
    /// Finite-trial simulation with analytic or table outcome sources.
    Simulate(SimulateArgs),
    /// Build, inspect, or rewrite measurement-outcome tables.
    #[command(subcommand)]
    Table(TableCommand),
    /// Non-signalling ceiling and its attainability on a cycle.
    Nst(NstArgs),
}

#[derive(Args)]
struct GameArgs {
    /// Graph name: C<n>, K3, K4, 2K4, Y3, cubic6, Q3, or a path to an
    /// adjacency-list file.
    #[arg(long)]
    graph: String,
    /// Count transpositions along a shared edge as meetings (0 or 1).
    #[arg(long, default_value_t = 0)]
    e: u8,
    /// Allow both players to start on the same vertex (0 or 1).
    #[arg(long, default_value_t = 1)]
    s: u8,
    /// Same-start handling: check co-location first (auto-win) or later.
    #[arg(long, value_enum, default_value_t = VariantArg::Later)]
    variant: VariantArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    First,
    Later,
}

impl GameArgs {
    fn graph(&self) -> core::Result<Graph> {
        resolve_graph(&self.graph)
    }

    fn config(&self) -> Result<GameConfig, String> {
        let e = match self.e {
            0 => false,
            1 => true,
            other => return Err(format!("--e must be 0 or 1, got {other}")),
        };
        let s = match self.s {
            0 => false,
            1 => true,
            other => return Err(format!("--s must be 0 or 1, got {other}")),
        };
        let variant = match self.variant {
            VariantArg::First => SameStartRule::CheckFirst,
            VariantArg::Later => SameStartRule::CheckLater,
        };
        Ok(GameConfig::new(e, s, variant))
    }
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    game: GameArgs,
    /// Builtin strategy name or a strategy JSON file.
    #[arg(long)]
    strategy: String,
    /// Write the result as JSON here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Expected probability; exit 3 if the computed value differs by more
    /// than --tol.
    #[arg(long)]
    check: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    game: GameArgs,
    /// Grid start (radians, or append `deg`).
    #[arg(long, default_value = "0")]
    from: String,
    /// Grid end, inclusive (radians, or append `deg`).
    #[arg(long, default_value = "3.141592653589793")]
    to: String,
    /// Grid step (radians, or append `deg`).
    #[arg(long, default_value = "0.001")]
    step: String,
    /// Output CSV path (columns theta_rad,win_probability).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    game: GameArgs,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Objective-evaluation budget per restart.
    #[arg(long, default_value_t = 6000)]
    max_evals: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = TieArg::Auto)]
    tie_components: TieArg,
    /// Write the optimization result JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TieArg {
    Auto,
    On,
    Off,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    game: GameArgs,
    /// Builtin strategy name or a strategy JSON file.
    #[arg(long)]
    strategy: String,
    /// Trial count; plain integer or `2^k`.
    #[arg(long)]
    trials: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Consume outcomes from this table CSV instead of sampling analytically.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TableModeArg::Seq)]
    table_mode: TableModeArg,
    /// `none`, or `discard:<classical-strategy>` to replace invalid readouts
    /// with moves from the named fallback.
    #[arg(long, default_value = "none")]
    mitigation: String,
    /// Write the result JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the convergence CSV here.
    #[arg(long)]
    convergence: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableModeArg {
    Seq,
    Recycle,
    Random,
}

#[derive(Subcommand)]
enum TableCommand {
    /// Sample a fresh table of shots for every ordered start pair.
    Build(TableBuildArgs),
    /// Validate a table CSV and print its summary.
    Import(TableImportArgs),
    /// Rewrite a table CSV in canonical order.
    Export(TableExportArgs),
}

#[derive(Args)]
struct TableBuildArgs {
    /// Graph name or adjacency-list file.
    #[arg(long)]
    graph: String,
    /// Builtin strategy name or a strategy JSON file (qubit or qutrit).
    #[arg(long)]
    strategy: String,
    #[arg(long, default_value_t = 20000)]
    shots: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Gate failure probability; enables the noisy sampler together with
    /// --n-gates.
    #[arg(long)]
    p_gate: Option<f64>,
    /// Primitive gate count of the transpiled circuit.
    #[arg(long)]
    n_gates: Option<u32>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TableImportArgs {
    #[arg(long)]
    path: PathBuf,
    /// Write the summary JSON here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct TableExportArgs {
    #[arg(long)]
    path: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct NstArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    e: u8,
    /// Write the result JSON here.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn main() -> ExitCode {
    // die quietly when a downstream pipe closes, like any other filter
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help and version requests are successes, not usage errors
            let benign = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = err.print();
            return if benign {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(USAGE_EXIT)
            };
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: could not configure {threads} worker threads: {err}");
            return ExitCode::from(VALIDATION_EXIT);
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<CliError>()
                .map(|e| e.exit_code())
                .unwrap_or(VALIDATION_EXIT);
            ExitCode::from(code)
        }
    }
}

/// Classified failure, so the process exit code reflects the error family.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Mismatch(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Mismatch(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => USAGE_EXIT,
            CliError::Mismatch(_) => CHECK_EXIT,
        }
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    CliError::Usage(msg.into()).into()
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    let t0 = Instant::now();
    match command {
        Command::Exact(args) => cmd_exact(args, t0),
        Command::Sweep(args) => cmd_sweep(args, t0),
        Command::Optimize(args) => cmd_optimize(args, t0),
        Command::Simulate(args) => cmd_simulate(args, t0),
        Command::Table(cmd) => match cmd {
            TableCommand::Build(args) => cmd_table_build(args, t0),
            TableCommand::Import(args) => cmd_table_import(args, t0),
            TableCommand::Export(args) => cmd_table_export(args, t0),
        },
        Command::Nst(args) => cmd_nst(args, t0),
    }
}

fn resolve_graph(spec: &str) -> core::Result<Graph> {
    let path = Path::new(spec);
    if path.exists() && path.is_file() {
        return Graph::parse(&std::fs::read_to_string(path)?);
    }
    Graph::from_name(spec)
}

/// Angle in radians; a `deg` suffix selects degrees.
fn parse_angle(text: &str) -> anyhow::Result<f64> {
    let trimmed = text.trim();
    let (number, degrees) = match trimmed.strip_suffix("deg") {
        Some(v) => (v.trim(), true),
        None => (trimmed.strip_suffix("rad").unwrap_or(trimmed).trim(), false),
    };
    let value: f64 = number
        .parse()
        .map_err(|_| usage(format!("bad angle `{text}` (use radians or e.g. `90deg`)")))?;
    Ok(if degrees { value.to_radians() } else { value })
}

fn parse_trials(text: &str) -> anyhow::Result<u64> {
    let trimmed = text.trim();
    if let Some(exp) = trimmed.strip_prefix("2^") {
        let k: u32 = exp
            .parse()
            .map_err(|_| usage(format!("bad trial count `{text}`")))?;
        if k >= 63 {
            return Err(usage("trial exponent too large"));
        }
        return Ok(1u64 << k);
    }
    trimmed
        .parse()
        .map_err(|_| usage(format!("bad trial count `{text}`")))
}

const BUILTIN_STRATEGIES: &[&str] = &[
    "go-to-lowest",
    "go-to-highest",
    "uniform-random",
    "k3-optimal",
    "cycle-ansatz:<angle>",
    "cycle-ramp:<angle>",
    "k4-optimal",
    "2k4-optimal",
];

/// Resolves a builtin strategy name or strategy JSON path against a graph.
fn resolve_strategy(spec: &str, g: &Graph) -> anyhow::Result<Strategy> {
    let path = Path::new(spec);
    if spec.ends_with(".json") || (path.exists() && path.is_file()) {
        let text = std::fs::read_to_string(path)?;
        let value: Value = serde_json::from_str(&text)?;
        return Ok(Strategy::from_json(&value)?);
    }
    let n = g.vertex_count();
    let strategy = match spec {
        "go-to-lowest" => Strategy::Classical(ClassicalStrategy::go_to_lowest(g)),
        "go-to-highest" => Strategy::Classical(ClassicalStrategy::go_to_highest(g)),
        "uniform-random" => Strategy::Classical(ClassicalStrategy::uniform_random(g)),
        "k3-optimal" => Strategy::Qubit(QubitStrategy::k3_optimal()),
        "k4-optimal" => Strategy::Qutrit(QutritStrategy::k4_optimal()),
        "2k4-optimal" => Strategy::Qutrit(QutritStrategy::k4_optimal_on_2k4()),
        _ => {
            if let Some(angle) = spec.strip_prefix("cycle-ansatz:") {
                Strategy::Qubit(QubitStrategy::cycle_ansatz(n, parse_angle(angle)?)?)
            } else if let Some(angle) = spec.strip_prefix("cycle-ramp:") {
                Strategy::Qubit(QubitStrategy::cycle_ramp_no_offset(n, parse_angle(angle)?)?)
            } else {
                return Err(usage(format!(
                    "unknown strategy `{spec}`; available: {}, role-split-c3 (exact only), or a JSON file",
                    BUILTIN_STRATEGIES.join(", ")
                )));
            }
        }
    };
    Ok(strategy)
}

fn fmt_probability(p: f64) -> String {
    if p == 0.0 || p >= 0.001 {
        format!("{p:.6}")
    } else {
        format!("{p:.6e}")
    }
}

fn write_output(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}

/// Writes `<output>.manifest.json` beside every output file: the resolved
/// configuration, seed, tool version, and wall-clock duration needed to
/// reproduce the run.
fn write_manifests(
    outputs: &[&Path],
    seed: Option<u64>,
    config: Value,
    t0: Instant,
) -> anyhow::Result<()> {
    let command: Vec<String> = std::env::args().collect();
    let manifest = json!({
        "tool": "rendezvous",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": seed,
        "config": config,
        "outputs": outputs
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>(),
        "duration_ms": t0.elapsed().as_millis(),
    });
    for path in outputs {
        let manifest_path = format!("{}.manifest.json", path.display());
        write_output(Path::new(&manifest_path), &serde_json::to_string_pretty(&manifest)?)?;
    }
    Ok(())
}

fn config_json(args: &GameArgs, cfg: &GameConfig) -> Value {
    json!({
        "graph": args.graph,
        "game": cfg.to_record(),
    })
}

fn cmd_exact(args: ExactArgs, t0: Instant) -> anyhow::Result<ExitCode> {
    let g = args.game.graph()?;
    let cfg = args.game.config().map_err(usage)?;

    let (probability, strategy_json) = if args.strategy == "role-split-c3" {
        if g.vertex_count() != 3 || g.degree() != 2 {
            return Err(usage("role-split-c3 is defined on the triangle graph C3"));
        }
        let p = exact_win_probability(&g, &cfg, &RoleSplitC3)?;
        (p, json!({ "kind": "role-split-c3" }))
    } else {
        let strategy = resolve_strategy(&args.strategy, &g)?;
        let p = strategy.exact_win_probability(&g, &cfg)?;
        (p, strategy.to_json())
    };

    println!("P_win = {}", fmt_probability(probability));
    if let Some(path) = &args.json {
        let out = json!({
            "graph": args.game.graph,
            "config": cfg.to_record(),
            "strategy": strategy_json,
            "win_probability": probability,
        });
        write_output(path, &serde_json::to_string_pretty(&out)?)?;
        write_manifests(&[path], None, config_json(&args.game, &cfg), t0)?;
    }
    if let Some(expected) = args.check {
        if (probability - expected).abs() > args.tol {
            return Err(CliError::Mismatch(format!(
                "computed {probability} differs from expected {expected} by more than {}",
                args.tol
            ))
            .into());
        }
        println!("check OK (|{probability} - {expected}| <= {})", args.tol);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: SweepArgs, t0: Instant) -> anyhow::Result<ExitCode> {
    let g = args.game.graph()?;
    let cfg = args.game.config().map_err(usage)?;
    if g.degree() != 2 {
        return Err(usage("sweep evaluates the cycle closed form; use a C<n> graph"));
    }
    let n = g.vertex_count();
    let from = parse_angle(&args.from)?;
    let to = parse_angle(&args.to)?;
    let step = parse_angle(&args.step)?;
    if step <= 0.0 || to < from {
        return Err(usage("sweep needs step > 0 and to >= from"));
    }

    let mut csv = String::from("theta_rad,win_probability\n");
    let mut best = (f64::NEG_INFINITY, 0.0);
    let mut theta = from;
    let mut count = 0u64;
    while theta <= to + 1e-12 {
        let p = closed_form_cycle_quantum(n, theta, cfg.meet_on_edges)?;
        csv.push_str(&format!("{theta},{p}\n"));
        if p > best.0 {
            best = (p, theta);
        }
        count += 1;
        theta = from + count as f64 * step;
    }
    if count == 0 {
        return Err(usage("empty sweep grid"));
    }
    write_output(&args.out, &csv)?;
    write_manifests(&[&args.out], None, config_json(&args.game, &cfg), t0)?;
    println!(
        "{count} grid points; max P = {} at theta = {:.6} rad ({:.3} deg)",
        fmt_probability(best.0),
        best.1,
        best.1.to_degrees()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_optimize(args: OptimizeArgs, t0: Instant) -> anyhow::Result<ExitCode> {
    let g = args.game.graph()?;
    let cfg = args.game.config().map_err(usage)?;
    let oc = OptimizerConfig {
        restarts: args.restarts,
        max_evals: args.max_evals,
        seed: args.seed,
        tolerance: args.tol,
    };
    let tie = match args.tie_components {
        TieArg::Auto => TieComponents::Auto,
        TieArg::On => TieComponents::On,
        TieArg::Off => TieComponents::Off,
    };
    let result = optimize(&g, &cfg, &oc, tie)?;

    println!(
        "best objective = {} over {} restarts ({} evaluations{})",
        fmt_probability(result.objective),
        args.restarts,
        result.total_evaluations,
        if result.tied { ", components tied" } else { "" }
    );
    // per-site angle table, one row per rotation axis
    let n = g.vertex_count();
    let row = |name: &str, pick: fn(&core::EulerAngles) -> f64| {
        let cells: Vec<String> = (1..=n)
            .map(|v| format!("{:7.4}", pick(result.strategy.angles(v))))
            .collect();
        println!("  {name} {}", cells.join(" "));
    };
    println!("  site  {}", (1..=n).map(|v| format!("{v:7}")).collect::<Vec<_>>().join(" "));
    row("alpha", |a| a.alpha);
    row("beta ", |a| a.beta);
    row("gamma", |a| a.gamma);

    if let Some(path) = &args.out {
        let out = json!({
            "graph": args.game.graph,
            "config": cfg.to_record(),
            "optimizer": oc,
            "result": result.to_json(),
        });
        write_output(path, &serde_json::to_string_pretty(&out)?)?;
        write_manifests(&[path], Some(args.seed), config_json(&args.game, &cfg), t0)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(args: SimulateArgs, t0: Instant) -> anyhow::Result<ExitCode> {
    let g = args.game.graph()?;
    let cfg = args.game.config().map_err(usage)?;
    let strategy = resolve_strategy(&args.strategy, &g)?;
    let trials = parse_trials(&args.trials)?;

    let fallback;
    let mitigation = if args.mitigation == "none" {
        Mitigation::None
    } else if let Some(name) = args.mitigation.strip_prefix("discard:") {
        match resolve_strategy(name, &g)? {
            Strategy::Classical(s) => {
                fallback = s;
                Mitigation::DiscardFallback(&fallback)
            }
            _ => return Err(usage("the discard fallback must be a classical strategy")),
        }
    } else {
        return Err(usage(format!(
            "bad --mitigation `{}`; use none or discard:<classical-strategy>",
            args.mitigation
        )));
    };

    let mut table_storage;
    let source = match &args.table {
        None => SimSource::Analytic,
        Some(path) => {
            table_storage = QuantumTable::import_path(path)?;
            SimSource::Table {
                table: &mut table_storage,
                mode: match args.table_mode {
                    TableModeArg::Seq => TableMode::Sequential,
                    TableModeArg::Recycle => TableMode::SequentialRecycle,
                    TableModeArg::Random => TableMode::RandomProbe,
                },
            }
        }
    };

    let result = simulate(&g, &cfg, &strategy, trials, args.seed, source, mitigation)?;
    println!(
        "wins {} / {} trials; win fraction = {}; discarded readouts in {} trials",
        result.wins,
        result.trials,
        fmt_probability(result.win_fraction),
        result.discarded_shots
    );

    let mut outputs: Vec<&Path> = Vec::new();
    if let Some(path) = &args.out {
        let out = json!({
            "graph": args.game.graph,
            "config": cfg.to_record(),
            "strategy": strategy.to_json(),
            "source": match &args.table {
                None => json!("analytic"),
                Some(p) => json!({ "table": p.display().to_string() }),
            },
            "result": result,
        });
        write_output(path, &serde_json::to_string_pretty(&out)?)?;
        outputs.push(path);
    }
    if let Some(path) = &args.convergence {
        write_output(path, &result.convergence_csv())?;
        outputs.push(path);
    }
    if !outputs.is_empty() {
        write_manifests(&outputs, Some(args.seed), config_json(&args.game, &cfg), t0)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_table_build(args: TableBuildArgs, t0: Instant) -> anyhow::Result<ExitCode> {
    let g = resolve_graph(&args.graph)?;
    let strategy = resolve_strategy(&args.strategy, &g)?;
    let sampler = match (args.p_gate, args.n_gates) {
        (None, None) => Sampler::Ideal,
        (Some(p), Some(ng)) => Sampler::Noisy(NoiseParams::new(p, ng)?),
        _ => return Err(usage("--p-gate and --n-gates must be given together")),
    };
    let table = build_table(&g, &strategy, args.shots, &sampler, args.seed)?;
    write_output(&args.out, &table.export_to_string())?;
    let config = json!({
        "graph": args.graph,
        "strategy": strategy.to_json(),
        "shots_per_pair": args.shots,
        "sampler": match sampler {
            Sampler::Ideal => json!("ideal"),
            Sampler::Noisy(p) => json!({ "p_gate": p.p_gate, "n_gates": p.n_gates }),
        },
    });
    write_manifests(&[&args.out], Some(args.seed), config, t0)?;
    println!(
        "built {} shots across {} start pairs -> {}",
        table.total_shots(),
        table.pairs().count(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_table_import(args: TableImportArgs, t0: Instant) -> anyhow::Result<ExitCode> {
    let table = QuantumTable::import_path(&args.path)?;
    let summary = table.summary_json();
    println!("{}", serde_json::to_string_pretty(&summary)?);
    if let Some(path) = &args.json {
        write_output(path, &serde_json::to_string_pretty(&summary)?)?;
        write_manifests(
            &[path],
            None,
            json!({ "path": args.path.display().to_string() }),
            t0,
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_table_export(args: TableExportArgs, t0: Instant) -> anyhow::Result<ExitCode> {
    let table = QuantumTable::import_path(&args.path)?;
    write_output(&args.out, &table.export_to_string())?;
    write_manifests(
        &[&args.out],
        None,
        json!({ "path": args.path.display().to_string() }),
        t0,
    )?;
    println!(
        "rewrote {} shots to {}",
        table.total_shots(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_nst(args: NstArgs, t0: Instant) -> anyhow::Result<ExitCode> {
    let e = match args.e {
        0 => false,
        1 => true,
        other => return Err(usage(format!("--e must be 0 or 1, got {other}"))),
    };
    let bound = nst_bound(args.n, e)?;
    let (attainable, witnesses) = nst_attainable(args.n)?;
    println!(
        "non-signalling ceiling on C{}: {}",
        args.n,
        fmt_probability(bound)
    );
    if e {
        println!("attainability analysis applies to the no-edge-meeting game");
    }
    if attainable {
        let w = &witnesses[0];
        println!(
            "attainable by the two-qubit strategy: {} witnesses, first (nu={}, mu={}) at theta = {:.6} rad",
            witnesses.len(),
            w.nu,
            w.mu,
            w.theta_max
        );
    } else {
        println!("not attainable by the two-qubit strategy (integer scan up to 100)");
    }
    if let Some(path) = &args.json {
        let out = json!({
            "n": args.n,
            "meet_on_edges": e,
            "bound": bound,
            "attainable": attainable,
            "witnesses": witnesses,
        });
        write_output(path, &serde_json::to_string_pretty(&out)?)?;
        write_manifests(&[path], None, json!({ "n": args.n, "e": args.e }), t0)?;
    }
    Ok(ExitCode::SUCCESS)
}
