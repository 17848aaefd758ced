use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use parsched::antichain_dp::{self, Mode};
use parsched::classifier::{classify, dispatch, Algorithm, DispatchError, DispatchOptions, TableRow};
use parsched::corpus::{mixed_corpus, CorpusParams};
use parsched::oracle::{brute_force, DEFAULT_BUDGET};
use parsched::reductions::{self, SourceGraph};
use parsched::{build_poset, check_schedule, validate_instance, Instance, Time, VariantFlags};

const EXIT_USAGE: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_SELFTEST: u8 = 1;

/// Partial scheduling: choose k of n jobs and minimize the makespan.
#[derive(Parser)]
#[command(name = "parsched", version)]
struct Cli {
    /// Human-readable output instead of JSON
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with the solver of its complexity row
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgoArg::Auto)]
        algorithm: AlgoArg,
        /// Makespan bound; overrides the instance's own
        #[arg(long)]
        cmax: Option<Time>,
        /// Color-coding trials (default ceil(e^k ln 4))
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Faithful)]
        mode: ModeArg,
        /// Write the schedule here
        #[arg(long)]
        emit_schedule: Option<PathBuf>,
    },
    /// Print the table row of an instance
    Classify {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Build a scheduling instance from a source problem
    Generate {
        #[arg(value_enum)]
        kind: GenKind,
        /// Source graph (for `partition`: {"values": [...], "target": T})
        #[arg(long, alias = "input")]
        graph: PathBuf,
        /// Pattern graph for `psi` and `psi2`
        #[arg(long)]
        pattern: Option<PathBuf>,
        #[arg(long)]
        clique_size: Option<usize>,
        /// Output file (default: standard output)
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// List antichains of depth at most k in the precedence graph
    EnumerateAntichains {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        k: usize,
        /// Time slot (default: every job released)
        #[arg(long)]
        t: Option<Time>,
    },
    /// Solve a directory of instances and write one CSV row per instance
    Bench {
        /// Directory of instance JSON files (default: built-in random corpus)
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check every solver against the oracle on the built-in corpus
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Auto,
    Dp,
    Colorcode,
    Greedy,
    Moore,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Faithful,
    Lazy,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    #[value(name = "3col")]
    ThreeCol,
    Clique,
    Psi,
    Psi2,
    Partition,
}

struct Failure {
    code: u8,
    msg: String,
}

fn fail(code: u8, msg: impl Into<String>) -> Failure {
    Failure {
        code,
        msg: msg.into(),
    }
}

type CliResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| fail(EXIT_USAGE, format!("cannot write {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    Instance::from_json(&read(path)?).map_err(|e| fail(EXIT_INVALID, format!("{}: {e}", path.display())))
}

fn load_valid(path: &Path) -> Result<Instance, Failure> {
    let inst = load_instance(path)?;
    let report = validate_instance(&inst);
    if !report.is_valid() {
        return Err(fail(EXIT_INVALID, report.to_string()));
    }
    Ok(inst)
}

fn budget() -> Result<u64, Failure> {
    match std::env::var("PARSCHED_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| fail(EXIT_USAGE, format!("PARSCHED_BUDGET must be a nonnegative integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn emit<T: Serialize>(value: &T, pretty: bool) {
    let text = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    };
    println!("{}", text.expect("serializable"));
}

fn resolve_algorithm(arg: AlgoArg, flags: VariantFlags) -> Option<Algorithm> {
    match arg {
        AlgoArg::Auto => None,
        AlgoArg::Dp => Some(Algorithm::AntichainDp),
        AlgoArg::Colorcode => Some(Algorithm::ColorCode),
        AlgoArg::Greedy if flags.has_prec => Some(Algorithm::GreedyPrec),
        AlgoArg::Greedy => Some(Algorithm::GreedyEdd),
        AlgoArg::Moore => Some(Algorithm::Moore),
        AlgoArg::Oracle => Some(Algorithm::Oracle),
    }
}

fn dispatch_failure(e: DispatchError) -> Failure {
    let code = match e {
        DispatchError::Invalid(_) | DispatchError::Classify(_) => EXIT_INVALID,
        DispatchError::Mismatch { .. } => EXIT_USAGE,
        DispatchError::Budget(_) => EXIT_BUDGET,
    };
    fail(code, e.to_string())
}

#[derive(Serialize)]
struct SolveOutput {
    feasible: bool,
    makespan: Option<Time>,
    jobs_done: usize,
    algorithm: String,
    row: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[allow(clippy::too_many_arguments)]
fn solve(
    path: &Path,
    algorithm: AlgoArg,
    cmax: Option<Time>,
    trials: Option<u64>,
    seed: u64,
    mode: ModeArg,
    emit_schedule: Option<&Path>,
    pretty: bool,
) -> CliResult {
    let inst = load_valid(path)?;
    let opts = DispatchOptions {
        algorithm: resolve_algorithm(algorithm, VariantFlags::of(&inst)),
        cmax,
        trials,
        seed,
        mode: match mode {
            ModeArg::Faithful => Mode::Faithful,
            ModeArg::Lazy => Mode::Lazy,
        },
        budget: budget()?,
    };
    let out = dispatch(&inst, &opts).map_err(dispatch_failure)?;
    if let (Some(file), Some(sol)) = (emit_schedule, &out.solution) {
        write(file, &sol.schedule.clone().sorted().to_json(sol.makespan))?;
    }
    let result = SolveOutput {
        feasible: out.solution.is_some(),
        makespan: out.solution.as_ref().map(|s| s.makespan),
        jobs_done: out.solution.as_ref().map_or(0, |s| s.schedule.len()),
        algorithm: out.algorithm.to_string(),
        row: out.row.id,
        seed: out.seed,
    };
    if pretty {
        println!("row {} ({}), {}", out.row.id, out.row.name(), out.algorithm);
        match &out.solution {
            Some(sol) => {
                println!("makespan {} with {} jobs", sol.makespan, sol.schedule.len());
                for e in &sol.schedule.clone().sorted().entries {
                    println!("  {:>12}  machine {}  start {}", e.job, e.machine, e.start);
                }
            }
            None => println!("infeasible"),
        }
    } else {
        emit(&result, false);
    }
    Ok(())
}

#[derive(Serialize)]
struct ClassifyOutput {
    row: usize,
    name: String,
    class: String,
    algorithm: String,
    bound_note: &'static str,
}

impl From<&TableRow> for ClassifyOutput {
    fn from(row: &TableRow) -> Self {
        ClassifyOutput {
            row: row.id,
            name: row.name(),
            class: row.class.to_string(),
            algorithm: row.algorithm.to_string(),
            bound_note: row.bound_note,
        }
    }
}

fn classify_cmd(path: &Path, pretty: bool) -> CliResult {
    let inst = load_valid(path)?;
    let row = classify(VariantFlags::of(&inst)).map_err(|e| fail(EXIT_INVALID, e.to_string()))?;
    if pretty {
        println!("row {}: {}", row.id, row.name());
        println!("class: {}", row.class);
        println!("algorithm: {}", row.algorithm);
        println!("bound: {}", row.bound_note);
    } else {
        emit(&ClassifyOutput::from(row), false);
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionInput {
    values: Vec<Time>,
    #[serde(default)]
    target: Option<Time>,
}

fn load_graph(path: &Path) -> Result<SourceGraph, Failure> {
    SourceGraph::from_json(&read(path)?).map_err(|e| fail(EXIT_INVALID, format!("{}: {e}", path.display())))
}

fn generate(kind: GenKind, graph: &Path, pattern: Option<&Path>, q: Option<usize>, out: Option<&Path>) -> CliResult {
    let invalid = |e: reductions::ReductionError| fail(EXIT_INVALID, e.to_string());
    let need_pattern = || -> Result<SourceGraph, Failure> {
        load_graph(pattern.ok_or_else(|| fail(EXIT_USAGE, "--pattern is required for psi and psi2"))?)
    };
    let inst = match kind {
        GenKind::ThreeCol => reductions::gen_3coloring(&load_graph(graph)?).map_err(invalid)?,
        GenKind::Clique => {
            let q = q.ok_or_else(|| fail(EXIT_USAGE, "--clique-size is required for clique"))?;
            reductions::gen_clique(&load_graph(graph)?, q).map_err(invalid)?
        }
        GenKind::Psi => reductions::gen_psi(&load_graph(graph)?, &need_pattern()?).map_err(invalid)?,
        GenKind::Psi2 => reductions::gen_psi_2machine(&load_graph(graph)?, &need_pattern()?).map_err(invalid)?,
        GenKind::Partition => {
            let input: PartitionInput = serde_json::from_str(&read(graph)?)
                .map_err(|e| fail(EXIT_INVALID, format!("{}: {e}", graph.display())))?;
            reductions::gen_partition(&input.values, input.target).map_err(invalid)?
        }
    };
    let text = inst.to_json_pretty();
    match out {
        Some(path) => write(path, &text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct AntichainOutput {
    t: Option<Time>,
    k: usize,
    count: usize,
    antichains: Vec<Vec<String>>,
}

fn enumerate(path: &Path, k: usize, t: Option<Time>, pretty: bool) -> CliResult {
    let inst = load_valid(path)?;
    let g = build_poset(&inst).map_err(|e| fail(EXIT_INVALID, e.to_string()))?;
    let list = g.enumerate_antichains(t.unwrap_or(Time::MAX), k);
    let antichains: Vec<Vec<String>> = list
        .iter()
        .map(|a| a.nodes().iter().map(|&x| g.id(x).to_string()).collect())
        .collect();
    if pretty {
        println!("{} antichains of depth <= {k}", antichains.len());
        for a in &antichains {
            println!("  {{{}}}", a.join(", "));
        }
    } else {
        emit(
            &AntichainOutput {
                t,
                k,
                count: antichains.len(),
                antichains,
            },
            false,
        );
    }
    Ok(())
}

/// One CSV row. Columns, in order: instance, row, algorithm, feasible,
/// makespan (empty when infeasible), wall_ms, table_entries, antichains
/// (`t:count` pairs separated by `;`, DP rows only), error.
#[derive(Serialize)]
struct BenchRecord {
    instance: String,
    row: Option<usize>,
    algorithm: String,
    feasible: bool,
    makespan: Option<Time>,
    wall_ms: f64,
    table_entries: Option<usize>,
    antichains: String,
    error: String,
}

fn bench_one(name: String, inst: &Instance, seed: u64, budget: u64) -> BenchRecord {
    let mut rec = BenchRecord {
        instance: name,
        row: None,
        algorithm: String::new(),
        feasible: false,
        makespan: None,
        wall_ms: 0.0,
        table_entries: None,
        antichains: String::new(),
        error: String::new(),
    };
    let row = match classify(VariantFlags::of(inst)) {
        Ok(r) => r,
        Err(e) => {
            rec.error = e.to_string();
            return rec;
        }
    };
    rec.row = Some(row.id);
    rec.algorithm = row.algorithm.to_string();
    let start = Instant::now();
    if row.algorithm == Algorithm::AntichainDp && validate_instance(inst).is_valid() {
        match antichain_dp::minimize_makespan_with_stats(inst, Mode::Faithful) {
            Ok(res) => {
                let res = res.filter(|(s, _)| inst.cmax.is_none_or(|c| s.makespan <= c));
                rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
                if let Some((sol, stats)) = res {
                    let cap = 1u128 << (2 * inst.k).min(127);
                    assert!(
                        stats.antichains_per_t.iter().all(|&(_, c)| (c as u128) <= cap),
                        "antichain count above 4^k"
                    );
                    rec.feasible = true;
                    rec.makespan = Some(sol.makespan);
                    rec.table_entries = Some(stats.table_entries);
                    rec.antichains = stats
                        .antichains_per_t
                        .iter()
                        .map(|(t, c)| format!("{t}:{c}"))
                        .collect::<Vec<_>>()
                        .join(";");
                }
            }
            Err(e) => rec.error = e.to_string(),
        }
        return rec;
    }
    let opts = DispatchOptions {
        seed,
        budget,
        ..Default::default()
    };
    match dispatch(inst, &opts) {
        Ok(out) => {
            rec.feasible = out.solution.is_some();
            rec.makespan = out.solution.map(|s| s.makespan);
        }
        Err(e) => rec.error = e.to_string(),
    }
    rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    rec
}

fn bench(corpus: Option<&Path>, out: &Path, seed: u64) -> CliResult {
    let budget = budget()?;
    let entries: Vec<(String, Instance)> = match corpus {
        Some(dir) => {
            let mut files: Vec<PathBuf> = fs::read_dir(dir)
                .map_err(|e| fail(EXIT_USAGE, format!("cannot read {}: {e}", dir.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            files
                .iter()
                .map(|p| Ok((p.file_name().unwrap().to_string_lossy().into_owned(), load_instance(p)?)))
                .collect::<Result<_, Failure>>()?
        }
        None => mixed_corpus(seed, 120, &CorpusParams::default())
            .into_iter()
            .enumerate()
            .map(|(i, inst)| (format!("corpus-{i:03}"), inst))
            .collect(),
    };
    let records: Vec<BenchRecord> = entries
        .into_par_iter()
        .map(|(name, inst)| bench_one(name, &inst, seed, budget))
        .collect();
    let mut w = csv::Writer::from_path(out).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    for r in &records {
        w.serialize(r).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    }
    w.flush().map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    Ok(())
}

#[derive(Serialize)]
struct SelftestOutput {
    instances: usize,
    dp_mode_checks: usize,
    mismatches: Vec<String>,
    passed: bool,
}

fn selftest(seed: u64, count: usize, pretty: bool) -> CliResult {
    let budget = budget()?;
    let corpus = mixed_corpus(seed, count, &CorpusParams::default());
    let results: Vec<(bool, Vec<String>)> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let mut bad = Vec::new();
            let want = match brute_force(inst, None, budget) {
                Ok(s) => s.map(|s| s.makespan),
                Err(e) => return (false, vec![format!("#{i}: oracle: {e}")]),
            };
            let opts = DispatchOptions {
                seed: seed + i as u64,
                budget,
                ..Default::default()
            };
            match dispatch(inst, &opts) {
                Ok(out) => {
                    let got = out.solution.as_ref().map(|s| s.makespan);
                    if got != want {
                        bad.push(format!("#{i} row {}: {got:?} vs oracle {want:?}", out.row.id));
                    }
                    if let Some(sol) = &out.solution {
                        let ok = check_schedule(inst, &sol.schedule)
                            .is_ok_and(|v| v.feasible && v.jobs_done == inst.k && v.makespan == sol.makespan);
                        if !ok {
                            bad.push(format!("#{i}: schedule rejected by the checker"));
                        }
                    }
                }
                Err(e) => bad.push(format!("#{i}: {e}")),
            }
            let dp_row = matches!(classify(VariantFlags::of(inst)).map(|r| r.id), Ok(5 | 6));
            if dp_row {
                let a = antichain_dp::minimize_makespan(inst, Mode::Faithful).map(|s| s.map(|s| s.makespan));
                let b = antichain_dp::minimize_makespan(inst, Mode::Lazy).map(|s| s.map(|s| s.makespan));
                if a.as_ref().ok() != b.as_ref().ok() || a.is_err() {
                    bad.push(format!("#{i}: faithful {a:?} vs lazy {b:?}"));
                }
            }
            (dp_row, bad)
        })
        .collect();
    let dp_mode_checks = results.iter().filter(|(d, _)| *d).count();
    let mismatches: Vec<String> = results.into_iter().flat_map(|(_, b)| b).collect();
    let passed = mismatches.is_empty();
    let out = SelftestOutput {
        instances: corpus.len(),
        dp_mode_checks,
        mismatches,
        passed,
    };
    emit(&out, pretty);
    if passed {
        Ok(())
    } else {
        Err(fail(EXIT_SELFTEST, "selftest failed"))
    }
}

fn run(cli: Cli) -> CliResult {
    let pretty = cli.pretty;
    match cli.command {
        Command::Solve {
            instance,
            algorithm,
            cmax,
            trials,
            seed,
            mode,
            emit_schedule,
        } => solve(&instance, algorithm, cmax, trials, seed, mode, emit_schedule.as_deref(), pretty),
        Command::Classify { instance } => classify_cmd(&instance, pretty),
        Command::Generate {
            kind,
            graph,
            pattern,
            clique_size,
            out,
        } => generate(kind, &graph, pattern.as_deref(), clique_size, out.as_deref()),
        Command::EnumerateAntichains { instance, k, t } => enumerate(&instance, k, t, pretty),
        Command::Bench { corpus, out, seed } => bench(corpus.as_deref(), &out, seed),
        Command::Selftest { seed, count } => selftest(seed, count, pretty),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg.trim_end());
            ExitCode::from(f.code)
        }
    }
}
