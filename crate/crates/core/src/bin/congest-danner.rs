use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use congest_danner::experiment::{
    run_experiment, summary_csv, write_results, Algorithm, Constants, ExperimentSpec, GraphSource, VerifySetup,
};
use congest_danner::graph::{generate, read_graph, write_graph, GenOptions, GeneratorKind, IdMode, WeightMode};
use congest_danner::verify::Problem;
use congest_danner::{Error, Result};

#[derive(Parser)]
#[command(version, about = "Danner-based CONGEST algorithms with metered rounds and messages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build danners.
    Danner(RunArgs),
    /// Minimum spanning tree.
    Mst(RunArgs),
    /// Connected components of a random edge subset.
    Components(RunArgs),
    /// Approximate edge connectivity.
    Mincut(RunArgs),
    /// Decide a verification problem.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Run an algorithm over a grid of delta values (defaults to its full range).
    Sweep {
        #[arg(long, value_enum)]
        algo: AlgoArg,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Write a generated graph in the text format.
    Gen {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Danner,
    Mst,
    Components,
    Mincut,
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Path,
    Cycle,
    Star,
    Complete,
    Gnp,
    Barbell,
    Geometric,
    Torus,
}

#[derive(Args)]
struct GraphArgs {
    /// Graph file in the text format.
    #[arg(long, conflicts_with = "gen")]
    graph: Option<PathBuf>,
    /// Generator.
    #[arg(long, value_enum)]
    gen: Option<KindArg>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    #[arg(long, default_value_t = 0.2)]
    radius: f64,
    /// Clique size for barbell.
    #[arg(long, default_value_t = 8)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    bridges: usize,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    sequential_ids: bool,
    #[arg(long)]
    unit_weights: bool,
    #[arg(long, default_value_t = 1)]
    multiplicity: u32,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Comma-separated delta values.
    #[arg(long, value_delimiter = ',')]
    delta: Vec<f64>,
    /// Comma-separated seeds or ranges such as `0..20`.
    #[arg(long, default_value = "0")]
    seeds: String,
    /// Result directory (records.jsonl, summary.csv, config.json).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    c_t: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    kappa: Option<u32>,
    #[arg(long)]
    c_s: Option<f64>,
    #[arg(long)]
    c_h: Option<f64>,
    #[arg(long)]
    round_limit: Option<u64>,
    /// Probability of marking an edge for components/verify.
    #[arg(long)]
    mark_prob: Option<f64>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long)]
    problem: Option<String>,
    /// Marked edges, one `u v` pair (1-based) per line.
    #[arg(long)]
    marks: Option<PathBuf>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    /// Designated edge as `u,v` (1-based).
    #[arg(long, value_delimiter = ',', num_args = 2)]
    edge: Option<Vec<usize>>,
}

fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = |s: &str| Error::param("seeds", format!("cannot parse `{s}`"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.parse().map_err(|_| bad(part))?;
            let b: u64 = b.parse().map_err(|_| bad(part))?;
            out.extend(a..b);
        } else {
            out.push(part.parse().map_err(|_| bad(part))?);
        }
    }
    Ok(out)
}

fn need(x: Option<usize>, field: &'static str) -> Result<usize> {
    x.ok_or_else(|| Error::param(field, "required by this generator"))
}

fn source(args: &GraphArgs) -> Result<GraphSource> {
    if let Some(path) = &args.graph {
        return Ok(GraphSource::File { path: path.clone() });
    }
    let Some(kind) = args.gen else {
        return Err(Error::param("graph", "give --graph FILE or --gen KIND"));
    };
    let kind = match kind {
        KindArg::Path => GeneratorKind::Path { n: need(args.n, "n")? },
        KindArg::Cycle => GeneratorKind::Cycle { n: need(args.n, "n")? },
        KindArg::Star => GeneratorKind::Star { n: need(args.n, "n")? },
        KindArg::Complete => GeneratorKind::Complete { n: need(args.n, "n")? },
        KindArg::Gnp => GeneratorKind::Gnp {
            n: need(args.n, "n")?,
            p: args.p,
        },
        KindArg::Geometric => GeneratorKind::Geometric {
            n: need(args.n, "n")?,
            radius: args.radius,
        },
        KindArg::Barbell => GeneratorKind::Barbell {
            k: args.k,
            bridges: args.bridges,
        },
        KindArg::Torus => GeneratorKind::Torus {
            rows: need(args.rows, "rows")?,
            cols: need(args.cols.or(args.rows), "cols")?,
        },
    };
    let options = GenOptions {
        weights: if args.unit_weights { WeightMode::Unit } else { WeightMode::Distinct },
        ids: if args.sequential_ids { IdMode::Sequential } else { IdMode::Random },
        multiplicity: args.multiplicity,
    };
    Ok(GraphSource::Generated { kind, options })
}

fn one_based(x: usize, field: &'static str) -> Result<usize> {
    x.checked_sub(1).ok_or_else(|| Error::param(field, "node indices are 1-based"))
}

fn verify_setup(args: &InstanceArgs) -> Result<Option<VerifySetup>> {
    let Some(name) = &args.problem else { return Ok(None) };
    let marks = match &args.marks {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let mut pairs = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let nums: Vec<usize> = line.split_whitespace().filter_map(|x| x.parse().ok()).collect();
                if nums.len() != 2 {
                    return Err(Error::Parse {
                        line: i + 1,
                        reason: "expected `u v`".into(),
                    });
                }
                pairs.push((one_based(nums[0], "marks")?, one_based(nums[1], "marks")?));
            }
            Some(pairs)
        }
        None => None,
    };
    let pair = match (args.s, args.t) {
        (Some(s), Some(t)) => Some((one_based(s, "s")?, one_based(t, "t")?)),
        (None, None) => None,
        _ => return Err(Error::param("s", "give both --s and --t")),
    };
    let edge = match &args.edge {
        Some(e) => Some((one_based(e[0], "edge")?, one_based(e[1], "edge")?)),
        None => None,
    };
    Ok(Some(VerifySetup {
        problem: name.parse::<Problem>()?,
        marks,
        pair,
        edge,
    }))
}

fn spec(algorithm: Algorithm, run: &RunArgs, instance: Option<&InstanceArgs>, sweep: bool) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::new(algorithm, source(&run.graph)?);
    spec.deltas = if !run.delta.is_empty() {
        run.delta.clone()
    } else if sweep {
        algorithm.default_deltas()
    } else {
        vec![0.5]
    };
    spec.seeds = parse_seeds(&run.seeds)?;
    let d = Constants::default();
    spec.constants = Constants {
        c: run.c.unwrap_or(d.c),
        c_t: run.c_t.unwrap_or(d.c_t),
        a: run.a.unwrap_or(d.a),
        kappa: run.kappa.unwrap_or(d.kappa),
        c_s: run.c_s.unwrap_or(d.c_s),
        c_h: run.c_h.unwrap_or(d.c_h),
    };
    if let Some(r) = run.round_limit {
        spec.round_limit = r;
    }
    if let Some(p) = run.mark_prob {
        spec.mark_probability = p;
    }
    if let Some(inst) = instance {
        spec.verify = verify_setup(inst)?;
    }
    spec.validate()?;
    Ok(spec)
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn execute(spec: ExperimentSpec, run: &RunArgs) -> Result<()> {
    if run.print_config {
        return emit(&(serde_json::to_string_pretty(&spec.config_json())? + "\n"));
    }
    let records = run_experiment(&spec)?;
    match &run.out {
        Some(dir) => {
            write_results(&spec, &records, dir)?;
            emit(&summary_csv(&records))
        }
        None => {
            let lines: String = records.iter().map(|r| r.to_json() + "\n").collect();
            emit(&lines)
        }
    }
}

fn algorithm(a: AlgoArg) -> Algorithm {
    match a {
        AlgoArg::Danner => Algorithm::Danner,
        AlgoArg::Mst => Algorithm::Mst,
        AlgoArg::Components => Algorithm::Components,
        AlgoArg::Mincut => Algorithm::Mincut,
        AlgoArg::Verify => Algorithm::Verify,
    }
}

fn main_inner(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Danner(run) => execute(spec(Algorithm::Danner, &run, None, false)?, &run),
        Command::Mst(run) => execute(spec(Algorithm::Mst, &run, None, false)?, &run),
        Command::Components(run) => execute(spec(Algorithm::Components, &run, None, false)?, &run),
        Command::Mincut(run) => execute(spec(Algorithm::Mincut, &run, None, false)?, &run),
        Command::Verify { run, instance } => execute(spec(Algorithm::Verify, &run, Some(&instance), false)?, &run),
        Command::Sweep { algo, run, instance } => execute(spec(algorithm(algo), &run, Some(&instance), true)?, &run),
        Command::Gen { graph, seed, out } => {
            let g = match source(&graph)? {
                GraphSource::Generated { kind, options } => generate(&kind, options, seed)?,
                GraphSource::File { path } => read_graph(&std::fs::read_to_string(path)?)?,
            };
            let text = write_graph(&g);
            match out {
                Some(path) => Ok(std::fs::write(path, text)?),
                None => emit(&text),
            }
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
