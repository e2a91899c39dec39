//! `lowsens` command-line front end.
//!
//! Exit status: 0 on success, 1 on usage or input errors, 2 when a budget or
//! size guard stops a run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lowsens::approx::{params_from_eps, ApproxParams, DEFAULT_BUDGET};
use lowsens::generate::{generate, random_weights, GraphKind};
use lowsens::greedy::greedy_matching;
use lowsens::io::{load_any, write_graph, write_weighted};
use lowsens::lca::probe_report;
use lowsens::matching::hamming;
use lowsens::online::{simulate, VertexArrivalStream};
use lowsens::oracle::{max_matching_limited, max_weight_matching_limited, DEFAULT_MAX_N};
use lowsens::sensitivity::{adversarial_greedy_instance, estimate, perturbations, randomized_lb_experiment, Experiment, Mode, Target};
use lowsens::{EdgeWeights, Error, Graph, Matching, Registry, RegistryConfig, RandomTape, Vertex, WeightedGraph};

#[derive(Parser, Debug)]
#[command(name = "lowsens", version, about = "Low-sensitivity matching algorithms and experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Base seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Trials per perturbation (sens, lb).
    #[arg(long, global = true, default_value_t = 1000)]
    trials: usize,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct AlgArgs {
    /// Derive approx parameters from eps; k, r and delta still override.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Greedy-call budget for approx.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Weight bucket base for weighted.
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Forest count for lca; larger degrees are refused.
    #[arg(long, default_value_t = 5)]
    delta_max: usize,
}

impl AlgArgs {
    fn registry(&self) -> Result<Registry, Error> {
        let mut approx = match self.eps {
            Some(eps) => params_from_eps(eps)?,
            None => ApproxParams::DESK,
        };
        if let Some(k) = self.k {
            approx.k = k;
        }
        if let Some(r) = self.r {
            approx.r = r;
        }
        if let Some(d) = self.delta {
            approx.delta = d;
        }
        approx.validate()?;
        Ok(Registry::new(RegistryConfig { approx, budget: self.budget, alpha: self.alpha, delta_max: self.delta_max }))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a graph as an edge list.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long)]
        n: usize,
        /// Edge probability for gnp.
        #[arg(long)]
        p: Option<f64>,
        /// Degree cap for bounded.
        #[arg(long)]
        max_degree: Option<usize>,
        /// Attach integer weights drawn from LO..=HI.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        weights: Option<Vec<u32>>,
    },
    /// Run one algorithm on a graph file.
    Match {
        alg: String,
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        params: AlgArgs,
        /// For lca, also report probe counts of every edge query.
        #[arg(long)]
        probes: bool,
    },
    /// Estimate sensitivity under single deletions.
    Sens {
        #[arg(long)]
        alg: String,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = TargetArg::Edges)]
        target: TargetArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Plain)]
        mode: ModeArg,
        #[command(flatten)]
        params: AlgArgs,
    },
    /// Replay a vertex-arrival stream and count replacements.
    Online {
        #[arg(long)]
        alg: String,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Arrival::Random)]
        arrival_order: Arrival,
        /// Whitespace-separated arrival order, used with `--arrival-order file`.
        #[arg(long)]
        order_file: Option<PathBuf>,
        #[command(flatten)]
        params: AlgArgs,
    },
    /// Lower-bound demonstrators.
    Lb {
        #[command(subcommand)]
        which: LbKind,
    },
    /// Exact optimum by exhaustive search.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
    },
}

#[derive(Subcommand, Debug)]
enum LbKind {
    /// Path whose greedy output flips entirely after one deletion.
    Greedy {
        #[arg(long)]
        n: usize,
    },
    /// Even cycle on which a near-exact algorithm must move many edges.
    Randomized {
        /// The cycle has length 1 / (10 eps).
        #[arg(value_name = "EPS")]
        cycle_eps: f64,
        #[arg(long, default_value = "approx")]
        alg: String,
        #[command(flatten)]
        params: AlgArgs,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum GenKind {
    Gnp,
    Cycle,
    Path,
    Bounded,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum TargetArg {
    Edges,
    Vertices,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Plain,
    Weighted,
    Normalized,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Arrival {
    Random,
    Id,
    File,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Out = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.global.jobs {
        Some(0) => Err(Failure::Usage("--jobs must be at least 1".into())),
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(Failure::Usage(format!("cannot start {j} threads: {e}"))),
        },
        None => run(&cli),
    };
    let text = match result {
        Ok(text) => text,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_guard() { 2 } else { 1 });
        }
    };
    match &cli.global.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}

fn run(cli: &Cli) -> Out {
    let g = &cli.global;
    match &cli.command {
        Command::Gen { kind, n, p, max_degree, weights } => gen(*kind, *n, *p, *max_degree, weights.as_deref(), g.seed),
        Command::Match { alg, graph, params, probes } => run_match(g, alg, graph, params, *probes),
        Command::Sens { alg, graph, target, mode, params } => sens(g, alg, graph, *target, *mode, params),
        Command::Online { alg, graph, arrival_order, order_file, params } => {
            online(g, alg, graph, *arrival_order, order_file.as_deref(), params)
        }
        Command::Lb { which: LbKind::Greedy { n } } => lb_greedy(g, *n),
        Command::Lb { which: LbKind::Randomized { cycle_eps, alg, params } } => {
            let reg = params.registry()?;
            let report = randomized_lb_experiment(*cycle_eps, reg.get(alg)?, g.trials, g.seed)?;
            match g.format {
                Format::Json => Ok(to_json(&report)),
                Format::Csv => Ok(report.report.to_csv()),
            }
        }
        Command::Oracle { graph, max_n } => oracle(g, graph, *max_n),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<(Graph, Option<EdgeWeights>), Failure> {
    load_any(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn edges_json(m: &Matching) -> Value {
    Value::Array(m.iter().map(|e| json!([e.lo(), e.hi()])).collect())
}

fn edges_csv(m: &Matching) -> String {
    let mut out = String::from("u,v\n");
    for e in m.iter() {
        let _ = writeln!(out, "{},{}", e.lo(), e.hi());
    }
    out
}

fn gen(kind: GenKind, n: usize, p: Option<f64>, max_degree: Option<usize>, weights: Option<&[u32]>, seed: u64) -> Out {
    let kind = match kind {
        GenKind::Gnp => GraphKind::Gnp { n, p: p.ok_or_else(|| Failure::Usage("gnp needs --p".into()))? },
        GenKind::Cycle => GraphKind::Cycle { n },
        GenKind::Path => GraphKind::Path { n },
        GenKind::Bounded => GraphKind::BoundedDegree {
            n,
            max_degree: max_degree.ok_or_else(|| Failure::Usage("bounded needs --max-degree".into()))?,
        },
    };
    let g = generate(kind, seed)?;
    Ok(match weights {
        Some(&[lo, hi]) => write_weighted(&random_weights(g, lo, hi, seed)?),
        _ => write_graph(&g),
    })
}

fn run_match(g: &Global, name: &str, path: &Path, params: &AlgArgs, probes: bool) -> Out {
    let (graph, weights) = load(path)?;
    let reg = params.registry()?;
    let alg = reg.get(name)?;
    let m = alg.run(&graph, weights.as_ref(), &RandomTape::new(g.seed))?;
    let weight = match &weights {
        Some(w) => Some(m.weight(w)?),
        None => None,
    };
    if g.format == Format::Csv {
        return Ok(edges_csv(&m));
    }
    let mut out = json!({
        "algorithm": alg.name(),
        "params": alg.params(),
        "seed": g.seed,
        "n": graph.n(),
        "m": graph.m(),
        "size": m.len(),
        "weight": weight,
        "matching": edges_json(&m),
    });
    if probes {
        if name != "lca" {
            return Err(Failure::Usage("--probes applies to lca only".into()));
        }
        out["probes"] = serde_json::to_value(probe_report(&graph, params.delta_max.max(1))?).expect("serializable");
    }
    Ok(to_json(&out))
}

fn sens(g: &Global, name: &str, path: &Path, target: TargetArg, mode: ModeArg, params: &AlgArgs) -> Out {
    let (graph, weights) = load(path)?;
    let reg = params.registry()?;
    let target = match target {
        TargetArg::Edges => Target::Edges,
        TargetArg::Vertices => Target::Vertices,
    };
    let mode = match mode {
        ModeArg::Plain => Mode::Plain,
        ModeArg::Weighted => Mode::Weighted,
        ModeArg::Normalized => Mode::Normalized,
    };
    let (ps, population) = perturbations(&graph, target, g.seed);
    let exp = Experiment {
        algorithm: reg.get(name)?,
        graph: &graph,
        weights: weights.as_ref(),
        mode,
        trials: g.trials,
        base_seed: g.seed,
    };
    let report = estimate(&exp, &ps, population)?;
    Ok(match g.format {
        Format::Json => to_json(&report),
        Format::Csv => report.to_csv(),
    })
}

fn online(g: &Global, name: &str, path: &Path, arrival: Arrival, order_file: Option<&Path>, params: &AlgArgs) -> Out {
    let (graph, weights) = load(path)?;
    let reg = params.registry()?;
    let alg = reg.get(name)?;
    let stream = match (arrival, order_file) {
        (Arrival::Random, None) => VertexArrivalStream::shuffled(graph, g.seed),
        (Arrival::Id, None) => VertexArrivalStream::by_id(graph),
        (Arrival::File, Some(file)) => {
            let order = read(file)?
                .split_whitespace()
                .map(|t| t.parse::<Vertex>().map_err(|_| Failure::Usage(format!("bad vertex {t:?} in {}", file.display()))))
                .collect::<Result<Vec<_>, _>>()?;
            VertexArrivalStream::new(graph, order)?
        }
        (Arrival::File, None) => return Err(Failure::Usage("--arrival-order file needs --order-file".into())),
        (_, Some(_)) => return Err(Failure::Usage("--order-file needs --arrival-order file".into())),
    };
    let trace = simulate(&stream, alg, weights.as_ref(), &RandomTape::new(g.seed))?;
    Ok(match g.format {
        Format::Json => to_json(&json!({
            "algorithm": alg.name(),
            "params": alg.params(),
            "seed": g.seed,
            "n": stream.graph().n(),
            "order": stream.order(),
            "sizes": trace.sizes,
            "replacements": trace.replacements,
            "total": trace.total,
        })),
        Format::Csv => {
            let mut out = String::from("arrival,vertex,size,replacements\n");
            for (i, v) in stream.order().iter().enumerate() {
                let _ = writeln!(out, "{},{},{},{}", i + 1, v, trace.sizes[i], trace.replacements[i]);
            }
            out
        }
    })
}

fn lb_greedy(g: &Global, n: usize) -> Out {
    let (graph, order, p) = adversarial_greedy_instance(n)?;
    let before = greedy_matching(&graph, &order)?;
    let after = greedy_matching(&graph.apply(p)?, &order)?;
    Ok(match g.format {
        Format::Json => to_json(&json!({
            "n": n,
            "deleted": p,
            "before": edges_json(&before),
            "after": edges_json(&after),
            "distance": hamming(&before, &after),
        })),
        Format::Csv => {
            let mut out = String::from("u,v,before,after\n");
            for e in graph.edges() {
                let _ = writeln!(out, "{},{},{},{}", e.lo(), e.hi(), before.contains(*e), after.contains(*e));
            }
            out
        }
    })
}

fn oracle(g: &Global, path: &Path, max_n: usize) -> Out {
    let (graph, weights) = load(path)?;
    let (value, m) = match weights {
        Some(w) => {
            let (value, m) = max_weight_matching_limited(&WeightedGraph::new(graph.clone(), w)?, max_n)?;
            (json!(value), m)
        }
        None => {
            let (size, m) = max_matching_limited(&graph, max_n)?;
            (json!(size), m)
        }
    };
    Ok(match g.format {
        Format::Json => to_json(&json!({ "n": graph.n(), "m": graph.m(), "optimum": value, "matching": edges_json(&m) })),
        Format::Csv => edges_csv(&m),
    })
}
