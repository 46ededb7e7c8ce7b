//! `graphlab` command line: generation, statistics, matching, experiments
//! and significance tests, all seeded and file based.
//!
//! Exit status is 0 on success, 2 on flag errors (with usage text) and 1 on
//! runtime failures.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::ensemble::{build_ensemble, significance, Registry};
use crate::generators::{
    barabasi_albert, correlated_pair, BaParams, BernoulliMatrix, CorrPairParams, GnmParams,
    GnpParams, Model, WsParams,
};
use crate::graph::{Graph, ParseMode};
use crate::matching::{
    alignment_strength, exact_gmp_with_limit, local_search_gmp, recovery_csv,
    strength_convergence_experiment, recovery_experiment, Bijection, EXHAUSTIVE_LIMIT,
};
use crate::seed::Seed;
use crate::statistics::{
    char_path_length, clustering_counts, clustering_global, degree_histogram, poisson_pmf,
    poisson_tv_distance, powerlaw_fit, ws_curves, ws_curves_csv, DegreeHistogram,
};

/// Caps the rayon worker count; 0 or unset means automatic.
pub const THREADS_ENV: &str = "GRAPHLAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "graphlab", version, about = "Seeded random graph models and graph matching experiments")]
struct Cli {
    /// Accept self-loops and duplicate edges in input files, dropping them.
    #[arg(long, global = true)]
    lenient: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a graph (or a correlated pair) from a model.
    Generate(GenerateArgs),
    /// Compute statistics of a graph file.
    Stats(StatsArgs),
    /// Solve the graph matching problem between two graph files.
    Match(MatchArgs),
    /// Run a seeded Monte Carlo experiment and write a CSV table.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Test an observed graph's statistic against a null-model ensemble.
    Significance(SignificanceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    ErGnm,
    ErGnp,
    Ws,
    Ba,
    CorrPair,
}

/// Parameters shared by every model; each model reads the ones it needs.
#[derive(Debug, Clone, Args)]
struct ModelFlags {
    /// Vertex count (er-gnm, er-gnp, ws, corr-pair).
    #[arg(long)]
    n: Option<usize>,
    /// Edge count for er-gnm; edges per new vertex for ba.
    #[arg(long)]
    m: Option<usize>,
    /// Edge probability (er-gnp, corr-pair).
    #[arg(long)]
    p: Option<f64>,
    /// Even lattice degree (ws).
    #[arg(long)]
    k: Option<usize>,
    /// Rewiring probability (ws).
    #[arg(long)]
    beta: Option<f64>,
    /// Seed ring size (ba).
    #[arg(long)]
    m0: Option<usize>,
    /// Growth steps (ba).
    #[arg(long)]
    t: Option<usize>,
    /// Edge correlation (corr-pair).
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    EdgeList,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    #[command(flatten)]
    params: ModelFlags,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Second output file; required for corr-pair.
    #[arg(long)]
    out2: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "edge-list")]
    format: GraphFormat,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated metric names.
    #[arg(long, value_delimiter = ',', default_value = "vertices,edges,density,max-degree,clustering,path-length")]
    metrics: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MatchMethod {
    Exact,
    Local,
}

#[derive(Debug, Args)]
struct MatchArgs {
    #[arg(long)]
    g1: PathBuf,
    #[arg(long)]
    g2: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    method: MatchMethod,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest order the exact solver accepts.
    #[arg(long, default_value_t = EXHAUSTIVE_LIMIT)]
    limit: usize,
    /// Writes the matching as "vertex,image" CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Experiment {
    /// Normalized path length and clustering of Watts-Strogatz graphs.
    WsCurves {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Grid: "lo:hi:steps", "log:lo:hi:steps" or a comma list.
        #[arg(long, default_value = "log:0.0001:1:13")]
        betas: String,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Power-law exponent of Barabási-Albert degree distributions.
    BaPowerlaw {
        #[arg(long, default_value_t = 5)]
        m0: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 20_000)]
        t: usize,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        /// Smallest degree in the fit; defaults to m.
        #[arg(long)]
        k_min: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact-matching recovery of the latent alignment over a rho grid.
    Matchability {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value = "0:1:11")]
        rhos: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Alignment strength at the identity versus total correlation.
    Strength {
        #[arg(long)]
        n: usize,
        /// Edge probability; the within-block probability when --p-across is set.
        #[arg(long)]
        p: f64,
        /// Across-block probability for a two-block matrix.
        #[arg(long)]
        p_across: Option<f64>,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pooled G(n, p) degree distribution against Poisson((n-1)p).
    Poisson {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct SignificanceArgs {
    #[arg(long)]
    obs: PathBuf,
    /// Null model.
    #[arg(long, value_enum)]
    null: ModelKind,
    #[command(flatten)]
    params: ModelFlags,
    #[arg(long, default_value_t = 999)]
    ensemble: usize,
    #[arg(long, default_value = "clustering")]
    stat: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    configure_threads();
    match dispatch(cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(Failure::Usage(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn configure_threads() {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    if threads > 0 {
        // fails harmlessly if a pool already exists in this process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

enum Failure {
    Usage(clap::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(
        Cli::command().error(clap::error::ErrorKind::MissingRequiredArgument, msg),
    )
}

type Outcome = std::result::Result<String, Failure>;

fn dispatch(cli: Cli) -> Outcome {
    let mode = if cli.lenient {
        ParseMode::Lenient
    } else {
        ParseMode::Strict
    };
    match cli.command {
        Command::Generate(args) => generate(args),
        Command::Stats(args) => stats(args, mode),
        Command::Match(args) => run_match(args, mode),
        Command::Experiment(exp) => experiment(exp),
        Command::Significance(args) => run_significance(args, mode),
    }
}

fn need<T>(value: Option<T>, flag: &str, model: ModelKind) -> std::result::Result<T, Failure> {
    value.ok_or_else(|| {
        let name = model.to_possible_value().expect("no skipped variants");
        usage(format!("model {} requires --{flag}", name.get_name()))
    })
}

fn single_model(kind: ModelKind, f: &ModelFlags) -> std::result::Result<Model, Failure> {
    Ok(match kind {
        ModelKind::ErGnm => Model::Gnm(GnmParams {
            n: need(f.n, "n", kind)?,
            m: need(f.m, "m", kind)?,
        }),
        ModelKind::ErGnp => Model::Gnp(GnpParams {
            n: need(f.n, "n", kind)?,
            p: need(f.p, "p", kind)?,
        }),
        ModelKind::Ws => Model::WattsStrogatz(WsParams {
            n: need(f.n, "n", kind)?,
            k: need(f.k, "k", kind)?,
            beta: need(f.beta, "beta", kind)?,
        }),
        ModelKind::Ba => Model::BarabasiAlbert(BaParams {
            m0: need(f.m0, "m0", kind)?,
            m: need(f.m, "m", kind)?,
            t: need(f.t, "t", kind)?,
        }),
        ModelKind::CorrPair => {
            return Err(usage("corr-pair produces two graphs and is not a single-graph model"))
        }
    })
}

fn render_graph(g: &Graph, format: GraphFormat) -> String {
    match format {
        GraphFormat::EdgeList => g.to_edge_list(),
        GraphFormat::Json => {
            let mut s = g.to_json();
            s.push('\n');
            s
        }
    }
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn read_graph(path: &Path, mode: ParseMode) -> anyhow::Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        Graph::from_json(&text, mode)
    } else {
        Graph::parse_edge_list(&text, mode)
    };
    parsed.with_context(|| format!("parsing {}", path.display()))
}

fn generate(args: GenerateArgs) -> Outcome {
    let seed = Seed::new(args.seed);
    if args.model == ModelKind::CorrPair {
        let kind = args.model;
        let params = CorrPairParams {
            n: need(args.params.n, "n", kind)?,
            p: need(args.params.p, "p", kind)?,
            rho: need(args.params.rho, "rho", kind)?,
        };
        let out2 = args
            .out2
            .ok_or_else(|| usage("corr-pair requires --out2 for the second graph"))?;
        let (g1, g2) = correlated_pair(&params, seed).context("correlated_pair")?;
        write_file(&args.out, &render_graph(&g1, args.format))?;
        write_file(&out2, &render_graph(&g2, args.format))?;
        return Ok(format!(
            "generated corr-pair n={} edges={},{} -> {}, {}",
            params.n,
            g1.edge_count(),
            g2.edge_count(),
            args.out.display(),
            out2.display()
        ));
    }
    let model = single_model(args.model, &args.params)?;
    let g = model
        .generate(seed)
        .with_context(|| format!("generate {model}"))?;
    write_file(&args.out, &render_graph(&g, args.format))?;
    Ok(format!(
        "generated {model} vertices={} edges={} -> {}",
        g.vertex_count(),
        g.edge_count(),
        args.out.display()
    ))
}

fn metric(g: &Graph, name: &str) -> anyhow::Result<f64> {
    Ok(match name {
        "vertices" => g.vertex_count() as f64,
        "edges" => g.edge_count() as f64,
        "density" => g.density(),
        "max-degree" => g.max_degree() as f64,
        "mean-degree" => {
            if g.vertex_count() == 0 {
                0.0
            } else {
                2.0 * g.edge_count() as f64 / g.vertex_count() as f64
            }
        }
        "triangles" => clustering_counts(g).total_triangles() as f64,
        "clustering" => clustering_global(g),
        "path-length" => char_path_length(g).context("char_path_length")?.mean,
        "reachable-fraction" => {
            char_path_length(g)
                .context("char_path_length")?
                .reachable_fraction
        }
        other => bail!(
            "unknown metric {other:?}; known: vertices, edges, density, max-degree, \
             mean-degree, triangles, clustering, path-length, reachable-fraction"
        ),
    })
}

fn stats(args: StatsArgs, mode: ParseMode) -> Outcome {
    let g = read_graph(&args.input, mode)?;
    let values = args
        .metrics
        .iter()
        .map(|m| Ok((m.as_str(), metric(&g, m)?)))
        .collect::<anyhow::Result<Vec<_>>>()
        .context("stats")?;
    let body = match args.format {
        TableFormat::Csv => {
            let mut s = String::from("metric,value\n");
            for (name, v) in &values {
                writeln!(s, "{name},{v}").unwrap();
            }
            s
        }
        TableFormat::Json => {
            let map: serde_json::Map<String, serde_json::Value> = values
                .iter()
                .map(|(k, v)| ((*k).to_owned(), serde_json::json!(v)))
                .collect();
            format!("{}\n", serde_json::Value::Object(map))
        }
    };
    let summary = values
        .iter()
        .map(|(k, v)| format!("{k}={}", sig6(*v)))
        .collect::<Vec<_>>()
        .join(" ");
    match args.out {
        Some(path) => {
            write_file(&path, &body)?;
            Ok(summary)
        }
        None => Ok(body.trim_end().to_owned()),
    }
}

fn run_match(args: MatchArgs, mode: ParseMode) -> Outcome {
    let g1 = read_graph(&args.g1, mode)?;
    let g2 = read_graph(&args.g2, mode)?;
    let result = match args.method {
        MatchMethod::Exact => exact_gmp_with_limit(&g1, &g2, args.limit).context("exact_gmp")?,
        MatchMethod::Local => local_search_gmp(&g1, &g2, args.restarts, Seed::new(args.seed))
            .context("local_search_gmp")?,
    };
    let result = result
        .against(&Bijection::identity(g1.vertex_count()))
        .context("mismatch_count")?;
    if let Some(path) = &args.out {
        let mut s = String::from("vertex,image\n");
        for (v, t) in result.best.as_slice().iter().enumerate() {
            writeln!(s, "{v},{t}").unwrap();
        }
        write_file(path, &s)?;
    }
    let strength = match alignment_strength(&g1, &g2, &result.best) {
        Ok(s) => sig6(s),
        Err(_) => "undefined".to_owned(),
    };
    Ok(format!(
        "method={} disagreements={} optimal={} mismatches_vs_identity={} strength={}",
        match args.method {
            MatchMethod::Exact => "exact",
            MatchMethod::Local => "local",
        },
        result.disagreements,
        result.optimal,
        result.mismatches.unwrap_or(0),
        strength
    ))
}

fn experiment(exp: Experiment) -> Outcome {
    match exp {
        Experiment::WsCurves { n, k, betas, trials, seed, out } => {
            let grid = parse_grid(&betas).map_err(usage)?;
            let points = ws_curves(n, k, &grid, trials, Seed::new(seed)).context("ws_curves")?;
            write_file(&out, &ws_curves_csv(&points))?;
            Ok(format!(
                "ws-curves n={n} k={k} points={} trials={trials} -> {}",
                points.len(),
                out.display()
            ))
        }
        Experiment::BaPowerlaw { m0, m, t, trials, k_min, seed, out } => {
            let params = BaParams { m0, m, t };
            let k_min = k_min.unwrap_or(m);
            let mut csv = String::from("trial,gamma,k_min,r2\n");
            let mut pooled = DegreeHistogram::default();
            let mut gammas = Vec::with_capacity(trials);
            for trial in 0..trials {
                let g = barabasi_albert(&params, Seed::new(seed).with_stream(trial as u64))
                    .context("barabasi_albert")?;
                let h = degree_histogram(&g);
                let fit = powerlaw_fit(&h, k_min).context("powerlaw_fit")?;
                writeln!(csv, "{trial},{},{},{}", fit.gamma, fit.k_min, fit.r2).unwrap();
                gammas.push(fit.gamma);
                pooled.merge(&h);
            }
            write_file(&out, &csv)?;
            let mean = gammas.iter().sum::<f64>() / gammas.len().max(1) as f64;
            let pooled_fit = if trials > 0 {
                sig6(powerlaw_fit(&pooled, k_min).context("powerlaw_fit")?.gamma)
            } else {
                "undefined".to_owned()
            };
            Ok(format!(
                "ba-powerlaw m0={m0} m={m} t={t} mean_gamma={} pooled_gamma={pooled_fit} -> {}",
                sig6(mean),
                out.display()
            ))
        }
        Experiment::Matchability { n, p, rhos, trials, seed, out } => {
            let grid = parse_grid(&rhos).map_err(usage)?;
            let rows = recovery_experiment(n, p, &grid, trials, Seed::new(seed))
                .context("recovery_experiment")?;
            write_file(&out, &recovery_csv(&rows))?;
            let cells: Vec<String> = rows
                .iter()
                .map(|r| format!("{}:{}", sig6(r.rho), sig6(r.recovery_fraction)))
                .collect();
            Ok(format!("matchability n={n} p={p} recovery {} -> {}", cells.join(" "), out.display()))
        }
        Experiment::Strength { n, p, p_across, rho, trials, seed, out } => {
            let probs = match p_across {
                Some(q) => BernoulliMatrix::two_block(n, p, q),
                None => BernoulliMatrix::constant(n, p),
            }
            .context("bernoulli matrix")?;
            let table = strength_convergence_experiment(&probs, rho, trials, Seed::new(seed))
                .context("strength_convergence_experiment")?;
            write_file(&out, &table.to_csv())?;
            let worst = table.rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
            Ok(format!(
                "strength n={n} rho_T={} mean_str={} max_abs_error={} -> {}",
                sig6(table.report.rho_t),
                sig6(table.mean_strength()),
                sig6(worst),
                out.display()
            ))
        }
        Experiment::Poisson { n, p, samples, seed, out } => {
            let params = GnpParams { n, p };
            let mut pooled = DegreeHistogram::default();
            for i in 0..samples {
                let g = crate::generators::gnp(&params, Seed::new(seed).with_stream(i as u64))
                    .context("gnp")?;
                pooled.merge(&degree_histogram(&g));
            }
            let lambda = n.saturating_sub(1) as f64 * p;
            let tv = poisson_tv_distance(&pooled, lambda).context("poisson_tv_distance")?;
            let top = pooled.max_degree().unwrap_or(0);
            let pmf = poisson_pmf(lambda, top);
            let total = pooled.total() as f64;
            let mut csv = String::from("degree,empirical,poisson\n");
            for (r, q) in pmf.iter().enumerate() {
                writeln!(csv, "{r},{},{q}", pooled.get(r) as f64 / total).unwrap();
            }
            write_file(&out, &csv)?;
            Ok(format!(
                "poisson n={n} p={p} samples={samples} lambda={} tv={} -> {}",
                sig6(lambda),
                sig6(tv),
                out.display()
            ))
        }
    }
}

fn run_significance(args: SignificanceArgs, mode: ParseMode) -> Outcome {
    let model = single_model(args.null, &args.params)?;
    let eta = Registry::default().get(&args.stat).map_err(usage)?;
    let observed = read_graph(&args.obs, mode)?;
    let summary = build_ensemble(&model, args.ensemble, &eta, Seed::new(args.seed))
        .context("build_ensemble")?;
    let sig = significance(&summary, &observed).context("significance")?;
    let line = format!(
        "significance stat={} observed={} ensemble={} p_lower={} p_upper={} p_two_sided={}",
        sig.statistic,
        sig6(sig.observed),
        sig.ensemble_count,
        sig6(sig.p_lower),
        sig6(sig.p_upper),
        sig6(sig.p_two_sided)
    );
    match args.out {
        Some(path) => {
            write_file(&path, &sig.to_csv())?;
            Ok(line)
        }
        None => Ok(sig.to_csv().trim_end().to_owned()),
    }
}

/// Parses "lo:hi:steps" (evenly spaced, endpoints included),
/// "log:lo:hi:steps" (geometric) or a comma-separated list.
pub fn parse_grid(text: &str) -> anyhow::Result<Vec<f64>> {
    let num = |s: &str| -> anyhow::Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| anyhow!("bad number {s:?} in grid {text:?}"))
    };
    let parts: Vec<&str> = text.split(':').collect();
    let (log, lo, hi, steps) = match parts.as_slice() {
        [single] => return single.split(',').map(num).collect(),
        [lo, hi, steps] => (false, num(lo)?, num(hi)?, *steps),
        ["log", lo, hi, steps] => (true, num(lo)?, num(hi)?, *steps),
        _ => bail!("grid {text:?} is not lo:hi:steps, log:lo:hi:steps or a comma list"),
    };
    let steps: usize = steps
        .trim()
        .parse()
        .map_err(|_| anyhow!("bad step count {steps:?} in grid {text:?}"))?;
    if steps == 0 {
        bail!("grid {text:?} needs at least one step");
    }
    if log && (lo <= 0.0 || hi <= 0.0) {
        bail!("geometric grid {text:?} needs positive endpoints");
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            let f = i as f64 / last;
            let v = if i == steps - 1 {
                hi
            } else if log {
                (lo.ln() + f * (hi.ln() - lo.ln())).exp()
            } else {
                lo + f * (hi - lo)
            };
            // Twelve significant digits drop the rounding residue of ln/exp.
            format!("{v:.11e}").parse::<f64>().unwrap_or(v)
        })
        .collect())
}

/// Six significant digits, plain decimal notation.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_owned();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}
