//! Command-line interface: subcommand parsing, file plumbing, and text
//! emission for every subsystem.
//!
//! Equal invocations produce byte-identical output: all randomness is
//! derived from the `--seed` flag [decision D-24] and every float is
//! printed through one 12-significant-digit formatter [decision D-25].

use crate::densities::{self, SampleSource};
use crate::energies::{
    gse_exact, gse_local, gse_sampling_experiment, CouplingMatrix, SquareMatrix,
};
use crate::error::{Error, Result};
use crate::io::{self, fmt_sig, GkFile};
use crate::model::{graphon_of_graph, SimpleGraph};
use crate::norms::{cut_norm_exact, cut_norm_heuristic, OracleMode};
use crate::regularity::{cut_p_regularity, weak_regularity, RegularityConfig};
use crate::witness::{find_witness, nd_parameter, nd_testing_experiment, summarize_experiment};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "graphlim", version, about = "step-graphon toolkit", long_about = None)]
struct Cli {
    /// Worker threads for parallel sections (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output format for tabular commands.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

/// Tabular output rendered as CSV rows plus `# key: value` notes, or as a
/// JSON object with `rows` and `notes`.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    notes: Vec<(String, String)>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new(), notes: Vec::new() }
    }

    fn note(&mut self, key: &str, value: String) {
        self.notes.push((key.to_string(), value));
    }

    fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|c| match c {
                            Cell::Int(v) => v.to_string(),
                            Cell::Float(v) => fmt_sig(*v),
                            Cell::Text(v) => v.clone(),
                        })
                        .collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                for (k, v) in &self.notes {
                    out.push_str(&format!("# {k}: {v}\n"));
                }
                out
            }
            OutputFormat::Json => {
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = serde_json::Map::new();
                        for (col, cell) in self.columns.iter().zip(row) {
                            let v = match cell {
                                Cell::Int(v) => serde_json::json!(v),
                                Cell::Float(v) => serde_json::json!(v),
                                Cell::Text(v) => serde_json::json!(v),
                            };
                            obj.insert(col.to_string(), v);
                        }
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                let notes: serde_json::Map<String, serde_json::Value> = self
                    .notes
                    .iter()
                    .map(|(k, v)| (k.clone(), serde_json::json!(v)))
                    .collect();
                let mut out = serde_json::to_string_pretty(&serde_json::json!({
                    "rows": rows,
                    "notes": notes,
                }))
                .unwrap();
                out.push('\n');
                out
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormMode {
    Exact,
    Heur,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RegMode {
    Weak,
    Cutp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OptMode {
    Exact,
    Local,
}

#[derive(Subcommand)]
enum Command {
    /// Cut norm of a step kernel with its witness sets.
    Cutnorm(CutnormArgs),
    /// Regularity decompositions (weak or partition-localized).
    Regularity(RegularityArgs),
    /// Induced density of a small graph in a graph or step graphon.
    Density(DensityArgs),
    /// Uniform or W-random samples, one CSV row per trial.
    Sample(SampleArgs),
    /// Sampling-deviation table of a registered parameter.
    Concentrate(ConcentrateArgs),
    /// Ground state energies.
    #[command(subcommand)]
    Energy(EnergyCommand),
    /// (k,m)-coloring utilities.
    #[command(subcommand)]
    Colorings(ColoringsCommand),
    /// Sampling experiment for a witness parameter.
    Ndtest(NdtestArgs),
    /// Quick deterministic checks of the worked examples.
    Selftest,
}

#[derive(Args)]
struct CutnormArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    mode: NormMode,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RegularityArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 1)]
    m0: usize,
    #[arg(long, value_enum, default_value = "weak")]
    mode: RegMode,
    #[arg(long, default_value_t = false)]
    equipartition: bool,
    #[arg(long)]
    granularity: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Oracle: exact needs few classes, heur scales.
    #[arg(long, value_enum, default_value = "exact")]
    oracle: NormMode,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    /// Write the partition as JSON here (energy trace goes to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DensityArgs {
    /// The small graph F.
    #[arg(long = "F")]
    f: PathBuf,
    /// Host: a graph file (.graph) or kernel file (.gk).
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    q: usize,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConcentrateArgs {
    /// Registered parameter: edge-density, maxcut, dicut, or mcol3.
    #[arg(long)]
    param: String,
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated sample sizes.
    #[arg(long)]
    q: String,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EnergyCommand {
    /// Maximize the coupling form over node partitions.
    Eval(EnergyEvalArgs),
    /// Sample principal subarrays and record energy deviations.
    Sample(EnergySampleArgs),
}

#[derive(Args)]
struct EnergyEvalArgs {
    #[arg(long)]
    input: PathBuf,
    /// Coupling: maxcut, identity, or a JSON file with a square matrix.
    #[arg(long = "J", default_value = "maxcut")]
    j: String,
    #[arg(long, default_value_t = 2)]
    s: usize,
    #[arg(long, value_enum, default_value = "exact")]
    mode: OptMode,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EnergySampleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long = "J", default_value = "maxcut")]
    j: String,
    #[arg(long, default_value_t = 2)]
    s: usize,
    #[arg(long)]
    q: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0.15)]
    rho: f64,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ColoringsCommand {
    /// Count (and optionally list) the (k,m)-colorings of a graph.
    Enumerate(ColoringsEnumArgs),
}

#[derive(Args)]
struct ColoringsEnumArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    m: usize,
    /// Print up to this many colorings.
    #[arg(long, default_value_t = 0)]
    limit: usize,
}

#[derive(Args)]
struct NdtestArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    witness: String,
    /// Comma-separated sample sizes.
    #[arg(long)]
    q: String,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_q_grid(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("bad sample size '{s}'")))
        })
        .collect()
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn load_source(path: &Path) -> Result<SampleSource> {
    if path.extension().is_some_and(|e| e == "gk") {
        Ok(SampleSource::Graphon(io::read_gk(path)?.graphon()?))
    } else {
        Ok(SampleSource::Graph(io::read_graph(path)?))
    }
}

fn load_coupling(spec: &str, s: usize) -> Result<CouplingMatrix> {
    match spec {
        "maxcut" => Ok(CouplingMatrix::maxcut()),
        "identity" => Ok(CouplingMatrix::identity(s)),
        path => {
            let text = std::fs::read_to_string(path)?;
            let rows: Vec<Vec<f64>> = serde_json::from_str(&text)
                .map_err(|e| Error::invalid(format!("bad coupling file: {e}")))?;
            CouplingMatrix::from_rows(rows)
        }
    }
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match dispatch(cli.command, cli.format) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cmd: Command, format: OutputFormat) -> Result<()> {
    match cmd {
        Command::Cutnorm(args) => cmd_cutnorm(args),
        Command::Regularity(args) => cmd_regularity(args),
        Command::Density(args) => cmd_density(args),
        Command::Sample(args) => cmd_sample(args, format),
        Command::Concentrate(args) => cmd_concentrate(args, format),
        Command::Energy(EnergyCommand::Eval(args)) => cmd_energy_eval(args),
        Command::Energy(EnergyCommand::Sample(args)) => cmd_energy_sample(args, format),
        Command::Colorings(ColoringsCommand::Enumerate(args)) => cmd_colorings_enumerate(args),
        Command::Ndtest(args) => cmd_ndtest(args, format),
        Command::Selftest => cmd_selftest(),
    }
}

fn cmd_cutnorm(args: CutnormArgs) -> Result<()> {
    let kernel = io::read_gk(&args.input)?.kernel()?;
    let (value, witness) = match args.mode {
        NormMode::Exact => cut_norm_exact(&kernel)?,
        NormMode::Heur => cut_norm_heuristic(&kernel, args.restarts, args.seed),
    };
    println!("value: {}", fmt_sig(value));
    println!("s: {:?}", witness.s);
    println!("t: {:?}", witness.t);
    Ok(())
}

fn cmd_regularity(args: RegularityArgs) -> Result<()> {
    let oracle = match args.oracle {
        NormMode::Exact => OracleMode::Exact,
        NormMode::Heur => OracleMode::Heuristic { restarts: args.restarts },
    };
    let cfg = RegularityConfig {
        epsilon: args.eps,
        m0: args.m0,
        max_iterations: None,
        oracle,
        equipartition: args.equipartition,
        granularity: args.granularity,
        seed: args.seed,
        class_cap: 4096,
    };
    let result = match (args.mode, io::read_gk(&args.input)?) {
        (RegMode::Weak, GkFile::Kernel(w)) => weak_regularity(&w, &cfg)?,
        (RegMode::Weak, GkFile::Colored(w)) => {
            crate::regularity::weak_regularity_colored(&w, &cfg)?
        }
        (RegMode::Cutp, GkFile::Colored(w)) => cut_p_regularity(&w, &cfg)?,
        (RegMode::Cutp, GkFile::Kernel(_)) => {
            return Err(Error::invalid(
                "localized regularity expects a colored digraphon input",
            ))
        }
    };
    let mut csv = String::from("step,energy\n");
    for (i, e) in result.energy_trace.iter().enumerate() {
        csv.push_str(&format!("{i},{}\n", fmt_sig(*e)));
    }
    csv.push_str(&format!("# iterations: {}\n", result.iterations));
    csv.push_str(&format!("# classes: {}\n", result.partition.len()));
    csv.push_str(&format!("# certified_residual: {}\n", fmt_sig(result.certified_residual)));
    csv.push_str(&format!("# certified_exhaustive: {}\n", result.certified_exhaustive));
    print!("{csv}");
    if let Some(out) = args.out {
        let json = serde_json::json!({
            "measures": result.partition.measures(),
            "alignment_n": result.partition.alignment_n(),
            "atom_classes": result.atom_classes,
            "iterations": result.iterations,
            "energy_trace": result.energy_trace,
            "certified_residual": result.certified_residual,
            "certified_exhaustive": result.certified_exhaustive,
            "certified_scope_classes": result.certified_scope_classes,
        });
        std::fs::write(out, serde_json::to_string_pretty(&json).unwrap())?;
    }
    Ok(())
}

fn cmd_density(args: DensityArgs) -> Result<()> {
    let f = io::read_graph(&args.f)?;
    let value = if args.input.extension().is_some_and(|e| e == "gk") {
        let w = io::read_gk(&args.input)?.graphon()?;
        densities::density_step_graphon(&f, &w)?
    } else {
        let g = io::read_graph(&args.input)?;
        densities::induced_density_graph(&f, &g)?
    };
    println!("{}", fmt_sig(value));
    Ok(())
}

fn cmd_sample(args: SampleArgs, format: OutputFormat) -> Result<()> {
    let source = load_source(&args.input)?;
    let mut table = Table::new(vec!["trial", "q", "edges", "edge_density"]);
    for trial in 0..args.trials {
        let g = source.draw(args.q, args.seed ^ trial as u64)?;
        let density = 2.0 * g.edge_count() as f64 / (g.n() * g.n()) as f64;
        table.rows.push(vec![
            Cell::Int(trial as u64),
            Cell::Int(args.q as u64),
            Cell::Int(g.edge_count() as u64),
            Cell::Float(density),
        ]);
    }
    emit(&args.out, &table.render(format))
}

fn cmd_concentrate(args: ConcentrateArgs, format: OutputFormat) -> Result<()> {
    let source = load_source(&args.input)?;
    let q_grid = parse_q_grid(&args.q)?;
    let (eval, base): (Box<dyn Fn(&SimpleGraph) -> Result<f64> + Sync>, f64) =
        match args.param.as_str() {
            "edge-density" => {
                let base = match &source {
                    SampleSource::Graph(g) => {
                        2.0 * g.edge_count() as f64 / (g.n() * g.n()) as f64
                    }
                    SampleSource::Graphon(w) => densities::density_step_graphon(
                        &SimpleGraph::complete(2),
                        w,
                    )?,
                };
                (
                    Box::new(|g: &SimpleGraph| {
                        Ok(2.0 * g.edge_count() as f64 / (g.n() * g.n()) as f64)
                    }),
                    base,
                )
            }
            name => {
                let w = find_witness(name)?;
                let SampleSource::Graph(g) = &source else {
                    return Err(Error::invalid(
                        "witness parameters need a graph source".to_string(),
                    ));
                };
                let (base, _) = nd_parameter(g, &w, args.restarts, args.seed)?;
                let restarts = args.restarts;
                let seed = args.seed;
                (
                    Box::new(move |g: &SimpleGraph| {
                        Ok(nd_parameter(g, &find_witness(name)?, restarts, seed)?.0)
                    }),
                    base,
                )
            }
        };
    let rows = densities::concentration_experiment(
        &source,
        eval.as_ref(),
        base,
        &q_grid,
        args.eps,
        args.trials,
        args.seed,
    )?;
    let mut table = Table::new(vec!["q", "eps", "failure_rate", "mean_abs_dev"]);
    for row in rows {
        table.rows.push(vec![
            Cell::Int(row.q as u64),
            Cell::Float(row.eps),
            Cell::Float(row.failure_rate),
            Cell::Float(row.mean_abs_dev),
        ]);
    }
    emit(&args.out, &table.render(format))
}

fn cmd_energy_eval(args: EnergyEvalArgs) -> Result<()> {
    let g = io::read_graph(&args.input)?;
    let a = SquareMatrix::from_graph(&g);
    let j = load_coupling(&args.j, args.s)?;
    let (value, partition) = match args.mode {
        OptMode::Exact => gse_exact(&a, &j, args.s)?,
        OptMode::Local => gse_local(&a, &j, args.s, args.restarts, args.seed)?,
    };
    println!("value: {}", fmt_sig(value));
    println!("partition: {:?}", partition.classes());
    Ok(())
}

fn cmd_energy_sample(args: EnergySampleArgs, format: OutputFormat) -> Result<()> {
    let g = io::read_graph(&args.input)?;
    let a = SquareMatrix::from_graph(&g);
    let j = load_coupling(&args.j, args.s)?;
    let (baseline, _) = if (args.s as f64).powi(a.n() as i32 - 1) <= 1.3e7 {
        gse_exact(&a, &j, args.s)?
    } else {
        gse_local(&a, &j, args.s, args.restarts.max(128), args.seed)?
    };
    let report = gse_sampling_experiment(
        &a,
        &j,
        args.s,
        args.q,
        args.trials,
        args.rho,
        baseline,
        args.restarts,
        args.seed,
    )?;
    let mut table = Table::new(vec!["trial", "sample_value", "deviation"]);
    for t in &report.trials {
        table.rows.push(vec![
            Cell::Int(t.trial as u64),
            Cell::Float(t.sample_value),
            Cell::Float(t.deviation),
        ]);
    }
    table.note("baseline", fmt_sig(report.baseline));
    table.note("threshold", fmt_sig(report.threshold));
    table.note("exceedance_rate", fmt_sig(report.exceedance_rate));
    emit(&args.out, &table.render(format))
}

fn cmd_colorings_enumerate(args: ColoringsEnumArgs) -> Result<()> {
    let g = io::read_graph(&args.input)?;
    let count = crate::colorings::km_coloring_count(&g, args.k, args.m);
    println!("count: {}", fmt_sig(count));
    if args.limit > 0 {
        for (i, c) in crate::colorings::enumerate_km_colorings(&g, args.k, args.m)?
            .take(args.limit)
            .enumerate()
        {
            println!("coloring {i}:");
            print!("{}", io::format_colored_digraph(c.base()));
        }
    }
    Ok(())
}

fn cmd_ndtest(args: NdtestArgs, format: OutputFormat) -> Result<()> {
    let g = io::read_graph(&args.input)?;
    let w = find_witness(&args.witness)?;
    let q_grid = parse_q_grid(&args.q)?;
    let records = nd_testing_experiment(&g, &w, &q_grid, args.trials, args.restarts, args.seed)?;
    let mut table = Table::new(vec![
        "witness", "q", "trial", "f_source", "f_sample", "deviation", "mode",
    ]);
    for r in &records {
        table.rows.push(vec![
            Cell::Text(r.witness.clone()),
            Cell::Int(r.q as u64),
            Cell::Int(r.trial as u64),
            Cell::Float(r.f_source),
            Cell::Float(r.f_sample),
            Cell::Float(r.deviation),
            Cell::Text(r.mode.clone()),
        ]);
    }
    for s in summarize_experiment(&records, args.eps) {
        table.note(
            &format!("q={}", s.q),
            format!(
                "median_abs_dev={} one_sided_failure={} two_sided_failure={}",
                fmt_sig(s.median_abs_dev),
                fmt_sig(s.one_sided_failure),
                fmt_sig(s.two_sided_failure)
            ),
        );
    }
    emit(&args.out, &table.render(format))
}

fn cmd_selftest() -> Result<()> {
    use crate::colorings::{enumerate_km_colorings, km_coloring_count};
    use crate::model::{
        digraphon_of_colored, ColoredDigraph, IntervalPartition, NodePartition, StepGraphon,
        StepKernel,
    };
    use crate::regularity::{average, equipartition_round};

    let mut failures = 0usize;
    let mut check = |name: &str, ok: bool, detail: String| {
        if ok {
            println!("ok - {name}");
        } else {
            println!("FAIL - {name}: {detail}");
            failures += 1;
        }
    };

    let k3 = SimpleGraph::complete(3);
    let w3 = graphon_of_graph(&k3);
    check(
        "graphon of K3 has unit off-diagonal blocks",
        (0..3).all(|i| (0..3).all(|j| w3.value(i, j) == if i == j { 0.0 } else { 1.0 })),
        String::new(),
    );

    let k2 = graphon_of_graph(&SimpleGraph::complete(2));
    let (v, _) = cut_norm_exact(k2.kernel())?;
    check("cut norm of the K2 graphon", (v - 0.5).abs() < 1e-12, fmt_sig(v));

    let constant = StepKernel::constant(IntervalPartition::trivial(), -0.4);
    let (v, _) = cut_norm_heuristic(&constant, 1, 0);
    check("heuristic resolves constant kernels", (v - 0.4).abs() < 1e-12, fmt_sig(v));

    let w = StepGraphon::constant(0.3).unwrap();
    let d = densities::density_step_graphon(&k3, &w)?;
    check("triangle density in the constant 0.3 graphon", (d - 0.027).abs() < 1e-12, fmt_sig(d));
    let p3 = SimpleGraph::path(3);
    let d = densities::density_step_graphon(&p3, &w)?;
    check("path density p^2(1-p)", (d - 0.3 * 0.3 * 0.7).abs() < 1e-12, fmt_sig(d));

    let count = km_coloring_count(&SimpleGraph::complete(2), 2, 1);
    check("K2 has three (2,1)-colorings", count == 3.0, fmt_sig(count));
    let shaded = enumerate_km_colorings(&SimpleGraph::path(3), 2, 1)?
        .all(|c| c.shadow() == &SimpleGraph::path(3));
    check("enumerated colorings shade back", shaded, String::new());

    let p = IntervalPartition::new(vec![0.5, 0.5]).unwrap();
    let checker = StepKernel::new(p, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let avg = average(&checker, &IntervalPartition::trivial())?;
    check("checkerboard averages to 1/2", (avg.value(0, 0) - 0.5).abs() < 1e-12, String::new());

    let p = IntervalPartition::new(vec![0.3, 0.7]).unwrap();
    let r = equipartition_round(&p, 0.25)?;
    check(
        "equipartition rounding of (0.3, 0.7) at unit 1/4",
        r.partition.measures() == [0.25, 0.75] && (r.total_sym_diff - 0.1).abs() < 1e-12,
        format!("{:?}", r.partition.measures()),
    );

    let a = SquareMatrix::from_graph(&SimpleGraph::cycle(5));
    let (v, _) = gse_exact(&a, &CouplingMatrix::maxcut(), 2)?;
    check("max-cut density of the 5-cycle", (v - 0.32).abs() < 1e-12, fmt_sig(v));

    let cfg = RegularityConfig::new(0.1);
    let result = weak_regularity(&StepKernel::constant(IntervalPartition::trivial(), 0.4), &cfg)?;
    check("weak regularity of a constant kernel stops immediately", result.iterations == 0, String::new());

    let zero = StepGraphon::constant(0.0).unwrap();
    let s = densities::sample_graphon(&zero, 5, 1);
    check("zero graphon samples empty graphs", s.simple().unwrap().edge_count() == 0, String::new());

    let g = ColoredDigraph::uniform(5, 3, 2);
    let dig = digraphon_of_colored(&g);
    let diag: f64 = (0..5).map(|i| dig.partition().measure(i).powi(2)).sum();
    check("diagonal cells carry measure 1/n", (diag - 0.2).abs() < 1e-12, fmt_sig(diag));

    let w = find_witness("maxcut")?;
    let (v, _) = crate::witness::weak_nd_value(
        &SimpleGraph::complete(4),
        &w,
        crate::witness::SearchMode::Exact,
        0,
    )?;
    check("max-cut witness on K4", (v - 0.5).abs() < 1e-12, fmt_sig(v));

    let dw = find_witness("dicut")?;
    let (v, _) = crate::witness::nd_value_exact(&SimpleGraph::path(3), &dw)?;
    check("directed color-0 witness on P3", (v - 4.0 / 9.0).abs() < 1e-12, fmt_sig(v));

    let t = NodePartition::new(vec![0, 1, 0, 1, 0], 2).unwrap();
    let smoothed = crate::witness::smoothed_value_with(
        &SimpleGraph::cycle(5),
        &t,
        2,
        &mut |_, _| Ok(0.125),
    )?;
    check("smoothing preserves constants", (smoothed - 0.125).abs() < 1e-12, fmt_sig(smoothed));

    if failures == 0 {
        println!("selftest: all checks passed");
        Ok(())
    } else {
        Err(Error::invalid(format!("{failures} selftest checks failed")))
    }
}
