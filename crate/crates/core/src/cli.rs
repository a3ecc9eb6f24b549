//! Command-line front end: `generate`, `partition`, `evaluate`, `replay`.
//!
//! Every flag can also be set through an environment variable named
//! `XTRAPULP_<FLAG>` (upper case, dashes as underscores), e.g.
//! `XTRAPULP_PARTS=8`. Exit codes: 0 success, 2 bad input or arguments,
//! 3 balance constraint missed under `--strict`, 1 anything else.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::baselines;
use crate::bsp::Runtime;
use crate::error::{Error, Result};
use crate::gen::{GenKind, GenSpec, RMAT_DEFAULT};
use crate::graph::{build_csr_with, distribute, Distribution, DistributionKind, GlobalGraph};
use crate::io;
use crate::metrics::{self, performance_ratio, PerformanceRatios, QualityReport, ResultTable, RunMetadata};
use crate::partition::{Config, Engine, InitMode};
use crate::Part;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_STRICT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "xtrapulp", version, about = "Label-propagation graph partitioner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic edge list.
    Generate(GenerateArgs),
    /// Partition a graph and write the part file and a quality report.
    Partition(PartitionArgs),
    /// Score one or more partition files of the same graph.
    Evaluate(EvaluateArgs),
    /// Re-run the partition recorded in a report's manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Xtrapulp,
    Random,
    Vblock,
    Eblock,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GenKindArg {
    Rmat,
    Er,
    Randhd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InitArg {
    BfsLp,
    Random,
    Block,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DistArg {
    Block,
    Random,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub kind: GenKindArg,
    /// log2 of the vertex count (R-MAT).
    #[arg(long, env = "XTRAPULP_SCALE")]
    pub scale: Option<u32>,
    /// Vertex count (er, randhd; or R-MAT when a power of two).
    #[arg(short = 'n', long, env = "XTRAPULP_NUM_VERTICES")]
    pub num_vertices: Option<usize>,
    #[arg(long, default_value_t = 16, env = "XTRAPULP_DAVG")]
    pub davg: usize,
    /// R-MAT quadrant probabilities `a,b,c,d`.
    #[arg(long, value_delimiter = ',', num_args = 4, env = "XTRAPULP_PROBS")]
    pub probs: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1, env = "XTRAPULP_SEED")]
    pub seed: u64,
    /// Output file; stdout when omitted.
    #[arg(short = 'o', long, env = "XTRAPULP_OUTPUT")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Edge-list file.
    #[arg(short = 'i', long, env = "XTRAPULP_INPUT")]
    pub input: PathBuf,
    /// Vertex count; IDs are then used verbatim and must be below it.
    #[arg(short = 'n', long, env = "XTRAPULP_NUM_VERTICES")]
    pub num_vertices: Option<usize>,
    /// Collapse parallel edges.
    #[arg(long, env = "XTRAPULP_DEDUP")]
    pub dedup: bool,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(short = 'p', long = "parts", env = "XTRAPULP_PARTS")]
    pub parts: usize,
    /// Simulated task count; defaults to the number of available cores.
    #[arg(short = 'T', long = "tasks", env = "XTRAPULP_TASKS")]
    pub tasks: Option<usize>,
    #[arg(long = "vert-imb", default_value_t = 0.10, env = "XTRAPULP_VERT_IMB")]
    pub vert_imb: f64,
    #[arg(long = "edge-imb", default_value_t = 0.10, env = "XTRAPULP_EDGE_IMB")]
    pub edge_imb: f64,
    /// Multiplier endpoint at the last iteration.
    #[arg(short = 'X', default_value_t = 1.0, env = "XTRAPULP_X")]
    pub x: f64,
    /// Multiplier endpoint at the first iteration.
    #[arg(short = 'Y', default_value_t = 0.25, env = "XTRAPULP_Y")]
    pub y: f64,
    /// `outer,balance,refine` iteration counts.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [3usize, 5, 10], env = "XTRAPULP_ITERS")]
    pub iters: Vec<usize>,
    #[arg(long, default_value_t = 1, env = "XTRAPULP_SEED")]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "xtrapulp", env = "XTRAPULP_METHOD")]
    pub method: Method,
    #[arg(long, value_enum, default_value = "bfs-lp", env = "XTRAPULP_INIT")]
    pub init: InitArg,
    #[arg(long, value_enum, default_value = "random", env = "XTRAPULP_DIST")]
    pub dist: DistArg,
    /// Exit with status 3 if the result breaks a balance constraint.
    #[arg(long, env = "XTRAPULP_STRICT")]
    pub strict: bool,
    /// Run simulated tasks one at a time.
    #[arg(long, env = "XTRAPULP_SEQUENTIAL")]
    pub sequential: bool,
    /// Partition file; stdout when omitted.
    #[arg(short = 'o', long, env = "XTRAPULP_OUTPUT")]
    pub output: Option<PathBuf>,
    /// JSON report with the run manifest.
    #[arg(long, env = "XTRAPULP_REPORT")]
    pub report: Option<PathBuf>,
    /// Per-exchange message counts as JSON lines.
    #[arg(long, env = "XTRAPULP_TRACE")]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Partition files, optionally labelled as `name=path`.
    #[arg(required = true)]
    pub partitions: Vec<String>,
    /// Part count; inferred from the labels when omitted.
    #[arg(short = 'p', long = "parts", env = "XTRAPULP_PARTS")]
    pub parts: Option<usize>,
    #[arg(long, env = "XTRAPULP_REPORT")]
    pub report: Option<PathBuf>,
    #[arg(long, env = "XTRAPULP_CSV")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Report written by `partition --report`.
    pub report: PathBuf,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    #[arg(long = "new-report")]
    pub new_report: Option<PathBuf>,
}

/// Where a partitioned graph came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputSource {
    File { path: PathBuf, num_vertices: Option<usize>, dedup: bool },
    Generated(GenSpec),
}

/// Everything needed to reproduce a partition run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub timestamp_unix: u64,
    pub input: InputSource,
    pub method: Method,
    pub config: Config,
    pub partition_output: Option<PathBuf>,
    pub report_output: Option<PathBuf>,
    pub id_map_output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub manifest: RunManifest,
    pub report: QualityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedReport {
    pub name: String,
    pub report: QualityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub graph: String,
    pub reports: Vec<NamedReport>,
    pub edge_cut_ratios: PerformanceRatios,
    pub max_cut_ratios: PerformanceRatios,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
            } else {
                let _ = write!(stdout, "{e}");
            }
            return code;
        }
    };
    match run(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) | Error::Config(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => {
            EXIT_INPUT
        }
        Error::TaskFailed { source, .. } => exit_code(source),
        Error::Protocol(_) => EXIT_FAILURE,
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Generate(a) => cmd_generate(&a, stdout).map(|_| EXIT_OK),
        Command::Partition(a) => cmd_partition(&a, stdout, stderr),
        Command::Evaluate(a) => cmd_evaluate(&a, stdout).map(|_| EXIT_OK),
        Command::Replay(a) => cmd_replay(&a, stdout, stderr),
    }
}

fn output_writer<'a>(
    path: &Option<PathBuf>,
    stdout: &'a mut dyn Write,
) -> Result<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

pub fn cmd_generate(a: &GenerateArgs, stdout: &mut dyn Write) -> Result<()> {
    let kind = match a.kind {
        GenKindArg::Rmat => GenKind::Rmat,
        GenKindArg::Er => GenKind::Er,
        GenKindArg::Randhd => GenKind::Randhd,
    };
    let n = match (a.scale, a.num_vertices) {
        (Some(s), None) => 1usize
            .checked_shl(s)
            .filter(|_| s < usize::BITS)
            .ok_or_else(|| Error::config(format!("scale {s} too large")))?,
        (None, Some(n)) => n,
        (Some(_), Some(_)) => return Err(Error::config("give either --scale or -n, not both")),
        (None, None) => return Err(Error::config("one of --scale or -n is required")),
    };
    let probs = match &a.probs {
        Some(p) => [p[0], p[1], p[2], p[3]],
        None => RMAT_DEFAULT,
    };
    let spec = GenSpec { kind, n, d_avg: a.davg, probs, seed: a.seed };
    let edges = spec.generate()?;
    io::write_edge_list(output_writer(&a.output, stdout)?, n, &edges)
}

/// Graph plus the provenance needed for reports.
pub struct LoadedGraph {
    pub graph: GlobalGraph,
    pub name: String,
    pub original_ids: Option<Vec<u64>>,
}

pub fn load_graph(input: &InputArgs) -> Result<LoadedGraph> {
    let file = File::open(&input.input).map_err(|e| {
        Error::input(format!("cannot open {}: {e}", input.input.display()))
    })?;
    let parsed = io::read_edge_list(BufReader::new(file))?;
    let dense = io::densify(&parsed, input.num_vertices)?;
    let graph = build_csr_with(&dense.edges, dense.n, input.dedup)?;
    Ok(LoadedGraph {
        graph,
        name: graph_name(&input.input),
        original_ids: dense.original_ids,
    })
}

fn graph_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn default_tasks(n: usize) -> usize {
    std::thread::available_parallelism().map_or(1, |c| c.get()).min(n.max(1))
}

pub fn config_from_args(a: &PartitionArgs, n: usize) -> Result<Config> {
    let [outer, bal, refi] = <[usize; 3]>::try_from(a.iters.as_slice())
        .map_err(|_| Error::config("--iters takes outer,balance,refine"))?;
    let config = Config {
        num_parts: a.parts,
        num_tasks: a.tasks.unwrap_or_else(|| default_tasks(n)),
        vertex_ratio: a.vert_imb,
        edge_ratio: a.edge_imb,
        mult_end: a.x,
        mult_start: a.y,
        outer_iters: outer,
        balance_iters: bal,
        refine_iters: refi,
        seed: a.seed,
        distribution: match a.dist {
            DistArg::Block => DistributionKind::Block,
            DistArg::Random => DistributionKind::Random,
        },
        init: match a.init {
            InitArg::BfsLp => InitMode::BfsLp,
            InitArg::Random => InitMode::Random,
            InitArg::Block => InitMode::Block,
        },
        sequential: a.sequential,
    };
    config.validate()?;
    Ok(config)
}

/// Runs one partitioning method on a loaded graph.
pub fn run_method(
    g: &GlobalGraph,
    method: Method,
    config: &Config,
    trace: Option<Box<dyn Write + Send>>,
) -> Result<Vec<Part>> {
    let n = g.num_vertices();
    let p = config.num_parts;
    match method {
        Method::Random => baselines::random_partition(n, p, config.seed),
        Method::Vblock => baselines::vertex_block_partition(n, p),
        Method::Eblock => baselines::edge_block_partition(g, p),
        Method::Xtrapulp => {
            config.validate()?;
            let dist = Distribution::new(config.distribution, n, config.num_tasks, config.seed)?;
            let graphs = distribute(g, &dist)?;
            let mut runtime = Runtime::new(config.num_tasks)?.sequential(config.sequential);
            if let Some(sink) = trace {
                runtime = runtime.with_trace(sink);
            }
            let state = Engine::new(&graphs, config.clone())?.with_runtime(runtime)?.run()?;
            Ok(state.gather(&graphs))
        }
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Xtrapulp => "xtrapulp",
        Method::Random => "random",
        Method::Vblock => "vblock",
        Method::Eblock => "eblock",
    }
}

pub fn cmd_partition(
    a: &PartitionArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32> {
    let loaded = load_graph(&a.input)?;
    let config = config_from_args(a, loaded.graph.num_vertices())?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        input: InputSource::File {
            path: a.input.input.clone(),
            num_vertices: a.input.num_vertices,
            dedup: a.input.dedup,
        },
        method: a.method,
        config,
        partition_output: a.output.clone(),
        report_output: a.report.clone(),
        id_map_output: None,
    };
    let trace: Option<Box<dyn Write + Send>> = match &a.trace {
        Some(p) => Some(Box::new(BufWriter::new(File::create(p)?))),
        None => None,
    };
    execute_manifest(manifest, loaded, a.strict, trace, stdout, stderr)
}

fn execute_manifest(
    mut manifest: RunManifest,
    loaded: LoadedGraph,
    strict: bool,
    trace: Option<Box<dyn Write + Send>>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32> {
    let g = &loaded.graph;
    let config = &manifest.config;
    let parts = run_method(g, manifest.method, config, trace)?;
    let report = QualityReport::compute(g, &parts, config.num_parts)?.with_metadata(RunMetadata {
        graph: loaded.name.clone(),
        method: method_name(manifest.method).to_string(),
        num_tasks: Some(config.num_tasks),
        seed: Some(config.seed),
        config: (manifest.method == Method::Xtrapulp).then(|| config.clone()),
    });

    if let (Some(ids), Some(out)) = (&loaded.original_ids, &manifest.partition_output) {
        let mut map_path = out.clone().into_os_string();
        map_path.push(".ids");
        let map_path = PathBuf::from(map_path);
        io::write_id_map(BufWriter::new(File::create(&map_path)?), ids)?;
        manifest.id_map_output = Some(map_path);
    }
    io::write_partition(output_writer(&manifest.partition_output, stdout)?, &parts)?;
    writeln!(
        stderr,
        "{}: n={} m={} p={} method={} cut={} cut_ratio={:.4} vert_imb={:.4} edge_imb={:.4}",
        loaded.name,
        report.num_vertices,
        report.num_edges,
        report.num_parts,
        method_name(manifest.method),
        report.edge_cut,
        report.cut_ratio,
        report.vertex_imbalance,
        report.edge_imbalance
    )?;
    let violated = report.vertex_imbalance > 1.0 + config.vertex_ratio
        || report.edge_imbalance > 1.0 + config.edge_ratio;
    if let Some(path) = manifest.report_output.clone() {
        let out = PartitionReport { manifest, report };
        serde_json::to_writer_pretty(BufWriter::new(File::create(path)?), &out)?;
    }
    if strict && violated {
        writeln!(stderr, "balance constraint violated")?;
        return Ok(EXIT_STRICT);
    }
    Ok(EXIT_OK)
}

pub fn cmd_replay(a: &ReplayArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let prior: PartitionReport =
        serde_json::from_reader(BufReader::new(File::open(&a.report)?))?;
    let mut manifest = prior.manifest;
    let loaded = match &manifest.input {
        InputSource::File { path, num_vertices, dedup } => load_graph(&InputArgs {
            input: path.clone(),
            num_vertices: *num_vertices,
            dedup: *dedup,
        })?,
        InputSource::Generated(spec) => LoadedGraph {
            graph: build_csr_with(&spec.generate()?, spec.n, false)?,
            name: format!("{:?}", spec.kind).to_lowercase(),
            original_ids: None,
        },
    };
    manifest.partition_output = a.output.clone();
    manifest.report_output = a.new_report.clone();
    manifest.timestamp_unix =
        SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    execute_manifest(manifest, loaded, false, None, stdout, stderr)
}

pub fn cmd_evaluate(a: &EvaluateArgs, stdout: &mut dyn Write) -> Result<EvaluationReport> {
    let loaded = load_graph(&a.input)?;
    let g = &loaded.graph;
    let mut reports = Vec::new();
    for (i, spec) in a.partitions.iter().enumerate() {
        let (name, path) = match spec.split_once('=') {
            Some((n, p)) => (n.to_string(), PathBuf::from(p)),
            None => {
                let p = PathBuf::from(spec);
                let stem = p.file_stem().map_or(format!("p{i}"), |s| s.to_string_lossy().into_owned());
                (stem, p)
            }
        };
        let file = File::open(&path)
            .map_err(|e| Error::input(format!("cannot open {}: {e}", path.display())))?;
        let parts = io::read_partition(BufReader::new(file))?;
        if parts.len() != g.num_vertices() {
            return Err(Error::input(format!(
                "{}: {} labels for {} vertices",
                path.display(),
                parts.len(),
                g.num_vertices()
            )));
        }
        let p = a.parts.unwrap_or_else(|| metrics::infer_num_parts(&parts));
        let report = QualityReport::compute(g, &parts, p)?.with_metadata(RunMetadata {
            graph: loaded.name.clone(),
            method: name.clone(),
            ..Default::default()
        });
        reports.push(NamedReport { name, report });
    }
    let methods: Vec<String> = reports.iter().map(|r| r.name.clone()).collect();
    let table = |f: fn(&QualityReport) -> f64| ResultTable {
        methods: methods.clone(),
        graphs: vec![loaded.name.clone()],
        cells: vec![reports.iter().map(|r| Some(f(&r.report))).collect()],
    };
    let edge_cut_ratios = performance_ratio(&table(|r| r.edge_cut as f64))?;
    let max_cut_ratios = performance_ratio(&table(|r| r.max_part_cut as f64))?;
    let out = EvaluationReport { graph: loaded.name.clone(), reports, edge_cut_ratios, max_cut_ratios };

    if let Some(path) = &a.csv {
        let rows: Vec<_> = out
            .reports
            .iter()
            .map(|r| (out.graph.clone(), r.name.clone(), &r.report))
            .collect();
        metrics::write_reports_csv(BufWriter::new(File::create(path)?), &rows)?;
    }
    match &a.report {
        Some(path) => serde_json::to_writer_pretty(BufWriter::new(File::create(path)?), &out)?,
        None => {
            serde_json::to_writer_pretty(&mut *stdout, &out)?;
            writeln!(stdout)?;
        }
    }
    Ok(out)
}
