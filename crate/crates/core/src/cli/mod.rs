//! The `contour` command line. Every subcommand is a plain function over
//! parsed arguments so it can be driven from tests without a process.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 1 anything else.
//! Data and summaries go to stdout, diagnostics to stderr.

pub mod svg;
mod table;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use table::{fmt_sig6, ResultsTable, COLUMNS, TABLE_VERSION_LINE};

use crate::coreset::{build_coreset, Coreset, CoresetMethod, DEFAULT_REGIONS};
use crate::dataset::{generate_uneven_blobs, read_dataset_csv, write_atomic, BlobSpec, Ratio};
use crate::error::{Error, Result};
use crate::pipeline::{run_experiment, ExperimentConfig, RunResult};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CONTOUR_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "contour",
    version,
    about = "Contour coresets and variational 2-means clustering"
)]
pub struct Cli {
    /// Worker threads for repeats and optimizer batches (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an uneven two-blob dataset as CSV with a trailing label column.
    Generate(GenerateArgs),
    /// Build a coreset from a dataset CSV.
    Coreset(CoresetArgs),
    /// Run one experiment.
    Run(RunArgs),
    /// Run the Cartesian product of parameter axes.
    Sweep(SweepArgs),
    /// Render a results table or coreset CSV as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value = "1:2")]
    pub ratio: Ratio,
    #[arg(long, default_value_t = 750)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    #[arg(long, default_value_t = 1.0)]
    pub std: f64,
    #[arg(long, default_value_t = 6.0)]
    pub sep: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoresetArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "contour")]
    pub method: CoresetMethod,
    #[arg(long, default_value_t = 5)]
    pub m: usize,
    #[arg(long, default_value_t = DEFAULT_REGIONS)]
    pub regions: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also draw the data and the coreset as SVG.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Config JSON; omitted fields take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `key=value` on the JSON form, e.g. `solver=brute_force`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `key=v1,v2,…`; repeat for more axes.
    #[arg(long = "axis", value_name = "KEY=V1,V2", required = true)]
    pub axes: Vec<String>,
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum PlotKind {
    AccuracyBars,
    NoiseCurve,
    CoresetScatter,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Results table, or a coreset CSV for `coreset_scatter`.
    #[arg(long)]
    pub results: PathBuf,
    #[arg(long)]
    pub kind: PlotKind,
    #[arg(long)]
    pub out: PathBuf,
    /// Dataset drawn behind a coreset scatter.
    #[arg(long)]
    pub data: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = execute(cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

/// Runs a parsed command, writing its stdout text to `out`.
pub fn execute(cli: Cli, out: &mut dyn std::io::Write) -> Result<()> {
    if cli.jobs == Some(0) {
        return Err(Error::invalid("--jobs must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let mut buf: Vec<u8> = Vec::new();
    let result = pool.install(|| match cli.command {
        Command::Generate(a) => cmd_generate(&a, &mut buf),
        Command::Coreset(a) => cmd_coreset(&a, &mut buf),
        Command::Run(a) => cmd_run(&a, &mut buf),
        Command::Sweep(a) => cmd_sweep(&a, &mut buf),
        Command::Plot(a) => cmd_plot(&a, &mut buf),
    });
    say(out, &String::from_utf8_lossy(&buf))?;
    result
}

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("results"))
}

fn say(out: &mut dyn std::io::Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

pub fn cmd_generate(a: &GenerateArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let spec = BlobSpec {
        n_total: a.n,
        ratio: a.ratio,
        dims: a.dims,
        cluster_std: a.std,
        center_separation: a.sep,
        seed: a.seed,
    };
    let data = generate_uneven_blobs(&spec)?;
    let path = a.out.clone().unwrap_or_else(|| {
        default_out_dir().join(format!(
            "uneven_{}_{}_seed{}.csv",
            a.ratio.a, a.ratio.b, a.seed
        ))
    });
    data.write_csv(&path, true)?;
    let (minority, majority) = spec.cluster_sizes();
    say(
        out,
        &format!(
            "wrote {} rows ({minority} minority, {majority} majority, {} dims) to {}\n",
            data.len(),
            data.dims(),
            path.display()
        ),
    )
}

pub fn cmd_coreset(a: &CoresetArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let data = read_dataset_csv(&a.input)?;
    if a.m == 0 || a.m > data.len() {
        return Err(Error::invalid(format!(
            "--m {} must be between 1 and the {} rows of {}",
            a.m,
            data.len(),
            a.input.display()
        )));
    }
    let cs = build_coreset(&data, a.method, a.m, a.regions, a.seed)?;
    let path = a
        .out
        .clone()
        .unwrap_or_else(|| default_out_dir().join(format!("coreset_{}.csv", a.method)));
    cs.write(&path)?;
    if let Some(plot) = &a.plot {
        write_atomic(plot, svg::coreset_scatter(Some(&data), &cs)?.as_bytes())?;
    }
    say(
        out,
        &format!(
            "{} coreset: m={} total_weight={} construct_seconds={} -> {}\n",
            cs.method,
            cs.len(),
            fmt_sig6(cs.total_weight()),
            fmt_sig6(cs.construct_seconds),
            path.display()
        ),
    )
}

fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    for o in overrides {
        cfg = cfg.with_override(o)?;
    }
    Ok(cfg)
}

/// Stable 64-bit FNV-1a of the resolved config, as hex.
pub fn config_id(cfg: &ExperimentConfig) -> Result<String> {
    let json = serde_json::to_string(cfg)?;
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in json.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    Ok(format!("{h:016x}"))
}

fn write_result(dir: &Path, prefix: &str, id: &str, res: &RunResult) -> Result<()> {
    write_atomic(
        &dir.join(format!("{prefix}_{id}.json")),
        res.to_json()?.as_bytes(),
    )
}

pub fn cmd_run(a: &RunArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let cfg = load_config(a.config.as_deref(), &a.overrides)?;
    let id = config_id(&cfg)?;
    let res = run_experiment(&cfg)?;
    let dir = cfg.output_dir();
    write_result(&dir, "run", &id, &res)?;
    let row = res.summary_row(&id);
    ResultsTable::append_to(&dir.join("results.csv"), std::slice::from_ref(&row))?;
    for r in res.repeats.iter().filter(|r| !r.is_ok()) {
        eprintln!(
            "repeat {} failed: {}",
            r.repeat,
            r.failure.as_deref().unwrap_or("unknown")
        );
    }
    say(out, &ResultsTable { rows: vec![row] }.to_csv_string())
}

/// Splits `key=v1,v2,…`.
pub fn parse_axis(axis: &str) -> Result<(String, Vec<String>)> {
    let (key, values) = axis
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("axis {axis:?} is not key=v1,v2,…")))?;
    let values: Vec<String> = values
        .split(',')
        .map(|v| v.trim().to_owned())
        .filter(|v| !v.is_empty())
        .collect();
    if values.is_empty() {
        return Err(Error::Config(format!("axis {key:?} has no values")));
    }
    Ok((key.trim().to_owned(), values))
}

/// Configs for every cell of the product, first axis varying slowest.
pub fn sweep_cells(base: &ExperimentConfig, axes: &[String]) -> Result<Vec<ExperimentConfig>> {
    let mut cells = vec![base.clone()];
    for axis in axes {
        let (key, values) = parse_axis(axis)?;
        let mut next = Vec::with_capacity(cells.len() * values.len());
        for cell in &cells {
            for v in &values {
                next.push(cell.with_override(&format!("{key}={v}"))?);
            }
        }
        cells = next;
    }
    Ok(cells)
}

pub fn cmd_sweep(a: &SweepArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let base = load_config(a.config.as_deref(), &a.overrides)?;
    let cells = sweep_cells(&base, &a.axes)?;
    let dir = base.output_dir();
    let mut table = ResultsTable::default();
    for cfg in &cells {
        let id = config_id(cfg)?;
        let res = run_experiment(cfg)?;
        write_result(&dir, "sweep", &id, &res)?;
        table.rows.push(res.summary_row(id));
    }
    table.write(&dir.join("sweep.csv"))?;
    if base.output.figures {
        write_atomic(
            &dir.join("sweep_accuracy.svg"),
            svg::accuracy_bars(&table.rows)?.as_bytes(),
        )?;
    }
    say(out, &table.to_csv_string())
}

pub fn cmd_plot(a: &PlotArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let svg_text = match a.kind {
        PlotKind::AccuracyBars => svg::accuracy_bars(&ResultsTable::read(&a.results)?.rows)?,
        PlotKind::NoiseCurve => svg::noise_curve(&ResultsTable::read(&a.results)?.rows)?,
        PlotKind::CoresetScatter => {
            let cs = Coreset::read(&a.results)?;
            let data = a.data.as_deref().map(read_dataset_csv).transpose()?;
            svg::coreset_scatter(data.as_ref(), &cs)?
        }
    };
    write_atomic(&a.out, svg_text.as_bytes())?;
    say(out, &format!("wrote {}\n", a.out.display()))
}
