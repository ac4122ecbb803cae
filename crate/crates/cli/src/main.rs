//! `edgelake` command-line interface.
//!
//! Subcommands mirror the three applications plus run-directory
//! inspection: `vsn {run,gen}`, `handover {run,gen}`,
//! `driverid {run,features}`, `lake {inspect,lineage}` and `bus trace`.
//! Exit codes: 0 success, 2 usage error, 1 runtime error.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use edgelake::driverid::{self, OrdinalConfig};
use edgelake::handover::{route_from_csv, route_to_csv, sites_from_csv, sites_to_csv};
use edgelake::lakecore::{parse_catalog_csv, render_lineage_text, ObjectId};
use edgelake::pipeline::{
    run_driverid, run_handover, run_vsn, ClassifierChoice, DriverIdRunConfig, HandoverModel,
    HandoverRunConfig, LakeConfig, RunArtifacts, VsnAlgo, VsnRunConfig,
};
use edgelake::scenario::{
    corridor_scenario, gen_handover_scenario, gen_vsn_trace, HandoverGenParams, VsnGenParams,
};
use edgelake::vsn::MobilityTrace;

#[derive(Parser)]
#[command(
    name = "edgelake",
    version,
    about = "Deterministic edge data-lake simulation for transportation workloads"
)]
struct Cli {
    /// Flat key=value file with defaults for the invoked subcommand;
    /// explicit flags override file values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Vehicular sensor network offloading.
    #[command(subcommand)]
    Vsn(VsnCommand),
    /// Base-station allocation and handover planning.
    #[command(subcommand)]
    Handover(HandoverCommand),
    /// Driver identification from ordinal features.
    #[command(subcommand)]
    Driverid(DriverIdCommand),
    /// Inspect the catalog of a finished run.
    #[command(subcommand)]
    Lake(LakeCommand),
    /// Inspect the bus log of a finished run.
    #[command(subcommand)]
    Bus(BusCommand),
}

#[derive(Subcommand)]
enum VsnCommand {
    /// Run aggregation-point selection over a mobility trace.
    Run(VsnRunArgs),
    /// Generate a synthetic random-waypoint trace.
    Gen(VsnGenArgs),
}

#[derive(Args)]
struct VsnRunArgs {
    /// Mobility trace CSV (`t,vehicle_id,x,y,volume`).
    #[arg(long)]
    trace: PathBuf,
    /// D2D communication radius, meters.
    #[arg(long, default_value_t = 100.0, value_parser = positive_f64, allow_negative_numbers = true)]
    radius: f64,
    /// Coverage hops for aggregation points.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    hops: u32,
    #[arg(long, value_enum, default_value_t = AlgoArg::Centrality)]
    algo: AlgoArg,
    /// Reservation probability for the RB baseline.
    #[arg(long, default_value_t = 0.3, value_parser = probability, allow_negative_numbers = true)]
    prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for metrics.csv, report.txt, catalog.csv, bus.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Centrality,
    Rb,
}

#[derive(Args)]
struct VsnGenArgs {
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(usize))]
    vehicles: usize,
    /// Area as WxH in meters, e.g. 1000x1000.
    #[arg(long, default_value = "1000x1000", value_parser = parse_area)]
    area: (f64, f64),
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Seconds between snapshots.
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64, allow_negative_numbers = true)]
    period: f64,
    /// Bytes generated per vehicle per period.
    #[arg(long, default_value_t = 1024)]
    volume: u64,
    #[arg(long, default_value_t = 5.0, value_parser = positive_f64, allow_negative_numbers = true)]
    speed_min: f64,
    #[arg(long, default_value_t = 15.0, value_parser = positive_f64, allow_negative_numbers = true)]
    speed_max: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trace file to write; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum HandoverCommand {
    /// Allocate a route to sites under one model.
    Run(HandoverRunArgs),
    /// Generate a site grid plus a noisy straight route (or the fixed
    /// corridor fixture).
    Gen(HandoverGenArgs),
}

#[derive(Args)]
struct HandoverRunArgs {
    /// Route CSV (`index,t,x,y`).
    #[arg(long)]
    route: PathBuf,
    /// Sites CSV (`id,x,y,range`).
    #[arg(long)]
    sites: PathBuf,
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Hysteresis margin, meters.
    #[arg(long, default_value_t = 0.0, value_parser = non_negative_f64, allow_negative_numbers = true)]
    margin: f64,
    /// Label for plan storage/recall; defaults to the route file stem.
    #[arg(long)]
    route_label: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Nearest,
    Hysteresis,
    Minimal,
}

#[derive(Args)]
struct HandoverGenArgs {
    #[arg(long, value_enum, default_value_t = PresetArg::Grid)]
    preset: PresetArg,
    /// Sites per grid side.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(usize))]
    grid: usize,
    #[arg(long, default_value_t = 400.0, value_parser = positive_f64, allow_negative_numbers = true)]
    spacing: f64,
    #[arg(long, default_value_t = 400.0, value_parser = positive_f64, allow_negative_numbers = true)]
    range: f64,
    #[arg(long, default_value_t = 100)]
    readings: usize,
    /// Gaussian y-jitter of the route, meters.
    #[arg(long, default_value_t = 15.0, value_parser = non_negative_f64, allow_negative_numbers = true)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "route.csv")]
    out_route: PathBuf,
    #[arg(long, default_value = "sites.csv")]
    out_sites: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    /// Random grid scenario driven by the generator flags.
    Grid,
    /// Fixed eight-site corridor with overlapping coverage.
    Corridor,
}

#[derive(Subcommand)]
enum DriverIdCommand {
    /// Train and evaluate a classifier on the synthetic dataset.
    Run(DriverIdRunArgs),
    /// Extract entropy-complexity features from a dataset CSV.
    Features(FeaturesArgs),
}

#[derive(Args)]
struct DriverIdRunArgs {
    /// Dataset size preset: small = 300 windows/driver, large = 9700.
    #[arg(long, value_enum, default_value_t = SizePreset::Small)]
    preset: SizePreset,
    /// Override the preset's windows per driver.
    #[arg(long)]
    windows: Option<usize>,
    #[arg(long, value_enum, default_value_t = ClassifierArg::Knn)]
    classifier: ClassifierArg,
    /// Neighbor count for kNN (odd).
    #[arg(long, default_value_t = 1, value_parser = odd_usize)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Training fraction of the stratified split.
    #[arg(long, default_value_t = 0.75, value_parser = probability, allow_negative_numbers = true)]
    split: f64,
    /// Also write the raw dataset CSV into the run directory.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    emit_dataset: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SizePreset {
    Small,
    Large,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassifierArg {
    Knn,
    Gnb,
}

#[derive(Args)]
struct FeaturesArgs {
    /// Dataset CSV (`driver,window_id,sample_idx,ch1..ch9`).
    #[arg(long = "in")]
    input: PathBuf,
    /// Embedding dimension.
    #[arg(long = "D", alias = "dim", default_value_t = 3)]
    dim: usize,
    /// Embedding delay.
    #[arg(long, default_value_t = 1)]
    tau: usize,
    /// Features CSV to write; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum LakeCommand {
    /// Print the catalog CSV of a run directory.
    Inspect(RunDirArgs),
    /// Print the ancestry of one object as indented text.
    Lineage(LineageArgs),
}

#[derive(Args)]
struct RunDirArgs {
    /// Run directory written by a `run` subcommand.
    #[arg(long)]
    run: PathBuf,
}

#[derive(Args)]
struct LineageArgs {
    /// Object id to trace.
    id: u64,
    #[arg(long)]
    run: PathBuf,
}

#[derive(Subcommand)]
enum BusCommand {
    /// Print the bus log CSV of a run directory.
    Trace(RunDirArgs),
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` must be positive"))
    }
}

fn non_negative_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` must be non-negative"))
    }
}

fn probability(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("`{s}` must be in (0, 1]"))
    }
}

fn odd_usize(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("`{s}` is not an integer"))?;
    if v >= 1 && v % 2 == 1 {
        Ok(v)
    } else {
        Err(format!("`{s}` must be odd and at least 1"))
    }
}

fn parse_area(s: &str) -> Result<(f64, f64), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("`{s}` is not WxH"))?;
    Ok((positive_f64(w)?, positive_f64(h)?))
}

fn main() {
    let argv = match config::merged_argv(std::env::args().collect()) {
        Ok(argv) => argv,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    };
    let cli = Cli::parse_from(argv);
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Vsn(VsnCommand::Run(args)) => vsn_run(args),
        Command::Vsn(VsnCommand::Gen(args)) => vsn_gen(args),
        Command::Handover(HandoverCommand::Run(args)) => handover_run(args),
        Command::Handover(HandoverCommand::Gen(args)) => handover_gen(args),
        Command::Driverid(DriverIdCommand::Run(args)) => driverid_run(args),
        Command::Driverid(DriverIdCommand::Features(args)) => driverid_features(args),
        Command::Lake(LakeCommand::Inspect(args)) => print_run_file(&args.run, "catalog.csv"),
        Command::Lake(LakeCommand::Lineage(args)) => lake_lineage(args),
        Command::Bus(BusCommand::Trace(args)) => print_run_file(&args.run, "bus.csv"),
    }
}

fn write_artifacts(out: &Path, artifacts: &RunArtifacts, wall: std::time::Duration) -> Result<()> {
    fs::create_dir_all(out)
        .with_context(|| format!("creating output directory {}", out.display()))?;
    fs::write(out.join("metrics.csv"), &artifacts.metrics_csv)?;
    let mut report = artifacts.report.clone();
    report.push_str(&format!("wall_clock_ms={}\n", wall.as_millis()));
    fs::write(out.join("report.txt"), report)?;
    fs::write(out.join("catalog.csv"), &artifacts.catalog_csv)?;
    fs::write(out.join("bus.csv"), &artifacts.bus_csv)?;
    for (name, content) in &artifacts.extra_files {
        fs::write(out.join(name), content)?;
    }
    Ok(())
}

fn finish_run(out: &Path, artifacts: RunArtifacts, started: Instant) -> Result<()> {
    write_artifacts(out, &artifacts, started.elapsed())?;
    // echo the metric section so a run is readable without opening files
    let mut echo = String::new();
    let mut in_metrics = false;
    for line in artifacts.report.lines() {
        match line {
            "== metrics ==" => in_metrics = true,
            l if l.starts_with("== ") => in_metrics = false,
            l if in_metrics => {
                echo.push_str(l);
                echo.push('\n');
            }
            _ => {}
        }
    }
    echo.push_str(&format!("artifacts written to {}\n", out.display()));
    write_stdout(&echo)
}

/// Writes to stdout, treating a closed pipe (e.g. `| head`) as a normal
/// early exit rather than a panic.
fn write_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        other => other.map_err(Into::into),
    }
}

fn vsn_run(args: VsnRunArgs) -> Result<()> {
    let started = Instant::now();
    let text = fs::read_to_string(&args.trace)
        .with_context(|| format!("reading trace {}", args.trace.display()))?;
    let trace = MobilityTrace::from_csv(&text)?;
    let cfg = VsnRunConfig {
        radius: args.radius,
        hops: args.hops,
        algo: match args.algo {
            AlgoArg::Centrality => VsnAlgo::Centrality,
            AlgoArg::Rb => VsnAlgo::Rb,
        },
        rb_probability: args.prob,
        seed: args.seed,
        trace_source: args.trace.display().to_string(),
        lake: LakeConfig::default(),
    };
    let artifacts = run_vsn(&trace, &cfg)?;
    finish_run(&args.out, artifacts, started)
}

fn vsn_gen(args: VsnGenArgs) -> Result<()> {
    let params = VsnGenParams {
        vehicles: args.vehicles,
        width: args.area.0,
        height: args.area.1,
        steps: args.steps,
        period: args.period,
        volume: args.volume,
        speed_min: args.speed_min,
        speed_max: args.speed_max,
        seed: args.seed,
    };
    let trace = gen_vsn_trace(&params)?;
    emit(args.out.as_deref(), &trace.to_csv())
}

fn handover_run(args: HandoverRunArgs) -> Result<()> {
    let started = Instant::now();
    let route_text = fs::read_to_string(&args.route)
        .with_context(|| format!("reading route {}", args.route.display()))?;
    let sites_text = fs::read_to_string(&args.sites)
        .with_context(|| format!("reading sites {}", args.sites.display()))?;
    let route = route_from_csv(&route_text)?;
    let sites = sites_from_csv(&sites_text)?;
    let route_label = args.route_label.clone().unwrap_or_else(|| {
        args.route
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "route".to_owned())
    });
    let cfg = HandoverRunConfig {
        model: match args.model {
            ModelArg::Nearest => HandoverModel::Nearest,
            ModelArg::Hysteresis => HandoverModel::Hysteresis,
            ModelArg::Minimal => HandoverModel::Minimal,
        },
        margin: args.margin,
        route_label,
        seed: args.seed,
        route_source: args.route.display().to_string(),
        sites_source: args.sites.display().to_string(),
        lake: LakeConfig::default(),
    };
    let artifacts = run_handover(&route, &sites, &cfg)?;
    finish_run(&args.out, artifacts, started)
}

fn handover_gen(args: HandoverGenArgs) -> Result<()> {
    let (sites, route) = match args.preset {
        PresetArg::Corridor => corridor_scenario(),
        PresetArg::Grid => gen_handover_scenario(&HandoverGenParams {
            grid: args.grid,
            spacing: args.spacing,
            range: args.range,
            readings: args.readings,
            noise_sd: args.noise,
            seed: args.seed,
        })?,
    };
    fs::write(&args.out_sites, sites_to_csv(&sites))
        .with_context(|| format!("writing {}", args.out_sites.display()))?;
    fs::write(&args.out_route, route_to_csv(&route))
        .with_context(|| format!("writing {}", args.out_route.display()))?;
    println!(
        "wrote {} sites to {} and {} readings to {}",
        sites.len(),
        args.out_sites.display(),
        route.len(),
        args.out_route.display()
    );
    Ok(())
}

fn driverid_run(args: DriverIdRunArgs) -> Result<()> {
    let started = Instant::now();
    let windows_per_driver = args.windows.unwrap_or(match args.preset {
        SizePreset::Small => driverid::SMALL_WINDOWS_PER_DRIVER,
        SizePreset::Large => driverid::LARGE_WINDOWS_PER_DRIVER,
    });
    let cfg = DriverIdRunConfig {
        windows_per_driver,
        classifier: match args.classifier {
            ClassifierArg::Knn => ClassifierChoice::Knn,
            ClassifierArg::Gnb => ClassifierChoice::Gnb,
        },
        k: args.k,
        seed: args.seed,
        train_fraction: args.split,
        emit_dataset: args.emit_dataset,
        lake: LakeConfig::default(),
    };
    let artifacts = run_driverid(&cfg)?;
    finish_run(&args.out, artifacts, started)
}

fn driverid_features(args: FeaturesArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading dataset {}", args.input.display()))?;
    let windows = driverid::dataset_from_csv(&text)?;
    let config = OrdinalConfig::new(args.dim, args.tau)?;
    let features = driverid::extract_features(&windows, &config)?;
    emit(args.out.as_deref(), &driverid::features_to_csv(&features))
}

fn lake_lineage(args: LineageArgs) -> Result<()> {
    let path = args.run.join("catalog.csv");
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let records = parse_catalog_csv(&text)?;
    let rendered = render_lineage_text(&records, ObjectId(args.id))?;
    write_stdout(&rendered)
}

fn print_run_file(run: &Path, name: &str) -> Result<()> {
    let path = run.join(name);
    if !path.is_file() {
        bail!(
            "{} not found; is {} a run directory?",
            path.display(),
            run.display()
        );
    }
    let text = fs::read_to_string(&path)?;
    write_stdout(&text)
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
        }
        None => write_stdout(content)?,
    }
    Ok(())
}
