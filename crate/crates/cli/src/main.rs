//! `vsn-offload`: run offloading experiments, query the brute-force oracle
//! and manage profile dictionaries.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use offload_core::coordinator::{build_dictionary, ProfileDictionary};
use offload_core::harness::{
    load_trace, rows_from, run_experiment, summarize, synth_uniform, write_results, Coordination, Synthetic,
    TraceSet,
};
use offload_core::model::ConfigFile;
use offload_core::solver::brute_force_ctm;
use offload_core::{simulate_frame, Algorithm, AllocationProfile, ScenarioConfig};

#[derive(Parser)]
#[command(name = "vsn-offload", version, about = "Feature-extraction offloading simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a run and write per-frame completion times.
    Run(RunArgs),
    /// Exhaustive pixel-grid search for the system optimum of one frame.
    Oracle(OracleArgs),
    /// Build or inspect a profile dictionary.
    #[command(subcommand)]
    Dict(DictCommand),
}

#[derive(Subcommand)]
enum DictCommand {
    /// Optimize the first training frames and store their profiles.
    Build(DictBuildArgs),
    /// Print the entries of a dictionary file.
    Inspect {
        #[arg(long)]
        dictionary: PathBuf,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// TOML scenario file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Evaluation topology 1..=5; replaces any coefficients from the config.
    #[arg(long)]
    topology: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SourceArgs {
    /// Interest-point trace (`frame,sensor,x_norm`).
    #[arg(long, conflicts_with = "synthetic")]
    trace: Option<PathBuf>,
    /// Synthetic interest points: `uniform` or `exact-uniform`.
    #[arg(long)]
    synthetic: Option<Synthetic>,
    /// Interest points per frame and sensor for synthetic data.
    #[arg(long, default_value_t = 400)]
    points: usize,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    source: SourceArgs,
    /// mo-a, mo-s, tt-a or tt-s.
    #[arg(long)]
    algorithm: Option<Algorithm>,
    /// Coordinate with a refresh every R frames.
    #[arg(long, value_name = "R")]
    coordinate: Option<usize>,
    /// Dictionary entries compared per refresh.
    #[arg(long, value_name = "L")]
    candidates: Option<usize>,
    /// Training frames stored in the dictionary.
    #[arg(long, value_name = "M")]
    dictionary_size: Option<usize>,
    #[arg(long)]
    frames: Option<usize>,
    /// Per-frame results CSV.
    #[arg(long)]
    out: PathBuf,
    /// Per-slice timing CSV.
    #[arg(long)]
    timeline_out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    source: SourceArgs,
    /// 1-based frame of the trace to optimize.
    #[arg(long, default_value_t = 1)]
    frame: usize,
    /// Grid stride in pixels; defaults to a hundredth of the frame width.
    #[arg(long)]
    stride: Option<u32>,
}

#[derive(Args)]
struct DictBuildArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_name = "M")]
    dictionary_size: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

fn scenario(args: &ScenarioArgs) -> Result<ScenarioConfig> {
    let mut file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if let Some(t) = args.topology {
        file.topology = Some(t);
        file.transmission_coeffs = None;
        file.processing_coeffs = None;
        file.sensor_count = None;
        file.node_count = None;
    }
    if args.seed.is_some() {
        file.rng_seed = args.seed;
    }
    Ok(file.resolve()?)
}

fn source(args: &SourceArgs, cfg: &ScenarioConfig, frames: usize) -> Result<TraceSet> {
    let trace = match (&args.trace, args.synthetic) {
        (Some(path), _) => load_trace(path)?,
        (None, Some(kind)) => synth_uniform(kind, frames, cfg.sensor_count, args.points, cfg.rng_seed)?,
        (None, None) => bail!("either --trace or --synthetic is required"),
    };
    if trace.sensor_count() != cfg.sensor_count {
        bail!(
            "trace has {} sensors but the scenario has {}",
            trace.sensor_count(),
            cfg.sensor_count
        );
    }
    Ok(trace)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = scenario(&args.scenario)?;
    if let Some(a) = args.algorithm {
        cfg.algorithm = a;
    }
    if let Some(r) = args.coordinate {
        cfg.inter_refresh = Some(r);
    }
    if let Some(l) = args.candidates {
        cfg.candidates = l;
    }
    if let Some(m) = args.dictionary_size {
        cfg.dictionary_size = m;
    }
    if let Some(f) = args.frames {
        cfg.frame_count = f;
    }
    cfg.validate()?;
    let mut trace = source(&args.source, &cfg, cfg.frame_count)?;
    if trace.frame_count() > cfg.frame_count {
        trace = trace.truncated(cfg.frame_count)?;
    }
    let coordination = cfg.inter_refresh.map(|r| Coordination {
        inter_refresh: r,
        candidates: cfg.candidates,
        dictionary_size: cfg.dictionary_size,
    });
    info!(
        "{} over {} frames, {} sensors, {} nodes",
        cfg.algorithm,
        trace.frame_count(),
        cfg.sensor_count,
        cfg.node_count
    );
    let state = run_experiment(&cfg, &trace, coordination)?;
    let rows = rows_from(&state, &cfg);
    let mut out = create(&args.out)?;
    write_results(&rows, &mut out)?;
    out.flush()?;
    if let Some(path) = &args.timeline_out {
        let mut out = create(path)?;
        writeln!(out, "frame,sensor,slice,node,width,interest_points,begin,received,completed")?;
        for (record, dists) in state.history.iter().zip(trace.frames()) {
            let timeline = simulate_frame(&record.profile, &cfg, dists)?;
            for (s, slices) in timeline.slices.iter().enumerate() {
                for (v, t) in slices.iter().enumerate() {
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{}",
                        record.frame,
                        s + 1,
                        v + 1,
                        t.node + 1,
                        t.width,
                        t.interest_points,
                        t.begin,
                        t.received,
                        t.completed
                    )?;
                }
            }
        }
        out.flush()?;
    }
    let summary = summarize(&rows)?;
    println!(
        "mean T {:.6}  p95 {:.6}  min {:.6}  max {:.6}  converged at {}",
        summary.mean,
        summary.quantile(0.95),
        summary.min,
        summary.max,
        summary
            .converged_at
            .map_or_else(|| "-".to_string(), |k| format!("frame {k}"))
    );
    Ok(())
}

fn print_profile(profile: &AllocationProfile, width: u32) {
    for (s, a) in profile.allocations.iter().enumerate() {
        let nodes: Vec<String> = a.assignment.iter().map(|n| (n + 1).to_string()).collect();
        let cuts: Vec<String> = a.to_pixels(width).iter().map(u32::to_string).collect();
        println!("  sensor {}: nodes [{}] cuts [{}]", s + 1, nodes.join(" "), cuts.join(" "));
    }
}

fn oracle(args: OracleArgs) -> Result<()> {
    let cfg = scenario(&args.scenario)?;
    if args.frame == 0 {
        bail!("--frame is 1-based");
    }
    let trace = source(&args.source, &cfg, args.frame)?;
    let dists = trace
        .frames()
        .get(args.frame - 1)
        .with_context(|| format!("trace has only {} frames", trace.frame_count()))?;
    let stride = args.stride.unwrap_or((cfg.frame_width / 100).max(1));
    let (profile, t) = brute_force_ctm(&cfg, dists, stride)?;
    println!("optimum T {t:.6} at stride {stride}");
    print_profile(&profile, cfg.frame_width);
    Ok(())
}

fn dict_build(args: DictBuildArgs) -> Result<()> {
    let mut cfg = scenario(&args.scenario)?;
    if let Some(m) = args.dictionary_size {
        cfg.dictionary_size = m;
    }
    let m = cfg.dictionary_size.max(1);
    let trace = source(&args.source, &cfg, m)?;
    let training = &trace.frames()[..m.min(trace.frame_count())];
    let dict = build_dictionary(training, &cfg, m)?;
    dict.save(&args.out, cfg.frame_width)?;
    println!("{} entries written to {}", dict.len(), args.out.display());
    Ok(())
}

fn dict_inspect(path: &Path) -> Result<()> {
    let (dict, width) = ProfileDictionary::load(path)?;
    println!("{} entries, frame width {width}", dict.len());
    for (i, e) in dict.entries.iter().enumerate() {
        println!("entry {}: T {:.6}", i + 1, e.completion);
        print_profile(&e.profile, width);
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Oracle(a) => oracle(a),
        Command::Dict(DictCommand::Build(a)) => dict_build(a),
        Command::Dict(DictCommand::Inspect { dictionary }) => dict_inspect(&dictionary),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
