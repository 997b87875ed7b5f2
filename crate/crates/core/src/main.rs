use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use vinfo::cli::{analyze, RunConfig};
use vinfo::formation::{count_spaces, heuristic_vs_exact, DEFAULT_EXACT_LIMIT};
use vinfo::ingest::{assemble_stream, parse_events, parse_positions, MatchEvent, SampleStream, StreamConfig};
use vinfo::synth::{generate_positions, stream_from_frames, write_positions_csv, SyntheticSpec};
use vinfo::Profile;

/// Variation of Information dynamics for clustered networks.
#[derive(Parser)]
#[command(name = "vinfo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full analysis and write a report bundle.
    Analyze(AnalyzeArgs),
    /// Cluster a positions CSV into a stream JSON.
    Cluster(ClusterArgs),
    /// Generate a synthetic match.
    Generate(GenerateArgs),
    /// Compare the formation heuristic against exhaustive search.
    Oracle(OracleArgs),
    /// Count clustering and formation spaces.
    Counts(CountsArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Positions CSV (`t,node,team,role,x,y`).
    #[arg(long, conflicts_with = "stream", required_unless_present = "stream")]
    positions: Option<PathBuf>,
    /// Pre-clustered stream JSON.
    #[arg(long)]
    stream: Option<PathBuf>,
    /// Events JSON; replaces any events embedded in the stream.
    #[arg(long)]
    events: Option<PathBuf>,
    /// Sample rate in Hz, used to bucket positions.
    #[arg(long, default_value_t = 10.0)]
    rate: f64,
    #[arg(long, default_value = "soccer")]
    profile: Profile,
    /// Re-insert nodes that vanish without a roster event.
    #[arg(long)]
    carry_forward: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Moving-average window in seconds.
    #[arg(long, default_value_t = 4.0)]
    window: f64,
    /// Maximum pivot gap in seconds, used when --peaks is 0.
    #[arg(long, default_value_t = 80.0)]
    pivot_max: f64,
    /// Number of envelope peaks to aim for; 0 disables the search.
    #[arg(long, default_value_t = 24)]
    peaks: usize,
    /// Half-width around tagged minutes in seconds.
    #[arg(long, default_value_t = 30.0)]
    event_window: f64,
    /// Extra half-width of peak neighbourhoods for the coverage baseline.
    #[arg(long, default_value_t = 0.0)]
    baseline_pad: f64,
    #[arg(long, default_value_t = 10)]
    top_n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output stream JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    /// Match length in seconds.
    #[arg(long, default_value_t = 5400.0)]
    duration: f64,
    #[arg(long, default_value_t = 10.0)]
    rate: f64,
    #[arg(long, default_value_t = 24)]
    roster: u32,
    /// Minutes with a corner-style burst, comma separated.
    #[arg(long, value_delimiter = ',')]
    corners: Vec<u32>,
    #[arg(long)]
    intensity: Option<f64>,
    /// Baseline positional noise in m/√s.
    #[arg(long)]
    baseline: Option<f64>,
    /// Fraction of baseline activity lost by the end of the match.
    #[arg(long, default_value_t = 0.0)]
    decay: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the raw positions CSV.
    #[arg(long)]
    with_positions: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 8)]
    n_max: u32,
    #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
    exact_limit: u32,
    /// Output JSON; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CountsArgs {
    #[arg(long, default_value_t = 24)]
    n: u32,
    /// Smallest allowed part for the restricted partition count.
    #[arg(long, default_value_t = 1)]
    min_part: u32,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

fn load(input: &InputArgs) -> Result<SampleStream> {
    let config = StreamConfig { profile: input.profile, carry_forward: input.carry_forward, ..StreamConfig::default() };
    let events: Option<Vec<MatchEvent>> = match &input.events {
        Some(p) => Some(parse_events(open(p)?).with_context(|| format!("reading {}", p.display()))?),
        None => None,
    };
    if let Some(path) = &input.positions {
        let table = parse_positions(open(path)?, input.rate).with_context(|| format!("reading {}", path.display()))?;
        if !table.gaps.is_empty() {
            log::warn!("{} gap(s) in the position stream", table.gaps.len());
        }
        return Ok(assemble_stream(&table, &events.unwrap_or_default(), &config)?);
    }
    let Some(path) = &input.stream else { bail!("either --positions or --stream is required") };
    let mut raw: vinfo::ingest::StreamJson =
        serde_json::from_reader(open(path)?).with_context(|| format!("reading {}", path.display()))?;
    if let Some(events) = events {
        raw.events = events;
    }
    Ok(SampleStream::from_json(raw, &config)?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze(a) => {
            let stream = load(&a.input)?;
            let config = RunConfig {
                sample_rate: a.input.rate,
                ma_window: a.window,
                max_pivot_gap: a.pivot_max,
                peak_target: (a.peaks > 0).then_some(a.peaks),
                event_window: a.event_window,
                baseline_pad: a.baseline_pad,
                profile: a.input.profile,
                seed: a.seed,
                top_n: a.top_n,
                ..RunConfig::default()
            };
            log::info!("analyzing {} samples (seed {})", stream.len(), config.seed);
            let bundle = analyze(&stream, &config)?;
            bundle.write(&a.out)?;
            log::info!("bundle written to {}", a.out.display());
        }
        Command::Cluster(c) => {
            let stream = load(&c.input)?;
            let mut w = create(&c.out)?;
            stream.write_json(&mut w)?;
            w.flush()?;
        }
        Command::Generate(g) => {
            let defaults = SyntheticSpec::default();
            let spec = SyntheticSpec {
                duration: g.duration,
                rate_hz: g.rate,
                roster: g.roster,
                burst_intensity: g.intensity.unwrap_or(defaults.burst_intensity),
                baseline_change_rate: g.baseline.unwrap_or(defaults.baseline_change_rate),
                decay_slope: g.decay,
                seed: g.seed,
                ..defaults
            }
            .with_corner_minutes(&g.corners);
            log::info!("generating with seed {}", spec.seed);
            let frames = generate_positions(&spec)?;
            let stream = stream_from_frames(&spec, &frames)?;
            fs::create_dir_all(&g.out).with_context(|| format!("creating {}", g.out.display()))?;
            let mut w = create(&g.out.join("stream.json"))?;
            stream.write_json(&mut w)?;
            w.flush()?;
            let mut w = create(&g.out.join("events.json"))?;
            serde_json::to_writer_pretty(&mut w, &stream.events)?;
            w.flush()?;
            let mut w = create(&g.out.join("spec.json"))?;
            serde_json::to_writer_pretty(&mut w, &spec)?;
            w.flush()?;
            if g.with_positions {
                write_positions_csv(&spec, &frames, create(&g.out.join("positions.csv"))?)?;
            }
        }
        Command::Oracle(o) => {
            let report = heuristic_vs_exact(o.n_max, o.exact_limit)?;
            eprintln!(
                "n <= {}: {} pairs, max gap {:.6}, mean gap {:.6}, mean relative gap {:.6}",
                report.n_max, report.pairs, report.max_gap, report.mean_gap, report.mean_relative_gap
            );
            match o.out {
                Some(path) => {
                    let mut w = create(&path)?;
                    serde_json::to_writer_pretty(&mut w, &report)?;
                    w.flush()?;
                }
                None => {
                    serde_json::to_writer_pretty(io::stdout().lock(), &report)?;
                    println!();
                }
            }
        }
        Command::Counts(c) => {
            let counts = count_spaces(c.n, c.min_part)?;
            serde_json::to_writer_pretty(io::stdout().lock(), &counts)?;
            println!();
        }
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("VINFO_LOG", "warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
