use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use cyclesim::bounds::{
    cqf_delay_bounds, cqf_nonconforming_max, saturation_pi, Basis, BoundInput,
};
use cyclesim::{emit_csv, parse_config, run_sweep, ScenarioConfig, SimTime};

/// Simulate CQF, Paternoster and three-queue CQF on a TSN switch ring.
#[derive(Parser, Debug)]
#[command(name = "cyclesim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every point of a scenario sweep and write one CSV row per class.
    Run {
        /// JSON scenario file; missing keys take their defaults.
        #[arg(long)]
        config: PathBuf,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (all cores when omitted).
        #[arg(long)]
        parallel: Option<usize>,
    },
    /// Print CQF delay bounds and the ST saturation point.
    Bounds {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        hops: u32,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        cycle_ns: u64,
        #[arg(long, default_value_t = 0)]
        prop_ns: u64,
        /// ST window length (half the cycle when omitted).
        #[arg(long)]
        st_window_ns: Option<u64>,
        #[arg(long, default_value_t = 3)]
        streams_per_link: u64,
        #[arg(long, default_value_t = 64)]
        frame_bytes: u32,
        #[arg(long, default_value_t = 1_000_000_000)]
        rate_bps: u64,
    },
    /// Print the default scenario as JSON.
    Defaults,
}

fn run(config: PathBuf, out: Option<PathBuf>, seed: Option<u64>, parallel: Option<usize>) -> Result<()> {
    let text = fs::read_to_string(&config)
        .with_context(|| format!("cannot read config {}", config.display()))?;
    let mut cfg = parse_config(&text).with_context(|| format!("in {}", config.display()))?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let runs = cfg.points().len();
    log::info!("running {runs} simulations");
    let rows = run_sweep(&cfg, parallel)?;
    emit_csv(&rows, out.as_deref())?;
    if let Some(out) = out {
        log::info!("wrote {} rows to {}", rows.len(), out.display());
    }
    Ok(())
}

fn bounds(b: BoundInput) -> Result<()> {
    anyhow::ensure!(
        b.st_window.0 > 0 && b.st_window <= b.cycle_time,
        "ST window must be positive and no longer than the cycle"
    );
    anyhow::ensure!(b.streams_per_link >= 1, "need at least one stream per link");
    let std = cqf_delay_bounds(&b);
    let max = cqf_nonconforming_max(&b);
    println!("hops              {}", b.hops);
    println!("cycle_time_ns     {}", b.cycle_time.as_ns());
    println!("st_window_ns      {}", b.st_window.as_ns());
    println!("prop_delay_ns     {}", b.prop_delay.as_ns());
    println!("d_min_ns          {}", std.d_min.as_ns());
    println!("d_max_ns          {}", std.d_max.as_ns());
    println!("conforming        {}", if std.conforming { "yes" } else { "no" });
    let basis = match max.basis {
        Basis::Standard => "standard",
        Basis::Observed => "observed doubling",
    };
    println!("worst_case_ns     {} ({basis})", max.value.as_ns());
    println!("saturation_pi     {}", saturation_pi(&b));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            parallel,
        } => run(config, out, seed, parallel),
        Command::Bounds {
            hops,
            cycle_ns,
            prop_ns,
            st_window_ns,
            streams_per_link,
            frame_bytes,
            rate_bps,
        } => bounds(BoundInput {
            hops,
            cycle_time: SimTime(cycle_ns),
            st_window: SimTime(st_window_ns.unwrap_or(cycle_ns / 2)),
            link_rate_bps: rate_bps,
            streams_per_link,
            frame_bits: frame_bytes as u64 * 8,
            prop_delay: SimTime(prop_ns),
        }),
        Command::Defaults => {
            println!("{}", ScenarioConfig::default().to_json());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
