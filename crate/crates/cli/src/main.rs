//! `floater` — run, sweep and serve the mobile excitable lattice.
//!
//! ```text
//! floater run   --preset fig5 --seed 42 --out runs/a
//! floater sweep --preset fig6a --seeds 10 --out runs/sweep
//! floater serve --port 8080 --preset fig5
//! ```
//!
//! Exit status: 0 on success, 1 on I/O failure, 2 on bad arguments.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use floater_core::metrics::DEFAULT_TRANSIENT_FRACTION;
use floater_core::steering::{serve, ServeOptions};
use floater_core::{
    compute_metrics, parse_rule, render_snapshot, run_with, write_trajectory_csv, Preset, RuleParams, SimConfig,
    Simulation, SweepSummary, TrajectoryMetrics, Vec2, WorldRect,
};

/// Width in pixels of rendered snapshots.
const SNAPSHOT_PIXELS: f64 = 600.0;

#[derive(Parser)]
#[command(name = "floater", version, about = "Mobile excitable lattice that swims toward light")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its trajectory, snapshots and metrics.
    Run(RunArgs),
    /// Run consecutive seeds and summarise their metrics.
    Sweep(SweepArgs),
    /// Serve a live simulation to steering clients over TCP.
    Serve(ServeArgs),
}

#[derive(Args)]
struct SimArgs {
    /// Named preset: fig5, fig6a .. fig6f.
    #[arg(long, required_unless_present = "rule", conflicts_with = "rule")]
    preset: Option<Preset>,
    /// Rule code θ1θ2δ1δ2, e.g. 2201.
    #[arg(long, value_parser = parse_rule_arg)]
    rule: Option<RuleParams>,
    /// Lattice side in cells (square lattice; default 200).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    size: Option<u64>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    record_every: Option<u64>,
    /// Snapshot interval in steps; 0 disables snapshots.
    #[arg(long)]
    render_every: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    light_x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    light_y: Option<f64>,
    /// Translational gain.
    #[arg(long)]
    kt: Option<f64>,
    /// Rotational gain.
    #[arg(long)]
    kr: Option<f64>,
    /// Per-cell excitation probability on the dark-facing edge.
    #[arg(long)]
    p_excite: Option<f64>,
    /// `key = value` config file; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    sim: SimArgs,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Number of seeds, starting at --seed.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    seeds: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    sim: SimArgs,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    bind: String,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..=1000))]
    steps_per_second: u32,
}

fn parse_rule_arg(s: &str) -> Result<RuleParams, String> {
    parse_rule(s).map_err(|e| e.to_string())
}

/// Failures, split by exit status.
enum Failure {
    Usage(String),
    Io(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

type CmdResult = Result<(), Failure>;

impl SimArgs {
    fn rule(&self) -> RuleParams {
        match (self.preset, self.rule) {
            (Some(p), _) => p.rule(),
            (None, Some(r)) => r,
            // clap enforces exactly one of the two.
            (None, None) => unreachable!("no preset or rule"),
        }
    }

    /// Preset/rule defaults, then the config file, then explicit flags.
    fn config(&self) -> Result<SimConfig, Failure> {
        let size = self.size.unwrap_or(200) as usize;
        let mut cfg = SimConfig::square(size, self.rule());
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))
                .map_err(Failure::Io)?;
            cfg.apply_text(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        }
        if let Some(r) = self.rule {
            cfg.rule = r;
        }
        if let Some(p) = self.preset {
            cfg.rule = p.rule();
        }
        if self.size.is_some() {
            cfg.width = size;
            cfg.height = size;
        }
        if let Some(v) = self.steps {
            cfg.steps = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.record_every {
            cfg.record_every = v;
        }
        if let Some(v) = self.render_every {
            cfg.render_every = v;
        }
        if let Some(v) = self.light_x {
            cfg.light_x = v;
        }
        if let Some(v) = self.light_y {
            cfg.light_y = v;
        }
        if let Some(v) = self.kt {
            cfg.k_translate = v;
        }
        if let Some(v) = self.kr {
            cfg.k_rotate = v;
        }
        if let Some(v) = self.p_excite {
            cfg.p_excite = v;
        }
        cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

/// A window around the light wide enough to hold the starting lattice.
fn snapshot_window(cfg: &SimConfig) -> (WorldRect, f64) {
    let light = Vec2::new(cfg.light_x, cfg.light_y);
    let half = cfg.initial_distance() + 0.75 * cfg.width.max(cfg.height) as f64;
    (WorldRect::centered(light, half, half), SNAPSHOT_PIXELS / (2.0 * half))
}

fn run_one(cfg: &SimConfig, out: &Path) -> anyhow::Result<TrajectoryMetrics> {
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let (window, ppu) = snapshot_window(cfg);
    let mut trail = Vec::new();
    let mut render_error = None;
    let records = run_with(cfg, |sim: &Simulation| {
        trail.push(sim.pose().position);
        let step = sim.step_count();
        if cfg.render_every > 0 && step > 0 && step.is_multiple_of(cfg.render_every) && render_error.is_none() {
            let path = out.join(format!("snap_{step}.ppm"));
            let saved = render_snapshot(Some(sim.lattice()), &sim.pose(), sim.light(), &trail, window, ppu)
                .and_then(|img| img.save_ppm(&path));
            if let Err(e) = saved {
                render_error = Some(anyhow::Error::new(e).context(format!("cannot write {}", path.display())));
            }
        }
    })?;
    if let Some(e) = render_error {
        return Err(e);
    }
    let csv = out.join("trajectory.csv");
    write_trajectory_csv(&records, &csv).with_context(|| format!("cannot write {}", csv.display()))?;
    let metrics = compute_metrics(&records, Vec2::new(cfg.light_x, cfg.light_y), DEFAULT_TRANSIENT_FRACTION)?;
    let path = out.join("metrics.txt");
    fs::write(&path, metrics.to_text()).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(metrics)
}

fn cmd_run(args: RunArgs) -> CmdResult {
    let cfg = args.sim.config()?;
    let m = run_one(&cfg, &args.out)?;
    println!(
        "rule {} seed {}: median {:.1}, min {:.1}, cycles {}, escaped {} -> {}",
        cfg.rule,
        cfg.seed,
        m.median_dist,
        m.min_dist,
        m.approach_retreat_cycles,
        m.escaped,
        args.out.display()
    );
    Ok(())
}

const SWEEP_HEADER: &str =
    "seed,initial_dist,final_dist,mean_dist,median_dist,min_dist,max_dist,radius_of_gyration,cycles,escaped";

fn cmd_sweep(args: SweepArgs) -> CmdResult {
    let base = args.sim.config()?;
    fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    let seeds: Vec<u64> = (0..args.seeds).map(|i| base.seed.wrapping_add(i)).collect();
    let runs: Vec<(u64, TrajectoryMetrics)> = seeds
        .par_iter()
        .map(|&seed| {
            let mut cfg = base.clone();
            cfg.seed = seed;
            // Snapshots are a `run` feature; a sweep keeps only the numbers.
            cfg.render_every = 0;
            run_one(&cfg, &args.out.join(format!("seed_{seed}"))).map(|m| (seed, m))
        })
        .collect::<anyhow::Result<_>>()?;

    let mut rows = String::from(SWEEP_HEADER);
    rows.push('\n');
    for (seed, m) in &runs {
        rows.push_str(&format!(
            "{seed},{},{},{},{},{},{},{},{},{}\n",
            m.initial_dist,
            m.final_dist,
            m.mean_dist,
            m.median_dist,
            m.min_dist,
            m.max_dist,
            m.radius_of_gyration,
            m.approach_retreat_cycles,
            m.escaped
        ));
    }
    let metrics: Vec<TrajectoryMetrics> = runs.iter().map(|(_, m)| *m).collect();
    let summary = SweepSummary::from_runs(&metrics).context("empty sweep")?;
    let rows_path = args.out.join("sweep.csv");
    fs::write(&rows_path, rows).with_context(|| format!("cannot write {}", rows_path.display()))?;
    let summary_path = args.out.join("summary.txt");
    fs::write(&summary_path, summary.to_text()).with_context(|| format!("cannot write {}", summary_path.display()))?;
    print!("{}", summary.to_text());
    Ok(())
}

fn cmd_serve(args: ServeArgs) -> CmdResult {
    let cfg = args.sim.config()?;
    let sim = Simulation::new(cfg).map_err(|e| Failure::Usage(e.to_string()))?;
    let opts = ServeOptions {
        frame_interval: Duration::from_millis(100),
        steps_per_second: args.steps_per_second,
    };
    let addr = format!("{}:{}", args.bind, args.port);
    let server = serve(sim, &addr, opts).with_context(|| format!("cannot serve on {addr}"))?;
    println!("listening on {}", server.local_addr());
    std::io::stdout().flush().context("stdout")?;
    server.wait();
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Serve(a) => cmd_serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
