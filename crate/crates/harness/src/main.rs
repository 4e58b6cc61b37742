use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use medial_core::rng::derive_seed;
use medial_core::{BallSpec, GParams, Point};
use medial_harness::config::BallFamily;
use medial_harness::experiment::streams;
use medial_harness::points::{write_points, write_points_file};
use medial_harness::svg::save_svg;
use medial_harness::{generate_scene, run_experiment, ExperimentConfig, Report, SceneSpec};

/// Exit status when a flagged ball was fitted within δr.
const EXIT_VIOLATION: u8 = 2;

#[derive(Parser)]
#[command(
    name = "medial",
    version,
    about = "Coarse medial-axis detection, minimax fit certificates and Carleson estimates",
    after_help = "Exit status: 0 success, 1 usage or runtime error, 2 consistency violation."
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "MEDIAL_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scene and write its sites as CSV.
    GenScene(GenSceneArgs),
    /// Evaluate G membership over the ball family.
    Detect(ExperimentArgs),
    /// Membership plus minimax fits on flagged balls (exit 2 on violation).
    Verify(ExperimentArgs),
    /// Membership plus Monte Carlo Carleson estimates.
    Carleson(ExperimentArgs),
    /// Render a planar report as SVG.
    Render(RenderArgs),
    /// Full pipeline, writing every output named in the config.
    Run(ExperimentArgs),
}

#[derive(Args)]
struct GenSceneArgs {
    /// Take the scene and seed from this config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scene descriptor as JSON, e.g. '{"kind":"circle_samples","n":16,"radius":1}'.
    #[arg(long)]
    scene: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    report: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment config; the flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scene descriptor as JSON.
    #[arg(long, conflicts_with = "points")]
    scene: Option<String>,
    /// Point CSV to use as the site set.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Root seed. The scene, each ball's fit samples and each Carleson
    /// slice draw from independent ChaCha8 streams derived from it, so a
    /// given seed reproduces a report bit for bit on any thread count.
    #[arg(long)]
    seed: Option<u64>,
    /// Near-minimizer slack ε (sites within d(x,K) + εr count).
    #[arg(long)]
    eps: Option<f64>,
    /// Coarse-differentiability tolerance δ; needs 2δ + ε < 1.
    #[arg(long)]
    delta: Option<f64>,
    /// Ball "x1,x2,...:r"; repeat to build an explicit family replacing the
    /// configured one.
    #[arg(
        long = "ball",
        value_name = "CENTER:RADIUS",
        allow_hyphen_values = true
    )]
    balls: Vec<String>,
    /// Octaves J of the Carleson scale grid; radii run down to L/2^J.
    #[arg(long)]
    scales: Option<usize>,
    /// Sample points per minimax fit.
    #[arg(long)]
    samples: Option<usize>,
    /// Monte Carlo points per Carleson scale slice.
    #[arg(long)]
    mc_samples: Option<usize>,
    /// Report JSON path (default: the config's, else stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    summary_csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

fn parse_ball(s: &str) -> anyhow::Result<BallSpec> {
    let (c, r) = s
        .rsplit_once(':')
        .ok_or_else(|| anyhow!("ball {s:?} is not of the form x1,x2,...:r"))?;
    let coords = c
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("ball center {c:?}"))?;
    let r: f64 = r
        .trim()
        .parse()
        .with_context(|| format!("ball radius {r:?}"))?;
    Ok(BallSpec::new(Point::new(coords)?, r)?)
}

impl ExperimentArgs {
    fn config(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                ExperimentConfig::load(p).with_context(|| format!("loading {}", p.display()))?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(s) = &self.scene {
            cfg.scene = serde_json::from_str(s).context("--scene")?;
        }
        if let Some(p) = &self.points {
            cfg.scene = SceneSpec::Csv { path: p.clone() };
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if self.eps.is_some() || self.delta.is_some() {
            cfg.params = GParams::new(
                self.eps.unwrap_or(cfg.params.epsilon()),
                self.delta.unwrap_or(cfg.params.delta()),
            )?;
        }
        if !self.balls.is_empty() {
            let balls = self
                .balls
                .iter()
                .map(|b| parse_ball(b))
                .collect::<anyhow::Result<_>>()?;
            cfg.balls = BallFamily::Explicit { balls };
        }
        if let Some(j) = self.scales {
            cfg.carleson.levels = j;
        }
        if let Some(n) = self.samples {
            cfg.sampling.n = Some(n);
        }
        if let Some(n) = self.mc_samples {
            cfg.carleson.samples = n;
        }
        if self.output.is_some() {
            cfg.outputs.report = self.output.clone();
        }
        if self.summary_csv.is_some() {
            cfg.outputs.summary_csv = self.summary_csv.clone();
        }
        if self.svg.is_some() {
            cfg.outputs.svg = self.svg.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn experiment(args: &ExperimentArgs, verify: bool, carleson: bool) -> anyhow::Result<ExitCode> {
    let mut cfg = args.config()?;
    cfg.verify.enabled &= verify;
    cfg.carleson.enabled &= carleson;
    let report = run_experiment(&cfg).context("running experiment")?;
    let out = &cfg.outputs;
    match &out.report {
        Some(p) => report
            .save(p)
            .with_context(|| format!("writing {}", p.display()))?,
        None => print!("{}", report.to_json()?),
    }
    if let Some(p) = &out.summary_csv {
        report
            .save_summary_csv(p)
            .with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(p) = &out.svg {
        save_svg(&report, p).with_context(|| format!("writing {}", p.display()))?;
    }
    let s = &report.summary;
    eprintln!(
        "balls {}  in G {}  verified {}  violations {}  max constant {}",
        s.balls,
        s.in_g,
        s.verified,
        s.violations,
        s.max_constant
            .map_or("-".to_string(), |c| format!("{c:.6}"))
    );
    Ok(if s.violations > 0 {
        ExitCode::from(EXIT_VIOLATION)
    } else {
        ExitCode::SUCCESS
    })
}

fn gen_scene(args: &GenSceneArgs) -> anyhow::Result<ExitCode> {
    let (mut spec, mut seed) = match &args.config {
        Some(p) => {
            let cfg = ExperimentConfig::load(p)?;
            (Some(cfg.scene), cfg.seed)
        }
        None => (None, 0),
    };
    if let Some(s) = &args.scene {
        spec = Some(serde_json::from_str(s).context("--scene")?);
    }
    if let Some(s) = args.seed {
        seed = s;
    }
    let Some(spec) = spec else {
        bail!("gen-scene needs --scene or --config");
    };
    // Same stream as `run`, so the written sites match the experiment's.
    let sites = generate_scene(&spec, derive_seed(seed, &[streams::SCENE]))?;
    match &args.output {
        Some(p) => write_points_file(&sites, p)?,
        None => write_points(&sites, std::io::stdout().lock())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn render(args: &RenderArgs) -> anyhow::Result<ExitCode> {
    let report = Report::load(&args.report)?;
    save_svg(&report, &args.output)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = match &cli.command {
        Command::GenScene(a) => gen_scene(a),
        Command::Detect(a) => experiment(a, false, false),
        Command::Verify(a) => experiment(a, true, false),
        Command::Carleson(a) => experiment(a, false, true),
        Command::Render(a) => render(a),
        Command::Run(a) => experiment(a, true, true),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
