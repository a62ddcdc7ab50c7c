//! `holorigid`: periodic orbits, Markov models, pressure and rigidity
//! verdicts for generalized polynomial-like maps.

mod commands;
mod config;
mod failure;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Ctx;
use config::RunConfig;
use failure::Failure;

#[derive(Parser)]
#[command(name = "holorigid", version, about = "Rigidity diagnostics for polynomial-like maps")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// RunConfig JSON; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    max_period: Option<usize>,
    /// Pressure approximation order.
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Grid cell size for avoiding-set models.
    #[arg(long, global = true)]
    cell: Option<f64>,
    /// Overrides every test tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Degeneracy flags, critical orbit, multiplier spectrum and Julia sample.
    Analyze { map: PathBuf },
    /// All periodic cycles up to `--max-period`.
    Orbits { map: PathBuf },
    /// Grid model of the Julia points avoiding the critical disc.
    BuildAn { map: PathBuf },
    /// Anchor orbits joined by bridges.
    BuildBn { map: PathBuf },
    /// Pressure curve `t,P_lower,P_upper` of `-t log|Df|`.
    Pressure {
        model: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        t_min: f64,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
    },
    /// Bowen dimension, entropy and Lyapunov data of a model.
    Dimension { model: PathBuf },
    /// Cohomology test between two potentials (JSON text or file).
    Livshitz {
        model: PathBuf,
        #[arg(long)]
        phi: String,
        #[arg(long)]
        psi: Option<String>,
        /// Random coboundary perturbations of `phi` to test against it.
        #[arg(long, default_value_t = 0)]
        trials: usize,
    },
    /// Invariant affine structure test on a model.
    Affine { model: PathBuf },
    /// End-to-end rigidity verdict for two maps.
    Compare { map_f: PathBuf, map_g: PathBuf },
    /// Every stage for one map, optionally compared against a second.
    Full {
        map: PathBuf,
        #[arg(long)]
        against: Option<PathBuf>,
    },
}

fn config(g: &Global) -> Result<RunConfig, Failure> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(o) = &g.out {
        cfg.out_dir = o.clone();
    }
    if let Some(n) = g.max_period {
        cfg.max_period = n;
    }
    if let Some(n) = g.order {
        cfg.pressure_order = n;
    }
    if let Some(h) = g.cell {
        cfg.cell_size = h;
    }
    if let Some(t) = g.tol {
        let tol = &mut cfg.tolerances;
        tol.livshitz = t;
        tol.multiplier = t;
        tol.affine = Some(t);
        tol.compare = Some(t);
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("HOLORIGID_THREADS") else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::input(format!("HOLORIGID_THREADS: expected a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::input(e.to_string()))
}

fn run(cli: Cli) -> Result<i32, Failure> {
    init_threads()?;
    let cfg = config(&cli.global)?;
    let mut ctx = Ctx::new(cfg.clone());
    ctx.out.json("config.json", &cfg)?;
    match &cli.command {
        Command::Analyze { map } => commands::analyze(&mut ctx, map),
        Command::Orbits { map } => commands::orbits(&mut ctx, map),
        Command::BuildAn { map } => commands::build_an(&mut ctx, map),
        Command::BuildBn { map } => commands::build_bn(&mut ctx, map),
        Command::Pressure { model, t_min, t_max, steps } => {
            commands::pressure(&mut ctx, model, *t_min, *t_max, *steps)
        }
        Command::Dimension { model } => commands::dimension(&mut ctx, model),
        Command::Livshitz { model, phi, psi, trials } => {
            commands::livshitz(&mut ctx, model, phi, psi.as_deref(), *trials)
        }
        Command::Affine { model } => commands::affine(&mut ctx, model),
        Command::Compare { map_f, map_g } => commands::compare(&mut ctx, map_f, map_g),
        Command::Full { map, against } => commands::full(&mut ctx, map, against.as_ref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = run(cli).unwrap_or_else(|f| {
        eprintln!("error: {f}");
        f.code
    });
    ExitCode::from(code as u8)
}
