use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use aoristic::cli::{cmd_fit, cmd_posterior, cmd_simulate, cmd_validate, exit_code, EXIT_CONFIG, EXIT_VALIDATION};
use aoristic::config::{RunConfig, DEFAULT_CONFIG_ENV};
use aoristic::error::Error;
use aoristic::io::ingest;

#[derive(Parser)]
#[command(name = "aoristic", version, about = "Bayesian state estimation for interval-censored event times")]
struct Cli {
    /// Configuration file (JSON or key=value lines).
    #[arg(long, global = true, env = DEFAULT_CONFIG_ENV)]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    eta: Option<f64>,
    #[arg(long, global = true)]
    r: Option<f64>,
    #[arg(long, global = true)]
    p: Option<f64>,
    #[arg(long, global = true)]
    k: Option<f64>,
    #[arg(long, global = true)]
    lambda: Option<f64>,
    #[arg(long, global = true)]
    burnin: Option<usize>,
    #[arg(long, global = true)]
    sweeps: Option<usize>,
    #[arg(long, global = true)]
    thin: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Any config field as key=value; may be repeated.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw latent times from the prior and censor them.
    Simulate,
    /// Sample the latent times given observed data.
    Posterior { data: PathBuf },
    /// Fit the mark law and optionally the prior log relative likelihood.
    Fit { data: PathBuf },
    /// Run the acceptance criteria.
    Validate {
        /// Criterion ids to run (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

fn build_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let o = &cli.overrides;
    macro_rules! apply {
        ($($f:ident),*) => { $(if let Some(v) = o.$f.clone() { cfg.$f = v; })* };
    }
    apply!(beta, eta, r, p, k, lambda, burnin, sweeps, thin, out);
    if let Some(s) = o.seed {
        cfg.seed = Some(s);
    }
    if let Some(t) = o.threads {
        cfg.threads = Some(t);
    }
    for kv in &o.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects key=value, got '{kv}'")))?;
        cfg.set(k.trim(), v.trim()).map_err(Error::Config)?;
    }
    Ok(cfg)
}

fn data_window(cfg: &RunConfig) -> Result<Option<aoristic::prior::Window>, Error> {
    if cfg.window_from_config {
        cfg.window().map(Some)
    } else {
        Ok(None)
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    let mut cfg = build_config(&cli)?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    match &cli.command {
        Command::Simulate => {
            let out = cmd_simulate(&mut cfg)?;
            println!("seed={}", out.seed);
            println!(
                "latent={} atoms={} intervals={}",
                out.truth.len(),
                out.observed.m(),
                out.observed.k()
            );
            println!("wrote {} and {}", out.truth_path.display(), out.observed_path.display());
        }
        Command::Posterior { data } => {
            let data = ingest(data, data_window(&cfg)?)?;
            let (summary, _) = cmd_posterior(&mut cfg, &data)?;
            println!("seed={}", summary.seed);
            if let Some(note) = &summary.note {
                println!("{note}");
            }
            println!(
                "n={} m={} snapshots={} acceptance={:.4}",
                summary.n, summary.m, summary.snapshots, summary.acceptance_rate
            );
            println!("wrote results to {}", cfg.out.display());
        }
        Command::Fit { data } => {
            let data = ingest(data, data_window(&cfg)?)?;
            let out = cmd_fit(&mut cfg, &data)?;
            println!("seed={}", out.seed);
            let f = &out.forward;
            println!("n={} m={} p_hat={:.6}", f.n, f.m, f.p_hat);
            if let (Some(k), Some(rate)) = (f.shape, f.rate) {
                println!("shape={k:.6} rate={rate:.6}");
            }
            if let Some(c) = &out.curve {
                for ((t, l), e) in c.theta_grid.iter().zip(&c.l_values).zip(&c.mc_error) {
                    println!("theta={t} L={l:.6} mc_error={e:.6}");
                }
                for w in &c.warnings {
                    eprintln!("warning: {w}");
                }
            }
            println!("wrote results to {}", cfg.out.display());
        }
        Command::Validate { only } => {
            let reports = cmd_validate(&mut cfg, only)?;
            let mut ok = true;
            for r in &reports {
                println!("{}", r.summary_line());
                ok &= r.passed;
            }
            if !ok {
                return Ok(EXIT_VALIDATION);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
