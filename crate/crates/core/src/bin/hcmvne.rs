use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hcmvne::cli::{self, RunConfig};
use hcmvne::embedding::{Algorithm, BacktrackLimit, EmbedParams};
use hcmvne::Error;

#[derive(Parser)]
#[command(name = "hcmvne", version, about = "Virtual network embedding with heavy-clique coarsening")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a substrate, a request workload and its manifest.
    Generate(RunArgs),
    /// Embed one virtual network onto one substrate.
    Embed(EmbedArgs),
    /// Replay the workload with each algorithm and write report CSVs.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Parallel runs.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Summarize report CSVs; optionally plot them as SVG.
    Report {
        files: Vec<PathBuf>,
        /// Directory for acceptance_ratio.svg, avg_revenue.svg, rc_ratio.svg.
        #[arg(long)]
        plots: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Run only this algorithm.
    #[arg(long)]
    algorithm: Option<Algorithm>,
    #[arg(long)]
    max_hops: Option<usize>,
    /// `N`, `Kn` (K times the request's node count) or `inf`.
    #[arg(long)]
    max_backtrack: Option<BacktrackLimit>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    substrate: PathBuf,
    vn: PathBuf,
    #[arg(long, default_value = "hcm")]
    algorithm: Algorithm,
    /// Shorthand for `--algorithm no-coarsen`.
    #[arg(long)]
    no_coarsen: bool,
    #[arg(long, default_value_t = 2)]
    max_hops: usize,
    #[arg(long, default_value = "3n")]
    max_backtrack: BacktrackLimit,
}

impl RunArgs {
    fn resolve(&self) -> hcmvne::Result<RunConfig> {
        let text = std::fs::read_to_string(&self.config)
            .map_err(|e| Error::Config(format!("{}: {e}", self.config.display())))?;
        let mut cfg = RunConfig::parse(&text)?;
        if let Some(s) = self.seed {
            cfg.reseed(s);
        }
        if let Some(a) = self.algorithm {
            cfg.algorithms = vec![a];
        }
        if let Some(h) = self.max_hops {
            cfg.embed.max_hops = h;
        }
        if let Some(b) = self.max_backtrack {
            cfg.embed.max_backtrack = b;
        }
        if let Some(h) = self.horizon {
            cfg.horizon = h;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> hcmvne::Result<bool> {
    match cli.command {
        Command::Generate(args) => {
            let g = cli::cmd_generate(&args.resolve()?)?;
            println!("{}\n{}\n{}", g.substrate.display(), g.manifest.display(), g.lock.display());
            Ok(true)
        }
        Command::Embed(a) => {
            let algorithm = if a.no_coarsen { Algorithm::NoCoarsen } else { a.algorithm };
            let params = EmbedParams {
                max_hops: a.max_hops,
                max_backtrack: a.max_backtrack,
                ..EmbedParams::default()
            };
            let rep = cli::cmd_embed(&a.substrate, &a.vn, algorithm, &params)?;
            print!("{}", rep.human());
            println!("{}", rep.json());
            Ok(rep.outcome.success())
        }
        Command::Simulate { run, jobs } => {
            let cfg = run.resolve()?;
            for r in cli::cmd_simulate(&cfg, jobs)? {
                println!(
                    "seed {} {:<10} acceptance {:.4} avg_revenue {:.2} rc_ratio {:.4}  {}",
                    r.seed,
                    r.algorithm,
                    r.acceptance,
                    r.avg_revenue,
                    r.rc_ratio,
                    r.report.display()
                );
            }
            Ok(true)
        }
        Command::Report { files, plots } => {
            if files.is_empty() {
                return Err(Error::Config("no report files given".into()));
            }
            print!("{}", cli::cmd_report(&files, plots.as_deref())?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e))
        }
    }
}
