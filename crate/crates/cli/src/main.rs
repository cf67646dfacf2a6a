mod config;
mod error;
mod output;
mod runs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Equation, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "poppe", version, about = "Operator-quotient solvers for integrable and nonlocal PDEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and write CSV tables plus a `.meta` sidecar.
    Run {
        #[arg(value_enum)]
        equation: Equation,
        #[command(flatten)]
        flags: Flags,
    },
    /// Check the configuration and list every violated precondition.
    Validate {
        #[arg(value_enum)]
        equation: Equation,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Args, Default)]
struct Flags {
    /// Named parameter set (`default`, or `paper` for kdv, nls, spde).
    #[arg(long)]
    preset: Option<String>,
    /// Key-value file, one `key = value` per line; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    grid_n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    domain_l: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t_final: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    /// riemann-left, trapezoid, or gregory for the Smoluchowski family.
    #[arg(long)]
    quadrature: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Worker threads; 0 uses every core.
    #[arg(long, allow_hyphen_values = true)]
    threads: Option<String>,
    /// on or off.
    #[arg(long)]
    compare_oracle: Option<String>,
    /// Initial data or coefficient profile.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    checkpoints: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    panels: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    amplitude: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    noise: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<String>,
    /// on or off; needed for beta != 0.
    #[arg(long)]
    isotropic_extension: Option<String>,
    /// Comma-separated coefficients of d, lowest degree first.
    #[arg(long, allow_hyphen_values = true)]
    growth: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    coagulation: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    loss_rate: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(String, String)> {
        let all = [
            ("preset", &self.preset),
            ("grid-n", &self.grid_n),
            ("domain-l", &self.domain_l),
            ("t-final", &self.t_final),
            ("dt", &self.dt),
            ("seed", &self.seed),
            ("quadrature", &self.quadrature),
            ("out", &self.out),
            ("threads", &self.threads),
            ("compare-oracle", &self.compare_oracle),
            ("profile", &self.profile),
            ("checkpoints", &self.checkpoints),
            ("panels", &self.panels),
            ("amplitude", &self.amplitude),
            ("noise", &self.noise),
            ("nu", &self.nu),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("epsilon", &self.epsilon),
            ("isotropic-extension", &self.isotropic_extension),
            ("growth", &self.growth),
            ("coagulation", &self.coagulation),
            ("loss-rate", &self.loss_rate),
        ];
        all.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))).collect()
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { equation, flags } => {
            let cfg = RunConfig::resolve(equation, flags.config.as_ref(), flags.pairs())?;
            println!("{equation}: configuration valid (config_hash={})", cfg.hash());
            Ok(())
        }
        Command::Run { equation, flags } => {
            let cfg = RunConfig::resolve(equation, flags.config.as_ref(), flags.pairs())?;
            let threads = cfg.usize("threads");
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::Invalid(vec![format!("threads: {e}")]))?;
            let out = pool.install(|| runs::run(&cfg))?;
            for path in output::write_run(&cfg, &out)? {
                println!("wrote {}", path.display());
            }
            for (k, v) in &out.summary {
                println!("{k} = {v:e}");
            }
            if out.breakdowns.is_empty() {
                return Ok(());
            }
            let total = out.breakdowns.len();
            let mut report: Vec<String> = out.breakdowns.into_iter().take(8).collect();
            if total > report.len() {
                report.push(format!("... {} more in the .meta sidecar", total - report.len()));
            }
            Err(CliError::Breakdown(report))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
