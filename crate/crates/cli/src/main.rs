use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use eglab_cli::config::{self, ExperimentConfig};
use eglab_cli::{
    cmd_analyze, cmd_classify, cmd_reproduce, cmd_solve, cmd_sweep, write_artifacts, CliError, CommandOutput, Format,
    RunContext, StepInputs,
};

#[derive(Parser)]
#[command(name = "eglab", version, about = "Extragradient stability experiments")]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV/JSON artifacts; overrides `outputs.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Rendering printed to stdout.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(clap::Args, Clone, Copy)]
struct StepArgs {
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long = "L", alias = "lipschitz")]
    lipschitz: Option<f64>,
    #[arg(long)]
    gamma_max: Option<f64>,
    #[arg(long)]
    grid_size: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the operator's monotonicity class.
    Classify,
    /// Run extragradient and report the trajectory.
    Solve,
    /// Sign, root and Rouché analysis of the step polynomial, plus a sweep.
    Analyze(StepArgs),
    /// q(γ) over a uniform grid.
    Sweep(StepArgs),
    /// Run a canned scenario and print PASS/FAIL per check.
    Reproduce { case: String },
}

struct Loaded {
    config: Option<ExperimentConfig>,
    hash: String,
}

fn load(path: Option<&PathBuf>) -> Result<Loaded, CliError> {
    match path {
        Some(p) => {
            let (config, hash) = ExperimentConfig::load(p)?;
            Ok(Loaded { config: Some(config), hash })
        }
        None => Ok(Loaded { config: None, hash: String::new() }),
    }
}

fn require(loaded: &Loaded) -> Result<&ExperimentConfig, CliError> {
    loaded.config.as_ref().ok_or_else(|| CliError::Config("this command needs --config <path>".into()))
}

fn step_inputs(args: StepArgs, cfg: Option<&ExperimentConfig>, seed: u64) -> Result<StepInputs, CliError> {
    let mut inputs = match cfg {
        Some(cfg) => StepInputs::from_config(cfg, seed)?,
        None => {
            let (mu, lipschitz) = args
                .mu
                .zip(args.lipschitz)
                .ok_or_else(|| CliError::Config("give --config or both --mu and --L".into()))?;
            StepInputs { mu, lipschitz, gamma_max: config::DEFAULT_GAMMA_MAX, grid_size: config::DEFAULT_GRID_SIZE }
        }
    };
    inputs.mu = args.mu.unwrap_or(inputs.mu);
    inputs.lipschitz = args.lipschitz.unwrap_or(inputs.lipschitz);
    inputs.gamma_max = args.gamma_max.unwrap_or(inputs.gamma_max);
    inputs.grid_size = args.grid_size.unwrap_or(inputs.grid_size);
    Ok(inputs)
}

fn execute(cli: Cli) -> Result<CommandOutput, CliError> {
    let loaded = load(cli.config.as_ref())?;
    let cfg = loaded.config.as_ref();
    let seed = cli.seed.or(cfg.map(|c| c.seed)).unwrap_or(0);
    let format_or = |default| match cli.format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Json) => Format::Json,
        None => default,
    };
    let ctx = |default| RunContext { seed, config_hash: loaded.hash.clone(), format: format_or(default) };

    let output = match cli.command {
        Command::Classify => cmd_classify(require(&loaded)?, &ctx(Format::Json))?,
        Command::Solve => cmd_solve(require(&loaded)?, &ctx(Format::Json))?.output,
        Command::Analyze(args) => cmd_analyze(&step_inputs(args, cfg, seed)?, format_or(Format::Json))?.0,
        Command::Sweep(args) => cmd_sweep(&step_inputs(args, cfg, seed)?, format_or(Format::Csv))?,
        Command::Reproduce { case } => cmd_reproduce(&case, seed)?.0,
    };

    let dir = cli.out.clone().or_else(|| cfg.and_then(|c| c.out_dir()));
    if let Some(dir) = dir {
        let formats = cfg.map(|c| c.formats()).unwrap_or_else(|| vec![Format::Csv, Format::Json]);
        write_artifacts(&dir, &output.artifacts, &formats)?;
    }
    Ok(output)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            if out.all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
