use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use simplicial_games::io::parse_game;
use simplicial_games::pipeline::{run_pipeline, ReportFormat, RunConfig, Stage};
use simplicial_games::Result;

#[derive(Clone, Copy, ValueEnum)]
enum Command {
    Build,
    Nerve,
    Covering,
    Nash,
    Decompose,
    Check,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

/// Analyse a strategic-form game as a weighted simplicial complex.
#[derive(Parser)]
#[command(name = "sgc", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Native JSON game or payoff-list .nfg file.
    #[arg(long)]
    game: PathBuf,
    /// Directory for report files; stdout only when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Accepted for compatibility; runs are deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn run(cli: Cli) -> Result<()> {
    let doc = parse_game(&cli.game)?;
    let config = RunConfig {
        tolerance: cli.tolerance,
        out_dir: cli.out.clone(),
        format: match cli.format {
            Format::Json => ReportFormat::Json,
            Format::Dot => ReportFormat::Dot,
        },
        seed: cli.seed,
        threads: RunConfig::threads_from_env()?,
        ..RunConfig::default()
    };
    let stage = match cli.command {
        Command::Build => Stage::Build,
        Command::Nerve => Stage::Nerve,
        Command::Covering => Stage::Covering,
        Command::Nash => Stage::Nash,
        Command::Decompose => Stage::Decompose,
        Command::Check => Stage::Check,
    };
    let output = run_pipeline(&doc, &config, stage)?;
    if let Some(dir) = &config.out_dir {
        output.write_to(dir)?;
    }
    print!("{}", output.primary);
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sgc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
