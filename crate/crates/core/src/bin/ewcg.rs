use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ewcg::coloring::Mode;
use ewcg::commands::{self, Overrides};
use ewcg::graph::Rule;
use ewcg::pipeline::Binning;
use ewcg::report::{error_value, Format};
use ewcg::reproduce::reproduce;
use ewcg::spec::ProblemSpec;
use ewcg::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ewcg",
    version,
    about = "Edge-weighted characteristic graphs for distributed functional compression"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct SpecArgs {
    /// Problem spec (JSON).
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    a: Option<usize>,
    /// exact | heuristic | auto
    #[arg(long)]
    mode: Option<Mode>,
    /// exact | counting
    #[arg(long)]
    rule: Option<Rule>,
    #[arg(long)]
    seed: Option<u64>,
}

impl SpecArgs {
    fn load(&self) -> Result<ProblemSpec> {
        let text = std::fs::read_to_string(&self.spec)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", self.spec.display())))?;
        let spec = ProblemSpec::from_json(&text)?;
        Ok(Overrides {
            n: self.n,
            b: self.b,
            a: self.a,
            mode: self.mode,
            rule: self.rule,
            seed: self.seed,
        }
        .apply(&spec))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Edge weights and replica splits of both characteristic graphs.
    Weights(SpecArgs),
    /// Traditional and a:b colorings of the side-1 graph.
    Color(SpecArgs),
    /// Exact fractional chromatic number.
    Chif(SpecArgs),
    /// Rate-region estimate.
    Rates(SpecArgs),
    /// Simulate encoding and decoding of sampled blocks.
    Simulate {
        #[command(flatten)]
        spec: SpecArgs,
        /// Number of n-blocks to draw.
        #[arg(long, default_value_t = commands::DEFAULT_BLOCKS)]
        blocks: usize,
        /// R1,R2,L: rates in bits per symbol and blocks per hashed sequence.
        #[arg(long)]
        binning: Option<Binning>,
    },
    /// Check the bundled example against its reference values.
    Reproduce {
        /// Directory with replacement coloring fixtures.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

fn emit<T: Serialize>(
    cli: &Cli,
    command: &str,
    spec: Option<&ProblemSpec>,
    result: T,
) -> Result<()> {
    let text = commands::envelope(command, spec, result).render(cli.format)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Weights(a) => {
            let s = a.load()?;
            emit(cli, "weights", Some(&s), commands::weights(&s)?)?;
        }
        Command::Color(a) => {
            let s = a.load()?;
            emit(cli, "color", Some(&s), commands::color(&s)?)?;
        }
        Command::Chif(a) => {
            let s = a.load()?;
            emit(cli, "chif", Some(&s), commands::chif(&s)?)?;
        }
        Command::Rates(a) => {
            let s = a.load()?;
            match commands::rates(&s) {
                Ok(r) => emit(cli, "rates", Some(&s), r)?,
                Err(Error::Incomplete { partial, source }) => {
                    emit(cli, "rates", Some(&s), &partial)?;
                    return Err(*source);
                }
                Err(e) => return Err(e),
            }
        }
        Command::Simulate {
            spec,
            blocks,
            binning,
        } => {
            let s = spec.load()?;
            emit(
                cli,
                "simulate",
                Some(&s),
                commands::simulate(&s, *blocks, *binning)?,
            )?;
        }
        Command::Reproduce { fixtures } => {
            let r = reproduce(fixtures.as_deref(), &Default::default())?;
            let ok = r.all_pass();
            emit(cli, "reproduce", None, &r)?;
            for c in &r.checks {
                eprintln!(
                    "{} [{}] {}: expected {}, observed {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.criterion,
                    c.name,
                    c.expected,
                    c.observed
                );
            }
            if !ok {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ewcg: {e}");
            if let Ok(text) = serde_json::to_string(&error_value(&e)) {
                eprintln!("{text}");
            }
            ExitCode::from(e.kind().exit_code() as u8)
        }
    }
}
