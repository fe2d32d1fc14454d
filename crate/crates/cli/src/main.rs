use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use varlab_cli::commands::{self, OutputFormat};
use varlab_cli::{ingest_csv, CliError, IngestOptions};

#[derive(Parser)]
#[command(name = "varlab", version, about = "Exact VaR subadditivity and comonotonicity analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-column VaR at the given levels.
    Var {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        levels: LevelArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        output: Format,
    },
    /// Full analysis: VaR table, comonotonicity and all-level flags.
    Report {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        levels: LevelArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        output: Format,
    },
    /// Comonotonic coupling of one-column samples, one file per marginal.
    Couple {
        /// One-column CSV per marginal, in coordinate order.
        #[arg(required = true)]
        marginals: Vec<PathBuf>,
        #[arg(long)]
        no_header: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        output: Format,
    },
    /// Random equivalence trials on comonotonic and general couplings.
    Simulate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Fixed dimension; cycles through 1..=4 when omitted.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 8)]
        max_atoms: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        output: Format,
    },
    /// Gaussian VaR, sub/superadditivity gap and the comonotone condition.
    Elliptic {
        /// JSON file `{"mean": [..], "covariance": [[..], ..]}`.
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        levels: LevelArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        output: Format,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Loss sample CSV, one column per variable.
    input: PathBuf,
    #[arg(long)]
    no_header: bool,
    /// Name of the weight column (default: `weight` if present).
    #[arg(long)]
    weight_column: Option<String>,
}

impl InputArgs {
    fn options(&self) -> IngestOptions {
        IngestOptions { has_header: !self.no_header, weight_column: self.weight_column.clone() }
    }
}

#[derive(Args)]
struct LevelArgs {
    /// Confidence level in (0, 1); repeatable. Decimals or num/den.
    #[arg(long = "alpha")]
    alphas: Vec<String>,
    /// File with one level per line.
    #[arg(long)]
    alphas_file: Option<PathBuf>,
}

impl LevelArgs {
    fn collect(&self) -> Result<Vec<String>, CliError> {
        let mut all = self.alphas.clone();
        if let Some(path) = &self.alphas_file {
            all.extend(commands::read_alphas_file(path)?);
        }
        Ok(all)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Var { input, levels, output } => {
            let data = ingest_csv(&input.input, &input.options())?;
            let alphas = commands::parse_exact_alphas(&levels.collect()?)?;
            commands::var_command(&data, &alphas, output.into())
        }
        Command::Report { input, levels, output } => {
            let data = ingest_csv(&input.input, &input.options())?;
            let alphas = commands::parse_exact_alphas(&levels.collect()?)?;
            commands::report_command(&data, &alphas, output.into())
        }
        Command::Couple { marginals, no_header, output } => {
            let options = IngestOptions { has_header: !no_header, weight_column: None };
            let inputs = marginals
                .iter()
                .map(|p| ingest_csv(p, &options))
                .collect::<Result<Vec<_>, _>>()?;
            commands::couple_command(&inputs, output.into())
        }
        Command::Simulate { seed, trials, n, max_atoms, output } => {
            commands::simulate_command(seed, trials, n, max_atoms, output.into())
        }
        Command::Elliptic { spec, levels, output } => {
            let text = std::fs::read_to_string(&spec).map_err(|source| CliError::Io {
                path: spec.display().to_string(),
                source,
            })?;
            let spec = commands::parse_gaussian_spec(&text)?;
            let alphas = commands::parse_real_alphas(&levels.collect()?)?;
            commands::elliptic_command(&spec, &alphas, output.into())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
