use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mdisc::config::load_generator;
use mdisc::io::write_atomic;
use mdisc::{execute, CliError, Command, GeneratorFlags, RunConfig, EXIT_VERIFY};

#[derive(Parser)]
#[command(name = "mdisc", version, about = "Multiway discrepancy of nonnegative arrays")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Discrepancy of a table at a partition (default: the 1-partition)
    Disc(Flags),
    /// Exact minimum k-way discrepancy
    MinDisc(Flags),
    /// Refine a partition by block splits up to --k blocks
    Refine(Flags),
    /// Run randomized checks (--checks all or a comma-separated list)
    Verify(Flags),
    /// Generate a table; --output PREFIX writes PREFIX.csv and PREFIX.partition.json
    Generate(Flags),
    /// Monotonicity sweep over generated tables; --output writes the trace CSV
    Campaign(Flags),
    /// Singular values of the degree-normalized table
    Svd(Flags),
    /// Run from a JSON configuration file
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Flags {
    /// Matrix CSV: one row per line, comma-separated
    #[arg(long)]
    input: Option<PathBuf>,
    /// Partition JSON: {"k", "row_blocks", "col_blocks"}, 0-based
    #[arg(long)]
    partition: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    /// Work budget: subsets for disc/refine/verify, partitions for min-disc/campaign
    #[arg(long)]
    budget: Option<u64>,
    /// Subset budget per scan inside partition searches
    #[arg(long)]
    subset_budget: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Skip the first CSV line
    #[arg(long)]
    header: bool,
    /// Divide entries by the grand total after loading
    #[arg(long)]
    normalize: bool,
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    /// independent, blockwise, contracted, random_table, random_graph, random_binary
    #[arg(long)]
    kind: Option<String>,
    /// Rows (vertices for random_graph)
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    edge_prob: Option<f64>,
    #[arg(long)]
    fill_prob: Option<f64>,
    /// Generator JSON, e.g. {"kind": "contracted", "rows": 4, "cols": 4, "k": 2}
    #[arg(long, conflicts_with = "kind")]
    generator: Option<PathBuf>,
    #[arg(long, hide = true)]
    fault_bias: Option<f64>,
}

impl Flags {
    fn into_config(self, command: Command) -> Result<RunConfig, CliError> {
        let generator = match &self.generator {
            Some(path) => Some(load_generator(path)?),
            None => GeneratorFlags {
                kind: self.kind,
                rows: self.rows,
                cols: self.cols,
                k: self.k,
                edge_prob: self.edge_prob,
                fill_prob: self.fill_prob,
            }
            .build()?,
        };
        Ok(RunConfig {
            input: self.input,
            partition: self.partition,
            k: self.k,
            k_max: self.k_max,
            budget: self.budget,
            subset_budget: self.subset_budget,
            trials: self.trials,
            instances: self.instances,
            seed: self.seed,
            tol: self.tol,
            header: self.header,
            normalize: self.normalize,
            checks: self.checks,
            generator,
            fault_bias: self.fault_bias,
            output: self.output,
            ..RunConfig::new(command)
        })
    }
}

fn config(sub: Sub) -> Result<RunConfig, CliError> {
    let (command, flags) = match sub {
        Sub::Disc(f) => (Command::Disc, f),
        Sub::MinDisc(f) => (Command::MinDisc, f),
        Sub::Refine(f) => (Command::Refine, f),
        Sub::Verify(f) => (Command::Verify, f),
        Sub::Generate(f) => (Command::Generate, f),
        Sub::Campaign(f) => (Command::Campaign, f),
        Sub::Svd(f) => (Command::Svd, f),
        Sub::Run { config, output } => {
            let mut cfg = RunConfig::load(&config)?;
            if output.is_some() {
                cfg.output = output;
            }
            return Ok(cfg);
        }
    };
    flags.into_config(command)
}

fn run(sub: Sub) -> Result<ExitCode, CliError> {
    let outcome = execute(config(sub)?)?;
    for (path, contents) in &outcome.files {
        write_atomic(path, contents)?;
    }
    if let Some(s) = &outcome.stdout {
        print!("{s}");
    }
    if outcome.verification_failed {
        eprintln!("error: verification recorded failures");
        return Ok(ExitCode::from(EXIT_VERIFY));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
