use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coded_shuffle::experiment::{
    cmd_simulate, cmd_table, cmd_terasort, gen_data, parse_list, ExperimentConfig, Sweep,
};
use coded_shuffle::Result;

/// Coded shuffle schemes: load tables, bit-exact simulation and a sorting
/// workload.
#[derive(Parser)]
#[command(name = "cdc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form loads and file/group counts for a (K, r) sweep.
    Table(Common),
    /// Execute a scheme on seeded IVs and compare measured with predicted load.
    Simulate(Common),
    /// Sort records over a coded shuffle and compare with uncoded shuffling.
    Terasort {
        #[command(flatten)]
        common: Common,
        /// Read records from this file instead of generating them.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Write each node's sorted output to <DIR>/part-<k>.bin.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Write seeded uniform records to a file.
    GenData {
        #[arg(long)]
        records: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// uncoded, lmya, flcd3 or flcd.
    #[arg(long)]
    scheme: Option<String>,
    /// K, a list (16,22,25) or a range (8-12).
    #[arg(long)]
    nodes: Option<String>,
    /// r, a list or a range.
    #[arg(long)]
    load: Option<String>,
    /// Comma-separated IV sizes in bits.
    #[arg(long)]
    iv_sizes: Option<String>,
    /// Comma-separated files per node (uncoded only).
    #[arg(long)]
    file_counts: Option<String>,
    /// Multiplier on the minimal file count (flcd3 only).
    #[arg(long)]
    scale: Option<u64>,
    #[arg(long)]
    records: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// markdown or csv.
    #[arg(long)]
    format: Option<String>,
    /// Refuse placements with more files than this.
    #[arg(long)]
    max_files: Option<u64>,
    /// TOML file with the same keys; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn resolve(self) -> Result<ExperimentConfig> {
        let flags = ExperimentConfig {
            scheme: self.scheme,
            nodes: self.nodes.as_deref().map(str::parse::<Sweep>).transpose()?,
            load: self.load.as_deref().map(str::parse::<Sweep>).transpose()?,
            iv_sizes: self.iv_sizes.as_deref().map(parse_list).transpose()?,
            file_counts: self.file_counts.as_deref().map(parse_list).transpose()?,
            scale: self.scale,
            records: self.records,
            seed: self.seed,
            format: self.format,
            max_files: self.max_files,
        };
        match &self.config {
            Some(path) => Ok(flags.or(ExperimentConfig::load_file(path)?)),
            None => Ok(flags),
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Table(common) => print!("{}", cmd_table(&common.resolve()?)?),
        Command::Simulate(common) => print!("{}", cmd_simulate(&common.resolve()?)?.1),
        Command::Terasort { common, input, out } => {
            let report = cmd_terasort(&common.resolve()?, input.as_deref(), out.as_deref())?;
            print!("{}", report.render());
        }
        Command::GenData { records, seed, out } => gen_data(records, seed, &out)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
