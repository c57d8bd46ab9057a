//! `multicross` command-line front end: `solve`, `bench`, `eval`, `info`.
//!
//! Exit codes: 0 success, 2 bad flags or configuration, 3 instance/tour
//! parse failure, 4 I/O failure, 5 invalid tour.

pub mod bench;
pub mod error;
pub mod files;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use multicross_core::{known_optimum, run_ga, tour_length, write_tour, CrossoverKind, GaConfig, StrategyKind};

pub use crate::bench::{run_plan, BenchPlan, BenchRow, Pivot};
pub use crate::error::CliError;
use crate::files::{csv_to_io, instance_label, load_instance, load_tour, write_convergence, write_file};

#[derive(Debug, Parser)]
#[command(name = "multicross", version, about = "GA for the TSP with worst-gene and collision crossovers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the GA once and report the best tour found.
    Solve(SolveArgs),
    /// Sweep instances × strategies × repetitions and summarise.
    Bench(BenchArgs),
    /// Print the closed-tour length of a `.tour` file.
    Eval(EvalArgs),
    /// Describe an instance.
    Info(InfoArgs),
}

/// Shared GA knobs.
#[derive(Debug, Clone, Args)]
pub struct GaArgs {
    /// Population size.
    #[arg(long, default_value_t = 100)]
    pub pop: usize,
    #[arg(long, default_value_t = 2000)]
    pub generations: usize,
    /// Crossover probability.
    #[arg(long, default_value_t = 0.83)]
    pub pc: f64,
    /// Mutation probability per offspring.
    #[arg(long, default_value_t = 0.02)]
    pub pm: f64,
    /// Operator pool for sbc/sac, e.g. `cowgc,cowlrgc,collision`.
    #[arg(long, value_delimiter = ',')]
    pub pool: Option<Vec<CrossoverKind>>,
}

impl GaArgs {
    fn strategy(&self, s: &StrategyKind) -> StrategyKind {
        match &self.pool {
            Some(pool) => s.clone().with_pool(pool.clone()),
            None => s.clone(),
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// TSPLIB file, `:figure2` or `:random:N[:SEED]`.
    #[arg(long)]
    pub instance: PathBuf,
    /// modified | pmx | cowgc | cowlrgc | collision | sbc | sac
    #[arg(long, default_value = "sbc")]
    pub strategy: StrategyKind,
    #[command(flatten)]
    pub ga: GaArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Convergence CSV output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Best tour in TSPLIB `.tour` format.
    #[arg(long)]
    pub tour_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub instances: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "sbc,sac,collision,pmx,modified")]
    pub strategies: Vec<StrategyKind>,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, default_value_t = 100)]
    pub pop: usize,
    #[arg(long, default_value_t = 8000)]
    pub generations: usize,
    #[arg(long, default_value_t = 1.0)]
    pub pc: f64,
    #[arg(long, default_value_t = 0.0)]
    pub pm: f64,
    #[arg(long, value_delimiter = ',')]
    pub pool: Option<Vec<CrossoverKind>>,
    /// Rep r of every cell uses seed base_seed + r.
    #[arg(long, default_value_t = 0)]
    pub base_seed: u64,
    /// Summary CSV output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Cells run concurrently on this many threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub tour: PathBuf,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    #[arg(long)]
    pub instance: PathBuf,
}

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

pub fn run<W: Write>(cli: Cli, out: &mut W) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => solve(args, out),
        Command::Bench(args) => bench(args, out),
        Command::Eval(args) => eval(args, out),
        Command::Info(args) => info(args, out),
    }
}

fn solve<W: Write>(args: SolveArgs, out: &mut W) -> Result<(), CliError> {
    let config = GaConfig {
        population_size: args.ga.pop,
        pc: args.ga.pc,
        pm: args.ga.pm,
        max_generations: args.ga.generations,
        strategy: args.ga.strategy(&args.strategy),
        seed: args.seed,
    };
    config.validate()?;
    let inst = load_instance(&args.instance)?;
    let record = run_ga(&inst, &config)?;
    if let Some(path) = &args.out {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        write_convergence(BufWriter::new(file), &record).map_err(|e| csv_to_io(path, e))?;
    }
    if let Some(path) = &args.tour_out {
        let name = instance_label(&inst, &args.instance);
        write_file(path, write_tour(&record.best_tour, &format!("{name}.{}.tour", config.strategy)).as_bytes())?;
    }
    writeln!(out, "{}", record.best_fitness).map_err(stdout_err)
}

fn bench<W: Write>(args: BenchArgs, out: &mut W) -> Result<(), CliError> {
    let strategies = args
        .strategies
        .iter()
        .map(|s| match &args.pool {
            Some(pool) => s.clone().with_pool(pool.clone()),
            None => s.clone(),
        })
        .collect();
    let plan = BenchPlan {
        instances: args.instances,
        strategies,
        reps: args.reps,
        base_seed: args.base_seed,
        population_size: args.pop,
        pc: args.pc,
        pm: args.pm,
        generations: args.generations,
    };
    let rows = run_plan(&plan, args.jobs)?;
    if let Some(path) = &args.csv {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        bench::write_rows(BufWriter::new(file), &rows).map_err(|e| csv_to_io(path, e))?;
    }
    write!(out, "{}", Pivot::from_rows(&rows)).map_err(stdout_err)
}

fn eval<W: Write>(args: EvalArgs, out: &mut W) -> Result<(), CliError> {
    let inst = load_instance(&args.instance)?;
    let tour = load_tour(&args.tour, inst.n())?;
    writeln!(out, "{}", tour_length(&inst, &tour)).map_err(stdout_err)
}

fn info<W: Write>(args: InfoArgs, out: &mut W) -> Result<(), CliError> {
    let inst = load_instance(&args.instance)?;
    let name = instance_label(&inst, &args.instance);
    let mut text = format!("name: {name}\nn: {}\nweight_type: {}\n", inst.n(), inst.weight_kind());
    if let Some(opt) = known_optimum(&name) {
        text.push_str(&format!("optimum: {opt}\n"));
    }
    out.write_all(text.as_bytes()).map_err(stdout_err)
}
