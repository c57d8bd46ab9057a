//! Instance × strategy × repetition sweeps.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use multicross_core::{known_optimum, run_ga, GaConfig, StrategyKind, TspInstance};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;
use crate::files::{instance_label, load_instance};

#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub instances: Vec<PathBuf>,
    pub strategies: Vec<StrategyKind>,
    pub reps: usize,
    pub base_seed: u64,
    pub population_size: usize,
    pub pc: f64,
    pub pm: f64,
    pub generations: usize,
}

impl BenchPlan {
    /// Seed of repetition `rep` in every cell.
    pub fn seed(&self, rep: usize) -> u64 {
        self.base_seed.wrapping_add(rep as u64)
    }

    fn config(&self, strategy: &StrategyKind, rep: usize) -> GaConfig {
        GaConfig {
            population_size: self.population_size,
            pc: self.pc,
            pm: self.pm,
            max_generations: self.generations,
            strategy: strategy.clone(),
            seed: self.seed(rep),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.instances.is_empty() || self.strategies.is_empty() || self.reps == 0 {
            return Err(CliError::Usage("bench needs instances, strategies and reps >= 1".into()));
        }
        for s in &self.strategies {
            self.config(s, 0).validate()?;
        }
        Ok(())
    }
}

/// One finished cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub strategy: String,
    pub seed: u64,
    pub best: f64,
    pub optimum: Option<f64>,
    pub elapsed_ms: u64,
    #[serde(skip)]
    pub ms_per_generation: f64,
}

fn run_cell(inst: &TspInstance, label: &str, plan: &BenchPlan, strategy: &StrategyKind, rep: usize) -> Result<BenchRow, CliError> {
    let config = plan.config(strategy, rep);
    let record = run_ga(inst, &config)?;
    let optimum = known_optimum(label).map(|v| v as f64);
    if let Some(opt) = optimum {
        if record.best_fitness < opt {
            return Err(CliError::BelowOptimum { instance: label.to_string(), best: record.best_fitness, optimum: opt });
        }
    }
    Ok(BenchRow {
        instance: label.to_string(),
        strategy: strategy.label().to_string(),
        seed: config.seed,
        best: record.best_fitness,
        optimum,
        elapsed_ms: record.total_ms,
        ms_per_generation: record.ms_per_generation(),
    })
}

/// Runs every cell on up to `jobs` threads. Rows come back in
/// (instance, strategy, rep) order whatever the completion order.
pub fn run_plan(plan: &BenchPlan, jobs: usize) -> Result<Vec<BenchRow>, CliError> {
    plan.validate()?;
    let instances = plan
        .instances
        .iter()
        .map(|p| load_instance(p).map(|inst| (instance_label(&inst, p), inst)))
        .collect::<Result<Vec<_>, _>>()?;

    let cells: Vec<(usize, usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..plan.strategies.len()).flat_map(move |s| (0..plan.reps).map(move |r| (i, s, r))))
        .collect();
    let work = |&(i, s, r): &(usize, usize, usize)| {
        let (label, inst) = &instances[i];
        let strategy = &plan.strategies[s];
        run_cell(inst, label, plan, strategy, r).map_err(|e| CliError::Cell {
            instance: label.clone(),
            strategy: strategy.label().to_string(),
            seed: plan.seed(r),
            source: Box::new(e),
        })
    };

    let results: Vec<Result<BenchRow, CliError>> = if jobs <= 1 {
        cells.iter().map(work).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(|| cells.par_iter().map(work).collect())
    };
    results.into_iter().collect()
}

/// Writes `instance,strategy,seed,best,optimum,elapsed_ms`.
pub fn write_rows<W: Write>(out: W, rows: &[BenchRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Mean best per (instance, strategy) with an `Average` row, the way the
/// comparison tables are laid out.
#[derive(Debug, Clone, PartialEq)]
pub struct Pivot {
    pub strategies: Vec<String>,
    pub instances: Vec<String>,
    pub optima: Vec<Option<f64>>,
    /// `mean_best[i][s]`
    pub mean_best: Vec<Vec<f64>>,
    pub average: Vec<f64>,
    pub ms_per_generation: Vec<f64>,
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

impl Pivot {
    pub fn from_rows(rows: &[BenchRow]) -> Self {
        let mut instances: Vec<String> = Vec::new();
        let mut strategies: Vec<String> = Vec::new();
        for r in rows {
            if !instances.contains(&r.instance) {
                instances.push(r.instance.clone());
            }
            if !strategies.contains(&r.strategy) {
                strategies.push(r.strategy.clone());
            }
        }
        let mean_best: Vec<Vec<f64>> = instances
            .iter()
            .map(|i| {
                strategies
                    .iter()
                    .map(|s| mean(rows.iter().filter(|r| &r.instance == i && &r.strategy == s).map(|r| r.best)))
                    .collect()
            })
            .collect();
        let average = (0..strategies.len()).map(|s| mean(mean_best.iter().map(|row| row[s]))).collect();
        let ms_per_generation = strategies
            .iter()
            .map(|s| mean(rows.iter().filter(|r| &r.strategy == s).map(|r| r.ms_per_generation)))
            .collect();
        let optima = instances
            .iter()
            .map(|i| rows.iter().find(|r| &r.instance == i).and_then(|r| r.optimum))
            .collect();
        Pivot { strategies, instances, optima, mean_best, average, ms_per_generation }
    }
}

impl fmt::Display for Pivot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = 12;
        write!(f, "{:<12}", "Problem")?;
        for s in &self.strategies {
            write!(f, "{s:>w$}")?;
        }
        writeln!(f, "{:>w$}", "Optimal")?;
        for (i, name) in self.instances.iter().enumerate() {
            write!(f, "{name:<12}")?;
            for v in &self.mean_best[i] {
                write!(f, "{v:>w$.1}")?;
            }
            match self.optima[i] {
                Some(o) => writeln!(f, "{o:>w$}")?,
                None => writeln!(f, "{:>w$}", "-")?,
            }
        }
        write!(f, "{:<12}", "Average")?;
        for v in &self.average {
            write!(f, "{v:>w$.1}")?;
        }
        writeln!(f, "{:>w$}", "-")?;
        write!(f, "{:<12}", "ms/gen")?;
        for v in &self.ms_per_generation {
            write!(f, "{v:>w$.3}")?;
        }
        writeln!(f, "{:>w$}", "-")
    }
}
