//! Generational GA loop with single-operator and multi-operator strategies.
//!
//! Every random decision inside a run comes from one seeded ChaCha stream,
//! consumed per crossover event in this order:
//!
//! 1. first parent index, 2. second parent index (redrawn while equal to
//!    the first),
//! 3. operator pick (SAC only),
//! 4. operator-internal draws, operator by operator in pool order,
//! 5. mutation coin for offspring 1, 6. its swap positions if the coin fired,
//! 7. mutation coin for offspring 2, 8. its swap positions if fired.
//!
//! Runs with equal instance and config are therefore identical apart from
//! wall-clock fields.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::crossover::CrossoverKind;
use crate::error::ConfigError;
use crate::instance::TspInstance;
use crate::tour::{Individual, Tour};

/// Operators tried by SBC and drawn from by SAC unless configured otherwise.
pub const DEFAULT_POOL: [CrossoverKind; 3] = [CrossoverKind::Cowgc, CrossoverKind::Cowlrgc, CrossoverKind::Collision];

/// How offspring are produced from a pair of parents.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// Always the same operator.
    Single(CrossoverKind),
    /// Select best crossover: run the whole pool and keep the two best new children.
    Sbc(Vec<CrossoverKind>),
    /// Select any crossover: one operator from the pool, uniformly at random.
    Sac(Vec<CrossoverKind>),
}

impl StrategyKind {
    pub fn sbc() -> Self {
        StrategyKind::Sbc(DEFAULT_POOL.to_vec())
    }

    pub fn sac() -> Self {
        StrategyKind::Sac(DEFAULT_POOL.to_vec())
    }

    /// Short label: the operator name, `sbc` or `sac`.
    pub fn label(&self) -> &'static str {
        match self {
            StrategyKind::Single(k) => k.as_str(),
            StrategyKind::Sbc(_) => "sbc",
            StrategyKind::Sac(_) => "sac",
        }
    }

    pub fn pool(&self) -> Option<&[CrossoverKind]> {
        match self {
            StrategyKind::Single(_) => None,
            StrategyKind::Sbc(p) | StrategyKind::Sac(p) => Some(p),
        }
    }

    /// Replaces the pool of a pooled strategy; single-operator strategies are unchanged.
    pub fn with_pool(self, pool: Vec<CrossoverKind>) -> Self {
        match self {
            StrategyKind::Single(k) => StrategyKind::Single(k),
            StrategyKind::Sbc(_) => StrategyKind::Sbc(pool),
            StrategyKind::Sac(_) => StrategyKind::Sac(pool),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(pool) = self.pool() {
            if pool.is_empty() {
                return Err(ConfigError::EmptyPool);
            }
            for (i, k) in pool.iter().enumerate() {
                if pool[..i].contains(k) {
                    return Err(ConfigError::DuplicateInPool(k.to_string()));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for StrategyKind {
    type Err = ConfigError;

    /// Accepts an operator name, `sbc` or `sac` (the latter two with the default pool).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sbc" => Ok(StrategyKind::sbc()),
            "sac" => Ok(StrategyKind::sac()),
            other => other
                .parse()
                .map(StrategyKind::Single)
                .map_err(|_| ConfigError::Unknown { what: "strategy", value: s.to_string() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    /// Crossover rate; each generation runs `round(pc * population_size / 2)` crossover events.
    pub pc: f64,
    /// Per-offspring probability of an exchange mutation.
    pub pm: f64,
    pub max_generations: usize,
    pub strategy: StrategyKind,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            pc: 0.83,
            pm: 0.02,
            max_generations: 2000,
            strategy: StrategyKind::sbc(),
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population_size < 4 {
            return Err(ConfigError::PopulationTooSmall(self.population_size));
        }
        for (name, value) in [("pc", self.pc), ("pm", self.pm)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::ProbabilityOutOfRange { name, value });
            }
        }
        if self.max_generations == 0 {
            return Err(ConfigError::NoGenerations);
        }
        self.strategy.validate()
    }

    /// Crossover events per generation.
    pub fn crossover_events(&self) -> usize {
        (self.pc * self.population_size as f64 / 2.0).round() as usize
    }
}

/// Individuals kept sorted by ascending fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    members: Vec<Individual>,
}

impl Population {
    /// Sorts `members` (stably) by fitness.
    pub fn new(mut members: Vec<Individual>) -> Self {
        members.sort_by(|a, b| a.fitness().total_cmp(&b.fitness()));
        Self { members }
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best(&self) -> &Individual {
        &self.members[0]
    }

    pub fn mean_fitness(&self) -> f64 {
        self.members.iter().map(Individual::fitness).sum::<f64>() / self.members.len() as f64
    }

    /// Exact positional match against any member.
    pub fn contains(&self, ind: &Individual) -> bool {
        let f = ind.fitness();
        let lo = self.members.partition_point(|m| m.fitness() < f);
        self.members[lo..]
            .iter()
            .take_while(|m| m.fitness() == f)
            .any(|m| m.tour() == ind.tour())
    }

    /// (μ+λ) truncation: keeps the best `len()` of members and offspring.
    /// Equal fitness favours incumbents, then earlier offspring.
    pub fn survive(&mut self, offspring: Vec<Individual>) {
        let size = self.members.len();
        self.members.extend(offspring);
        self.members.sort_by(|a, b| a.fitness().total_cmp(&b.fitness()));
        self.members.truncate(size);
    }
}

/// `size` uniformly random tours, evaluated and sorted.
pub fn init_population<R: Rng + ?Sized>(inst: &TspInstance, size: usize, rng: &mut R) -> Population {
    let members = (0..size).map(|_| Individual::new(inst, Tour::random(inst.n(), rng))).collect();
    Population::new(members)
}

/// Swaps the cities at two distinct, uniformly chosen positions.
pub fn exchange_mutation<R: Rng + ?Sized>(tour: &Tour, rng: &mut R) -> Tour {
    assert!(tour.len() >= 2, "exchange mutation needs two genes");
    let picks = index::sample(rng, tour.len(), 2);
    let mut out = tour.clone();
    out.swap(picks.index(0), picks.index(1));
    out
}

fn sbc_select<R: Rng + ?Sized>(
    inst: &TspInstance,
    p1: &Tour,
    p2: &Tour,
    pool: &[CrossoverKind],
    population: &Population,
    rng: &mut R,
) -> [Individual; 2] {
    let mut candidates = Vec::with_capacity(2 * pool.len());
    for &op in pool {
        let (a, b) = op.apply(inst, p1, p2, rng);
        candidates.push(Individual::new(inst, a));
        candidates.push(Individual::new(inst, b));
    }
    let mut ranked: Vec<usize> = (0..candidates.len()).collect();
    ranked.sort_by(|&a, &b| candidates[a].fitness().total_cmp(&candidates[b].fitness()));

    let mut chosen: Vec<usize> = Vec::with_capacity(2);
    for &i in &ranked {
        if chosen.len() == 2 {
            break;
        }
        let c = &candidates[i];
        if population.contains(c) || chosen.iter().any(|&j| candidates[j].tour() == c.tour()) {
            continue;
        }
        chosen.push(i);
    }
    // not enough fresh children: top up with the best of the rest
    for &i in &ranked {
        if chosen.len() == 2 {
            break;
        }
        if !chosen.contains(&i) {
            chosen.push(i);
        }
    }
    // ranked order is fitness order
    chosen.sort_by_key(|&i| ranked.iter().position(|&r| r == i));
    let mut slots: Vec<Option<Individual>> = candidates.into_iter().map(Some).collect();
    [slots[chosen[0]].take().unwrap(), slots[chosen[1]].take().unwrap()]
}

/// Select-best-crossover step: every pool operator is applied to the same
/// parents and the two fittest children not already in `population` (and
/// distinct from each other) are returned, best first.
pub fn sbc_step<R: Rng + ?Sized>(
    inst: &TspInstance,
    p1: &Tour,
    p2: &Tour,
    pool: &[CrossoverKind],
    population: &Population,
    rng: &mut R,
) -> (Tour, Tour) {
    assert!(!pool.is_empty(), "empty operator pool");
    let [a, b] = sbc_select(inst, p1, p2, pool, population, rng);
    (a.into_tour(), b.into_tour())
}

fn sac_pick<R: Rng + ?Sized>(pool: &[CrossoverKind], rng: &mut R) -> CrossoverKind {
    pool[rng.gen_range(0..pool.len())]
}

/// Select-any-crossover step: one operator drawn uniformly from the pool.
pub fn sac_step<R: Rng + ?Sized>(
    inst: &TspInstance,
    p1: &Tour,
    p2: &Tour,
    pool: &[CrossoverKind],
    rng: &mut R,
) -> (Tour, Tour) {
    assert!(!pool.is_empty(), "empty operator pool");
    sac_pick(pool, rng).apply(inst, p1, p2, rng)
}

/// One row of the convergence trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
    /// Milliseconds since the run started.
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// Generation 0 is the initial population, followed by one row per generation.
    pub per_generation: Vec<GenerationStats>,
    pub best_tour: Tour,
    pub best_fitness: f64,
    pub total_ms: u64,
    pub operator_invocations: BTreeMap<CrossoverKind, u64>,
}

impl RunRecord {
    /// Mean wall-clock milliseconds per generation (initialisation excluded).
    pub fn ms_per_generation(&self) -> f64 {
        let gens = self.per_generation.len().saturating_sub(1).max(1);
        let init = self.per_generation.first().map_or(0, |g| g.elapsed_ms);
        self.total_ms.saturating_sub(init) as f64 / gens as f64
    }

    pub fn total_invocations(&self) -> u64 {
        self.operator_invocations.values().sum()
    }
}

/// Runs the GA for exactly `config.max_generations` generations.
pub fn run_ga(inst: &TspInstance, config: &GaConfig) -> Result<RunRecord, ConfigError> {
    config.validate()?;
    let start = Instant::now();
    let elapsed = || start.elapsed().as_millis() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let size = config.population_size;
    let events = config.crossover_events();

    let mut population = init_population(inst, size, &mut rng);
    let mut trace = Vec::with_capacity(config.max_generations + 1);
    let mut invocations: BTreeMap<CrossoverKind, u64> = BTreeMap::new();
    trace.push(GenerationStats {
        generation: 0,
        best: population.best().fitness(),
        mean: population.mean_fitness(),
        elapsed_ms: elapsed(),
    });

    for generation in 1..=config.max_generations {
        let mut offspring = Vec::with_capacity(2 * events);
        for _ in 0..events {
            let i = rng.gen_range(0..size);
            let j = loop {
                let j = rng.gen_range(0..size);
                if j != i {
                    break j;
                }
            };
            let p1 = population.members()[i].tour();
            let p2 = population.members()[j].tour();
            let (c1, c2) = match &config.strategy {
                StrategyKind::Single(op) => {
                    *invocations.entry(*op).or_default() += 1;
                    op.apply(inst, p1, p2, &mut rng)
                }
                StrategyKind::Sac(pool) => {
                    let op = sac_pick(pool, &mut rng);
                    *invocations.entry(op).or_default() += 1;
                    op.apply(inst, p1, p2, &mut rng)
                }
                StrategyKind::Sbc(pool) => {
                    for op in pool {
                        *invocations.entry(*op).or_default() += 1;
                    }
                    let [a, b] = sbc_select(inst, p1, p2, pool, &population, &mut rng);
                    (a.into_tour(), b.into_tour())
                }
            };
            for child in [c1, c2] {
                let child = if rng.gen_bool(config.pm) { exchange_mutation(&child, &mut rng) } else { child };
                offspring.push(Individual::new(inst, child));
            }
        }
        population.survive(offspring);
        trace.push(GenerationStats {
            generation,
            best: population.best().fitness(),
            mean: population.mean_fitness(),
            elapsed_ms: elapsed(),
        });
    }

    let best = population.best();
    Ok(RunRecord {
        best_fitness: best.fitness(),
        best_tour: best.tour().clone(),
        per_generation: trace,
        total_ms: elapsed(),
        operator_invocations: invocations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::figure2_instance;
    use crate::tour::is_permutation;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn config_validation() {
        let ok = GaConfig::default();
        assert!(ok.validate().is_ok());
        assert_eq!(ok.crossover_events(), 42);
        let bad = GaConfig { population_size: 3, ..ok.clone() };
        assert_eq!(bad.validate(), Err(ConfigError::PopulationTooSmall(3)));
        let bad = GaConfig { pc: 1.5, ..ok.clone() };
        assert!(matches!(bad.validate(), Err(ConfigError::ProbabilityOutOfRange { name: "pc", .. })));
        let bad = GaConfig { pm: -0.1, ..ok.clone() };
        assert!(matches!(bad.validate(), Err(ConfigError::ProbabilityOutOfRange { name: "pm", .. })));
        let bad = GaConfig { max_generations: 0, ..ok.clone() };
        assert_eq!(bad.validate(), Err(ConfigError::NoGenerations));
        let bad = GaConfig { strategy: StrategyKind::Sbc(vec![]), ..ok.clone() };
        assert_eq!(bad.validate(), Err(ConfigError::EmptyPool));
        let dup = vec![CrossoverKind::Pmx, CrossoverKind::Pmx];
        let bad = GaConfig { strategy: StrategyKind::Sac(dup), ..ok };
        assert!(matches!(bad.validate(), Err(ConfigError::DuplicateInPool(_))));
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("sbc".parse::<StrategyKind>().unwrap(), StrategyKind::sbc());
        assert_eq!("SAC".parse::<StrategyKind>().unwrap(), StrategyKind::sac());
        assert_eq!("pmx".parse::<StrategyKind>().unwrap(), StrategyKind::Single(CrossoverKind::Pmx));
        assert!("best".parse::<StrategyKind>().is_err());
    }

    #[test]
    fn init_population_small() {
        let inst = TspInstance::random_euc_2d(3, 10, 1).unwrap();
        let pop = init_population(&inst, 4, &mut rng(3));
        assert_eq!(pop.len(), 4);
        for m in pop.members() {
            assert!(is_permutation(m.tour()));
        }
        assert_eq!(pop, init_population(&inst, 4, &mut rng(3)));
        assert!(pop.members().windows(2).all(|w| w[0].fitness() <= w[1].fitness()));
    }

    #[test]
    fn mutation_swaps_two_positions() {
        let two = Tour::identity(2);
        assert_eq!(exchange_mutation(&two, &mut rng(0)).as_slice(), &[1, 0]);
        let t = Tour::random(30, &mut rng(4));
        let m = exchange_mutation(&t, &mut rng(9));
        assert!(is_permutation(&m));
        assert_eq!(t.iter().zip(m.iter()).filter(|(a, b)| a != b).count(), 2);
        assert_eq!(m, exchange_mutation(&t, &mut rng(9)));
    }

    #[test]
    fn survival_prefers_incumbents_on_ties() {
        let inst = figure2_instance();
        let a = Individual::new(&inst, Tour::identity(9));
        let mut rev = Tour::identity(9).into_vec();
        rev.reverse();
        let b = Individual::new(&inst, Tour::new(rev).unwrap());
        assert_eq!(a.fitness(), b.fitness());
        let others: Vec<Individual> = (0..3).map(|s| Individual::new(&inst, Tour::random(9, &mut rng(s)))).collect();
        let mut pop = Population::new(vec![a.clone(); 1].into_iter().chain(others).collect());
        let before = pop.len();
        pop.survive(vec![b.clone()]);
        assert_eq!(pop.len(), before);
        let first_tie = pop.members().iter().position(|m| m.fitness() == a.fitness()).unwrap();
        assert_eq!(pop.members()[first_tie].tour(), a.tour());
    }

    #[test]
    fn population_contains_is_positional() {
        let inst = figure2_instance();
        let a = Individual::new(&inst, Tour::identity(9));
        let mut rot = Tour::identity(9).into_vec();
        rot.rotate_left(1);
        let rotated = Individual::new(&inst, Tour::new(rot).unwrap());
        let pop = Population::new(vec![a.clone(); 4]);
        assert!(pop.contains(&a));
        assert!(!pop.contains(&rotated));
    }

    #[test]
    fn sbc_single_operator_pool_returns_ranked_children() {
        let inst = figure2_instance();
        let mut r = rng(8);
        let pop = init_population(&inst, 6, &mut r);
        let p = Tour::random(9, &mut r);
        let q = Tour::random(9, &mut r);
        let (a, b) = sbc_step(&inst, &p, &q, &[CrossoverKind::Cowgc], &pop, &mut r);
        let (x, y) = crate::crossover::cowgc(&inst, &p, &q);
        let mut expect = [Individual::new(&inst, x), Individual::new(&inst, y)];
        expect.sort_by(|u, v| u.fitness().total_cmp(&v.fitness()));
        if expect[0].fitness() != expect[1].fitness() {
            assert_eq!(&a, expect[0].tour());
            assert_eq!(&b, expect[1].tour());
        }
    }

    #[test]
    fn sbc_skips_children_already_in_population() {
        let inst = figure2_instance();
        let p = Tour::random(9, &mut rng(1));
        // cowgc on identical parents yields the parent twice; it is in the population
        let pop = Population::new(vec![Individual::new(&inst, p.clone()); 4]);
        let (a, b) = sbc_step(&inst, &p, &p, &[CrossoverKind::Cowgc], &pop, &mut rng(0));
        assert_eq!((&a, &b), (&p, &p));
    }

    #[test]
    fn sbc_returns_best_fresh_candidates() {
        let inst = TspInstance::random_euc_2d(12, 50, 4).unwrap();
        let pool = CrossoverKind::ALL;
        let mut r = rng(21);
        for _ in 0..300 {
            let pop = init_population(&inst, 5, &mut r);
            let p = pop.members()[r.gen_range(0..5)].tour().clone();
            let q = pop.members()[r.gen_range(0..5)].tour().clone();
            // replay the candidate generation on a cloned stream
            let mut replay = r.clone();
            let mut cands = Vec::new();
            for op in pool {
                let (a, b) = op.apply(&inst, &p, &q, &mut replay);
                cands.push(Individual::new(&inst, a));
                cands.push(Individual::new(&inst, b));
            }
            let (a, b) = sbc_step(&inst, &p, &q, &pool, &pop, &mut r);
            assert_eq!(r, replay);
            let fresh: Vec<&Individual> = cands.iter().filter(|c| !pop.contains(c)).collect();
            let fa = Individual::new(&inst, a.clone());
            let fb = Individual::new(&inst, b.clone());
            assert!(fa.fitness() <= fb.fitness());
            if let Some(best_fresh) = fresh.iter().map(|c| c.fitness()).reduce(f64::min) {
                let fresh_pick = [&fa, &fb].into_iter().find(|x| !pop.contains(x)).unwrap();
                assert_eq!(fresh_pick.fitness(), best_fresh);
            }
            let distinct_fresh = {
                let mut ts: Vec<&Tour> = fresh.iter().map(|c| c.tour()).collect();
                ts.sort();
                ts.dedup();
                ts.len()
            };
            if distinct_fresh >= 2 {
                assert!(!pop.contains(&fb));
                assert_ne!(a, b);
            }
        }
    }

    #[test]
    fn sac_pool_of_one() {
        let inst = figure2_instance();
        let p = Tour::random(9, &mut rng(1));
        let q = Tour::random(9, &mut rng(2));
        let got = sac_step(&inst, &p, &q, &[CrossoverKind::Cowlrgc], &mut rng(3));
        assert_eq!(got, crate::crossover::cowlrgc(&inst, &p, &q));
    }

    #[test]
    fn sac_picks_uniformly() {
        let pool = DEFAULT_POOL;
        let mut r = rng(11);
        let mut counts = [0usize; 3];
        for _ in 0..10_000 {
            let k = sac_pick(&pool, &mut r);
            counts[pool.iter().position(|&p| p == k).unwrap()] += 1;
        }
        for c in counts {
            let f = c as f64 / 10_000.0;
            assert!((0.30..=0.37).contains(&f), "{counts:?}");
        }
    }

    #[test]
    fn frozen_population_without_variation() {
        let inst = TspInstance::random_euc_2d(12, 100, 5).unwrap();
        let config = GaConfig {
            population_size: 10,
            pc: 0.0,
            pm: 0.0,
            max_generations: 20,
            strategy: StrategyKind::Single(CrossoverKind::Pmx),
            seed: 1,
        };
        let rec = run_ga(&inst, &config).unwrap();
        assert_eq!(rec.per_generation.len(), 21);
        assert!(rec.per_generation.iter().all(|g| g.best == rec.per_generation[0].best));
        assert!(rec.per_generation.iter().all(|g| g.mean == rec.per_generation[0].mean));
        assert!(rec.operator_invocations.is_empty());
    }

    #[test]
    fn invocation_counts() {
        let inst = TspInstance::random_euc_2d(15, 100, 5).unwrap();
        let base = GaConfig {
            population_size: 10,
            pc: 0.8,
            pm: 0.1,
            max_generations: 7,
            strategy: StrategyKind::Single(CrossoverKind::Collision),
            seed: 3,
        };
        let single = run_ga(&inst, &base).unwrap();
        assert_eq!(single.operator_invocations.len(), 1);
        assert_eq!(single.operator_invocations[&CrossoverKind::Collision], 4 * 7);
        let sbc = run_ga(&inst, &GaConfig { strategy: StrategyKind::sbc(), ..base.clone() }).unwrap();
        let sac = run_ga(&inst, &GaConfig { strategy: StrategyKind::sac(), ..base }).unwrap();
        assert_eq!(sbc.total_invocations(), 3 * sac.total_invocations());
        assert_eq!(sbc.best_fitness, sbc.per_generation.last().unwrap().best);
    }

    #[test]
    fn equal_seeds_equal_runs() {
        let inst = TspInstance::random_euc_2d(20, 100, 2).unwrap();
        for strategy in ["modified", "pmx", "cowgc", "cowlrgc", "collision", "sbc", "sac"] {
            let config = GaConfig {
                population_size: 12,
                pc: 0.9,
                pm: 0.2,
                max_generations: 15,
                strategy: strategy.parse().unwrap(),
                seed: 99,
            };
            let a = run_ga(&inst, &config).unwrap();
            let b = run_ga(&inst, &config).unwrap();
            let strip = |r: &RunRecord| r.per_generation.iter().map(|g| (g.best, g.mean)).collect::<Vec<_>>();
            assert_eq!(strip(&a), strip(&b), "{strategy}");
            assert_eq!(a.best_tour, b.best_tour);
            assert!(a.per_generation.windows(2).all(|w| w[1].best <= w[0].best));
        }
    }
}
