//! Genetic algorithm for the symmetric TSP built around worst-gene and
//! elastic-collision crossovers, plus the SBC/SAC multi-operator strategies.
//!
//! Module map:
//! - [`instance`]: instances and TSPLIB distance conventions
//! - [`tsplib`]: instance and tour file I/O
//! - [`tour`]: tours, fitness, worst-gene and gene-mass analytics
//! - [`crossover`]: the five crossover operators
//! - [`engine`]: the generational loop and strategies

pub mod crossover;
pub mod engine;
pub mod error;
pub mod instance;
pub mod tour;
pub mod tsplib;

pub use crossover::{CrossoverKind, CutChoice, ParentSide};
pub use engine::{run_ga, GaConfig, GenerationStats, Population, RunRecord, StrategyKind};
pub use error::{ConfigError, CrossoverError, InstanceError, ParseError, ParseErrorKind, TourError};
pub use instance::{figure2_instance, known_optimum, TspInstance, WeightKind};
pub use tour::{tour_length, Individual, Tour};
pub use tsplib::{parse_instance, parse_tour, write_tour};
