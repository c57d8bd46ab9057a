//! Tours, fitness, and the per-gene cost analytics used by the
//! worst-gene and collision crossovers.

use std::ops::Deref;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::TourError;
use crate::instance::TspInstance;

/// A permutation of the city indices `0..n` in visiting order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tour(Vec<usize>);

impl Tour {
    /// Validates that `order` is a permutation of `0..order.len()`.
    pub fn new(order: Vec<usize>) -> Result<Self, TourError> {
        let n = order.len();
        Self::with_len(order, n)
    }

    /// Validates that `order` is a permutation of `0..n`.
    pub fn with_len(order: Vec<usize>, n: usize) -> Result<Self, TourError> {
        if order.len() != n {
            return Err(TourError::WrongLength { expected: n, found: order.len() });
        }
        let mut seen = vec![false; n];
        for &c in &order {
            match seen.get_mut(c) {
                None => return Err(TourError::OutOfRange(c)),
                Some(true) => return Err(TourError::Duplicate(c)),
                Some(s) => *s = true,
            }
        }
        Ok(Tour(order))
    }

    pub fn identity(n: usize) -> Self {
        Tour((0..n).collect())
    }

    /// A uniformly random permutation (Fisher–Yates).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        Tour(order)
    }

    /// Callers guarantee `order` is a permutation.
    pub(crate) fn from_vec_unchecked(order: Vec<usize>) -> Self {
        debug_assert!(is_permutation(&order), "not a permutation: {order:?}");
        Tour(order)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Swaps the cities at positions `i` and `j`.
    pub fn swap(&mut self, i: usize, j: usize) {
        self.0.swap(i, j);
    }
}

impl Deref for Tour {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl TryFrom<Vec<usize>> for Tour {
    type Error = TourError;

    fn try_from(order: Vec<usize>) -> Result<Self, TourError> {
        Tour::new(order)
    }
}

/// True if `order` contains each of `0..order.len()` exactly once.
pub fn is_permutation(order: &[usize]) -> bool {
    let mut seen = vec![false; order.len()];
    order.iter().all(|&c| match seen.get_mut(c) {
        Some(s) if !*s => {
            *s = true;
            true
        }
        _ => false,
    })
}

/// Closed-cycle length: every consecutive edge plus the edge back to the start.
pub fn tour_length(inst: &TspInstance, tour: &[usize]) -> f64 {
    let Some((&first, _)) = tour.split_first() else {
        return 0.0;
    };
    let open: u64 = tour.windows(2).map(|w| inst.distance(w[0], w[1])).sum();
    (open + inst.distance(tour[tour.len() - 1], first)) as f64
}

/// Sum of the `n - 1` path edges, without the closing edge.
pub fn open_path_length(inst: &TspInstance, tour: &[usize]) -> u64 {
    tour.windows(2).map(|w| inst.distance(w[0], w[1])).sum()
}

/// A gene position and the cost that made it the worst one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorstGene {
    /// Position of the gene in the tour.
    pub index: usize,
    pub cost: u64,
}

/// The gene at the far end of the longest path edge.
///
/// Scans edges `(t[i], t[i+1])` for `i` in `0..n-1`; the closing edge is not
/// considered. Returns the position `i + 1` of the longest edge, lowest
/// position on ties.
pub fn worst_gene_edge(inst: &TspInstance, tour: &[usize]) -> WorstGene {
    assert!(tour.len() >= 2, "need at least two genes");
    let mut best = WorstGene { index: 1, cost: inst.distance(tour[0], tour[1]) };
    for i in 1..tour.len() - 1 {
        let d = inst.distance(tour[i], tour[i + 1]);
        if d > best.cost {
            best = WorstGene { index: i + 1, cost: d };
        }
    }
    best
}

/// The interior gene with the largest left + right neighbour distance.
///
/// Only positions `1..n-1` are considered; lowest position wins ties.
pub fn worst_gene_lr(inst: &TspInstance, tour: &[usize]) -> WorstGene {
    assert!(tour.len() >= 3, "need at least three genes");
    let mut best: Option<WorstGene> = None;
    for i in 1..tour.len() - 1 {
        let sum = inst.distance(tour[i], tour[i - 1]) + inst.distance(tour[i], tour[i + 1]);
        if best.is_none_or(|b| sum > b.cost) {
            best = Some(WorstGene { index: i, cost: sum });
        }
    }
    best.expect("at least one interior gene")
}

/// Per-position mass: distance to the left neighbour plus distance to the
/// right neighbour, with the two endpoints having only one neighbour each.
pub fn gene_masses(inst: &TspInstance, tour: &[usize]) -> Vec<f64> {
    let n = tour.len();
    let mut masses = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let d = inst.distance(tour[i], tour[i + 1]) as f64;
        masses[i] += d;
        masses[i + 1] += d;
    }
    masses
}

/// A tour with its cached closed-cycle length.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    tour: Tour,
    fitness: f64,
}

impl Individual {
    pub fn new(inst: &TspInstance, tour: Tour) -> Self {
        let fitness = tour_length(inst, &tour);
        Self { tour, fitness }
    }

    pub fn tour(&self) -> &Tour {
        &self.tour
    }

    pub fn fitness(&self) -> f64 {
        self.fitness
    }

    pub fn into_tour(self) -> Tour {
        self.tour
    }
}
