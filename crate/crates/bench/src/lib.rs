//! Shared fixtures for the criterion benchmarks.

use multicross_core::{Tour, TspInstance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A seeded random instance with two random parent tours.
pub fn fixture(n: usize, seed: u64) -> (TspInstance, Tour, Tour) {
    let inst = TspInstance::random_euc_2d(n, 1000, seed).expect("n >= 3");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p1 = Tour::random(n, &mut rng);
    let p2 = Tour::random(n, &mut rng);
    (inst, p1, p2)
}
