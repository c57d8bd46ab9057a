//! Symmetric TSP instances and their integer distance functions.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::InstanceError;

/// How edge weights are obtained for an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightKind {
    /// Rounded Euclidean distance between node coordinates.
    Euc2d,
    /// Pseudo-Euclidean distance used by the `att*` instances.
    Att,
    /// Distances listed explicitly in the file.
    Explicit,
}

impl WeightKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightKind::Euc2d => "EUC_2D",
            WeightKind::Att => "ATT",
            WeightKind::Explicit => "EXPLICIT",
        }
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Nearest integer, rounding halves up (`(int)(x + 0.5)` for non-negative x).
fn nint(x: f64) -> u64 {
    (x + 0.5).floor() as u64
}

/// `EUC_2D` distance: the Euclidean distance rounded to the nearest integer.
pub fn euc_2d(a: (f64, f64), b: (f64, f64)) -> u64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    nint((dx * dx + dy * dy).sqrt())
}

/// `ATT` pseudo-Euclidean distance.
pub fn att(a: (f64, f64), b: (f64, f64)) -> u64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    let r = ((dx * dx + dy * dy) / 10.0).sqrt();
    let t = nint(r);
    if (t as f64) < r {
        t + 1
    } else {
        t
    }
}

/// An immutable symmetric TSP instance.
///
/// Coordinate instances carry `coords`, explicit ones carry the weight
/// matrix. A dense distance table is built once at construction so that
/// [`TspInstance::distance`] is a lookup regardless of the weight kind.
#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    name: String,
    weight_kind: WeightKind,
    coords: Option<Vec<(f64, f64)>>,
    matrix: Option<Vec<Vec<u64>>>,
    table: Vec<u64>,
    n: usize,
}

impl TspInstance {
    /// Builds a coordinate-based instance (`EUC_2D` or `ATT`).
    pub fn from_coords(
        name: impl Into<String>,
        weight_kind: WeightKind,
        coords: Vec<(f64, f64)>,
    ) -> Result<Self, InstanceError> {
        let metric: fn((f64, f64), (f64, f64)) -> u64 = match weight_kind {
            WeightKind::Euc2d => euc_2d,
            WeightKind::Att => att,
            WeightKind::Explicit => return Err(InstanceError::CoordsForExplicit),
        };
        let n = coords.len();
        if n < 3 {
            return Err(InstanceError::TooFewCities(n));
        }
        if let Some(i) = coords.iter().position(|&(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(InstanceError::NonFiniteCoordinate(i));
        }
        let mut table = vec![0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = metric(coords[i], coords[j]);
                table[i * n + j] = d;
                table[j * n + i] = d;
            }
        }
        Ok(Self {
            name: name.into(),
            weight_kind,
            coords: Some(coords),
            matrix: None,
            table,
            n,
        })
    }

    /// Builds an `EXPLICIT` instance from a full square matrix.
    ///
    /// The matrix must be square, symmetric and have a zero diagonal.
    pub fn from_matrix(name: impl Into<String>, matrix: Vec<Vec<u64>>) -> Result<Self, InstanceError> {
        let n = matrix.len();
        if n < 3 {
            return Err(InstanceError::TooFewCities(n));
        }
        if let Some(row) = matrix.iter().position(|r| r.len() != n) {
            return Err(InstanceError::RaggedMatrix { row, len: matrix[row].len(), n });
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in matrix.iter().enumerate() {
            if row[i] != 0 {
                return Err(InstanceError::NonZeroDiagonal(i));
            }
            for (j, &d) in row.iter().enumerate() {
                if d != matrix[j][i] {
                    return Err(InstanceError::Asymmetric(i, j));
                }
                table.push(d);
            }
        }
        Ok(Self {
            name: name.into(),
            weight_kind: WeightKind::Explicit,
            coords: None,
            matrix: Some(matrix),
            table,
            n,
        })
    }

    /// Uniformly random `EUC_2D` cities on an integer grid `[0, side)²`.
    pub fn random_euc_2d(n: usize, side: u32, seed: u64) -> Result<Self, InstanceError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let side = side.max(1);
        let coords = (0..n)
            .map(|_| (rng.gen_range(0..side) as f64, rng.gen_range(0..side) as f64))
            .collect();
        Self::from_coords(format!("random{n}-{seed}"), WeightKind::Euc2d, coords)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of cities.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight_kind(&self) -> WeightKind {
        self.weight_kind
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    pub fn matrix(&self) -> Option<&[Vec<u64>]> {
        self.matrix.as_deref()
    }

    /// Distance between cities `i` and `j`, or an error when either index is out of range.
    pub fn try_distance(&self, i: usize, j: usize) -> Result<u64, InstanceError> {
        if i >= self.n || j >= self.n {
            return Err(InstanceError::CityOutOfRange { index: i.max(j), n: self.n });
        }
        Ok(self.table[i * self.n + j])
    }

    /// Distance between cities `i` and `j`.
    ///
    /// Panics if either index is `>= n`; use [`TspInstance::try_distance`] for
    /// unchecked input.
    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> u64 {
        assert!(i < self.n && j < self.n, "city index out of range");
        self.table[i * self.n + j]
    }
}

/// Upper triangle of the nine-city worked-example distance table, rows 1..8.
const FIGURE2_UPPER: [&[u64]; 8] = [
    &[2, 8, 5, 20, 6, 25, 30, 4],
    &[5, 3, 15, 8, 52, 21, 12],
    &[27, 6, 10, 20, 14, 7],
    &[8, 4, 17, 60, 2],
    &[22, 6, 8, 5],
    &[15, 6, 8],
    &[10, 9],
    &[30],
];

/// The built-in nine-city `EXPLICIT` instance used by the worked examples.
///
/// Cities labelled 1..9 in the original table map to indices 0..8.
pub fn figure2_instance() -> TspInstance {
    let n = 9;
    let mut matrix = vec![vec![0u64; n]; n];
    for (i, row) in FIGURE2_UPPER.iter().enumerate() {
        for (k, &d) in row.iter().enumerate() {
            let j = i + 1 + k;
            matrix[i][j] = d;
            matrix[j][i] = d;
        }
    }
    TspInstance::from_matrix("figure2", matrix).expect("embedded matrix is valid")
}

/// Published optimal tour lengths for the benchmark instances.
pub const KNOWN_OPTIMA: [(&str, u64); 11] = [
    ("rat783", 8806),
    ("a280", 2579),
    ("u159", 42080),
    ("ch130", 6110),
    ("bier127", 118282),
    ("kroA100", 21282),
    ("pr76", 108159),
    ("berlin52", 7542),
    ("att48", 10628),
    ("eil51", 426),
    ("pr144", 58537),
];

/// Looks up the known optimum by instance name (exact, case-sensitive).
pub fn known_optimum(name: &str) -> Option<u64> {
    KNOWN_OPTIMA.iter().find(|(k, _)| *k == name).map(|&(_, v)| v)
}
