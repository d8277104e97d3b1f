//! Attack-to-output transfer matrix and its normal rank.
//!
//! `G(z) = C (zI - A)^-1 B_a + D_a`, with columns ordered actuators first,
//! then unprotected sensors. The normal rank is estimated as the largest
//! numeric rank over a few random points of the complex plane.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{ComponentSet, Realization, StructuralModel};

pub type ComplexMatrix = DMatrix<Complex64>;

pub const SAMPLE_POINTS: usize = 3;
pub const SAMPLE_MODULUS: (f64, f64) = (1.1, 2.5);
/// Relative pivot threshold of the rank test.
pub const RANK_TOLERANCE: f64 = 1e-9;
/// Minimum distance kept between a sample point and the spectrum of `A`.
const EIGEN_CLEARANCE: f64 = 0.05;
const MAX_DRAWS: usize = 10_000;

/// Evaluates `G(z)`. Fails with [`Error::SingularPencil`] when `z` is (close
/// to) an eigenvalue of `A`.
pub fn eval_g(m: &StructuralModel, r: &Realization, z: Complex64) -> Result<ComplexMatrix> {
    let n = m.n_x();
    let (n_u, n_y) = (m.n_u(), m.n_y());
    let rows = m.sensor_count();
    let pencil = ComplexMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { z } else { Complex64::new(0.0, 0.0) };
        diag - Complex64::new(r.a[(i, j)], 0.0)
    });
    let scale = pencil.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let lu = pencil.lu();
    let u = lu.u();
    if (0..n).any(|i| u[(i, i)].norm() <= 1e-12 * scale) {
        return Err(Error::SingularPencil);
    }
    let b = r.b.map(|v| Complex64::new(v, 0.0));
    let x = lu.solve(&b).ok_or(Error::SingularPencil)?;
    let c = r.c.map(|v| Complex64::new(v, 0.0));
    let gu = c * x;

    let mut g = ComplexMatrix::zeros(rows, n_u + n_y);
    g.view_mut((0, 0), (rows, n_u)).copy_from(&gu);
    for l in 0..n_y {
        g[(l, n_u + l)] = Complex64::new(1.0, 0.0);
    }
    Ok(g)
}

/// Columns of `G` selected by an attack set.
pub fn column_indices(m: &StructuralModel, set: &ComponentSet) -> Vec<usize> {
    set.actuators
        .iter()
        .copied()
        .chain(set.sensors.iter().map(|&l| m.n_u() + l))
        .collect()
}

/// Outcome of a numeric rank test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankEval {
    pub rank: usize,
    /// Some pivot fell within a factor 10 of the threshold.
    pub borderline: bool,
}

/// Numeric rank by Gaussian elimination with partial pivoting. A pivot
/// counts when it exceeds `1e-9 * max(1, max |entry|)`.
pub fn numeric_rank(mat: &ComplexMatrix) -> RankEval {
    let (rows, cols) = mat.shape();
    if rows == 0 || cols == 0 {
        return RankEval {
            rank: 0,
            borderline: false,
        };
    }
    let largest = mat.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let threshold = RANK_TOLERANCE * largest.max(1.0);
    let mut work = mat.clone();
    let mut rank = 0;
    let mut borderline = false;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let (pivot_row, pivot) = (rank..rows)
            .map(|i| (i, work[(i, col)].norm()))
            .fold((rank, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot >= threshold / 10.0 && pivot <= threshold * 10.0 {
            borderline = true;
        }
        if pivot <= threshold {
            continue;
        }
        work.swap_rows(rank, pivot_row);
        let head = work[(rank, col)];
        for i in rank + 1..rows {
            let factor = work[(i, col)] / head;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in col..cols {
                let delta = factor * work[(rank, j)];
                work[(i, j)] -= delta;
            }
        }
        rank += 1;
    }
    RankEval { rank, borderline }
}

/// `G` evaluated at a fixed set of sample points, reused across many
/// column subsets.
#[derive(Debug, Clone)]
pub struct TransferSamples {
    points: Vec<Complex64>,
    values: Vec<ComplexMatrix>,
    n_u: usize,
}

impl TransferSamples {
    /// Draws [`SAMPLE_POINTS`] points away from the spectrum of `A`,
    /// deterministically in `seed`.
    pub fn new(m: &StructuralModel, r: &Realization, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eigs = r.a.complex_eigenvalues();
        let mut points = Vec::with_capacity(SAMPLE_POINTS);
        let mut values = Vec::with_capacity(SAMPLE_POINTS);
        for _ in 0..MAX_DRAWS {
            if points.len() == SAMPLE_POINTS {
                break;
            }
            let modulus = rng.gen_range(SAMPLE_MODULUS.0..=SAMPLE_MODULUS.1);
            let phase = rng.gen_range(0.0..TAU);
            let z = Complex64::from_polar(modulus, phase);
            if eigs.iter().any(|&l| (z - l).norm() < EIGEN_CLEARANCE) {
                continue;
            }
            if let Ok(g) = eval_g(m, r, z) {
                points.push(z);
                values.push(g);
            }
        }
        assert_eq!(
            points.len(),
            SAMPLE_POINTS,
            "could not find sample points clear of the spectrum"
        );
        TransferSamples {
            points,
            values,
            n_u: m.n_u(),
        }
    }

    /// Uses caller-supplied sample points.
    pub fn at_points(m: &StructuralModel, r: &Realization, points: &[Complex64]) -> Result<Self> {
        let values = points
            .iter()
            .map(|&z| eval_g(m, r, z))
            .collect::<Result<Vec<_>>>()?;
        Ok(TransferSamples {
            points: points.to_vec(),
            values,
            n_u: m.n_u(),
        })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn values(&self) -> &[ComplexMatrix] {
        &self.values
    }

    /// Rank of the selected columns at one sample point.
    pub fn rank_at(&self, point: usize, cols: &[usize]) -> RankEval {
        let g = &self.values[point];
        numeric_rank(&g.select_columns(cols))
    }

    /// Normal-rank estimate of the selected columns (indices into `G`).
    pub fn normrank_cols(&self, cols: &[usize]) -> RankEval {
        if cols.is_empty() {
            return RankEval {
                rank: 0,
                borderline: false,
            };
        }
        (0..self.values.len())
            .map(|p| self.rank_at(p, cols))
            .fold(
                RankEval {
                    rank: 0,
                    borderline: false,
                },
                |acc, e| RankEval {
                    rank: acc.rank.max(e.rank),
                    borderline: acc.borderline || e.borderline,
                },
            )
    }

    /// Normal-rank estimate of `G^(set)`.
    pub fn normrank(&self, m: &StructuralModel, set: &ComponentSet) -> RankEval {
        debug_assert_eq!(m.n_u(), self.n_u);
        self.normrank_cols(&column_indices(m, set))
    }
}

/// Normal rank of the columns of `G` picked by `set`.
pub fn normrank(m: &StructuralModel, r: &Realization, set: &ComponentSet, seed: u64) -> usize {
    TransferSamples::new(m, r, seed).normrank(m, set).rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn example1(a21: f64) -> (StructuralModel, Realization) {
        let m = StructuralModel::new(2, [(0, 0), (1, 0), (1, 1)], [0], [(1, true)]).unwrap();
        let r = Realization::new(
            &m,
            DMatrix::from_row_slice(2, 2, &[0.1, 0.0, a21, 0.1]),
            DMatrix::from_row_slice(2, 1, &[1.0, 0.0]),
            DMatrix::from_row_slice(1, 2, &[0.0, 1.0]),
        )
        .unwrap();
        (m, r)
    }

    #[test]
    fn example1_g_at_two() {
        let (m, r) = example1(0.01);
        let g = eval_g(&m, &r, Complex64::new(2.0, 0.0)).unwrap();
        assert_eq!(g.shape(), (1, 1));
        // C (zI-A)^-1 B = 0.01 / (z - 0.1)^2
        assert_relative_eq!(g[(0, 0)].re, 0.01 / (1.9 * 1.9), epsilon = 1e-15);
        assert_relative_eq!(g[(0, 0)].im, 0.0);
    }

    #[test]
    fn identity_system_half() {
        let m = StructuralModel::new(2, [], [0, 1], [(0, false), (1, false)]).unwrap();
        let r = Realization::new(
            &m,
            DMatrix::zeros(2, 2),
            DMatrix::identity(2, 2),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let g = eval_g(&m, &r, Complex64::new(2.0, 0.0)).unwrap();
        assert_eq!(g.shape(), (2, 4));
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 0.5 } else { 0.0 };
                assert_relative_eq!(g[(i, j)].re, expect);
                assert_relative_eq!(g[(i, 2 + j)].re, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn singular_pencil_detected() {
        let (m, r) = example1(0.01);
        assert!(matches!(
            eval_g(&m, &r, Complex64::new(0.1, 0.0)),
            Err(Error::SingularPencil)
        ));
    }

    #[test]
    fn example1_normranks() {
        let (m, r) = example1(0.01);
        let u1 = ComponentSet::new([0], []);
        assert_eq!(normrank(&m, &r, &u1, 1), 1);
        assert_eq!(normrank(&m, &r, &ComponentSet::default(), 1), 0);
        let (m0, r0) = example1(0.0);
        assert_eq!(normrank(&m0, &r0, &u1, 1), 0);
    }

    #[test]
    fn rank_of_dependent_columns() {
        let c = |v: f64| Complex64::new(v, 0.0);
        let mat = ComplexMatrix::from_row_slice(
            3,
            3,
            &[c(1.0), c(2.0), c(3.0), c(2.0), c(4.0), c(6.0), c(0.0), c(1.0), c(1.0)],
        );
        assert_eq!(numeric_rank(&mat).rank, 2);
        assert_eq!(numeric_rank(&ComplexMatrix::zeros(0, 3)).rank, 0);
    }

    #[test]
    fn borderline_pivot_flagged() {
        let c = |v: f64| Complex64::new(v, 0.0);
        let mat = ComplexMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(2e-9)]);
        let e = numeric_rank(&mat);
        assert_eq!(e.rank, 2);
        assert!(e.borderline);
    }

    #[test]
    fn sample_points_are_deterministic() {
        let (m, r) = example1(0.01);
        let a = TransferSamples::new(&m, &r, 42);
        let b = TransferSamples::new(&m, &r, 42);
        assert_eq!(a.points(), b.points());
        for z in a.points() {
            assert!(z.norm() >= 1.1 && z.norm() <= 2.5);
        }
    }
}
