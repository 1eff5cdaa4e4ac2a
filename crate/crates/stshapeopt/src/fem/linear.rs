//! Sparse linear systems over the free degrees of freedom.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use super::FemError;

/// Relative residual the direct solve aims for (refinement steps are added
/// until it is met or stagnates).
pub const TARGET_RELATIVE_RESIDUAL: f64 = 1e-12;
/// A solve whose relative residual stays above this is reported as failed.
pub const FAILED_RELATIVE_RESIDUAL: f64 = 1e-6;
const MAX_REFINEMENTS: usize = 3;

/// Square sparse matrix with a compressed-row copy for products and a
/// column-compressed copy for the direct factorization.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *vals.last_mut().expect("entry exists") += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                y[c] += v * x[r];
            }
        }
        y
    }

    /// First row without any nonzero entry, if any.
    pub fn empty_row(&self) -> Option<usize> {
        (0..self.n).find(|&r| self.row(r).all(|(_, v)| v == 0.0))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (r, row) in d.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] = v;
            }
        }
        d
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>, FemError> {
        let triplets: Vec<Triplet<usize, usize, f64>> = (0..self.n)
            .flat_map(|r| self.row(r).map(move |(c, v)| Triplet::new(r, c, v)))
            .collect();
        SparseColMat::try_new_from_triplets(self.n, self.n, &triplets)
            .map_err(|e| FemError::Solver(format!("cannot build sparse matrix: {e:?}")))
    }
}

/// Matrix, right-hand side and the residual contract of one solve.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub tolerance: f64,
}

/// Outcome of a linear solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub x: Vec<f64>,
    /// `‖b − Ax‖ / ‖b‖` (0 for a zero right-hand side).
    pub relative_residual: f64,
}

impl LinearSystem {
    pub fn new(matrix: SparseMatrix, rhs: Vec<f64>) -> Result<Self, FemError> {
        if rhs.len() != matrix.dim() {
            return Err(FemError::Solver(format!(
                "right-hand side has length {} for a {}-dimensional matrix",
                rhs.len(),
                matrix.dim()
            )));
        }
        if let Some(r) = matrix.empty_row() {
            return Err(FemError::Solver(format!("matrix row {r} is identically zero")));
        }
        Ok(Self { matrix, rhs, tolerance: TARGET_RELATIVE_RESIDUAL })
    }

    /// Solves `A x = b`.
    pub fn solve(&self) -> Result<LinearSolution, FemError> {
        self.solve_impl(false)
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self) -> Result<LinearSolution, FemError> {
        self.solve_impl(true)
    }

    fn solve_impl(&self, transpose: bool) -> Result<LinearSolution, FemError> {
        let n = self.matrix.dim();
        let b_norm = norm(&self.rhs);
        if b_norm == 0.0 {
            return Ok(LinearSolution { x: vec![0.0; n], relative_residual: 0.0 });
        }
        let lu = self
            .matrix
            .to_faer()?
            .sp_lu()
            .map_err(|e| FemError::Solver(format!("sparse LU failed: {e:?}")))?;
        let solve = |rhs: &[f64]| -> Vec<f64> {
            let mut m = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
            if transpose {
                lu.solve_transpose_in_place(m.as_mut());
            } else {
                lu.solve_in_place(m.as_mut());
            }
            (0..n).map(|i| m[(i, 0)]).collect()
        };
        let residual = |x: &[f64]| -> Vec<f64> {
            let ax = if transpose { self.matrix.apply_transpose(x) } else { self.matrix.apply(x) };
            self.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect()
        };
        let mut x = solve(&self.rhs);
        let mut r = residual(&x);
        let mut rel = norm(&r) / b_norm;
        for _ in 0..MAX_REFINEMENTS {
            if !(rel > self.tolerance) {
                break;
            }
            let dx = solve(&r);
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + d).collect();
            let r_trial = residual(&trial);
            let rel_trial = norm(&r_trial) / b_norm;
            if !(rel_trial < rel) {
                break;
            }
            x = trial;
            r = r_trial;
            rel = rel_trial;
        }
        if !rel.is_finite() || rel > FAILED_RELATIVE_RESIDUAL {
            return Err(FemError::Solver(format!("linear solve stalled at relative residual {rel:e}")));
        }
        Ok(LinearSolution { x, relative_residual: rel })
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
