//! Possibly non-normalized density operators on `n` qubits.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, DEFAULT_TOL, ZERO};

/// A nonzero, Hermitian, positive semidefinite operator on `2^n` dimensions.
/// The trace is not required to be 1; `rho` and `c * rho` (c > 0) describe
/// the same state.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, DEFAULT_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let n_qubits = matrix
            .qubit_count()
            .ok_or_else(|| Error::InvalidDensity(format!("{}x{} is not 2^n x 2^n", matrix.rows(), matrix.cols())))?;
        if !matrix.is_hermitian(tol) {
            return Err(Error::InvalidDensity("not Hermitian".into()));
        }
        let tr = matrix.trace()?.re;
        if tr <= tol {
            return Err(Error::InvalidDensity(format!("trace {tr} is not positive")));
        }
        let min = min_eigenvalue(&matrix);
        if min < -tol {
            return Err(Error::InvalidDensity(format!(
                "not positive semidefinite (eigenvalue {min})"
            )));
        }
        Ok(DensityOperator { n_qubits, matrix })
    }

    /// `|psi><psi|` for a (not necessarily normalized) ket of length `2^n`.
    pub fn from_ket(ket: &[C64]) -> Result<Self> {
        if !ket.len().is_power_of_two() {
            return Err(Error::InvalidDensity(format!("ket length {} is not a power of two", ket.len())));
        }
        if crate::linalg::vec_norm_sqr(ket) <= DEFAULT_TOL {
            return Err(Error::InvalidDensity("zero ket".into()));
        }
        let matrix = ComplexMatrix::outer(ket, ket);
        Ok(DensityOperator {
            n_qubits: ket.len().trailing_zeros() as usize,
            matrix,
        })
    }

    /// Skips validation; for states produced by trusted internal paths.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        let n_qubits = matrix.qubit_count().expect("2^n x 2^n");
        DensityOperator { n_qubits, matrix }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().map(|t| t.re).unwrap_or(0.0)
    }

    /// Trace-one representative.
    pub fn normalized(&self) -> Self {
        let t = self.trace();
        DensityOperator {
            n_qubits: self.n_qubits,
            matrix: self.matrix.scale(C64::new(1.0 / t, 0.0)),
        }
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if factor <= 0.0 || !factor.is_finite() {
            return Err(Error::InvalidDensity(format!("scale factor {factor} must be positive")));
        }
        Ok(DensityOperator {
            n_qubits: self.n_qubits,
            matrix: self.matrix.scale(C64::new(factor, 0.0)),
        })
    }

    /// Traces out every register not in `keep`. The result lives on the kept
    /// registers in ascending index order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        let matrix = partial_trace_matrix(&self.matrix, self.n_qubits, keep)?;
        Ok(DensityOperator {
            n_qubits: matrix.qubit_count().expect("power of two"),
            matrix,
        })
    }
}

/// Partial trace of any `2^n x 2^n` matrix, keeping `keep` (ascending order
/// in the output).
pub fn partial_trace_matrix(m: &ComplexMatrix, n: usize, keep: &[usize]) -> Result<ComplexMatrix> {
    if keep.is_empty() {
        return Err(Error::InvalidRegisters("keep set is empty".into()));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&r) = kept.iter().find(|&&r| r >= n) {
        return Err(Error::RegisterOutOfRange { index: r, n });
    }
    if m.rows() != 1 << n || !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix on {n} qubits",
            m.rows(),
            m.cols()
        )));
    }
    let traced: Vec<usize> = (0..n).filter(|r| !kept.contains(r)).collect();
    let k = kept.len();
    let t = traced.len();
    let compose = |a: usize, e: usize| -> usize {
        let mut idx = 0;
        for (j, &r) in kept.iter().enumerate() {
            if a >> (k - 1 - j) & 1 == 1 {
                idx |= 1 << (n - 1 - r);
            }
        }
        for (j, &r) in traced.iter().enumerate() {
            if e >> (t - 1 - j) & 1 == 1 {
                idx |= 1 << (n - 1 - r);
            }
        }
        idx
    };
    let mut out = ComplexMatrix::zeros(1 << k, 1 << k);
    for a in 0..1usize << k {
        for b in 0..1usize << k {
            let mut s = ZERO;
            for e in 0..1usize << t {
                s += m[(compose(a, e), compose(b, e))];
            }
            out[(a, b)] = s;
        }
    }
    Ok(out)
}

/// Smallest eigenvalue of the Hermitian part of a square matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let herm = DMatrix::from_fn(n, n, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5);
    herm.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
