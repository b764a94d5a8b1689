//! Dense complex matrices and the handful of operations the circuit model
//! needs: Kronecker products, adjoints, traces and register embeddings.
//!
//! Basis ordering: register 0 is the most significant bit of a
//! computational-basis index, so `|a0 a1 ... a(n-1)>` sits at index
//! `sum a_k * 2^(n-1-k)`.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default absolute entrywise tolerance for comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::DimensionMismatch("non-finite entry".into()));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Square matrix from nested real/imaginary pairs, handy for literals.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data: Vec<C64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(rows.len(), cols, data).expect("well-formed literal")
    }

    pub fn from_real(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data: Vec<C64> = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::new(rows.len(), cols, data).expect("well-formed literal")
    }

    /// `|v><w|`.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        let mut m = Self::zeros(v.len(), w.len());
        for (i, a) in v.iter().enumerate() {
            for (j, b) in w.iter().enumerate() {
                m[(i, j)] = a * b.conj();
            }
        }
        m
    }

    /// Projector onto a computational basis vector.
    pub fn basis_projector(dim: usize, index: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        m[(index, index)] = ONE;
        m
    }

    /// Diagonal matrix from entries.
    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, z) in entries.iter().enumerate() {
            m[(i, i)] = *z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m[(c, r)] = self[(r, c)].conj();
            }
        }
        m
    }

    pub fn mat_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mat_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {}x{} to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for ar in 0..self.rows {
            for ac in 0..self.cols {
                let a = self[(ar, ac)];
                if a == ZERO {
                    continue;
                }
                for br in 0..other.rows {
                    for bc in 0..other.cols {
                        out[(ar * other.rows + br, ac * other.cols + bc)] = a * other[(br, bc)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    /// Largest absolute entrywise difference; `f64::INFINITY` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Induced infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .map(|z| z.norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.approx_eq(&self.dagger(), tol)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && self
                .dagger()
                .mat_mul(self)
                .map(|p| p.approx_eq(&Self::identity(self.rows), tol))
                .unwrap_or(false)
    }

    /// Number of qubits `k` when the matrix is `2^k x 2^k`.
    pub fn qubit_count(&self) -> Option<usize> {
        if self.is_square() && self.rows.is_power_of_two() {
            Some(self.rows.trailing_zeros() as usize)
        } else {
            None
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.tensor(b)
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.dagger()
}

pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.mat_mul(b)
}

pub fn trace(a: &ComplexMatrix) -> Result<C64> {
    a.trace()
}

/// Bit masks of `registers` inside an `n`-register basis index, in list order.
fn register_masks(registers: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut seen = vec![false; n];
    for &r in registers {
        if r >= n {
            return Err(Error::RegisterOutOfRange { index: r, n });
        }
        if std::mem::replace(&mut seen[r], true) {
            return Err(Error::InvalidRegisters(format!("register {r} listed twice")));
        }
    }
    Ok(registers.iter().map(|&r| 1usize << (n - 1 - r)).collect())
}

/// Splits a full basis index into (local index over `masks`, rest with those bits cleared).
#[inline]
fn gather(index: usize, masks: &[usize]) -> (usize, usize) {
    let mut local = 0;
    let mut rest = index;
    for &m in masks {
        local <<= 1;
        if index & m != 0 {
            local |= 1;
            rest &= !m;
        }
    }
    (local, rest)
}

#[inline]
fn scatter(local: usize, rest: usize, masks: &[usize]) -> usize {
    let k = masks.len();
    let mut index = rest;
    for (j, &m) in masks.iter().enumerate() {
        if local >> (k - 1 - j) & 1 == 1 {
            index |= m;
        }
    }
    index
}

fn check_local(op: &ComplexMatrix, registers: &[usize], n: usize) -> Result<Vec<usize>> {
    if registers.is_empty() {
        return Err(Error::InvalidRegisters("empty register list".into()));
    }
    let masks = register_masks(registers, n)?;
    if !op.is_square() || op.rows() != 1 << registers.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on {} registers",
            op.rows(),
            op.cols(),
            registers.len()
        )));
    }
    Ok(masks)
}

/// The `2^n x 2^n` operator acting as `op` on `registers` (in list order,
/// first register most significant inside `op`) and as identity elsewhere.
pub fn embed(op: &ComplexMatrix, registers: &[usize], n: usize) -> Result<ComplexMatrix> {
    let masks = check_local(op, registers, n)?;
    let dim = 1usize << n;
    let local_dim = op.rows();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        let (lc, rest) = gather(col, &masks);
        for lr in 0..local_dim {
            let z = op[(lr, lc)];
            if z != ZERO {
                out[(scatter(lr, rest, &masks), col)] = z;
            }
        }
    }
    Ok(out)
}

/// Left-multiplies `target` (a `2^n x m` matrix) by `embed(op, registers, n)`
/// without materializing the embedding.
pub fn apply_local(
    op: &ComplexMatrix,
    registers: &[usize],
    n: usize,
    target: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let masks = check_local(op, registers, n)?;
    let dim = 1usize << n;
    if target.rows() != dim {
        return Err(Error::DimensionMismatch(format!(
            "target has {} rows, expected {dim}",
            target.rows()
        )));
    }
    let local_dim = op.rows();
    let m = target.cols();
    let mut out = ComplexMatrix::zeros(dim, m);
    let mut rows = vec![0usize; local_dim];
    for base in 0..dim {
        let (l, rest) = gather(base, &masks);
        if l != 0 {
            continue;
        }
        for (j, slot) in rows.iter_mut().enumerate() {
            *slot = scatter(j, rest, &masks);
        }
        for (lr, &r) in rows.iter().enumerate() {
            for (lc, &c) in rows.iter().enumerate() {
                let z = op[(lr, lc)];
                if z == ZERO {
                    continue;
                }
                let src = &target.data[c * m..(c + 1) * m];
                let dst = &mut out.data[r * m..(r + 1) * m];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += z * s;
                }
            }
        }
    }
    Ok(out)
}

/// Applies a local operator to a state vector of length `2^n`.
pub fn apply_local_vec(
    op: &ComplexMatrix,
    registers: &[usize],
    n: usize,
    state: &[C64],
) -> Result<Vec<C64>> {
    let masks = check_local(op, registers, n)?;
    let dim = 1usize << n;
    if state.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "state has length {}, expected {dim}",
            state.len()
        )));
    }
    let local_dim = op.rows();
    let mut out = vec![ZERO; dim];
    let mut idx = vec![0usize; local_dim];
    for base in 0..dim {
        let (l, rest) = gather(base, &masks);
        if l != 0 {
            continue;
        }
        for (j, slot) in idx.iter_mut().enumerate() {
            *slot = scatter(j, rest, &masks);
        }
        for (lr, &r) in idx.iter().enumerate() {
            out[r] = idx
                .iter()
                .enumerate()
                .map(|(lc, &c)| op[(lr, lc)] * state[c])
                .sum();
        }
    }
    Ok(out)
}

/// `A rho A^dagger` for a local `A`.
pub fn conjugate_local(
    op: &ComplexMatrix,
    registers: &[usize],
    n: usize,
    rho: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let left = apply_local(op, registers, n, rho)?;
    Ok(apply_local(op, registers, n, &left.dagger())?.dagger())
}

pub fn vec_norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn inner(v: &[C64], w: &[C64]) -> C64 {
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

/// Kronecker product of two vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Orthonormalizes `candidates` against the columns already in `basis`,
/// appending every candidate whose residual norm exceeds `eps`.
pub fn gram_schmidt_extend(basis: &mut Vec<Vec<C64>>, candidates: impl IntoIterator<Item = Vec<C64>>, want: usize, eps: f64) {
    for mut v in candidates {
        if basis.len() >= want {
            break;
        }
        // two passes for numerical stability
        for _ in 0..2 {
            for b in basis.iter() {
                let p = inner(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= p * y;
                }
            }
        }
        let norm = vec_norm_sqr(&v).sqrt();
        if norm > eps {
            for x in v.iter_mut() {
                *x /= norm;
            }
            basis.push(v);
        }
    }
}
