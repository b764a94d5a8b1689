//! Common gate matrices and measurement families.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::circuit::Measurement;
use crate::linalg::{ComplexMatrix, C64, ONE, ZERO};

pub fn x() -> ComplexMatrix {
    ComplexMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[&[ZERO, C64::new(0.0, -1.0)], &[C64::new(0.0, 1.0), ZERO]])
}

pub fn z() -> ComplexMatrix {
    ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]])
}

pub fn h() -> ComplexMatrix {
    let s = FRAC_1_SQRT_2;
    ComplexMatrix::from_real(&[&[s, s], &[s, -s]])
}

pub fn s() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[ONE, C64::new(0.0, 1.0)])
}

pub fn t() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[ONE, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)])
}

pub fn identity(qubits: usize) -> ComplexMatrix {
    ComplexMatrix::identity(1 << qubits)
}

/// Controlled-NOT, control first.
pub fn cnot() -> ComplexMatrix {
    controlled(&x())
}

pub fn cz() -> ComplexMatrix {
    controlled(&z())
}

pub fn swap() -> ComplexMatrix {
    ComplexMatrix::from_real(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
    ])
}

/// `|0><0| ⊗ I + |1><1| ⊗ u`.
pub fn controlled(u: &ComplexMatrix) -> ComplexMatrix {
    let d = u.rows();
    let mut m = ComplexMatrix::identity(2 * d);
    for r in 0..d {
        for c in 0..d {
            m[(d + r, d + c)] = u[(r, c)];
        }
    }
    m
}

/// Computational-basis measurement on `qubits` registers; the outcome for
/// basis index `i` is labelled by its binary string (`"0"`, `"1"`, `"01"`, ...).
pub fn standard_measurement(qubits: usize) -> Measurement {
    let dim = 1usize << qubits;
    Measurement::new(
        (0..dim)
            .map(|i| (format!("{i:0qubits$b}"), ComplexMatrix::basis_projector(dim, i)))
            .collect(),
    )
}

/// Single-qubit computational-basis measurement with custom labels for `|0>`, `|1>`.
pub fn standard_measurement_labeled(zero: &str, one: &str) -> Measurement {
    Measurement::new(
        [
            (zero.to_string(), ComplexMatrix::basis_projector(2, 0)),
            (one.to_string(), ComplexMatrix::basis_projector(2, 1)),
        ]
        .into_iter()
        .collect(),
    )
}

/// Projective measurement in the `|+>, |->` basis with outcomes `"+"` and `"-"`.
pub fn plus_minus_measurement() -> Measurement {
    let s = FRAC_1_SQRT_2;
    let plus = [C64::new(s, 0.0), C64::new(s, 0.0)];
    let minus = [C64::new(s, 0.0), C64::new(-s, 0.0)];
    Measurement::new(
        [
            ("+".to_string(), ComplexMatrix::outer(&plus, &plus)),
            ("-".to_string(), ComplexMatrix::outer(&minus, &minus)),
        ]
        .into_iter()
        .collect(),
    )
}
