//! Ready-made circuits used in tests, benches and the CLI fixtures.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::circuit::{Gate, QuantumCircuit, SelectorKey};
use crate::gates;
use crate::linalg::{kron_vec, ComplexMatrix, C64, ZERO};

fn key(labels: &[&str]) -> SelectorKey {
    labels.iter().map(|s| s.to_string()).collect()
}

/// Unitary gate applying `u` when its single source reports `"1"` and the
/// identity otherwise.
pub fn classically_controlled(id: &str, registers: Vec<usize>, source: &str, u: ComplexMatrix) -> Gate {
    let dim = u.rows();
    let ops: BTreeMap<String, ComplexMatrix> = [
        ("id".to_string(), ComplexMatrix::identity(dim)),
        ("u".to_string(), u),
    ]
    .into_iter()
    .collect();
    let selector = [(key(&["0"]), "id".to_string()), (key(&["1"]), "u".to_string())]
        .into_iter()
        .collect();
    Gate::controlled_unitary(id, registers, vec![source.to_string()], ops, selector)
}

/// Teleportation: register 0 holds `|psi>`, registers 1 and 2 a Bell pair.
/// Gates: `CNOT`, `H`, measurements `M` (reg 0) and `N` (reg 1), then
/// `XN` and `ZM` on register 2 controlled by `N` and `M`.
pub fn teleportation() -> QuantumCircuit {
    QuantumCircuit::new(
        vec!["psi".into(), "alice".into(), "bob".into()],
        vec![
            Gate::unitary("CNOT", vec![0, 1], gates::cnot()),
            Gate::unitary("H", vec![0], gates::h()),
            Gate::measure("M", vec![0], gates::standard_measurement(1)),
            Gate::measure("N", vec![1], gates::standard_measurement(1)),
            classically_controlled("XN", vec![2], "N", gates::x()),
            classically_controlled("ZM", vec![2], "M", gates::z()),
        ],
    )
}

/// The measurement-deferred form of teleportation: controlled quantum gates
/// replace the classical channels and both measurements come last.
pub fn deferred_teleportation() -> QuantumCircuit {
    QuantumCircuit::new(
        vec!["psi".into(), "alice".into(), "bob".into()],
        vec![
            Gate::unitary("CNOT", vec![0, 1], gates::cnot()),
            Gate::unitary("H", vec![0], gates::h()),
            Gate::unitary("XN", vec![1, 2], gates::cnot()),
            Gate::unitary("ZM", vec![0, 2], gates::cz()),
            Gate::measure("M", vec![0], gates::standard_measurement(1)),
            Gate::measure("N", vec![1], gates::standard_measurement(1)),
        ],
    )
}

/// `|psi> ⊗ |beta_00>` for a single-qubit `psi`.
pub fn teleportation_input(psi: [C64; 2]) -> Vec<C64> {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let bell = [s, ZERO, ZERO, s];
    kron_vec(&psi, &bell)
}

/// A `|+>/|->` measurement on register 0 whose outcome `"-"` triggers a Z on register 1.
pub fn plus_minus_feedforward() -> QuantumCircuit {
    let ops: BTreeMap<String, ComplexMatrix> = [
        ("id".to_string(), ComplexMatrix::identity(2)),
        ("z".to_string(), gates::z()),
    ]
    .into_iter()
    .collect();
    let selector = [(key(&["+"]), "id".to_string()), (key(&["-"]), "z".to_string())]
        .into_iter()
        .collect();
    QuantumCircuit::with_qubits(
        2,
        vec![
            Gate::unitary("H1", vec![1], gates::h()),
            Gate::measure("PM", vec![0], gates::plus_minus_measurement()),
            Gate::controlled_unitary("CZ", vec![1], vec!["PM".into()], ops, selector),
            Gate::unitary("H1b", vec![1], gates::h()),
        ],
    )
}

/// Measure register 0, then apply a two-qubit gate on registers 0 and 1
/// chosen by that outcome: the measured register is reused by its consumer.
pub fn register_sharing_feedforward() -> QuantumCircuit {
    QuantumCircuit::with_qubits(
        2,
        vec![
            Gate::unitary("H0", vec![0], gates::h()),
            Gate::unitary("H1", vec![1], gates::h()),
            Gate::measure("M", vec![0], gates::standard_measurement(1)),
            classically_controlled("G", vec![0, 1], "M", gates::cnot().mat_mul(&gates::h().tensor(&gates::s())).unwrap()),
        ],
    )
}
