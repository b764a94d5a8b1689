//! Workloads shared by the benchmarks.

use qcirc_core::catalog::classically_controlled;
use qcirc_core::{gates, Gate, QuantumCircuit};

/// `n` qubits: `H` on the first, then for each neighbouring pair a CNOT,
/// a standard measurement of the left qubit and an `X` on the right one
/// controlled by that outcome. Each step adds one classical channel.
pub fn feedforward_ladder(n: usize) -> QuantumCircuit {
    assert!(n >= 2, "ladder needs two qubits");
    let mut g = vec![Gate::unitary("H", vec![0], gates::h())];
    for i in 0..n - 1 {
        g.push(Gate::unitary(format!("C{i}"), vec![i, i + 1], gates::cnot()));
        g.push(Gate::measure(format!("M{i}"), vec![i], gates::standard_measurement(1)));
        g.push(classically_controlled(&format!("X{i}"), vec![i + 1], &format!("M{i}"), gates::x()));
    }
    QuantumCircuit::with_qubits(n, g)
}
