//! Seeded random unitaries, measurements, states and circuits for property
//! tests, benchmarks and the acceptance suite.

use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::circuit::{for_each_tuple, Gate, Measurement, QuantumCircuit};
use crate::gates;
use crate::linalg::{gram_schmidt_extend, ComplexMatrix, C64};
use crate::state::DensityOperator;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<C64> {
    (0..len).map(|_| gaussian(rng)).collect()
}

/// Haar-like random unitary: Gram-Schmidt on Gaussian columns.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let mut cols = Vec::with_capacity(dim);
    while cols.len() < dim {
        let v = gaussian_vec(rng, dim);
        gram_schmidt_extend(&mut cols, [v], dim, 1e-6);
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (c, col) in cols.iter().enumerate() {
        for (r, z) in col.iter().enumerate() {
            u[(r, c)] = *z;
        }
    }
    u
}

/// Random `outcomes`-outcome measurement on `dim` dimensions: the
/// `dim x dim` blocks of the first `dim` columns of a random unitary of
/// size `dim * outcomes`. Labels are `prefix` followed by the index.
pub fn random_measurement<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize, prefix: &str) -> Measurement {
    let big = random_unitary(rng, dim * outcomes);
    Measurement::new(
        (0..outcomes)
            .map(|i| {
                let mut a = ComplexMatrix::zeros(dim, dim);
                for r in 0..dim {
                    for c in 0..dim {
                        a[(r, c)] = big[(i * dim + r, c)];
                    }
                }
                (format!("{prefix}{i}"), a)
            })
            .collect(),
    )
}

/// Normalized random ket on `n` qubits.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    let v = gaussian_vec(rng, 1 << n);
    let norm = crate::linalg::vec_norm_sqr(&v).sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Random full-rank density operator `G G^dagger` with trace in `(0.5, 4)`,
/// deliberately not normalized.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityOperator {
    let dim = 1 << n;
    let g = ComplexMatrix::new(dim, dim, gaussian_vec(rng, dim * dim)).expect("finite");
    let rho = g.mat_mul(&g.dagger()).expect("square");
    let target: f64 = rng.random_range(0.5..4.0);
    let t = rho.trace().expect("square").re;
    let rho = rho.scale(C64::new(target / t, 0.0));
    // G G^dagger is Hermitian up to rounding; symmetrize before validating
    let sym = rho.add(&rho.dagger()).expect("square").scale(C64::new(0.5, 0.0));
    DensityOperator::new(sym).expect("G G^dagger is a density operator")
}

/// Knobs for [`random_circuit`].
#[derive(Clone, Debug)]
pub struct CircuitShape {
    pub max_registers: usize,
    pub max_gates: usize,
    /// Probability that a new gate is a measurement gate.
    pub measure_prob: f64,
    /// Probability that a new gate is classically controlled, when an
    /// earlier measurement gate exists.
    pub cc_prob: f64,
    /// Allow classically controlled measurement gates.
    pub cc_measurements: bool,
    /// Allow nonstandard (random Kraus) measurements.
    pub nonstandard: bool,
}

impl Default for CircuitShape {
    fn default() -> Self {
        CircuitShape {
            max_registers: 4,
            max_gates: 6,
            measure_prob: 0.35,
            cc_prob: 0.4,
            cc_measurements: true,
            nonstandard: true,
        }
    }
}

fn pick_registers<R: Rng + ?Sized>(rng: &mut R, n: usize, max_arity: usize) -> Vec<usize> {
    let arity = rng.random_range(1..=max_arity.min(n));
    let all: Vec<usize> = (0..n).collect();
    all.choose_multiple(rng, arity).copied().collect()
}

fn random_measure_family<R: Rng + ?Sized>(rng: &mut R, arity: usize, nonstandard: bool, prefix: &str) -> Measurement {
    if nonstandard && rng.random_bool(0.5) {
        let outcomes = rng.random_range(2..=3);
        random_measurement(rng, 1 << arity, outcomes, prefix)
    } else {
        let z = gates::standard_measurement(arity);
        Measurement::new(z.outcomes.into_iter().map(|(l, a)| (format!("{prefix}{l}"), a)).collect())
    }
}

/// Random valid circuit. Classical channels always come from earlier
/// measurement gates, so the source relation is acyclic.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R, shape: &CircuitShape) -> QuantumCircuit {
    let n = rng.random_range(1..=shape.max_registers);
    let count = rng.random_range(1..=shape.max_gates);
    let mut gates_out: Vec<Gate> = Vec::with_capacity(count);
    for i in 0..count {
        let id = format!("g{i}");
        let measured: Vec<&Gate> = gates_out.iter().filter(|g| g.is_measure()).collect();
        let controlled = !measured.is_empty() && rng.random_bool(shape.cc_prob);
        let measure = rng.random_bool(shape.measure_prob);
        let regs = pick_registers(rng, n, 2);
        let gate = if controlled && (!measure || shape.cc_measurements) {
            let k = rng.random_range(1..=measured.len().min(2));
            let sources: Vec<&Gate> = measured.choose_multiple(rng, k).copied().collect();
            let controls: Vec<String> = sources.iter().map(|g| g.id.clone()).collect();
            let label_sets: Vec<Vec<&str>> = sources.iter().map(|g| g.outcome_labels().into_iter().collect()).collect();
            let mut keys = Vec::new();
            for_each_tuple(&label_sets, |t| keys.push(t.iter().map(|s| s.to_string()).collect::<Vec<_>>()));
            if measure {
                let choices: BTreeMap<String, Measurement> = (0..2)
                    .map(|j| {
                        let m_id = format!("m{j}");
                        let fam = random_measure_family(rng, regs.len(), shape.nonstandard, &format!("{id}{m_id}_"));
                        (m_id, fam)
                    })
                    .collect();
                let selector = keys.into_iter().map(|k| (k, format!("m{}", rng.random_range(0..2)))).collect();
                Gate::controlled_measure(id, regs, controls, choices, selector)
            } else {
                let ops: BTreeMap<String, ComplexMatrix> = (0..keys.len())
                    .map(|j| (format!("u{j}"), random_unitary(rng, 1 << regs.len())))
                    .collect();
                let selector = keys.into_iter().enumerate().map(|(j, k)| (k, format!("u{j}"))).collect();
                Gate::controlled_unitary(id, regs, controls, ops, selector)
            }
        } else if measure {
            let fam = random_measure_family(rng, regs.len(), shape.nonstandard, "");
            Gate::measure(id, regs, fam)
        } else {
            let u = random_unitary(rng, 1 << regs.len());
            Gate::unitary(id, regs, u)
        };
        gates_out.push(gate);
    }
    QuantumCircuit::with_qubits(n, gates_out)
}

/// Random circuit on which the deferral pass is defined: no classically
/// controlled measurement gates. `register_sharing` forces at least one
/// classically controlled gate acting on a register its source measured.
pub fn random_deferrable_circuit<R: Rng + ?Sized>(
    rng: &mut R,
    max_registers: usize,
    max_gates: usize,
    register_sharing: bool,
) -> QuantumCircuit {
    let shape = CircuitShape {
        max_registers,
        max_gates,
        measure_prob: 0.35,
        cc_prob: 0.5,
        cc_measurements: false,
        nonstandard: true,
    };
    let mut c = random_circuit(rng, &shape);
    if register_sharing {
        let n = c.n_registers();
        let m_reg = rng.random_range(0..n);
        let m_id = format!("g{}", c.gates.len());
        let fam = gates::standard_measurement(1);
        c.gates.push(Gate::measure(m_id.clone(), vec![m_reg], fam));
        let mut regs = vec![m_reg];
        if n > 1 && rng.random_bool(0.5) {
            regs.push((m_reg + 1 + rng.random_range(0..n - 1)) % n);
        }
        let dim = 1 << regs.len();
        let ops: BTreeMap<String, ComplexMatrix> = [
            ("u0".to_string(), random_unitary(rng, dim)),
            ("u1".to_string(), random_unitary(rng, dim)),
        ]
        .into_iter()
        .collect();
        let selector = [
            (vec!["0".to_string()], "u0".to_string()),
            (vec!["1".to_string()], "u1".to_string()),
        ]
        .into_iter()
        .collect();
        c.gates.push(Gate::controlled_unitary(
            format!("g{}", c.gates.len() + 1),
            regs,
            vec![m_id],
            ops,
            selector,
        ));
    }
    c
}

/// Uniform random linear order coherent with the poset given by
/// `prereqs` (strict prerequisite sets): a random topological sort.
pub fn random_linear_extension<R: Rng + ?Sized>(rng: &mut R, prereqs: &[std::collections::BTreeSet<usize>]) -> Vec<usize> {
    let n = prereqs.len();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let ready: Vec<usize> = (0..n)
            .filter(|&i| !placed[i] && prereqs[i].iter().all(|&p| placed[p]))
            .collect();
        let &pick = ready.choose(rng).expect("acyclic");
        placed[pick] = true;
        order.push(pick);
    }
    order
}

/// `n` random pure states on `qubits` qubits.
pub fn random_inputs<R: Rng + ?Sized>(rng: &mut R, qubits: usize, n: usize) -> Vec<Vec<C64>> {
    (0..n).map(|_| random_pure_state(rng, qubits)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in [1, 2, 4, 8] {
            assert!(random_unitary(&mut rng, dim).is_unitary(1e-12));
        }
    }

    #[test]
    fn measurements_are_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for seed in 0..20 {
            let m = random_measurement(&mut rng, 2 + 2 * (seed % 2), 2 + seed % 3, "o");
            assert!(m.completeness_defect() < 1e-12);
        }
    }

    #[test]
    fn circuits_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let c = random_circuit(&mut rng, &CircuitShape::default());
            assert!(c.validate().is_empty(), "{:?}", c.validate());
            let d = random_deferrable_circuit(&mut rng, 4, 5, true);
            assert!(d.validate().is_empty(), "{:?}", d.validate());
        }
    }

    #[test]
    fn densities_are_unnormalized_but_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random_density(&mut rng, 3);
        assert_eq!(rho.n_qubits(), 3);
        assert!(rho.trace() > 0.5 && rho.trace() < 4.0);
    }
}
