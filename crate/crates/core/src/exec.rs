//! Stochastic bout-by-bout executor.
//!
//! Bout `t` draws its randomness from a ChaCha8 generator seeded with the
//! run seed and switched to stream `t`, so a run is reproducible and the
//! draws of one bout do not depend on how many draws earlier bouts made.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{GateId, OutcomeLabel, QuantumCircuit};
use crate::error::{Error, Result};
use crate::linalg::{apply_local, conjugate_local, ComplexMatrix};
use crate::schedule::{bout_indices, require_valid, Schedule};
use crate::semantics::{gate_operator, select_measurement, Selected, Track};
use crate::state::DensityOperator;

/// Traces at or below this are treated as zero when sampling.
const ZERO_TRACE: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Step {
    pub bout: usize,
    pub outcomes: BTreeMap<GateId, OutcomeLabel>,
    /// `Tr(A sigma A^dagger) / Tr(sigma)` for this bout's operator `A`.
    pub probability: f64,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub track: Track,
    /// `C^f rho (C^f)^dagger`, not normalized.
    pub final_state: DensityOperator,
    pub step_log: Vec<Step>,
}

impl RunResult {
    /// Product of the step probabilities.
    pub fn probability(&self) -> f64 {
        self.step_log.iter().map(|s| s.probability).product()
    }
}

fn bout_rng(seed: u64, bout: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(bout as u64);
    rng
}

fn real_trace(m: &ComplexMatrix) -> f64 {
    m.trace().map(|t| t.re).unwrap_or(0.0)
}

/// Fires the bouts of `x` in order on `rho`, sampling each measurement gate's
/// outcome with its conditional probability.
pub fn run(c: &QuantumCircuit, x: &Schedule, rho: &DensityOperator, seed: u64) -> Result<RunResult> {
    let n = c.n_registers();
    if rho.n_qubits() != n {
        return Err(Error::DimensionMismatch(format!(
            "state on {} qubits, circuit has {n} registers",
            rho.n_qubits()
        )));
    }
    let dag = c.dag()?;
    require_valid(&dag, x)?;

    let mut sigma = rho.matrix().clone();
    let mut track = Track::new();
    let mut step_log = Vec::with_capacity(x.len());
    for (t, bout) in x.bouts.iter().enumerate() {
        let before = real_trace(&sigma);
        if before <= ZERO_TRACE {
            return Err(Error::ZeroTrace { bout: t });
        }
        let mut rng = bout_rng(seed, t);
        let mut outcomes = BTreeMap::new();
        // bout gates touch disjoint registers and feed no channels to each
        // other, so firing them one at a time realizes the bout operator
        for g in bout_indices(&dag, bout)? {
            let gate = &c.gates[g];
            if gate.is_measure() {
                let key: Vec<String> = gate
                    .controls
                    .iter()
                    .map(|s| track.get(s).expect("sources fire in earlier bouts").to_string())
                    .collect();
                let Selected::Measurement { measurement, .. } = select_measurement(c, &gate.id, &key)? else {
                    unreachable!("measurement gates select measurements")
                };
                let current = real_trace(&sigma);
                let branches = measurement
                    .outcomes
                    .iter()
                    .map(|(label, a)| {
                        let post = conjugate_local(a, &gate.registers, n, &sigma)?;
                        Ok((label, real_trace(&post) / current, post))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let (label, post) = sample(&mut rng, branches).ok_or(Error::ZeroTrace { bout: t })?;
                track.insert(gate.id.clone(), label.clone());
                outcomes.insert(gate.id.clone(), label.clone());
                sigma = post;
            } else {
                let u = gate_operator(c, g, &track)?;
                sigma = conjugate_local(u, &gate.registers, n, &sigma)?;
            }
        }
        let after = real_trace(&sigma);
        step_log.push(Step {
            bout: t,
            outcomes,
            probability: after / before,
        });
    }
    Ok(RunResult {
        track,
        final_state: DensityOperator::from_matrix_unchecked(sigma),
        step_log,
    })
}

/// Picks a branch with probability proportional to its weight. Branches of
/// nonpositive weight are never picked.
fn sample<'a>(
    rng: &mut ChaCha8Rng,
    branches: Vec<(&'a OutcomeLabel, f64, ComplexMatrix)>,
) -> Option<(&'a OutcomeLabel, ComplexMatrix)> {
    let total: f64 = branches.iter().map(|b| b.1.max(0.0)).sum();
    if total <= 0.0 {
        return None;
    }
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (label, p, post) in branches {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        if u < acc {
            return Some((label, post));
        }
        last = Some((label, post));
    }
    last
}

/// Runs `shots` independent executions; shot `s` uses seed `seed + s`
/// (wrapping). Returns how often each track occurred.
pub fn run_shots(
    c: &QuantumCircuit,
    x: &Schedule,
    rho: &DensityOperator,
    seed: u64,
    shots: u64,
) -> Result<BTreeMap<Track, u64>> {
    let mut counts = BTreeMap::new();
    for s in 0..shots {
        let r = run(c, x, rho, seed.wrapping_add(s))?;
        *counts.entry(r.track).or_insert(0) += 1;
    }
    Ok(counts)
}

/// `C^f rho (C^f)^dagger` along `x`, computed without sampling.
pub fn apply_track(c: &QuantumCircuit, x: &Schedule, f: &Track, rho: &DensityOperator) -> Result<ComplexMatrix> {
    let dag = c.dag()?;
    require_valid(&dag, x)?;
    crate::semantics::check_track(c, f)?;
    let n = c.n_registers();
    let mut left = rho.matrix().clone();
    let order = crate::semantics::firing_order(&dag, x)?;
    for &g in &order {
        left = apply_local(gate_operator(c, g, f)?, &c.gates[g].registers, n, &left)?;
    }
    let mut both = left.dagger();
    for &g in &order {
        both = apply_local(gate_operator(c, g, f)?, &c.gates[g].registers, n, &both)?;
    }
    Ok(both.dagger())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::circuit::Gate;
    use crate::gates;
    use crate::linalg::{C64, ONE, ZERO};
    use crate::schedule::greedy_schedule;
    use crate::semantics::{cumulative_operator, track_probability};

    #[test]
    fn unitary_run_has_empty_track() {
        let c = QuantumCircuit::with_qubits(1, vec![Gate::unitary("H", vec![0], gates::h())]);
        let x = greedy_schedule(&c).unwrap();
        let rho = DensityOperator::from_ket(&[ONE, ZERO]).unwrap();
        let r = run(&c, &x, &rho, 1).unwrap();
        assert!(r.track.is_empty());
        let h = gates::h();
        let expected = h.mat_mul(rho.matrix()).unwrap().mat_mul(&h).unwrap();
        assert!(r.final_state.matrix().approx_eq(&expected, 1e-12));
        assert_eq!(r.step_log.len(), 1);
        assert!((r.probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plus_state_frequency() {
        let c = QuantumCircuit::with_qubits(1, vec![Gate::measure("M", vec![0], gates::standard_measurement(1))]);
        let x = greedy_schedule(&c).unwrap();
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let rho = DensityOperator::from_ket(&[s, s]).unwrap();
        let counts = run_shots(&c, &x, &rho, 2024, 10_000).unwrap();
        let zeros = counts.get(&[("M", "0")].into_iter().collect::<Track>()).copied().unwrap_or(0);
        assert!((zeros as f64 / 10_000.0 - 0.5).abs() <= 0.03);
    }

    #[test]
    fn same_seed_same_run() {
        let c = catalog::teleportation();
        let x = greedy_schedule(&c).unwrap();
        let psi = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let rho = DensityOperator::from_ket(&catalog::teleportation_input(psi)).unwrap();
        let a = run(&c, &x, &rho, 99).unwrap();
        let b = run(&c, &x, &rho, 99).unwrap();
        assert_eq!(a.track, b.track);
        assert_eq!(a.step_log, b.step_log);
    }

    #[test]
    fn teleportation_output_and_reduction() {
        let c = catalog::teleportation();
        let x = greedy_schedule(&c).unwrap();
        let psi = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let rho = DensityOperator::from_ket(&catalog::teleportation_input(psi)).unwrap();
        let target = ComplexMatrix::outer(&psi, &psi);
        for seed in 0..16 {
            let r = run(&c, &x, &rho, seed).unwrap();
            let bob = r.final_state.partial_trace(&[2]).unwrap().normalized();
            assert!(bob.matrix().approx_eq(&target, 1e-9));
            let cf = cumulative_operator(&c, &x, &r.track).unwrap();
            let expected = cf.mat_mul(rho.matrix()).unwrap().mat_mul(&cf.dagger()).unwrap();
            assert!(r.final_state.matrix().approx_eq(&expected, 1e-9));
            assert!(apply_track(&c, &x, &r.track, &rho).unwrap().approx_eq(&expected, 1e-9));
            let p = track_probability(&c, &r.track, &rho).unwrap();
            assert!((r.probability() - p).abs() < 1e-9);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let c = catalog::teleportation();
        let x = greedy_schedule(&c).unwrap();
        let rho = DensityOperator::from_ket(&[ONE, ZERO]).unwrap();
        assert!(matches!(run(&c, &x, &rho, 0), Err(Error::DimensionMismatch(_))));
    }
}
