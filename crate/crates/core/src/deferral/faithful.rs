//! Numerical check that one circuit faithfully simulates another.

use std::collections::BTreeSet;

use serde::Serialize;

use super::Commensuration;
use crate::circuit::QuantumCircuit;
use crate::error::{Error, Result};
use crate::linalg::{kron_vec, vec_norm_sqr, ComplexMatrix, C64, ONE, ZERO};
use crate::schedule::greedy_with_dag;
use crate::semantics::{apply_track_to_ket, check_track, enumerate_tracks, firing_order, Track};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessKind {
    /// The image of a track is not a track of the simulator.
    IncoherentImage { reason: String },
    ProbabilityMismatch { original: f64, simulator: f64 },
    /// Largest entrywise difference of the trace-one outputs.
    StateMismatch { difference: f64 },
    /// A simulator track outside the image of the commensuration occurs.
    UnmatchedTrack { probability: f64 },
}

/// The first input and track on which the check failed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub input: usize,
    /// A track of the original circuit, or of the simulator for
    /// `UnmatchedTrack`.
    pub track: Track,
    #[serde(flatten)]
    pub kind: WitnessKind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaithfulReport {
    pub passed: bool,
    pub inputs: usize,
    pub tracks: usize,
    pub max_probability_error: f64,
    pub max_state_error: f64,
    pub max_unmatched_probability: f64,
    pub witness: Option<Witness>,
}

/// The `2^n` computational basis states.
pub fn basis_inputs(n: usize) -> Vec<Vec<C64>> {
    (0..1usize << n)
        .map(|i| {
            let mut v = vec![ZERO; 1 << n];
            v[i] = ONE;
            v
        })
        .collect()
}

/// Checks that `d` faithfully simulates `c` under `zeta` on each pure input
/// (a ket on `c`'s registers; `d`'s ancillas start in `|0>`). For every
/// track `f` of `c` the probabilities of `f` and `zeta(f)` must agree within
/// `tol`, and when that probability exceeds `tol` the trace-one outputs must
/// agree within `tol` after tracing out the ancillas. Every track of `d`
/// outside the image of `zeta` must have probability at most `tol`.
pub fn check_faithful(
    c: &QuantumCircuit,
    d: &QuantumCircuit,
    zeta: &Commensuration,
    inputs: &[Vec<C64>],
    tol: f64,
) -> Result<FaithfulReport> {
    let n = c.n_registers();
    if d.n_registers() < n || d.registers[..n] != c.registers[..] {
        return Err(Error::RegisterMismatch(
            "the simulator's registers must start with the original registers".into(),
        ));
    }
    zeta.validate(c, d)?;
    let ancilla_dim = 1usize << (d.n_registers() - n);
    let mut zero_ancillas = vec![ZERO; ancilla_dim];
    zero_ancillas[0] = ONE;

    let c_dag = c.dag()?;
    let d_dag = d.dag()?;
    let c_order = firing_order(&c_dag, &greedy_with_dag(c, &c_dag))?;
    let d_order = firing_order(&d_dag, &greedy_with_dag(d, &d_dag))?;
    let c_tracks = enumerate_tracks(c)?;
    let d_tracks = enumerate_tracks(d)?;
    let images: BTreeSet<Track> = c_tracks.iter().map(|f| zeta.map_track(f)).collect();
    let unmatched: Vec<&Track> = d_tracks.iter().filter(|t| !images.contains(*t)).collect();

    let mut report = FaithfulReport {
        passed: true,
        inputs: inputs.len(),
        tracks: c_tracks.len(),
        max_probability_error: 0.0,
        max_state_error: 0.0,
        max_unmatched_probability: 0.0,
        witness: None,
    };
    let fail = |report: &mut FaithfulReport, input: usize, track: &Track, kind: WitnessKind| {
        report.passed = false;
        if report.witness.is_none() {
            report.witness = Some(Witness {
                input,
                track: track.clone(),
                kind,
            });
        }
    };

    for (k, psi) in inputs.iter().enumerate() {
        if psi.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!(
                "input {k} has length {}, expected {}",
                psi.len(),
                1usize << n
            )));
        }
        let norm = vec_norm_sqr(psi);
        let psi_d = kron_vec(psi, &zero_ancillas);
        for f in &c_tracks {
            let image = zeta.map_track(f);
            if let Err(e) = check_track(d, &image) {
                fail(&mut report, k, f, WitnessKind::IncoherentImage { reason: e.to_string() });
                continue;
            }
            let vc = apply_track_to_ket(c, &c_order, f, psi)?;
            let vd = apply_track_to_ket(d, &d_order, &image, &psi_d)?;
            let pc = vec_norm_sqr(&vc) / norm;
            let pd = vec_norm_sqr(&vd) / norm;
            let dp = (pc - pd).abs();
            report.max_probability_error = report.max_probability_error.max(dp);
            if dp > tol {
                fail(
                    &mut report,
                    k,
                    f,
                    WitnessKind::ProbabilityMismatch {
                        original: pc,
                        simulator: pd,
                    },
                );
                continue;
            }
            if pc <= tol {
                continue;
            }
            let rc = ComplexMatrix::outer(&vc, &vc).scale(C64::new(1.0 / (pc * norm), 0.0));
            let rd = reduced(&vd, ancilla_dim).scale(C64::new(1.0 / (pd * norm), 0.0));
            let diff = rc.max_abs_diff(&rd);
            report.max_state_error = report.max_state_error.max(diff);
            if diff > tol {
                fail(&mut report, k, f, WitnessKind::StateMismatch { difference: diff });
            }
        }
        for t in &unmatched {
            let v = apply_track_to_ket(d, &d_order, t, &psi_d)?;
            let p = vec_norm_sqr(&v) / norm;
            report.max_unmatched_probability = report.max_unmatched_probability.max(p);
            if p > tol {
                fail(&mut report, k, t, WitnessKind::UnmatchedTrack { probability: p });
            }
        }
    }
    Ok(report)
}

/// `Tr_anc |v><v|` where the ancillas are the trailing `log2(ancilla_dim)` qubits.
fn reduced(v: &[C64], ancilla_dim: usize) -> ComplexMatrix {
    let dim = v.len() / ancilla_dim;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            out[(i, j)] = (0..ancilla_dim)
                .map(|a| v[i * ancilla_dim + a] * v[j * ancilla_dim + a].conj())
                .sum();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::state::partial_trace_matrix;

    #[test]
    fn reduced_matches_partial_trace() {
        let v: Vec<C64> = (0..8).map(|i| C64::new(i as f64, (i * i) as f64 * 0.1)).collect();
        let full = ComplexMatrix::outer(&v, &v);
        let oracle = partial_trace_matrix(&full, 3, &[0]).unwrap();
        assert!(reduced(&v, 4).approx_eq(&oracle, 1e-12));
    }

    #[test]
    fn identity_simulation_passes() {
        let c = catalog::teleportation();
        let r = check_faithful(&c, &c, &Commensuration::identity(&c), &basis_inputs(3), 1e-9).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.tracks, 4);
    }

    #[test]
    fn register_mismatch() {
        let c = catalog::teleportation();
        let mut d = c.clone();
        d.registers.swap(0, 1);
        assert!(matches!(
            check_faithful(&c, &d, &Commensuration::identity(&c), &basis_inputs(3), 1e-9),
            Err(Error::RegisterMismatch(_))
        ));
    }
}
