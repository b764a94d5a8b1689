//! Tracks, cumulative operators and the aggregate measurement of a circuit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::{Dag, GateId, GateKind, Measurement, OutcomeLabel, QuantumCircuit, SelectorKey};
use crate::error::{Error, Result};
use crate::linalg::{apply_local, apply_local_vec, embed, ComplexMatrix, C64, DEFAULT_TOL};
use crate::schedule::{bout_indices, greedy_with_dag, require_valid, Bout, Schedule};
use crate::state::DensityOperator;

/// Default cap on the number of enumerated tracks.
pub const DEFAULT_TRACK_CAP: usize = 1 << 16;

/// An outcome for every measurement gate. Unitary gates carry no outcome.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Track(pub BTreeMap<GateId, OutcomeLabel>);

impl Track {
    pub fn new() -> Self {
        Track(BTreeMap::new())
    }

    pub fn get(&self, gate: &str) -> Option<&str> {
        self.0.get(gate).map(String::as_str)
    }

    pub fn insert(&mut self, gate: impl Into<String>, label: impl Into<String>) {
        self.0.insert(gate.into(), label.into());
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Track {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(g, l)| format!("{g}={l}")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Track {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        Track(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

/// What a gate's selector picks for given source outcomes.
#[derive(Clone, Copy, Debug)]
pub enum Selected<'a> {
    Unitary { id: &'a str, matrix: &'a ComplexMatrix },
    Measurement { id: &'a str, measurement: &'a Measurement },
}

/// The unitary or measurement gate `gate` runs when its classical sources
/// reported `source_outcomes` (in `controls` order).
pub fn select_measurement<'a>(c: &'a QuantumCircuit, gate: &str, source_outcomes: &[String]) -> Result<Selected<'a>> {
    let g = c.gate(gate).ok_or_else(|| Error::UnknownGate(gate.to_string()))?;
    select(g, source_outcomes)
}

fn select<'a>(g: &'a crate::circuit::Gate, key: &[String]) -> Result<Selected<'a>> {
    let miss = || Error::SelectorMiss {
        gate: g.id.clone(),
        key: key.join(","),
    };
    if key.len() != g.controls.len() {
        return Err(miss());
    }
    let (target, _) = g.selector.get_key_value(key).ok_or_else(miss)?;
    let target = &g.selector[target];
    match &g.kind {
        GateKind::Unitary { ops } => {
            let (id, matrix) = ops.get_key_value(target).ok_or_else(miss)?;
            Ok(Selected::Unitary { id, matrix })
        }
        GateKind::Measure { measurements } => {
            let (id, measurement) = measurements.get_key_value(target).ok_or_else(miss)?;
            Ok(Selected::Measurement { id, measurement })
        }
    }
}

fn source_key(c: &QuantumCircuit, g: usize, track: &Track) -> Result<SelectorKey> {
    let gate = &c.gates[g];
    gate.controls
        .iter()
        .map(|s| {
            track.get(s).map(str::to_string).ok_or_else(|| Error::IncoherentTrack {
                gate: gate.id.clone(),
                reason: format!("source `{s}` has no outcome"),
            })
        })
        .collect()
}

/// The operator gate `g` applies on its registers under `track`.
pub(crate) fn gate_operator<'a>(c: &'a QuantumCircuit, g: usize, track: &Track) -> Result<&'a ComplexMatrix> {
    let gate = &c.gates[g];
    let key = source_key(c, g, track)?;
    match select(gate, &key)? {
        Selected::Unitary { matrix, .. } => Ok(matrix),
        Selected::Measurement { measurement, id } => {
            let label = track.get(&gate.id).ok_or_else(|| Error::IncoherentTrack {
                gate: gate.id.clone(),
                reason: "measurement gate has no outcome".into(),
            })?;
            measurement.operator(label).ok_or_else(|| Error::IncoherentTrack {
                gate: gate.id.clone(),
                reason: format!("`{label}` is not an outcome of selected measurement `{id}`"),
            })
        }
    }
}

/// Checks that `track` assigns exactly the measurement gates, each an
/// outcome of the measurement its selector picks.
pub fn check_track(c: &QuantumCircuit, track: &Track) -> Result<()> {
    let measured: BTreeSet<&str> = c.measurement_gates().map(|g| g.id.as_str()).collect();
    if let Some(extra) = track.0.keys().find(|k| !measured.contains(k.as_str())) {
        return Err(Error::IncoherentTrack {
            gate: extra.clone(),
            reason: "not a measurement gate of the circuit".into(),
        });
    }
    for g in 0..c.gates.len() {
        gate_operator(c, g, track)?;
    }
    Ok(())
}

/// Embedding of the tensor product of the operators the bout's gates apply
/// under `track`.
pub fn bout_operator(c: &QuantumCircuit, bout: &Bout, track: &Track) -> Result<ComplexMatrix> {
    let dag = c.dag()?;
    let idx = bout_indices(&dag, bout)?;
    if idx.is_empty() {
        return Err(Error::InvalidSchedule("empty bout".into()));
    }
    for (i, &a) in idx.iter().enumerate() {
        for &b in &idx[i + 1..] {
            if dag.comparable(a, b) {
                return Err(Error::InvalidSchedule(format!(
                    "`{}` and `{}` are comparable and cannot share a bout",
                    c.gates[a].id, c.gates[b].id
                )));
            }
        }
    }
    let mut op = ComplexMatrix::identity(1);
    let mut registers = Vec::new();
    for &g in &idx {
        op = op.tensor(gate_operator(c, g, track)?);
        registers.extend_from_slice(&c.gates[g].registers);
    }
    embed(&op, &registers, c.n_registers())
}

/// Every coherent track, depth-first in topological order with outcomes in
/// lexicographic order.
pub fn enumerate_tracks(c: &QuantumCircuit) -> Result<Vec<Track>> {
    enumerate_tracks_capped(c, DEFAULT_TRACK_CAP)
}

pub fn enumerate_tracks_capped(c: &QuantumCircuit, cap: usize) -> Result<Vec<Track>> {
    let dag = c.dag()?;
    let measure_order: Vec<usize> = dag.topo.iter().copied().filter(|&g| c.gates[g].is_measure()).collect();
    let mut out = Vec::new();
    let mut track = Track::new();
    extend_tracks(c, &measure_order, 0, &mut track, &mut out, cap)?;
    Ok(out)
}

fn extend_tracks(
    c: &QuantumCircuit,
    order: &[usize],
    depth: usize,
    track: &mut Track,
    out: &mut Vec<Track>,
    cap: usize,
) -> Result<()> {
    let Some(&g) = order.get(depth) else {
        if out.len() >= cap {
            return Err(Error::TooManyTracks { cap });
        }
        out.push(track.clone());
        return Ok(());
    };
    let gate = &c.gates[g];
    let key = source_key(c, g, track)?;
    let Selected::Measurement { measurement, .. } = select(gate, &key)? else {
        unreachable!("measurement gates select measurements")
    };
    for label in measurement.labels() {
        track.insert(gate.id.clone(), label);
        extend_tracks(c, order, depth + 1, track, out, cap)?;
    }
    track.0.remove(&gate.id);
    Ok(())
}

/// Flattens a schedule into gate indices, bout by bout.
pub(crate) fn firing_order(dag: &Dag, x: &Schedule) -> Result<Vec<usize>> {
    let mut order = Vec::new();
    for b in &x.bouts {
        order.extend(bout_indices(dag, b)?);
    }
    Ok(order)
}

/// `A_T ... A_1` for the gates in `order`, applied locally.
pub(crate) fn cumulative_in_order(c: &QuantumCircuit, order: &[usize], track: &Track) -> Result<ComplexMatrix> {
    let n = c.n_registers();
    let mut acc = ComplexMatrix::identity(1 << n);
    for &g in order {
        acc = apply_local(gate_operator(c, g, track)?, &c.gates[g].registers, n, &acc)?;
    }
    Ok(acc)
}

/// `C^f |psi>` without forming `C^f`.
pub(crate) fn apply_track_to_ket(c: &QuantumCircuit, order: &[usize], track: &Track, ket: &[C64]) -> Result<Vec<C64>> {
    let n = c.n_registers();
    let mut v = ket.to_vec();
    for &g in order {
        v = apply_local_vec(gate_operator(c, g, track)?, &c.gates[g].registers, n, &v)?;
    }
    Ok(v)
}

/// The cumulative operator `C_X^f = A_T ∘ ... ∘ A_1` of schedule `x` on track `f`.
pub fn cumulative_operator(c: &QuantumCircuit, x: &Schedule, f: &Track) -> Result<ComplexMatrix> {
    let dag = c.dag()?;
    require_valid(&dag, x)?;
    check_track(c, f)?;
    cumulative_in_order(c, &firing_order(&dag, x)?, f)
}

/// Track-indexed family of cumulative operators.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateMeasurement {
    pub n_qubits: usize,
    pub entries: Vec<(Track, ComplexMatrix)>,
}

impl AggregateMeasurement {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, track: &Track) -> Option<&ComplexMatrix> {
        self.entries.iter().find(|(t, _)| t == track).map(|(_, m)| m)
    }

    /// `||sum (C^f)^dagger C^f - I||_inf`.
    pub fn completeness_defect(&self) -> f64 {
        let dim = 1 << self.n_qubits;
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (_, m) in &self.entries {
            sum = sum.add(&m.dagger().mat_mul(m).expect("square")).expect("same shape");
        }
        sum.sub(&ComplexMatrix::identity(dim)).expect("same shape").norm_inf()
    }

    /// Probability of each track's outcome for input `rho`.
    pub fn probabilities(&self, rho: &DensityOperator) -> Result<Vec<f64>> {
        self.entries.iter().map(|(_, m)| outcome_probability(m, rho)).collect()
    }
}

/// `Tr(A rho A^dagger) / Tr(rho)`.
pub fn outcome_probability(a: &ComplexMatrix, rho: &DensityOperator) -> Result<f64> {
    let m = rho.matrix();
    if a.cols() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, state is {}x{}",
            a.rows(),
            a.cols(),
            m.rows(),
            m.cols()
        )));
    }
    let post = a.mat_mul(m)?.mat_mul(&a.dagger())?;
    Ok(post.trace()?.re / m.trace()?.re)
}

/// The aggregate measurement, computed along the greedy schedule.
pub fn aggregate_measurement(c: &QuantumCircuit) -> Result<AggregateMeasurement> {
    aggregate_measurement_capped(c, DEFAULT_TRACK_CAP)
}

pub fn aggregate_measurement_capped(c: &QuantumCircuit, cap: usize) -> Result<AggregateMeasurement> {
    c.ensure_valid()?;
    let dag = c.dag()?;
    let order = firing_order(&dag, &greedy_with_dag(c, &dag))?;
    let tracks = enumerate_tracks_capped(c, cap)?;
    let entries = tracks
        .into_iter()
        .map(|t| {
            let m = cumulative_in_order(c, &order, &t)?;
            Ok((t, m))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AggregateMeasurement {
        n_qubits: c.n_registers(),
        entries,
    })
}

pub fn schedules_equivalent(c: &QuantumCircuit, x: &Schedule, y: &Schedule) -> Result<bool> {
    schedules_equivalent_with_tol(c, x, y, DEFAULT_TOL)
}

/// True iff `C_X^f` and `C_Y^f` agree entrywise within `tol` on every track.
pub fn schedules_equivalent_with_tol(c: &QuantumCircuit, x: &Schedule, y: &Schedule, tol: f64) -> Result<bool> {
    let dag = c.dag()?;
    require_valid(&dag, x)?;
    require_valid(&dag, y)?;
    let ox = firing_order(&dag, x)?;
    let oy = firing_order(&dag, y)?;
    for t in enumerate_tracks(c)? {
        let a = cumulative_in_order(c, &ox, &t)?;
        let b = cumulative_in_order(c, &oy, &t)?;
        if !a.approx_eq(&b, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Probability that a run on `rho` realizes track `f`.
pub fn track_probability(c: &QuantumCircuit, f: &Track, rho: &DensityOperator) -> Result<f64> {
    if rho.n_qubits() != c.n_registers() {
        return Err(Error::DimensionMismatch(format!(
            "state on {} qubits, circuit has {} registers",
            rho.n_qubits(),
            c.n_registers()
        )));
    }
    let dag = c.dag()?;
    check_track(c, f)?;
    let order = firing_order(&dag, &greedy_with_dag(c, &dag))?;
    outcome_probability(&cumulative_in_order(c, &order, f)?, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::circuit::Gate;
    use crate::gates;
    use crate::linalg::{kron_vec, ONE, ZERO};
    use crate::schedule::{enumerate_linear_schedules, greedy_schedule, split_bout};

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn track(pairs: &[(&str, &str)]) -> Track {
        pairs.iter().map(|&(g, l)| (g, l)).collect()
    }

    #[test]
    fn selection_in_teleportation() {
        let c = catalog::teleportation();
        match select_measurement(&c, "XN", &labels(&["1"])).unwrap() {
            Selected::Unitary { matrix, .. } => assert_eq!(matrix, &gates::x()),
            other => panic!("{other:?}"),
        }
        match select_measurement(&c, "XN", &labels(&["0"])).unwrap() {
            Selected::Unitary { matrix, .. } => assert_eq!(matrix, &ComplexMatrix::identity(2)),
            other => panic!("{other:?}"),
        }
        match select_measurement(&c, "H", &[]).unwrap() {
            Selected::Unitary { matrix, .. } => assert_eq!(matrix, &gates::h()),
            other => panic!("{other:?}"),
        }
        assert!(matches!(select_measurement(&c, "XN", &labels(&["2"])), Err(Error::SelectorMiss { .. })));
        assert!(matches!(select_measurement(&c, "XN", &[]), Err(Error::SelectorMiss { .. })));
    }

    #[test]
    fn two_source_selector_is_total() {
        let mut ops = BTreeMap::new();
        let mut sel = BTreeMap::new();
        for (a, b) in [("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")] {
            let id = format!("u{a}{b}");
            ops.insert(id.clone(), if a == "1" { gates::x() } else { gates::z() });
            sel.insert(labels(&[a, b]), id);
        }
        let c = QuantumCircuit::with_qubits(
            3,
            vec![
                Gate::measure("A", vec![0], gates::standard_measurement(1)),
                Gate::measure("B", vec![1], gates::standard_measurement(1)),
                Gate::controlled_unitary("G", vec![2], labels(&["A", "B"]), ops, sel),
            ],
        );
        assert!(c.validate().is_empty());
        for (a, b) in [("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")] {
            assert!(select_measurement(&c, "G", &labels(&[a, b])).is_ok());
        }
    }

    #[test]
    fn bout_operator_examples() {
        let c = QuantumCircuit::with_qubits(1, vec![Gate::unitary("H", vec![0], gates::h())]);
        assert_eq!(bout_operator(&c, &["H".to_string()].into(), &Track::new()).unwrap(), gates::h());

        let tele = catalog::teleportation();
        let f = track(&[("M", "1"), ("N", "0")]);
        let got = bout_operator(&tele, &["M".to_string(), "N".to_string()].into(), &f).unwrap();
        let p1 = ComplexMatrix::basis_projector(2, 1);
        let p0 = ComplexMatrix::basis_projector(2, 0);
        let expected = embed(&p1, &[0], 3)
            .unwrap()
            .mat_mul(&embed(&p0, &[1], 3).unwrap())
            .unwrap();
        assert_eq!(got, expected);
        assert_eq!(got, p1.tensor(&p0).tensor(&ComplexMatrix::identity(2)));
        assert!(bout_operator(&tele, &["CNOT".to_string(), "H".to_string()].into(), &f).is_err());
    }

    #[test]
    fn disjoint_bout_is_product_of_singletons() {
        let c = QuantumCircuit::with_qubits(
            2,
            vec![Gate::unitary("A", vec![0], gates::h()), Gate::unitary("B", vec![1], gates::s())],
        );
        let t = Track::new();
        let both = bout_operator(&c, &["A".to_string(), "B".to_string()].into(), &t).unwrap();
        let a = bout_operator(&c, &["A".to_string()].into(), &t).unwrap();
        let b = bout_operator(&c, &["B".to_string()].into(), &t).unwrap();
        assert!(both.approx_eq(&a.mat_mul(&b).unwrap(), 1e-15));
        assert!(both.approx_eq(&b.mat_mul(&a).unwrap(), 1e-15));
    }

    #[test]
    fn track_enumeration() {
        let unitary_only = QuantumCircuit::with_qubits(1, vec![Gate::unitary("H", vec![0], gates::h())]);
        assert_eq!(enumerate_tracks(&unitary_only).unwrap(), vec![Track::new()]);
        let tele = enumerate_tracks(&catalog::teleportation()).unwrap();
        assert_eq!(
            tele,
            vec![
                track(&[("M", "0"), ("N", "0")]),
                track(&[("M", "0"), ("N", "1")]),
                track(&[("M", "1"), ("N", "0")]),
                track(&[("M", "1"), ("N", "1")]),
            ]
        );
        assert!(matches!(
            enumerate_tracks_capped(&catalog::teleportation(), 3),
            Err(Error::TooManyTracks { cap: 3 })
        ));
    }

    /// A classically controlled measurement choosing between a 2-outcome and
    /// a 3-outcome measurement.
    fn cc_measurement_circuit() -> QuantumCircuit {
        let three = {
            let p = |i| ComplexMatrix::basis_projector(4, i);
            let rest = p(2).add(&p(3)).unwrap();
            crate::circuit::Measurement::new(
                [("t0".to_string(), p(0)), ("t1".to_string(), p(1)), ("t2".to_string(), rest)]
                    .into_iter()
                    .collect(),
            )
        };
        let two = {
            let z = gates::standard_measurement(1);
            crate::circuit::Measurement::new(
                z.outcomes
                    .into_iter()
                    .map(|(l, m)| (format!("d{l}"), m.tensor(&ComplexMatrix::identity(2))))
                    .collect(),
            )
        };
        QuantumCircuit::with_qubits(
            3,
            vec![
                Gate::unitary("H", vec![0], gates::h()),
                Gate::measure("A", vec![0], gates::standard_measurement(1)),
                Gate::controlled_measure(
                    "B",
                    vec![1, 2],
                    labels(&["A"]),
                    [("two".to_string(), two), ("three".to_string(), three)].into_iter().collect(),
                    [(labels(&["0"]), "two".to_string()), (labels(&["1"]), "three".to_string())]
                        .into_iter()
                        .collect(),
                ),
            ],
        )
    }

    #[test]
    fn cc_measurement_tracks_match_assignment_filter() {
        let c = cc_measurement_circuit();
        assert!(c.validate().is_empty(), "{:?}", c.validate());
        let got: BTreeSet<Track> = enumerate_tracks(&c).unwrap().into_iter().collect();
        // brute force: all label assignments over O(A) x O(B), filtered by coherence
        let mut brute = BTreeSet::new();
        for a in ["0", "1"] {
            for b in ["d0", "d1", "t0", "t1", "t2"] {
                let t = track(&[("A", a), ("B", b)]);
                if check_track(&c, &t).is_ok() {
                    brute.insert(t);
                }
            }
        }
        assert_eq!(got, brute);
        assert_eq!(got.len(), 5);
    }

    #[test]
    fn cumulative_operator_teleportation_hand_chain() {
        let c = catalog::teleportation();
        let x = greedy_schedule(&c).unwrap();
        let f = track(&[("M", "0"), ("N", "0")]);
        let got = cumulative_operator(&c, &x, &f).unwrap();
        let p0 = ComplexMatrix::basis_projector(2, 0);
        let chain = [
            embed(&gates::cnot(), &[0, 1], 3).unwrap(),
            embed(&gates::h(), &[0], 3).unwrap(),
            embed(&p0.tensor(&p0), &[0, 1], 3).unwrap(),
        ];
        let expected = chain
            .iter()
            .fold(ComplexMatrix::identity(8), |acc, m| m.mat_mul(&acc).unwrap());
        assert!(got.approx_eq(&expected, 1e-14));

        let h = QuantumCircuit::with_qubits(1, vec![Gate::unitary("H", vec![0], gates::h())]);
        let hx = greedy_schedule(&h).unwrap();
        assert!(cumulative_operator(&h, &hx, &Track::new()).unwrap().approx_eq(&gates::h(), 1e-15));
    }

    #[test]
    fn cumulative_operator_rejects_bad_inputs() {
        let c = catalog::teleportation();
        let x = greedy_schedule(&c).unwrap();
        assert!(cumulative_operator(&c, &x, &track(&[("M", "0")])).is_err());
        assert!(cumulative_operator(&c, &x, &track(&[("M", "0"), ("N", "7")])).is_err());
        assert!(cumulative_operator(&c, &Schedule::linear(["H"]), &track(&[("M", "0"), ("N", "0")])).is_err());
    }

    #[test]
    fn linear_schedules_agree() {
        for c in [catalog::teleportation(), cc_measurement_circuit()] {
            let greedy = greedy_schedule(&c).unwrap();
            for x in enumerate_linear_schedules(&c, None).unwrap() {
                assert!(schedules_equivalent(&c, &greedy, &x).unwrap());
            }
        }
    }

    #[test]
    fn split_refinement_is_equivalent() {
        let c = catalog::teleportation();
        let x = greedy_schedule(&c).unwrap();
        let t = x.bouts.iter().position(|b| b.len() == 2).unwrap();
        let mut it = x.bouts[t].iter().cloned();
        let b1: Bout = [it.next().unwrap()].into();
        let b2: Bout = [it.next().unwrap()].into();
        let y = split_bout(&x, t, &b1, &b2).unwrap();
        assert!(schedules_equivalent(&c, &x, &y).unwrap());
        assert!(schedules_equivalent(&c, &x, &x).unwrap());
    }

    #[test]
    fn aggregate_examples() {
        let u = QuantumCircuit::with_qubits(
            1,
            vec![Gate::unitary("H", vec![0], gates::h()), Gate::unitary("S", vec![0], gates::s())],
        );
        let agg = aggregate_measurement(&u).unwrap();
        assert_eq!(agg.len(), 1);
        assert!(agg.entries[0].1.approx_eq(&gates::s().mat_mul(&gates::h()).unwrap(), 1e-15));

        let m = QuantumCircuit::with_qubits(1, vec![Gate::measure("M", vec![0], gates::standard_measurement(1))]);
        let agg = aggregate_measurement(&m).unwrap();
        assert_eq!(agg.get(&track(&[("M", "0")])).unwrap(), &ComplexMatrix::basis_projector(2, 0));
        assert_eq!(agg.get(&track(&[("M", "1")])).unwrap(), &ComplexMatrix::basis_projector(2, 1));

        let tele = aggregate_measurement(&catalog::teleportation()).unwrap();
        assert_eq!(tele.len(), 4);
        assert!(tele.completeness_defect() <= 1e-9);
    }

    #[test]
    fn probabilities() {
        let m = QuantumCircuit::with_qubits(1, vec![Gate::measure("M", vec![0], gates::standard_measurement(1))]);
        let zero = DensityOperator::from_ket(&[ONE, ZERO]).unwrap();
        assert_eq!(track_probability(&m, &track(&[("M", "0")]), &zero).unwrap(), 1.0);
        assert_eq!(track_probability(&m, &track(&[("M", "1")]), &zero).unwrap(), 0.0);
        let doubled = zero.scaled(2.0).unwrap();
        assert_eq!(track_probability(&m, &track(&[("M", "0")]), &doubled).unwrap(), 1.0);

        let tele = catalog::teleportation();
        let psi = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let rho = DensityOperator::from_ket(&catalog::teleportation_input(psi)).unwrap();
        for t in enumerate_tracks(&tele).unwrap() {
            assert!((track_probability(&tele, &t, &rho).unwrap() - 0.25).abs() < 1e-12);
        }
        let wrong = DensityOperator::from_ket(&kron_vec(&psi, &psi)).unwrap();
        assert!(track_probability(&tele, &track(&[("M", "0"), ("N", "0")]), &wrong).is_err());
    }
}
