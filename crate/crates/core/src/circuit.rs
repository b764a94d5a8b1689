//! Circuit data model realized through registers.
//!
//! A gate touching register `r` binds its entry on `r` to the previous
//! producer on `r` (the preceding gate touching `r` in sequence order, or the
//! input node). Outputs are implicit: the last producer on each register feeds
//! that register's output node.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};

use crate::diagnostics::{Code, Diagnostic};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DEFAULT_TOL};

pub type GateId = String;
pub type OutcomeLabel = String;
/// Outcome labels of a gate's classical sources, in `controls` order.
pub type SelectorKey = Vec<OutcomeLabel>;

/// An indexed family of operators `{A_i}` with `sum A_i^dagger A_i = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub outcomes: BTreeMap<OutcomeLabel, ComplexMatrix>,
}

impl Measurement {
    pub fn new(outcomes: BTreeMap<OutcomeLabel, ComplexMatrix>) -> Self {
        Measurement { outcomes }
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.outcomes.keys().map(String::as_str)
    }

    pub fn operator(&self, label: &str) -> Option<&ComplexMatrix> {
        self.outcomes.get(label)
    }

    /// `||sum A^dagger A - I||_inf`, or infinity if the operators disagree in shape.
    pub fn completeness_defect(&self) -> f64 {
        let Some(first) = self.outcomes.values().next() else {
            return f64::INFINITY;
        };
        if !first.is_square() {
            return f64::INFINITY;
        }
        let dim = first.rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for a in self.outcomes.values() {
            if a.rows() != dim || a.cols() != dim {
                return f64::INFINITY;
            }
            let p = a.dagger().mat_mul(a).expect("square");
            sum = sum.add(&p).expect("same shape");
        }
        sum.sub(&ComplexMatrix::identity(dim)).expect("same shape").norm_inf()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    Unitary { ops: BTreeMap<String, ComplexMatrix> },
    Measure { measurements: BTreeMap<String, Measurement> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub id: GateId,
    pub registers: Vec<usize>,
    pub kind: GateKind,
    /// Classical sources, in the order their outcomes appear in selector keys.
    pub controls: Vec<GateId>,
    pub selector: BTreeMap<SelectorKey, String>,
}

impl Gate {
    pub fn unitary(id: impl Into<String>, registers: Vec<usize>, matrix: ComplexMatrix) -> Self {
        Gate {
            id: id.into(),
            registers,
            kind: GateKind::Unitary {
                ops: [("u".to_string(), matrix)].into_iter().collect(),
            },
            controls: Vec::new(),
            selector: [(Vec::new(), "u".to_string())].into_iter().collect(),
        }
    }

    pub fn measure(id: impl Into<String>, registers: Vec<usize>, measurement: Measurement) -> Self {
        Gate {
            id: id.into(),
            registers,
            kind: GateKind::Measure {
                measurements: [("m".to_string(), measurement)].into_iter().collect(),
            },
            controls: Vec::new(),
            selector: [(Vec::new(), "m".to_string())].into_iter().collect(),
        }
    }

    /// Classically controlled unitary gate. `selector` maps source-outcome
    /// tuples to keys of `ops`.
    pub fn controlled_unitary(
        id: impl Into<String>,
        registers: Vec<usize>,
        controls: Vec<GateId>,
        ops: BTreeMap<String, ComplexMatrix>,
        selector: BTreeMap<SelectorKey, String>,
    ) -> Self {
        Gate {
            id: id.into(),
            registers,
            kind: GateKind::Unitary { ops },
            controls,
            selector,
        }
    }

    /// Classically controlled measurement gate.
    pub fn controlled_measure(
        id: impl Into<String>,
        registers: Vec<usize>,
        controls: Vec<GateId>,
        measurements: BTreeMap<String, Measurement>,
        selector: BTreeMap<SelectorKey, String>,
    ) -> Self {
        Gate {
            id: id.into(),
            registers,
            kind: GateKind::Measure { measurements },
            controls,
            selector,
        }
    }

    pub fn is_measure(&self) -> bool {
        matches!(self.kind, GateKind::Measure { .. })
    }

    pub fn is_unitary(&self) -> bool {
        !self.is_measure()
    }

    pub fn is_classically_controlled(&self) -> bool {
        !self.controls.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.registers.len()
    }

    /// `O(G)`: every outcome label of every measurement of the gate (empty for unitary gates).
    pub fn outcome_labels(&self) -> BTreeSet<&str> {
        match &self.kind {
            GateKind::Unitary { .. } => BTreeSet::new(),
            GateKind::Measure { measurements } => measurements.values().flat_map(|m| m.labels()).collect(),
        }
    }

    fn target_ids(&self) -> Vec<&String> {
        match &self.kind {
            GateKind::Unitary { ops } => ops.keys().collect(),
            GateKind::Measure { measurements } => measurements.keys().collect(),
        }
    }
}

/// A quantum circuit over named registers.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumCircuit {
    pub registers: Vec<String>,
    pub gates: Vec<Gate>,
}

/// Where a register's current qubit comes from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Producer {
    Input { register: usize },
    Gate { register: usize, gate: GateId },
}

impl Producer {
    pub fn register(&self) -> usize {
        match self {
            Producer::Input { register } | Producer::Gate { register, .. } => *register,
        }
    }
}

/// Precomputed source relation of a structurally valid circuit.
#[derive(Clone, Debug)]
pub struct Dag {
    ids: HashMap<GateId, usize>,
    /// Immediate sources (quantum and classical) of each gate, ascending.
    pub sources: Vec<Vec<usize>>,
    /// Strict prerequisites (transitive closure of sources).
    pub prereqs: Vec<BTreeSet<usize>>,
    /// Topological order; ties broken by sequence position.
    pub topo: Vec<usize>,
}

impl Dag {
    pub fn index(&self, id: &str) -> Result<usize> {
        self.ids.get(id).copied().ok_or_else(|| Error::UnknownGate(id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    /// `a` is a strict prerequisite of `b`.
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.prereqs[b].contains(&a)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.precedes(a, b) || self.precedes(b, a)
    }

    pub fn is_stage(&self, set: &BTreeSet<usize>) -> bool {
        set.iter().all(|&g| self.prereqs[g].is_subset(set))
    }

    pub fn ready(&self, stage: &BTreeSet<usize>) -> BTreeSet<usize> {
        (0..self.len())
            .filter(|g| !stage.contains(g) && self.prereqs[*g].is_subset(stage))
            .collect()
    }
}

impl QuantumCircuit {
    pub fn new(registers: Vec<String>, gates: Vec<Gate>) -> Self {
        QuantumCircuit { registers, gates }
    }

    /// Circuit on registers named `q0..q(n-1)`.
    pub fn with_qubits(n: usize, gates: Vec<Gate>) -> Self {
        QuantumCircuit {
            registers: (0..n).map(|i| format!("q{i}")).collect(),
            gates,
        }
    }

    pub fn n_registers(&self) -> usize {
        self.registers.len()
    }

    pub fn gate(&self, id: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.id == id)
    }

    pub fn gate_index(&self, id: &str) -> Option<usize> {
        self.gates.iter().position(|g| g.id == id)
    }

    pub fn measurement_gates(&self) -> impl Iterator<Item = &Gate> {
        self.gates.iter().filter(|g| g.is_measure())
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        validate_circuit_with_tol(self, DEFAULT_TOL)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let diags = self.validate();
        if diags.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidCircuit(diags))
        }
    }

    /// Builds the source relation. Requires unique ids, existing control
    /// targets, in-range registers and acyclicity.
    pub fn dag(&self) -> Result<Dag> {
        let mut ids = HashMap::with_capacity(self.gates.len());
        for (i, g) in self.gates.iter().enumerate() {
            if ids.insert(g.id.clone(), i).is_some() {
                return Err(Error::InvalidCircuit(vec![Diagnostic::error(
                    Code::DuplicateGateId,
                    &g.id,
                    "gate id used more than once",
                )]));
            }
        }
        let n = self.n_registers();
        let mut last: Vec<Option<usize>> = vec![None; n];
        let mut sources: Vec<Vec<usize>> = vec![Vec::new(); self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            for &r in &g.registers {
                if r >= n {
                    return Err(Error::RegisterOutOfRange { index: r, n });
                }
                if let Some(p) = last[r] {
                    sources[i].push(p);
                }
                last[r] = Some(i);
            }
            for c in &g.controls {
                sources[i].push(*ids.get(c).ok_or_else(|| Error::UnknownGate(c.clone()))?);
            }
            sources[i].sort_unstable();
            sources[i].dedup();
        }
        let topo = topological_order(&sources).ok_or_else(|| {
            Error::InvalidCircuit(vec![Diagnostic::error(Code::Cycle, "$", "source relation has a cycle")])
        })?;
        let mut prereqs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.gates.len()];
        for &g in &topo {
            let mut set = BTreeSet::new();
            for &s in &sources[g] {
                set.insert(s);
                set.extend(prereqs[s].iter().copied());
            }
            prereqs[g] = set;
        }
        Ok(Dag {
            ids,
            sources,
            prereqs,
            topo,
        })
    }

    pub(crate) fn ids_to_indices(&self, dag: &Dag, ids: &BTreeSet<GateId>) -> Result<BTreeSet<usize>> {
        ids.iter().map(|id| dag.index(id)).collect()
    }

    pub(crate) fn indices_to_ids(&self, set: impl IntoIterator<Item = usize>) -> BTreeSet<GateId> {
        set.into_iter().map(|i| self.gates[i].id.clone()).collect()
    }
}

/// Kahn's algorithm; `None` on a cycle.
fn topological_order(sources: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = sources.len();
    let mut indeg: Vec<usize> = sources.iter().map(Vec::len).collect();
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (g, srcs) in sources.iter().enumerate() {
        for &s in srcs {
            succs[s].push(g);
        }
    }
    let mut heap: BinaryHeap<Reverse<usize>> = (0..n).filter(|&g| indeg[g] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(g)) = heap.pop() {
        order.push(g);
        for &s in &succs[g] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                heap.push(Reverse(s));
            }
        }
    }
    (order.len() == n).then_some(order)
}

pub fn validate_circuit(c: &QuantumCircuit) -> Vec<Diagnostic> {
    validate_circuit_with_tol(c, DEFAULT_TOL)
}

fn valid_label(label: &str) -> bool {
    !label.is_empty() && !label.contains(',')
}

pub fn validate_circuit_with_tol(c: &QuantumCircuit, tol: f64) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let n = c.n_registers();
    if n == 0 {
        out.push(Diagnostic::error(Code::NoRegisters, "registers", "circuit needs at least one register"));
    }
    let mut names = BTreeSet::new();
    for name in &c.registers {
        if !names.insert(name) {
            out.push(Diagnostic::error(
                Code::DuplicateRegisterName,
                "registers",
                format!("register name `{name}` used more than once"),
            ));
        }
    }

    let mut by_id: HashMap<&str, &Gate> = HashMap::new();
    let mut structural_ok = true;
    for g in &c.gates {
        if by_id.insert(&g.id, g).is_some() {
            out.push(Diagnostic::error(Code::DuplicateGateId, &g.id, "gate id used more than once"));
            structural_ok = false;
        }
    }

    for g in &c.gates {
        let id = g.id.as_str();
        if g.registers.is_empty() {
            out.push(Diagnostic::error(Code::EmptyGate, id, "gate touches no registers"));
        }
        let mut seen = BTreeSet::new();
        for &r in &g.registers {
            if r >= n {
                out.push(Diagnostic::error(
                    Code::RegisterOutOfRange,
                    id,
                    format!("register {r} out of range for {n} registers"),
                ));
                structural_ok = false;
            } else if !seen.insert(r) {
                out.push(Diagnostic::error(Code::RepeatedRegister, id, format!("register {r} listed twice")));
            }
        }
        let dim = 1usize.checked_shl(g.registers.len() as u32).unwrap_or(0);
        let check_dims = |m: &ComplexMatrix, what: &str, out: &mut Vec<Diagnostic>| -> bool {
            if m.rows() != dim || m.cols() != dim {
                out.push(Diagnostic::error(
                    Code::DimensionMismatch,
                    id,
                    format!("{what} is {}x{}, expected {dim}x{dim}", m.rows(), m.cols()),
                ));
                false
            } else {
                true
            }
        };

        match &g.kind {
            GateKind::Unitary { ops } => {
                if ops.is_empty() {
                    out.push(Diagnostic::error(Code::EmptyOpSet, id, "unitary gate has no operators"));
                }
                for (op_id, m) in ops {
                    if check_dims(m, &format!("operator `{op_id}`"), &mut out) && !m.is_unitary(tol) {
                        out.push(Diagnostic::error(Code::NotUnitary, id, format!("operator `{op_id}` is not unitary")));
                    }
                }
            }
            GateKind::Measure { measurements } => {
                if measurements.is_empty() {
                    out.push(Diagnostic::error(Code::EmptyOpSet, id, "measurement gate has no measurements"));
                }
                let mut labels: BTreeMap<&str, &str> = BTreeMap::new();
                for (m_id, m) in measurements {
                    if m.outcomes.is_empty() {
                        out.push(Diagnostic::error(Code::EmptyMeasurement, id, format!("measurement `{m_id}` has no outcomes")));
                        continue;
                    }
                    let mut dims_ok = true;
                    for (label, a) in &m.outcomes {
                        if !valid_label(label) {
                            out.push(Diagnostic::error(
                                Code::InvalidLabel,
                                id,
                                format!("outcome label `{label}` must be nonempty and comma-free"),
                            ));
                        }
                        if let Some(prev) = labels.insert(label, m_id) {
                            out.push(Diagnostic::error(
                                Code::OverlappingOutcomes,
                                id,
                                format!("outcome `{label}` appears in measurements `{prev}` and `{m_id}`"),
                            ));
                        }
                        dims_ok &= check_dims(a, &format!("operator `{m_id}/{label}`"), &mut out);
                    }
                    if dims_ok {
                        let defect = m.completeness_defect();
                        if defect > tol {
                            out.push(Diagnostic::error(
                                Code::IncompleteMeasurement,
                                id,
                                format!("measurement `{m_id}`: ||sum A^dagger A - I|| = {defect:.3e}"),
                            ));
                        }
                    }
                }
            }
        }

        let mut seen_controls = BTreeSet::new();
        let mut controls_ok = true;
        for src in &g.controls {
            if !seen_controls.insert(src) {
                out.push(Diagnostic::error(Code::DuplicateControl, id, format!("control `{src}` listed twice")));
                controls_ok = false;
            }
            match by_id.get(src.as_str()) {
                None => {
                    out.push(Diagnostic::error(Code::UnknownControl, id, format!("control `{src}` names no gate")));
                    controls_ok = false;
                    structural_ok = false;
                }
                Some(s) if !s.is_measure() => {
                    out.push(Diagnostic::error(
                        Code::ControlNotMeasurement,
                        id,
                        format!("control `{src}` is not a measurement gate"),
                    ));
                    controls_ok = false;
                }
                Some(_) => {}
            }
        }

        let targets = g.target_ids();
        if g.controls.is_empty() && targets.len() > 1 {
            out.push(Diagnostic::error(
                Code::NonCcMultipleOps,
                id,
                format!("gate without classical sources has {} alternatives", targets.len()),
            ));
        }
        for (key, target) in &g.selector {
            if key.len() != g.controls.len() {
                out.push(Diagnostic::error(
                    Code::SelectorArity,
                    id,
                    format!("selector key ({}) has {} labels for {} controls", key.join(","), key.len(), g.controls.len()),
                ));
                controls_ok = false;
            }
            if !targets.contains(&target) {
                out.push(Diagnostic::error(
                    Code::SelectorUnknownTarget,
                    id,
                    format!("selector target `{target}` is not an alternative of the gate"),
                ));
            }
        }
        if controls_ok {
            let source_labels: Vec<Vec<&str>> = g
                .controls
                .iter()
                .map(|s| by_id[s.as_str()].outcome_labels().into_iter().collect())
                .collect();
            for key in g.selector.keys() {
                let unknown = key.iter().zip(&source_labels).any(|(l, ls)| !ls.contains(&l.as_str()));
                if unknown {
                    out.push(Diagnostic::error(
                        Code::SelectorUnknownKey,
                        id,
                        format!("selector key ({}) uses a label its source cannot produce", key.join(",")),
                    ));
                }
            }
            let mut missing = None;
            for_each_tuple(&source_labels, |tuple| {
                if missing.is_none() {
                    let key: SelectorKey = tuple.iter().map(|s| s.to_string()).collect();
                    if !g.selector.contains_key(&key) {
                        missing = Some(key);
                    }
                }
            });
            if let Some(key) = missing {
                out.push(Diagnostic::error(
                    Code::SelectorNotTotal,
                    id,
                    format!("selector has no entry for ({})", key.join(",")),
                ));
            }
        }
    }

    if structural_ok && out.iter().all(|d| d.code != Code::RegisterOutOfRange) {
        if let Err(Error::InvalidCircuit(mut d)) = c.dag() {
            out.append(&mut d);
        }
    }
    out
}

/// Calls `f` on every element of the Cartesian product of `sets`.
pub(crate) fn for_each_tuple<'a>(sets: &[Vec<&'a str>], mut f: impl FnMut(&[&'a str])) {
    if sets.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0usize; sets.len()];
    let mut tuple: Vec<&str> = sets.iter().map(|s| s[0]).collect();
    loop {
        f(&tuple);
        let mut pos = sets.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < sets[pos].len() {
                tuple[pos] = sets[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            tuple[pos] = sets[pos][0];
        }
    }
}

/// Transitive closure of the source relation below `gate`.
pub fn prerequisites(c: &QuantumCircuit, gate: &str) -> Result<BTreeSet<GateId>> {
    let dag = c.dag()?;
    let g = dag.index(gate)?;
    Ok(c.indices_to_ids(dag.prereqs[g].iter().copied()))
}

pub fn is_stage(c: &QuantumCircuit, set: &BTreeSet<GateId>) -> Result<bool> {
    let dag = c.dag()?;
    let s = c.ids_to_indices(&dag, set)?;
    Ok(dag.is_stage(&s))
}

/// The gates that are not in `stage` but have all their prerequisites there.
pub fn ready_gates(c: &QuantumCircuit, stage: &BTreeSet<GateId>) -> Result<BTreeSet<GateId>> {
    let dag = c.dag()?;
    let s = c.ids_to_indices(&dag, stage)?;
    Ok(c.indices_to_ids(dag.ready(&s)))
}

fn require_stage(c: &QuantumCircuit, dag: &Dag, s: &BTreeSet<usize>) -> Result<()> {
    for &g in s {
        if let Some(&missing) = dag.prereqs[g].iter().find(|p| !s.contains(p)) {
            return Err(Error::NotAStage(format!(
                "{} (needed by {})",
                c.gates[missing].id, c.gates[g].id
            )));
        }
    }
    Ok(())
}

/// Producers whose consumer lies outside the stage: exactly one per register.
pub fn stage_exits(c: &QuantumCircuit, stage: &BTreeSet<GateId>) -> Result<Vec<Producer>> {
    let dag = c.dag()?;
    let s = c.ids_to_indices(&dag, stage)?;
    require_stage(c, &dag, &s)?;
    let n = c.n_registers();
    // producer -> consumer along each register; None consumer = output node
    let mut exits = Vec::new();
    for r in 0..n {
        let mut producer = Producer::Input { register: r };
        let mut producer_in_stage = true;
        for (i, g) in c.gates.iter().enumerate() {
            if !g.registers.contains(&r) {
                continue;
            }
            let consumer_in_stage = s.contains(&i);
            if producer_in_stage && !consumer_in_stage {
                exits.push(producer.clone());
            }
            producer = Producer::Gate {
                register: r,
                gate: g.id.clone(),
            };
            producer_in_stage = consumer_in_stage;
        }
        if producer_in_stage {
            exits.push(producer);
        }
    }
    debug_assert_eq!(exits.len(), n, "a stage has exactly one exit per input");
    exits.sort();
    Ok(exits)
}

/// The sub-circuit consisting of the stage's gates, in the original order.
pub fn truncate(c: &QuantumCircuit, stage: &BTreeSet<GateId>) -> Result<QuantumCircuit> {
    let dag = c.dag()?;
    let s = c.ids_to_indices(&dag, stage)?;
    require_stage(c, &dag, &s)?;
    Ok(QuantumCircuit {
        registers: c.registers.clone(),
        gates: c
            .gates
            .iter()
            .enumerate()
            .filter(|(i, _)| s.contains(i))
            .map(|(_, g)| g.clone())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::gates;

    fn ids(list: &[&str]) -> BTreeSet<GateId> {
        list.iter().map(|s| s.to_string()).collect()
    }

    /// Transitive closure over an explicit edge list, independent of `Dag`.
    fn closure_oracle(edges: &[(&str, &str)], target: &str) -> BTreeSet<GateId> {
        let mut found = BTreeSet::new();
        let mut frontier = vec![target.to_string()];
        while let Some(t) = frontier.pop() {
            for (a, b) in edges {
                if *b == t && found.insert(a.to_string()) {
                    frontier.push(a.to_string());
                }
            }
        }
        found
    }

    fn teleport_edges() -> Vec<(&'static str, &'static str)> {
        vec![
            ("CNOT", "H"),
            ("CNOT", "N"),
            ("H", "M"),
            ("N", "XN"),
            ("M", "ZM"),
            ("XN", "ZM"),
        ]
    }

    #[test]
    fn teleportation_is_valid() {
        assert_eq!(validate_circuit(&catalog::teleportation()), vec![]);
    }

    #[test]
    fn classical_cycle_is_reported() {
        let a = Gate::controlled_measure(
            "A",
            vec![0],
            vec!["B".into()],
            [
                ("m0".to_string(), gates::standard_measurement_labeled("a0", "a1")),
            ]
            .into_iter()
            .collect(),
            [(vec!["b0".to_string()], "m0".to_string()), (vec!["b1".to_string()], "m0".to_string())]
                .into_iter()
                .collect(),
        );
        let b = Gate::controlled_measure(
            "B",
            vec![1],
            vec!["A".into()],
            [("m0".to_string(), gates::standard_measurement_labeled("b0", "b1"))]
                .into_iter()
                .collect(),
            [(vec!["a0".to_string()], "m0".to_string()), (vec!["a1".to_string()], "m0".to_string())]
                .into_iter()
                .collect(),
        );
        let c = QuantumCircuit::with_qubits(2, vec![a, b]);
        let diags = validate_circuit(&c);
        assert!(diags.iter().any(|d| d.code == Code::Cycle), "{diags:?}");
    }

    #[test]
    fn incomplete_measurement_is_reported() {
        let m = Measurement::new([("0".to_string(), ComplexMatrix::basis_projector(2, 0))].into_iter().collect());
        let c = QuantumCircuit::with_qubits(1, vec![Gate::measure("M", vec![0], m)]);
        let diags = validate_circuit(&c);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::IncompleteMeasurement);
        assert_eq!(diags[0].location, "M");
    }

    #[test]
    fn selector_totality_is_checked() {
        let mut c = catalog::teleportation();
        let xn = c.gates.iter_mut().find(|g| g.id == "XN").unwrap();
        xn.selector.remove(&vec!["1".to_string()]);
        let diags = validate_circuit(&c);
        assert!(diags.iter().any(|d| d.code == Code::SelectorNotTotal && d.location == "XN"));
    }

    #[test]
    fn other_structural_diagnostics() {
        let c = QuantumCircuit::with_qubits(
            2,
            vec![
                Gate::unitary("A", vec![0, 0], gates::cnot()),
                Gate::unitary("A", vec![3], gates::x()),
                Gate::unitary("B", vec![0], gates::cnot()),
                Gate::unitary("C", vec![0], ComplexMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]])),
            ],
        );
        let codes: BTreeSet<Code> = validate_circuit(&c).into_iter().map(|d| d.code).collect();
        for code in [
            Code::RepeatedRegister,
            Code::DuplicateGateId,
            Code::RegisterOutOfRange,
            Code::DimensionMismatch,
            Code::NotUnitary,
        ] {
            assert!(codes.contains(&code), "{code} missing from {codes:?}");
        }
    }

    #[test]
    fn teleportation_prerequisites_match_closure_oracle() {
        let c = catalog::teleportation();
        let edges = teleport_edges();
        for g in &c.gates {
            assert_eq!(prerequisites(&c, &g.id).unwrap(), closure_oracle(&edges, &g.id), "{}", g.id);
        }
        assert_eq!(prerequisites(&c, "ZM").unwrap(), ids(&["CNOT", "H", "M", "N", "XN"]));
        assert_eq!(prerequisites(&c, "CNOT").unwrap(), ids(&[]));
        assert!(matches!(prerequisites(&c, "nope"), Err(Error::UnknownGate(_))));
    }

    #[test]
    fn stages_and_readiness() {
        let c = catalog::teleportation();
        assert!(is_stage(&c, &ids(&[])).unwrap());
        assert_eq!(ready_gates(&c, &ids(&[])).unwrap(), ids(&["CNOT"]));
        let all: BTreeSet<GateId> = c.gates.iter().map(|g| g.id.clone()).collect();
        assert!(is_stage(&c, &all).unwrap());
        assert!(ready_gates(&c, &all).unwrap().is_empty());
        assert_eq!(ready_gates(&c, &ids(&["CNOT"])).unwrap(), ids(&["H", "N"]));
        assert!(!is_stage(&c, &ids(&["H"])).unwrap());
    }

    #[test]
    fn ready_matches_brute_force() {
        let c = catalog::teleportation();
        let edges = teleport_edges();
        let all: Vec<&str> = c.gates.iter().map(|g| g.id.as_str()).collect();
        for mask in 0..1u32 << all.len() {
            let s: BTreeSet<GateId> = all
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, g)| g.to_string())
                .collect();
            let closed = s.iter().all(|g| closure_oracle(&edges, g).is_subset(&s));
            assert_eq!(is_stage(&c, &s).unwrap(), closed);
            let ready: BTreeSet<GateId> = all
                .iter()
                .filter(|g| !s.contains(**g) && closure_oracle(&edges, g).is_subset(&s))
                .map(|g| g.to_string())
                .collect();
            assert_eq!(ready_gates(&c, &s).unwrap(), ready);
        }
    }

    #[test]
    fn exits_of_empty_and_full_stage() {
        let c = catalog::teleportation();
        let empty = stage_exits(&c, &ids(&[])).unwrap();
        assert_eq!(empty, (0..3).map(|r| Producer::Input { register: r }).collect::<Vec<_>>());
        let all: BTreeSet<GateId> = c.gates.iter().map(|g| g.id.clone()).collect();
        let full = stage_exits(&c, &all).unwrap();
        let expected = vec![
            Producer::Gate { register: 0, gate: "M".into() },
            Producer::Gate { register: 1, gate: "N".into() },
            Producer::Gate { register: 2, gate: "ZM".into() },
        ];
        assert_eq!(full, expected);
        assert!(matches!(stage_exits(&c, &ids(&["H"])), Err(Error::NotAStage(_))));
    }

    #[test]
    fn truncation() {
        let c = catalog::teleportation();
        let all: BTreeSet<GateId> = c.gates.iter().map(|g| g.id.clone()).collect();
        assert_eq!(truncate(&c, &all).unwrap(), c);
        let empty = truncate(&c, &ids(&[])).unwrap();
        assert!(empty.gates.is_empty());
        assert_eq!(empty.n_registers(), 3);
        let prefix = truncate(&c, &ids(&["CNOT", "H"])).unwrap();
        assert_eq!(prefix.gates.iter().map(|g| g.id.as_str()).collect::<Vec<_>>(), ["CNOT", "H"]);
        assert_eq!(validate_circuit(&prefix), vec![]);
    }

    #[test]
    fn tuple_product() {
        let sets = vec![vec!["a", "b"], vec!["x", "y", "z"]];
        let mut seen = Vec::new();
        for_each_tuple(&sets, |t| seen.push(t.join("")));
        assert_eq!(seen, ["ax", "ay", "az", "bx", "by", "bz"]);
        let mut count = 0;
        for_each_tuple(&[], |t| {
            assert!(t.is_empty());
            count += 1
        });
        assert_eq!(count, 1);
    }
}
