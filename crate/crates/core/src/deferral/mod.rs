//! Measurement deferral: rewrites a circuit so that no unitary gate has a
//! measurement gate among its prerequisites, together with the
//! correspondence between the measurements of the two circuits.

mod faithful;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::circuit::{Gate, GateId, GateKind, Measurement, OutcomeLabel, QuantumCircuit, SelectorKey};
use crate::error::{Error, Result};
use crate::gates;
use crate::linalg::{gram_schmidt_extend, ComplexMatrix, C64, DEFAULT_TOL, ZERO};
use crate::semantics::Track;

pub use faithful::{basis_inputs, check_faithful, FaithfulReport, Witness, WitnessKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MeasurementClass {
    pub projective: bool,
    pub complete: bool,
    pub standard: bool,
}

pub fn classify_measurement(m: &Measurement) -> MeasurementClass {
    classify_measurement_with_tol(m, DEFAULT_TOL)
}

pub fn classify_measurement_with_tol(m: &Measurement, tol: f64) -> MeasurementClass {
    let ops: Vec<&ComplexMatrix> = m.outcomes.values().collect();
    let projective = !ops.is_empty()
        && ops.iter().all(|a| {
            a.is_square() && a.is_hermitian(tol) && a.mat_mul(a).map(|aa| aa.approx_eq(a, tol)).unwrap_or(false)
        })
        && ops.iter().enumerate().all(|(i, a)| {
            ops[i + 1..].iter().all(|b| {
                a.mat_mul(b)
                    .map(|ab| ab.max_abs_diff(&ComplexMatrix::zeros(ab.rows(), ab.cols())) <= tol)
                    .unwrap_or(false)
            })
        });
    // the rank of a projection is its trace
    let complete = projective
        && ops
            .iter()
            .all(|a| a.trace().map(|t| (t.re - 1.0).abs() <= tol).unwrap_or(false));
    let standard = complete && ops.iter().all(|a| standard_index(a, tol).is_some());
    MeasurementClass {
        projective,
        complete,
        standard,
    }
}

/// `Some(k)` iff `a` is `|k><k|` within `tol`.
fn standard_index(a: &ComplexMatrix, tol: f64) -> Option<usize> {
    if !a.is_square() {
        return None;
    }
    let k = (0..a.rows()).max_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re))?;
    a.approx_eq(&ComplexMatrix::basis_projector(a.rows(), k), tol).then_some(k)
}

/// Basis index of each outcome of a standard measurement.
fn standard_labels(m: &Measurement) -> Result<BTreeMap<OutcomeLabel, usize>> {
    m.outcomes
        .iter()
        .map(|(l, a)| {
            standard_index(a, DEFAULT_TOL)
                .map(|k| (l.clone(), k))
                .ok_or_else(|| Error::Precondition(format!("outcome `{l}` is not a computational-basis projector")))
        })
        .collect()
}

/// The single measurement of a measurement gate without classical controls.
fn sole_measurement(g: &Gate) -> Result<&Measurement> {
    match &g.kind {
        GateKind::Measure { measurements } if !g.is_classically_controlled() && measurements.len() == 1 => {
            Ok(measurements.values().next().expect("one entry"))
        }
        GateKind::Measure { .. } => Err(Error::ClassicallyControlledMeasurement(vec![g.id.clone()])),
        GateKind::Unitary { .. } => Err(Error::Precondition(format!("`{}` is not a measurement gate", g.id))),
    }
}

fn is_standard_gate(g: &Gate) -> bool {
    sole_measurement(g).map(|m| classify_measurement(m).standard).unwrap_or(false)
}

/// Unitary gates with a measurement gate among their prerequisites.
pub fn red_gates(c: &QuantumCircuit) -> Result<BTreeSet<GateId>> {
    let dag = c.dag()?;
    Ok(red_indices(c, &dag).into_iter().map(|g| c.gates[g].id.clone()).collect())
}

fn red_indices(c: &QuantumCircuit, dag: &crate::circuit::Dag) -> Vec<usize> {
    (0..c.gates.len())
        .filter(|&g| c.gates[g].is_unitary() && dag.prereqs[g].iter().any(|&p| c.gates[p].is_measure()))
        .collect()
}

/// Every classical channel must end at a unitary gate.
fn check_no_cc_measurements(c: &QuantumCircuit) -> Result<()> {
    let bad: Vec<String> = c
        .gates
        .iter()
        .filter(|g| g.is_measure() && g.is_classically_controlled())
        .map(|g| g.id.clone())
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::ClassicallyControlledMeasurement(bad))
    }
}

/// One-to-one map from the measurement gates of a circuit to those of its
/// simulator. Measurement gates with a single outcome carry no information;
/// they are listed in `trivial` with that outcome and have no image.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commensuration {
    pub zeta: BTreeMap<GateId, GateId>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub trivial: BTreeMap<GateId, OutcomeLabel>,
}

impl Commensuration {
    pub fn identity(c: &QuantumCircuit) -> Self {
        Commensuration {
            zeta: c.measurement_gates().map(|g| (g.id.clone(), g.id.clone())).collect(),
            trivial: BTreeMap::new(),
        }
    }

    /// `zeta(f)`.
    pub fn map_track(&self, f: &Track) -> Track {
        f.0.iter()
            .filter_map(|(g, l)| self.zeta.get(g).map(|d| (d.clone(), l.clone())))
            .collect()
    }

    /// The track `f` with `zeta(f) = g`, ignoring coherence.
    pub fn preimage(&self, g: &Track) -> Option<Track> {
        let inverse: BTreeMap<&GateId, &GateId> = self.zeta.iter().map(|(a, b)| (b, a)).collect();
        let mut f = Track::new();
        for (d, l) in &g.0 {
            f.insert((*inverse.get(d)?).clone(), l.clone());
        }
        for (t, l) in &self.trivial {
            f.insert(t.clone(), l.clone());
        }
        Some(f)
    }

    /// Checks the bijection between measurement gates and that each image
    /// has at least the outcomes of its preimage.
    pub fn validate(&self, c: &QuantumCircuit, d: &QuantumCircuit) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidCommensuration(m));
        for g in c.measurement_gates() {
            let labels = g.outcome_labels();
            match (self.zeta.get(&g.id), self.trivial.get(&g.id)) {
                (Some(_), Some(_)) => return bad(format!("`{}` is both mapped and trivial", g.id)),
                (None, None) => return bad(format!("measurement `{}` has no image", g.id)),
                (None, Some(l)) => {
                    if labels.len() != 1 || !labels.contains(l.as_str()) {
                        return bad(format!("`{}` does not have the single outcome `{l}`", g.id));
                    }
                }
                (Some(img), None) => {
                    let Some(dg) = d.gate(img).filter(|dg| dg.is_measure()) else {
                        return bad(format!("image `{img}` of `{}` is not a measurement gate", g.id));
                    };
                    let dl = dg.outcome_labels();
                    if let Some(l) = labels.iter().find(|l| !dl.contains(*l)) {
                        return bad(format!("image `{img}` lacks outcome `{l}` of `{}`", g.id));
                    }
                }
            }
        }
        let domain: BTreeSet<&str> = c.measurement_gates().map(|g| g.id.as_str()).collect();
        if let Some(k) = self.zeta.keys().chain(self.trivial.keys()).find(|k| !domain.contains(k.as_str())) {
            return bad(format!("`{k}` is not a measurement gate of the simulated circuit"));
        }
        let images: BTreeSet<&str> = self.zeta.values().map(String::as_str).collect();
        if images.len() != self.zeta.len() {
            return bad("two measurements share an image".into());
        }
        let targets: BTreeSet<&str> = d.measurement_gates().map(|g| g.id.as_str()).collect();
        if images != targets {
            return bad("images do not cover the simulator's measurement gates".into());
        }
        Ok(())
    }

    /// `other ∘ self`.
    fn then(&self, other: &Commensuration) -> Commensuration {
        let mut trivial = self.trivial.clone();
        let mut zeta = BTreeMap::new();
        let inverse: BTreeMap<&GateId, &GateId> = self.zeta.iter().map(|(a, b)| (b, a)).collect();
        for (mid, l) in &other.trivial {
            if let Some(src) = inverse.get(mid) {
                trivial.insert((*src).clone(), l.clone());
            }
        }
        for (src, mid) in &self.zeta {
            if let Some(dst) = other.zeta.get(mid) {
                zeta.insert(src.clone(), dst.clone());
            }
        }
        Commensuration { zeta, trivial }
    }
}

#[derive(Clone, Debug)]
pub struct DeferralResult {
    pub circuit: QuantumCircuit,
    pub zeta: Commensuration,
    /// Registers added by the pass, initialized to `|0>`; always the tail
    /// of the register list.
    pub ancilla_registers: Vec<usize>,
}

/// `base`, or `base_1`, `base_2`, ... if taken; the result is marked taken.
fn fresh_id(taken: &mut BTreeSet<GateId>, base: &str) -> GateId {
    let id = std::iter::once(base.to_string())
        .chain((1..).map(|i| format!("{base}_{i}")))
        .find(|s| !taken.contains(s))
        .expect("unbounded");
    taken.insert(id.clone());
    id
}

fn gate_ids(c: &QuantumCircuit) -> BTreeSet<GateId> {
    c.gates.iter().map(|g| g.id.clone()).collect()
}

fn add_ancilla(c: &mut QuantumCircuit) -> usize {
    let taken = |s: &str| c.registers.iter().any(|r| r == s);
    let name = (0..).map(|i| format!("anc{i}")).find(|s| !taken(s)).expect("unbounded");
    c.registers.push(name);
    c.registers.len() - 1
}

/// Replaces every position of `old` in consumers' `controls` by `new`,
/// relabelling selector keys with `relabel`.
fn resource_consumers(c: &mut QuantumCircuit, old: &str, new: &str, relabel: impl Fn(&str) -> Vec<String>) {
    for g in c.gates.iter_mut() {
        let Some(pos) = g.controls.iter().position(|s| s == old) else {
            continue;
        };
        g.controls[pos] = new.to_string();
        let selector = std::mem::take(&mut g.selector);
        for (key, target) in selector {
            for label in relabel(&key[pos]) {
                let mut k = key.clone();
                k[pos] = label;
                g.selector.insert(k, target.clone());
            }
        }
    }
}

/// Outcome of [`standardize_measurement`].
#[derive(Clone, Debug)]
pub struct Standardized {
    pub circuit: QuantumCircuit,
    /// `l = ceil(log2 |I|)` fresh registers.
    pub ancillas: Vec<usize>,
    /// The standard measurement now carrying the outcomes, or `None` when
    /// the measurement had a single outcome and became a unitary gate.
    pub measurement: Option<GateId>,
}

/// Replaces the nonstandard measurement gate `g` with a unitary `U` on its
/// registers plus `l` fresh ancillas, followed by a standard measurement
/// `P` of the ancillas. Outcome number `i` (lexicographic label order)
/// becomes ancilla pattern `i`, first ancilla most significant; unused
/// patterns get fresh labels starting with `~`.
pub fn standardize_measurement(c: &QuantumCircuit, g: &str) -> Result<Standardized> {
    let pos = c.gate_index(g).ok_or_else(|| Error::UnknownGate(g.to_string()))?;
    let gate = &c.gates[pos];
    let m = sole_measurement(gate)?;
    if classify_measurement(m).standard {
        return Err(Error::Precondition(format!("measurement `{g}` is already standard")));
    }
    let labels: Vec<&OutcomeLabel> = m.outcomes.keys().collect();
    let mut out = c.clone();

    if labels.len() == 1 {
        let only = labels[0].clone();
        out.gates[pos] = Gate::unitary(g, gate.registers.clone(), m.outcomes[&only].clone());
        for consumer in out.gates.iter_mut() {
            if let Some(p) = consumer.controls.iter().position(|s| s == g) {
                consumer.controls.remove(p);
                let selector = std::mem::take(&mut consumer.selector);
                consumer.selector = selector
                    .into_iter()
                    .filter(|(k, _)| k[p] == only)
                    .map(|(mut k, t)| {
                        k.remove(p);
                        (k, t)
                    })
                    .collect();
            }
        }
        return Ok(Standardized {
            circuit: out,
            ancillas: Vec::new(),
            measurement: None,
        });
    }

    let l = usize::BITS as usize - (labels.len() - 1).leading_zeros() as usize;
    let ancillas: Vec<usize> = (0..l).map(|_| add_ancilla(&mut out)).collect();
    let d = 1usize << gate.arity();
    let big = 1usize << l;
    let u = isometry_completion(m, d, big)?;

    let mut taken = gate_ids(&out);
    let u_id = fresh_id(&mut taken, &format!("{g}_U"));
    let p_id = fresh_id(&mut taken, &format!("P_{g}"));
    let mut registers = gate.registers.clone();
    registers.extend(&ancillas);
    let u_gate = Gate::unitary(u_id, registers, u);

    let mut outcomes: BTreeMap<OutcomeLabel, ComplexMatrix> = labels
        .iter()
        .enumerate()
        .map(|(i, lab)| ((*lab).clone(), ComplexMatrix::basis_projector(big, i)))
        .collect();
    let mut extra = Vec::new();
    for i in labels.len()..big {
        let mut name = format!("~{i}");
        while outcomes.contains_key(&name) {
            name.insert(0, '~');
        }
        outcomes.insert(name.clone(), ComplexMatrix::basis_projector(big, i));
        extra.push(name);
    }
    let p_gate = Gate::measure(p_id.clone(), ancillas.clone(), Measurement::new(outcomes));

    out.gates.splice(pos..=pos, [u_gate, p_gate]);
    // the extra patterns occur with probability zero; consumers treat them
    // like the first outcome
    let first = labels[0].clone();
    resource_consumers(&mut out, g, &p_id, |label| {
        let mut v = vec![label.to_string()];
        if label == first {
            v.extend(extra.iter().cloned());
        }
        v
    });
    Ok(Standardized {
        circuit: out,
        ancillas,
        measurement: Some(p_id),
    })
}

/// `U` with `U(|x> ⊗ |0>) = sum_i A_i|x> ⊗ |i>`, completed by Gram-Schmidt
/// over the computational basis.
fn isometry_completion(m: &Measurement, d: usize, big: usize) -> Result<ComplexMatrix> {
    let ops: Vec<&ComplexMatrix> = m.outcomes.values().collect();
    if ops.iter().any(|a| a.rows() != d || a.cols() != d) {
        return Err(Error::DimensionMismatch(format!("measurement operators must be {d}x{d}")));
    }
    let dim = d * big;
    let iso: Vec<Vec<C64>> = (0..d)
        .map(|x| {
            let mut v = vec![ZERO; dim];
            for (i, a) in ops.iter().enumerate() {
                for y in 0..d {
                    v[y * big + i] = a[(y, x)];
                }
            }
            v
        })
        .collect();
    let candidates = (0..dim).map(|k| {
        let mut e = vec![ZERO; dim];
        e[k] = C64::new(1.0, 0.0);
        e
    });
    let mut basis = iso.clone();
    gram_schmidt_extend(&mut basis, candidates, dim, 1e-7);
    if basis.len() != dim {
        return Err(Error::Precondition("measurement is not complete; cannot build the unitary".into()));
    }
    let mut spare = basis.into_iter().skip(d);
    let mut u = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        let v = if col % big == 0 {
            iso[col / big].clone()
        } else {
            spare.next().expect("dim columns")
        };
        for (r, z) in v.into_iter().enumerate() {
            u[(r, col)] = z;
        }
    }
    Ok(u)
}

/// Outcome of [`split_standard_measurements`].
#[derive(Clone, Debug)]
pub struct SplitResult {
    pub circuit: QuantumCircuit,
    /// For each original measurement gate, the one-register measurement
    /// gates now carrying its outcome bits (most significant first). A
    /// deleted repeat measurement maps to the gate it duplicated.
    pub origin: BTreeMap<GateId, Vec<GateId>>,
}

/// Replaces every multi-register standard measurement by one-register
/// standard measurements labelled `"0"`/`"1"`, and deletes a one-register
/// standard measurement whose register was last touched by another
/// one-register standard measurement.
pub fn split_standard_measurements(c: &QuantumCircuit) -> Result<SplitResult> {
    check_no_cc_measurements(c)?;
    let mut out = QuantumCircuit::new(c.registers.clone(), Vec::new());
    let mut origin: BTreeMap<GateId, Vec<GateId>> = BTreeMap::new();
    // label -> bit pattern, per original measurement
    let mut patterns: BTreeMap<GateId, BTreeMap<OutcomeLabel, Vec<String>>> = BTreeMap::new();
    let mut last_on: Vec<Option<usize>> = vec![None; c.n_registers()];
    let mut taken = gate_ids(c);

    for gate in &c.gates {
        if !gate.is_measure() {
            for &r in &gate.registers {
                last_on[r] = Some(out.gates.len());
            }
            out.gates.push(gate.clone());
            continue;
        }
        let m = sole_measurement(gate)?;
        if !classify_measurement(m).standard {
            return Err(Error::Precondition(format!("measurement `{}` is not standard", gate.id)));
        }
        let k = gate.arity();
        let index = standard_labels(m)?;
        let bits: BTreeMap<OutcomeLabel, Vec<String>> = index
            .iter()
            .map(|(l, &i)| (l.clone(), (0..k).map(|j| ((i >> (k - 1 - j)) & 1).to_string()).collect()))
            .collect();

        if k == 1 {
            let prev = last_on[gate.registers[0]].filter(|&p| {
                let pg = &out.gates[p];
                pg.is_measure() && pg.arity() == 1
            });
            if let Some(p) = prev {
                origin.insert(gate.id.clone(), vec![out.gates[p].id.clone()]);
                patterns.insert(gate.id.clone(), bits);
                continue;
            }
        }
        let ids: Vec<GateId> = if k == 1 {
            vec![gate.id.clone()]
        } else {
            (0..k)
                .map(|j| fresh_id(&mut taken, &format!("{}_{j}", gate.id)))
                .collect()
        };
        for (j, id) in ids.iter().enumerate() {
            let r = gate.registers[j];
            last_on[r] = Some(out.gates.len());
            out.gates.push(Gate::measure(id.clone(), vec![r], gates::standard_measurement(1)));
        }
        origin.insert(gate.id.clone(), ids);
        patterns.insert(gate.id.clone(), bits);
    }

    for g in out.gates.iter_mut().filter(|g| g.is_classically_controlled()) {
        let mut controls: Vec<GateId> = Vec::new();
        for s in &g.controls {
            for t in &origin[s] {
                if !controls.contains(t) {
                    controls.push(t.clone());
                }
            }
        }
        let mut selector: BTreeMap<SelectorKey, String> = BTreeMap::new();
        'keys: for (key, target) in &g.selector {
            let mut assigned: BTreeMap<&str, &str> = BTreeMap::new();
            for (s, label) in g.controls.iter().zip(key) {
                for (t, bit) in origin[s].iter().zip(&patterns[s][label]) {
                    match assigned.insert(t, bit) {
                        Some(prev) if prev != bit => continue 'keys,
                        _ => {}
                    }
                }
            }
            let new_key = controls.iter().map(|t| assigned[t.as_str()].to_string()).collect();
            selector.insert(new_key, target.clone());
        }
        g.controls = controls;
        g.selector = selector;
    }
    Ok(SplitResult { circuit: out, origin })
}

/// Rewrites the red gate `g`, which must have no red prerequisites, so that
/// it no longer depends on measurements. The measurements among its
/// prerequisites move after it: a measurement sharing no register with `g`
/// or with later prerequisite gates moves as is; otherwise its registers are
/// copied by CNOTs into fresh ancillas at its old position and the ancillas
/// are measured afterwards. `g` becomes a quantum-controlled gate whose
/// control registers carry its classical sources' outcomes. Gate ids and
/// outcome labels of measurements are preserved.
///
/// Returns the rewritten circuit and the ancillas it added.
pub fn defer_past_gate(c: &QuantumCircuit, g: &str) -> Result<(QuantumCircuit, Vec<usize>)> {
    check_no_cc_measurements(c)?;
    let dag = c.dag()?;
    let gi = dag.index(g)?;
    let gate = &c.gates[gi];
    if !gate.is_unitary() {
        return Err(Error::Precondition(format!("`{g}` is not a unitary gate")));
    }
    let reds: BTreeSet<usize> = red_indices(c, &dag).into_iter().collect();
    if !reds.contains(&gi) {
        return Err(Error::Precondition(format!("`{g}` has no measurement prerequisite")));
    }
    if let Some(&r) = dag.prereqs[gi].iter().find(|p| reds.contains(p)) {
        return Err(Error::Precondition(format!(
            "`{g}` has the red prerequisite `{}`",
            c.gates[r].id
        )));
    }
    let pre: Vec<usize> = dag.topo.iter().copied().filter(|p| dag.prereqs[gi].contains(p)).collect();
    for &p in &pre {
        let pg = &c.gates[p];
        if pg.is_measure() && !is_standard_gate(pg) {
            return Err(Error::Precondition(format!("measurement `{}` is not standard", pg.id)));
        }
    }

    // a measurement moves unless g or a later prerequisite touches its registers
    // (register order is sequence order)
    let touches_later = |m: usize| {
        let regs: BTreeSet<usize> = c.gates[m].registers.iter().copied().collect();
        pre.iter()
            .chain(std::iter::once(&gi))
            .any(|&o| o > m && c.gates[o].registers.iter().any(|r| regs.contains(r)))
    };
    let mut out = QuantumCircuit::new(c.registers.clone(), Vec::new());
    let mut copies: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut relocated: Vec<Gate> = Vec::new();
    let mut ancillas = Vec::new();
    let mut taken = gate_ids(c);

    let mut head = Vec::new();
    for &p in &pre {
        let pg = &c.gates[p];
        if !pg.is_measure() {
            head.push(pg.clone());
            continue;
        }
        if !touches_later(p) {
            relocated.push(pg.clone());
            continue;
        }
        let anc: Vec<usize> = pg.registers.iter().map(|_| add_ancilla(&mut out)).collect();
        for (j, (&r, &a)) in pg.registers.iter().zip(&anc).enumerate() {
            let id = fresh_id(&mut taken, &format!("{}_copy{j}", pg.id));
            head.push(Gate::unitary(id, vec![r, a], gates::cnot()));
        }
        let mut moved = pg.clone();
        moved.registers = anc.clone();
        relocated.push(moved);
        ancillas.extend(&anc);
        copies.insert(p, anc);
    }

    // control registers in `controls` order
    let mut control_regs = Vec::new();
    let mut per_source: Vec<(usize, BTreeMap<usize, OutcomeLabel>)> = Vec::new();
    for s in &gate.controls {
        let si = dag.index(s)?;
        let regs = copies.get(&si).cloned().unwrap_or_else(|| c.gates[si].registers.clone());
        let by_index: BTreeMap<usize, OutcomeLabel> = standard_labels(sole_measurement(&c.gates[si])?)?
            .into_iter()
            .map(|(l, i)| (i, l))
            .collect();
        control_regs.extend(&regs);
        per_source.push((regs.len(), by_index));
    }
    let GateKind::Unitary { ops } = &gate.kind else {
        unreachable!("checked above")
    };
    let target_dim = 1usize << gate.arity();
    let control_bits = control_regs.len();
    let mut sigma = ComplexMatrix::zeros(target_dim << control_bits, target_dim << control_bits);
    for pattern in 0..1usize << control_bits {
        let mut key = Vec::with_capacity(per_source.len());
        let mut shift = control_bits;
        for (width, by_index) in &per_source {
            shift -= width;
            let idx = (pattern >> shift) & ((1 << width) - 1);
            key.push(
                by_index
                    .get(&idx)
                    .ok_or_else(|| Error::Precondition(format!("basis pattern {idx} has no outcome")))?
                    .clone(),
            );
        }
        let target = gate.selector.get(&key).ok_or_else(|| Error::SelectorMiss {
            gate: gate.id.clone(),
            key: key.join(","),
        })?;
        let u = &ops[target];
        let base = pattern * target_dim;
        for r in 0..target_dim {
            for col in 0..target_dim {
                sigma[(base + r, base + col)] = u[(r, col)];
            }
        }
    }
    let mut sigma_regs = control_regs;
    sigma_regs.extend(&gate.registers);

    let in_pre: BTreeSet<usize> = pre.iter().copied().collect();
    out.gates = head;
    out.gates.push(Gate::unitary(g, sigma_regs, sigma));
    out.gates.extend(relocated);
    out.gates.extend(
        c.gates
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != gi && !in_pre.contains(i))
            .map(|(_, g)| g.clone()),
    );
    Ok((out, ancillas))
}

/// Rewrites `c` into a circuit satisfying the deferral requirement that
/// faithfully simulates it. Nonstandard measurements are standardized
/// first; red gates are then rewritten one at a time, each time choosing
/// the first red gate in topological order; finally all measurements are
/// moved behind all unitary gates.
pub fn defer_measurements(c: &QuantumCircuit) -> Result<DeferralResult> {
    c.ensure_valid()?;
    check_no_cc_measurements(c)?;
    let n = c.n_registers();
    if red_gates(c)?.is_empty() {
        return Ok(DeferralResult {
            circuit: c.clone(),
            zeta: Commensuration::identity(c),
            ancilla_registers: Vec::new(),
        });
    }

    let mut cur = c.clone();
    let mut zeta = Commensuration::identity(c);
    let nonstandard: Vec<GateId> = c
        .measurement_gates()
        .filter(|g| !is_standard_gate(g))
        .map(|g| g.id.clone())
        .collect();
    for id in nonstandard {
        let step = standardize_measurement(&cur, &id)?;
        let mut local = Commensuration::identity(&cur);
        local.zeta.remove(&id);
        match &step.measurement {
            Some(p) => {
                local.zeta.insert(id.clone(), p.clone());
            }
            None => {
                let label = cur.gate(&id).expect("present").outcome_labels().into_iter().next().expect("one");
                local.trivial.insert(id.clone(), label.to_string());
            }
        }
        zeta = zeta.then(&local);
        cur = step.circuit;
    }

    loop {
        let dag = cur.dag()?;
        let reds: BTreeSet<usize> = red_indices(&cur, &dag).into_iter().collect();
        let Some(&first) = dag.topo.iter().find(|g| reds.contains(g)) else {
            break;
        };
        let id = cur.gates[first].id.clone();
        let before = reds.len();
        let (next, _) = defer_past_gate(&cur, &id)?;
        debug_assert!(red_gates(&next)?.len() < before);
        cur = next;
    }

    let (unitaries, measurements): (Vec<Gate>, Vec<Gate>) = cur.gates.into_iter().partition(Gate::is_unitary);
    cur.gates = unitaries;
    cur.gates.extend(measurements);
    cur.ensure_valid()?;
    Ok(DeferralResult {
        ancilla_registers: (n..cur.n_registers()).collect(),
        circuit: cur,
        zeta,
    })
}
