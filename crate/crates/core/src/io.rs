//! JSON encodings of matrices, circuits, states, schedules, posets,
//! commensurations and results.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::circuit::{Gate, GateKind, Measurement, QuantumCircuit};
use crate::deferral::{Commensuration, DeferralResult};
use crate::diagnostics::{Code, Diagnostic};
use crate::error::{Error, Result};
use crate::exec::{RunResult, Step};
use crate::linalg::{ComplexMatrix, C64};
use crate::semantics::{AggregateMeasurement, Track};
use crate::state::DensityOperator;

pub const CIRCUIT_VERSION: &str = "qcirc-1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(m: &MatrixJson) -> Result<Self> {
        ComplexMatrix::new(m.rows, m.cols, m.entries.iter().map(|&[re, im]| C64::new(re, im)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasurementJson {
    outcomes: BTreeMap<String, MatrixJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindJson {
    Unitary,
    Measure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateJson {
    id: String,
    registers: Vec<usize>,
    kind: KindJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ops: Option<BTreeMap<String, MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    measurements: Option<BTreeMap<String, MeasurementJson>>,
    #[serde(default)]
    controls: Vec<String>,
    selector: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitJson {
    version: String,
    registers: Vec<String>,
    gates: Vec<GateJson>,
}

fn schema(location: &str, message: impl Into<String>) -> Diagnostic {
    Diagnostic::error(Code::SchemaViolation, location, message)
}

fn matrix_or_diag(m: &MatrixJson, gate: &str, what: &str) -> std::result::Result<ComplexMatrix, Diagnostic> {
    ComplexMatrix::try_from(m).map_err(|e| schema(gate, format!("{what}: {e}")))
}

fn gate_from_json(g: &GateJson) -> std::result::Result<Gate, Diagnostic> {
    let kind = match (&g.kind, &g.ops, &g.measurements) {
        (KindJson::Unitary, Some(ops), None) => GateKind::Unitary {
            ops: ops
                .iter()
                .map(|(k, m)| Ok((k.clone(), matrix_or_diag(m, &g.id, &format!("operator `{k}`"))?)))
                .collect::<std::result::Result<_, Diagnostic>>()?,
        },
        (KindJson::Measure, None, Some(ms)) => GateKind::Measure {
            measurements: ms
                .iter()
                .map(|(k, m)| {
                    let outcomes = m
                        .outcomes
                        .iter()
                        .map(|(l, a)| Ok((l.clone(), matrix_or_diag(a, &g.id, &format!("operator `{k}/{l}`"))?)))
                        .collect::<std::result::Result<_, Diagnostic>>()?;
                    Ok((k.clone(), Measurement::new(outcomes)))
                })
                .collect::<std::result::Result<_, Diagnostic>>()?,
        },
        (KindJson::Unitary, _, _) => return Err(schema(&g.id, "unitary gates carry `ops` and no `measurements`")),
        (KindJson::Measure, _, _) => return Err(schema(&g.id, "measurement gates carry `measurements` and no `ops`")),
    };
    let selector = g
        .selector
        .iter()
        .map(|(k, v)| {
            let key = if k.is_empty() && g.controls.is_empty() {
                Vec::new()
            } else {
                k.split(',').map(str::to_string).collect()
            };
            (key, v.clone())
        })
        .collect();
    Ok(Gate {
        id: g.id.clone(),
        registers: g.registers.clone(),
        kind,
        controls: g.controls.clone(),
        selector,
    })
}

fn gate_to_json(g: &Gate) -> GateJson {
    let (kind, ops, measurements) = match &g.kind {
        GateKind::Unitary { ops } => (
            KindJson::Unitary,
            Some(ops.iter().map(|(k, m)| (k.clone(), m.into())).collect()),
            None,
        ),
        GateKind::Measure { measurements } => (
            KindJson::Measure,
            None,
            Some(
                measurements
                    .iter()
                    .map(|(k, m)| {
                        let outcomes = m.outcomes.iter().map(|(l, a)| (l.clone(), a.into())).collect();
                        (k.clone(), MeasurementJson { outcomes })
                    })
                    .collect(),
            ),
        ),
    };
    GateJson {
        id: g.id.clone(),
        registers: g.registers.clone(),
        kind,
        ops,
        measurements,
        controls: g.controls.clone(),
        selector: g.selector.iter().map(|(k, v)| (k.join(","), v.clone())).collect(),
    }
}

/// Parses without semantic validation. Diagnostics cover malformed JSON,
/// unsupported versions and schema violations.
pub fn parse_circuit_unchecked(text: &str) -> std::result::Result<QuantumCircuit, Vec<Diagnostic>> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| vec![Diagnostic::error(Code::MalformedJson, "$", e.to_string())])?;
    match value.get("version") {
        Some(Value::String(v)) if v == CIRCUIT_VERSION => {}
        Some(Value::String(v)) => {
            return Err(vec![Diagnostic::error(
                Code::UnsupportedVersion,
                "version",
                format!("version `{v}` is not supported (expected `{CIRCUIT_VERSION}`)"),
            )])
        }
        Some(_) => return Err(vec![schema("version", "version must be a string")]),
        None => return Err(vec![schema("$", "missing field `version`")]),
    }
    let dto: CircuitJson = serde_json::from_value(value).map_err(|e| vec![schema("$", e.to_string())])?;
    let mut gates = Vec::with_capacity(dto.gates.len());
    let mut diags = Vec::new();
    for g in &dto.gates {
        match gate_from_json(g) {
            Ok(g) => gates.push(g),
            Err(d) => diags.push(d),
        }
    }
    if diags.is_empty() {
        Ok(QuantumCircuit::new(dto.registers, gates))
    } else {
        Err(diags)
    }
}

/// Parses and validates a circuit.
pub fn parse_circuit(text: &str) -> std::result::Result<QuantumCircuit, Vec<Diagnostic>> {
    let c = parse_circuit_unchecked(text)?;
    let diags = c.validate();
    if diags.is_empty() {
        Ok(c)
    } else {
        Err(diags)
    }
}

/// Canonical JSON: fixed field order, map keys sorted, gate order kept.
pub fn serialize_circuit(c: &QuantumCircuit) -> String {
    let dto = CircuitJson {
        version: CIRCUIT_VERSION.to_string(),
        registers: c.registers.clone(),
        gates: c.gates.iter().map(gate_to_json).collect(),
    };
    to_json_string(&dto)
}

/// Indented JSON in which arrays nested inside arrays (complex entries,
/// schedule bouts) stay on one line.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Layout::default());
    value.serialize(&mut ser).expect("serializable");
    String::from_utf8(buf).expect("utf-8")
}

#[derive(Default)]
struct Layout {
    frames: Vec<Frame>,
}

struct Frame {
    array: bool,
    inline: bool,
    filled: bool,
}

impl Layout {
    fn open<W: ?Sized + std::io::Write>(&mut self, w: &mut W, array: bool) -> std::io::Result<()> {
        let inline = self.frames.last().is_some_and(|f| (array && f.array) || f.inline);
        self.frames.push(Frame {
            array,
            inline,
            filled: false,
        });
        w.write_all(if array { b"[" } else { b"{" })
    }

    fn close<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        let f = self.frames.pop().expect("balanced");
        if !f.inline && f.filled {
            self.newline(w)?;
        }
        w.write_all(if f.array { b"]" } else { b"}" })
    }

    fn item<W: ?Sized + std::io::Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        let inline = self.frames.last().is_some_and(|f| f.inline);
        if !first {
            w.write_all(if inline { b", " } else { b"," })?;
        }
        if !inline {
            self.newline(w)?;
        }
        Ok(())
    }

    fn newline<W: ?Sized + std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.frames.len() {
            w.write_all(b"  ")?;
        }
        Ok(())
    }

    fn filled(&mut self) {
        if let Some(f) = self.frames.last_mut() {
            f.filled = true;
        }
    }
}

impl serde_json::ser::Formatter for Layout {
    fn begin_array<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.open(w, true)
    }
    fn end_array<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.close(w)
    }
    fn begin_array_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.item(w, first)
    }
    fn end_array_value<W: ?Sized + std::io::Write>(&mut self, _: &mut W) -> std::io::Result<()> {
        self.filled();
        Ok(())
    }
    fn begin_object<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.open(w, false)
    }
    fn end_object<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.close(w)
    }
    fn begin_object_key<W: ?Sized + std::io::Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.item(w, first)
    }
    fn begin_object_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        w.write_all(b": ")
    }
    fn end_object_value<W: ?Sized + std::io::Write>(&mut self, _: &mut W) -> std::io::Result<()> {
        self.filled();
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StateJson {
    Ket { ket: Vec<[f64; 2]> },
    Matrix(MatrixJson),
}

/// A density matrix, or `{"ket": [...]}` for `|psi><psi|`.
pub fn parse_state(text: &str) -> Result<DensityOperator> {
    let state: StateJson = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("expected a matrix or {{\"ket\": [...]}}: {e}")))?;
    match state {
        StateJson::Ket { ket } => {
            let v: Vec<C64> = ket.iter().map(|&[re, im]| C64::new(re, im)).collect();
            DensityOperator::from_ket(&v)
        }
        StateJson::Matrix(m) => DensityOperator::new(ComplexMatrix::try_from(&m)?),
    }
}

/// A ket given as `{"ket": [...]}`.
pub fn parse_ket(text: &str) -> Result<Vec<C64>> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Ket {
        ket: Vec<[f64; 2]>,
    }
    let k: Ket = serde_json::from_str(text)?;
    Ok(k.ket.iter().map(|&[re, im]| C64::new(re, im)).collect())
}

pub fn ket_to_json(v: &[C64]) -> Value {
    serde_json::json!({ "ket": v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>() })
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Value {
    serde_json::to_value(MatrixJson::from(m)).expect("serializable")
}

/// Sidecar written next to a deferred circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZetaSidecar {
    pub zeta: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub trivial: BTreeMap<String, String>,
    pub ancillas: Vec<usize>,
}

impl ZetaSidecar {
    pub fn from_result(r: &DeferralResult) -> Self {
        ZetaSidecar {
            zeta: r.zeta.zeta.clone(),
            trivial: r.zeta.trivial.clone(),
            ancillas: r.ancilla_registers.clone(),
        }
    }

    pub fn commensuration(&self) -> Commensuration {
        Commensuration {
            zeta: self.zeta.clone(),
            trivial: self.trivial.clone(),
        }
    }
}

#[derive(Serialize)]
struct AggregateTrackJson {
    outcomes: Track,
    operator: MatrixJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    probability_on: Option<f64>,
}

/// `{"tracks":[{"outcomes", "operator", "probability_on"?}]}`.
pub fn aggregate_to_json(agg: &AggregateMeasurement, input: Option<&DensityOperator>) -> Result<Value> {
    let probabilities = input.map(|rho| agg.probabilities(rho)).transpose()?;
    let tracks: Vec<AggregateTrackJson> = agg
        .entries
        .iter()
        .enumerate()
        .map(|(i, (t, m))| AggregateTrackJson {
            outcomes: t.clone(),
            operator: m.into(),
            probability_on: probabilities.as_ref().map(|p| p[i]),
        })
        .collect();
    Ok(serde_json::json!({ "tracks": tracks }))
}

#[derive(Serialize)]
struct RunJson<'a> {
    outcomes: &'a Track,
    probability: f64,
    steps: &'a [Step],
    final_state: MatrixJson,
    final_state_normalized: MatrixJson,
}

/// A single run, with the final state both as computed and at trace one.
pub fn run_to_json(r: &RunResult) -> Value {
    let json = RunJson {
        outcomes: &r.track,
        probability: r.probability(),
        steps: &r.step_log,
        final_state: r.final_state.matrix().into(),
        final_state_normalized: r.final_state.normalized().matrix().into(),
    };
    serde_json::to_value(json).expect("serializable")
}

/// Counts and frequencies per track.
pub fn shots_to_json(counts: &BTreeMap<Track, u64>, shots: u64, seed: u64) -> Value {
    let tracks: Vec<Value> = counts
        .iter()
        .map(|(t, &n)| serde_json::json!({ "outcomes": t, "count": n, "frequency": n as f64 / shots as f64 }))
        .collect();
    serde_json::json!({ "shots": shots, "seed": seed, "tracks": tracks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::deferral::defer_measurements;

    #[test]
    fn round_trips() {
        for c in [
            catalog::teleportation(),
            catalog::deferred_teleportation(),
            catalog::plus_minus_feedforward(),
            defer_measurements(&catalog::plus_minus_feedforward()).unwrap().circuit,
        ] {
            let text = serialize_circuit(&c);
            let back = parse_circuit(&text).unwrap();
            assert_eq!(back, c);
            assert_eq!(serialize_circuit(&back), text);
        }
    }

    #[test]
    fn empty_circuit() {
        let c = parse_circuit(r#"{"version":"qcirc-1","registers":["a"],"gates":[]}"#).unwrap();
        assert_eq!(c.n_registers(), 1);
        assert!(c.gates.is_empty());
    }

    #[test]
    fn file_level_diagnostics() {
        let code = |t: &str| parse_circuit(t).unwrap_err()[0].code;
        assert_eq!(code("{"), Code::MalformedJson);
        assert_eq!(code(r#"{"version":"qcirc-2","registers":[],"gates":[]}"#), Code::UnsupportedVersion);
        assert_eq!(code(r#"{"registers":[],"gates":[]}"#), Code::SchemaViolation);
        assert_eq!(code(r#"{"version":"qcirc-1","registers":["a"],"gates":[],"x":1}"#), Code::SchemaViolation);
        assert_eq!(
            code(r#"{"version":"qcirc-1","registers":["a"],"gates":[{"id":"g","registers":[0],"kind":"unitary","selector":{"":"u"}}]}"#),
            Code::SchemaViolation
        );
        assert_eq!(
            code(r#"{"version":"qcirc-1","registers":["a"],"gates":[{"id":"g","registers":[0],"kind":"unitary","ops":{"u":{"rows":2,"cols":2,"entries":[[1,0]]}},"selector":{"":"u"}}]}"#),
            Code::SchemaViolation
        );
    }

    #[test]
    fn states() {
        let rho = parse_state(r#"{"ket":[[0.6,0],[0,0.8]]}"#).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        let m = parse_state(r#"{"rows":2,"cols":2,"entries":[[2,0],[0,0],[0,0],[0,0]]}"#).unwrap();
        assert_eq!(m.trace(), 2.0);
        assert!(parse_state(r#"{"rows":2,"cols":2,"entries":[[0,0],[1,0],[0,0],[0,0]]}"#).is_err());
        assert!(parse_state(r#"{"ket":[[1,0],[0,0],[0,0]]}"#).is_err());
    }

    #[test]
    fn float_round_trip_is_exact() {
        let m = ComplexMatrix::new(1, 2, vec![C64::new(0.1 + 0.2, -1e-300), C64::new(std::f64::consts::PI, 1.0 / 3.0)]).unwrap();
        let text = serde_json::to_string(&MatrixJson::from(&m)).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(ComplexMatrix::try_from(&back).unwrap(), m);
    }
}
