//! Quantum circuits with measurement gates and classical channels.
//!
//! A circuit is a sequence of gates over qubit registers; measurement
//! outcomes travel over classical channels and select which operator a
//! later gate applies. The crate computes a circuit's aggregate measurement
//! (one cumulative operator per track of outcomes), executes circuits
//! stochastically, enumerates schedules, and rewrites circuits so that all
//! measurements happen last.

pub mod catalog;
pub mod circuit;
pub mod deferral;
pub mod diagnostics;
pub mod error;
pub mod exec;
pub mod gates;
pub mod io;
pub mod linalg;
pub mod poset;
pub mod random;
pub mod schedule;
pub mod semantics;
pub mod state;

pub use circuit::{
    is_stage, prerequisites, ready_gates, stage_exits, truncate, validate_circuit, Gate, GateId, GateKind,
    Measurement, OutcomeLabel, Producer, QuantumCircuit, SelectorKey,
};
pub use deferral::{
    check_faithful, classify_measurement, defer_measurements, defer_past_gate, red_gates,
    split_standard_measurements, standardize_measurement, Commensuration, DeferralResult, FaithfulReport,
    MeasurementClass,
};
pub use diagnostics::{Code, Diagnostic, Severity};
pub use error::{Error, Result};
pub use exec::{run, run_shots, RunResult, Step};
pub use io::{parse_circuit, serialize_circuit};
pub use linalg::{dagger, embed, mat_mul, tensor, trace, ComplexMatrix, C64, DEFAULT_TOL};
pub use poset::{differentiating_pairs, transposition_path, LinearOrder, Poset};
pub use schedule::{enumerate_linear_schedules, greedy_schedule, split_bout, validate_schedule, Bout, Schedule};
pub use semantics::{
    aggregate_measurement, bout_operator, cumulative_operator, enumerate_tracks, schedules_equivalent,
    select_measurement, track_probability, AggregateMeasurement, Selected, Track,
};
pub use state::{partial_trace_matrix, DensityOperator};
