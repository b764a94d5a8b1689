//! `qcirc`: command-line front end.
//!
//! Exit codes: 0 on success, 1 on semantic failure (invalid circuit, failed
//! check, operation error), 2 on usage errors. Results go to stdout as JSON;
//! diagnostics go to stderr as JSON lines.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use qcirc_core::deferral::basis_inputs;
use qcirc_core::io::{self, ZetaSidecar};
use qcirc_core::random::random_inputs;
use qcirc_core::schedule::DEFAULT_SCHEDULE_LIMIT;
use qcirc_core::{
    aggregate_measurement, check_faithful, defer_measurements, enumerate_linear_schedules, greedy_schedule,
    red_gates, run, run_shots, transposition_path, Code, DensityOperator, Diagnostic, Error, Poset, QuantumCircuit, Schedule, C64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "qcirc", version, about = "Quantum circuits with measurements and classical channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a circuit file and report diagnostics.
    Validate { circuit: PathBuf },
    /// Print the aggregate measurement (one operator per track).
    Aggregate {
        circuit: PathBuf,
        /// Also report each track's probability on this state.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Execute the circuit with sampled measurement outcomes.
    Run {
        circuit: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        shots: u64,
        /// `greedy` or a schedule file.
        #[arg(long, default_value = "greedy")]
        schedule: String,
    },
    /// Print the greedy schedule, or enumerate linear schedules.
    Schedules {
        circuit: PathBuf,
        #[arg(long)]
        enumerate: bool,
        #[arg(long, default_value_t = DEFAULT_SCHEDULE_LIMIT)]
        limit: usize,
    },
    /// Rewrite the circuit so that every measurement comes last.
    Defer {
        circuit: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Sidecar path; defaults to the output path with `.zeta.json`.
        #[arg(long)]
        zeta: Option<PathBuf>,
    },
    /// Check that `simulator` faithfully simulates `original`.
    CheckFaithful {
        original: PathBuf,
        simulator: PathBuf,
        #[arg(long)]
        zeta: PathBuf,
        /// Comma-separated: `basis`, `random:K`.
        #[arg(long, default_value = "basis")]
        inputs: InputSpec,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Seed for `random:K` inputs.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Adjacent-transposition path between two coherent linear orders.
    TransposePath {
        poset: PathBuf,
        /// Comma-separated elements.
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
}

#[derive(Clone, Debug)]
struct InputSpec {
    basis: bool,
    random: usize,
}

impl FromStr for InputSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut spec = InputSpec { basis: false, random: 0 };
        for part in s.split(',') {
            if part == "basis" {
                spec.basis = true;
            } else if let Some(k) = part.strip_prefix("random:") {
                spec.random += k.parse::<usize>().map_err(|e| format!("bad count in `{part}`: {e}"))?;
            } else {
                return Err(format!("unknown input set `{part}` (expected `basis` or `random:K`)"));
            }
        }
        Ok(spec)
    }
}

/// A semantic failure: diagnostics for stderr, optional JSON for stdout.
struct Failure {
    diagnostics: Vec<Diagnostic>,
    stdout: Option<Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            diagnostics: e.diagnostics(),
            stdout: None,
        }
    }
}

impl From<Vec<Diagnostic>> for Failure {
    fn from(diagnostics: Vec<Diagnostic>) -> Self {
        Failure {
            diagnostics,
            stdout: None,
        }
    }
}

fn diag(code: Code, location: &str, message: impl Into<String>) -> Failure {
    vec![Diagnostic::error(code, location, message)].into()
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| diag(Code::IoError, &path.display().to_string(), e.to_string()))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| diag(Code::IoError, &path.display().to_string(), e.to_string()))
}

fn load_circuit(path: &Path) -> Result<QuantumCircuit, Failure> {
    Ok(io::parse_circuit(&read(path)?)?)
}

fn load_state(path: &Path) -> Result<DensityOperator, Failure> {
    io::parse_state(&read(path)?).map_err(|e| diag(Code::InvalidInput, &path.display().to_string(), e.to_string()))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| diag(Code::InvalidInput, &path.display().to_string(), e.to_string()))
}

fn pretty(v: &Value) -> String {
    io::to_json_string(v)
}

fn split_order(s: &str) -> Vec<String> {
    s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
}

fn execute(cmd: Command) -> Result<Value, Failure> {
    match cmd {
        Command::Validate { circuit } => {
            let c = load_circuit(&circuit)?;
            Ok(json!({ "valid": true, "registers": c.n_registers(), "gates": c.gates.len() }))
        }
        Command::Aggregate { circuit, input } => {
            let c = load_circuit(&circuit)?;
            let rho = input.map(|p| load_state(&p)).transpose()?;
            let agg = aggregate_measurement(&c)?;
            Ok(io::aggregate_to_json(&agg, rho.as_ref())?)
        }
        Command::Run {
            circuit,
            input,
            seed,
            shots,
            schedule,
        } => {
            let c = load_circuit(&circuit)?;
            let rho = load_state(&input)?;
            let x: Schedule = if schedule == "greedy" {
                greedy_schedule(&c)?
            } else {
                load_json(Path::new(&schedule))?
            };
            if shots <= 1 {
                Ok(io::run_to_json(&run(&c, &x, &rho, seed)?))
            } else {
                Ok(io::shots_to_json(&run_shots(&c, &x, &rho, seed, shots)?, shots, seed))
            }
        }
        Command::Schedules {
            circuit,
            enumerate,
            limit,
        } => {
            let c = load_circuit(&circuit)?;
            if enumerate {
                let all = enumerate_linear_schedules(&c, Some(limit))?;
                Ok(json!({ "count": all.len(), "schedules": all }))
            } else {
                Ok(serde_json::to_value(greedy_schedule(&c)?).expect("serializable"))
            }
        }
        Command::Defer { circuit, output, zeta } => {
            let c = load_circuit(&circuit)?;
            let r = defer_measurements(&c)?;
            let zeta_path = zeta.unwrap_or_else(|| sidecar_path(&output));
            write(&output, &(io::serialize_circuit(&r.circuit) + "\n"))?;
            let sidecar = serde_json::to_value(ZetaSidecar::from_result(&r)).expect("serializable");
            write(&zeta_path, &(pretty(&sidecar) + "\n"))?;
            Ok(json!({
                "circuit": output.display().to_string(),
                "zeta": zeta_path.display().to_string(),
                "ancillas": r.ancilla_registers,
                "gates": r.circuit.gates.len(),
                "red_gates": red_gates(&r.circuit)?.len(),
            }))
        }
        Command::CheckFaithful {
            original,
            simulator,
            zeta,
            inputs,
            tol,
            seed,
        } => {
            let c = load_circuit(&original)?;
            let d = load_circuit(&simulator)?;
            let sidecar: ZetaSidecar = load_json(&zeta)?;
            let n = c.n_registers();
            if sidecar.ancillas != (n..d.n_registers()).collect::<Vec<_>>() {
                return Err(diag(
                    Code::InvalidInput,
                    &zeta.display().to_string(),
                    "ancillas must be the simulator's registers after the original ones",
                ));
            }
            let mut kets: Vec<Vec<C64>> = Vec::new();
            if inputs.basis {
                kets.extend(basis_inputs(n));
            }
            kets.extend(random_inputs(&mut ChaCha8Rng::seed_from_u64(seed), n, inputs.random));
            let report = check_faithful(&c, &d, &sidecar.commensuration(), &kets, tol)?;
            let value = serde_json::to_value(&report).expect("serializable");
            if report.passed {
                Ok(value)
            } else {
                Err(Failure {
                    diagnostics: vec![Diagnostic::error(
                        Code::NotFaithful,
                        simulator.display().to_string(),
                        "simulation is not faithful; see the witness on stdout",
                    )],
                    stdout: Some(value),
                })
            }
        }
        Command::TransposePath { poset, from, to } => {
            let p: Poset = load_json(&poset)?;
            let path = transposition_path(&p, &split_order(&from), &split_order(&to))?;
            Ok(json!({ "steps": path.len() - 1, "path": path }))
        }
    }
}

fn sidecar_path(output: &Path) -> PathBuf {
    let name = output.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = name.strip_suffix(".json").unwrap_or(&name);
    output.with_file_name(format!("{stem}.zeta.json"))
}

// A closed pipe downstream is not an error worth reporting.
fn emit(v: &Value) {
    let _ = writeln!(std::io::stdout().lock(), "{}", pretty(v));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(v) => {
            emit(&v);
            ExitCode::SUCCESS
        }
        Err(f) => {
            if let Some(v) = f.stdout {
                emit(&v);
            }
            let mut err = std::io::stderr().lock();
            for d in &f.diagnostics {
                let _ = writeln!(err, "{}", serde_json::to_string(d).expect("serializable"));
            }
            ExitCode::from(1)
        }
    }
}
