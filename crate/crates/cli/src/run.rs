//! Circuit execution with JSON output.

use std::path::PathBuf;

use serde_json::{json, Map, Value};
use svsim::adjoint::AdjointState;
use svsim::circuit::parse_circuit;
use svsim::measurements::{expval, probabilities, sample, SampleSet};
use svsim::simd::{trace_dispatch, DispatchEvent, KernelOptions, KernelTier};
use svsim::{Observable, ShardedState, StateVector};

use crate::error::{CliError, CliResult};
use crate::read_file;

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub circuit: PathBuf,
    pub shots: Option<usize>,
    pub seed: u64,
    /// Pauli words in `.ham` term syntax, brackets optional: `Z0 X1`.
    pub observables: Vec<String>,
    pub hamiltonian: Option<PathBuf>,
    pub shards: Option<usize>,
    pub threads: usize,
    pub tier: Option<KernelTier>,
    pub probabilities: bool,
    pub wires: Option<Vec<usize>>,
}

fn parse_word(text: &str) -> CliResult<Observable> {
    let t = text.trim();
    let line = if t.starts_with('[') {
        format!("1 {t}")
    } else {
        format!("1 [{t}]")
    };
    let spec = svsim::parse_hamiltonian(&line)
        .map_err(|e| CliError::Usage(format!("bad observable `{text}`: {}", e.message)))?;
    Ok(spec.to_hamiltonian()?.terms()[0].clone().into())
}

fn samples_json(s: &SampleSet, shots: usize, seed: u64) -> Value {
    let labels = s.bitstring_labels();
    let mut counts = Map::new();
    for l in &labels {
        let c = counts.entry(l.clone()).or_insert(json!(0));
        *c = json!(c.as_u64().unwrap_or(0) + 1);
    }
    json!({ "shots": shots, "seed": seed, "bitstrings": labels, "counts": counts })
}

fn dispatch_json(events: &[DispatchEvent]) -> Value {
    events
        .iter()
        .map(|e| {
            json!({
                "gate": e.gate.name(),
                "wires": e.wires,
                "requested": e.requested.name(),
                "tier": e.tier.name(),
                "backend": format!("{:?}", e.backend),
                "fallback": e.fallback,
            })
        })
        .collect()
}

/// Runs the circuit and reports what was asked for. Probabilities are
/// reported when nothing else is requested.
pub fn cmd_run(cfg: &RunConfig) -> CliResult<Value> {
    if cfg.shards.is_some() && cfg.tier.is_some() {
        return Err(CliError::Usage(
            "--shards and --tier cannot be combined".into(),
        ));
    }
    if cfg.shards.is_some_and(|s| !s.is_power_of_two()) {
        return Err(CliError::Usage("--shards must be a power of two".into()));
    }
    if cfg.shots == Some(0) {
        return Err(CliError::Usage("--shots must be at least 1".into()));
    }
    if cfg.wires.is_some() && !cfg.probabilities {
        return Err(CliError::Usage(
            "--wires only applies together with --probs".into(),
        ));
    }
    let text = read_file(&cfg.circuit)?;
    let circuit = parse_circuit(&text)
        .map_err(|e| CliError::Runtime(format!("{}:\n{e}", cfg.circuit.display())))?;
    let mut observables: Vec<(String, Observable)> = Vec::new();
    for w in &cfg.observables {
        observables.push((w.clone(), parse_word(w)?));
    }
    if let Some(path) = &cfg.hamiltonian {
        let spec = svsim::parse_hamiltonian(&read_file(path)?)
            .map_err(|e| CliError::Runtime(format!("{}:\n{e}", path.display())))?;
        observables.push((path.display().to_string(), spec.to_hamiltonian()?.into()));
    }
    for (name, o) in &observables {
        o.validate(circuit.n_qubits)
            .map_err(|e| CliError::Runtime(format!("observable `{name}`: {e}")))?;
    }
    let want_probs = cfg.probabilities || (cfg.shots.is_none() && observables.is_empty());
    let wires = cfg.wires.as_deref();

    let mut out = Map::new();
    out.insert("n_qubits".into(), json!(circuit.n_qubits));
    out.insert("n_operations".into(), json!(circuit.ops.len()));

    if let Some(shards) = cfg.shards {
        let mut st = ShardedState::new_zero_state(circuit.n_qubits, shards)?
            .with_parallel_shards(cfg.threads > 1);
        st.apply_circuit(&circuit)?;
        out.insert("norm".into(), json!(st.norm_sqr().sqrt()));
        if want_probs {
            out.insert("probabilities".into(), json!(st.probabilities_root(wires)?));
        }
        if let Some(shots) = cfg.shots {
            out.insert(
                "samples".into(),
                samples_json(&st.sample_root(shots, cfg.seed)?, shots, cfg.seed),
            );
        }
        let mut ev = Vec::new();
        for (name, o) in &observables {
            ev.push(json!({ "observable": name, "value": st.expval(o)? }));
        }
        if !ev.is_empty() {
            out.insert("expvals".into(), Value::Array(ev));
        }
        let log = st.log();
        let entries: Vec<Value> = log
            .entries()
            .iter()
            .map(|e| json!({ "label": e.label, "messages": e.messages, "bytes": e.bytes }))
            .collect();
        out.insert(
            "messages".into(),
            json!({
                "shards": shards,
                "total_messages": log.total_messages(),
                "total_bytes": log.total_bytes(),
                "log": entries,
            }),
        );
        return Ok(Value::Object(out));
    }

    let mut sv =
        StateVector::<f64>::new_zero_state(circuit.n_qubits)?.with_threads(cfg.threads.max(1));
    match cfg.tier {
        Some(tier) => {
            let opts = KernelOptions::tier(tier);
            let (res, events) = trace_dispatch(|| {
                circuit.ops.iter().try_for_each(|op| {
                    svsim::simd::apply_vectorized_op(&mut sv, op, &opts).map(|_| ())
                })
            });
            res?;
            out.insert("dispatch".into(), dispatch_json(&events));
        }
        None => circuit.apply_to(&mut sv)?,
    }
    out.insert("norm".into(), json!(sv.norm_sqr().sqrt()));
    if want_probs {
        out.insert("probabilities".into(), json!(probabilities(&sv, wires)?));
    }
    if let Some(shots) = cfg.shots {
        out.insert(
            "samples".into(),
            samples_json(&sample(&sv, shots, cfg.seed)?, shots, cfg.seed),
        );
    }
    let mut ev = Vec::new();
    for (name, o) in &observables {
        ev.push(json!({ "observable": name, "value": expval(&sv, o)? }));
    }
    if !ev.is_empty() {
        out.insert("expvals".into(), Value::Array(ev));
    }
    Ok(Value::Object(out))
}
