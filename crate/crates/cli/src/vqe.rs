//! Gradient-descent VQE driver.

use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use svsim::adjoint::BatchOptions;
use svsim::circuit::{excitations, singles_doubles_ansatz, strongly_entangling_layers};
use svsim::vqe::{run_vqe, VqeOptions, VqeReport};
use svsim::Circuit;

use crate::error::{CliError, CliResult};
use crate::read_file;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ansatz {
    SinglesDoubles,
    StronglyEntangling { layers: usize },
}

impl FromStr for Ansatz {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim().to_ascii_lowercase();
        if s == "singles-doubles" || s == "sd" {
            return Ok(Ansatz::SinglesDoubles);
        }
        if let Some(rest) = s
            .strip_prefix("strongly-entangling:")
            .or_else(|| s.strip_prefix("sel:"))
        {
            let layers = rest
                .parse()
                .map_err(|_| format!("bad layer count `{rest}`"))?;
            return Ok(Ansatz::StronglyEntangling { layers });
        }
        Err(format!(
            "unknown ansatz `{s}` (singles-doubles, strongly-entangling:L)"
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Init {
    #[default]
    Zero,
    /// Uniform in [-π, π) from the run seed.
    Random,
}

#[derive(Debug, Clone)]
pub struct VqeConfig {
    pub hamiltonian: PathBuf,
    pub ansatz: Ansatz,
    /// Defaults to half the register.
    pub electrons: Option<usize>,
    pub steps: usize,
    pub learning_rate: f64,
    pub workers: Option<usize>,
    pub batch_size: Option<usize>,
    pub forward_threads: Option<usize>,
    pub init: Init,
    pub seed: u64,
}

impl VqeConfig {
    pub fn new(hamiltonian: impl Into<PathBuf>) -> Self {
        VqeConfig {
            hamiltonian: hamiltonian.into(),
            ansatz: Ansatz::SinglesDoubles,
            electrons: None,
            steps: 50,
            learning_rate: 0.2,
            workers: None,
            batch_size: None,
            forward_threads: None,
            init: Init::Zero,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VqeRow {
    pub step: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub wall_time_s: f64,
}

pub const CSV_HEADER: &str = "step,energy,grad_norm,wall_time_s";

#[derive(Debug, Clone, Serialize)]
pub struct VqeOutput {
    pub n_qubits: usize,
    pub n_terms: usize,
    pub n_params: usize,
    pub workers: usize,
    pub batch_size: Option<usize>,
    pub rows: Vec<VqeRow>,
    pub final_energy: f64,
    pub params: Vec<f64>,
    /// Steps whose energy rose above the previous one.
    pub increases: Vec<usize>,
    pub ended_higher: bool,
}

fn build(ansatz: Ansatz, n: usize, electrons: usize, params: &[f64]) -> svsim::Result<Circuit> {
    match ansatz {
        Ansatz::SinglesDoubles => singles_doubles_ansatz(n, electrons, params),
        Ansatz::StronglyEntangling { layers } => strongly_entangling_layers(n, layers, params, 1),
    }
}

pub fn cmd_vqe(cfg: &VqeConfig) -> CliResult<VqeOutput> {
    if cfg.steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    if !(cfg.learning_rate.is_finite() && cfg.learning_rate > 0.0) {
        return Err(CliError::Usage("--lr must be a positive number".into()));
    }
    if cfg.workers == Some(0) || cfg.batch_size == Some(0) {
        return Err(CliError::Usage(
            "--workers and --batch-size start at 1".into(),
        ));
    }
    let spec = svsim::parse_hamiltonian(&read_file(&cfg.hamiltonian)?)
        .map_err(|e| CliError::Runtime(format!("{}:\n{e}", cfg.hamiltonian.display())))?;
    let n = spec.n_qubits;
    let ham = spec.to_hamiltonian()?;
    let electrons = cfg.electrons.unwrap_or(n / 2);
    let n_params = match cfg.ansatz {
        Ansatz::SinglesDoubles => excitations(electrons, n)?.len(),
        Ansatz::StronglyEntangling { layers } => layers * n * 3,
    };
    let init: Vec<f64> = match cfg.init {
        Init::Zero => vec![0.0; n_params],
        Init::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..n_params)
                .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect()
        }
    };
    let mut batch = BatchOptions::default();
    if let Some(w) = cfg.workers {
        batch.workers = w;
    }
    batch.batch_size = cfg.batch_size;
    if let Some(t) = cfg.forward_threads {
        batch.forward_threads = t;
    }
    let workers = batch.workers;
    let opts = VqeOptions {
        steps: cfg.steps,
        learning_rate: cfg.learning_rate,
        batch,
    };
    let report: VqeReport = run_vqe(|p| build(cfg.ansatz, n, electrons, p), &ham, &init, &opts)?;
    Ok(VqeOutput {
        n_qubits: n,
        n_terms: ham.len(),
        n_params,
        workers,
        batch_size: cfg.batch_size,
        rows: report
            .steps
            .iter()
            .map(|s| VqeRow {
                step: s.step,
                energy: s.energy,
                grad_norm: s.grad_norm,
                wall_time_s: s.wall_time,
            })
            .collect(),
        final_energy: report.final_energy,
        params: report.params.clone(),
        ended_higher: report.ended_higher(),
        increases: report.increases,
    })
}
