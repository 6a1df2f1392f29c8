//! Fixed-step gradient descent on `⟨H⟩` for a parametrized ansatz.

use std::time::Instant;

use crate::adjoint::{batched_expval_and_grad_with, BatchOptions};
use crate::circuit::Circuit;
use crate::error::{Result, SimError};
use crate::measurements::Hamiltonian;
use crate::statevector::StateVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VqeOptions {
    pub steps: usize,
    pub learning_rate: f64,
    pub batch: BatchOptions,
}

/// One optimizer step: the energy and gradient norm at the parameters the
/// step started from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VqeStep {
    pub step: usize,
    pub energy: f64,
    pub grad_norm: f64,
    /// Seconds spent evaluating energy and gradient.
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeReport {
    pub steps: Vec<VqeStep>,
    pub params: Vec<f64>,
    /// Energy at the parameters after the last update.
    pub final_energy: f64,
    /// Steps whose energy exceeded the previous step's.
    pub increases: Vec<usize>,
}

impl VqeReport {
    /// Whether the run ended above where it started.
    pub fn ended_higher(&self) -> bool {
        self.steps
            .first()
            .is_some_and(|s| self.final_energy > s.energy)
    }
}

/// Runs `steps` updates `θ ← θ − lr·∇⟨H⟩`. Only the parameters the ansatz
/// marks trainable move.
pub fn run_vqe<F>(
    ansatz: F,
    hamiltonian: &Hamiltonian,
    init: &[f64],
    opts: &VqeOptions,
) -> Result<VqeReport>
where
    F: Fn(&[f64]) -> Result<Circuit>,
{
    if opts.steps == 0 {
        return Err(SimError::invalid(
            "at least one optimization step is required",
        ));
    }
    if !opts.learning_rate.is_finite() || opts.learning_rate <= 0.0 {
        return Err(SimError::invalid(
            "learning rate must be positive and finite",
        ));
    }
    let mut params = init.to_vec();
    let mut rows = Vec::with_capacity(opts.steps);
    let mut increases = Vec::new();
    let mut state0: Option<StateVector> = None;

    for step in 1..=opts.steps {
        let circuit = ansatz(&params)?;
        let s0 = match &state0 {
            Some(s) => s.clone(),
            None => state0
                .insert(StateVector::new_zero_state(circuit.n_qubits)?)
                .clone(),
        };
        let t = Instant::now();
        let res = batched_expval_and_grad_with(&circuit, hamiltonian, &s0, &opts.batch)?;
        let wall_time = t.elapsed().as_secs_f64();
        let grad_norm = res.gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
        if !res.energy.is_finite() || !grad_norm.is_finite() {
            return Err(SimError::Diverged(format!(
                "step {step}: energy {} and gradient norm {grad_norm} with learning rate {}",
                res.energy, opts.learning_rate
            )));
        }
        if rows.last().is_some_and(|r: &VqeStep| res.energy > r.energy) {
            increases.push(step);
        }
        rows.push(VqeStep {
            step,
            energy: res.energy,
            grad_norm,
            wall_time,
        });
        for (&p, g) in circuit.trainable_params().iter().zip(&res.gradient) {
            params[p] -= opts.learning_rate * g;
        }
    }

    let circuit = ansatz(&params)?;
    let sv = circuit.simulate::<f64>()?;
    let final_energy = crate::measurements::expval(&sv, &hamiltonian.clone().into())?;
    if !final_energy.is_finite() {
        return Err(SimError::Diverged(format!("final energy {final_energy}")));
    }
    Ok(VqeReport {
        steps: rows,
        params,
        final_energy,
        increases,
    })
}
