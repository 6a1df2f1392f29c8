//! Seeded random inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svsim::Complex64;
use svsim::{Circuit, GateKind, Operation, StateVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_amplitudes(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}

pub fn random_state(n: usize, rng: &mut impl Rng) -> StateVector {
    StateVector::from_amplitudes(&random_amplitudes(n, rng)).unwrap()
}

/// `k` distinct wires in random order.
pub fn distinct_wires(n: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

pub fn random_params(kind: GateKind, rng: &mut impl Rng) -> Vec<f64> {
    (0..kind.n_params())
        .map(|_| rng.random_range(-3.2..3.2))
        .collect()
}

/// Gates with a two-term shift rule.
pub const SHIFT_GATES: [GateKind; 8] = [
    GateKind::RX,
    GateKind::RY,
    GateKind::RZ,
    GateKind::Phase,
    GateKind::Rot,
    GateKind::IsingXX,
    GateKind::IsingYY,
    GateKind::IsingZZ,
];

pub const FIXED_GATES: [GateKind; 6] = [
    GateKind::H,
    GateKind::S,
    GateKind::T,
    GateKind::CNOT,
    GateKind::CZ,
    GateKind::SWAP,
];

/// Random circuit whose parametric gates are all trainable shift gates.
pub fn random_shift_circuit(n: usize, depth: usize, rng: &mut impl Rng) -> Circuit {
    let mut c = Circuit::new(n);
    while c.ops.len() < depth {
        let kind = if rng.random_bool(0.65) {
            SHIFT_GATES[rng.random_range(0..SHIFT_GATES.len())]
        } else {
            FIXED_GATES[rng.random_range(0..FIXED_GATES.len())]
        };
        let Some(arity) = kind.n_wires().filter(|&a| a <= n) else {
            continue;
        };
        let wires = distinct_wires(n, arity, rng);
        let op = Operation::gate(kind, &wires)
            .with_params(&random_params(kind, rng))
            .mark_trainable();
        c.push(op).unwrap();
    }
    c
}

/// Random circuit over every named gate, with occasional controls.
pub fn random_circuit(n: usize, depth: usize, rng: &mut impl Rng) -> Circuit {
    let kinds: Vec<GateKind> = GateKind::ALL
        .iter()
        .copied()
        .filter(|k| !k.is_matrix())
        .collect();
    let mut c = Circuit::new(n);
    while c.ops.len() < depth {
        let kind = kinds[rng.random_range(0..kinds.len())];
        let arity = kind.n_wires().unwrap();
        if arity > n {
            continue;
        }
        let n_ctrls = if arity < n && rng.random_bool(0.2) {
            1
        } else {
            0
        };
        let wires = distinct_wires(n, arity + n_ctrls, rng);
        let mut op =
            Operation::gate(kind, &wires[n_ctrls..]).with_params(&random_params(kind, rng));
        if n_ctrls > 0 {
            op = op.controlled(&wires[..n_ctrls], Some(&[rng.random_bool(0.5)]));
        }
        c.push(op.mark_trainable()).unwrap();
    }
    c
}
