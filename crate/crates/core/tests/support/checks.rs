//! Measurement drivers shared by the core integration tests (small sizes)
//! and the acceptance target (full sizes). Each returns the observed error
//! or count so callers decide on the tolerance.

use std::collections::HashMap;

use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use svsim::adjoint::{
    adjoint_jacobian, batched_expval_and_grad, parameter_shift_jacobian, BatchPlan, JacobianRequest,
};
use svsim::circuit::{singles_doubles_ansatz, strongly_entangling_layers};
use svsim::gates::apply_operation;
use svsim::measurements::{expval, probabilities, sample};
use svsim::simd::{apply_vectorized_op, Backend, CpuFeatures, KernelOptions, KernelTier};
use svsim::statevector::apply_controlled_single_qubit;
use svsim::Complex64;
use svsim::{
    Circuit, GateKind, Hamiltonian, Matrix, Observable, Operation, Pauli, PauliWord, ShardedState,
    StateVector,
};

use super::gen::{self, random_params};
use super::oracle::{self, apply_on_wires, controlled, embed_leading, gate_matrix, Dense, Rows};

#[derive(Debug, Clone, Copy, Default)]
pub struct Sweep {
    pub cases: usize,
    pub max_err: f64,
}

impl Sweep {
    fn record(&mut self, err: f64) {
        self.cases += 1;
        self.max_err = self.max_err.max(err);
    }
}

/// Ordered `k`-tuples of distinct wires in `0..n`.
pub fn ordered_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t: Vec<usize>| {
                let free: Vec<usize> = (0..n).filter(|w| !t.contains(w)).collect();
                free.into_iter().map(move |w| {
                    let mut t2 = t.clone();
                    t2.push(w);
                    t2
                })
            })
            .collect();
    }
    out
}

/// Subsets of `pool` with at most `max` elements, ascending.
pub fn subsets_up_to(pool: &[usize], max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for size in 1..=max {
        for mask in 0u64..1 << pool.len() {
            if mask.count_ones() as usize == size {
                out.push(
                    (0..pool.len())
                        .filter(|&i| mask >> i & 1 == 1)
                        .map(|i| pool[i])
                        .collect(),
                );
            }
        }
    }
    out
}

fn value_patterns(nc: usize) -> Vec<Vec<bool>> {
    if nc == 0 {
        return vec![vec![]];
    }
    let mut alt = vec![true; nc];
    alt[0] = false;
    vec![vec![true; nc], alt]
}

fn random_dense(dim: usize, rng: &mut impl Rng) -> Dense {
    Dense::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn to_lib(m: &Dense) -> Matrix {
    let dim = m.nrows();
    let data: Vec<Complex64> = (0..dim * dim).map(|i| m[(i / dim, i % dim)]).collect();
    Matrix::from_row_major(data).unwrap()
}

/// Every named gate on every ordered wire tuple with every control subset of
/// size ≤ 2 (two control-value patterns each), plus arbitrary matrices on
/// 1–3 wires, against the dense Kronecker oracle.
pub fn kernel_oracle_sweep(ns: impl IntoIterator<Item = usize>, seed: u64) -> Sweep {
    let mut rng = gen::rng(seed);
    let mut sweep = Sweep::default();
    for n in ns {
        let x = gen::random_amplitudes(n, &mut rng);
        let sv = StateVector::from_amplitudes(&x).unwrap();

        let mut cases: Vec<(Operation, Dense)> = Vec::new();
        for kind in GateKind::ALL.iter().copied().filter(|k| !k.is_matrix()) {
            let params = random_params(kind, &mut rng);
            cases.push((
                Operation::gate(kind, &[]).with_params(&params),
                gate_matrix(kind, &params),
            ));
        }
        for k in 1..=3 {
            let m = random_dense(1 << k, &mut rng);
            cases.push((Operation::matrix(&[], to_lib(&m)), m));
        }

        for (template, m) in cases {
            let k = m.nrows().trailing_zeros() as usize;
            if k > n {
                continue;
            }
            let mut embedded: HashMap<Vec<bool>, Rows> = HashMap::new();
            for wires in ordered_tuples(n, k) {
                let rest: Vec<usize> = (0..n).filter(|w| !wires.contains(w)).collect();
                for ctrls in subsets_up_to(&rest, 2) {
                    for values in value_patterns(ctrls.len()) {
                        let rows = embedded.entry(values.clone()).or_insert_with(|| {
                            Rows::from_dense(&embed_leading(&controlled(&m, &values), n))
                        });
                        let mut order = ctrls.clone();
                        order.extend(&wires);
                        let want = apply_on_wires(rows, n, &order, &x);

                        let mut op = template.clone();
                        op.wires = wires.clone();
                        if !ctrls.is_empty() {
                            op = op.controlled(&ctrls, Some(&values));
                        }
                        let mut got = sv.clone();
                        apply_operation(&mut got, &op, false).unwrap();
                        sweep.record(oracle::max_abs_diff(got.amplitudes(), &want));
                    }
                }
            }
        }
    }
    sweep
}

/// `(cases, mismatches)` for the controlled single-qubit loop: every target
/// and every control subset must call the interaction exactly
/// `2^(n-1-|ctrls|)` times.
pub fn controlled_call_counts(max_n: usize) -> (usize, Vec<String>) {
    use std::sync::atomic::{AtomicUsize, Ordering};
    let mut cases = 0;
    let mut bad = Vec::new();
    for n in 1..=max_n {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        for q in 0..n {
            let others: Vec<usize> = (0..n).filter(|&w| w != q).collect();
            for mask in 0u64..1 << others.len() {
                let ctrls: Vec<usize> = (0..others.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| others[i])
                    .collect();
                let calls = AtomicUsize::new(0);
                let f = |_: &mut Complex64, _: &mut Complex64| {
                    calls.fetch_add(1, Ordering::Relaxed);
                };
                apply_controlled_single_qubit(&mut amps, &ctrls, None, q, &f, 1).unwrap();
                let want = 1usize << (n - 1 - ctrls.len());
                let got = calls.load(Ordering::Relaxed);
                cases += 1;
                if got != want {
                    bad.push(format!(
                        "n={n} q={q} ctrls={ctrls:?}: {got} calls, want {want}"
                    ));
                }
            }
        }
    }
    (cases, bad)
}

/// The vectorized gate set on every wire (and every single control) for
/// each `n`, through both vector tiers in portable and (where the CPU allows)
/// native form, streaming on and off, against the scalar loops.
pub fn tier_equivalence(ns: impl IntoIterator<Item = usize>, seed: u64) -> (Sweep, usize) {
    use GateKind::*;
    let mut rng = gen::rng(seed);
    let features = CpuFeatures::detect();
    let mut sweep = Sweep::default();
    let mut fallbacks = 0;
    let singles = [I, X, Y, Z, H, S, T, Phase, RX, RY, RZ, Rot];
    let pairs = [CNOT, CZ, SWAP, IsingXX, IsingXY, IsingYY, IsingZZ];
    for n in ns {
        let sv = gen::random_state(n, &mut rng);
        let mut ops = Vec::new();
        for kind in singles {
            let params = random_params(kind, &mut rng);
            for q in 0..n {
                ops.push(Operation::gate(kind, &[q]).with_params(&params));
                for c in (0..n).filter(|&c| c != q) {
                    let v = rng.random_bool(0.5);
                    ops.push(
                        Operation::gate(kind, &[q])
                            .with_params(&params)
                            .controlled(&[c], Some(&[v])),
                    );
                }
            }
        }
        for kind in pairs {
            let params = random_params(kind, &mut rng);
            for w in ordered_tuples(n, 2) {
                ops.push(Operation::gate(kind, &w).with_params(&params));
            }
        }
        let mut configs = Vec::new();
        for tier in [KernelTier::Vector256, KernelTier::Vector512] {
            for streaming in [false, true] {
                configs.push(
                    KernelOptions::tier(tier)
                        .streaming(streaming)
                        .portable(true),
                );
                if features.supports(tier) {
                    configs.push(KernelOptions::tier(tier).streaming(streaming));
                }
            }
        }
        for op in &ops {
            let mut want = sv.clone();
            apply_operation(&mut want, op, false).unwrap();
            for opts in &configs {
                let mut got = sv.clone();
                let ev = apply_vectorized_op(&mut got, op, opts).unwrap();
                if ev.tier != opts.tier || ev.backend == Backend::Scalar {
                    fallbacks += 1;
                }
                sweep.record(got.max_abs_diff(&want));
            }
        }
    }
    (sweep, fallbacks)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GradientCheck {
    pub circuits: usize,
    pub max_vs_shift: f64,
    pub max_vs_fd: f64,
    /// Adjoint executions per Jacobian, over all circuits (min, max).
    pub adjoint_executions: (usize, usize),
    /// Circuits where parameter shift did not run exactly `2·n_trainable` executions.
    pub shift_count_mismatches: usize,
    pub max_params: usize,
}

fn check_observables(n: usize, rng: &mut impl Rng) -> Vec<Observable> {
    let paulis = [Pauli::X, Pauli::Y, Pauli::Z];
    let mut factors = Vec::new();
    for w in 0..n {
        if rng.random_bool(0.6) {
            factors.push((w, paulis[rng.random_range(0..3)]));
        }
    }
    let word = PauliWord::new(factors).unwrap();
    let ham = Hamiltonian::new(
        vec![0.7, -0.4],
        vec![
            PauliWord::single(n - 1, Pauli::Z),
            PauliWord::single(0, Pauli::X),
        ],
    )
    .unwrap();
    vec![
        Observable::pauli(0, Pauli::Z),
        Observable::pauli(n - 1, Pauli::Y),
        word.into(),
        ham.into(),
    ]
}

/// Random trainable circuits (n ≤ 6, depth ≤ 30) differentiated three ways.
pub fn gradient_cross_check(n_circuits: usize, seed: u64) -> GradientCheck {
    let mut rng = gen::rng(seed);
    let mut out = GradientCheck {
        adjoint_executions: (usize::MAX, 0),
        ..Default::default()
    };
    let h = 1e-6;
    for i in 0..n_circuits {
        let n = 1 + i % 6;
        let depth = rng.random_range(1..=30);
        let circuit = gen::random_shift_circuit(n, depth, &mut rng);
        let observables = check_observables(n, &mut rng);
        let req = JacobianRequest::new(circuit.clone(), observables.clone());
        let sv0 = StateVector::new_zero_state(n).unwrap();
        let adj = adjoint_jacobian(&req, &sv0).unwrap();
        let ps = parameter_shift_jacobian(&req, &sv0).unwrap();
        out.max_vs_shift = out.max_vs_shift.max(adj.max_abs_diff(&ps));

        let base = circuit.params();
        for (col, &p) in req.trainable.iter().enumerate() {
            let eval = |delta: f64| -> Vec<f64> {
                let mut c = circuit.clone();
                let mut params = base.clone();
                params[p] += delta;
                c.set_params(&params).unwrap();
                let sv = c.simulate::<f64>().unwrap();
                observables
                    .iter()
                    .map(|o| expval(&sv, o).unwrap())
                    .collect()
            };
            let (plus, minus) = (eval(h), eval(-h));
            for k in 0..observables.len() {
                let fd = (plus[k] - minus[k]) / (2.0 * h);
                out.max_vs_fd = out.max_vs_fd.max((adj.get(k, col) - fd).abs());
            }
        }
        let e = adj.stats.circuit_executions;
        out.adjoint_executions = (
            out.adjoint_executions.0.min(e),
            out.adjoint_executions.1.max(e),
        );
        if ps.stats.circuit_executions != 2 * req.trainable.len() {
            out.shift_count_mismatches += 1;
        }
        out.max_params = out.max_params.max(req.trainable.len());
        out.circuits += 1;
    }
    out
}

pub fn load_h2() -> Hamiltonian {
    let text = std::fs::read_to_string(super::fixture("h2.ham")).unwrap();
    svsim::parse_hamiltonian(&text)
        .unwrap()
        .to_hamiltonian()
        .unwrap()
}

#[derive(Debug, Clone, Default)]
pub struct BatchingCheck {
    pub runs: usize,
    pub bit_mismatches: Vec<String>,
    pub max_vs_unbatched: f64,
    pub plan_violations: Vec<String>,
}

/// Whether `plan` follows the balanced rule (no batch size) or the
/// fixed-size rule (with one).
pub fn plan_follows_rule(plan: &BatchPlan) -> bool {
    let n = plan.n_observables;
    let sizes = plan.chunk_sizes();
    let contiguous = plan.chunks.iter().scan(0, |next, c| {
        let ok = c.start == *next;
        *next = c.end;
        Some(ok)
    });
    if !contiguous.into_iter().all(|x| x) || sizes.iter().sum::<usize>() != n {
        return false;
    }
    match plan.batch_size {
        None => {
            let g = plan.n_workers;
            let expected: Vec<usize> = (0..g)
                .map(|w| n / g + usize::from(w < n % g))
                .filter(|&s| s > 0)
                .collect();
            sizes == expected && sizes.first().is_none_or(|&s| s == n.div_ceil(g))
        }
        Some(b) => {
            sizes.iter().rev().skip(1).all(|&s| s == b) && sizes.last().is_none_or(|&s| s <= b)
        }
    }
}

/// Energy and gradient for worker counts {1, 2, 4, 8} and batch sizes
/// {none, 1, 3, n} must be bit-identical to the `g = 1` result.
pub fn batching_determinism(seed: u64) -> BatchingCheck {
    let mut rng = gen::rng(seed);
    let h2 = load_h2();
    let n_terms = h2.len();
    let mut circuits = vec![singles_doubles_ansatz(4, 2, &[0.11, -0.07, 0.23]).unwrap()];
    circuits.push(gen::random_shift_circuit(4, 25, &mut rng));
    let mut out = BatchingCheck::default();
    for (ci, circuit) in circuits.iter().enumerate() {
        let reference = batched_expval_and_grad(circuit, &h2, 1, None).unwrap();
        let req = JacobianRequest::new(circuit.clone(), vec![h2.clone().into()]);
        let unbatched = adjoint_jacobian(&req, &StateVector::new_zero_state(4).unwrap()).unwrap();
        let sv = circuit.simulate::<f64>().unwrap();
        let e = expval(&sv, &h2.clone().into()).unwrap();
        out.max_vs_unbatched = out.max_vs_unbatched.max((reference.energy - e).abs()).max(
            unbatched
                .row(0)
                .iter()
                .zip(&reference.gradient)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        );
        for g in [1, 2, 4, 8] {
            for b in [None, Some(1), Some(3), Some(n_terms)] {
                let r = batched_expval_and_grad(circuit, &h2, g, b).unwrap();
                out.runs += 1;
                let same = r.energy.to_bits() == reference.energy.to_bits()
                    && r.gradient.len() == reference.gradient.len()
                    && r.gradient
                        .iter()
                        .zip(&reference.gradient)
                        .all(|(x, y)| x.to_bits() == y.to_bits());
                if !same {
                    out.bit_mismatches
                        .push(format!("circuit {ci}, g={g}, b={b:?}"));
                }
                if !plan_follows_rule(&r.plan) {
                    out.plan_violations.push(format!(
                        "n={n_terms}, g={g}, b={b:?}: {:?}",
                        r.plan.chunk_sizes()
                    ));
                }
            }
        }
    }
    let nine = BatchPlan::new(9, 4, None).unwrap();
    if nine.chunk_sizes() != [3, 2, 2, 2] {
        out.plan_violations
            .push(format!("n=9, g=4: {:?}", nine.chunk_sizes()));
    }
    for n in 0..40 {
        for g in 1..10 {
            for b in [None, Some(1), Some(3), Some(7)] {
                let p = BatchPlan::new(n, g, b).unwrap();
                if !plan_follows_rule(&p) {
                    out.plan_violations
                        .push(format!("n={n}, g={g}, b={b:?}: {:?}", p.chunk_sizes()));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct ShardedCheck {
    pub circuits: usize,
    pub max_state: f64,
    pub max_probs: f64,
    pub sample_mismatches: usize,
    pub max_jacobian: f64,
    pub law_violations: Vec<String>,
}

/// Messages the exchange law predicts for one gate.
pub fn expected_messages(op: &Operation, n_qubits: usize, n_shards: usize) -> usize {
    let ng = n_shards.trailing_zeros() as usize;
    let m = op.wires.iter().filter(|&&w| w < ng).count();
    if m == 0 {
        return 0;
    }
    let active = (0..n_shards)
        .filter(|&s| {
            op.ctrls
                .iter()
                .zip(&op.ctrl_values)
                .filter(|&(&c, _)| c < ng)
                .all(|(&c, &v)| ((s >> (ng - 1 - c)) & 1 == 1) == v)
        })
        .count();
    let _ = n_qubits;
    active * ((1 << m) - 1)
}

/// Random circuits on `n ≤ max_n` qubits for each shard count against the
/// monolithic simulator.
pub fn sharded_equivalence(
    max_n: usize,
    shard_counts: &[usize],
    per_config: usize,
    seed: u64,
) -> ShardedCheck {
    let mut rng = gen::rng(seed);
    let mut out = ShardedCheck::default();
    for n in 3..=max_n {
        for &shards in shard_counts {
            if shards.trailing_zeros() as usize > n {
                continue;
            }
            for _ in 0..per_config {
                let circuit = gen::random_circuit(n, 40, &mut rng);
                let mono = circuit.simulate::<f64>().unwrap();
                let mut st = ShardedState::new_zero_state(n, shards).unwrap();
                for op in &circuit.ops {
                    st.apply_operation(op, false).unwrap();
                    let got = st.log().last().unwrap().messages;
                    let want = expected_messages(op, n, shards);
                    if got != want {
                        out.law_violations.push(format!(
                            "n={n} shards={shards} {} wires={:?} ctrls={:?}: {got} messages, want {want}",
                            op.kind, op.wires, op.ctrls
                        ));
                    }
                    let norm = st.norm_sqr();
                    if (norm - 1.0).abs() > 1e-12 && circuit_is_unitary(op) {
                        out.law_violations
                            .push(format!("norm {norm} after {}", op.kind));
                    }
                }
                let gathered = st.gather();
                out.max_state = out.max_state.max(gathered.max_abs_diff(&mono));

                let p_mono = probabilities(&mono, None).unwrap();
                let p_sh = st.probabilities_root(None).unwrap();
                let wires = gen::distinct_wires(n, rng.random_range(1..=n), &mut rng);
                let m_mono = probabilities(&mono, Some(&wires)).unwrap();
                let m_sh = st.probabilities_root(Some(&wires)).unwrap();
                let diff = |a: &[f64], b: &[f64]| {
                    a.iter()
                        .zip(b)
                        .map(|(x, y)| (x - y).abs())
                        .fold(0.0, f64::max)
                };
                out.max_probs = out
                    .max_probs
                    .max(diff(&p_mono, &p_sh))
                    .max(diff(&m_mono, &m_sh));

                let seed = rng.random::<u64>();
                let s_sh = st.sample_root(2000, seed).unwrap();
                if s_sh != sample(&mono, 2000, seed).unwrap()
                    || s_sh != sample(&gathered, 2000, seed).unwrap()
                {
                    out.sample_mismatches += 1;
                }

                let train = gen::random_circuit(n, 20, &mut rng);
                let observables = check_observables(n, &mut rng);
                let req = JacobianRequest::new(train, observables);
                let a = adjoint_jacobian(&req, &StateVector::new_zero_state(n).unwrap()).unwrap();
                let b = ShardedState::new_zero_state(n, shards)
                    .unwrap()
                    .adjoint_jacobian(&req)
                    .unwrap();
                out.max_jacobian = out.max_jacobian.max(a.max_abs_diff(&b));
                out.circuits += 1;
            }
        }
    }
    // Layered entangling workload at the largest size.
    let n = max_n;
    let params: Vec<f64> = (0..2 * n * 3)
        .map(|_| rng.random_range(-3.0..3.0))
        .collect();
    let c = strongly_entangling_layers(n, 2, &params, 1).unwrap();
    let obs: Vec<Observable> = (0..n).map(|w| Observable::pauli(w, Pauli::Z)).collect();
    let req = JacobianRequest::new(c, obs);
    let a = adjoint_jacobian(&req, &StateVector::new_zero_state(n).unwrap()).unwrap();
    let b = ShardedState::new_zero_state(n, 4)
        .unwrap()
        .adjoint_jacobian(&req)
        .unwrap();
    out.max_jacobian = out.max_jacobian.max(a.max_abs_diff(&b));
    out
}

fn circuit_is_unitary(op: &Operation) -> bool {
    !op.kind.is_matrix()
}

/// Smallest p-value of a chi-square goodness-of-fit test over `n = 1..=max_n`
/// random states and the given seeds. Bins expecting fewer than five counts
/// are pooled.
pub fn sampling_min_p_value(max_n: usize, shots: usize, seeds: &[u64]) -> (f64, usize) {
    let mut rng = gen::rng(2024);
    let mut min_p = 1.0f64;
    let mut tests = 0;
    for n in 1..=max_n {
        let sv = gen::random_state(n, &mut rng);
        let probs = probabilities(&sv, None).unwrap();
        for &seed in seeds {
            let counts = sample(&sv, shots, seed).unwrap().counts();
            let (mut stat, mut bins) = (0.0, 0usize);
            let (mut pooled_exp, mut pooled_obs) = (0.0, 0.0);
            for (p, &c) in probs.iter().zip(&counts) {
                let e = p * shots as f64;
                if e < 5.0 {
                    pooled_exp += e;
                    pooled_obs += c as f64;
                } else {
                    stat += (c as f64 - e).powi(2) / e;
                    bins += 1;
                }
            }
            if pooled_exp > 0.0 {
                stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
                bins += 1;
            }
            let dof = (bins - 1).max(1) as f64;
            let p = 1.0 - ChiSquared::new(dof).unwrap().cdf(stat);
            min_p = min_p.min(p);
            tests += 1;
        }
    }
    (min_p, tests)
}

/// Exact ground energy of the H₂ fixture by dense diagonalization.
pub fn h2_ground_energy() -> f64 {
    let h = load_h2();
    let words: Vec<Vec<(usize, Pauli)>> = h.terms().iter().map(|t| t.factors().to_vec()).collect();
    oracle::ground_energy(&oracle::hamiltonian_matrix(h.coeffs(), &words, 4))
}

/// Circuit built only from named gates, for parser round trips.
pub fn text_circuit(n: usize, depth: usize, rng: &mut impl Rng) -> Circuit {
    gen::random_circuit(n, depth, rng)
}
