//! Wide-register gate kernels with runtime tier dispatch.
//!
//! [`apply_vectorized`] runs a gate through a [`KernelTier`]. Kernels are
//! written once against [`ComplexVector`] and instantiated with plain arrays
//! ([`Portable`]) or, for `f64` on x86_64, AVX2 / AVX-512 registers. Gates or
//! tiers without a kernel fall back to the scalar pair loops and say so in
//! the returned [`DispatchEvent`] (also delivered to the dispatch hook).

mod kernel;
mod vector;
#[cfg(target_arch = "x86_64")]
mod x86;

pub use vector::{ComplexVector, Portable};
#[cfg(target_arch = "x86_64")]
pub use x86::{Avx2F64, Avx512F64};

use std::any::TypeId;
use std::cell::RefCell;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU8, Ordering};

use num_complex::Complex;

use crate::circuit::Operation;
use crate::error::{Result, SimError};
use crate::gates::{apply_operation, matrix_of, GateKind};
use crate::matrix::Matrix;
use crate::precision::Real;
use crate::statevector::StateVector;
use kernel::Plan;

/// Environment variable that caps [`detect_tier`].
pub const TIER_ENV: &str = "SVSIM_TIER";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelTier {
    Scalar,
    Vector256,
    Vector512,
}

impl KernelTier {
    pub const ALL: [KernelTier; 3] = [
        KernelTier::Scalar,
        KernelTier::Vector256,
        KernelTier::Vector512,
    ];

    pub fn register_bits(self) -> Option<usize> {
        match self {
            KernelTier::Scalar => None,
            KernelTier::Vector256 => Some(256),
            KernelTier::Vector512 => Some(512),
        }
    }

    /// Complex values per register for `float_bits`-wide components; 1 for Scalar.
    pub fn lane_capacity_for(self, float_bits: usize) -> usize {
        self.register_bits().map_or(1, |b| b / (2 * float_bits))
    }

    pub fn lane_capacity<T: Real>(self) -> usize {
        self.lane_capacity_for(T::BITS)
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelTier::Scalar => "scalar",
            KernelTier::Vector256 => "vector256",
            KernelTier::Vector512 => "vector512",
        }
    }
}

impl fmt::Display for KernelTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelTier {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "scalar" | "lm" => Ok(KernelTier::Scalar),
            "vector256" | "avx2" | "256" => Ok(KernelTier::Vector256),
            "vector512" | "avx512" | "512" => Ok(KernelTier::Vector512),
            other => Err(SimError::invalid(format!(
                "unknown kernel tier `{other}` (expected scalar, vector256 or vector512)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InteractionClass {
    /// Both amplitudes of a pair share one register.
    Intra,
    /// The partner amplitude lives in another register.
    Inter,
}

/// Class of qubit `q` for `T`-precision amplitudes: `Intra` iff its stride
/// is below the tier's lane capacity.
pub fn classify_for<T: Real>(q: usize, n_qubits: usize, tier: KernelTier) -> InteractionClass {
    let stride = 1u64 << (n_qubits - 1 - q);
    if stride < tier.lane_capacity::<T>() as u64 {
        InteractionClass::Intra
    } else {
        InteractionClass::Inter
    }
}

/// [`classify_for`] with `f64` amplitudes.
pub fn classify(q: usize, n_qubits: usize, tier: KernelTier) -> InteractionClass {
    classify_for::<f64>(q, n_qubits, tier)
}

/// Two-qubit kernel specializations, keyed by the classes of `(wires[0], wires[1])`.
///
/// Symmetric gates are invariant under exchanging their wires, so the
/// `(Inter, Intra)` case is served by the `(Intra, Inter)` kernel.
pub fn two_qubit_specializations(symmetric: bool) -> Vec<(InteractionClass, InteractionClass)> {
    use InteractionClass::*;
    let all = [
        (Intra, Intra),
        (Intra, Inter),
        (Inter, Intra),
        (Inter, Inter),
    ];
    all.into_iter()
        .filter(|&c| !(symmetric && c == (Inter, Intra)))
        .collect()
}

/// CPU capabilities relevant to tier selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CpuFeatures {
    pub avx2: bool,
    pub fma: bool,
    pub avx512f: bool,
}

impl CpuFeatures {
    pub fn detect() -> Self {
        #[cfg(target_arch = "x86_64")]
        {
            CpuFeatures {
                avx2: std::arch::is_x86_feature_detected!("avx2"),
                fma: std::arch::is_x86_feature_detected!("fma"),
                avx512f: std::arch::is_x86_feature_detected!("avx512f"),
            }
        }
        #[cfg(not(target_arch = "x86_64"))]
        CpuFeatures::default()
    }

    /// Whether native kernels for `tier` can run.
    pub fn supports(self, tier: KernelTier) -> bool {
        match tier {
            KernelTier::Scalar => true,
            KernelTier::Vector256 => cfg!(target_arch = "x86_64") && self.avx2 && self.fma,
            KernelTier::Vector512 => {
                cfg!(target_arch = "x86_64") && self.avx512f && self.avx2 && self.fma
            }
        }
    }

    pub fn best_tier(self) -> KernelTier {
        *KernelTier::ALL
            .iter()
            .rev()
            .find(|&&t| self.supports(t))
            .unwrap_or(&KernelTier::Scalar)
    }
}

static TIER_OVERRIDE: AtomicU8 = AtomicU8::new(0);

/// Caps the tier chosen by [`detect_tier`]; `None` removes the cap.
pub fn set_tier_override(tier: Option<KernelTier>) {
    let code = match tier {
        None => 0,
        Some(KernelTier::Scalar) => 1,
        Some(KernelTier::Vector256) => 2,
        Some(KernelTier::Vector512) => 3,
    };
    TIER_OVERRIDE.store(code, Ordering::Relaxed);
}

fn tier_override() -> Option<KernelTier> {
    match TIER_OVERRIDE.load(Ordering::Relaxed) {
        1 => Some(KernelTier::Scalar),
        2 => Some(KernelTier::Vector256),
        3 => Some(KernelTier::Vector512),
        _ => std::env::var(TIER_ENV).ok().and_then(|s| s.parse().ok()),
    }
}

/// Highest tier `features` support, capped by `cap`. Never returns a tier
/// the features cannot run.
pub fn select_tier(features: CpuFeatures, cap: Option<KernelTier>) -> KernelTier {
    let best = features.best_tier();
    cap.map_or(best, |c| c.min(best))
}

/// Highest tier the running CPU supports, capped by [`set_tier_override`]
/// or else by the `SVSIM_TIER` environment variable.
pub fn detect_tier() -> KernelTier {
    select_tier(CpuFeatures::detect(), tier_override())
}

static STREAMING_DEFAULT: AtomicBool = AtomicBool::new(false);

/// Process-wide default for [`KernelOptions::streaming`].
pub fn set_streaming_default(on: bool) {
    STREAMING_DEFAULT.store(on, Ordering::Relaxed);
}

pub fn streaming_default() -> bool {
    STREAMING_DEFAULT.load(Ordering::Relaxed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelOptions {
    pub tier: KernelTier,
    /// Non-temporal stores. Changes only how results are written.
    pub streaming: bool,
    /// Use the portable lane instantiation even where native registers exist.
    pub portable: bool,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions {
            tier: detect_tier(),
            streaming: streaming_default(),
            portable: false,
        }
    }
}

impl KernelOptions {
    pub fn tier(tier: KernelTier) -> Self {
        KernelOptions {
            tier,
            streaming: streaming_default(),
            portable: false,
        }
    }

    pub fn streaming(mut self, on: bool) -> Self {
        self.streaming = on;
        self
    }

    pub fn portable(mut self, on: bool) -> Self {
        self.portable = on;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// The scalar pair loops.
    Scalar,
    Portable,
    Native,
}

/// What the dispatcher did with one gate application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DispatchEvent {
    pub gate: GateKind,
    /// Kernel wires, a control first when present.
    pub wires: Vec<usize>,
    pub requested: KernelTier,
    pub tier: KernelTier,
    pub backend: Backend,
    /// Class of each kernel wire under `tier`.
    pub classes: Vec<InteractionClass>,
    pub streaming: bool,
    /// Why the requested tier was not used.
    pub fallback: Option<&'static str>,
}

pub type DispatchHook = Box<dyn Fn(&DispatchEvent)>;

thread_local! {
    static HOOK: RefCell<Option<DispatchHook>> = const { RefCell::new(None) };
}

/// Installs a callback invoked for every [`apply_vectorized`] call made on
/// this thread. Returns the previous hook.
pub fn set_dispatch_hook(hook: Option<DispatchHook>) -> Option<DispatchHook> {
    HOOK.with(|h| std::mem::replace(&mut *h.borrow_mut(), hook))
}

/// Runs `f` and collects the dispatch events it produced on this thread.
pub fn trace_dispatch<R>(f: impl FnOnce() -> R) -> (R, Vec<DispatchEvent>) {
    use std::rc::Rc;
    let events = Rc::new(RefCell::new(Vec::new()));
    let sink = Rc::clone(&events);
    let prev = set_dispatch_hook(Some(Box::new(move |e| sink.borrow_mut().push(e.clone()))));
    let out = f();
    set_dispatch_hook(prev);
    let events = events.borrow().clone();
    (out, events)
}

fn emit(event: &DispatchEvent) {
    HOOK.with(|h| {
        if let Ok(h) = h.try_borrow() {
            if let Some(hook) = h.as_ref() {
                hook(event);
            }
        }
    });
}

/// Whether `op` has a wide kernel: single-qubit gates with at most one
/// control, CNOT, CZ, SWAP and the Ising family.
pub fn is_vectorizable(op: &Operation) -> bool {
    use GateKind::*;
    match op.kind {
        k if k.is_single_qubit() => op.ctrls.len() <= 1,
        CNOT | CZ | SWAP | IsingXX | IsingXY | IsingYY | IsingZZ => op.ctrls.is_empty(),
        _ => false,
    }
}

/// Kernel wires and matrix. A controlled single-qubit gate becomes a
/// two-wire block-diagonal matrix on `[control, target]`.
fn kernel_form(op: &Operation) -> Result<(Vec<usize>, Matrix)> {
    let m = matrix_of(op.kind, &op.params)?;
    if op.ctrls.is_empty() {
        return Ok((op.wires.clone(), m));
    }
    let mut full = Matrix::identity(4);
    let block = if op.ctrl_values[0] { 2 } else { 0 };
    for r in 0..2 {
        for c in 0..2 {
            full[(block + r, block + c)] = m[(r, c)];
        }
    }
    Ok((vec![op.ctrls[0], op.wires[0]], full))
}

/// Applies a gate through the requested tier.
pub fn apply_vectorized<T: Real>(
    sv: &mut StateVector<T>,
    kind: GateKind,
    wires: &[usize],
    params: &[f64],
    tier: KernelTier,
    streaming: bool,
) -> Result<DispatchEvent> {
    let op = Operation::gate(kind, wires).with_params(params);
    apply_vectorized_op(sv, &op, &KernelOptions::tier(tier).streaming(streaming))
}

/// Applies `op` through `opts.tier`, falling back to the scalar loops when
/// the tier has no kernel for it. The returned event is also sent to the
/// dispatch hook.
pub fn apply_vectorized_op<T: Real>(
    sv: &mut StateVector<T>,
    op: &Operation,
    opts: &KernelOptions,
) -> Result<DispatchEvent> {
    let n = sv.n_qubits();
    op.validate(n)?;
    let vectorizable = is_vectorizable(op);
    let (mut wires, matrix) = if vectorizable {
        kernel_form(op)?
    } else {
        (op.all_wires(), Matrix::identity(1))
    };

    let mut event = DispatchEvent {
        gate: op.kind,
        wires: wires.clone(),
        requested: opts.tier,
        tier: KernelTier::Scalar,
        backend: Backend::Scalar,
        classes: Vec::new(),
        streaming: opts.streaming,
        fallback: None,
    };
    let lanes = opts.tier.lane_capacity::<T>();
    let is_f64 = TypeId::of::<T>() == TypeId::of::<f64>();
    let native_ok = is_f64 && CpuFeatures::detect().supports(opts.tier);
    event.fallback = if opts.tier == KernelTier::Scalar {
        None
    } else if !vectorizable {
        Some("no wide kernel for this gate")
    } else if lanes > sv.len() {
        Some("register wider than the state")
    } else if !opts.portable && is_f64 && !native_ok {
        Some("tier not supported by this CPU")
    } else {
        event.tier = opts.tier;
        event.backend = if opts.portable || !is_f64 {
            Backend::Portable
        } else {
            Backend::Native
        };
        None
    };

    if event.tier == KernelTier::Scalar {
        event.classes = wires
            .iter()
            .map(|&w| classify_for::<T>(w, n, KernelTier::Scalar))
            .collect();
        apply_operation(sv, op, false)?;
        emit(&event);
        return Ok(event);
    }

    let mut classes: Vec<_> = wires
        .iter()
        .map(|&w| classify_for::<T>(w, n, opts.tier))
        .collect();
    let mut matrix = matrix;
    if wires.len() == 2
        && op.kind.is_symmetric()
        && classes == [InteractionClass::Inter, InteractionClass::Intra]
    {
        wires.swap(0, 1);
        classes.swap(0, 1);
        // A no-op for symmetric matrices; kept so the exchange is exact for any input.
        matrix = swap_wires_of(&matrix);
    }
    event.classes = classes;

    let plan = Plan::new(n, &wires, &matrix, lanes)?;
    let threads = sv.threads();
    let amps = sv.amplitudes_mut();
    match event.backend {
        Backend::Native => run_native(amps, &plan, opts, threads),
        _ => run_portable(amps, &plan, lanes, threads),
    }
    emit(&event);
    Ok(event)
}

/// `S M S` with `S` the two-wire SWAP permutation.
fn swap_wires_of(m: &Matrix) -> Matrix {
    let p = |i: usize| ((i & 1) << 1) | (i >> 1);
    let mut out = Matrix::zeros(4);
    for r in 0..4 {
        for c in 0..4 {
            out[(p(r), p(c))] = m[(r, c)];
        }
    }
    out
}

fn run_portable<T: Real>(amps: &mut [Complex<T>], plan: &Plan, lanes: usize, threads: usize) {
    match lanes {
        2 => kernel::run_portable::<Portable<T, 2>>(amps, plan, threads),
        4 => kernel::run_portable::<Portable<T, 4>>(amps, plan, threads),
        8 => kernel::run_portable::<Portable<T, 8>>(amps, plan, threads),
        16 => kernel::run_portable::<Portable<T, 16>>(amps, plan, threads),
        other => unreachable!("no portable vector with {other} lanes"),
    }
}

#[allow(unused_variables)]
fn run_native<T: Real>(amps: &mut [Complex<T>], plan: &Plan, opts: &KernelOptions, threads: usize) {
    #[cfg(target_arch = "x86_64")]
    {
        assert_eq!(TypeId::of::<T>(), TypeId::of::<f64>());
        // SAFETY: T is f64 (checked above), so the slice reinterpretation is
        // the identity.
        let amps = unsafe {
            std::slice::from_raw_parts_mut(amps.as_mut_ptr() as *mut Complex<f64>, amps.len())
        };
        // SAFETY: the dispatcher only picks Native after `CpuFeatures::supports`.
        unsafe {
            match opts.tier {
                KernelTier::Vector256 => {
                    kernel::native::run_avx2(amps, plan, opts.streaming, threads)
                }
                KernelTier::Vector512 => {
                    kernel::native::run_avx512(amps, plan, opts.streaming, threads)
                }
                KernelTier::Scalar => unreachable!(),
            }
        }
    }
    #[cfg(not(target_arch = "x86_64"))]
    unreachable!("native kernels exist only on x86_64");
}
