mod support;

use support::checks;
use svsim::simd::{trace_dispatch, Backend, KernelOptions, KernelTier};
use svsim::{GateKind, Operation};

#[test]
fn vector_tiers_match_scalar() {
    let (s, fallbacks) = checks::tier_equivalence(1..=9, 11);
    assert!(s.max_err < 1e-12, "max error {:e}", s.max_err);
    // A one-qubit register is narrower than either vector register.
    assert!(fallbacks > 0);
    let (s, fallbacks) = checks::tier_equivalence([4, 10], 12);
    assert!(s.max_err < 1e-12);
    assert_eq!(fallbacks, 0);
}

#[test]
fn dispatch_trace_reports_the_selected_kernel() {
    let mut rng = support::gen::rng(5);
    let mut sv = support::gen::random_state(6, &mut rng);
    let ops = [
        Operation::gate(GateKind::RX, &[5]).with_params(&[0.3]),
        Operation::gate(GateKind::CNOT, &[0, 5]),
        Operation::gate(GateKind::DoubleExcitation, &[0, 1, 2, 3]).with_params(&[0.1]),
    ];
    let opts = KernelOptions::tier(KernelTier::Vector256).portable(true);
    let (_, events) = trace_dispatch(|| {
        for op in &ops {
            svsim::simd::apply_vectorized_op(&mut sv, op, &opts).unwrap();
        }
    });
    assert_eq!(events.len(), 3);
    assert_eq!(events[0].tier, KernelTier::Vector256);
    assert_eq!(events[0].backend, Backend::Portable);
    assert!(events[0].fallback.is_none());
    assert_eq!(events[2].tier, KernelTier::Scalar);
    assert!(events[2].fallback.is_some());
}

#[test]
fn vectorized_f32_tracks_f64() {
    use svsim::StateVector;
    let mut rng = support::gen::rng(9);
    let sv64 = support::gen::random_state(8, &mut rng);
    let amps32: Vec<_> = sv64
        .amplitudes()
        .iter()
        .map(|z| svsim::Complex32::new(z.re as f32, z.im as f32))
        .collect();
    let mut sv32 = StateVector::<f32>::from_amplitudes(&amps32).unwrap();
    let mut want = sv64.clone();
    let circuit = support::gen::random_shift_circuit(8, 30, &mut rng);
    for op in &circuit.ops {
        svsim::gates::apply_operation(&mut want, op, false).unwrap();
        let opts = KernelOptions::tier(KernelTier::Vector512).portable(true);
        svsim::simd::apply_vectorized_op(&mut sv32, op, &opts).unwrap();
    }
    let err = sv32
        .amplitudes()
        .iter()
        .zip(want.amplitudes())
        .map(|(a, b)| ((a.re as f64 - b.re).powi(2) + (a.im as f64 - b.im).powi(2)).sqrt())
        .fold(0.0, f64::max);
    assert!(err < 1e-5, "{err:e}");
}
