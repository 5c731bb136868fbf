use nalgebra::DMatrix;
use qdgate::circuits::{
    reference, target_unitary, trace_checkpoints, transfer_maps, verify_gate, GateKind, GateSpec,
};
use qdgate::hilbert::SpinPreparation;
use qdgate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KINDS: [GateKind; 2] = [GateKind::SwapRoot, GateKind::ControlledSwapRoot];

fn power(u: &DMatrix<C64>, m: u32) -> DMatrix<C64> {
    let mut acc = DMatrix::identity(u.nrows(), u.ncols());
    for _ in 0..m {
        acc = &acc * u;
    }
    acc
}

fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn seeded_preps(seed: u64, n: usize) -> Vec<SpinPreparation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    (0..n)
        .map(|_| SpinPreparation::new(rng.gen_range(0.0..tau), rng.gen_range(0.0..tau), rng.gen_range(0.0..tau)))
        .collect()
}

#[test]
fn ideal_gates_verify_for_m_up_to_8() {
    for kind in KINDS {
        for m in 1..=8 {
            let r = verify_gate(&GateSpec::ideal(kind, m).unwrap(), 50, 7).unwrap();
            assert!(r.passed, "{kind} m={m}: {r:?}");
        }
    }
}

#[test]
fn mth_power_is_swap_or_fredkin() {
    for kind in KINDS {
        let full = target_unitary(kind, 1).unwrap();
        for m in 1..=16 {
            let u = target_unitary(kind, m).unwrap();
            assert!(max_diff(&power(&u, m), &full) < 1e-12, "{kind} m={m}");
            assert!(max_diff(&(u.adjoint() * &u), &DMatrix::identity(u.nrows(), u.ncols())) < 1e-12);
        }
    }
}

#[test]
fn antisymmetric_eigenvalue() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = nalgebra::DVector::<C64>::zeros(4);
    psi[1] = C64::new(h, 0.0);
    psi[2] = C64::new(-h, 0.0);
    for m in 1..=16 {
        let u = target_unitary(GateKind::SwapRoot, m).unwrap();
        let lam = C64::from_polar(1.0, std::f64::consts::PI / m as f64);
        let d = (&u * &psi - &psi * lam).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(d < 1e-12, "m={m}: {d}");
    }
}

#[test]
fn traced_states_match_transcribed_checkpoints() {
    for kind in KINDS {
        for m in [1, 2, 3, 5] {
            let spec = GateSpec::ideal(kind, m).unwrap();
            for prep in seeded_preps(11, 20) {
                let traced = trace_checkpoints(&spec, &prep).unwrap();
                let expected = reference::checkpoints(kind, &prep, m).unwrap();
                assert_eq!(traced.len(), expected.len());
                for (t, e) in traced.iter().zip(&expected) {
                    let d = t.state.max_abs_diff(e).unwrap();
                    assert!(d < 1e-12, "{kind} m={m} {}: {d:e}", t.label);
                }
            }
        }
    }
}

#[test]
fn transfer_maps_are_scaled_targets() {
    for kind in KINDS {
        let spec = GateSpec::ideal(kind, 4).unwrap();
        let maps = transfer_maps(&spec).unwrap();
        assert_eq!(maps.len(), kind.detectors().len());
        let sum: DMatrix<C64> = maps.iter().map(|b| b.adjoint() * b).sum();
        assert!(max_diff(&sum, &DMatrix::identity(sum.nrows(), sum.ncols())) < 1e-12);
    }
}
