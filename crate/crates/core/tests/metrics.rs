use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qdgate::circuits::{GateKind, GateSpec};
use qdgate::emitter::{EmitterParams, LeakConvention, ScatterCoefficients};
use qdgate::hilbert::SpinPreparation;
use qdgate::metrics::{
    averages, averages_by_direct_runs, preparation_metrics, quadrature_convergence, sweep, Axis, FidelityConvention,
    SweepGrid,
};

fn text_point(kind: GateKind, g: f64, ks: f64, leak: LeakConvention) -> GateSpec {
    GateSpec::realistic(kind, 2, EmitterParams::from_text_ratios(g, ks, 0.1).unwrap(), leak).unwrap()
}

#[test]
fn ideal_limit_coefficients_reproduce_ideal_gate() {
    for kind in [GateKind::SwapRoot, GateKind::ControlledSwapRoot] {
        for leak in [LeakConvention::Coherent, LeakConvention::Lossy] {
            for m in [1, 2, 3] {
                let spec = GateSpec::with_coefficients(kind, m, ScatterCoefficients::IDEAL, leak).unwrap();
                let v = averages(&spec, 8, 0.0).unwrap();
                for conv in FidelityConvention::ALL {
                    assert_abs_diff_eq!(v.fidelity(conv), 1.0, epsilon = 1e-10);
                }
                assert_abs_diff_eq!(v.avg_efficiency, 1.0, epsilon = 1e-10);
            }
        }
    }
}

#[test]
fn large_coupling_approaches_ideal() {
    let spec = GateSpec::realistic(
        GateKind::SwapRoot,
        2,
        EmitterParams::resonant(200.0, 0.0, 0.1).unwrap(),
        LeakConvention::Coherent,
    )
    .unwrap();
    let v = averages(&spec, 16, 0.0).unwrap();
    assert!(v.normalized_overlap > 1.0 - 1e-8);
    assert!(v.avg_efficiency > 1.0 - 1e-4);
}

#[test]
fn quadrature_forms_agree_with_circuit_runs() {
    // Independent path: every grid input is pushed through the full circuit.
    for leak in [LeakConvention::Coherent, LeakConvention::Lossy] {
        let spec = text_point(GateKind::ControlledSwapRoot, 1.3, 0.2, leak);
        let fast = averages(&spec, 8, 0.1).unwrap();
        let slow = averages_by_direct_runs(&spec, 8, 0.1).unwrap();
        for conv in FidelityConvention::ALL {
            assert_abs_diff_eq!(fast.fidelity(conv), slow.fidelity(conv), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(fast.avg_efficiency, slow.avg_efficiency, epsilon = 1e-12);
    }
}

#[test]
fn grid_offset_does_not_change_averages() {
    let spec = text_point(GateKind::SwapRoot, 0.8, 0.1, LeakConvention::Coherent);
    let a = averages(&spec, 64, 0.0).unwrap();
    let b = averages(&spec, 64, 0.37).unwrap();
    for conv in FidelityConvention::ALL {
        assert_abs_diff_eq!(a.fidelity(conv), b.fidelity(conv), epsilon = 1e-9);
    }
}

#[test]
fn self_convergence_at_64() {
    for kind in [GateKind::SwapRoot, GateKind::ControlledSwapRoot] {
        let spec = text_point(kind, 1.1, 0.3, LeakConvention::Coherent);
        let r = quadrature_convergence(&spec, &[64, 128], FidelityConvention::NormalizedOverlap).unwrap();
        assert!(r.deltas[0] < 1e-6, "{kind}: {r:?}");
    }
}

#[test]
fn efficiency_dips_near_g_zero_under_coherent_leak() {
    // Empty cavity: the photon passes unitarily, so η̄ = 1 at g = 0 before
    // exciton absorption sets in.
    let grid = SweepGrid {
        kind: GateKind::SwapRoot,
        m: 2,
        g_over_kappa: Axis::new(0.0, 0.5, 3),
        ks_over_2kappa: Axis::new(0.0, 0.0, 1),
        gamma_over_kappa: 0.1,
        leak: LeakConvention::Coherent,
        fidelity_convention: FidelityConvention::NormalizedOverlap,
    };
    let t = sweep(&grid, 16, 1).unwrap();
    assert_abs_diff_eq!(t.rows[0].avg_efficiency, 1.0, epsilon = 1e-12);
    assert!(t.rows[1].avg_efficiency < 0.5);
}

#[test]
fn parallel_sweep_matches_sequential() {
    let grid = SweepGrid {
        kind: GateKind::SwapRoot,
        m: 3,
        g_over_kappa: Axis::new(0.0, 5.0, 7),
        ks_over_2kappa: Axis::new(0.0, 1.0, 5),
        gamma_over_kappa: 0.1,
        leak: LeakConvention::Lossy,
        fidelity_convention: FidelityConvention::RawOverlap,
    };
    assert_eq!(sweep(&grid, 16, 1).unwrap(), sweep(&grid, 16, 4).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn per_input_values_are_bounded(
        g in 0.0f64..6.0,
        ks in 0.0f64..2.0,
        gamma in 0.01f64..1.0,
        lossy in any::<bool>(),
        alpha in 0.0f64..6.3,
        beta in 0.0f64..6.3,
        delta in 0.0f64..6.3,
        cswap in any::<bool>(),
    ) {
        let kind = if cswap { GateKind::ControlledSwapRoot } else { GateKind::SwapRoot };
        let leak = if lossy { LeakConvention::Lossy } else { LeakConvention::Coherent };
        let spec = GateSpec::realistic(kind, 2, EmitterParams::resonant(g, ks, gamma).unwrap(), leak).unwrap();
        let v = preparation_metrics(&spec, &SpinPreparation::new(alpha, beta, delta)).unwrap();
        let eps = 1e-12;
        prop_assert!(v.avg_efficiency > -eps && v.avg_efficiency < 1.0 + eps);
        for conv in FidelityConvention::ALL {
            let f = v.fidelity(conv);
            prop_assert!(f > -eps && f < 1.0 + eps, "{conv:?} {f}");
        }
        prop_assert!(v.raw_overlap <= v.conditional_weighted + eps);
        prop_assert!(v.conditional_weighted <= v.avg_efficiency + eps);
    }
}
