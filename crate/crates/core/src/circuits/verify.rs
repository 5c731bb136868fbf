//! Ideal-mode verification: every branch against the target unitary.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::hilbert::SpinPreparation;
use crate::{Error, Result, C64};

use super::{run_circuit, target_unitary, transfer_maps, GateKind, GateSpec};

/// Pass threshold for every error below.
pub const VERIFY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub kind: GateKind,
    pub m: u32,
    pub n_inputs: usize,
    /// Largest `‖e^{-iφ} post − U s‖∞` over inputs and branches.
    pub max_state_error: f64,
    /// Largest `|Σ_k p_k − 1|` over inputs.
    pub max_probability_error: f64,
    /// Largest `‖√K e^{-iφ_k} B_k − U‖∞` over branch operators.
    pub max_matrix_error: f64,
    /// Branch probabilities for the first random preparation.
    pub sample_probabilities: Vec<(String, f64)>,
    pub passed: bool,
}

/// Largest entry modulus.
pub fn max_modulus<'a>(it: impl Iterator<Item = &'a C64>) -> f64 {
    it.map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖e^{-iφ} a − b‖∞` with `φ` chosen to align `a` with `b`.
pub fn phase_aligned_error(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    let ov = a.dotc(b);
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { C64::new(1.0, 0.0) };
    max_modulus((a * phase - b).iter())
}

fn matrix_phase_error(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let ov: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { C64::new(1.0, 0.0) };
    max_modulus((a * phase - b).iter())
}

/// Checks an ideal gate on all basis inputs plus `n_random` seeded product preparations.
pub fn verify_gate(spec: &GateSpec, n_random: usize, seed: u64) -> Result<VerifyReport> {
    spec.validate()?;
    if !spec.is_ideal() {
        return Err(Error::InvalidSpec("verification is defined for ideal scattering".into()));
    }
    let kind = spec.kind;
    let n = kind.n_spins();
    let dim = 1 << n;
    let u = target_unitary(kind, spec.m)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs: Vec<DVector<C64>> = (0..dim)
        .map(|i| {
            let mut v = DVector::zeros(dim);
            v[i] = C64::new(1.0, 0.0);
            v
        })
        .collect();
    let tau = std::f64::consts::TAU;
    for _ in 0..n_random {
        let prep = SpinPreparation::new(rng.gen_range(0.0..tau), rng.gen_range(0.0..tau), rng.gen_range(0.0..tau));
        inputs.push(prep.spin_vector(n));
    }

    let mut max_state_error: f64 = 0.0;
    let mut max_probability_error: f64 = 0.0;
    let mut sample_probabilities = Vec::new();
    for (idx, s) in inputs.iter().enumerate() {
        let run = run_circuit(spec, s)?;
        let oracle = &u * s;
        let total: f64 = run.outcomes.iter().map(|o| o.probability).sum();
        max_probability_error = max_probability_error.max((total - 1.0).abs());
        for o in &run.outcomes {
            max_state_error = max_state_error.max(phase_aligned_error(&o.post_state, &oracle));
        }
        if idx == dim {
            sample_probabilities = run
                .outcomes
                .iter()
                .map(|o| (o.detector.label.to_string(), o.probability))
                .collect();
        }
    }

    let maps = transfer_maps(spec)?;
    let scale = (maps.len() as f64).sqrt();
    let max_matrix_error = maps
        .iter()
        .map(|b| matrix_phase_error(&b.scale(scale), &u))
        .fold(0.0, f64::max);

    let passed = max_state_error < VERIFY_TOL && max_probability_error < VERIFY_TOL && max_matrix_error < VERIFY_TOL;
    Ok(VerifyReport {
        kind,
        m: spec.m,
        n_inputs: inputs.len(),
        max_state_error,
        max_probability_error,
        max_matrix_error,
        sample_probabilities,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_small_m_pass() {
        for m in [1, 2] {
            let r = verify_gate(&GateSpec::ideal(GateKind::SwapRoot, m).unwrap(), 50, 1).unwrap();
            assert!(r.passed, "{r:?}");
            assert_eq!(r.n_inputs, 54);
        }
    }

    #[test]
    fn cswap_pass() {
        for m in 1..=4 {
            let r = verify_gate(&GateSpec::ideal(GateKind::ControlledSwapRoot, m).unwrap(), 50, 2).unwrap();
            assert!(r.passed, "{r:?}");
            assert_eq!(r.sample_probabilities.len(), 8);
        }
    }

    #[test]
    fn wrong_target_is_detected() {
        // Branch operators of m = 2 compared against the m = 3 target must fail.
        let spec = GateSpec::ideal(GateKind::SwapRoot, 2).unwrap();
        let maps = transfer_maps(&spec).unwrap();
        let u3 = target_unitary(GateKind::SwapRoot, 3).unwrap();
        let err = matrix_phase_error(&maps[0].scale(2.0), &u3);
        assert!(err > 1e-3);
    }

    #[test]
    fn phase_alignment() {
        let a = DVector::from_vec(vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)]);
        let b = DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        assert!(phase_aligned_error(&a, &b) < 1e-15);
    }
}
