//! Element-by-element evolution of both circuits.

use crate::emitter::{realistic_round_matrix, scatter_coefficients, Incidence, RoundMap};
use crate::hilbert::{HybridState, PathId};
use crate::optics::{
    bs_split, half_wave_action, pbs, pm_pbs, s_gate, s_prime_gate, spin_hadamard, swap_polarization_action,
    BsConvention,
};
use crate::{Error, Result};

use super::{GateKind, GateSpec, Scattering};

/// A labeled intermediate state.
#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub label: String,
    pub state: HybridState,
}

pub(super) fn checkpoint_labels(kind: GateKind) -> Vec<String> {
    match kind {
        GateKind::SwapRoot => (0..=8).map(|k| format!("|Φ_ep⟩_{k}")).collect(),
        GateKind::ControlledSwapRoot => (0..=4).map(|k| format!("|φ_ep⟩_{k}")).collect(),
    }
}

/// Applies QD–cavity rounds using the gate's scattering rules.
struct Rounds {
    map: RoundMap,
    loss: Option<PathId>,
}

impl Rounds {
    fn new(spec: &GateSpec, state: &HybridState) -> Result<Self> {
        let map = match &spec.scattering {
            Scattering::Ideal => RoundMap::ideal(Incidence::Down),
            Scattering::Realistic { params, leak } => {
                realistic_round_matrix(&scatter_coefficients(params)?, Incidence::Down, *leak)
            }
            Scattering::Coefficients { coeffs, leak } => realistic_round_matrix(coeffs, Incidence::Down, *leak),
        };
        let loss = state.layout().loss_path();
        if map.leaked.is_some() && loss.is_none() {
            return Err(Error::InvalidSpec("lossy rounds need a loss path".into()));
        }
        Ok(Rounds { map, loss })
    }

    fn apply(&self, state: HybridState, path: PathId, qubit: usize) -> Result<HybridState> {
        let leak = match (&self.map.leaked, self.loss) {
            (Some(op), Some(loss)) => Some((op, loss)),
            _ => None,
        };
        state.apply_pol_spin_op(path, qubit, &self.map.continuing, leak)
    }

    /// Rounds with each listed spin, in order, on each listed path.
    fn pass(&self, mut state: HybridState, paths: &[PathId], qubits: &[usize]) -> Result<HybridState> {
        for &p in paths {
            for &q in qubits {
                state = self.apply(state, p, q)?;
            }
        }
        Ok(state)
    }
}

/// Runs the circuit for `spec.kind`, calling `record(k, state)` at checkpoint `k`.
pub(super) fn evolve(
    spec: &GateSpec,
    state: HybridState,
    record: &mut dyn FnMut(usize, &HybridState),
) -> Result<HybridState> {
    match spec.kind {
        GateKind::SwapRoot => evolve_swap(spec, state, record),
        GateKind::ControlledSwapRoot => evolve_cswap(spec, state, record),
    }
}

fn hadamards(mut state: HybridState, qubits: &[usize]) -> Result<HybridState> {
    for &q in qubits {
        state = spin_hadamard(state, q)?;
    }
    Ok(state)
}

fn evolve_swap(spec: &GateSpec, state: HybridState, record: &mut dyn FnMut(usize, &HybridState)) -> Result<HybridState> {
    let layout = state.layout().clone();
    let (l, r) = (layout.path("l")?, layout.path("r")?);
    let rounds = Rounds::new(spec, &state)?;
    const A: usize = 0;
    const B: usize = 1;

    record(0, &state);
    let state = pbs(state, l, l, r)?;
    record(1, &state);
    let state = rounds.apply(state, l, A)?;
    record(2, &state);
    let state = rounds.apply(state, l, B)?;
    record(3, &state);
    let state = hadamards(state, &[A, B])?;
    let state = pbs(state, l, l, r)?;
    record(4, &state);
    let state = rounds.pass(state, &[l, r], &[A, B])?;
    record(5, &state);
    let state = state.apply_photon_op(&s_gate(spec.m)?.0, &[r])?;
    record(6, &state);
    let state = bs_split(state, l, r, l, r, BsConvention::Hadamard)?;
    record(7, &state);
    let state = hadamards(state, &[A, B])?;
    record(8, &state);
    Ok(state)
}

fn evolve_cswap(spec: &GateSpec, state: HybridState, record: &mut dyn FnMut(usize, &HybridState)) -> Result<HybridState> {
    let layout = state.layout().clone();
    let p = |name: &str| layout.path(name);
    let (input, l, r) = (p("in")?, p("l")?, p("r")?);
    let (l1, l2, r1, r2) = (p("l1")?, p("l2")?, p("r1")?, p("r2")?);
    let (l3, l4, r3, r4) = (p("l3")?, p("l4")?, p("r3")?, p("r4")?);
    let (d5, d6, d7, d8) = (p("5")?, p("6")?, p("7")?, p("8")?);
    let rounds = Rounds::new(spec, &state)?;
    const C: usize = 0;
    const T1: usize = 1;
    const T2: usize = 2;

    record(0, &state);
    let state = rounds.apply(state, input, C)?;
    let state = pbs(state, input, r, l)?;
    let state = state.apply_photon_op(&swap_polarization_action().0, &[r])?;
    let state = rounds.pass(state, &[r, l], &[T1, T2])?;
    record(1, &state);

    let state = hadamards(state, &[T1, T2])?;
    let state = pbs(state, l, l1, l2)?;
    let state = pbs(state, r, r1, r2)?;
    let state = rounds.pass(state, &[l1, l2, r1, r2], &[T1, T2])?;
    let state = state.apply_photon_op(&s_prime_gate(spec.m)?.0, &[l1])?;
    let state = state.apply_photon_op(&half_wave_action(0.0).0, &[r1])?;
    record(2, &state);

    let state = pm_pbs(state, (r2, r1), (r3, r4))?;
    let state = pm_pbs(state, (l2, l1), (l3, l4))?;
    let state = hadamards(state, &[T1, T2])?;
    record(3, &state);

    let state = bs_split(state, l3, r3, d7, d8, BsConvention::Hadamard)?;
    let state = bs_split(state, l4, r4, d5, d6, BsConvention::Hadamard)?;
    record(4, &state);
    Ok(state)
}
