//! The two gate constructions: target unitaries, detector tables with
//! feed-forward, and the run/trace/transfer entry points.

mod pipeline;
pub mod reference;
mod verify;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::emitter::{EmitterParams, LeakConvention, ScatterCoefficients};
use crate::hilbert::{make_initial_state, HybridState, Layout, PhotonMode, Polarization, SpinPreparation};
use crate::optics::{Pauli, POL_L, POL_MINUS, POL_PLUS, POL_R};
use crate::{Error, Result, C64};

pub use pipeline::Checkpoint;
pub use verify::{max_modulus, phase_aligned_error, verify_gate, VerifyReport, VERIFY_TOL};

const SWAP_PATHS: &[&str] = &["l", "r", "loss"];
const CSWAP_PATHS: &[&str] = &[
    "in", "l", "r", "l1", "l2", "r1", "r2", "l3", "l4", "r3", "r4", "5", "6", "7", "8", "loss",
];

/// Which gate construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
pub enum GateKind {
    /// Two-spin (SWAP)^{1/m}.
    #[value(name = "swap")]
    #[serde(rename = "swap")]
    SwapRoot,
    /// Three-spin controlled-(swap)^{1/m}, control first.
    #[value(name = "cswap")]
    #[serde(rename = "cswap")]
    ControlledSwapRoot,
}

impl GateKind {
    pub fn n_spins(self) -> usize {
        match self {
            GateKind::SwapRoot => 2,
            GateKind::ControlledSwapRoot => 3,
        }
    }

    pub fn layout(self) -> Arc<Layout> {
        match self {
            GateKind::SwapRoot => Layout::new(SWAP_PATHS, 2),
            GateKind::ControlledSwapRoot => Layout::new(CSWAP_PATHS, 3),
        }
    }

    pub fn input_path(self) -> &'static str {
        match self {
            GateKind::SwapRoot => "l",
            GateKind::ControlledSwapRoot => "in",
        }
    }

    pub fn detectors(self) -> &'static [Detector] {
        match self {
            GateKind::SwapRoot => &SWAP_DETECTORS,
            GateKind::ControlledSwapRoot => &CSWAP_DETECTORS,
        }
    }

    /// Default quadrature points per angle.
    pub fn default_quadrature_n(self) -> usize {
        match self {
            GateKind::SwapRoot => 64,
            GateKind::ControlledSwapRoot => 32,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::SwapRoot => "swap",
            GateKind::ControlledSwapRoot => "cswap",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "swap" => Ok(GateKind::SwapRoot),
            "cswap" => Ok(GateKind::ControlledSwapRoot),
            other => Err(Error::InvalidSpec(format!("unknown gate '{other}'"))),
        }
    }
}

/// Scattering rules applied at every round.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Scattering {
    Ideal,
    Realistic { params: EmitterParams, leak: LeakConvention },
    /// Fixed coefficients, bypassing the cavity model.
    Coefficients { coeffs: ScatterCoefficients, leak: LeakConvention },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GateSpec {
    pub kind: GateKind,
    pub m: u32,
    pub scattering: Scattering,
}

impl GateSpec {
    pub fn ideal(kind: GateKind, m: u32) -> Result<Self> {
        let spec = GateSpec {
            kind,
            m,
            scattering: Scattering::Ideal,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn realistic(kind: GateKind, m: u32, params: EmitterParams, leak: LeakConvention) -> Result<Self> {
        let spec = GateSpec {
            kind,
            m,
            scattering: Scattering::Realistic { params, leak },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidRoot(0));
        }
        if let Scattering::Realistic { params, .. } = &self.scattering {
            params.validate()?;
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self.scattering, Scattering::Ideal)
    }

    pub fn with_coefficients(kind: GateKind, m: u32, coeffs: ScatterCoefficients, leak: LeakConvention) -> Result<Self> {
        let spec = GateSpec {
            kind,
            m,
            scattering: Scattering::Coefficients { coeffs, leak },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn leak(&self) -> Option<LeakConvention> {
        match self.scattering {
            Scattering::Ideal => None,
            Scattering::Realistic { leak, .. } | Scattering::Coefficients { leak, .. } => Some(leak),
        }
    }

    /// Same gate with ideal scattering.
    pub fn as_ideal(&self) -> GateSpec {
        GateSpec {
            scattering: Scattering::Ideal,
            ..*self
        }
    }
}

/// The partial-swap block `[[(1+e)/2, (1−e)/2], [(1−e)/2, (1+e)/2]]`, `e = e^{iπ/m}`.
fn partial_swap_block(m: u32) -> [[C64; 2]; 2] {
    let e = C64::from_polar(1.0, PI / m as f64);
    let one = C64::new(1.0, 0.0);
    let a = (one + e) / 2.0;
    let b = (one - e) / 2.0;
    [[a, b], [b, a]]
}

/// Ideal gate matrix in the spin basis (spin 0 most significant, ↑ = 0).
pub fn target_unitary(kind: GateKind, m: u32) -> Result<DMatrix<C64>> {
    if m == 0 {
        return Err(Error::InvalidRoot(0));
    }
    let dim = 1 << kind.n_spins();
    // |↑↓⟩, |↓↑⟩ for two spins; |↓↑↓⟩, |↓↓↑⟩ for three.
    let (i, j) = match kind {
        GateKind::SwapRoot => (1, 2),
        GateKind::ControlledSwapRoot => (5, 6),
    };
    let mut u = DMatrix::identity(dim, dim);
    let blk = partial_swap_block(m);
    u[(i, i)] = blk[0][0];
    u[(i, j)] = blk[0][1];
    u[(j, i)] = blk[1][0];
    u[(j, j)] = blk[1][1];
    Ok(u)
}

/// Polarization analyzer in front of a detector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Analyzer {
    Plus,
    Minus,
    R,
    L,
}

impl Analyzer {
    pub fn vector(self) -> [C64; 2] {
        match self {
            Analyzer::Plus => POL_PLUS,
            Analyzer::Minus => POL_MINUS,
            Analyzer::R => POL_R,
            Analyzer::L => POL_L,
        }
    }
}

impl fmt::Display for Analyzer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Analyzer::Plus => "+",
            Analyzer::Minus => "-",
            Analyzer::R => "R",
            Analyzer::L => "L",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Detector {
    pub label: &'static str,
    pub path: &'static str,
    pub analyzer: Analyzer,
    /// One correction per spin, in spin order.
    pub feed_forward: &'static [Pauli],
}

impl Detector {
    /// Kronecker product of the per-spin corrections.
    pub fn correction(&self) -> DMatrix<C64> {
        self.feed_forward.iter().fold(DMatrix::identity(1, 1), |acc, p| {
            let m = p.matrix();
            acc.kronecker(&DMatrix::from_iterator(2, 2, m.iter().copied()))
        })
    }

    pub fn mode_label(&self) -> String {
        format!("{}@{}", self.analyzer, self.path)
    }
}

use Pauli::{I2, X, Z, ZX};

const SWAP_DETECTORS: [Detector; 4] = [
    Detector { label: "D1", path: "l", analyzer: Analyzer::Plus, feed_forward: &[ZX, ZX] },
    Detector { label: "D2", path: "l", analyzer: Analyzer::Minus, feed_forward: &[I2, I2] },
    Detector { label: "D3", path: "r", analyzer: Analyzer::Plus, feed_forward: &[X, X] },
    Detector { label: "D4", path: "r", analyzer: Analyzer::Minus, feed_forward: &[Z, Z] },
];

const CSWAP_DETECTORS: [Detector; 8] = [
    Detector { label: "D1", path: "5", analyzer: Analyzer::R, feed_forward: &[I2, I2, I2] },
    Detector { label: "D2", path: "5", analyzer: Analyzer::L, feed_forward: &[I2, Z, Z] },
    Detector { label: "D3", path: "6", analyzer: Analyzer::R, feed_forward: &[Z, I2, I2] },
    Detector { label: "D4", path: "6", analyzer: Analyzer::L, feed_forward: &[Z, Z, Z] },
    Detector { label: "D5", path: "7", analyzer: Analyzer::R, feed_forward: &[I2, ZX, ZX] },
    Detector { label: "D6", path: "7", analyzer: Analyzer::L, feed_forward: &[I2, X, X] },
    Detector { label: "D7", path: "8", analyzer: Analyzer::R, feed_forward: &[Z, ZX, ZX] },
    Detector { label: "D8", path: "8", analyzer: Analyzer::L, feed_forward: &[Z, X, X] },
];

/// One measurement branch of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeRecord {
    pub detector: Detector,
    pub probability: f64,
    /// Normalized spin state after feed-forward; zero when the branch is empty.
    #[serde(skip)]
    pub post_state: DVector<C64>,
    /// `|⟨U s|post⟩|²` against the target applied to the input.
    pub conditional_fidelity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitRun {
    pub outcomes: Vec<OutcomeRecord>,
    /// Probability that no detector fires: `1 − Σ p_k`.
    pub loss_probability: f64,
    /// The unnormalized post-feed-forward spin components, one per detector.
    pub branches: Vec<DVector<C64>>,
}

fn check_normalized(v: &DVector<C64>) -> Result<()> {
    let n = v.norm_squared();
    if (n - 1.0).abs() > 1e-10 {
        Err(Error::NotNormalized(n))
    } else {
        Ok(())
    }
}

fn check_kind(spec: &GateSpec, kind: GateKind) -> Result<()> {
    if spec.kind != kind {
        return Err(Error::InvalidSpec(format!("expected a {kind} spec, got {}", spec.kind)));
    }
    Ok(())
}

/// Photon in `R` on the input path with the given spin state.
pub fn initial_state(kind: GateKind, spin: &DVector<C64>) -> Result<HybridState> {
    let layout = kind.layout();
    let mode = PhotonMode {
        polarization: Polarization::R,
        path: layout.path(kind.input_path())?,
    };
    HybridState::from_spin_vector(layout, mode, spin)
}

/// Output state just before detection.
pub fn evolve(spec: &GateSpec, spin: &DVector<C64>) -> Result<HybridState> {
    spec.validate()?;
    let state = initial_state(spec.kind, spin)?;
    pipeline::evolve(spec, state, &mut |_, _| {})
}

/// Projects the final state onto each detector mode and applies its feed-forward.
pub fn detect(kind: GateKind, final_state: &HybridState) -> Result<Vec<DVector<C64>>> {
    let layout = final_state.layout();
    kind.detectors()
        .iter()
        .map(|d| {
            let path = layout.path(d.path)?;
            let raw = final_state.project_photon(path, &d.analyzer.vector())?;
            Ok(d.correction() * raw)
        })
        .collect()
}

/// Runs the circuit on an arbitrary normalized spin state.
pub fn run_circuit(spec: &GateSpec, spin: &DVector<C64>) -> Result<CircuitRun> {
    check_normalized(spin)?;
    let branches = detect(spec.kind, &evolve(spec, spin)?)?;
    let target = target_unitary(spec.kind, spec.m)? * spin;
    let outcomes: Vec<OutcomeRecord> = spec
        .kind
        .detectors()
        .iter()
        .zip(&branches)
        .map(|(d, b)| {
            let p = b.norm_squared();
            let (post, fid) = if p > 0.0 {
                let post = b.unscale(p.sqrt());
                let fid = target.dotc(&post).norm_sqr();
                (post, fid)
            } else {
                (DVector::zeros(b.len()), 0.0)
            };
            OutcomeRecord {
                detector: *d,
                probability: p,
                post_state: post,
                conditional_fidelity: fid,
            }
        })
        .collect();
    let detected: f64 = outcomes.iter().map(|o| o.probability).sum();
    Ok(CircuitRun {
        outcomes,
        loss_probability: 1.0 - detected,
        branches,
    })
}

pub fn run_swap_circuit(spec: &GateSpec, prep: &SpinPreparation) -> Result<CircuitRun> {
    check_kind(spec, GateKind::SwapRoot)?;
    run_circuit(spec, &prep.spin_vector(2))
}

pub fn run_cswap_circuit(spec: &GateSpec, prep: &SpinPreparation) -> Result<CircuitRun> {
    check_kind(spec, GateKind::ControlledSwapRoot)?;
    run_circuit(spec, &prep.spin_vector(3))
}

/// Labeled intermediate states of an ideal run.
pub fn trace_checkpoints(spec: &GateSpec, prep: &SpinPreparation) -> Result<Vec<Checkpoint>> {
    spec.validate()?;
    if !spec.is_ideal() {
        return Err(Error::TraceRequiresIdeal);
    }
    let labels = pipeline::checkpoint_labels(spec.kind);
    let mut out = Vec::with_capacity(labels.len());
    let state = make_initial_state(prep, spec.kind);
    pipeline::evolve(spec, state, &mut |i, s| {
        out.push(Checkpoint {
            label: labels[i].clone(),
            state: s.clone(),
        })
    })?;
    Ok(out)
}

/// Per-detector linear maps `B_k` with `branch_k = B_k · s` for any spin input `s`.
pub fn transfer_maps(spec: &GateSpec) -> Result<Vec<DMatrix<C64>>> {
    let dim = 1 << spec.kind.n_spins();
    let n_det = spec.kind.detectors().len();
    let mut maps = vec![DMatrix::zeros(dim, dim); n_det];
    for col in 0..dim {
        let mut e = DVector::zeros(dim);
        e[col] = C64::new(1.0, 0.0);
        let branches = detect(spec.kind, &evolve(spec, &e)?)?;
        for (map, b) in maps.iter_mut().zip(branches) {
            map.set_column(col, &b);
        }
    }
    Ok(maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::SpinBasis;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn basis(label: &str) -> DVector<C64> {
        let b = SpinBasis::parse(label);
        let mut v = DVector::zeros(1 << b.len());
        v[b.index()] = c(1.0, 0.0);
        v
    }

    #[test]
    fn swap_target_m1_is_swap() {
        let u = target_unitary(GateKind::SwapRoot, 1).unwrap();
        let mut swap = DMatrix::<C64>::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap[(i, j)] = c(1.0, 0.0);
        }
        assert!((u - swap).norm() < 1e-15);
    }

    #[test]
    fn swap_target_m2_block() {
        let u = target_unitary(GateKind::SwapRoot, 2).unwrap();
        assert!((u[(1, 1)] - c(0.5, 0.5)).norm() < 1e-15);
        assert!((u[(1, 2)] - c(0.5, -0.5)).norm() < 1e-15);
        assert!((u[(2, 1)] - c(0.5, -0.5)).norm() < 1e-15);
        assert!((u[(2, 2)] - c(0.5, 0.5)).norm() < 1e-15);
        assert!(target_unitary(GateKind::SwapRoot, 0).is_err());
    }

    #[test]
    fn fredkin_at_m1() {
        let u = target_unitary(GateKind::ControlledSwapRoot, 1).unwrap();
        for col in 0..8 {
            let row = match col {
                5 => 6,
                6 => 5,
                k => k,
            };
            for r in 0..8 {
                let expect = if r == row { 1.0 } else { 0.0 };
                assert!((u[(r, col)] - c(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn detector_corrections() {
        let d1 = &SWAP_DETECTORS[0];
        let zx = d1.correction();
        // σzσx ⊗ σzσx maps |↑↑⟩ to |↓↓⟩ with sign (+1)(+1)·(−1)(−1).
        assert!((zx[(3, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(CSWAP_DETECTORS[7].correction().nrows(), 8);
    }

    #[test]
    fn swap_basis_examples() {
        let spec = GateSpec::ideal(GateKind::SwapRoot, 1).unwrap();
        let run = run_circuit(&spec, &basis("ud")).unwrap();
        let expect = basis("du");
        for o in &run.outcomes {
            assert!((o.probability - 0.25).abs() < 1e-12);
            assert!((expect.dotc(&o.post_state).norm() - 1.0).abs() < 1e-12);
        }
        for m in 1..=5 {
            let spec = GateSpec::ideal(GateKind::SwapRoot, m).unwrap();
            let run = run_circuit(&spec, &basis("uu")).unwrap();
            for o in &run.outcomes {
                assert!((o.conditional_fidelity - 1.0).abs() < 1e-12);
            }
            assert!(run.loss_probability.abs() < 1e-12);
        }
    }

    #[test]
    fn swap_m2_product_input_matches_matrix_oracle() {
        let spec = GateSpec::ideal(GateKind::SwapRoot, 2).unwrap();
        let prep = SpinPreparation::new(std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4, 0.0);
        let s = prep.spin_vector(2);
        let u = target_unitary(GateKind::SwapRoot, 2).unwrap();
        let oracle = &u * &s;
        let run = run_swap_circuit(&spec, &prep).unwrap();
        for o in &run.outcomes {
            let ov = oracle.dotc(&o.post_state);
            let aligned = o.post_state.scale(1.0) * (ov.conj() / ov.norm());
            assert!(verify::max_modulus((aligned - &oracle).iter()) < 1e-12);
        }
    }

    #[test]
    fn cswap_basis_examples() {
        let spec = GateSpec::ideal(GateKind::ControlledSwapRoot, 1).unwrap();
        for (input, output) in [("dud", "ddu"), ("uud", "uud")] {
            let run = run_circuit(&spec, &basis(input)).unwrap();
            let expect = basis(output);
            for o in &run.outcomes {
                assert!((o.probability - 0.125).abs() < 1e-12, "{input} {}", o.detector.label);
                assert!((expect.dotc(&o.post_state).norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spec_checks() {
        assert!(matches!(GateSpec::ideal(GateKind::SwapRoot, 0), Err(Error::InvalidRoot(0))));
        let spec = GateSpec::ideal(GateKind::SwapRoot, 1).unwrap();
        let prep = SpinPreparation::new(0.0, 0.0, 0.0);
        assert!(run_cswap_circuit(&spec, &prep).is_err());
        let bad = DVector::from_element(4, c(1.0, 0.0));
        assert!(matches!(run_circuit(&spec, &bad), Err(Error::NotNormalized(_))));
        assert_eq!("cswap".parse::<GateKind>().unwrap(), GateKind::ControlledSwapRoot);
        assert!("toffoli".parse::<GateKind>().is_err());
    }

    #[test]
    fn trace_rejects_realistic() {
        let p = EmitterParams::resonant(1.0, 0.0, 0.1).unwrap();
        let spec = GateSpec::realistic(GateKind::SwapRoot, 2, p, LeakConvention::Coherent).unwrap();
        let prep = SpinPreparation::new(0.1, 0.2, 0.0);
        assert!(matches!(trace_checkpoints(&spec, &prep), Err(Error::TraceRequiresIdeal)));
    }

    #[test]
    fn transfer_maps_reproduce_direct_runs() {
        let p = EmitterParams::resonant(0.8, 0.3, 0.1).unwrap();
        for kind in [GateKind::SwapRoot, GateKind::ControlledSwapRoot] {
            for leak in [LeakConvention::Coherent, LeakConvention::Lossy] {
                let spec = GateSpec::realistic(kind, 3, p, leak).unwrap();
                let maps = transfer_maps(&spec).unwrap();
                let prep = SpinPreparation::new(0.4, 1.3, -0.7);
                let s = prep.spin_vector(kind.n_spins());
                let run = run_circuit(&spec, &s).unwrap();
                for (b, map) in run.branches.iter().zip(&maps) {
                    assert!(verify::max_modulus((map * &s - b).iter()) < 1e-13);
                }
            }
        }
    }

    #[test]
    fn realistic_loses_norm_only_to_loss_or_leakage() {
        let p = EmitterParams::resonant(1.0, 0.0, 0.1).unwrap();
        let spec = GateSpec::realistic(GateKind::SwapRoot, 2, p, LeakConvention::Lossy).unwrap();
        let s = SpinPreparation::new(0.3, 0.9, 0.0).spin_vector(2);
        let fin = evolve(&spec, &s).unwrap();
        let loss = fin.layout().loss_path().unwrap();
        let run = run_circuit(&spec, &s).unwrap();
        assert!(run.loss_probability >= fin.path_norm_sqr(loss) - 1e-12);
        assert!(run.loss_probability > 0.0 && run.loss_probability < 1.0);
    }
}
