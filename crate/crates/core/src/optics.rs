//! Linear optical elements in the `{R, L}` polarization basis, beam
//! splitters acting on path pairs, and single-spin operations.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::fmt;

use nalgebra::Matrix2;
use serde::Serialize;

use crate::hilbert::{HybridState, PathId, Polarization};
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Polarization analyzer vectors in the `{R, L}` basis.
pub const POL_R: [C64; 2] = [ONE, ZERO];
pub const POL_L: [C64; 2] = [ZERO, ONE];
pub const POL_PLUS: [C64; 2] = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)];
pub const POL_MINUS: [C64; 2] = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(-FRAC_1_SQRT_2, 0.0)];

/// A 2×2 polarization transformation in the `{R, L}` basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JonesMatrix(pub Matrix2<C64>);

impl JonesMatrix {
    pub fn identity() -> Self {
        JonesMatrix(Matrix2::identity())
    }

    pub fn diag(a: C64, b: C64) -> Self {
        JonesMatrix(Matrix2::new(a, ZERO, ZERO, b))
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.0
    }

    /// `self` followed by `next` (matrix product `next · self`).
    pub fn then(&self, next: &JonesMatrix) -> JonesMatrix {
        JonesMatrix(next.0 * self.0)
    }

    /// Frobenius deviation of `M†M` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        (self.0.adjoint() * self.0 - Matrix2::identity()).norm()
    }

    pub fn max_abs_diff(&self, other: &JonesMatrix) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Phase shifter `P(α) = e^{iα} I`.
pub fn phase_plate(alpha: f64) -> JonesMatrix {
    let p = C64::from_polar(1.0, alpha);
    JonesMatrix::diag(p, p)
}

/// Half-wave plate at angle β: `e^{iπ/2} [[cos 2β, sin 2β], [sin 2β, −cos 2β]]`.
pub fn half_wave(beta: f64) -> JonesMatrix {
    let JonesMatrix(m) = half_wave_action(beta);
    JonesMatrix(m * C64::i())
}

/// The half-wave plate transformation without its `e^{iπ/2}` retardance
/// factor: `HWP(−π/4)` is `−|R⟩↔|L⟩` and `HWP(0)` is `σ_z`.
pub fn half_wave_action(beta: f64) -> JonesMatrix {
    let (s, c) = (2.0 * beta).sin_cos();
    JonesMatrix(Matrix2::new(
        C64::new(c, 0.0),
        C64::new(s, 0.0),
        C64::new(s, 0.0),
        C64::new(-c, 0.0),
    ))
}

/// Quarter-wave plate at angle γ: `(1/√2) [[1 + i cos 2γ, i sin 2γ], [i sin 2γ, 1 − i cos 2γ]]`.
pub fn quarter_wave(gamma: f64) -> JonesMatrix {
    let (s, c) = (2.0 * gamma).sin_cos();
    let k = FRAC_1_SQRT_2;
    JonesMatrix(Matrix2::new(
        C64::new(k, k * c),
        C64::new(0.0, k * s),
        C64::new(0.0, k * s),
        C64::new(k, -k * c),
    ))
}

fn check_root(m: u32) -> Result<()> {
    if m == 0 {
        Err(Error::InvalidRoot(0))
    } else {
        Ok(())
    }
}

/// `S = e^{iπ/m}|R⟩⟨R| + |L⟩⟨L|`.
pub fn s_gate(m: u32) -> Result<JonesMatrix> {
    check_root(m)?;
    Ok(JonesMatrix::diag(C64::from_polar(1.0, PI / m as f64), ONE))
}

/// `S′ = |R⟩⟨R| − e^{iπ/m}|L⟩⟨L|`.
pub fn s_prime_gate(m: u32) -> Result<JonesMatrix> {
    check_root(m)?;
    Ok(JonesMatrix::diag(ONE, -C64::from_polar(1.0, PI / m as f64)))
}

/// A wave plate in a decomposition recipe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Plate {
    Phase(f64),
    HalfWave(f64),
    QuarterWave(f64),
}

impl Plate {
    pub fn jones(&self) -> JonesMatrix {
        match *self {
            Plate::Phase(a) => phase_plate(a),
            Plate::HalfWave(b) => half_wave(b),
            Plate::QuarterWave(g) => quarter_wave(g),
        }
    }
}

impl fmt::Display for Plate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Plate::Phase(a) => write!(f, "P({a:.6})"),
            Plate::HalfWave(b) => write!(f, "HWP({b:.6})"),
            Plate::QuarterWave(g) => write!(f, "QWP({g:.6})"),
        }
    }
}

/// Plates realizing [`s_gate`], in traversal order.
pub fn decompose_s(m: u32) -> Result<[Plate; 4]> {
    check_root(m)?;
    let m = m as f64;
    Ok([
        Plate::Phase((2.0 * m + 1.0) / (2.0 * m) * PI),
        Plate::QuarterWave(FRAC_PI_4),
        Plate::HalfWave((m + 1.0) / (4.0 * m) * PI),
        Plate::QuarterWave(FRAC_PI_4),
    ])
}

/// Plates realizing [`s_prime_gate`], in traversal order.
pub fn decompose_s_prime(m: u32) -> Result<[Plate; 4]> {
    check_root(m)?;
    let m = m as f64;
    Ok([
        Plate::Phase((1.0 - m) / (2.0 * m) * PI),
        Plate::QuarterWave(FRAC_PI_4),
        Plate::HalfWave(-PI / (4.0 * m)),
        Plate::QuarterWave(FRAC_PI_4),
    ])
}

/// Jones matrix of plates traversed left to right.
pub fn compose(plates: &[Plate]) -> JonesMatrix {
    plates
        .iter()
        .fold(JonesMatrix::identity(), |acc, p| acc.then(&p.jones()))
}

/// Sign convention of a balanced beam splitter on inputs `(l, r)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BsConvention {
    /// `l → (l + r)/√2`, `r → (l − r)/√2`.
    #[default]
    Hadamard,
    /// `l → (l + i r)/√2`, `r → (i l + r)/√2`.
    Symmetric,
}

impl BsConvention {
    fn matrix(self) -> Matrix2<C64> {
        let k = C64::new(FRAC_1_SQRT_2, 0.0);
        let i = C64::new(0.0, FRAC_1_SQRT_2);
        match self {
            BsConvention::Hadamard => Matrix2::new(k, k, k, -k),
            BsConvention::Symmetric => Matrix2::new(k, i, i, k),
        }
    }
}

/// 50:50 beam splitter from `(in_l, in_r)` onto `(out_l, out_r)`.
pub fn bs_split(
    state: HybridState,
    in_l: PathId,
    in_r: PathId,
    out_l: PathId,
    out_r: PathId,
    convention: BsConvention,
) -> Result<HybridState> {
    state.mix_paths((in_l, in_r), &convention.matrix(), (out_l, out_r))
}

/// `{R, L}` polarizing beam splitter: R is transmitted, L reflected.
pub fn pbs(state: HybridState, input: PathId, transmit: PathId, reflect: PathId) -> Result<HybridState> {
    state
        .reroute(input, transmit, Some(Polarization::R))?
        .reroute(input, reflect, Some(Polarization::L))
}

/// Hadamard on polarization: maps `{R, L}` amplitudes to `{+, −}` amplitudes and back.
fn pm_basis_change() -> Matrix2<C64> {
    let k = C64::new(FRAC_1_SQRT_2, 0.0);
    Matrix2::new(k, k, k, -k)
}

/// `{+, −}` polarizing beam splitter with two input ports. `|+⟩` is
/// transmitted and `|−⟩` reflected, so input `a` sends `+` to `c` and `−` to
/// `d`, while input `b` sends `+` to `d` and `−` to `c`. Outputs must be
/// fresh paths.
pub fn pm_pbs(state: HybridState, inputs: (PathId, PathId), outputs: (PathId, PathId)) -> Result<HybridState> {
    let (a, b) = inputs;
    let (c, d) = outputs;
    if [c, d].iter().any(|p| *p == a || *p == b) {
        return Err(Error::InvalidSpec("±PBS outputs must differ from its inputs".into()));
    }
    for out in [c, d] {
        if state.path_norm_sqr(out) > 0.0 {
            return Err(Error::PathOccupied(state.layout().path_name(out).to_string()));
        }
    }
    let h = pm_basis_change();
    // In the rotated frame the R slot holds the + amplitude and L the − amplitude.
    state
        .apply_photon_op(&h, &[a, b])?
        .reroute(a, c, Some(Polarization::R))?
        .reroute(a, d, Some(Polarization::L))?
        .reroute(b, d, Some(Polarization::R))?
        .reroute(b, c, Some(Polarization::L))?
        .apply_photon_op(&h, &[c, d])
}

/// Single-qubit spin corrections used by feed-forward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Pauli {
    I2,
    X,
    Z,
    /// `σ_z σ_x`: σ_x first, then σ_z.
    ZX,
}

impl Pauli {
    pub fn matrix(self) -> Matrix2<C64> {
        match self {
            Pauli::I2 => Matrix2::identity(),
            Pauli::X => Matrix2::new(ZERO, ONE, ONE, ZERO),
            Pauli::Z => Matrix2::new(ONE, ZERO, ZERO, -ONE),
            Pauli::ZX => Pauli::Z.matrix() * Pauli::X.matrix(),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pauli::I2 => "I2",
            Pauli::X => "σx",
            Pauli::Z => "σz",
            Pauli::ZX => "σzσx",
        })
    }
}

pub fn hadamard() -> Matrix2<C64> {
    let k = C64::new(FRAC_1_SQRT_2, 0.0);
    Matrix2::new(k, k, k, -k)
}

pub fn spin_hadamard(state: HybridState, qubit: usize) -> Result<HybridState> {
    state.apply_spin_op(&hadamard(), qubit)
}

pub fn spin_pauli(state: HybridState, qubit: usize, which: Pauli) -> Result<HybridState> {
    state.apply_spin_op(&which.matrix(), qubit)
}

/// `HWP(−π/4)` action used to swap the polarizations of one arm.
pub fn swap_polarization_action() -> JonesMatrix {
    half_wave_action(-FRAC_PI_4)
}

/// Global-phase check used by tests and reports: `a ≈ e^{iφ} b`.
pub fn equal_up_to_phase(a: &JonesMatrix, b: &JonesMatrix, tol: f64) -> bool {
    let inner: C64 = a.0.iter().zip(b.0.iter()).map(|(x, y)| x.conj() * y).sum();
    if inner.norm() < 1e-300 {
        return false;
    }
    let phase = inner / inner.norm();
    (a.0 * phase - b.0).iter().all(|z| z.norm() < tol)
}
