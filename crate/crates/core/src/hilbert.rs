//! Labelled state vectors for one photon plus a register of QD spins.
//!
//! Basis enumeration is fixed: polarization varies fastest, then the photon
//! path (in the order the layout declares them), then the spin register with
//! spin 0 as the most significant bit and `Up` encoded as 0. A spin register
//! `a, b` therefore enumerates `↑↑, ↑↓, ↓↑, ↓↓`, the order used by the gate
//! matrices.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DVector, Matrix2, Matrix4};
use serde::Serialize;

use crate::circuits::GateKind;
use crate::{Error, Result, C64};

const LOSS: &str = "loss";

/// Circular polarization of the photon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Polarization {
    R,
    L,
}

impl Polarization {
    pub const ALL: [Polarization; 2] = [Polarization::R, Polarization::L];

    pub fn index(self) -> usize {
        match self {
            Polarization::R => 0,
            Polarization::L => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Polarization::R => Polarization::L,
            Polarization::L => Polarization::R,
        }
    }
}

/// Electron spin of one QD.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn bit(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit == 0 {
            Spin::Up
        } else {
            Spin::Down
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Up => "↑",
            Spin::Down => "↓",
        })
    }
}

/// Index of a path inside a [`Layout`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathId(usize);

impl PathId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhotonMode {
    pub polarization: Polarization,
    pub path: PathId,
}

/// A computational basis label of the spin register.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinBasis(pub Vec<Spin>);

impl SpinBasis {
    /// Parses a compact label such as `"udd"` (`u` = ↑, `d` = ↓).
    pub fn parse(label: &str) -> Self {
        SpinBasis(
            label
                .chars()
                .map(|c| match c {
                    'u' | '↑' => Spin::Up,
                    'd' | '↓' => Spin::Down,
                    other => panic!("bad spin label character {other:?}"),
                })
                .collect(),
        )
    }

    pub fn from_index(index: usize, n_spins: usize) -> Self {
        SpinBasis(
            (0..n_spins)
                .map(|q| Spin::from_bit((index >> (n_spins - 1 - q)) & 1))
                .collect(),
        )
    }

    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, s| (acc << 1) | s.bit())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for SpinBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// The finite path set and spin count of one circuit.
#[derive(Debug, PartialEq, Eq)]
pub struct Layout {
    paths: Vec<String>,
    loss: Option<usize>,
    n_spins: usize,
}

impl Layout {
    /// Declares a layout. A path named `loss` becomes the absorbing loss path.
    pub fn new(paths: &[&str], n_spins: usize) -> Arc<Self> {
        assert!((1..=16).contains(&n_spins), "unsupported spin count {n_spins}");
        let loss = paths.iter().position(|p| *p == LOSS);
        Arc::new(Layout {
            paths: paths.iter().map(|p| p.to_string()).collect(),
            loss,
            n_spins,
        })
    }

    pub fn path(&self, name: &str) -> Result<PathId> {
        self.paths
            .iter()
            .position(|p| p == name)
            .map(PathId)
            .ok_or_else(|| Error::UnknownPath(name.to_string()))
    }

    pub fn path_name(&self, path: PathId) -> &str {
        &self.paths[path.0]
    }

    pub fn paths(&self) -> impl Iterator<Item = PathId> + '_ {
        (0..self.paths.len()).map(PathId)
    }

    pub fn loss_path(&self) -> Option<PathId> {
        self.loss.map(PathId)
    }

    pub fn n_paths(&self) -> usize {
        self.paths.len()
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn spin_dim(&self) -> usize {
        1 << self.n_spins
    }

    pub fn dim(&self) -> usize {
        2 * self.n_paths() * self.spin_dim()
    }

    #[inline]
    pub fn index(&self, pol: Polarization, path: PathId, spin: usize) -> usize {
        pol.index() + 2 * (path.0 + self.paths.len() * spin)
    }

    fn check_path(&self, path: PathId) -> Result<()> {
        if path.0 < self.paths.len() {
            Ok(())
        } else {
            Err(Error::PathOutOfRange(path.0))
        }
    }

    /// Paths that optical elements may act on.
    fn check_routable(&self, path: PathId) -> Result<()> {
        self.check_path(path)?;
        if Some(path.0) == self.loss {
            Err(Error::LossPathRouted)
        } else {
            Ok(())
        }
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit < self.n_spins {
            Ok(())
        } else {
            Err(Error::SpinOutOfRange {
                qubit,
                n_spins: self.n_spins,
            })
        }
    }

    /// Bit mask of `qubit` inside a spin index.
    fn spin_mask(&self, qubit: usize) -> usize {
        1 << (self.n_spins - 1 - qubit)
    }
}

/// Initial single-spin angles: each spin starts in `cos θ|↑⟩ + sin θ|↓⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpinPreparation {
    pub alpha: f64,
    pub beta: f64,
    /// Third spin (target t₂); ignored by two-spin circuits.
    pub delta: f64,
}

impl SpinPreparation {
    pub fn new(alpha: f64, beta: f64, delta: f64) -> Self {
        SpinPreparation { alpha, beta, delta }
    }

    /// Product spin state over `n_spins` (2 or 3) in the fixed basis order.
    pub fn spin_vector(&self, n_spins: usize) -> DVector<C64> {
        let all = [self.alpha, self.beta, self.delta];
        let mut v = DVector::from_element(1, C64::new(1.0, 0.0));
        for &theta in &all[..n_spins.min(3)] {
            let (s, c) = theta.sin_cos();
            let single = DVector::from_vec(vec![C64::new(c, 0.0), C64::new(s, 0.0)]);
            v = v.kronecker(&single);
        }
        v
    }
}

/// Complex amplitudes over (polarization × path × spin register).
#[derive(Clone, Debug)]
pub struct HybridState {
    layout: Arc<Layout>,
    amps: Vec<C64>,
}

impl HybridState {
    pub fn zero(layout: Arc<Layout>) -> Self {
        let amps = vec![C64::new(0.0, 0.0); layout.dim()];
        HybridState { layout, amps }
    }

    pub fn basis(layout: Arc<Layout>, mode: PhotonMode, spins: &SpinBasis) -> Result<Self> {
        let spin_vec = {
            let mut v = DVector::zeros(layout.spin_dim());
            v[spins.index()] = C64::new(1.0, 0.0);
            v
        };
        Self::from_spin_vector(layout, mode, &spin_vec)
    }

    /// `|mode⟩ ⊗ spin`.
    pub fn from_spin_vector(layout: Arc<Layout>, mode: PhotonMode, spin: &DVector<C64>) -> Result<Self> {
        layout.check_path(mode.path)?;
        if spin.len() != layout.spin_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.spin_dim(),
                got: spin.len(),
            });
        }
        let mut state = Self::zero(layout);
        for (s, amp) in spin.iter().enumerate() {
            let i = state.layout.index(mode.polarization, mode.path, s);
            state.amps[i] = *amp;
        }
        Ok(state)
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, pol: Polarization, path: PathId, spin: usize) -> C64 {
        self.amps[self.layout.index(pol, path, spin)]
    }

    /// Adds `coef` to the amplitude of one basis ket.
    pub fn add_amplitude(&mut self, pol: Polarization, path: PathId, spin: usize, coef: C64) {
        let i = self.layout.index(pol, path, spin);
        self.amps[i] += coef;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn path_norm_sqr(&self, path: PathId) -> f64 {
        let l = &self.layout;
        (0..l.spin_dim())
            .flat_map(|s| Polarization::ALL.map(|p| l.index(p, path, s)))
            .map(|i| self.amps[i].norm_sqr())
            .sum()
    }

    fn slot_norm_sqr(&self, pol: Polarization, path: PathId) -> f64 {
        (0..self.layout.spin_dim())
            .map(|s| self.amplitude(pol, path, s).norm_sqr())
            .sum()
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &HybridState) -> Result<C64> {
        if !Arc::ptr_eq(&self.layout, &other.layout) && *self.layout != *other.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Largest entry-wise deviation between two states of the same layout.
    pub fn max_abs_diff(&self, other: &HybridState) -> Result<f64> {
        if *self.layout != *other.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Applies a 2×2 polarization operator on the listed paths only.
    pub fn apply_photon_op(mut self, op: &Matrix2<C64>, on_paths: &[PathId]) -> Result<Self> {
        for &path in on_paths {
            self.layout.check_routable(path)?;
        }
        let layout = Arc::clone(&self.layout);
        for &path in on_paths {
            for s in 0..layout.spin_dim() {
                let ir = layout.index(Polarization::R, path, s);
                let il = layout.index(Polarization::L, path, s);
                let (r, l) = (self.amps[ir], self.amps[il]);
                self.amps[ir] = op[(0, 0)] * r + op[(0, 1)] * l;
                self.amps[il] = op[(1, 0)] * r + op[(1, 1)] * l;
            }
        }
        Ok(self)
    }

    /// Applies a 2×2 operator to spin `qubit` (acts on every path, loss included).
    pub fn apply_spin_op(mut self, op: &Matrix2<C64>, qubit: usize) -> Result<Self> {
        self.layout.check_qubit(qubit)?;
        let layout = Arc::clone(&self.layout);
        let mask = layout.spin_mask(qubit);
        for s0 in (0..layout.spin_dim()).filter(|s| s & mask == 0) {
            let s1 = s0 | mask;
            for path in layout.paths() {
                for pol in Polarization::ALL {
                    let i0 = layout.index(pol, path, s0);
                    let i1 = layout.index(pol, path, s1);
                    let (a0, a1) = (self.amps[i0], self.amps[i1]);
                    self.amps[i0] = op[(0, 0)] * a0 + op[(0, 1)] * a1;
                    self.amps[i1] = op[(1, 0)] * a0 + op[(1, 1)] * a1;
                }
            }
        }
        Ok(self)
    }

    /// Applies a 4×4 operator on (polarization ⊗ spin `qubit`) for the photon
    /// component on `path`, in the basis `{R↑, R↓, L↑, L↓}`. When `leak` is
    /// given, `leak_op` applied to the same input is added onto the leak path.
    pub fn apply_pol_spin_op(
        mut self,
        path: PathId,
        qubit: usize,
        op: &Matrix4<C64>,
        leak: Option<(&Matrix4<C64>, PathId)>,
    ) -> Result<Self> {
        self.layout.check_routable(path)?;
        self.layout.check_qubit(qubit)?;
        if let Some((_, leak_path)) = leak {
            self.layout.check_path(leak_path)?;
            if leak_path == path {
                return Err(Error::InvalidSpec("leak path must differ from the acted-on path".into()));
            }
        }
        let layout = Arc::clone(&self.layout);
        let mask = layout.spin_mask(qubit);
        for s0 in (0..layout.spin_dim()).filter(|s| s & mask == 0) {
            let s1 = s0 | mask;
            let idx = [
                layout.index(Polarization::R, path, s0),
                layout.index(Polarization::R, path, s1),
                layout.index(Polarization::L, path, s0),
                layout.index(Polarization::L, path, s1),
            ];
            let v = idx.map(|i| self.amps[i]);
            for (row, &i) in idx.iter().enumerate() {
                self.amps[i] = (0..4).map(|c| op[(row, c)] * v[c]).sum();
            }
            if let Some((leak_op, leak_path)) = leak {
                let lidx = [
                    layout.index(Polarization::R, leak_path, s0),
                    layout.index(Polarization::R, leak_path, s1),
                    layout.index(Polarization::L, leak_path, s0),
                    layout.index(Polarization::L, leak_path, s1),
                ];
                for (row, &i) in lidx.iter().enumerate() {
                    self.amps[i] += (0..4).map(|c| leak_op[(row, c)] * v[c]).sum::<C64>();
                }
            }
        }
        Ok(self)
    }

    /// Moves amplitude from one path to another, optionally only one
    /// polarization. The receiving polarization slots must be empty.
    pub fn reroute(mut self, from: PathId, to: PathId, pol_filter: Option<Polarization>) -> Result<Self> {
        self.layout.check_routable(from)?;
        self.layout.check_routable(to)?;
        if from == to {
            return Ok(self);
        }
        let pols: &[Polarization] = match pol_filter {
            Some(Polarization::R) => &[Polarization::R],
            Some(Polarization::L) => &[Polarization::L],
            None => &Polarization::ALL,
        };
        for &pol in pols {
            if self.slot_norm_sqr(pol, to) > 0.0 && self.slot_norm_sqr(pol, from) > 0.0 {
                return Err(Error::PathOccupied(self.layout.path_name(to).to_string()));
            }
        }
        let layout = Arc::clone(&self.layout);
        for &pol in pols {
            for s in 0..layout.spin_dim() {
                let src = layout.index(pol, from, s);
                let dst = layout.index(pol, to, s);
                let a = std::mem::take(&mut self.amps[src]);
                self.amps[dst] += a;
            }
        }
        Ok(self)
    }

    /// Two-path linear mixing: with inputs `(a, b)` and outputs `(c, d)`,
    /// `c = u₀₀·a + u₀₁·b` and `d = u₁₀·a + u₁₁·b`, per polarization and spin.
    /// Outputs outside the input pair must be empty.
    pub fn mix_paths(
        mut self,
        inputs: (PathId, PathId),
        op: &Matrix2<C64>,
        outputs: (PathId, PathId),
    ) -> Result<Self> {
        let (a, b) = inputs;
        let (c, d) = outputs;
        for p in [a, b, c, d] {
            self.layout.check_routable(p)?;
        }
        if a == b || c == d {
            return Err(Error::InvalidSpec("path mixing needs two distinct inputs and outputs".into()));
        }
        for out in [c, d] {
            if out != a && out != b && self.path_norm_sqr(out) > 0.0 {
                return Err(Error::PathOccupied(self.layout.path_name(out).to_string()));
            }
        }
        let layout = Arc::clone(&self.layout);
        for s in 0..layout.spin_dim() {
            for pol in Polarization::ALL {
                let va = std::mem::take(&mut self.amps[layout.index(pol, a, s)]);
                let vb = std::mem::take(&mut self.amps[layout.index(pol, b, s)]);
                self.amps[layout.index(pol, c, s)] = op[(0, 0)] * va + op[(0, 1)] * vb;
                self.amps[layout.index(pol, d, s)] = op[(1, 0)] * va + op[(1, 1)] * vb;
            }
        }
        Ok(self)
    }

    /// Projects the photon on `path` onto the polarization vector `pol`
    /// (given in the `{R, L}` basis), returning the unnormalized spin state
    /// `(⟨pol| ⊗ I) ψ_path`.
    pub fn project_photon(&self, path: PathId, pol: &[C64; 2]) -> Result<DVector<C64>> {
        self.layout.check_path(path)?;
        let l = &self.layout;
        Ok(DVector::from_iterator(
            l.spin_dim(),
            (0..l.spin_dim()).map(|s| {
                pol[0].conj() * self.amplitude(Polarization::R, path, s)
                    + pol[1].conj() * self.amplitude(Polarization::L, path, s)
            }),
        ))
    }

    /// Scales every amplitude.
    pub fn scaled(mut self, factor: C64) -> Self {
        for a in &mut self.amps {
            *a *= factor;
        }
        self
    }

    /// Human-readable list of non-negligible amplitudes.
    pub fn describe(&self, threshold: f64) -> Vec<String> {
        let l = &self.layout;
        let mut out = Vec::new();
        for s in 0..l.spin_dim() {
            for path in l.paths() {
                for pol in Polarization::ALL {
                    let a = self.amplitude(pol, path, s);
                    if a.norm() > threshold {
                        out.push(format!(
                            "({:+.6}{:+.6}i) |{:?}_{}⟩|{}⟩",
                            a.re,
                            a.im,
                            pol,
                            l.path_name(path),
                            SpinBasis::from_index(s, l.n_spins())
                        ));
                    }
                }
            }
        }
        out
    }
}

/// Product initial state: photon `R` on the circuit's input path, spins per `prep`.
pub fn make_initial_state(prep: &SpinPreparation, kind: GateKind) -> HybridState {
    let layout = kind.layout();
    let mode = PhotonMode {
        polarization: Polarization::R,
        path: layout.path(kind.input_path()).expect("declared input path"),
    };
    let spin = prep.spin_vector(layout.n_spins());
    HybridState::from_spin_vector(layout, mode, &spin).expect("dimension matches layout")
}
