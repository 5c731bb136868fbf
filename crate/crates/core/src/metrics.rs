//! Angle-averaged fidelity and efficiency, and 2-D parameter sweeps.
//!
//! Every detector branch is linear in the spin input, `o_k = B_k s`, so the
//! per-angle quantities reduce to small quadratic forms in the real product
//! vector `s(α, β, δ)`. The maps `B_k` are obtained once per parameter point
//! by running the circuit on basis inputs.

use std::f64::consts::TAU;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::circuits::{run_circuit, target_unitary, transfer_maps, GateKind, GateSpec};
use crate::emitter::{EmitterParams, LeakConvention};
use crate::hilbert::SpinPreparation;
use crate::{Error, Result, C64};

/// How the practical output is compared with the ideal one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FidelityConvention {
    /// `Σ_k p_k |⟨U s|ô_k⟩|²` with `ô_k` the normalized branch state.
    #[value(name = "conditional_weighted")]
    ConditionalWeighted,
    /// `|Σ_k ⟨i_k|o_k⟩|²` over the unnormalized detected output.
    #[value(name = "raw_overlap")]
    RawOverlap,
    /// Raw overlap divided by the detected norm `Σ_k ‖o_k‖²`.
    #[default]
    #[value(name = "normalized_overlap")]
    NormalizedOverlap,
}

impl FidelityConvention {
    pub const ALL: [FidelityConvention; 3] = [
        FidelityConvention::ConditionalWeighted,
        FidelityConvention::RawOverlap,
        FidelityConvention::NormalizedOverlap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FidelityConvention::ConditionalWeighted => "conditional_weighted",
            FidelityConvention::RawOverlap => "raw_overlap",
            FidelityConvention::NormalizedOverlap => "normalized_overlap",
        }
    }
}

pub const MIN_QUADRATURE_N: usize = 8;

/// Averages under every fidelity convention at one parameter point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConventionValues {
    pub conditional_weighted: f64,
    pub raw_overlap: f64,
    pub normalized_overlap: f64,
    pub avg_efficiency: f64,
}

impl ConventionValues {
    pub fn fidelity(&self, convention: FidelityConvention) -> f64 {
        match convention {
            FidelityConvention::ConditionalWeighted => self.conditional_weighted,
            FidelityConvention::RawOverlap => self.raw_overlap,
            FidelityConvention::NormalizedOverlap => self.normalized_overlap,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PointMetrics {
    pub avg_fidelity: f64,
    pub avg_efficiency: f64,
    pub quadrature_n: usize,
    pub fidelity_convention: FidelityConvention,
    pub leak_convention: Option<LeakConvention>,
}

/// Quadratic forms for one gate spec.
struct Forms {
    /// `Re Σ_k B_k† B_k`
    efficiency: DMatrix<f64>,
    /// `U† B_k`
    target_overlaps: Vec<DMatrix<C64>>,
    /// `Σ_k A_k† B_k` with `A_k` the ideal branch maps.
    ideal_overlap: DMatrix<C64>,
}

impl Forms {
    fn new(spec: &GateSpec) -> Result<Self> {
        let b = transfer_maps(spec)?;
        let a = if spec.is_ideal() { b.clone() } else { transfer_maps(&spec.as_ideal())? };
        let u_adj = target_unitary(spec.kind, spec.m)?.adjoint();
        let dim = u_adj.nrows();
        let mut q = DMatrix::<C64>::zeros(dim, dim);
        let mut g = DMatrix::<C64>::zeros(dim, dim);
        for (ak, bk) in a.iter().zip(&b) {
            q += bk.adjoint() * bk;
            g += ak.adjoint() * bk;
        }
        Ok(Forms {
            efficiency: q.map(|z| z.re),
            target_overlaps: b.iter().map(|bk| &u_adj * bk).collect(),
            ideal_overlap: g,
        })
    }

    /// `(conditional_weighted, raw_overlap, efficiency)` at one real input.
    fn evaluate(&self, s: &DVector<f64>) -> (f64, f64, f64) {
        let eta = s.dot(&(&self.efficiency * s));
        let sc = s.map(|x| C64::new(x, 0.0));
        let cw: f64 = self
            .target_overlaps
            .iter()
            .map(|m| sc.dot(&(m * &sc)).norm_sqr())
            .sum();
        let raw = sc.dot(&(&self.ideal_overlap * &sc)).norm_sqr();
        (cw, raw, eta)
    }
}

/// Single-spin vectors `(cos θ, sin θ)` on the uniform periodic grid.
fn axis_vectors(n: usize, offset: f64) -> Vec<[f64; 2]> {
    (0..n)
        .map(|j| {
            let (s, c) = (offset + TAU * j as f64 / n as f64).sin_cos();
            [c, s]
        })
        .collect()
}

/// Visits every product input on the `n^N` grid in lexicographic angle order.
fn for_each_grid_input(n_spins: usize, n: usize, offset: f64, mut f: impl FnMut(&DVector<f64>)) {
    let axis = axis_vectors(n, offset);
    let dim = 1 << n_spins;
    let mut idx = vec![0usize; n_spins];
    let mut s = DVector::zeros(dim);
    loop {
        for (k, slot) in s.iter_mut().enumerate() {
            *slot = (0..n_spins)
                .map(|q| axis[idx[q]][(k >> (n_spins - 1 - q)) & 1])
                .product();
        }
        f(&s);
        let mut q = n_spins;
        loop {
            if q == 0 {
                return;
            }
            q -= 1;
            idx[q] += 1;
            if idx[q] < n {
                break;
            }
            idx[q] = 0;
        }
    }
}

fn check_quadrature(n: usize) -> Result<()> {
    if n < MIN_QUADRATURE_N {
        Err(Error::QuadratureTooCoarse(n))
    } else {
        Ok(())
    }
}

/// Grid averages of all conventions, angles `offset + 2πj/n` on every axis.
pub fn averages(spec: &GateSpec, quadrature_n: usize, offset: f64) -> Result<ConventionValues> {
    check_quadrature(quadrature_n)?;
    let forms = Forms::new(spec)?;
    let (mut cw, mut raw, mut norm, mut eta) = (0.0, 0.0, 0.0, 0.0);
    let mut count = 0usize;
    for_each_grid_input(spec.kind.n_spins(), quadrature_n, offset, |s| {
        let (c, r, e) = forms.evaluate(s);
        cw += c;
        raw += r;
        norm += if e > 0.0 { r / e } else { 0.0 };
        eta += e;
        count += 1;
    });
    let k = count as f64;
    Ok(ConventionValues {
        conditional_weighted: cw / k,
        raw_overlap: raw / k,
        normalized_overlap: norm / k,
        avg_efficiency: eta / k,
    })
}

/// Same averages computed by running the full circuit at every grid angle.
/// Slow; kept as an independent reference for [`averages`].
pub fn averages_by_direct_runs(spec: &GateSpec, quadrature_n: usize, offset: f64) -> Result<ConventionValues> {
    check_quadrature(quadrature_n)?;
    let n_spins = spec.kind.n_spins();
    let ideal = spec.as_ideal();
    let mut grid = Vec::new();
    for_each_grid_input(n_spins, quadrature_n, offset, |s| grid.push(s.map(|x| C64::new(x, 0.0))));
    let u = target_unitary(spec.kind, spec.m)?;
    let (mut cw, mut raw, mut norm, mut eta) = (0.0, 0.0, 0.0, 0.0);
    for s in &grid {
        let run = run_circuit(spec, s)?;
        let ideal_run = run_circuit(&ideal, s)?;
        let target = &u * s;
        let e: f64 = run.outcomes.iter().map(|o| o.probability).sum();
        cw += run
            .outcomes
            .iter()
            .map(|o| o.probability * target.dotc(&o.post_state).norm_sqr())
            .sum::<f64>();
        let ov: C64 = ideal_run.branches.iter().zip(&run.branches).map(|(i, o)| i.dotc(o)).sum();
        raw += ov.norm_sqr();
        norm += if e > 0.0 { ov.norm_sqr() / e } else { 0.0 };
        eta += e;
    }
    let k = grid.len() as f64;
    Ok(ConventionValues {
        conditional_weighted: cw / k,
        raw_overlap: raw / k,
        normalized_overlap: norm / k,
        avg_efficiency: eta / k,
    })
}

pub fn point_metrics(spec: &GateSpec, quadrature_n: usize, convention: FidelityConvention) -> Result<PointMetrics> {
    point_metrics_with_offset(spec, quadrature_n, convention, 0.0)
}

pub fn point_metrics_with_offset(
    spec: &GateSpec,
    quadrature_n: usize,
    convention: FidelityConvention,
    offset: f64,
) -> Result<PointMetrics> {
    let v = averages(spec, quadrature_n, offset)?;
    Ok(PointMetrics {
        avg_fidelity: v.fidelity(convention),
        avg_efficiency: v.avg_efficiency,
        quadrature_n,
        fidelity_convention: convention,
        leak_convention: spec.leak(),
    })
}

/// Fidelity and efficiency for a single preparation.
pub fn preparation_metrics(spec: &GateSpec, prep: &SpinPreparation) -> Result<ConventionValues> {
    let forms = Forms::new(spec)?;
    let s = prep.spin_vector(spec.kind.n_spins()).map(|z| z.re);
    let (cw, raw, eta) = forms.evaluate(&s);
    Ok(ConventionValues {
        conditional_weighted: cw,
        raw_overlap: raw,
        normalized_overlap: if eta > 0.0 { raw / eta } else { 0.0 },
        avg_efficiency: eta,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// `(n, F̄, η̄)` in the order requested.
    pub points: Vec<(usize, f64, f64)>,
    /// `|F̄(n_{i+1}) − F̄(n_i)|`
    pub deltas: Vec<f64>,
}

pub fn quadrature_convergence(
    spec: &GateSpec,
    n_list: &[usize],
    convention: FidelityConvention,
) -> Result<ConvergenceReport> {
    let points = n_list
        .iter()
        .map(|&n| point_metrics(spec, n, convention).map(|p| (n, p.avg_fidelity, p.avg_efficiency)))
        .collect::<Result<Vec<_>>>()?;
    let deltas = points.windows(2).map(|w| (w[1].1 - w[0].1).abs()).collect();
    Ok(ConvergenceReport { points, deltas })
}

/// An evenly spaced closed interval; `count = 1` samples `start` only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(start: f64, end: f64, count: usize) -> Self {
        Axis { start, end, count }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.end } else { self.start + step * i as f64 })
            .collect()
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidGrid(format!("{name}: count must be at least 1")));
        }
        if !(self.start.is_finite() && self.end.is_finite()) || self.start < 0.0 || self.end < self.start {
            return Err(Error::InvalidGrid(format!(
                "{name}: need 0 <= start <= end, got [{}, {}]",
                self.start, self.end
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepGrid {
    pub kind: GateKind,
    pub m: u32,
    pub g_over_kappa: Axis,
    pub ks_over_2kappa: Axis,
    pub gamma_over_kappa: f64,
    pub leak: LeakConvention,
    pub fidelity_convention: FidelityConvention,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        self.g_over_kappa.validate("g_over_kappa")?;
        self.ks_over_2kappa.validate("ks_over_2kappa")?;
        if self.m == 0 {
            return Err(Error::InvalidRoot(0));
        }
        if !(self.gamma_over_kappa > 0.0 && self.gamma_over_kappa.is_finite()) {
            return Err(Error::InvalidGrid("gamma_over_kappa must be positive".into()));
        }
        Ok(())
    }

    pub fn spec_at(&self, g_over_kappa: f64, ks_over_2kappa: f64) -> Result<GateSpec> {
        let params = EmitterParams::from_figure_ratios(g_over_kappa, ks_over_2kappa, self.gamma_over_kappa)?;
        GateSpec::realistic(self.kind, self.m, params, self.leak)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub g_over_kappa: f64,
    pub ks_over_2kappa: f64,
    pub avg_fidelity: f64,
    pub avg_efficiency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub grid: SweepGrid,
    pub quadrature_n: usize,
    /// Row-major: `g_over_kappa` outer, `ks_over_2kappa` inner.
    pub rows: Vec<SweepRow>,
}

/// Evaluates the grid. `jobs = 1` runs on the calling thread; `jobs = 0` uses
/// rayon's default pool size. Output order never depends on scheduling.
pub fn sweep(grid: &SweepGrid, quadrature_n: usize, jobs: usize) -> Result<SweepTable> {
    grid.validate()?;
    check_quadrature(quadrature_n)?;
    let points: Vec<(f64, f64)> = grid
        .g_over_kappa
        .values()
        .into_iter()
        .flat_map(|g| grid.ks_over_2kappa.values().into_iter().map(move |k| (g, k)))
        .collect();
    let eval = |&(g, k): &(f64, f64)| -> Result<SweepRow> {
        let p = point_metrics(&grid.spec_at(g, k)?, quadrature_n, grid.fidelity_convention)?;
        Ok(SweepRow {
            g_over_kappa: g,
            ks_over_2kappa: k,
            avg_fidelity: p.avg_fidelity,
            avg_efficiency: p.avg_efficiency,
        })
    };
    let rows = if jobs == 1 {
        points.iter().map(eval).collect::<Result<Vec<_>>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidSpec(format!("thread pool: {e}")))?;
        pool.install(|| points.par_iter().map(eval).collect::<Result<Vec<_>>>())?
    };
    Ok(SweepTable {
        grid: *grid,
        quadrature_n,
        rows,
    })
}

/// Result of one monotonicity check on a sweep table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotoneCheck {
    pub name: String,
    pub steps: usize,
    pub violations: usize,
    /// Largest step against the expected direction (0 if none).
    pub worst: f64,
}

impl MonotoneCheck {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl SweepTable {
    fn n_ks(&self) -> usize {
        self.grid.ks_over_2kappa.count
    }

    pub fn row(&self, gi: usize, ki: usize) -> &SweepRow {
        &self.rows[gi * self.n_ks() + ki]
    }

    fn check(&self, name: &str, seqs: Vec<Vec<f64>>, increasing: bool, tol: f64) -> MonotoneCheck {
        let mut steps = 0;
        let mut violations = 0;
        let mut worst: f64 = 0.0;
        for seq in seqs {
            for w in seq.windows(2) {
                steps += 1;
                let against = if increasing { w[0] - w[1] } else { w[1] - w[0] };
                if against > tol {
                    violations += 1;
                }
                worst = worst.max(against);
            }
        }
        MonotoneCheck {
            name: name.to_string(),
            steps,
            violations,
            worst,
        }
    }

    /// F̄ and η̄ non-decreasing in g at κ_s = 0 (when the grid includes it),
    /// F̄ non-increasing in κ_s at every fixed g.
    pub fn monotone_checks(&self, tol: f64) -> Vec<MonotoneCheck> {
        let ng = self.grid.g_over_kappa.count;
        let nk = self.n_ks();
        let mut out = Vec::new();
        if self.grid.ks_over_2kappa.start == 0.0 {
            let col = |f: fn(&SweepRow) -> f64| vec![(0..ng).map(|g| f(self.row(g, 0))).collect::<Vec<_>>()];
            out.push(self.check("fidelity non-decreasing in g at ks=0", col(|r| r.avg_fidelity), true, tol));
            out.push(self.check("efficiency non-decreasing in g at ks=0", col(|r| r.avg_efficiency), true, tol));
        }
        let rows = (0..ng)
            .map(|g| (0..nk).map(|k| self.row(g, k).avg_fidelity).collect())
            .collect();
        out.push(self.check("fidelity non-increasing in ks at fixed g", rows, false, tol));
        out
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for row in &self.rows {
            wtr.serialize(row)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }
}
