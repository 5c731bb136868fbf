//! Intermediate states of both circuits written out term by term, as closed
//! forms in the preparation angles. These are independent of the pipeline and
//! serve as regression fixtures for [`super::trace_checkpoints`].

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::hilbert::{HybridState, Polarization, SpinBasis, SpinPreparation};
use crate::optics::{POL_L, POL_MINUS, POL_PLUS, POL_R};
use crate::{Result, C64};

use super::GateKind;

struct Builder {
    state: HybridState,
}

impl Builder {
    fn new(kind: GateKind) -> Self {
        Builder {
            state: HybridState::zero(kind.layout()),
        }
    }

    /// Adds `coef · |pol_path⟩|spins⟩`.
    fn add(&mut self, path: &str, pol: [C64; 2], coef: C64, spins: &str) -> &mut Self {
        let p = self.state.layout().path(path).expect("declared path");
        let s = SpinBasis::parse(spins).index();
        self.state.add_amplitude(Polarization::R, p, s, coef * pol[0]);
        self.state.add_amplitude(Polarization::L, p, s, coef * pol[1]);
        self
    }

    fn finish(self) -> HybridState {
        self.state
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

struct Angles {
    ca: f64,
    sa: f64,
    cb: f64,
    sb: f64,
    cd: f64,
    sd: f64,
    /// `e^{iπ/m}`
    e: C64,
    /// `(1 + e)/2`
    p: C64,
    /// `(1 − e)/2`
    q: C64,
}

impl Angles {
    fn new(prep: &SpinPreparation, m: u32) -> Self {
        let (sa, ca) = prep.alpha.sin_cos();
        let (sb, cb) = prep.beta.sin_cos();
        let (sd, cd) = prep.delta.sin_cos();
        let e = C64::from_polar(1.0, PI / m as f64);
        Angles {
            ca,
            sa,
            cb,
            sb,
            cd,
            sd,
            e,
            p: (re(1.0) + e) / 2.0,
            q: (re(1.0) - e) / 2.0,
        }
    }
}

/// Expected `|Φ_ep⟩_0 … |Φ_ep⟩_8` of the two-spin circuit.
pub fn swap_checkpoints(prep: &SpinPreparation, m: u32) -> Result<Vec<HybridState>> {
    let k = GateKind::SwapRoot;
    let a = Angles::new(prep, m);
    let (ca, sa, cb, sb, e) = (a.ca, a.sa, a.cb, a.sb, a.e);
    let mut out = Vec::with_capacity(9);

    let initial = {
        let mut b = Builder::new(k);
        b.add("l", POL_R, re(ca * cb), "uu")
            .add("l", POL_R, re(ca * sb), "ud")
            .add("l", POL_R, re(sa * cb), "du")
            .add("l", POL_R, re(sa * sb), "dd");
        b.finish()
    };
    out.push(initial.clone());
    out.push(initial);

    let mut b = Builder::new(k);
    b.add("l", POL_R, re(-ca * cb), "uu")
        .add("l", POL_R, re(-ca * sb), "ud")
        .add("l", POL_L, re(sa * cb), "du")
        .add("l", POL_L, re(sa * sb), "dd");
    out.push(b.finish());

    let mut b = Builder::new(k);
    b.add("l", POL_R, re(ca * cb), "uu")
        .add("l", POL_L, re(-ca * sb), "ud")
        .add("l", POL_L, re(-sa * cb), "du")
        .add("l", POL_R, re(sa * sb), "dd");
    out.push(b.finish());

    let mut b = Builder::new(k);
    let h = 0.5;
    for (spins, s1, s2, s3) in [("uu", 1.0, 1.0, 1.0), ("ud", 1.0, -1.0, 1.0), ("du", 1.0, 1.0, -1.0), ("dd", 1.0, -1.0, -1.0)] {
        // Columns of the four bracketed sums: cc (+,+,+,+), cs (+,−,+,−), sc (+,+,−,−), ss (+,−,−,+).
        b.add("l", POL_R, re(h * ca * cb * s1), spins);
        b.add("r", POL_L, re(-h * ca * sb * s2), spins);
        b.add("r", POL_L, re(-h * sa * cb * s3), spins);
        b.add("l", POL_R, re(h * sa * sb * s2 * s3), spins);
    }
    out.push(b.finish());

    // Blocks carried by the left arm (cc, ss) and by the right arm (cs, sc).
    let left_block = |b: &mut Builder, path: &str, w: f64| {
        b.add(path, POL_R, re(w * ca * cb), "uu")
            .add(path, POL_L, re(-w * ca * cb), "ud")
            .add(path, POL_L, re(-w * ca * cb), "du")
            .add(path, POL_R, re(w * ca * cb), "dd")
            .add(path, POL_R, re(w * sa * sb), "uu")
            .add(path, POL_L, re(w * sa * sb), "ud")
            .add(path, POL_L, re(w * sa * sb), "du")
            .add(path, POL_R, re(w * sa * sb), "dd");
    };
    let right_block = |b: &mut Builder, path: &str, w: f64, phase: C64| {
        b.add(path, POL_L, re(w * ca * sb), "uu")
            .add(path, POL_R, phase * (w * ca * sb), "ud")
            .add(path, POL_R, phase * (-w * ca * sb), "du")
            .add(path, POL_L, re(-w * ca * sb), "dd")
            .add(path, POL_L, re(w * sa * cb), "uu")
            .add(path, POL_R, phase * (-w * sa * cb), "ud")
            .add(path, POL_R, phase * (w * sa * cb), "du")
            .add(path, POL_L, re(-w * sa * cb), "dd");
    };
    for phase in [re(1.0), e] {
        let mut b = Builder::new(k);
        left_block(&mut b, "l", h);
        right_block(&mut b, "r", -h, phase);
        out.push(b.finish());
    }
    let w = h * FRAC_1_SQRT_2;
    let mut b = Builder::new(k);
    left_block(&mut b, "l", w);
    right_block(&mut b, "l", -w, e);
    left_block(&mut b, "r", w);
    right_block(&mut b, "r", w, e);
    out.push(b.finish());

    let (p, q) = (a.p, a.q);
    let mut b = Builder::new(k);
    let h = re(0.5);
    // |+_l⟩
    b.add("l", POL_PLUS, h * (ca * cb), "dd")
        .add("l", POL_PLUS, h * (-ca * sb) * q, "ud")
        .add("l", POL_PLUS, h * (-ca * sb) * p, "du")
        .add("l", POL_PLUS, h * (-sa * cb) * p, "ud")
        .add("l", POL_PLUS, h * (-sa * cb) * q, "du")
        .add("l", POL_PLUS, h * (sa * sb), "uu");
    // |−_l⟩
    b.add("l", POL_MINUS, h * (ca * cb), "uu")
        .add("l", POL_MINUS, h * (ca * sb) * p, "ud")
        .add("l", POL_MINUS, h * (ca * sb) * q, "du")
        .add("l", POL_MINUS, h * (sa * cb) * q, "ud")
        .add("l", POL_MINUS, h * (sa * cb) * p, "du")
        .add("l", POL_MINUS, h * (sa * sb), "dd");
    // |+_r⟩
    b.add("r", POL_PLUS, h * (ca * cb), "dd")
        .add("r", POL_PLUS, h * (ca * sb) * q, "ud")
        .add("r", POL_PLUS, h * (ca * sb) * p, "du")
        .add("r", POL_PLUS, h * (sa * cb) * p, "ud")
        .add("r", POL_PLUS, h * (sa * cb) * q, "du")
        .add("r", POL_PLUS, h * (sa * sb), "uu");
    // |−_r⟩
    b.add("r", POL_MINUS, h * (ca * cb), "uu")
        .add("r", POL_MINUS, h * (-ca * sb) * p, "ud")
        .add("r", POL_MINUS, h * (-ca * sb) * q, "du")
        .add("r", POL_MINUS, h * (-sa * cb) * q, "ud")
        .add("r", POL_MINUS, h * (-sa * cb) * p, "du")
        .add("r", POL_MINUS, h * (sa * sb), "dd");
    out.push(b.finish());
    Ok(out)
}

/// Expected `|φ_ep⟩_0 … |φ_ep⟩_4` of the three-spin circuit.
pub fn cswap_checkpoints(prep: &SpinPreparation, m: u32) -> Result<Vec<HybridState>> {
    let k = GateKind::ControlledSwapRoot;
    let a = Angles::new(prep, m);
    let (ca, sa, cb, sb, cd, sd, e, p, q) = (a.ca, a.sa, a.cb, a.sb, a.cd, a.sd, a.e, a.p, a.q);
    let mut out = Vec::with_capacity(5);

    // φ0: product input, R on the input path.
    let mut b = Builder::new(k);
    for (spins, w) in [
        ("uuu", ca * cb * cd),
        ("uud", ca * cb * sd),
        ("udu", ca * sb * cd),
        ("udd", ca * sb * sd),
        ("duu", sa * cb * cd),
        ("dud", sa * cb * sd),
        ("ddu", sa * sb * cd),
        ("ddd", sa * sb * sd),
    ] {
        b.add("in", POL_R, re(w), spins);
    }
    out.push(b.finish());

    // φ1
    let mut b = Builder::new(k);
    b.add("r", POL_L, re(ca * cb * cd), "uuu")
        .add("r", POL_R, re(-ca * cb * sd), "uud")
        .add("r", POL_R, re(-ca * sb * cd), "udu")
        .add("r", POL_L, re(ca * sb * sd), "udd")
        .add("l", POL_L, re(sa * cb * cd), "duu")
        .add("l", POL_R, re(-sa * cb * sd), "dud")
        .add("l", POL_R, re(-sa * sb * cd), "ddu")
        .add("l", POL_L, re(sa * sb * sd), "ddd");
    out.push(b.finish());

    // φ2
    let mut b = Builder::new(k);
    let h = 0.5;
    let w = h * ca * cb * cd;
    b.add("r2", POL_L, re(w), "uuu")
        .add("r2", POL_R, re(-w), "uud")
        .add("r2", POL_R, re(-w), "udu")
        .add("r2", POL_L, re(w), "udd");
    let w = h * ca * cb * sd;
    b.add("r1", POL_R, re(-w), "uuu")
        .add("r1", POL_L, re(w), "uud")
        .add("r1", POL_L, re(-w), "udu")
        .add("r1", POL_R, re(w), "udd");
    let w = h * ca * sb * cd;
    b.add("r1", POL_R, re(-w), "uuu")
        .add("r1", POL_L, re(-w), "uud")
        .add("r1", POL_L, re(w), "udu")
        .add("r1", POL_R, re(w), "udd");
    let w = h * ca * sb * sd;
    b.add("r2", POL_L, re(w), "uuu")
        .add("r2", POL_R, re(w), "uud")
        .add("r2", POL_R, re(w), "udu")
        .add("r2", POL_L, re(w), "udd");
    let w = h * sa * cb * cd;
    b.add("l2", POL_L, re(w), "duu")
        .add("l2", POL_R, re(-w), "dud")
        .add("l2", POL_R, re(-w), "ddu")
        .add("l2", POL_L, re(w), "ddd");
    let w = h * sa * cb * sd;
    b.add("l1", POL_R, re(-w), "duu")
        .add("l1", POL_L, e * w, "dud")
        .add("l1", POL_L, e * -w, "ddu")
        .add("l1", POL_R, re(w), "ddd");
    let w = h * sa * sb * cd;
    b.add("l1", POL_R, re(-w), "duu")
        .add("l1", POL_L, e * -w, "dud")
        .add("l1", POL_L, e * w, "ddu")
        .add("l1", POL_R, re(w), "ddd");
    let w = h * sa * sb * sd;
    b.add("l2", POL_L, re(w), "duu")
        .add("l2", POL_R, re(w), "dud")
        .add("l2", POL_R, re(w), "ddu")
        .add("l2", POL_L, re(w), "ddd");
    out.push(b.finish());

    // φ3
    let s = FRAC_1_SQRT_2;
    let mut b = Builder::new(k);
    b.add("r3", POL_PLUS, re(s * ca * cb * cd), "udd")
        .add("r3", POL_MINUS, re(-s * ca * cb * sd), "udu")
        .add("r3", POL_MINUS, re(-s * ca * sb * cd), "uud")
        .add("r3", POL_PLUS, re(s * ca * sb * sd), "uuu")
        .add("r4", POL_MINUS, re(-s * ca * cb * cd), "uuu")
        .add("r4", POL_PLUS, re(-s * ca * cb * sd), "uud")
        .add("r4", POL_PLUS, re(-s * ca * sb * cd), "udu")
        .add("r4", POL_MINUS, re(-s * ca * sb * sd), "udd")
        .add("l3", POL_PLUS, re(s * sa * cb * cd), "ddd")
        .add("l3", POL_MINUS, q * (-s * sa * cb * sd), "dud")
        .add("l3", POL_MINUS, p * (-s * sa * cb * sd), "ddu")
        .add("l3", POL_MINUS, p * (-s * sa * sb * cd), "dud")
        .add("l3", POL_MINUS, q * (-s * sa * sb * cd), "ddu")
        .add("l3", POL_PLUS, re(s * sa * sb * sd), "duu")
        .add("l4", POL_MINUS, re(-s * sa * cb * cd), "duu")
        .add("l4", POL_PLUS, p * (-s * sa * cb * sd), "dud")
        .add("l4", POL_PLUS, q * (-s * sa * cb * sd), "ddu")
        .add("l4", POL_PLUS, q * (-s * sa * sb * cd), "dud")
        .add("l4", POL_PLUS, p * (-s * sa * sb * cd), "ddu")
        .add("l4", POL_MINUS, re(-s * sa * sb * sd), "ddd");
    out.push(b.finish());

    // φ4
    let h = 0.5;
    let mut b = Builder::new(k);
    b.add("7", POL_PLUS, re(h * ca * cb * cd), "udd")
        .add("7", POL_MINUS, re(-h * ca * cb * sd), "udu")
        .add("7", POL_MINUS, re(-h * ca * sb * cd), "uud")
        .add("7", POL_PLUS, re(h * ca * sb * sd), "uuu")
        .add("7", POL_PLUS, re(h * sa * cb * cd), "ddd")
        .add("7", POL_MINUS, q * (-h * sa * cb * sd), "dud")
        .add("7", POL_MINUS, p * (-h * sa * cb * sd), "ddu")
        .add("7", POL_MINUS, p * (-h * sa * sb * cd), "dud")
        .add("7", POL_MINUS, q * (-h * sa * sb * cd), "ddu")
        .add("7", POL_PLUS, re(h * sa * sb * sd), "duu");
    b.add("8", POL_PLUS, re(-h * ca * cb * cd), "udd")
        .add("8", POL_MINUS, re(h * ca * cb * sd), "udu")
        .add("8", POL_MINUS, re(h * ca * sb * cd), "uud")
        .add("8", POL_PLUS, re(-h * ca * sb * sd), "uuu")
        .add("8", POL_PLUS, re(h * sa * cb * cd), "ddd")
        .add("8", POL_MINUS, q * (-h * sa * cb * sd), "dud")
        .add("8", POL_MINUS, p * (-h * sa * cb * sd), "ddu")
        .add("8", POL_MINUS, p * (-h * sa * sb * cd), "dud")
        .add("8", POL_MINUS, q * (-h * sa * sb * cd), "ddu")
        .add("8", POL_PLUS, re(h * sa * sb * sd), "duu");
    b.add("5", POL_MINUS, re(-h * ca * cb * cd), "uuu")
        .add("5", POL_PLUS, re(-h * ca * cb * sd), "uud")
        .add("5", POL_PLUS, re(-h * ca * sb * cd), "udu")
        .add("5", POL_MINUS, re(-h * ca * sb * sd), "udd")
        .add("5", POL_MINUS, re(-h * sa * cb * cd), "duu")
        .add("5", POL_PLUS, p * (-h * sa * cb * sd), "dud")
        .add("5", POL_PLUS, q * (-h * sa * cb * sd), "ddu")
        .add("5", POL_PLUS, q * (-h * sa * sb * cd), "dud")
        .add("5", POL_PLUS, p * (-h * sa * sb * cd), "ddu")
        .add("5", POL_MINUS, re(-h * sa * sb * sd), "ddd");
    b.add("6", POL_MINUS, re(h * ca * cb * cd), "uuu")
        .add("6", POL_PLUS, re(h * ca * cb * sd), "uud")
        .add("6", POL_PLUS, re(h * ca * sb * cd), "udu")
        .add("6", POL_MINUS, re(h * ca * sb * sd), "udd")
        .add("6", POL_MINUS, re(-h * sa * cb * cd), "duu")
        .add("6", POL_PLUS, p * (-h * sa * cb * sd), "dud")
        .add("6", POL_PLUS, q * (-h * sa * cb * sd), "ddu")
        .add("6", POL_PLUS, q * (-h * sa * sb * cd), "dud")
        .add("6", POL_PLUS, p * (-h * sa * sb * cd), "ddu")
        .add("6", POL_MINUS, re(-h * sa * sb * sd), "ddd");
    out.push(b.finish());
    Ok(out)
}

/// Expected checkpoints for either gate.
pub fn checkpoints(kind: GateKind, prep: &SpinPreparation, m: u32) -> Result<Vec<HybridState>> {
    match kind {
        GateKind::SwapRoot => swap_checkpoints(prep, m),
        GateKind::ControlledSwapRoot => cswap_checkpoints(prep, m),
    }
}
