//! One double-sided QD–cavity unit: input–output scattering coefficients and
//! the spin-dependent polarization map of a single photon pass ("round").
//!
//! All rates are in units of the cavity decay rate κ. Round maps act on
//! (polarization ⊗ one spin) in the basis `{R↑, R↓, L↑, L↓}`.

use nalgebra::{DMatrix, Matrix4};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Physical rates and frequencies of one emitter, in units of κ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmitterParams {
    /// QD–cavity coupling strength.
    pub g: f64,
    /// Cavity decay rate through the two mirrors.
    pub kappa: f64,
    /// Side-leakage rate.
    pub kappa_s: f64,
    /// Exciton dipole decay rate.
    pub gamma: f64,
    /// Incident photon frequency.
    pub omega: f64,
    /// Cavity mode frequency.
    pub omega_c: f64,
    /// Trion (X⁻) transition frequency.
    pub omega_x: f64,
}

impl EmitterParams {
    /// Resonant unit (`ω = ω_c = ω_X⁻`) with κ = 1.
    pub fn resonant(g: f64, kappa_s: f64, gamma: f64) -> Result<Self> {
        let p = EmitterParams {
            g,
            kappa: 1.0,
            kappa_s,
            gamma,
            omega: 0.0,
            omega_c: 0.0,
            omega_x: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// From the surface-plot axes `g/κ` and `κ_s/2κ`.
    pub fn from_figure_ratios(g_over_kappa: f64, ks_over_2kappa: f64, gamma_over_kappa: f64) -> Result<Self> {
        Self::resonant(g_over_kappa, 2.0 * ks_over_2kappa, gamma_over_kappa)
    }

    /// From the point parameterization `g/(κ+κ_s)` and `κ_s/κ`.
    pub fn from_text_ratios(g_over_kappa_plus_ks: f64, ks_over_kappa: f64, gamma_over_kappa: f64) -> Result<Self> {
        Self::resonant(
            g_over_kappa_plus_ks * (1.0 + ks_over_kappa),
            ks_over_kappa,
            gamma_over_kappa,
        )
    }

    pub fn g_over_kappa(&self) -> f64 {
        self.g / self.kappa
    }

    pub fn ks_over_2kappa(&self) -> f64 {
        self.kappa_s / (2.0 * self.kappa)
    }

    pub fn g_over_kappa_plus_ks(&self) -> f64 {
        self.g / (self.kappa + self.kappa_s)
    }

    pub fn ks_over_kappa(&self) -> f64 {
        self.kappa_s / self.kappa
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.g,
            self.kappa,
            self.kappa_s,
            self.gamma,
            self.omega,
            self.omega_c,
            self.omega_x,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite value".into()));
        }
        if self.g < 0.0 {
            return Err(Error::InvalidParams(format!("g must be >= 0, got {}", self.g)));
        }
        if self.kappa <= 0.0 {
            return Err(Error::InvalidParams(format!("kappa must be > 0, got {}", self.kappa)));
        }
        if self.kappa_s < 0.0 {
            return Err(Error::InvalidParams(format!("kappa_s must be >= 0, got {}", self.kappa_s)));
        }
        if self.gamma <= 0.0 {
            return Err(Error::InvalidParams(format!("gamma must be > 0, got {}", self.gamma)));
        }
        Ok(())
    }
}

/// Reflection and transmission amplitudes of a coupled (`r`, `t`) and an
/// empty (`r0`, `t0`) cavity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScatterCoefficients {
    pub r: C64,
    pub t: C64,
    pub r0: C64,
    pub t0: C64,
}

impl ScatterCoefficients {
    /// Ideal selection rules: coupled photons reflect, uncoupled ones pass with a π shift.
    pub const IDEAL: ScatterCoefficients = ScatterCoefficients {
        r: C64::new(1.0, 0.0),
        t: C64::new(0.0, 0.0),
        r0: C64::new(0.0, 0.0),
        t0: C64::new(-1.0, 0.0),
    };
}

fn transmission(p: &EmitterParams, g: f64) -> C64 {
    let i = C64::i();
    let dipole = i * (p.omega_x - p.omega) + p.gamma / 2.0;
    let cavity = i * (p.omega_c - p.omega) + p.kappa + p.kappa_s / 2.0;
    -p.kappa * dipole / (dipole * cavity + g * g)
}

/// Input–output coefficients, with `r = 1 + t` and the empty-cavity pair
/// evaluated at `g = 0`.
pub fn scatter_coefficients(params: &EmitterParams) -> Result<ScatterCoefficients> {
    params.validate()?;
    let t = transmission(params, params.g);
    let t0 = transmission(params, 0.0);
    Ok(ScatterCoefficients {
        r: 1.0 + t,
        t,
        r0: 1.0 + t0,
        t0,
    })
}

/// Propagation direction of the photon entering the cavity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Incidence {
    /// Against the growth axis (`R↓`, `L↑` labels); couples to spin ↓ for R.
    Down,
    /// Along the growth axis (`R↑`, `L↓` labels); couples to spin ↑ for R.
    Up,
}

/// Where wrong-port scattering amplitudes go.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum LeakConvention {
    /// Both cavity ports feed the continuing path.
    #[default]
    Coherent,
    /// Wrong-port amplitude is discarded onto the loss path.
    Lossy,
}

/// A round as a linear map on (polarization ⊗ spin), plus the part routed to loss.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundMap {
    pub continuing: Matrix4<C64>,
    pub leaked: Option<Matrix4<C64>>,
}

impl RoundMap {
    pub fn ideal(incidence: Incidence) -> Self {
        RoundMap {
            continuing: ideal_round_matrix(incidence),
            leaked: None,
        }
    }

    /// Largest singular value of the stacked `[continuing; leaked]` map.
    pub fn operator_norm(&self) -> f64 {
        let rows = if self.leaked.is_some() { 8 } else { 4 };
        let mut m = DMatrix::<C64>::zeros(rows, 4);
        m.view_mut((0, 0), (4, 4)).copy_from(&self.continuing);
        if let Some(leak) = &self.leaked {
            m.view_mut((4, 0), (4, 4)).copy_from(leak);
        }
        m.singular_values().max()
    }

    /// Frobenius distance of the full stacked map from another round.
    pub fn distance(&self, other: &RoundMap) -> f64 {
        let zero = Matrix4::zeros();
        let a = self.leaked.as_ref().unwrap_or(&zero);
        let b = other.leaked.as_ref().unwrap_or(&zero);
        ((self.continuing - other.continuing).norm_squared() + (a - b).norm_squared()).sqrt()
    }
}

const R_UP: usize = 0;
const R_DOWN: usize = 1;
const L_UP: usize = 2;
const L_DOWN: usize = 3;

/// Ideal round in the `{R↑, R↓, L↑, L↓}` basis.
///
/// For `Down` incidence this is the signed permutation
/// `R↑ → −R↑, R↓ → L↓, L↑ → −L↑, L↓ → R↓`; for `Up` incidence the coupled
/// spin is ↑ instead: `R↑ → L↑, R↓ → −R↓, L↑ → R↑, L↓ → −L↓`.
pub fn ideal_round_matrix(incidence: Incidence) -> Matrix4<C64> {
    let one = C64::new(1.0, 0.0);
    let mut m = Matrix4::zeros();
    match incidence {
        Incidence::Down => {
            m[(R_UP, R_UP)] = -one;
            m[(L_DOWN, R_DOWN)] = one;
            m[(L_UP, L_UP)] = -one;
            m[(R_DOWN, L_DOWN)] = one;
        }
        Incidence::Up => {
            m[(L_UP, R_UP)] = one;
            m[(R_DOWN, R_DOWN)] = -one;
            m[(R_UP, L_UP)] = one;
            m[(L_DOWN, L_DOWN)] = -one;
        }
    }
    m
}

/// Realistic round: coupled (polarization, spin) pairs go to `r` on the
/// reflected (continuing) branch and `t` on the transmitted wrong port;
/// uncoupled pairs go to `t0` on the transmitted (continuing) branch and `r0`
/// on the reflected wrong port.
pub fn realistic_round_matrix(coeffs: &ScatterCoefficients, incidence: Incidence, leak: LeakConvention) -> RoundMap {
    let coupled_spin = match incidence {
        Incidence::Down => 1,
        Incidence::Up => 0,
    };
    let mut cont = Matrix4::zeros();
    let mut wrong = Matrix4::zeros();
    for pol in 0..2 {
        for spin in 0..2 {
            let col = 2 * pol + spin;
            let same = col;
            let flipped = 2 * (1 - pol) + spin;
            if spin == coupled_spin {
                cont[(flipped, col)] = coeffs.r;
                wrong[(same, col)] = coeffs.t;
            } else {
                cont[(same, col)] = coeffs.t0;
                wrong[(flipped, col)] = coeffs.r0;
            }
        }
    }
    match leak {
        LeakConvention::Coherent => RoundMap {
            continuing: cont + wrong,
            leaked: None,
        },
        LeakConvention::Lossy => RoundMap {
            continuing: cont,
            leaked: Some(wrong),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn empty_resonant_cavity_transmits_with_pi_shift() {
        let p = EmitterParams::resonant(0.0, 0.0, 0.1).unwrap();
        let c = scatter_coefficients(&p).unwrap();
        assert!(close(c.t0, C64::new(-1.0, 0.0), 1e-15));
        assert!(close(c.r0, C64::new(0.0, 0.0), 1e-15));
    }

    #[test]
    fn strong_coupling_limit_reflects() {
        let p = EmitterParams::resonant(1e6, 0.0, 0.1).unwrap();
        let c = scatter_coefficients(&p).unwrap();
        assert!(c.t.norm() < 1e-12);
        assert!(close(c.r, C64::new(1.0, 0.0), 1e-12));
    }

    #[test]
    fn moderate_coupling_value() {
        // t = -(0.05) / (0.05 * 1 + 2.5²) = -0.05 / 6.30, evaluated by hand.
        let p = EmitterParams::resonant(2.5, 0.0, 0.1).unwrap();
        let c = scatter_coefficients(&p).unwrap();
        let t = -0.05 / 6.30;
        assert!(close(c.t, C64::new(t, 0.0), 1e-15));
        assert!(close(c.r, C64::new(1.0 + t, 0.0), 1e-15));
        assert!((c.t.re + 0.007937).abs() < 1e-6);
        assert!((c.r.re - 0.992063).abs() < 1e-6);
    }

    #[test]
    fn resonant_sign_structure() {
        let p = EmitterParams::resonant(2.0, 0.05, 0.1).unwrap();
        let c = scatter_coefficients(&p).unwrap();
        assert!(c.t0.re < 0.0 && c.r.re > 0.0);
        assert!(c.t.re < 0.0 && c.r0.re > 0.0);
    }

    #[test]
    fn r_minus_t_is_one_including_detuning() {
        for (g, ks, gamma, w, wc, wx) in [
            (0.0, 0.0, 0.1, 0.0, 0.0, 0.0),
            (1.3, 0.4, 0.2, 0.3, -0.2, 0.1),
            (4.0, 2.0, 0.05, 1.0, 0.5, -0.7),
        ] {
            let p = EmitterParams {
                g,
                kappa: 1.0,
                kappa_s: ks,
                gamma,
                omega: w,
                omega_c: wc,
                omega_x: wx,
            };
            let c = scatter_coefficients(&p).unwrap();
            assert!(close(c.r - c.t, C64::new(1.0, 0.0), 1e-15));
            assert!(close(c.r0 - c.t0, C64::new(1.0, 0.0), 1e-15));
        }
    }

    #[test]
    fn rejects_unphysical_params() {
        assert!(EmitterParams::resonant(1.0, 0.0, 0.0).is_err());
        assert!(EmitterParams::resonant(-1.0, 0.0, 0.1).is_err());
        assert!(EmitterParams::resonant(1.0, -0.1, 0.1).is_err());
        assert!(EmitterParams::resonant(f64::NAN, 0.0, 0.1).is_err());
        let mut p = EmitterParams::resonant(1.0, 0.0, 0.1).unwrap();
        p.kappa = 0.0;
        assert!(scatter_coefficients(&p).is_err());
    }

    #[test]
    fn parameterization_converters() {
        let p = EmitterParams::from_text_ratios(2.7, 0.05, 0.1).unwrap();
        assert!((p.g - 2.835).abs() < 1e-12);
        assert!((p.kappa_s - 0.05).abs() < 1e-15);
        assert!((p.g_over_kappa_plus_ks() - 2.7).abs() < 1e-12);
        assert!((p.ks_over_2kappa() - 0.025).abs() < 1e-15);

        let q = EmitterParams::from_figure_ratios(3.0, 0.5, 0.1).unwrap();
        assert_eq!(q.kappa_s, 1.0);
        assert!((q.g_over_kappa_plus_ks() - 1.5).abs() < 1e-15);
        assert!((q.ks_over_kappa() - 1.0).abs() < 1e-15);

        let back = EmitterParams::from_figure_ratios(p.g_over_kappa(), p.ks_over_2kappa(), 0.1).unwrap();
        assert!((back.g - p.g).abs() < 1e-15 && (back.kappa_s - p.kappa_s).abs() < 1e-15);
    }

    #[test]
    fn ideal_round_down_matches_printed_matrix() {
        let m = ideal_round_matrix(Incidence::Down);
        #[rustfmt::skip]
        let printed = [
            [-1.0, 0.0,  0.0, 0.0],
            [ 0.0, 0.0,  0.0, 1.0],
            [ 0.0, 0.0, -1.0, 0.0],
            [ 0.0, 1.0,  0.0, 0.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m[(i, j)], C64::new(printed[i][j], 0.0), "entry ({i},{j})");
            }
        }
        assert_eq!(m[(R_UP, R_UP)], C64::new(-1.0, 0.0));
        assert_eq!(m[(L_DOWN, R_DOWN)], C64::new(1.0, 0.0));
    }

    #[test]
    fn ideal_rounds_are_unitary() {
        for inc in [Incidence::Down, Incidence::Up] {
            let m = ideal_round_matrix(inc);
            let dev = (m.adjoint() * m - Matrix4::identity()).norm();
            assert!(dev < 1e-15);
        }
    }

    #[test]
    fn ideal_limit_reproduces_ideal_round() {
        for inc in [Incidence::Down, Incidence::Up] {
            for leak in [LeakConvention::Coherent, LeakConvention::Lossy] {
                let r = realistic_round_matrix(&ScatterCoefficients::IDEAL, inc, leak);
                assert_eq!(r.continuing, ideal_round_matrix(inc));
                if let Some(l) = r.leaked {
                    assert_eq!(l.norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn realistic_transition_amplitudes() {
        let c = ScatterCoefficients {
            r: C64::new(0.9, 0.01),
            t: C64::new(-0.1, 0.01),
            r0: C64::new(0.05, -0.02),
            t0: C64::new(-0.95, -0.02),
        };
        let lossy = realistic_round_matrix(&c, Incidence::Down, LeakConvention::Lossy);
        let leak = lossy.leaked.unwrap();
        // coupled R↓ → r L↓ (continuing) + t R↓ (wrong port)
        assert_eq!(lossy.continuing[(L_DOWN, R_DOWN)], c.r);
        assert_eq!(leak[(R_DOWN, R_DOWN)], c.t);
        // uncoupled R↑ → t0 R↑ (continuing) + r0 L↑ (wrong port)
        assert_eq!(lossy.continuing[(R_UP, R_UP)], c.t0);
        assert_eq!(leak[(L_UP, R_UP)], c.r0);

        let coherent = realistic_round_matrix(&c, Incidence::Down, LeakConvention::Coherent);
        assert_eq!(coherent.continuing[(R_DOWN, R_DOWN)], c.t);
        assert_eq!(coherent.continuing[(L_UP, R_UP)], c.r0);

        let up = realistic_round_matrix(&c, Incidence::Up, LeakConvention::Coherent);
        assert_eq!(up.continuing[(L_UP, R_UP)], c.r);
        assert_eq!(up.continuing[(R_UP, R_UP)], c.t);
        assert_eq!(up.continuing[(R_DOWN, R_DOWN)], c.t0);
        assert_eq!(up.continuing[(L_DOWN, R_DOWN)], c.r0);
    }

    #[test]
    fn realistic_round_is_contractive_on_grid() {
        for gi in 0..=20 {
            for ki in 0..=20 {
                let g = 5.0 * gi as f64 / 20.0;
                let ks = 2.0 * ki as f64 / 20.0;
                let c = scatter_coefficients(&EmitterParams::resonant(g, ks, 0.1).unwrap()).unwrap();
                for leak in [LeakConvention::Coherent, LeakConvention::Lossy] {
                    let n = realistic_round_matrix(&c, Incidence::Down, leak).operator_norm();
                    assert!(n <= 1.0 + 1e-12, "g={g} ks={ks} {leak:?}: {n}");
                }
            }
        }
    }

    #[test]
    fn approaches_ideal_monotonically_in_g() {
        let ideal = RoundMap::ideal(Incidence::Down);
        for leak in [LeakConvention::Coherent, LeakConvention::Lossy] {
            let mut prev = f64::INFINITY;
            for k in 0..=40 {
                let g = 0.25 * k as f64;
                let c = scatter_coefficients(&EmitterParams::resonant(g, 0.0, 0.1).unwrap()).unwrap();
                let d = realistic_round_matrix(&c, Incidence::Down, leak).distance(&ideal);
                assert!(d <= prev + 1e-15, "g={g}: {d} > {prev}");
                prev = d;
            }
            assert!(prev < 1e-3);
        }
    }
}
