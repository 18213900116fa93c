//! First-order time-dependent perturbation theory for the 0 -> 1 excitation,
//! in the partially quantum (classical beam drive) and fully quantum
//! (plane-wave beam) pictures.
//!
//! The box length used to normalize plane waves never appears here: it drops
//! out once energy conservation fixes the scattered wavenumber.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, WindowFunction};
use crate::quadrature::integrate_adaptive;

/// Absolute tolerance for the coefficient integrals.
pub const COEFFICIENT_TOLERANCE: f64 = 1e-10;

/// Probabilities above this are flagged as outside first-order validity.
pub const VALIDITY_THRESHOLD: f64 = 0.1;

const MAX_PANELS: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionResult {
    pub p1: f64,
    pub coefficient: Complex64,
    pub omega_fi: f64,
    pub warnings: Vec<String>,
}

impl TransitionResult {
    fn new(p1: f64, phase: Complex64, omega_fi: f64) -> Result<Self> {
        if p1 > 1.0 {
            return Err(Error::ModelOutOfRegime { p1 });
        }
        let mut warnings = Vec::new();
        if p1 > VALIDITY_THRESHOLD {
            let msg = format!("p1 = {p1} exceeds {VALIDITY_THRESHOLD}: first-order result is unreliable");
            log::warn!("{msg}");
            warnings.push(msg);
        }
        let coefficient = if phase.norm() > 0.0 {
            phase / phase.norm() * p1.sqrt()
        } else {
            Complex64::new(0.0, 0.0)
        };
        Ok(TransitionResult {
            p1,
            coefficient,
            omega_fi,
            warnings,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringKinematics {
    pub k0: f64,
    pub k1: f64,
    pub delta_k: f64,
    /// Small-transfer estimate `-omega0 / v` with `v = hbar k0 / m`.
    pub delta_k_approx: f64,
}

/// `c_f = -(i/hbar) ∫_{t0}^{t1} M(t) e^{i omega_fi t} dt` for a transition
/// between distinct states, by adaptive Gauss–Kronrod quadrature.
pub fn first_order_coefficient<M>(matrix_element: M, omega_fi: f64, t0: f64, t1: f64, hbar: f64) -> Result<Complex64>
where
    M: Fn(f64) -> Complex64,
{
    first_order_coefficient_with_tolerance(matrix_element, omega_fi, t0, t1, hbar, COEFFICIENT_TOLERANCE)
}

pub fn first_order_coefficient_with_tolerance<M>(
    matrix_element: M,
    omega_fi: f64,
    t0: f64,
    t1: f64,
    hbar: f64,
    abs_tol: f64,
) -> Result<Complex64>
where
    M: Fn(f64) -> Complex64,
{
    // The tolerance applies to the coefficient, so scale it onto the integral.
    let integral = integrate_adaptive(
        |t| matrix_element(t) * Complex64::from_polar(1.0, omega_fi * t),
        t0,
        t1,
        abs_tol * hbar,
        MAX_PANELS,
    )?;
    Ok(Complex64::new(0.0, -1.0 / hbar) * integral)
}

/// `<n|y|0>`: nonzero only for `n = 1`.
pub fn position_matrix_element(n: usize, params: &ModelParams) -> f64 {
    if n == 1 {
        params.dipole_element()
    } else {
        0.0
    }
}

/// First-order amplitude for `|0> -> |n>` under the classical drive,
/// integrated over the window's support.
pub fn drive_coefficient(n: usize, params: &ModelParams, window: &WindowFunction) -> Result<Complex64> {
    params.validate()?;
    let element = position_matrix_element(n, params);
    if element == 0.0 || params.alpha == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (x_lo, x_hi) = window.support();
    let (t0, t1) = if params.v > 0.0 {
        (x_lo / params.v, x_hi / params.v)
    } else {
        (x_hi / params.v, x_lo / params.v)
    };
    let v = params.v;
    let alpha = params.alpha;
    first_order_coefficient(
        |t| Complex64::new(-alpha * element * window.eval(v * t), 0.0),
        n as f64 * params.omega0,
        t0,
        t1,
        params.hbar,
    )
}

/// Partially quantum `P1 = pi alpha^2 |f~(omega0)|^2 / (hbar mu omega0)`.
///
/// The coefficient has magnitude `sqrt(p1)` and the phase of the quadrature
/// evaluated amplitude.
pub fn p1_partial(params: &ModelParams, window: &WindowFunction) -> Result<TransitionResult> {
    params.validate()?;
    let ft = window.temporal_ft(params.v, params.omega0)?;
    let p1 = PI * params.alpha * params.alpha * ft.norm_sqr() / (params.hbar * params.mu * params.omega0);
    let coefficient = drive_coefficient(1, params, window)?;
    TransitionResult::new(p1, coefficient, params.omega0)
}

/// Solves `hbar (k1^2 - k0^2) / 2m + omega0 = 0` for the scattered wavenumber.
pub fn scattered_wavenumber(k0: f64, params: &ModelParams) -> Result<ScatteringKinematics> {
    if !(k0.is_finite() && k0 > 0.0) {
        return Err(Error::invalid("k0", format!("must be positive (got {k0})")));
    }
    let threshold = 2.0 * params.m * params.omega0 / params.hbar;
    let k0_sq = k0 * k0;
    if k0_sq < threshold {
        return Err(Error::ChannelClosed { k0_sq, threshold });
    }
    let k1 = (k0_sq - threshold).sqrt();
    let v = params.hbar * k0 / params.m;
    Ok(ScatteringKinematics {
        k0,
        k1,
        // k1 - k0 without cancellation.
        delta_k: -threshold / (k1 + k0),
        delta_k_approx: -params.omega0 / v,
    })
}

/// Fully quantum `P1 = pi alpha^2 |f-(k1 - k0)|^2 / (hbar mu omega0 v^2)` with
/// `v = hbar k0 / m`.
pub fn p1_full(params: &ModelParams, window: &WindowFunction, k0: f64) -> Result<TransitionResult> {
    let kin = scattered_wavenumber(k0, params)?;
    p1_full_at_transfer(params, window, k0, kin.delta_k)
}

/// The fully quantum expression evaluated at an arbitrary momentum transfer,
/// e.g. the small-transfer estimate `-omega0 / v`.
pub fn p1_full_at_transfer(params: &ModelParams, window: &WindowFunction, k0: f64, delta_k: f64) -> Result<TransitionResult> {
    params.validate()?;
    let v = params.hbar * k0 / params.m;
    let ft = window.spatial_ft(delta_k);
    let p1 = PI * params.alpha * params.alpha * ft.norm_sqr() / (params.hbar * params.mu * params.omega0 * v * v);
    // c = (i/hbar)(alpha/v) sqrt(hbar pi / mu omega0) f-(dk)
    let coefficient = Complex64::new(0.0, params.alpha / v) * ft;
    TransitionResult::new(p1, coefficient, 0.0)
}

/// Serialized transition record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub p1: f64,
    pub coefficient_re: f64,
    pub coefficient_im: f64,
    pub k0: Option<f64>,
    pub k1: Option<f64>,
    pub delta_k: Option<f64>,
    pub warnings: Vec<String>,
}

impl TransitionRecord {
    pub fn new(result: &TransitionResult, kinematics: Option<&ScatteringKinematics>) -> Self {
        TransitionRecord {
            p1: result.p1,
            coefficient_re: result.coefficient.re,
            coefficient_im: result.coefficient.im,
            k0: kinematics.map(|k| k.k0),
            k1: kinematics.map(|k| k.k1),
            delta_k: kinematics.map(|k| k.delta_k),
            warnings: result.warnings.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian() -> WindowFunction {
        WindowFunction::gaussian(10.0).unwrap()
    }

    #[test]
    fn zero_element_gives_zero() {
        let c = first_order_coefficient(|_| Complex64::new(0.0, 0.0), 1.0, -5.0, 5.0, 1.0).unwrap();
        assert_eq!(c, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn constant_element_grows_linearly() {
        let m = Complex64::new(0.3, -0.2);
        let c = first_order_coefficient(|_| m, 0.0, 0.0, 4.0, 2.0).unwrap();
        let expected = Complex64::new(0.0, -1.0) * m * 4.0 / 2.0;
        assert!((c - expected).norm() < 1e-14);
    }

    #[test]
    fn selection_rule() {
        let p = ModelParams::natural(7.0);
        for n in [0usize, 2, 3, 5] {
            assert_eq!(position_matrix_element(n, &p), 0.0);
            assert_eq!(drive_coefficient(n, &p, &gaussian()).unwrap(), Complex64::new(0.0, 0.0));
        }
        assert!(drive_coefficient(1, &p, &gaussian()).unwrap().norm() > 0.0);
    }

    #[test]
    fn partial_probability_and_phase() {
        let f = gaussian();
        let r = p1_partial(&ModelParams::natural(7.0), &f).unwrap();
        assert!((r.p1 - 1.1555e-6).abs() < 1e-10);
        assert!((r.coefficient.norm_sqr() - r.p1).abs() < 1e-20);
        // a real, even drive pulse puts the amplitude on +i
        assert!(r.coefficient.re.abs() < 1e-9 * r.coefficient.norm());
        assert!(r.coefficient.im > 0.0);
        assert!(r.warnings.is_empty());

        let r0 = p1_partial(&ModelParams::natural(7.0).with_alpha(0.0), &f).unwrap();
        assert_eq!(r0.p1, 0.0);
        assert_eq!(r0.coefficient, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn quadrature_coefficient_matches_closed_form() {
        let p = ModelParams::natural(7.0);
        let c = drive_coefficient(1, &p, &gaussian()).unwrap();
        let closed = p1_partial(&p, &gaussian()).unwrap().p1;
        assert!((c.norm_sqr() - closed).abs() / closed < 1e-6);
    }

    #[test]
    fn out_of_regime() {
        let p = ModelParams::natural(7.0).with_alpha(2000.0);
        assert!(matches!(p1_partial(&p, &gaussian()), Err(Error::ModelOutOfRegime { .. })));
        let p = ModelParams::natural(7.0).with_alpha(400.0);
        let r = p1_partial(&p, &gaussian()).unwrap();
        assert!(r.p1 > VALIDITY_THRESHOLD);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn kinematics() {
        let p = ModelParams::natural(7.0);
        let kin = scattered_wavenumber(7.0, &p).unwrap();
        assert!((kin.k1 - 47f64.sqrt()).abs() < 1e-15);
        assert!((kin.delta_k + 0.144_345_4).abs() < 1e-6);
        assert!((kin.delta_k_approx + 1.0 / 7.0).abs() < 1e-16);
        assert!(((kin.delta_k - kin.delta_k_approx).abs() - 1.5e-3).abs() < 1e-4);
        let residual = (kin.k1 * kin.k1 - 49.0) / 2.0 + 1.0;
        assert!(residual.abs() < 1e-14);

        let mut elastic = p;
        elastic.omega0 = 1e-300;
        let kin = scattered_wavenumber(7.0, &elastic).unwrap();
        assert_eq!(kin.k1, 7.0);

        assert!(matches!(scattered_wavenumber(1.0, &p), Err(Error::ChannelClosed { .. })));
        assert!(scattered_wavenumber(2f64.sqrt(), &p).is_ok());
        assert!(scattered_wavenumber(-7.0, &p).is_err());
    }

    #[test]
    fn full_probability() {
        let f = gaussian();
        let p = ModelParams::natural(7.0);
        let r = p1_full(&p, &f, 7.0).unwrap();
        assert!((r.p1 - 1.1314e-6).abs() < 1e-9);
        assert_eq!(p1_full(&p.with_alpha(0.0), &f, 7.0).unwrap().p1, 0.0);
        assert!(matches!(p1_full(&p, &f, 1.0), Err(Error::ChannelClosed { .. })));

        let kin = scattered_wavenumber(7.0, &p).unwrap();
        let approx = p1_full_at_transfer(&p, &f, 7.0, kin.delta_k_approx).unwrap();
        let partial = p1_partial(&p, &f).unwrap();
        assert!((approx.p1 - partial.p1).abs() <= 4.0 * f64::EPSILON * partial.p1);
    }

    #[test]
    fn record_layout() {
        let p = ModelParams::natural(7.0);
        let kin = scattered_wavenumber(7.0, &p).unwrap();
        let r = p1_full(&p, &gaussian(), 7.0).unwrap();
        let json = serde_json::to_value(TransitionRecord::new(&r, Some(&kin))).unwrap();
        for key in ["p1", "coefficient_re", "coefficient_im", "k0", "k1", "delta_k", "warnings"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }
}
