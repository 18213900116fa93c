//! Classical treatment: both particles follow Hamilton's equations.
//!
//! The full coupled equations of motion are integrated,
//!
//! ```text
//! m  x'' = alpha y f'(x)
//! mu y'' = -mu omega0^2 y + alpha f(x)
//! ```
//!
//! while the closed-form predictions assume the beam moves at constant speed
//! (`x = v t`). Comparing the two is the main diagnostic of this module.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, WindowFunction};

/// Default half-span of a run in units of `b / |v|`.
pub const DEFAULT_SPAN: f64 = 20.0;

/// The window counts as switched off below this fraction of its peak.
pub const DECOUPLED_LEVEL: f64 = 1e-12;

/// Number of trailing oscillation periods used by the amplitude fit.
pub const FIT_PERIODS: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    pub t: f64,
    pub x: f64,
    pub p_x: f64,
    pub y: f64,
    pub p_y: f64,
}

impl ClassicalState {
    /// Beam at `x = v t0` moving with momentum `m v`; oscillator at rest.
    pub fn incoming(params: &ModelParams, t0: f64) -> Self {
        ClassicalState {
            t: t0,
            x: params.v * t0,
            p_x: params.m * params.v,
            y: 0.0,
            p_y: 0.0,
        }
    }

    fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite() && self.p_x.is_finite() && self.y.is_finite() && self.p_y.is_finite()
    }
}

/// `(t0, t_end) = (-span, +span) * b / |v|`.
pub fn time_window(params: &ModelParams, window: &WindowFunction, span: f64) -> (f64, f64) {
    let half = span * window.length_scale() / params.v.abs();
    (-half, half)
}

/// Total energy of a classical state.
pub fn hamiltonian(params: &ModelParams, window: &WindowFunction, s: &ClassicalState) -> f64 {
    s.p_x * s.p_x / (2.0 * params.m) + s.p_y * s.p_y / (2.0 * params.mu)
        + 0.5 * params.mu * params.omega0 * params.omega0 * s.y * s.y
        - params.alpha * s.y * window.eval(s.x)
}

fn rates(params: &ModelParams, window: &WindowFunction, s: &ClassicalState) -> [f64; 4] {
    [
        s.p_x / params.m,
        params.alpha * s.y * window.derivative(s.x),
        s.p_y / params.mu,
        -params.mu * params.omega0 * params.omega0 * s.y + params.alpha * window.eval(s.x),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalTrajectory {
    pub states: Vec<ClassicalState>,
    pub dt: f64,
    pub energy: Vec<f64>,
}

/// Least-squares fit of `y(t) = A cos(omega0 t + phi)` over the decoupled tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeFit {
    pub amplitude: f64,
    pub phase: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
}

impl ClassicalTrajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn first(&self) -> &ClassicalState {
        &self.states[0]
    }

    pub fn last(&self) -> &ClassicalState {
        &self.states[self.states.len() - 1]
    }

    /// `max |H(t) - H(t0)|` relative to the initial beam kinetic energy.
    pub fn max_relative_energy_drift(&self, params: &ModelParams) -> f64 {
        let kinetic = self.first().p_x.powi(2) / (2.0 * params.m);
        let h0 = self.energy[0];
        self.energy.iter().map(|h| (h - h0).abs()).fold(0.0, f64::max) / kinetic
    }

    /// Oscillation amplitude left behind once the beam has passed.
    ///
    /// Fits the samples after the last one where the window still exceeds
    /// `DECOUPLED_LEVEL` of its peak, restricted to the final `FIT_PERIODS`
    /// periods. At least one full period must be available.
    pub fn post_passage_amplitude(&self, params: &ModelParams, window: &WindowFunction) -> Result<AmplitudeFit> {
        let cutoff = DECOUPLED_LEVEL * window.peak();
        let start_coupled = self
            .states
            .iter()
            .rposition(|s| window.eval(s.x).abs() >= cutoff)
            .ok_or_else(|| Error::AmplitudeFit("the beam never reached the window".into()))?;
        let period = 2.0 * PI / params.omega0;
        let t_last = self.last().t;
        let t_from = t_last - FIT_PERIODS * period;
        let tail: Vec<&ClassicalState> = self.states[start_coupled + 1..]
            .iter()
            .filter(|s| s.t >= t_from)
            .collect();
        if tail.len() < 3 || t_last - tail[0].t < period {
            return Err(Error::AmplitudeFit(format!(
                "decoupled tail spans {} < one period {period}",
                tail.last().map_or(0.0, |s| s.t - tail[0].t)
            )));
        }
        let (amplitude, phase) = fit_harmonic(tail.iter().map(|s| (s.t, s.y)), params.omega0);
        Ok(AmplitudeFit {
            amplitude,
            phase,
            t_start: tail[0].t,
            t_end: t_last,
            samples: tail.len(),
        })
    }
}

/// Least-squares fit of `y(t) ≈ A cos(omega t + phi)` to `(t, y)` samples;
/// returns `(A, phi)`. Needs samples spanning a good part of a period.
pub fn fit_harmonic(samples: impl IntoIterator<Item = (f64, f64)>, omega: f64) -> (f64, f64) {
    // normal equations for y ≈ a cos(w t) + c sin(w t)
    let (mut scc, mut sss, mut scs, mut syc, mut sys) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (t, y) in samples {
        let (sin, cos) = (omega * t).sin_cos();
        scc += cos * cos;
        sss += sin * sin;
        scs += cos * sin;
        syc += y * cos;
        sys += y * sin;
    }
    let det = scc * sss - scs * scs;
    let a = (syc * sss - sys * scs) / det;
    let c = (sys * scc - syc * scs) / det;
    (a.hypot(c), (-c).atan2(a))
}

/// Integrates the coupled equations with the Euler–Richardson (midpoint)
/// scheme from `initial.t` to `t_end` on a uniform step `dt`.
pub fn integrate_classical(
    params: &ModelParams,
    window: &WindowFunction,
    initial: ClassicalState,
    dt: f64,
    t_end: f64,
) -> Result<ClassicalTrajectory> {
    params.validate()?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid("dt", format!("must be positive (got {dt})")));
    }
    if !(initial.t < t_end) {
        return Err(Error::invalid("t_end", "must be later than the initial time"));
    }
    if !initial.is_finite() {
        return Err(Error::invalid("initial", "state must be finite"));
    }
    if window.eval(initial.x).abs() >= DECOUPLED_LEVEL * window.peak() {
        return Err(Error::invalid(
            "initial.x",
            "the beam must start where the window is switched off",
        ));
    }

    let steps = ((t_end - initial.t) / dt - 1e-9).ceil() as usize;
    let mut states = Vec::with_capacity(steps + 1);
    let mut energy = Vec::with_capacity(steps + 1);
    let mut s = initial;
    states.push(s);
    energy.push(hamiltonian(params, window, &s));
    for n in 1..=steps {
        let k1 = rates(params, window, &s);
        let mid = ClassicalState {
            t: s.t + 0.5 * dt,
            x: s.x + 0.5 * dt * k1[0],
            p_x: s.p_x + 0.5 * dt * k1[1],
            y: s.y + 0.5 * dt * k1[2],
            p_y: s.p_y + 0.5 * dt * k1[3],
        };
        let k2 = rates(params, window, &mid);
        s = ClassicalState {
            t: initial.t + n as f64 * dt,
            x: s.x + dt * k2[0],
            p_x: s.p_x + dt * k2[1],
            y: s.y + dt * k2[2],
            p_y: s.p_y + dt * k2[3],
        };
        if !s.is_finite() {
            return Err(Error::IntegrationDiverged { step: n, t: s.t });
        }
        states.push(s);
        energy.push(hamiltonian(params, window, &s));
    }
    Ok(ClassicalTrajectory { states, dt, energy })
}

/// Runs the default passage: oscillator at rest, `t` in `[-20, 20] b/|v|`.
pub fn simulate_passage(params: &ModelParams, window: &WindowFunction, dt: f64) -> Result<ClassicalTrajectory> {
    let (t0, t1) = time_window(params, window, DEFAULT_SPAN);
    integrate_classical(params, window, ClassicalState::incoming(params, t0), dt, t1)
}

/// `y_m = sqrt(2 pi) |alpha| |f~(omega0)| / (mu omega0)`.
pub fn classical_amplitude_analytic(params: &ModelParams, window: &WindowFunction) -> Result<f64> {
    let ft = window.temporal_ft(params.v, params.omega0)?;
    Ok((2.0 * PI).sqrt() * params.alpha.abs() * ft.norm() / (params.mu * params.omega0))
}

/// Energy exchanged during one passage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkBalance {
    pub on_oscillator: f64,
    pub on_beam: f64,
}

/// `W_HO = pi alpha^2 |f~(omega0)|^2 / mu`, and `W_beam = -W_HO`.
pub fn work_on_oscillator_analytic(params: &ModelParams, window: &WindowFunction) -> Result<WorkBalance> {
    let ft = window.temporal_ft(params.v, params.omega0)?;
    let w = PI * params.alpha * params.alpha * ft.norm_sqr() / params.mu;
    Ok(WorkBalance {
        on_oscillator: w,
        on_beam: -w,
    })
}

/// Work done on the beam, `∫ alpha y(t) (df/dt) dt`, by trapezoid over the
/// integrated trajectory.
pub fn work_on_beam_numeric(traj: &ClassicalTrajectory, params: &ModelParams, window: &WindowFunction) -> Result<f64> {
    if traj.len() < 2 {
        return Err(Error::TruncatedTrajectory { residual: 1.0 });
    }
    let peak = window.peak();
    let residual = (window.eval(traj.first().x).abs()).max(window.eval(traj.last().x).abs()) / peak;
    if residual >= DECOUPLED_LEVEL {
        return Err(Error::TruncatedTrajectory { residual });
    }
    let power: Vec<f64> = traj
        .states
        .iter()
        .map(|s| params.alpha * s.y * window.derivative(s.x) * s.p_x / params.m)
        .collect();
    Ok(crate::quadrature::trapezoid(&power, traj.dt))
}
