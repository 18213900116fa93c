//! Partially quantum treatment: the oscillator wavefunction `psi(y, t)` is
//! evolved under
//!
//! ```text
//! i hbar d psi/dt = [-(hbar^2 / 2mu) d^2/dy^2 + mu omega0^2 y^2 / 2 - alpha y f(v t)] psi
//! ```
//!
//! on a uniform grid with hard walls at the grid edges. The default stepper
//! is the implicit midpoint (Crank–Nicolson) scheme, which is unconditionally
//! stable and unitary for the discretized Hamiltonian. An explicit staggered
//! leapfrog (Visscher) scheme is available as an alternative.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, WindowFunction};
use crate::quadrature::{trapezoid, trapezoid_complex};

/// Norm drift that aborts an evolution.
pub const NORM_DRIFT_LIMIT: f64 = 1e-4;

/// Required relative decay of the amplitudes at the grid edges.
pub const EDGE_DECAY: f64 = 1e-8;

/// Minimum half-width of the grid, in units of `sigma_y`.
pub const MIN_HALF_WIDTH_SIGMAS: f64 = 8.0;

pub const DEFAULT_HALF_WIDTH_SIGMAS: f64 = 12.0;
pub const DEFAULT_GRID_POINTS: usize = 513;
pub const DEFAULT_DT: f64 = 1e-3;

/// Each pass shrinks the other levels' share by about 1/100.
const INVERSE_ITERATIONS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub y_min: f64,
    pub y_max: f64,
    pub n_points: usize,
}

impl Grid1D {
    pub fn new(y_min: f64, y_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::invalid("grid.n_points", format!("need at least 3 points (got {n_points})")));
        }
        if !(y_min.is_finite() && y_max.is_finite() && y_min < 0.0 && 0.0 < y_max) {
            return Err(Error::invalid("grid", format!("need y_min < 0 < y_max (got [{y_min}, {y_max}])")));
        }
        Ok(Grid1D { y_min, y_max, n_points })
    }

    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    /// Symmetric grid of half-width `sigmas * sigma_y`.
    pub fn for_oscillator(params: &ModelParams, sigmas: f64, n_points: usize) -> Result<Self> {
        Self::symmetric(sigmas * params.sigma_y(), n_points)
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.n_points - 1) as f64
    }

    /// Grid node `i`. Nodes in the upper half are measured from `y_max` so that
    /// a symmetric grid is exactly antisymmetric and, for odd sizes, contains
    /// `y = 0`.
    pub fn point(&self, i: usize) -> f64 {
        let last = self.n_points - 1;
        if 2 * i < last {
            self.y_min + i as f64 * self.dy()
        } else {
            self.y_max - (last - i) as f64 * self.dy()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    pub fn half_width(&self) -> f64 {
        self.y_max.min(-self.y_min)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveFunction1D {
    pub grid: Grid1D,
    pub amplitudes: Vec<Complex64>,
    pub t: f64,
}

impl WaveFunction1D {
    pub fn from_fn(grid: Grid1D, t: f64, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = grid.points().into_iter().map(f).collect();
        WaveFunction1D { grid, amplitudes, t }
    }

    /// `∫ |psi|^2 dy` by the trapezoid rule.
    pub fn norm(&self) -> f64 {
        let density: Vec<f64> = self.amplitudes.iter().map(|a| a.norm_sqr()).collect();
        trapezoid(&density, self.grid.dy())
    }

    pub fn normalized(mut self) -> Self {
        let scale = 1.0 / self.norm().sqrt();
        self.amplitudes.iter_mut().for_each(|a| *a *= scale);
        self
    }

    /// `<self|other>` by the trapezoid rule.
    pub fn inner(&self, other: &WaveFunction1D) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let products: Vec<Complex64> = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .collect();
        Ok(trapezoid_complex(&products, self.grid.dy()))
    }

    /// `a * self + b * other`, keeping the time of `self`.
    pub fn combine(&self, a: Complex64, other: &WaveFunction1D, b: Complex64) -> Result<WaveFunction1D> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(WaveFunction1D {
            grid: self.grid,
            amplitudes: self.amplitudes.iter().zip(&other.amplitudes).map(|(x, y)| a * x + b * y).collect(),
            t: self.t,
        })
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn edges_decayed(&self) -> bool {
        let peak = self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let edge = self.amplitudes[0].norm().max(self.amplitudes[self.amplitudes.len() - 1].norm());
        edge <= EDGE_DECAY * peak
    }
}

/// Closed-form oscillator eigenfunction `psi_n(y)` for `n` in `{0, 1}`.
pub fn ho_eigenfunction(n: usize, params: &ModelParams, y: f64) -> f64 {
    let sigma = params.sigma_y();
    let ground = (PI * sigma * sigma).powf(-0.25) * (-0.5 * (y / sigma).powi(2)).exp();
    match n {
        0 => ground,
        1 => 2f64.sqrt() * y / sigma * ground,
        _ => panic!("only n = 0 and n = 1 are provided"),
    }
}

/// `ln |psi_n(y)|^2`, finite far into the tails where `psi_n` underflows.
pub fn ho_log_density(n: usize, params: &ModelParams, y: f64) -> f64 {
    let sigma = params.sigma_y();
    let ground = -0.5 * (PI * sigma * sigma).ln() - (y / sigma).powi(2);
    match n {
        0 => ground,
        1 => ground + (2.0 * (y / sigma).powi(2)).ln(),
        _ => panic!("only n = 0 and n = 1 are provided"),
    }
}

fn check_width(params: &ModelParams, grid: &Grid1D) -> Result<()> {
    let required = MIN_HALF_WIDTH_SIGMAS * params.sigma_y();
    if grid.half_width() < required {
        return Err(Error::GridTooNarrow {
            half_width: grid.half_width(),
            required,
        });
    }
    Ok(())
}

/// Closed-form oscillator eigenfunction `n` in `{0, 1}` sampled on `grid`,
/// renormalized to unit discrete norm.
pub fn ho_eigenstate_sampled(n: usize, params: &ModelParams, grid: &Grid1D) -> Result<WaveFunction1D> {
    if n > 1 {
        return Err(Error::invalid("n", format!("only the states 0 and 1 are available (got {n})")));
    }
    params.validate()?;
    check_width(params, grid)?;
    Ok(WaveFunction1D::from_fn(*grid, 0.0, |y| Complex64::new(ho_eigenfunction(n, params, y), 0.0)).normalized())
}

/// Oscillator eigenstate `n` in `{0, 1}` of the grid Hamiltonian (three-point
/// Laplacian, walls at the edges), normalized and sign-matched to the closed
/// form.
///
/// It agrees with [`ho_eigenstate_sampled`] to `O(dy^2)` but, unlike the
/// sampled function, is exactly stationary under [`TdseSolver`] when the
/// drive is off, so overlaps with it measure transitions only.
pub fn ho_eigenstate(n: usize, params: &ModelParams, grid: &Grid1D) -> Result<WaveFunction1D> {
    let sampled = ho_eigenstate_sampled(n, params, grid)?;
    let points = grid.points();
    let dy = grid.dy();
    let kinetic = params.hbar * params.hbar / (2.0 * params.mu * dy * dy);
    let m = grid.n_points - 2;
    // inverse iteration, shifted just below the continuum level
    let level = params.hbar * params.omega0 * (n as f64 + 0.5);
    let shift = level - 0.01 * params.hbar * params.omega0;
    let diag: Vec<f64> = points[1..grid.n_points - 1]
        .iter()
        .map(|y| 2.0 * kinetic + 0.5 * params.mu * params.omega0 * params.omega0 * y * y - shift)
        .collect();
    let mut u: Vec<f64> = sampled.amplitudes[1..grid.n_points - 1].iter().map(|a| a.re).collect();
    let mut c_prime = vec![0.0; m];
    for _ in 0..INVERSE_ITERATIONS {
        // Thomas solve of (H - shift) x = u with off-diagonal -kinetic
        let off = -kinetic;
        c_prime[0] = off / diag[0];
        u[0] /= diag[0];
        for i in 1..m {
            let denom = diag[i] - off * c_prime[i - 1];
            c_prime[i] = off / denom;
            u[i] = (u[i] - off * u[i - 1]) / denom;
        }
        for i in (0..m - 1).rev() {
            u[i] -= c_prime[i] * u[i + 1];
        }
        // restore the exact parity that rounding erodes
        let sign = if n == 0 { 1.0 } else { -1.0 };
        for i in 0..m / 2 {
            let mean = 0.5 * (u[i] + sign * u[m - 1 - i]);
            u[i] = mean;
            u[m - 1 - i] = sign * mean;
        }
        if m % 2 == 1 && n == 1 {
            u[m / 2] = 0.0;
        }
        let scale = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        u.iter_mut().for_each(|x| *x /= scale);
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); grid.n_points];
    for (a, x) in amplitudes[1..grid.n_points - 1].iter_mut().zip(&u) {
        *a = Complex64::new(*x, 0.0);
    }
    let mut state = WaveFunction1D {
        grid: *grid,
        amplitudes,
        t: 0.0,
    }
    .normalized();
    if sampled.inner(&state)?.re < 0.0 {
        state.amplitudes.iter_mut().for_each(|a| *a = -*a);
    }
    Ok(state)
}

/// Ground state displaced by `shift`: a coherent state of the oscillator.
pub fn displaced_ground_state(params: &ModelParams, grid: &Grid1D, shift: f64) -> Result<WaveFunction1D> {
    params.validate()?;
    check_width(params, grid)?;
    Ok(WaveFunction1D::from_fn(*grid, 0.0, |y| Complex64::new(ho_eigenfunction(0, params, y - shift), 0.0)).normalized())
}

/// `P_n = |<psi_n|psi>|^2`.
pub fn overlap_probability(psi: &WaveFunction1D, n: usize, params: &ModelParams) -> Result<f64> {
    let reference = ho_eigenstate(n, params, &psi.grid)?;
    Ok(reference.inner(psi)?.norm_sqr())
}

/// `<y> = ∫ psi* y psi dy`.
pub fn expectation_y(psi: &WaveFunction1D) -> f64 {
    let weighted: Vec<f64> = psi
        .amplitudes
        .iter()
        .enumerate()
        .map(|(i, a)| psi.grid.point(i) * a.norm_sqr())
        .collect();
    trapezoid(&weighted, psi.grid.dy())
}

/// `<p>` with `-i hbar d/dy` taken as the centered difference.
pub fn expectation_p_central(psi: &WaveFunction1D, hbar: f64) -> f64 {
    let a = &psi.amplitudes;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 1..a.len() - 1 {
        sum += a[j].conj() * (a[j + 1] - a[j - 1]);
    }
    // the dy of the quadrature cancels the 1/dy of the difference
    (Complex64::new(0.0, -hbar * 0.5) * sum).re
}

/// Spectral momentum expectation on the grid.
///
/// Uses `<p> = hbar (dy / N) sum_k k |psi^(k)|^2`, i.e. the derivative is
/// taken in Fourier space. Unlike the centered difference this commutes with
/// the potential to spectral accuracy, so `d<p>/dt` obeys Ehrenfest's
/// theorem up to time-discretization error only.
pub struct MomentumProbe {
    fft: Arc<dyn Fft<f64>>,
    buffer: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl MomentumProbe {
    pub fn new(n_points: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(n_points);
        let scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        MomentumProbe {
            fft,
            buffer: vec![Complex64::new(0.0, 0.0); n_points],
            scratch,
        }
    }

    pub fn expectation(&mut self, psi: &WaveFunction1D, hbar: f64) -> f64 {
        let n = psi.amplitudes.len();
        assert_eq!(n, self.buffer.len(), "probe planned for a different grid size");
        self.buffer.copy_from_slice(&psi.amplitudes);
        self.fft.process_with_scratch(&mut self.buffer, &mut self.scratch);
        let dy = psi.grid.dy();
        let dk = 2.0 * PI / (n as f64 * dy);
        let mut sum = 0.0;
        for (m, c) in self.buffer.iter().enumerate() {
            let k = if 2 * m < n {
                m as f64 * dk
            } else if 2 * m > n {
                (m as f64 - n as f64) * dk
            } else {
                0.0 // Nyquist bin carries no net momentum
            };
            sum += k * c.norm_sqr();
        }
        hbar * dy / n as f64 * sum
    }
}

pub fn expectation_p(psi: &WaveFunction1D, hbar: f64) -> f64 {
    MomentumProbe::new(psi.amplitudes.len()).expectation(psi, hbar)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stepper {
    #[default]
    ImplicitMidpoint,
    Leapfrog,
}

/// Per-step record handed to observers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub t: f64,
    pub p0: f64,
    pub p1: f64,
    pub y_expect: f64,
    pub p_expect: f64,
    pub norm: f64,
}

/// Time-dependent Schrödinger solver for the driven oscillator on a fixed
/// grid.
pub struct TdseSolver<'a> {
    params: ModelParams,
    window: &'a WindowFunction,
    grid: Grid1D,
    dt: f64,
    stepper: Stepper,
    potential: Vec<f64>,
    points: Vec<f64>,
    /// `hbar^2 / (2 mu dy^2)`.
    kinetic: f64,
}

impl<'a> TdseSolver<'a> {
    pub fn new(params: &ModelParams, window: &'a WindowFunction, grid: Grid1D, dt: f64) -> Result<Self> {
        params.validate()?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid("dt", format!("must be positive (got {dt})")));
        }
        let points = grid.points();
        let potential = points
            .iter()
            .map(|y| 0.5 * params.mu * params.omega0 * params.omega0 * y * y)
            .collect();
        let dy = grid.dy();
        Ok(TdseSolver {
            params: *params,
            window,
            grid,
            dt,
            stepper: Stepper::ImplicitMidpoint,
            potential,
            points,
            kinetic: params.hbar * params.hbar / (2.0 * params.mu * dy * dy),
        })
    }

    pub fn with_stepper(mut self, stepper: Stepper) -> Self {
        self.stepper = stepper;
        self
    }

    /// Stability bound of the leapfrog scheme, `2 hbar / E_max` with `E_max`
    /// a Gershgorin bound on the discretized Hamiltonian (drive neglected).
    pub fn leapfrog_dt_limit(&self) -> f64 {
        let v_max = self.potential.iter().cloned().fold(0.0, f64::max);
        2.0 * self.params.hbar / (4.0 * self.kinetic + v_max)
    }

    fn drive(&self, t: f64) -> f64 {
        self.params.alpha * self.window.eval(self.params.v * t)
    }

    /// Real symmetric `H(t) u` on interior nodes, walls at both edges.
    fn apply_hamiltonian(&self, t: f64, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        let drive = self.drive(t);
        out[0] = 0.0;
        out[n - 1] = 0.0;
        for j in 1..n - 1 {
            let v = self.potential[j] - drive * self.points[j];
            out[j] = self.kinetic * (2.0 * u[j] - u[j - 1] - u[j + 1]) + v * u[j];
        }
    }

    /// One implicit midpoint step `(1 + i tau H) psi' = (1 - i tau H) psi`
    /// with `H` frozen at `t_mid` and `tau = dt / 2 hbar`.
    fn implicit_midpoint_step(&self, psi: &mut [Complex64], t_mid: f64, dt: f64, work: &mut ThomasWork) {
        let n = psi.len();
        let tau = dt / (2.0 * self.params.hbar);
        let drive = self.drive(t_mid);
        let off = Complex64::new(0.0, -tau * self.kinetic);
        let m = n - 2;
        // Right-hand side and diagonal on interior nodes 1..n-1.
        for j in 1..n - 1 {
            let v = self.potential[j] - drive * self.points[j];
            let h_diag = 2.0 * self.kinetic + v;
            let h_psi = self.kinetic * (2.0 * psi[j] - psi[j - 1] - psi[j + 1]) + v * psi[j];
            work.rhs[j - 1] = psi[j] - Complex64::new(0.0, tau) * h_psi;
            work.diag[j - 1] = Complex64::new(1.0, tau * h_diag);
        }
        // Thomas algorithm with constant off-diagonal `off`.
        work.c_prime[0] = off / work.diag[0];
        work.rhs[0] /= work.diag[0];
        for i in 1..m {
            let denom = work.diag[i] - off * work.c_prime[i - 1];
            work.c_prime[i] = off / denom;
            work.rhs[i] = (work.rhs[i] - off * work.rhs[i - 1]) / denom;
        }
        for i in (0..m - 1).rev() {
            work.rhs[i] = work.rhs[i] - work.c_prime[i] * work.rhs[i + 1];
        }
        psi[0] = Complex64::new(0.0, 0.0);
        psi[n - 1] = Complex64::new(0.0, 0.0);
        psi[1..n - 1].copy_from_slice(&work.rhs[..m]);
    }

    /// Evolves `psi` to `t_end`. The step is shrunk to fit the interval in a
    /// whole number of uniform steps. `observer` sees the initial state and
    /// every step.
    pub fn evolve(
        &self,
        psi: &WaveFunction1D,
        t_end: f64,
        mut observer: Option<&mut dyn FnMut(&Observation)>,
    ) -> Result<WaveFunction1D> {
        if psi.grid != self.grid {
            return Err(Error::GridMismatch);
        }
        if !(t_end > psi.t) {
            return Err(Error::invalid("t_end", "must be later than the state's time"));
        }
        if !psi.edges_decayed() {
            return Err(Error::invalid("psi", "amplitude has not decayed at the grid edges"));
        }
        let steps = ((t_end - psi.t) / self.dt - 1e-9).ceil().max(1.0) as usize;
        let dt = (t_end - psi.t) / steps as f64;
        let t0 = psi.t;
        let initial_norm = psi.norm();

        let mut probe = match observer {
            Some(_) => Some(ObservationProbe::new(&self.params, &self.grid)?),
            None => None,
        };
        let hbar = self.params.hbar;
        let mut observe = |state: &WaveFunction1D, norm: f64, observer: &mut Option<&mut dyn FnMut(&Observation)>| -> Result<()> {
            if let (Some(obs), Some(probe)) = (observer.as_mut(), probe.as_mut()) {
                obs(&probe.record(state, norm, hbar)?);
            }
            Ok(())
        };

        let mut state = psi.clone();
        observe(&state, initial_norm, &mut observer)?;
        let check = |step: usize, t: f64, norm: f64| -> Result<()> {
            let drift = (norm - initial_norm).abs();
            if !(drift <= NORM_DRIFT_LIMIT * initial_norm.max(f64::MIN_POSITIVE)) {
                return Err(Error::StabilityFailure { step, t, drift });
            }
            Ok(())
        };

        match self.stepper {
            Stepper::ImplicitMidpoint => {
                let mut work = ThomasWork::new(self.grid.n_points);
                for step in 1..=steps {
                    let t_prev = t0 + (step - 1) as f64 * dt;
                    self.implicit_midpoint_step(&mut state.amplitudes, t_prev + 0.5 * dt, dt, &mut work);
                    state.t = t0 + step as f64 * dt;
                    let norm = state.norm();
                    check(step, state.t, norm)?;
                    observe(&state, norm, &mut observer)?;
                }
            }
            Stepper::Leapfrog => {
                let n = self.grid.n_points;
                let mut re: Vec<f64> = state.amplitudes.iter().map(|a| a.re).collect();
                let mut im_half: Vec<f64> = state.amplitudes.iter().map(|a| a.im).collect();
                let mut h_u = vec![0.0; n];
                // Im psi at t0 + dt/2 from a half step.
                self.apply_hamiltonian(t0, &re, &mut h_u);
                let c = dt / self.params.hbar;
                for j in 0..n {
                    im_half[j] -= 0.5 * c * h_u[j];
                }
                re[0] = 0.0;
                re[n - 1] = 0.0;
                for step in 1..=steps {
                    let t_prev = t0 + (step - 1) as f64 * dt;
                    self.apply_hamiltonian(t_prev + 0.5 * dt, &im_half, &mut h_u);
                    for j in 0..n {
                        re[j] += c * h_u[j];
                    }
                    let t_now = t0 + step as f64 * dt;
                    self.apply_hamiltonian(t_now, &re, &mut h_u);
                    for j in 0..n {
                        let next = im_half[j] - c * h_u[j];
                        state.amplitudes[j] = Complex64::new(re[j], 0.5 * (im_half[j] + next));
                        im_half[j] = next;
                    }
                    state.t = t_now;
                    let norm = state.norm();
                    check(step, state.t, norm)?;
                    observe(&state, norm, &mut observer)?;
                }
            }
        }
        Ok(state)
    }
}

struct ObservationProbe {
    momentum: MomentumProbe,
    ground: WaveFunction1D,
    excited: WaveFunction1D,
}

impl ObservationProbe {
    fn new(params: &ModelParams, grid: &Grid1D) -> Result<Self> {
        Ok(ObservationProbe {
            momentum: MomentumProbe::new(grid.n_points),
            ground: ho_eigenstate(0, params, grid)?,
            excited: ho_eigenstate(1, params, grid)?,
        })
    }

    fn record(&mut self, state: &WaveFunction1D, norm: f64, hbar: f64) -> Result<Observation> {
        Ok(Observation {
            t: state.t,
            p0: self.ground.inner(state)?.norm_sqr(),
            p1: self.excited.inner(state)?.norm_sqr(),
            y_expect: expectation_y(state),
            p_expect: self.momentum.expectation(state, hbar),
            norm,
        })
    }
}

struct ThomasWork {
    diag: Vec<Complex64>,
    rhs: Vec<Complex64>,
    c_prime: Vec<Complex64>,
}

impl ThomasWork {
    fn new(n: usize) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        ThomasWork {
            diag: vec![zero; n - 2],
            rhs: vec![zero; n - 2],
            c_prime: vec![zero; n - 2],
        }
    }
}

/// Evolves `psi` from `psi.t` to `t_end` with the default stepper.
pub fn evolve_tdse(
    psi: &WaveFunction1D,
    params: &ModelParams,
    window: &WindowFunction,
    t_end: f64,
    dt: f64,
) -> Result<WaveFunction1D> {
    TdseSolver::new(params, window, psi.grid, dt)?.evolve(psi, t_end, None)
}

/// Like [`evolve_tdse`], calling `observer` at every step.
pub fn evolve_tdse_observed(
    psi: &WaveFunction1D,
    params: &ModelParams,
    window: &WindowFunction,
    t_end: f64,
    dt: f64,
    observer: &mut dyn FnMut(&Observation),
) -> Result<WaveFunction1D> {
    TdseSolver::new(params, window, psi.grid, dt)?.evolve(psi, t_end, Some(observer))
}

/// One sample of an expectation-value history.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EhrenfestSample {
    pub t: f64,
    pub y: f64,
    pub p: f64,
}

impl From<&Observation> for EhrenfestSample {
    fn from(o: &Observation) -> Self {
        EhrenfestSample {
            t: o.t,
            y: o.y_expect,
            p: o.p_expect,
        }
    }
}

/// `max_t |d<p>/dt - (-mu omega0^2 <y> + alpha f(v t))|` with the time
/// derivative taken by centered differences.
pub fn ehrenfest_residual(history: &[EhrenfestSample], params: &ModelParams, window: &WindowFunction) -> Result<f64> {
    if history.len() < 3 {
        return Err(Error::InsufficientSamples(history.len()));
    }
    let h = history[1].t - history[0].t;
    if !(h > 0.0) || history.windows(2).any(|w| ((w[1].t - w[0].t) - h).abs() > 1e-6 * h) {
        return Err(Error::invalid("history", "samples must be uniformly spaced in time"));
    }
    let k = params.mu * params.omega0 * params.omega0;
    Ok(history
        .windows(3)
        .map(|w| {
            let dp_dt = (w[2].p - w[0].p) / (w[2].t - w[0].t);
            let force = -k * w[1].y + params.alpha * window.eval(params.v * w[1].t);
            (dp_dt - force).abs()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn preset() -> (ModelParams, WindowFunction, Grid1D) {
        let p = ModelParams::natural(7.0);
        let g = Grid1D::for_oscillator(&p, DEFAULT_HALF_WIDTH_SIGMAS, DEFAULT_GRID_POINTS).unwrap();
        (p, WindowFunction::gaussian(10.0).unwrap(), g)
    }

    #[test]
    fn grid_layout() {
        let g = Grid1D::symmetric(1.2, 513).unwrap();
        assert_eq!(g.point(256), 0.0);
        for i in 0..513 {
            assert_eq!(g.point(i), -g.point(512 - i));
        }
        assert!(Grid1D::new(0.0, 1.0, 11).is_err());
        assert!(Grid1D::symmetric(1.0, 2).is_err());
    }

    #[test]
    fn eigenstates() {
        let (p, _, g) = preset();
        let psi0 = ho_eigenstate(0, &p, &g).unwrap();
        let psi1 = ho_eigenstate(1, &p, &g).unwrap();
        // peak (mu omega0 / pi hbar)^(1/4); the grid state differs at O(dy^2)
        let peak = (100.0 / PI).powf(0.25);
        let sampled = ho_eigenstate_sampled(0, &p, &g).unwrap();
        assert!((sampled.amplitudes[256].re - peak).abs() < 1e-12);
        assert!((psi0.amplitudes[256].re - peak).abs() < 1e-3 * peak);
        assert!((psi0.inner(&sampled).unwrap().norm_sqr() - 1.0).abs() < 1e-6);
        assert!(ho_eigenstate_sampled(1, &p, &g).unwrap().inner(&psi1).unwrap().re > 0.999_999);
        assert_eq!(psi1.amplitudes[256], Complex64::new(0.0, 0.0));
        assert!(psi0.inner(&psi1).unwrap().norm() < 1e-10);
        assert!((psi0.norm() - 1.0).abs() < 1e-14);
        assert!(ho_eigenstate(2, &p, &g).is_err());
        let narrow = Grid1D::symmetric(0.5, 101).unwrap();
        assert!(matches!(ho_eigenstate(0, &p, &narrow), Err(Error::GridTooNarrow { .. })));
    }

    #[test]
    fn grid_eigenvectors() {
        let (p, f, g) = preset();
        let solver = TdseSolver::new(&p.with_alpha(0.0), &f, g, 1e-3).unwrap();
        for (n, level) in [(0, 0.5), (1, 1.5)] {
            let psi = ho_eigenstate(n, &p, &g).unwrap();
            let u: Vec<f64> = psi.amplitudes.iter().map(|a| a.re).collect();
            let mut hu = vec![0.0; u.len()];
            solver.apply_hamiltonian(0.0, &u, &mut hu);
            let energy: f64 = u.iter().zip(&hu).map(|(a, b)| a * b).sum::<f64>() / u.iter().map(|a| a * a).sum::<f64>();
            assert!((energy - level).abs() < 1e-3, "E_{n} = {energy}");
            let residual = u.iter().zip(&hu).map(|(a, b)| (b - energy * a).abs()).fold(0.0, f64::max);
            assert!(residual < 1e-10, "{residual}");
        }
    }

    #[test]
    fn overlaps_and_expectations() {
        let (p, _, g) = preset();
        let psi0 = ho_eigenstate(0, &p, &g).unwrap();
        let psi1 = ho_eigenstate(1, &p, &g).unwrap();
        assert!((overlap_probability(&psi1, 1, &p).unwrap() - 1.0).abs() < 1e-8);
        assert!(overlap_probability(&psi0, 1, &p).unwrap() < 1e-10);
        assert!(expectation_y(&psi0).abs() < 1e-10);
        // closed-form states for the analytic <0|y|1> = sigma / sqrt(2)
        let psi0 = ho_eigenstate_sampled(0, &p, &g).unwrap();
        let psi1 = ho_eigenstate_sampled(1, &p, &g).unwrap();
        let s = Complex64::new(0.5f64.sqrt(), 0.0);
        let plus = psi0.combine(s, &psi1, s).unwrap();
        assert!((expectation_y(&plus) - 0.1 / 2f64.sqrt()).abs() < 1e-6);
        let quadrature = psi0.combine(s, &psi1, Complex64::new(0.0, 0.5f64.sqrt())).unwrap();
        assert!(expectation_y(&quadrature).abs() < 1e-10);
        // and that state carries momentum <p> = mu omega0 sigma / sqrt(2)
        let expected_p = 100.0 * 0.1 / 2f64.sqrt();
        assert!((expectation_p(&quadrature, 1.0) - expected_p).abs() < 1e-6 * expected_p);
        assert!((expectation_p_central(&quadrature, 1.0) - expected_p).abs() < 2e-3 * expected_p);
        assert!(expectation_p(&plus, 1.0).abs() < 1e-10);
    }

    #[test]
    fn free_stationary_state() {
        let (p, f, g) = preset();
        let p = p.with_alpha(0.0);
        let psi0 = ho_eigenstate(0, &p, &g).unwrap();
        let out = evolve_tdse(&psi0, &p, &f, 2.0, 1e-3).unwrap();
        let drift = psi0
            .amplitudes
            .iter()
            .zip(&out.amplitudes)
            .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
            .fold(0.0, f64::max);
        assert!(drift < 1e-8);
        // global phase e^{-i omega0 t / 2}
        let phase = out.amplitudes[256] / psi0.amplitudes[256];
        let expected = Complex64::from_polar(1.0, -0.5 * 2.0);
        // grid ground energy differs from hbar omega0 / 2 at O(dy^2)
        assert!((phase - expected).norm() < 1e-3);
    }

    #[test]
    fn leapfrog_matches_implicit_midpoint() {
        let (p, f, g) = preset();
        let psi = displaced_ground_state(&p, &g, 0.05).unwrap();
        let cn = evolve_tdse(&psi, &p.with_alpha(0.0), &f, 1.0, 1e-3).unwrap();
        let solver = TdseSolver::new(&p.with_alpha(0.0), &f, g, 1e-3).unwrap().with_stepper(Stepper::Leapfrog);
        assert!(solver.leapfrog_dt_limit() > 1e-3);
        let lf = solver.evolve(&psi, 1.0, None).unwrap();
        assert!((expectation_y(&cn) - expectation_y(&lf)).abs() < 1e-5);
        assert!((lf.norm() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn leapfrog_blows_up_beyond_limit() {
        let (p, f, g) = preset();
        let psi = ho_eigenstate(0, &p, &g).unwrap();
        let solver = TdseSolver::new(&p, &f, g, 5e-3).unwrap().with_stepper(Stepper::Leapfrog);
        assert!(solver.leapfrog_dt_limit() < 5e-3);
        let err = solver.evolve(&psi, 5.0, None);
        assert!(matches!(err, Err(Error::StabilityFailure { .. })));
    }

    #[test]
    fn ehrenfest_needs_samples() {
        let (p, f, _) = preset();
        let h = [EhrenfestSample { t: 0.0, y: 0.0, p: 0.0 }; 2];
        assert!(matches!(ehrenfest_residual(&h, &p, &f), Err(Error::InsufficientSamples(2))));
    }

    #[test]
    fn rejects_undecayed_state() {
        let (p, f, _) = preset();
        let g = Grid1D::symmetric(1.2, 101).unwrap();
        let flat = WaveFunction1D::from_fn(g, 0.0, |_| Complex64::new(1.0, 0.0));
        assert!(evolve_tdse(&flat, &p, &f, 1.0, 1e-3).is_err());
    }
}
