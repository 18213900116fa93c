//! Fully quantum picture after the collision: the two-branch entangled state
//!
//! ```text
//! |psi_f> = c0 |k0>|0> + c1 |k1>|1>,    c1 = d1 sqrt(P1), |d1| = 1
//! ```
//!
//! together with its reduction to the oscillator, partial-projection
//! measurements on either subsystem, and Monte Carlo sampling of joint
//! measurement records.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, WindowFunction};
use crate::perturbation::{drive_coefficient, p1_full, scattered_wavenumber, ScatteringKinematics, VALIDITY_THRESHOLD};
use crate::tdse::{ho_eigenfunction, ho_log_density};

/// Normalization convention recorded alongside every final state.
pub const NORMALIZATION: &str = "c1 = d1*sqrt(P1), c0 = sqrt(1 - P1)";

/// Half-width of the tabulated sampling grid, in units of `sigma_y`.
const SAMPLING_HALF_WIDTH: f64 = 12.0;
const SAMPLING_POINTS: usize = 8193;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Beam at `k0`, oscillator in `|0>`.
    Unscattered,
    /// Beam at `k1`, oscillator in `|1>`.
    Scattered,
}

impl Branch {
    pub fn index(self) -> usize {
        match self {
            Branch::Unscattered => 0,
            Branch::Scattered => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalStateAmplitudes {
    pub c0: Complex64,
    pub c1: Complex64,
    pub k0: f64,
    pub k1: f64,
    /// Total energy `hbar^2 k0^2 / 2m + hbar omega0 / 2`.
    pub e_total: f64,
    pub normalization: String,
}

impl FinalStateAmplitudes {
    /// Two-branch state with scattered weight `p1` and phase `d1`.
    ///
    /// Requires `p1 <= 1/2` so that the scattered branch never dominates.
    pub fn from_probability(p1: f64, d1: Complex64, kinematics: &ScatteringKinematics, e_total: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&p1) {
            return Err(Error::PerturbationRegime { p1, bound: 0.5 });
        }
        let phase = if d1.norm() > 0.0 { d1 / d1.norm() } else { Complex64::new(1.0, 0.0) };
        Ok(FinalStateAmplitudes {
            c0: Complex64::new((1.0 - p1).sqrt(), 0.0),
            c1: phase * p1.sqrt(),
            k0: kinematics.k0,
            k1: kinematics.k1,
            e_total,
            normalization: NORMALIZATION.to_string(),
        })
    }

    pub fn weight(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Unscattered => self.c0.norm_sqr(),
            Branch::Scattered => self.c1.norm_sqr(),
        }
    }

    /// Branch-resolved stationary density `(|c0 psi0(y)|^2, |c1 psi1(y)|^2)`.
    pub fn branch_density(&self, y: f64, params: &ModelParams) -> (f64, f64) {
        (
            self.c0.norm_sqr() * ho_eigenfunction(0, params, y).powi(2),
            self.c1.norm_sqr() * ho_eigenfunction(1, params, y).powi(2),
        )
    }
}

/// Builds the post-collision state for incident wavenumber `k0`.
///
/// The phase `d1` is that of the quadrature-evaluated first-order amplitude
/// of the classically driven oscillator at `v = hbar k0 / m`, so the reduced
/// dynamics line up with the time-dependent simulation.
pub fn build_final_state(params: &ModelParams, window: &WindowFunction, k0: f64) -> Result<FinalStateAmplitudes> {
    let kinematics = scattered_wavenumber(k0, params)?;
    let full = p1_full(params, window, k0)?;
    if full.p1 >= VALIDITY_THRESHOLD {
        return Err(Error::PerturbationRegime {
            p1: full.p1,
            bound: VALIDITY_THRESHOLD,
        });
    }
    let beam = params.with_v(params.hbar * k0 / params.m);
    let d1 = drive_coefficient(1, &beam, window)?;
    let e_total = params.hbar * params.hbar * k0 * k0 / (2.0 * params.m) + 0.5 * params.hbar * params.omega0;
    FinalStateAmplitudes::from_probability(full.p1, d1, &kinematics, e_total)
}

/// Oscillator amplitudes after tracing out the beam.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedOscillator {
    pub t: f64,
    pub a0: Complex64,
    pub a1: Complex64,
}

impl ReducedOscillator {
    /// `<y>(t) = sqrt(2 hbar / mu omega0) Re[a0* a1]`.
    pub fn expect_y(&self, params: &ModelParams) -> f64 {
        2.0 * params.dipole_element() * (self.a0.conj() * self.a1).re
    }
}

/// `a0 = c0 e^{-i omega0 t/2}`, `a1 = c1 e^{-3 i omega0 t/2}`.
pub fn reduce_to_oscillator(state: &FinalStateAmplitudes, t: f64, params: &ModelParams) -> ReducedOscillator {
    let w = params.omega0 * t;
    ReducedOscillator {
        t,
        a0: state.c0 * Complex64::from_polar(1.0, -0.5 * w),
        a1: state.c1 * Complex64::from_polar(1.0, -1.5 * w),
    }
}

/// Amplitude of the `<y>(t)` oscillation of the reduced state.
pub fn oscillation_amplitude(state: &FinalStateAmplitudes, params: &ModelParams) -> f64 {
    2.0 * params.dipole_element() * state.c0.norm() * state.c1.norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    BeamMomentum,
    OscillatorPosition,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Posterior {
    /// Product state `|k>|n>` left after a beam momentum reading.
    Product { beam_k: f64, oscillator_level: usize },
    /// Beam branch weights left after an oscillator position reading.
    BeamWeights { p_k0: f64, p_k1: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub observable: Observable,
    pub value: f64,
    /// Born probability of a discrete outcome.
    pub probability: Option<f64>,
    /// `ln` of the probability density of a continuous reading.
    pub log_density: Option<f64>,
    pub posterior: Posterior,
}

/// Projects the beam onto `|k0>` or `|k1>`.
pub fn measure_beam_momentum(state: &FinalStateAmplitudes, outcome: f64) -> Result<MeasurementOutcome> {
    let matches = |k: f64| (outcome - k).abs() <= 1e-12 * k.abs().max(1.0);
    let branch = if matches(state.k0) {
        Branch::Unscattered
    } else if matches(state.k1) {
        Branch::Scattered
    } else {
        return Err(Error::InvalidOutcome {
            value: outcome,
            k0: state.k0,
            k1: state.k1,
        });
    };
    let (beam_k, oscillator_level) = match branch {
        Branch::Unscattered => (state.k0, 0),
        Branch::Scattered => (state.k1, 1),
    };
    Ok(MeasurementOutcome {
        observable: Observable::BeamMomentum,
        value: beam_k,
        probability: Some(state.weight(branch)),
        log_density: None,
        posterior: Posterior::Product { beam_k, oscillator_level },
    })
}

fn branch_log_weights(state: &FinalStateAmplitudes, y: f64, params: &ModelParams) -> (f64, f64) {
    let lw0 = state.c0.norm_sqr().ln() + ho_log_density(0, params, y);
    let lw1 = if y == 0.0 || state.c1.norm() == 0.0 {
        f64::NEG_INFINITY
    } else {
        state.c1.norm_sqr().ln() + ho_log_density(1, params, y)
    };
    (lw0, lw1)
}

/// `(P(k0|y), P(k1|y))`, evaluated with log-domain weights so that readings
/// deep in the tails, where both eigenfunctions underflow, stay exact.
pub fn conditional_beam_probabilities(state: &FinalStateAmplitudes, y: f64, params: &ModelParams) -> (f64, f64) {
    let (lw0, lw1) = branch_log_weights(state, y, params);
    if lw1 == f64::NEG_INFINITY {
        return (1.0, 0.0);
    }
    if lw0 == f64::NEG_INFINITY {
        return (0.0, 1.0);
    }
    // logistic in the log-weight difference
    let d = lw1 - lw0;
    if d > 0.0 {
        let e = (-d).exp();
        (e / (1.0 + e), 1.0 / (1.0 + e))
    } else {
        let e = d.exp();
        (1.0 / (1.0 + e), e / (1.0 + e))
    }
}

/// Projects the oscillator onto `|y'>`.
pub fn measure_oscillator_position(state: &FinalStateAmplitudes, y_prime: f64, params: &ModelParams) -> Result<MeasurementOutcome> {
    if !y_prime.is_finite() {
        return Err(Error::invalid("y_prime", "must be finite"));
    }
    let (lw0, lw1) = branch_log_weights(state, y_prime, params);
    let hi = lw0.max(lw1);
    let log_density = hi + ((lw0 - hi).exp() + (lw1 - hi).exp()).ln();
    let (p_k0, p_k1) = conditional_beam_probabilities(state, y_prime, params);
    Ok(MeasurementOutcome {
        observable: Observable::OscillatorPosition,
        value: y_prime,
        probability: None,
        log_density: Some(log_density),
        posterior: Posterior::BeamWeights { p_k0, p_k1 },
    })
}

/// Position where `P(k1|y) = 1/2`: `sigma_y |c0/c1| / sqrt(2)`.
pub fn crossover_position(state: &FinalStateAmplitudes, params: &ModelParams) -> f64 {
    params.sigma_y() * (state.c0.norm() / state.c1.norm()) / 2f64.sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementOrder {
    BeamFirst,
    OscillatorFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointDraw {
    pub branch: Branch,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointSamples {
    pub order: MeasurementOrder,
    pub draws: Vec<JointDraw>,
    pub counts: [u64; 2],
}

impl JointSamples {
    pub fn frequency(&self, branch: Branch) -> f64 {
        self.counts[branch.index()] as f64 / self.draws.len() as f64
    }

    /// Counts per (branch, y-bin), flattened branch-major. `edges` are the
    /// interior bin edges; the outer bins are open.
    pub fn histogram(&self, edges: &[f64]) -> Vec<u64> {
        let bins = edges.len() + 1;
        let mut counts = vec![0u64; 2 * bins];
        for d in &self.draws {
            let bin = edges.partition_point(|&e| e <= d.y);
            counts[d.branch.index() * bins + bin] += 1;
        }
        counts
    }
}

/// Inverse-CDF sampler for a density tabulated on a uniform grid; the CDF is
/// piecewise linear between nodes.
struct InverseCdf {
    y0: f64,
    dy: f64,
    cdf: Vec<f64>,
}

impl InverseCdf {
    fn new(y0: f64, dy: f64, density: &[f64]) -> Self {
        let mut cdf = Vec::with_capacity(density.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in density.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * dy;
            cdf.push(acc);
        }
        InverseCdf { y0, dy, cdf }
    }

    fn sample(&self, u: f64) -> f64 {
        let target = u * self.cdf[self.cdf.len() - 1];
        let i = self.cdf.partition_point(|&c| c <= target).clamp(1, self.cdf.len() - 1);
        let (lo, hi) = (self.cdf[i - 1], self.cdf[i]);
        let frac = if hi > lo { (target - lo) / (hi - lo) } else { 0.5 };
        self.y0 + (i as f64 - 1.0 + frac) * self.dy
    }
}

/// Draws `n` joint (beam branch, oscillator position) records by the Born
/// rule, measuring the subsystems in the given order. Deterministic for a
/// fixed seed.
pub fn sample_joint_measurement(
    state: &FinalStateAmplitudes,
    seed: u64,
    order: MeasurementOrder,
    n: usize,
    params: &ModelParams,
) -> Result<JointSamples> {
    if n == 0 {
        return Err(Error::invalid("n_samples", "must be at least 1"));
    }
    let half = SAMPLING_HALF_WIDTH * params.sigma_y();
    let dy = 2.0 * half / (SAMPLING_POINTS - 1) as f64;
    let ys: Vec<f64> = (0..SAMPLING_POINTS).map(|i| -half + i as f64 * dy).collect();
    let psi0_sq: Vec<f64> = ys.iter().map(|&y| ho_eigenfunction(0, params, y).powi(2)).collect();
    let psi1_sq: Vec<f64> = ys.iter().map(|&y| ho_eigenfunction(1, params, y).powi(2)).collect();
    let w1 = state.weight(Branch::Scattered);
    let w0 = state.weight(Branch::Unscattered);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(n);
    let mut counts = [0u64; 2];
    match order {
        MeasurementOrder::BeamFirst => {
            let tables = [InverseCdf::new(-half, dy, &psi0_sq), InverseCdf::new(-half, dy, &psi1_sq)];
            let total = w0 + w1;
            for _ in 0..n {
                let branch = if rng.random::<f64>() * total < w1 {
                    Branch::Scattered
                } else {
                    Branch::Unscattered
                };
                let y = tables[branch.index()].sample(rng.random());
                counts[branch.index()] += 1;
                draws.push(JointDraw { branch, y });
            }
        }
        MeasurementOrder::OscillatorFirst => {
            let mixture: Vec<f64> = psi0_sq.iter().zip(&psi1_sq).map(|(a, b)| w0 * a + w1 * b).collect();
            let table = InverseCdf::new(-half, dy, &mixture);
            for _ in 0..n {
                let y = table.sample(rng.random());
                let (_, p_k1) = conditional_beam_probabilities(state, y, params);
                let branch = if rng.random::<f64>() < p_k1 {
                    Branch::Scattered
                } else {
                    Branch::Unscattered
                };
                counts[branch.index()] += 1;
                draws.push(JointDraw { branch, y });
            }
        }
    }
    Ok(JointSamples { order, draws, counts })
}
