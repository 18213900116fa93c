//! Named experiments that tie the modules together and write figure-ready
//! CSV/JSON files into the configured output directory.
//!
//! Every output is a pure function of the configuration (including the seed),
//! so repeated runs produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::classical::{
    classical_amplitude_analytic, fit_harmonic, integrate_classical, time_window, work_on_beam_numeric,
    work_on_oscillator_analytic, ClassicalState, DECOUPLED_LEVEL,
};
use crate::config::{Scenario, ScenarioConfig};
use crate::error::{Error, Result};
use crate::model::{ModelParams, WindowFunction};
use crate::output::{format_float, write_json, CsvOutput};
use crate::perturbation::{p1_full, p1_partial, scattered_wavenumber, TransitionRecord};
use crate::stats::{binomial_sigma, two_sample_chi_squared, ChiSquaredTest};
use crate::tdse::{ehrenfest_residual, ho_eigenstate, EhrenfestSample, Grid1D, Observation, TdseSolver, WaveFunction1D};
use crate::twoparticle::{
    build_final_state, conditional_beam_probabilities, crossover_position, sample_joint_measurement, Branch,
    FinalStateAmplitudes, JointSamples, MeasurementOrder,
};

/// Half-width, in `sigma_y`, of tabulated position curves.
const CURVE_HALF_WIDTH: f64 = 6.0;
const CURVE_POINTS: usize = 481;

/// Files written by a scenario, plus any tolerance or sweep-point failures.
/// Failures do not abort the run but make the process exit with status 2.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScenarioReport {
    pub files: Vec<PathBuf>,
    pub failures: Vec<String>,
}

impl ScenarioReport {
    pub fn success(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Process exit status for a scenario outcome: 0 success, 1 configuration
/// error, 2 numerical failure.
pub fn exit_code(outcome: &Result<ScenarioReport>) -> i32 {
    match outcome {
        Ok(report) if report.success() => 0,
        Ok(_) => 2,
        Err(e) if e.is_config_error() => 1,
        Err(_) => 2,
    }
}

/// Validates `config`, then runs `scenario` (or `config.scenario`).
pub fn run_scenario(config: &ScenarioConfig, scenario: Option<Scenario>) -> Result<ScenarioReport> {
    let scenario = scenario
        .or(config.scenario)
        .ok_or_else(|| Error::invalid("scenario", "no scenario selected"))?;
    config.validate()?;
    if scenario == Scenario::Sweep && config.sweep.v_list.is_empty() && config.sweep.alpha_list.is_empty() {
        return Err(Error::invalid("sweep.v_list", "sweep needs a non-empty v_list or alpha_list"));
    }
    let window = config.window()?;
    let dir = &config.output.dir;
    fs::create_dir_all(dir)?;
    log::info!("running scenario `{}` into {}", scenario.name(), dir.display());
    let mut ctx = Context {
        config,
        params: config.params(),
        window,
        dir,
        report: ScenarioReport::default(),
    };
    let mut resolved = config.clone();
    resolved.scenario = Some(scenario);
    let path = ctx.path("config.toml");
    fs::write(path, resolved.to_toml_string()?)?;
    match scenario {
        Scenario::Classical => ctx.classical()?,
        Scenario::Partial => ctx.partial()?,
        Scenario::Full => ctx.full()?,
        Scenario::Measure => ctx.measure()?,
        Scenario::Sweep => ctx.sweep()?,
        Scenario::Compare => ctx.compare()?,
    }
    for f in &ctx.report.failures {
        log::error!("{f}");
    }
    Ok(ctx.report)
}

struct Context<'a> {
    config: &'a ScenarioConfig,
    params: ModelParams,
    window: WindowFunction,
    dir: &'a Path,
    report: ScenarioReport,
}

impl Context<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.report.files.push(p.clone());
        p
    }

    fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let p = self.path(name);
        write_json(&p, value)
    }

    fn classical(&mut self) -> Result<()> {
        let speeds = if self.config.sweep.v_list.is_empty() {
            vec![self.params.v]
        } else {
            self.config.sweep.v_list.clone()
        };
        let mut summaries = Vec::new();
        for v in speeds {
            let params = self.params.with_v(v);
            let run = classical_run(&params, &self.window, self.config.numerics.dt, self.config.numerics.t_span)?;
            let path = self.path(&format!("trajectory_v{v}.csv"));
            let mut out = CsvOutput::create(&path, &["t", "x", "p_x", "y", "p_y", "H"])?;
            let stride = self.config.numerics.stride;
            let n = run.trajectory.len();
            for (i, (s, h)) in run.trajectory.states.iter().zip(&run.trajectory.energy).enumerate() {
                if i % stride == 0 || i + 1 == n {
                    out.write_floats(&[s.t, s.x, s.p_x, s.y, s.p_y, *h])?;
                }
            }
            out.finish()?;
            summaries.push(run.summary);
        }
        self.json("classical_summary.json", &summaries)
    }

    fn partial(&mut self) -> Result<()> {
        let run = tdse_run(self.config, &self.params, &self.window)?;
        let path = self.path("tdse_timeseries.csv");
        let mut out = CsvOutput::create(&path, &["t", "P0", "P1", "y_expect", "p_expect", "norm"])?;
        let stride = self.config.numerics.stride;
        let n = run.observations.len();
        for (i, o) in run.observations.iter().enumerate() {
            if i % stride == 0 || i + 1 == n {
                out.write_floats(&[o.t, o.p0, o.p1, o.y_expect, o.p_expect, o.norm])?;
            }
        }
        out.finish()?;

        let path = self.path("tdse_snapshot.csv");
        let mut out = CsvOutput::create(&path, &["y", "abs2", "re", "im"])?;
        for (y, a) in run.final_state.grid.points().into_iter().zip(&run.final_state.amplitudes) {
            out.write_floats(&[y, a.norm_sqr(), a.re, a.im])?;
        }
        out.finish()?;

        let summary = &run.summary;
        if summary.p0_plus_p1_deviation > 1e-5 {
            self.report
                .failures
                .push(format!("P0 + P1 deviates from 1 by {:e}", summary.p0_plus_p1_deviation));
        }
        self.json("partial_summary.json", summary)
    }

    fn full(&mut self) -> Result<()> {
        let k0 = self.params.k0();
        let kinematics = scattered_wavenumber(k0, &self.params)?;
        let transition = p1_full(&self.params, &self.window, k0)?;
        let state = build_final_state(&self.params, &self.window, k0)?;
        self.json("transition_full.json", &TransitionRecord::new(&transition, Some(&kinematics)))?;
        self.json("final_state.json", &state)?;

        let path = self.path("two_branch_density.csv");
        let mut out = CsvOutput::create(&path, &["y", "density_k0", "density_k1"])?;
        for y in curve_points(&self.params) {
            let (d0, d1) = state.branch_density(y, &self.params);
            out.write_floats(&[y, d0, d1])?;
        }
        out.finish()
    }

    fn measure(&mut self) -> Result<()> {
        let state = build_final_state(&self.params, &self.window, self.params.k0())?;
        let path = self.path("conditional_probabilities.csv");
        let mut out = CsvOutput::create(&path, &["y_prime", "p_k0", "p_k1"])?;
        for y in curve_points(&self.params) {
            let (p0, p1) = conditional_beam_probabilities(&state, y, &self.params);
            out.write_floats(&[y, p0, p1])?;
        }
        out.finish()?;

        let summary = measurement_summary(
            &state,
            &self.params,
            self.config.numerics.seed,
            self.config.numerics.n_samples,
        )?;
        for (name, samples) in [
            ("samples_beam_first.csv", &summary.beam_first),
            ("samples_oscillator_first.csv", &summary.oscillator_first),
        ] {
            let path = self.path(name);
            let mut out = CsvOutput::create(&path, &["k_branch", "y_value"])?;
            for d in &samples.draws {
                out.write_fields(&[d.branch.index().to_string(), format_float(d.y)])?;
            }
            out.finish()?;
        }
        self.json("measure_summary.json", &summary.record)
    }

    fn sweep(&mut self) -> Result<()> {
        let speeds = if self.config.sweep.v_list.is_empty() {
            vec![self.params.v]
        } else {
            self.config.sweep.v_list.clone()
        };
        let couplings = if self.config.sweep.alpha_list.is_empty() {
            vec![self.params.alpha]
        } else {
            self.config.sweep.alpha_list.clone()
        };
        let points: Vec<(f64, f64)> = speeds
            .iter()
            .flat_map(|&v| couplings.iter().map(move |&a| (v, a)))
            .collect();
        let numerics = &self.config.numerics;
        let window = &self.window;
        let base = self.params;
        let rows: Vec<SweepRow> = points
            .par_iter()
            .map(|&(v, alpha)| sweep_point(&base.with_v(v).with_alpha(alpha), window, numerics.dt, numerics.t_span))
            .collect();

        let path = self.path("sweep_summary.csv");
        let mut out = CsvOutput::create(
            &path,
            &["v", "alpha", "y_m_analytic", "y_m_numeric", "p1_partial", "p1_full", "status"],
        )?;
        for row in &rows {
            let mut fields: Vec<String> = [row.v, row.alpha, row.y_m_analytic, row.y_m_numeric, row.p1_partial, row.p1_full]
                .iter()
                .map(|&x| format_float(x))
                .collect();
            fields.push(row.status.clone());
            out.write_fields(&fields)?;
            if let Some(err) = &row.error {
                self.report
                    .failures
                    .push(format!("sweep point v = {}, alpha = {}: {err}", row.v, row.alpha));
            }
        }
        out.finish()
    }

    fn compare(&mut self) -> Result<()> {
        let report = compare_report(self.config, &self.params, &self.window)?;
        let path = self.path("compare_report.csv");
        let mut out = CsvOutput::create(
            &path,
            &["comparison", "value", "reference", "relative_difference", "tolerance", "pass"],
        )?;
        for row in &report.rows {
            out.write_fields(&[
                row.comparison.clone(),
                format_float(row.value),
                format_float(row.reference),
                format_float(row.relative_difference),
                format_float(row.tolerance),
                row.pass.to_string(),
            ])?;
            if !row.pass {
                self.report.failures.push(format!(
                    "{}: relative difference {:e} exceeds tolerance {}",
                    row.comparison, row.relative_difference, row.tolerance
                ));
            }
        }
        out.finish()?;
        self.json("compare_report.json", &report)
    }
}

fn curve_points(params: &ModelParams) -> impl Iterator<Item = f64> {
    let half = CURVE_HALF_WIDTH * params.sigma_y();
    let step = 2.0 * half / (CURVE_POINTS - 1) as f64;
    (0..CURVE_POINTS).map(move |i| -half + i as f64 * step)
}

fn relative_difference(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs()
}

/// One classical passage with its derived quantities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalSummary {
    pub v: f64,
    pub y_m_analytic: f64,
    pub y_m_numeric: f64,
    pub fit_t_start: f64,
    pub fit_t_end: f64,
    pub max_relative_energy_drift: f64,
    pub work_on_oscillator_analytic: f64,
    pub work_on_beam_numeric: f64,
}

pub struct ClassicalRun {
    pub trajectory: crate::classical::ClassicalTrajectory,
    pub summary: ClassicalSummary,
}

/// Integrates one passage over `[-t_span, t_span] * b / |v|` and extracts the
/// post-passage amplitude and work balance.
pub fn classical_run(params: &ModelParams, window: &WindowFunction, dt: f64, t_span: f64) -> Result<ClassicalRun> {
    let (t0, t1) = time_window(params, window, t_span);
    let trajectory = integrate_classical(params, window, ClassicalState::incoming(params, t0), dt, t1)?;
    let fit = trajectory.post_passage_amplitude(params, window)?;
    let summary = ClassicalSummary {
        v: params.v,
        y_m_analytic: classical_amplitude_analytic(params, window)?,
        y_m_numeric: fit.amplitude,
        fit_t_start: fit.t_start,
        fit_t_end: fit.t_end,
        max_relative_energy_drift: trajectory.max_relative_energy_drift(params),
        work_on_oscillator_analytic: work_on_oscillator_analytic(params, window)?.on_oscillator,
        work_on_beam_numeric: work_on_beam_numeric(&trajectory, params, window)?,
    };
    Ok(ClassicalRun { trajectory, summary })
}

/// Driven-oscillator run from the ground state, with its derived quantities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TdseSummary {
    pub v: f64,
    pub alpha: f64,
    pub dt: f64,
    pub grid_points: usize,
    pub grid_half_width: f64,
    pub p0_final: f64,
    pub p1_final: f64,
    pub p0_plus_p1_deviation: f64,
    pub max_norm_drift: f64,
    pub p1_first_order: TransitionRecord,
    /// Amplitude of `<y>(t)` after the passage.
    pub y_expect_amplitude: f64,
    pub y_m_analytic: f64,
    /// Maximum Ehrenfest residual over the run.
    pub ehrenfest_residual: f64,
    /// Ehrenfest residual relative to the peak drive force `|alpha| max f`.
    pub ehrenfest_relative: f64,
}

pub struct TdseRun {
    pub observations: Vec<Observation>,
    pub final_state: WaveFunction1D,
    pub summary: TdseSummary,
}

/// Evolves the oscillator ground state through one passage at the
/// configured grid and step.
pub fn tdse_run(config: &ScenarioConfig, params: &ModelParams, window: &WindowFunction) -> Result<TdseRun> {
    let numerics = &config.numerics;
    tdse_run_with(params, window, numerics.tdse_dt, numerics.grid_points, numerics.grid_half_width, numerics.t_span, numerics.stepper)
}

pub fn tdse_run_with(
    params: &ModelParams,
    window: &WindowFunction,
    dt: f64,
    grid_points: usize,
    grid_half_width: f64,
    t_span: f64,
    stepper: crate::tdse::Stepper,
) -> Result<TdseRun> {
    let grid = Grid1D::for_oscillator(params, grid_half_width, grid_points)?;
    let (t0, t1) = time_window(params, window, t_span);
    let mut psi = ho_eigenstate(0, params, &grid)?;
    psi.t = t0;
    let solver = TdseSolver::new(params, window, grid, dt)?.with_stepper(stepper);
    let mut observations = Vec::new();
    let final_state = solver.evolve(&psi, t1, Some(&mut |o: &Observation| observations.push(*o)))?;

    let last = observations[observations.len() - 1];
    let norm0 = observations[0].norm;
    let max_norm_drift = observations
        .iter()
        .map(|o| (o.norm - norm0).abs() / norm0)
        .fold(0.0, f64::max);
    let cutoff = DECOUPLED_LEVEL * window.peak();
    let tail = observations
        .iter()
        .filter(|o| o.t > 0.0 && window.eval(params.v * o.t).abs() < cutoff)
        .map(|o| (o.t, o.y_expect));
    let (y_expect_amplitude, _) = fit_harmonic(tail, params.omega0);
    let history: Vec<EhrenfestSample> = observations.iter().map(EhrenfestSample::from).collect();
    let residual = ehrenfest_residual(&history, params, window)?;
    let peak_force = params.alpha.abs() * window.peak();
    let first_order = p1_partial(params, window)?;
    let summary = TdseSummary {
        v: params.v,
        alpha: params.alpha,
        dt: (t1 - t0) / (observations.len() - 1) as f64,
        grid_points,
        grid_half_width,
        p0_final: last.p0,
        p1_final: last.p1,
        p0_plus_p1_deviation: (last.p0 + last.p1 - 1.0).abs(),
        max_norm_drift,
        p1_first_order: TransitionRecord::new(&first_order, None),
        y_expect_amplitude,
        y_m_analytic: classical_amplitude_analytic(params, window)?,
        ehrenfest_residual: residual,
        ehrenfest_relative: if peak_force > 0.0 { residual / peak_force } else { 0.0 },
    };
    Ok(TdseRun {
        observations,
        final_state,
        summary,
    })
}

/// One row of a parameter sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub v: f64,
    pub alpha: f64,
    pub y_m_analytic: f64,
    pub y_m_numeric: f64,
    pub p1_partial: f64,
    pub p1_full: f64,
    /// `ok`, `channel_closed` (p1_full is 0 below threshold), or `failed`.
    pub status: String,
    #[serde(skip)]
    pub error: Option<String>,
}

pub fn sweep_point(params: &ModelParams, window: &WindowFunction, dt: f64, t_span: f64) -> SweepRow {
    let compute = || -> Result<(f64, f64, f64, Option<f64>)> {
        let y_m_analytic = classical_amplitude_analytic(params, window)?;
        let y_m_numeric = classical_run(params, window, dt, t_span)?.summary.y_m_numeric;
        let partial = p1_partial(params, window)?.p1;
        let full = match p1_full(params, window, params.k0()) {
            Ok(r) => Some(r.p1),
            Err(Error::ChannelClosed { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok((y_m_analytic, y_m_numeric, partial, full))
    };
    match compute() {
        Ok((y_m_analytic, y_m_numeric, p1_partial, full)) => SweepRow {
            v: params.v,
            alpha: params.alpha,
            y_m_analytic,
            y_m_numeric,
            p1_partial,
            p1_full: full.unwrap_or(0.0),
            status: if full.is_some() { "ok" } else { "channel_closed" }.to_string(),
            error: None,
        },
        Err(e) => SweepRow {
            v: params.v,
            alpha: params.alpha,
            y_m_analytic: f64::NAN,
            y_m_numeric: f64::NAN,
            p1_partial: f64::NAN,
            p1_full: f64::NAN,
            status: "failed".to_string(),
            error: Some(e.to_string()),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderStatistics {
    pub frequency_k0: f64,
    pub frequency_k1: f64,
    /// `(frequency_k1 - |c1|^2) / binomial sigma`.
    pub z_score_k1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurementRecord {
    pub seed: u64,
    pub n_samples: usize,
    pub weight_k0: f64,
    pub weight_k1: f64,
    pub binomial_sigma: f64,
    pub crossover_position: f64,
    pub beam_first: OrderStatistics,
    pub oscillator_first: OrderStatistics,
    /// Homogeneity test of the joint (branch, y-bin) tallies of both orders.
    pub order_independence: ChiSquaredTest,
    pub histogram_edges: Vec<f64>,
}

pub struct MeasurementSummary {
    pub beam_first: JointSamples,
    pub oscillator_first: JointSamples,
    pub record: MeasurementRecord,
}

/// Samples both measurement orders with the same seed and compares them.
pub fn measurement_summary(
    state: &FinalStateAmplitudes,
    params: &ModelParams,
    seed: u64,
    n_samples: usize,
) -> Result<MeasurementSummary> {
    let beam_first = sample_joint_measurement(state, seed, MeasurementOrder::BeamFirst, n_samples, params)?;
    let oscillator_first = sample_joint_measurement(state, seed, MeasurementOrder::OscillatorFirst, n_samples, params)?;
    let w1 = state.weight(Branch::Scattered);
    let sigma = binomial_sigma(w1, n_samples);
    let stats = |s: &JointSamples| OrderStatistics {
        frequency_k0: s.frequency(Branch::Unscattered),
        frequency_k1: s.frequency(Branch::Scattered),
        z_score_k1: if sigma > 0.0 { (s.frequency(Branch::Scattered) - w1) / sigma } else { 0.0 },
    };
    // half-sigma bins over ±4 sigma_y, open outer bins
    let edges: Vec<f64> = (-8..=8).map(|i| 0.5 * i as f64 * params.sigma_y()).collect();
    let order_independence = two_sample_chi_squared(&beam_first.histogram(&edges), &oscillator_first.histogram(&edges));
    let record = MeasurementRecord {
        seed,
        n_samples,
        weight_k0: state.weight(Branch::Unscattered),
        weight_k1: w1,
        binomial_sigma: sigma,
        crossover_position: crossover_position(state, params),
        beam_first: stats(&beam_first),
        oscillator_first: stats(&oscillator_first),
        order_independence,
        histogram_edges: edges,
    };
    Ok(MeasurementSummary {
        beam_first,
        oscillator_first,
        record,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub comparison: String,
    pub value: f64,
    pub reference: f64,
    pub relative_difference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ComparisonRow {
    fn new(comparison: &str, value: f64, reference: f64, tolerance: f64) -> Self {
        let relative_difference = relative_difference(value, reference);
        ComparisonRow {
            comparison: comparison.to_string(),
            value,
            reference,
            relative_difference,
            tolerance,
            pass: relative_difference < tolerance,
        }
    }
}

/// Cross-approach comparison at one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub v: f64,
    pub alpha: f64,
    /// Integrated classical amplitude.
    pub y_m_numeric: f64,
    /// Closed-form classical amplitude.
    pub y_m_analytic: f64,
    /// Final excited-state population from the Schrödinger solver.
    pub p1_tdse: f64,
    /// Classical-beam first-order probability.
    pub p1_partial: f64,
    /// Fully quantum first-order probability at `k0 = m v / hbar`.
    pub p1_full: f64,
    /// Post-passage amplitude of `<y>(t)` from the Schrödinger solver.
    pub y_expect_amplitude: f64,
    pub rows: Vec<ComparisonRow>,
}

pub fn compare_report(config: &ScenarioConfig, params: &ModelParams, window: &WindowFunction) -> Result<CompareReport> {
    let tol = &config.tolerances;
    let classical = classical_run(params, window, config.numerics.dt, config.numerics.t_span)?.summary;
    let tdse = tdse_run(config, params, window)?.summary;
    let partial = p1_partial(params, window)?.p1;
    let full = p1_full(params, window, params.k0())?.p1;
    let rows = vec![
        ComparisonRow::new("y_m numeric vs closed form", classical.y_m_numeric, classical.y_m_analytic, tol.classical_amplitude),
        ComparisonRow::new("P1 tdse vs partial", tdse.p1_final, partial, tol.tdse_p1),
        ComparisonRow::new("P1 full vs partial", full, partial, tol.full_vs_partial),
        ComparisonRow::new("P1 tdse vs full", tdse.p1_final, full, tol.full_vs_partial),
        ComparisonRow::new("<y> amplitude tdse vs y_m", tdse.y_expect_amplitude, classical.y_m_analytic, tol.tdse_amplitude),
    ];
    Ok(CompareReport {
        v: params.v,
        alpha: params.alpha,
        y_m_numeric: classical.y_m_numeric,
        y_m_analytic: classical.y_m_analytic,
        p1_tdse: tdse.p1_final,
        p1_partial: partial,
        p1_full: full,
        y_expect_amplitude: tdse.y_expect_amplitude,
        rows,
    })
}
