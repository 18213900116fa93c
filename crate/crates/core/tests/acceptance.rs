//! Acceptance gate: runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.
//!
//! Reference values come from closed forms evaluated here, independently of
//! the library's own implementations of the same formulas.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;

use inelastic::classical::{classical_amplitude_analytic, work_on_oscillator_analytic};
use inelastic::config::{Scenario, ScenarioConfig};
use inelastic::perturbation::{p1_full, p1_full_at_transfer, p1_partial, scattered_wavenumber};
use inelastic::scenario::{classical_run, measurement_summary, run_scenario, tdse_run_with};
use inelastic::tdse::Stepper;
use inelastic::twoparticle::{
    build_final_state, conditional_beam_probabilities, crossover_position, FinalStateAmplitudes,
};
use inelastic::{ModelParams, WindowFunction};

// ---- tolerances -----------------------------------------------------------

/// Integrated vs closed-form classical amplitude, relative.
const CLASSICAL_AMPLITUDE_REL: f64 = 0.01;
/// Adiabatic suppression bound on the amplitude at v = 1, absolute.
const ADIABATIC_AMPLITUDE_ABS: f64 = 1e-10;
const CLASSICAL_RUNTIME: Duration = Duration::from_secs(10);
/// Classical energy drift relative to the initial beam kinetic energy.
const ENERGY_DRIFT_REL: f64 = 1e-6;
/// Numerical beam work vs closed-form work, relative.
const WORK_REL: f64 = 0.02;
/// Algebraic identities evaluated in floating point.
const IDENTITY_REL: f64 = 1e-14;
/// Schrödinger-solver P1 vs first-order closed form, relative.
const TDSE_P1_REL: f64 = 0.05;
const NORM_DRIFT: f64 = 1e-6;
const COMPLETENESS: f64 = 1e-5;
const TDSE_RUNTIME: Duration = Duration::from_secs(60);
/// `<y>` amplitude vs classical amplitude, relative.
const TDSE_AMPLITUDE_REL: f64 = 0.02;
/// Ehrenfest residual relative to the peak drive force at dt = 1e-3.
const EHRENFEST_REL: f64 = 1e-4;
/// Residual ratio when dt halves: second order gives ~4.
const EHRENFEST_RATIO: (f64, f64) = (3.0, 5.0);
/// Fully vs partially quantum P1, relative.
const FULL_VS_PARTIAL_REL: f64 = 0.05;
/// "Machine precision" for the small-transfer substitution and kinematics.
const MACHINE_REL: f64 = 1e-12;
/// Crossover located by bisection vs closed form, relative.
const CROSSOVER_REL: f64 = 1e-6;
const MC_SAMPLES: usize = 1_000_000;
const MC_SIGMAS: f64 = 3.0;
const CHI_SQUARED_SIGNIFICANCE: f64 = 0.01;
const MEASURE_RUNTIME: Duration = Duration::from_secs(30);

// ---- independent closed forms ---------------------------------------------

const B: f64 = 10.0;

fn preset(v: f64) -> ModelParams {
    ModelParams {
        hbar: 1.0,
        m: 1.0,
        mu: 100.0,
        omega0: 1.0,
        alpha: 1.0,
        v,
    }
}

fn window() -> WindowFunction {
    WindowFunction::gaussian(B).unwrap()
}

/// Temporal transform of the gaussian window at `omega0 = 1`.
fn ft_temporal(v: f64) -> f64 {
    (-(B * B) / (4.0 * v * v)).exp() / (2f64.sqrt() * B * v.abs())
}

/// `sqrt(pi) alpha exp(-b^2 omega0^2 / 4 v^2) / (mu omega0 b v)`.
fn amplitude_oracle(p: &ModelParams) -> f64 {
    PI.sqrt() * p.alpha.abs() * (-(B * B) * p.omega0.powi(2) / (4.0 * p.v * p.v)).exp() / (p.mu * p.omega0 * B * p.v.abs())
}

fn p1_partial_oracle(p: &ModelParams) -> f64 {
    PI * p.alpha * p.alpha * ft_temporal(p.v).powi(2) / (p.hbar * p.mu * p.omega0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// ---- harness ----------------------------------------------------------------

type Outcome = Result<String, String>;

fn check(cond: bool, what: String, failures: &mut Vec<String>) -> String {
    if !cond {
        failures.push(what.clone());
    }
    what
}

fn finish(notes: Vec<String>, failures: Vec<String>) -> Outcome {
    if failures.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_1() -> Outcome {
    let (mut notes, mut fails) = (Vec::new(), Vec::new());
    let start = Instant::now();
    for v in [3.0, 7.0, 15.0] {
        let p = preset(v);
        let ym = classical_run(&p, &window(), 1e-3, 20.0).map_err(|e| e.to_string())?.summary.y_m_numeric;
        let oracle = amplitude_oracle(&p);
        let r = rel(ym, oracle);
        notes.push(check(r < CLASSICAL_AMPLITUDE_REL, format!("v={v}: y_m={ym:.5e} rel={r:.1e}"), &mut fails));
    }
    let ym1 = classical_run(&preset(1.0), &window(), 1e-3, 20.0)
        .map_err(|e| e.to_string())?
        .summary
        .y_m_numeric;
    notes.push(check(ym1.abs() < ADIABATIC_AMPLITUDE_ABS, format!("v=1: y_m={ym1:.2e}"), &mut fails));
    let elapsed = start.elapsed();
    notes.push(check(elapsed < CLASSICAL_RUNTIME, format!("{:.2}s", elapsed.as_secs_f64()), &mut fails));
    finish(notes, fails)
}

fn criterion_2() -> Outcome {
    let (mut notes, mut fails) = (Vec::new(), Vec::new());
    for v in [1.0, 3.0, 7.0, 15.0] {
        let drift = classical_run(&preset(v), &window(), 1e-3, 20.0)
            .map_err(|e| e.to_string())?
            .summary
            .max_relative_energy_drift;
        notes.push(check(drift < ENERGY_DRIFT_REL, format!("v={v}: drift={drift:.1e}"), &mut fails));
    }
    finish(notes, fails)
}

fn criterion_3() -> Outcome {
    let (mut notes, mut fails) = (Vec::new(), Vec::new());
    let p = preset(7.0);
    let w = window();
    let beam = classical_run(&p, &w, 1e-3, 20.0).map_err(|e| e.to_string())?.summary.work_on_beam_numeric;
    let oracle = -PI * p.alpha * p.alpha / p.mu * ft_temporal(7.0).powi(2);
    let r = rel(beam, oracle);
    notes.push(check(r < WORK_REL, format!("W_beam={beam:.5e} rel={r:.1e}"), &mut fails));
    for v in [1.0, 3.0, 7.0, 15.0] {
        let pv = preset(v);
        let w_ho = work_on_oscillator_analytic(&pv, &w).map_err(|e| e.to_string())?.on_oscillator;
        let ym = classical_amplitude_analytic(&pv, &w).map_err(|e| e.to_string())?;
        let identity = 0.5 * pv.mu * pv.omega0.powi(2) * ym * ym;
        let r = rel(w_ho, identity);
        notes.push(check(r < IDENTITY_REL, format!("v={v}: W_HO identity rel={r:.0e}"), &mut fails));
    }
    finish(notes, fails)
}

fn criterion_4() -> Outcome {
    let (mut notes, mut fails) = (Vec::new(), Vec::new());
    let p = preset(7.0);
    let start = Instant::now();
    let run = tdse_run_with(&p, &window(), 1e-3, 513, 12.0, 20.0, Stepper::ImplicitMidpoint).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let s = &run.summary;
    let oracle = p1_partial_oracle(&p);
    let r = rel(s.p1_final, oracle);
    notes.push(check(r < TDSE_P1_REL, format!("P1={:.5e} rel={r:.1e}", s.p1_final), &mut fails));
    let norm_drift = run.observations.iter().map(|o| (o.norm - 1.0).abs()).fold(0.0, f64::max);
    notes.push(check(norm_drift < NORM_DRIFT, format!("norm drift={norm_drift:.1e}"), &mut fails));
    notes.push(check(
        s.p0_plus_p1_deviation < COMPLETENESS,
        format!("|P0+P1-1|={:.1e}", s.p0_plus_p1_deviation),
        &mut fails,
    ));
    notes.push(check(elapsed < TDSE_RUNTIME, format!("{:.2}s", elapsed.as_secs_f64()), &mut fails));
    finish(notes, fails)
}

fn criterion_5() -> Outcome {
    let (mut notes, mut fails) = (Vec::new(), Vec::new());
    let p = preset(7.0);
    let coarse = tdse_run_with(&p, &window(), 1e-3, 513, 12.0, 20.0, Stepper::ImplicitMidpoint)
        .map_err(|e| e.to_string())?
        .summary;
    let fine = tdse_run_with(&p, &window(), 5e-4, 513, 12.0, 20.0, Stepper::ImplicitMidpoint)
        .map_err(|e| e.to_string())?
        .summary;
    let r = rel(coarse.y_expect_amplitude, amplitude_oracle(&p));
    notes.push(check(
        r < TDSE_AMPLITUDE_REL,
        format!("<y> amplitude={:.5e} rel={r:.1e}", coarse.y_expect_amplitude),
        &mut fails,
    ));
    // peak drive force |alpha| max f = alpha / b^2
    let peak_force = p.alpha / (B * B);
    let relative = coarse.ehrenfest_residual / peak_force;
    notes.push(check(relative < EHRENFEST_REL, format!("Ehrenfest residual={relative:.1e} of peak force"), &mut fails));
    let ratio = coarse.ehrenfest_residual / fine.ehrenfest_residual;
    notes.push(check(
        (EHRENFEST_RATIO.0..=EHRENFEST_RATIO.1).contains(&ratio),
        format!("dt-halving ratio={ratio:.2}"),
        &mut fails,
    ));
    finish(notes, fails)
}

fn criterion_6() -> Outcome {
    let (mut notes, mut fails) = (Vec::new(), Vec::new());
    let p = preset(7.0);
    let w = window();
    let partial = p1_partial(&p, &w).map_err(|e| e.to_string())?.p1;
    let full = p1_full(&p, &w, 7.0).map_err(|e| e.to_string())?.p1;
    let r = rel(full, partial);
    notes.push(check(r < FULL_VS_PARTIAL_REL, format!("|full-partial|/partial={r:.4}"), &mut fails));
    let substituted = p1_full_at_transfer(&p, &w, 7.0, -p.omega0 / p.v).map_err(|e| e.to_string())?.p1;
    let r = rel(substituted, partial);
    notes.push(check(r < MACHINE_REL, format!("small-transfer substitution rel={r:.0e}"), &mut fails));
    let kin = scattered_wavenumber(7.0, &p).map_err(|e| e.to_string())?;
    let r = rel(kin.k1, 47f64.sqrt());
    notes.push(check(r < MACHINE_REL, format!("k1-sqrt(47) rel={r:.0e}"), &mut fails));
    // energy conservation hbar^2 k0^2 / 2m = hbar^2 k1^2 / 2m + hbar omega0
    let balance = rel(0.5 * kin.k1 * kin.k1 + 1.0, 0.5 * kin.k0 * kin.k0);
    notes.push(check(balance < MACHINE_REL, format!("energy balance rel={balance:.0e}"), &mut fails));
    finish(notes, fails)
}

fn criterion_7() -> Outcome {
    let (mut notes, mut fails) = (Vec::new(), Vec::new());
    let start = Instant::now();
    let p = preset(7.0);
    let state = build_final_state(&p, &window(), 7.0).map_err(|e| e.to_string())?;
    let (_, at_node) = conditional_beam_probabilities(&state, 0.0, &p);
    notes.push(check(at_node == 0.0, format!("P(k1|0)={at_node}"), &mut fails));
    let worst = (-2000..=2000)
        .map(|i| {
            let (a, b) = conditional_beam_probabilities(&state, i as f64 * 0.05, &p);
            (a + b - 1.0).abs()
        })
        .fold(0.0, f64::max);
    notes.push(check(worst < 1e-15, format!("max|P(k0|y)+P(k1|y)-1|={worst:.0e}"), &mut fails));

    // closed form y* = sigma |c0/c1| / sqrt(2) from the state's own weights
    let sigma = (p.hbar / (p.mu * p.omega0)).sqrt();
    let closed = sigma * (state.c0.norm() / state.c1.norm()) / 2f64.sqrt();
    let (mut lo, mut hi) = (0.0, 1e4);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if conditional_beam_probabilities(&state, mid, &p).1 < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let bisected = 0.5 * (lo + hi);
    let r = rel(bisected, closed);
    notes.push(check(r < CROSSOVER_REL, format!("y*={bisected:.4} rel={r:.0e}"), &mut fails));
    let r = rel(crossover_position(&state, &p), closed);
    notes.push(check(r < CROSSOVER_REL, format!("library y* rel={r:.0e}"), &mut fails));

    // |c1|^2 = 0.2, as if alpha were raised far beyond first-order validity
    let strong = FinalStateAmplitudes::from_probability(0.2, Complex64::new(0.0, 1.0), &scattered_wavenumber(7.0, &p).unwrap(), 25.0)
        .map_err(|e| e.to_string())?;
    let summary = measurement_summary(&strong, &p, 20_241_015, MC_SAMPLES).map_err(|e| e.to_string())?;
    let sigma_b = (0.2f64 * 0.8 / MC_SAMPLES as f64).sqrt();
    for (name, stats) in [("beam-first", &summary.record.beam_first), ("oscillator-first", &summary.record.oscillator_first)] {
        let z = (stats.frequency_k1 - 0.2) / sigma_b;
        notes.push(check(z.abs() < MC_SIGMAS, format!("{name} z={z:.2}"), &mut fails));
    }
    let pval = summary.record.order_independence.p_value;
    notes.push(check(pval > CHI_SQUARED_SIGNIFICANCE, format!("chi2 p={pval:.3}"), &mut fails));
    let elapsed = start.elapsed();
    notes.push(check(elapsed < MEASURE_RUNTIME, format!("{:.2}s", elapsed.as_secs_f64()), &mut fails));
    finish(notes, fails)
}

fn criterion_8() -> Outcome {
    let (mut notes, mut fails) = (Vec::new(), Vec::new());
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    for scenario in Scenario::ALL {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let mut config = ScenarioConfig::default();
            config.numerics.seed = 7;
            config.sweep.v_list = vec![3.0, 7.0, 15.0];
            config.sweep.alpha_list = vec![0.5, 1.0];
            config.output.dir = root.path().join(format!("{}_{run}", scenario.name()));
            let report = run_scenario(&config, Some(scenario)).map_err(|e| format!("{}: {e}", scenario.name()))?;
            let mut files = Vec::new();
            for path in &report.files {
                let name = path.file_name().unwrap().to_string_lossy().into_owned();
                files.push((name, std::fs::read(path).map_err(|e| e.to_string())?));
            }
            outputs.push(files);
        }
        // the echoed config names its own output directory
        let differ: Vec<&str> = outputs[0]
            .iter()
            .zip(&outputs[1])
            .filter(|(a, b)| a.0 != "config.toml" && a != b)
            .map(|(a, _)| a.0.as_str())
            .collect();
        notes.push(check(
            differ.is_empty() && outputs[0].len() == outputs[1].len(),
            format!("{}: {} files identical", scenario.name(), outputs[0].len()),
            &mut fails,
        ));
    }
    finish(notes, fails)
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 classical amplitude vs closed form", criterion_1),
        ("2 classical energy conservation", criterion_2),
        ("3 work identity", criterion_3),
        ("4 Schrödinger P1 vs first order", criterion_4),
        ("5 complementarity and Ehrenfest", criterion_5),
        ("6 fully vs partially quantum P1", criterion_6),
        ("7 measurement statistics", criterion_7),
        ("8 deterministic outputs", criterion_8),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
