//! Checks that the grid expectation values obey Newton's law for the driven
//! oscillator, and that the residual shrinks as the time step is refined.
//!
//!     cargo run --release --example ehrenfest_check

use inelastic::classical::time_window;
use inelastic::tdse::{ehrenfest_residual, evolve_tdse_observed, ho_eigenstate, EhrenfestSample, Grid1D, Observation};
use inelastic::{ModelParams, WindowFunction};

fn residual(params: &ModelParams, window: &WindowFunction, dt: f64) -> inelastic::Result<f64> {
    let grid = Grid1D::for_oscillator(params, 12.0, 513)?;
    let mut psi = ho_eigenstate(0, params, &grid)?;
    let (t0, t1) = time_window(params, window, 20.0);
    psi.t = t0;
    let mut history = Vec::new();
    evolve_tdse_observed(&psi, params, window, t1, dt, &mut |o: &Observation| {
        history.push(EhrenfestSample::from(o))
    })?;
    ehrenfest_residual(&history, params, window)
}

fn main() -> inelastic::Result<()> {
    let params = ModelParams::natural(7.0);
    let window = WindowFunction::gaussian(10.0)?;
    let peak_force = params.alpha * window.peak();
    let coarse = residual(&params, &window, 2e-3)?;
    let fine = residual(&params, &window, 1e-3)?;
    println!("peak force {peak_force:.3e}");
    println!("dt = 2e-3: residual {coarse:.3e} ({:.2e} of peak)", coarse / peak_force);
    println!("dt = 1e-3: residual {fine:.3e} ({:.2e} of peak)", fine / peak_force);
    println!("refinement ratio {:.2}", coarse / fine);
    Ok(())
}
