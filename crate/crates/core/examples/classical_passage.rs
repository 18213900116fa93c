//! Classical passage of the beam past the oscillator: post-collision
//! amplitude, energy conservation, and work done on each particle.
//!
//!     cargo run --release --example classical_passage [v]

use inelastic::classical::work_on_beam_numeric;
use inelastic::scenario::classical_run;
use inelastic::{ModelParams, WindowFunction};

fn main() -> inelastic::Result<()> {
    let v: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7.0);
    let params = ModelParams::natural(v);
    let window = WindowFunction::gaussian(10.0)?;
    let run = classical_run(&params, &window, 1e-3, 20.0)?;
    let s = &run.summary;

    println!("v = {v}, {} steps", run.trajectory.len());
    println!("amplitude  numeric {:.6e}  closed form {:.6e}", s.y_m_numeric, s.y_m_analytic);
    println!("max relative energy drift {:.3e}", s.max_relative_energy_drift);
    println!(
        "work  on oscillator {:.6e}  on beam {:.6e}",
        s.work_on_oscillator_analytic,
        work_on_beam_numeric(&run.trajectory, &params, &window)?
    );
    let last = run.trajectory.last();
    println!("final state  x = {:.3}  p_x = {:.12}  y = {:.3e}", last.x, last.p_x, last.y);
    Ok(())
}
