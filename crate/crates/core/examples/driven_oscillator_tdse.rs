//! Grid solution of the oscillator driven by a classical beam: excitation
//! probability, norm conservation and the post-collision displacement.
//!
//!     cargo run --release --example driven_oscillator_tdse [v]

use inelastic::scenario::tdse_run_with;
use inelastic::tdse::Stepper;
use inelastic::{ModelParams, WindowFunction};

fn main() -> inelastic::Result<()> {
    let v: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7.0);
    let params = ModelParams::natural(v);
    let window = WindowFunction::gaussian(10.0)?;
    let run = tdse_run_with(&params, &window, 1e-3, 513, 12.0, 20.0, Stepper::ImplicitMidpoint)?;
    let s = &run.summary;

    let stride = run.observations.len() / 10;
    println!("{:>9} {:>14} {:>14} {:>14}", "t", "P1", "<y>", "norm - 1");
    for o in run.observations.iter().step_by(stride.max(1)) {
        println!("{:>9.3} {:>14.6e} {:>14.6e} {:>14.3e}", o.t, o.p1, o.y_expect, o.norm - 1.0);
    }
    println!("P1  grid {:.6e}  first order {:.6e}", s.p1_final, s.p1_first_order.p1);
    println!("<y> amplitude {:.6e}  classical {:.6e}", s.y_expect_amplitude, s.y_m_analytic);
    println!("|P0 + P1 - 1| = {:.3e}, max norm drift {:.3e}", s.p0_plus_p1_deviation, s.max_norm_drift);
    Ok(())
}
