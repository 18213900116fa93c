//! The post-collision two-particle state: branch weights, the reduced
//! oscillator's displacement, and the branch densities along y.
//!
//!     cargo run --example entangled_final_state

use inelastic::twoparticle::{build_final_state, crossover_position, oscillation_amplitude, reduce_to_oscillator, Branch};
use inelastic::{ModelParams, WindowFunction};

fn main() -> inelastic::Result<()> {
    let params = ModelParams::natural(7.0);
    let window = WindowFunction::gaussian(10.0)?;
    let state = build_final_state(&params, &window, 7.0)?;

    println!("k0 = {}, k1 = {:.6}", state.k0, state.k1);
    println!("c0 = {:.9}, c1 = {:.6e}", state.c0, state.c1);
    println!(
        "weights  unscattered {:.9}  scattered {:.6e}",
        state.weight(Branch::Unscattered),
        state.weight(Branch::Scattered)
    );
    println!("<y> oscillation amplitude {:.6e}", oscillation_amplitude(&state, &params));
    for t in [0.0, 0.5, 1.0, 1.5] {
        let t = t * std::f64::consts::PI;
        println!("  t = {t:.4}  <y> = {:+.6e}", reduce_to_oscillator(&state, t, &params).expect_y(&params));
    }
    println!("branch densities cross at |y| = {:.4}", crossover_position(&state, &params));
    for y in [0.0, 0.1, 0.2, 0.3] {
        let (d0, d1) = state.branch_density(y, &params);
        println!("  y = {y:.1}  k0 branch {d0:.6e}  k1 branch {d1:.6e}");
    }
    Ok(())
}
