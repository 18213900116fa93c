//! First-order excitation probability with a classical beam (partial
//! quantization) and with a quantized beam (full quantization), across beam
//! speeds.
//!
//!     cargo run --example transition_probabilities

use inelastic::perturbation::{p1_full, p1_partial, scattered_wavenumber};
use inelastic::{ModelParams, WindowFunction};

fn main() -> inelastic::Result<()> {
    let window = WindowFunction::gaussian(10.0)?;
    println!("{:>5} {:>10} {:>10} {:>13} {:>13} {:>9}", "k0", "k1", "dk", "P1 partial", "P1 full", "rel diff");
    for k0 in [2.0, 3.0, 5.0, 7.0, 10.0, 15.0] {
        let params = ModelParams::natural(k0);
        let partial = p1_partial(&params, &window)?.p1;
        let kin = scattered_wavenumber(k0, &params)?;
        let full = p1_full(&params, &window, k0)?.p1;
        println!(
            "{k0:>5} {:>10.5} {:>10.5} {partial:>13.6e} {full:>13.6e} {:>9.4}",
            kin.k1,
            kin.delta_k,
            (full - partial).abs() / partial
        );
    }
    // below threshold the oscillator cannot be excited
    let slow = ModelParams::natural(1.0);
    match scattered_wavenumber(1.0, &slow) {
        Ok(_) => println!("k0 = 1: channel open"),
        Err(e) => println!("k0 = 1: {e}"),
    }
    Ok(())
}
