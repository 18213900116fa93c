//! Temporal and spatial Fourier transforms of the coupling window, and the
//! identity linking them.
//!
//!     cargo run --example window_transforms

use inelastic::{TabulatedWindow, WindowFunction};

fn main() -> inelastic::Result<()> {
    let gaussian = WindowFunction::gaussian(10.0)?;
    // the same shape, sampled and interpolated
    let tabulated = WindowFunction::Tabulated(TabulatedWindow::from_fn(|x| gaussian.eval(x), -120.0, 120.0, 4801)?);

    let omega = 1.0;
    println!("{:>6} {:>14} {:>14} {:>14}", "v", "|f~(w)|", "|f-(-w/v)|/v", "tabulated");
    for v in [1.0, 3.0, 7.0, 15.0, 30.0] {
        let temporal = gaussian.temporal_ft(v, omega)?;
        let spatial = gaussian.spatial_ft(-omega / v) / v;
        let sampled = tabulated.temporal_ft(v, omega)?;
        println!("{v:>6} {:>14.6e} {:>14.6e} {:>14.6e}", temporal.norm(), spatial.norm(), sampled.norm());
    }
    Ok(())
}
