//! Physical parameters of the beam–oscillator model and the window function
//! that couples them.
//!
//! The Hamiltonian is
//!
//! ```text
//! H = p_x^2 / 2m + p_y^2 / 2mu + mu omega0^2 y^2 / 2 - alpha y f(x)
//! ```
//!
//! with `f` the window function (units of length^-2). Fourier conventions:
//!
//! ```text
//! temporal:  f~(omega) = (2 pi)^-1/2 ∫ dt e^{+i omega t} f(v t)
//! spatial:   f-(k)     = (2 pi)^-1/2 ∫ dx e^{-i k x} f(x)
//! ```
//!
//! so that `f-(-omega / v) = |v| f~(omega)`.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative level below which the window is treated as switched off.
pub const SUPPORT_CUTOFF: f64 = 1e-14;

/// Tabulated windows must have decayed below this fraction of the peak at both
/// ends of their grid.
pub const TABULATED_EDGE_TOLERANCE: f64 = 1e-12;

/// Physical constants and coupling of the model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub hbar: f64,
    /// Beam mass.
    pub m: f64,
    /// Oscillator reduced mass.
    pub mu: f64,
    /// Oscillator angular frequency.
    pub omega0: f64,
    /// Coupling constant; zero switches the interaction off.
    pub alpha: f64,
    /// Beam speed.
    pub v: f64,
}

impl ModelParams {
    /// Natural-unit preset: `hbar = omega0 = m = 1`, `mu = 100`, `alpha = 1`.
    pub fn natural(v: f64) -> Self {
        ModelParams {
            hbar: 1.0,
            m: 1.0,
            mu: 100.0,
            omega0: 1.0,
            alpha: 1.0,
            v,
        }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        ModelParams { alpha, ..self }
    }

    pub fn with_v(self, v: f64) -> Self {
        ModelParams { v, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(field: &str, value: f64) -> Result<()> {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(field, format!("must be positive and finite (got {value})")))
            }
        }
        positive("hbar", self.hbar)?;
        positive("m", self.m)?;
        positive("mu", self.mu)?;
        positive("omega0", self.omega0)?;
        if !self.alpha.is_finite() {
            return Err(Error::invalid("alpha", format!("must be finite (got {})", self.alpha)));
        }
        if !self.v.is_finite() {
            return Err(Error::invalid("v", format!("must be finite (got {})", self.v)));
        }
        if self.v == 0.0 {
            return Err(Error::ZeroSpeed);
        }
        Ok(())
    }

    /// Width of the oscillator ground state, `sqrt(hbar / (mu omega0))`.
    pub fn sigma_y(&self) -> f64 {
        (self.hbar / (self.mu * self.omega0)).sqrt()
    }

    /// Transition matrix element `<1|y|0> = sqrt(hbar / (2 mu omega0))`.
    pub fn dipole_element(&self) -> f64 {
        (self.hbar / (2.0 * self.mu * self.omega0)).sqrt()
    }

    /// Incident beam wavenumber `m v / hbar`.
    pub fn k0(&self) -> f64 {
        self.m * self.v / self.hbar
    }
}

/// A window function sampled on a uniform grid. Linearly interpolated, zero
/// outside the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabulatedWindow {
    x_min: f64,
    dx: f64,
    values: Vec<f64>,
    peak: f64,
}

impl TabulatedWindow {
    pub fn new(x_min: f64, dx: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::invalid("window.samples", "need at least 3 samples"));
        }
        if !(dx.is_finite() && dx > 0.0) || !x_min.is_finite() {
            return Err(Error::invalid("window.samples", "grid spacing must be positive"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("window.samples", "non-finite sample"));
        }
        let peak = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if peak == 0.0 {
            return Err(Error::invalid("window.samples", "window is identically zero"));
        }
        let edge = values[0].abs().max(values[values.len() - 1].abs());
        if edge >= TABULATED_EDGE_TOLERANCE * peak {
            return Err(Error::invalid(
                "window.samples",
                format!("window has not decayed at the grid edges (edge/peak = {:e})", edge / peak),
            ));
        }
        Ok(TabulatedWindow {
            x_min,
            dx,
            values,
            peak,
        })
    }

    /// Samples `f` at `n` uniformly spaced points on `[x_min, x_max]`.
    pub fn from_fn(f: impl Fn(f64) -> f64, x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 3 || !(x_max > x_min) {
            return Err(Error::invalid("window.samples", "need n >= 3 and x_max > x_min"));
        }
        let dx = (x_max - x_min) / (n - 1) as f64;
        let values = (0..n).map(|i| f(x_min + i as f64 * dx)).collect();
        Self::new(x_min, dx, values)
    }

    /// Reads a two-column `x,f` CSV file with a header row. The `x` column
    /// must be uniformly spaced.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let mut xs = Vec::new();
        let mut fs = Vec::new();
        for record in reader.records() {
            let record = record?;
            let parse = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Config(format!("{}: malformed row {:?}", path.display(), record)))
            };
            xs.push(parse(0)?);
            fs.push(parse(1)?);
        }
        if xs.len() < 3 {
            return Err(Error::Config(format!("{}: need at least 3 rows", path.display())));
        }
        let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        for (i, &x) in xs.iter().enumerate() {
            if (x - (xs[0] + i as f64 * dx)).abs() > 1e-9 * dx.abs().max(1.0) {
                return Err(Error::Config(format!(
                    "{}: x column must be uniformly spaced (row {i})",
                    path.display()
                )));
            }
        }
        Self::new(xs[0], dx, fs)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + (self.values.len() - 1) as f64 * self.dx
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn cell(&self, x: f64) -> Option<(usize, f64)> {
        if !(x >= self.x_min && x <= self.x_max()) {
            return None;
        }
        let s = (x - self.x_min) / self.dx;
        let i = (s.floor() as usize).min(self.values.len() - 2);
        Some((i, s - i as f64))
    }

    fn eval(&self, x: f64) -> f64 {
        match self.cell(x) {
            Some((i, frac)) => self.values[i] * (1.0 - frac) + self.values[i + 1] * frac,
            None => 0.0,
        }
    }

    fn slope(&self, x: f64) -> f64 {
        match self.cell(x) {
            Some((i, _)) => (self.values[i + 1] - self.values[i]) / self.dx,
            None => 0.0,
        }
    }

    /// Index range whose samples exceed the support cutoff, widened by one
    /// sample on each side.
    fn support_indices(&self) -> (usize, usize) {
        let cutoff = SUPPORT_CUTOFF * self.peak;
        let first = self.values.iter().position(|v| v.abs() > cutoff).unwrap_or(0);
        let last = self
            .values
            .iter()
            .rposition(|v| v.abs() > cutoff)
            .unwrap_or(self.values.len() - 1);
        (first.saturating_sub(1), (last + 1).min(self.values.len() - 1))
    }

    /// Composite trapezoid for `∫ dx e^{i q x} f(x)` over the support.
    fn trapezoid_phase_integral(&self, q: f64) -> Complex64 {
        let (lo, hi) = self.support_indices();
        let mut sum = Complex64::new(0.0, 0.0);
        for i in lo..=hi {
            let x = self.x_min + i as f64 * self.dx;
            let w = if i == lo || i == hi { 0.5 } else { 1.0 };
            sum += Complex64::from_polar(w * self.values[i], q * x);
        }
        sum * self.dx
    }
}

/// Spatial coupling profile `f(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WindowFunction {
    /// `f(x) = b^-2 exp(-x^2 / b^2)`.
    Gaussian { b: f64 },
    Tabulated(TabulatedWindow),
}

impl WindowFunction {
    pub fn gaussian(b: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::invalid("window.b", format!("must be positive and finite (got {b})")));
        }
        Ok(WindowFunction::Gaussian { b })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            WindowFunction::Gaussian { b } => (-(x / b).powi(2)).exp() / (b * b),
            WindowFunction::Tabulated(t) => t.eval(x),
        }
    }

    /// `df/dx`; analytic for the gaussian, cell slope for tabulated data.
    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            WindowFunction::Gaussian { b } => -2.0 * x / (b * b) * self.eval(x),
            WindowFunction::Tabulated(t) => t.slope(x),
        }
    }

    pub fn peak(&self) -> f64 {
        match self {
            WindowFunction::Gaussian { b } => 1.0 / (b * b),
            WindowFunction::Tabulated(t) => t.peak,
        }
    }

    /// Interval outside which `|f| < SUPPORT_CUTOFF * peak`.
    pub fn support(&self) -> (f64, f64) {
        match self {
            WindowFunction::Gaussian { b } => {
                let half = b * (-SUPPORT_CUTOFF.ln()).sqrt();
                (-half, half)
            }
            WindowFunction::Tabulated(t) => {
                let (lo, hi) = t.support_indices();
                (t.x_min + lo as f64 * t.dx, t.x_min + hi as f64 * t.dx)
            }
        }
    }

    /// Characteristic length of the window, used to pick default time spans.
    pub fn length_scale(&self) -> f64 {
        match self {
            WindowFunction::Gaussian { b } => *b,
            WindowFunction::Tabulated(_) => {
                let (lo, hi) = self.support();
                0.5 * (hi - lo) / (-SUPPORT_CUTOFF.ln()).sqrt()
            }
        }
    }

    /// Temporal transform of the drive `f(v t)` seen by the oscillator.
    pub fn temporal_ft(&self, v: f64, omega: f64) -> Result<Complex64> {
        if v == 0.0 || !v.is_finite() {
            return Err(Error::ZeroSpeed);
        }
        Ok(match self {
            WindowFunction::Gaussian { b } => {
                let value = (-(b * omega / (2.0 * v)).powi(2)).exp() / (2f64.sqrt() * b * v.abs());
                Complex64::new(value, 0.0)
            }
            // x = v t turns dt e^{i omega t} into dx/|v| e^{i (omega/v) x}.
            WindowFunction::Tabulated(t) => {
                t.trapezoid_phase_integral(omega / v) / ((2.0 * PI).sqrt() * v.abs())
            }
        })
    }

    pub fn spatial_ft(&self, k: f64) -> Complex64 {
        match self {
            WindowFunction::Gaussian { b } => {
                Complex64::new((-(k * b / 2.0).powi(2)).exp() / (2f64.sqrt() * b), 0.0)
            }
            WindowFunction::Tabulated(t) => t.trapezoid_phase_integral(-k) / (2.0 * PI).sqrt(),
        }
    }
}
