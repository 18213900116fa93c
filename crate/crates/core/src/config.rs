//! Scenario configuration: flat key–value TOML with dotted section names.
//!
//! ```toml
//! hbar = 1.0
//! m = 1.0
//! mu = 100.0
//! omega0 = 1.0
//! alpha = 1.0
//! v = 7.0
//! window.kind = "gaussian"
//! window.b = 10.0
//! numerics.dt = 1e-3
//! numerics.seed = 12345
//! sweep.v_list = [1.0, 3.0, 7.0, 15.0]
//! output.dir = "out"
//! ```
//!
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, TabulatedWindow, WindowFunction};
use crate::tdse::{Stepper, DEFAULT_DT, DEFAULT_GRID_POINTS, DEFAULT_HALF_WIDTH_SIGMAS, MIN_HALF_WIDTH_SIGMAS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Classical,
    Partial,
    Full,
    Measure,
    Sweep,
    Compare,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Classical,
        Scenario::Partial,
        Scenario::Full,
        Scenario::Measure,
        Scenario::Sweep,
        Scenario::Compare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Classical => "classical",
            Scenario::Partial => "partial",
            Scenario::Full => "full",
            Scenario::Measure => "measure",
            Scenario::Sweep => "sweep",
            Scenario::Compare => "compare",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    #[default]
    Gaussian,
    Tabulated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    #[serde(default)]
    pub kind: WindowKind,
    #[serde(default = "default_b")]
    pub b: f64,
    /// Two-column `x,f` CSV for the tabulated kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            kind: WindowKind::Gaussian,
            b: default_b(),
            file: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    /// Classical integrator step.
    pub dt: f64,
    /// Schrödinger solver step.
    pub tdse_dt: f64,
    pub grid_points: usize,
    /// Grid half-width in units of `sigma_y`.
    pub grid_half_width: f64,
    /// Runs cover `[-t_span, t_span] * b / |v|`.
    pub t_span: f64,
    pub seed: u64,
    pub n_samples: usize,
    /// Row stride of time-series CSV output.
    pub stride: usize,
    pub stepper: Stepper,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            dt: 1e-3,
            tdse_dt: DEFAULT_DT,
            grid_points: DEFAULT_GRID_POINTS,
            grid_half_width: DEFAULT_HALF_WIDTH_SIGMAS,
            t_span: crate::classical::DEFAULT_SPAN,
            seed: 12345,
            n_samples: 10_000,
            stride: 100,
            stepper: Stepper::ImplicitMidpoint,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub v_list: Vec<f64>,
    pub alpha_list: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("output"),
        }
    }
}

/// Relative-difference tolerances applied by the `compare` report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Integrated vs closed-form classical amplitude.
    pub classical_amplitude: f64,
    /// Schrödinger-solver P1 vs partially quantum closed form.
    pub tdse_p1: f64,
    /// Fully vs partially quantum P1.
    pub full_vs_partial: f64,
    /// Quantum `<y>` amplitude vs classical amplitude.
    pub tdse_amplitude: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            classical_amplitude: 0.01,
            tdse_p1: 0.05,
            full_vs_partial: 0.05,
            tdse_amplitude: 0.02,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "one")]
    pub omega0: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "default_v")]
    pub v: f64,
    #[serde(default)]
    pub window: WindowConfig,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn one() -> f64 {
    1.0
}
fn default_mu() -> f64 {
    100.0
}
fn default_v() -> f64 {
    7.0
}
fn default_b() -> f64 {
    10.0
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: None,
            hbar: 1.0,
            m: 1.0,
            mu: default_mu(),
            omega0: 1.0,
            alpha: 1.0,
            v: default_v(),
            window: WindowConfig::default(),
            numerics: Numerics::default(),
            sweep: SweepConfig::default(),
            output: OutputConfig::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            hbar: self.hbar,
            m: self.m,
            mu: self.mu,
            omega0: self.omega0,
            alpha: self.alpha,
            v: self.v,
        }
    }

    pub fn window(&self) -> Result<WindowFunction> {
        match self.window.kind {
            WindowKind::Gaussian => WindowFunction::gaussian(self.window.b),
            WindowKind::Tabulated => {
                let path = self
                    .window
                    .file
                    .as_ref()
                    .ok_or_else(|| Error::invalid("window.file", "required for the tabulated kind"))?;
                Ok(WindowFunction::Tabulated(TabulatedWindow::from_csv(path)?))
            }
        }
    }

    /// Checks every numeric field before any computation starts.
    pub fn validate(&self) -> Result<()> {
        self.params().validate()?;
        if self.window.kind == WindowKind::Gaussian && !(self.window.b.is_finite() && self.window.b > 0.0) {
            return Err(Error::invalid("window.b", format!("must be positive (got {})", self.window.b)));
        }
        let n = &self.numerics;
        positive("numerics.dt", n.dt)?;
        positive("numerics.tdse_dt", n.tdse_dt)?;
        if n.grid_points < 3 {
            return Err(Error::invalid("numerics.grid_points", format!("need at least 3 (got {})", n.grid_points)));
        }
        if n.grid_points.is_multiple_of(2) {
            log::warn!("numerics.grid_points = {} is even: y = 0 is not a grid node", n.grid_points);
        }
        if !(n.grid_half_width >= MIN_HALF_WIDTH_SIGMAS) {
            return Err(Error::invalid(
                "numerics.grid_half_width",
                format!("must be at least {MIN_HALF_WIDTH_SIGMAS} sigma_y (got {})", n.grid_half_width),
            ));
        }
        // the window must be off (< 1e-12 of peak) at both ends of the run
        let min_span = (12.0 * std::f64::consts::LN_10).sqrt();
        if !(n.t_span.is_finite() && n.t_span > min_span) {
            return Err(Error::invalid(
                "numerics.t_span",
                format!("must exceed {min_span:.3} so the run starts decoupled (got {})", n.t_span),
            ));
        }
        if n.seed > i64::MAX as u64 {
            return Err(Error::invalid("numerics.seed", "must fit a TOML integer (at most 2^63 - 1)"));
        }
        if n.n_samples == 0 {
            return Err(Error::invalid("numerics.n_samples", "must be at least 1"));
        }
        if n.stride == 0 {
            return Err(Error::invalid("numerics.stride", "must be at least 1"));
        }
        for (i, &v) in self.sweep.v_list.iter().enumerate() {
            if !v.is_finite() || v == 0.0 {
                return Err(Error::invalid(&format!("sweep.v_list[{i}]"), format!("must be finite and non-zero (got {v})")));
            }
        }
        for (i, &a) in self.sweep.alpha_list.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::invalid(&format!("sweep.alpha_list[{i}]"), format!("must be finite (got {a})")));
            }
        }
        let t = &self.tolerances;
        positive("tolerances.classical_amplitude", t.classical_amplitude)?;
        positive("tolerances.tdse_p1", t.tdse_p1)?;
        positive("tolerances.full_vs_partial", t.full_vs_partial)?;
        positive("tolerances.tdse_amplitude", t.tdse_amplitude)?;
        Ok(())
    }
}

fn positive(field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive (got {value})")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_natural_preset() {
        let c = ScenarioConfig::from_toml_str("").unwrap();
        assert_eq!(c.params(), ModelParams::natural(7.0));
        assert_eq!(c.window().unwrap(), WindowFunction::gaussian(10.0).unwrap());
        c.validate().unwrap();
    }

    #[test]
    fn dotted_keys() {
        let c = ScenarioConfig::from_toml_str(
            "v = 3.0\nwindow.kind = \"gaussian\"\nwindow.b = 5.0\nnumerics.seed = 9\nsweep.v_list = [1.0, 2.0]\n",
        )
        .unwrap();
        assert_eq!(c.v, 3.0);
        assert_eq!(c.window.b, 5.0);
        assert_eq!(c.numerics.seed, 9);
        assert_eq!(c.sweep.v_list, vec![1.0, 2.0]);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ScenarioConfig::from_toml_str("beta = 1.0").is_err());
        assert!(ScenarioConfig::from_toml_str("window.c = 1.0").is_err());
        assert!(ScenarioConfig::from_toml_str("numerics.foo = 1").is_err());
    }

    #[test]
    fn validation_names_the_field() {
        let c = ScenarioConfig::from_toml_str("mu = -100.0").unwrap();
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("`mu`"), "{msg}");
        let c = ScenarioConfig::from_toml_str("numerics.grid_half_width = 4.0").unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("numerics.grid_half_width"));
        let c = ScenarioConfig::from_toml_str("window.kind = \"tabulated\"").unwrap();
        assert!(c.window().unwrap_err().to_string().contains("window.file"));
    }

    #[test]
    fn round_trip() {
        let mut c = ScenarioConfig {
            scenario: Some(Scenario::Sweep),
            ..Default::default()
        };
        c.sweep.alpha_list = vec![0.5, 1.0, 2.0];
        c.numerics.dt = 2.5e-4;
        let text = c.to_toml_string().unwrap();
        assert_eq!(ScenarioConfig::from_toml_str(&text).unwrap(), c);
    }
}
