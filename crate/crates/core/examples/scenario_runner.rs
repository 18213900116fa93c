//! Drives a scenario from a TOML configuration, as the `inelastic` binary
//! does, and lists the files it writes.
//!
//!     cargo run --release --example scenario_runner [config.toml] [scenario]

use std::path::Path;

use inelastic::config::{Scenario, ScenarioConfig};
use inelastic::scenario::{exit_code, run_scenario};

const DEFAULT: &str = r#"
scenario = "sweep"
window.b = 10.0
output.dir = "output/scenario_runner"

[sweep]
v_list = [1.0, 3.0, 7.0, 15.0]
alpha_list = [0.5, 1.0, 2.0]
"#;

fn main() {
    let mut args = std::env::args().skip(1);
    let config = match args.next() {
        Some(path) => ScenarioConfig::from_path(Path::new(&path)),
        None => ScenarioConfig::from_toml_str(DEFAULT),
    };
    let scenario = args.next().map(|name| {
        Scenario::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .unwrap_or_else(|| panic!("unknown scenario {name}"))
    });
    let outcome = config.and_then(|c| run_scenario(&c, scenario));
    match &outcome {
        Ok(report) => {
            for file in &report.files {
                println!("wrote {}", file.display());
            }
            for failure in &report.failures {
                println!("failed: {failure}");
            }
        }
        Err(e) => println!("error: {e}"),
    }
    std::process::exit(exit_code(&outcome));
}
