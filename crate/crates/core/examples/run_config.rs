//! Drive a run from a TOML document and write the tables to a directory.
//!
//!     cargo run --example run_config -- out/breathing

use bloch_zener::cli::run_scenario;
use bloch_zener::config::parse_config;
use bloch_zener::io::emit_scenario;

const CONFIG: &str = r#"
preset = "breathing"

[window]
half_width = 200

[numerics]
tmax = 12.566370614359172
dt = 0.09817477042468103
"#;

fn main() -> bloch_zener::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "bloch-zener-out".into());
    let cfg = parse_config(CONFIG)?;
    let report = run_scenario(&cfg)?;
    emit_scenario(&report, dir.as_ref())?;
    println!("{} samples of {} written to {dir}", report.times.len(), report.name);
    Ok(())
}
