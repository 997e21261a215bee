//! Library equivalent of `gamefi-sim simulate`: load a JSON config, apply
//! overrides, run, and write the series CSV and trend report.
//!
//! ```bash
//! cargo run --release -p gamefi-sim --example config_driven -- crates/core/configs/retention.json
//! ```

use std::path::PathBuf;

use gamefi_sim::analysis::config::spec_to_json;
use gamefi_sim::analysis::{parse_config, trend_report, write_series_csv_file};
use gamefi_sim::run_experiment;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/serverfi.json")));
    let mut spec = parse_config(&std::fs::read_to_string(&path)?)?;
    // keep the demo quick
    spec.repeats = spec.repeats.min(10);
    spec.validate()?;
    println!("effective spec:\n{}", spec_to_json(&spec));

    let output = run_experiment(&spec)?;
    let out = std::env::temp_dir().join("gamefi_config_driven.csv");
    write_series_csv_file(&output.series, &out)?;
    println!("series written to {}", out.display());
    println!("{}", serde_json::to_string_pretty(&trend_report(&output.series)?)?);

    // the same parser rejects out-of-range values with a field path
    let err = parse_config(r#"{"model":"serverfi","serverfi":{"lambda":0.5}}"#).unwrap_err();
    println!("rejected: {err}");
    Ok(())
}
