//! The full config-driven pipeline in library form: parse a JSON config,
//! inspect the resolved scenario, run a subcommand, and show the canonical
//! serialization round trip.
//!
//! Run: `cargo run --release --example config_driven_run`

use strata::config::{canonical_json, parse_config, ConfigContext, OutputFormat};
use strata::runner::{run, Subcommand};

fn main() -> strata::Result<()> {
    let ctx = ConfigContext::default();
    let config = parse_config(
        r#"{
            "stack": {"preset": "au-zns"},
            "dipole": {"band": {"min_nm": 650.0, "max_nm": 1000.0, "n": 36}, "theta_deg": 0.0},
            "collection": {"na": 0.95, "side": "up"}
        }"#,
        &ctx,
    )?;

    // Defaults resolved during parsing: dipole centered in the middle
    // layer, NA 0.95, upward collection.
    let scenario = config.scenario(&ctx)?;
    println!(
        "scenario: {} layers, dipole at z = {} nm of layer index {:?}, {} wavelengths",
        scenario.stack.layers().len(),
        scenario.dipole.z_nm,
        scenario.dipole.host_layer,
        scenario.wavelengths().len()
    );

    // Canonical serialization is a fixed point of parsing.
    let canon = canonical_json(&config);
    assert_eq!(parse_config(&canon, &ctx)?, config);
    println!("canonical config round-trips ({} bytes)", canon.len());

    let outcome = run(
        Subcommand::Purcell,
        &config,
        &ctx,
        std::path::Path::new("examples-out"),
        OutputFormat::Csv,
    )?;
    println!("{}", outcome.summary);
    for file in outcome.files {
        println!("wrote {}", file.display());
    }
    Ok(())
}
