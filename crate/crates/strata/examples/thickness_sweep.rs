//! Design sweep: middle-layer thickness against the perpendicular
//! enhancement at 900 nm, driven through the same JSON config model the
//! CLI uses.
//!
//! Run: `cargo run --release --example thickness_sweep`

use std::fs;
use std::io::Write;

use strata::config::{parse_config, ConfigContext};
use strata::run_sweep;

fn main() -> strata::Result<()> {
    let ctx = ConfigContext::default();
    let config = parse_config(
        r#"{
            "stack": {"lower_cladding": "glass", "layers": [
                {"material": "zns", "thickness_nm": 30.0},
                {"material": "gold", "thickness_nm": 30.0},
                {"material": "zns", "thickness_nm": 50.0},
                {"material": "gold", "thickness_nm": 30.0},
                {"material": "zns", "thickness_nm": 30.0}
            ], "upper_cladding": "air"},
            "dipole": {"wavelength_nm": 900.0, "host_layer": 2, "z_nm": 25.0},
            "sweep": {
                "parameters": [
                    {"path": "stack.layers[2].thickness_nm", "min": 30.0, "max": 80.0, "n_points": 26}
                ],
                "objective": {"metric": "fp_perp", "wavelength_nm": 900.0}
            }
        }"#,
        &ctx,
    )?;
    let spec = config.sweep.clone().unwrap();
    let result = run_sweep(&config, &ctx, &spec)?;

    fs::create_dir_all("examples-out")?;
    let mut csv = fs::File::create("examples-out/thickness_sweep.csv")?;
    writeln!(csv, "middle_thickness_nm,fp_perp")?;
    for row in &result.rows {
        writeln!(csv, "{},{}", row.values[0], row.objective)?;
    }
    let best = result.argmax_row();
    println!(
        "middle ZnS thickness sweep at 900 nm: best fp_perp = {:.2} at {} nm (dipole kept at z = 25 nm)",
        best.objective, best.values[0]
    );
    println!("wrote examples-out/thickness_sweep.csv");
    Ok(())
}
