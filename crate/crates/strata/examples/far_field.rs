//! Far-field angular power patterns: a vertical dipole on a glass
//! coverslip (the classic dielectric-antenna lobe at the critical angle)
//! versus the same dipole buried in the 5-layer stack.
//!
//! Run: `cargo run --release --example far_field`

use std::fs;
use std::io::Write;

use strata::{angular_pattern, quantum_efficiency, DipoleSource, LayerRef, LayerStack, Preset, Side};

fn main() -> strata::Result<()> {
    fs::create_dir_all("examples-out")?;
    let mut csv = fs::File::create("examples-out/far_field.csv")?;
    writeln!(csv, "structure,side,theta_deg,p")?;

    // Dipole 5 nm above the glass coverslip, in air.
    let cover = LayerStack::preset(Preset::Coverslip);
    let cover_dipole = DipoleSource::new(900.0, LayerRef::UpperCladding, 5.0, 0.0);
    let mut glass_fraction = 0.0;
    for side in [Side::Up, Side::Down] {
        let pattern = angular_pattern(&cover, &cover_dipole, side, 361)?;
        if side == Side::Down {
            let up = angular_pattern(&cover, &cover_dipole, Side::Up, 361)?;
            glass_fraction =
                pattern.radiated_power() / (pattern.radiated_power() + up.radiated_power());
        }
        for (theta, p) in &pattern.samples {
            writeln!(csv, "coverslip,{},{theta},{p}", side_name(side))?;
        }
    }
    let dn = angular_pattern(&cover, &cover_dipole, Side::Down, 361)?;
    let (peak_theta, _) = dn.peak();
    println!(
        "coverslip: {:.1}% of the far field enters the glass, peak at {peak_theta:.2} deg (critical angle 43.60 deg)",
        glass_fraction * 100.0
    );

    // Same emitter in the middle of the 5-layer stack.
    let hmm = LayerStack::preset(Preset::AuZns);
    let hmm_dipole = DipoleSource::new(900.0, LayerRef::Layer(2), 25.0, 0.0);
    for side in [Side::Up, Side::Down] {
        let pattern = angular_pattern(&hmm, &hmm_dipole, side, 361)?;
        for (theta, p) in &pattern.samples {
            writeln!(csv, "au-zns,{},{theta},{p}", side_name(side))?;
        }
    }
    let qe = quantum_efficiency(&hmm, &hmm_dipole)?;
    println!("au-zns: quantum efficiency {qe:.2e} (most power dissipates in the gold)");
    println!("wrote examples-out/far_field.csv");
    Ok(())
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Up => "up",
        Side::Down => "down",
    }
}
