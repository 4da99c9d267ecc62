//! Collection within a numerical aperture and the collected-photon-rate
//! figure of merit across the emission band.
//!
//! Run: `cargo run --release --example collection_efficiency`

use std::fs;
use std::io::Write;

use strata::{collection, cpr_spectrum, DipoleSource, LayerRef, LayerStack, Preset, Side};

fn main() -> strata::Result<()> {
    let stack = LayerStack::preset(Preset::AuZns);
    let dipole = DipoleSource::new(900.0, LayerRef::Layer(2), 25.0, 0.0);

    // NA dependence at the design wavelength.
    println!("collection from the top (air) side at 900 nm:");
    for na in [0.5, 0.7, 0.9, 0.95] {
        let c = collection(&stack, &dipole, na, Side::Up)?;
        println!(
            "  NA {na:.2} (theta_max {:5.1} deg): ce_rad = {:.4}, ce_tot = {:.2e}, cpr = {:.2e}",
            c.theta_max_deg, c.ce_rad, c.ce_tot, c.cpr
        );
    }

    // Band spectrum at NA 0.95.
    let samples = cpr_spectrum(&stack, &dipole, 650.0, 1000.0, 176, 0.95, Side::Up)?;
    fs::create_dir_all("examples-out")?;
    let mut csv = fs::File::create("examples-out/collection_efficiency.csv")?;
    writeln!(csv, "wavelength_nm,fp,qe,ce_rad,ce_tot,cpr")?;
    let mut peak = (0.0, f64::MIN);
    for sample in &samples {
        let c = sample.result.as_ref().expect("band inside material validity");
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            sample.wavelength_nm, c.fp, c.qe, c.ce_rad, c.ce_tot, c.cpr
        )?;
        if c.cpr > peak.1 {
            peak = (sample.wavelength_nm, c.cpr);
        }
    }
    println!("peak cpr = {:.2e} at {} nm (NA 0.95)", peak.1, peak.0);
    println!("wrote examples-out/collection_efficiency.csv");
    Ok(())
}
