//! Decay-rate enhancement spectra of the three built-in 5-layer stacks for
//! both principal dipole orientations, plus the rate relative to the bare
//! coverslip reference.
//!
//! Run: `cargo run --release --example purcell_spectrum`

use std::fs;
use std::io::Write;

use rayon::prelude::*;

use strata::{coverslip_reference, purcell, DipoleSource, LayerRef, LayerStack, Preset};

fn main() -> strata::Result<()> {
    let presets = [
        ("au-pva", Preset::AuPva),
        ("au-pva-zns", Preset::AuPvaZns),
        ("au-zns", Preset::AuZns),
    ];
    let lambdas: Vec<f64> = (0..176).map(|i| 650.0 + 2.0 * i as f64).collect();

    fs::create_dir_all("examples-out")?;
    let mut csv = fs::File::create("examples-out/purcell_spectrum.csv")?;
    writeln!(
        csv,
        "preset,wavelength_nm,gamma_perp,gamma_par,relative_to_coverslip_perp"
    )?;
    for (name, preset) in presets {
        let stack = LayerStack::preset(preset);
        let rows: Vec<(f64, f64, f64, f64)> = lambdas
            .par_iter()
            .map(|&lam| {
                let dipole = DipoleSource::new(lam, LayerRef::Layer(2), 25.0, 0.0);
                let rates = purcell(&stack, &dipole).expect("preset evaluates");
                let (cover, cover_dipole) = coverslip_reference(lam, 0.0);
                let reference = purcell(&cover, &cover_dipole).expect("coverslip evaluates");
                (lam, rates.gamma_perp, rates.gamma_par, rates.gamma_perp / reference.gamma_theta)
            })
            .collect();
        let peak = rows
            .iter()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        println!(
            "{name:>10}: perpendicular enhancement {:.1}..{:.1}, peak {:.1} at {} nm (x{:.1} vs coverslip)",
            rows.iter().map(|r| r.1).fold(f64::MAX, f64::min),
            rows.iter().map(|r| r.1).fold(f64::MIN, f64::max),
            peak.1,
            peak.0,
            peak.3
        );
        for (lam, perp, par, rel) in rows {
            writeln!(csv, "{name},{lam},{perp},{par},{rel}")?;
        }
    }
    println!("wrote examples-out/purcell_spectrum.csv");
    Ok(())
}
