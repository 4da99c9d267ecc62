//! Effective-medium analysis of a metal/dielectric unit cell: permittivity
//! components, hyperbolicity band, and the iso-frequency curve showing the
//! unbounded high-k branch.
//!
//! Run: `cargo run --release --example hyperbolicity`

use std::fs;
use std::io::Write;

use strata::{builtin, effective_permittivity, hyperbolicity_band, iso_frequency_k_perp};

fn main() -> strata::Result<()> {
    let gold = builtin::gold();
    let zns = builtin::zns();

    let band = hyperbolicity_band(&gold, &zns, 30.0, 30.0, 650.0, 1000.0, 176)?;
    fs::create_dir_all("examples-out")?;
    let mut csv = fs::File::create("examples-out/hyperbolicity.csv")?;
    writeln!(
        csv,
        "wavelength_nm,re_eps_perp,im_eps_perp,re_eps_par,im_eps_par,is_hyperbolic"
    )?;
    for p in &band {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            p.wavelength_nm,
            p.eff.eps_perp.re,
            p.eff.eps_perp.im,
            p.eff.eps_par.re,
            p.eff.eps_par.im,
            p.is_hyperbolic
        )?;
    }
    let hyperbolic = band.iter().filter(|p| p.is_hyperbolic).count();
    println!(
        "Au/ZnS 30/30 nm cell: {hyperbolic}/{} samples hyperbolic over 650-1000 nm",
        band.len()
    );

    // Iso-frequency curve at 900 nm: |k_perp| grows without bound with
    // k_par, the signature of a hyperbolic medium.
    let eff = effective_permittivity(
        gold.permittivity(900.0)?,
        zns.permittivity(900.0)?,
        30.0,
        30.0,
    )?;
    println!(
        "at 900 nm: eps_perp = {:.2}{:+.2}i, eps_par = {:.2}{:+.2}i",
        eff.eps_perp.re, eff.eps_perp.im, eff.eps_par.re, eff.eps_par.im
    );
    for k_par in [0.5, 5.0, 50.0, 500.0] {
        let point = iso_frequency_k_perp(&eff, k_par);
        println!("  k_par = {k_par:>6}: |k_perp| = {:.2} (w/c units)", point.k_perp.norm());
    }
    println!("wrote examples-out/hyperbolicity.csv");
    Ok(())
}
