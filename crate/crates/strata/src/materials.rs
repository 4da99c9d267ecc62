//! Dispersive complex permittivity models and the built-in material registry.
//!
//! Every material yields a relative permittivity `eps = (n + ik)^2` at a
//! requested vacuum wavelength. Four model families are supported:
//!
//! * constant refractive index `n + ik`,
//! * Sellmeier dispersion (lossless),
//! * two-parameter Drude metal,
//! * tabulated `(wavelength_nm, n, k)` samples with linear interpolation
//!   of `n` and `k` separately.
//!
//! Tabulated queries outside the table range are errors, never
//! extrapolations. All materials are passive: `Im eps >= 0` everywhere in
//! their validity band.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex relative permittivity evaluated at one vacuum wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPermittivity {
    pub eps: Complex64,
    pub wavelength_nm: f64,
}

impl ComplexPermittivity {
    /// Complex refractive index `n + ik` with `Re >= 0`.
    pub fn refractive_index(&self) -> Complex64 {
        let n = self.eps.sqrt();
        if n.re < 0.0 {
            -n
        } else {
            n
        }
    }
}

/// Dispersion model backing a [`Material`].
#[derive(Debug, Clone, PartialEq)]
pub enum MaterialModel {
    /// Wavelength-independent refractive index `n + ik`.
    Constant { n: f64, k: f64 },
    /// Sellmeier form `n^2 = 1 + sum_i b_i λ² / (λ² − c_i)` with λ in µm.
    Sellmeier {
        b: Vec<f64>,
        c_um2: Vec<f64>,
        band_nm: (f64, f64),
    },
    /// Two-parameter Drude metal `eps = 1 − ωp²/(ω² + iγω)`, energies in eV.
    Drude {
        plasma_energy_ev: f64,
        damping_energy_ev: f64,
        band_nm: (f64, f64),
    },
    /// Measured `(λ, n, k)` samples, strictly increasing in wavelength.
    Table {
        wavelength_nm: Vec<f64>,
        n: Vec<f64>,
        k: Vec<f64>,
    },
}

/// A named optical material.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    name: String,
    model: MaterialModel,
}

/// Photon energy (eV) of a vacuum wavelength in nm.
const EV_NM: f64 = 1239.841_984;

impl Material {
    /// Constant-index material; `k >= 0` enforces passivity.
    pub fn constant_index(name: impl Into<String>, n: f64, k: f64) -> Result<Self> {
        if !(n.is_finite() && k.is_finite()) || n < 0.0 || k < 0.0 || (n == 0.0 && k == 0.0) {
            return Err(Error::Domain(format!(
                "constant-index material requires finite n >= 0, k >= 0, not both zero (got n = {n}, k = {k})"
            )));
        }
        Ok(Self {
            name: name.into(),
            model: MaterialModel::Constant { n, k },
        })
    }

    /// Material from an explicit model.
    pub fn from_model(name: impl Into<String>, model: MaterialModel) -> Result<Self> {
        let mat = Self {
            name: name.into(),
            model,
        };
        mat.validate()?;
        Ok(mat)
    }

    fn validate(&self) -> Result<()> {
        match &self.model {
            MaterialModel::Constant { n, k } => {
                if *n < 0.0 || *k < 0.0 || (*n == 0.0 && *k == 0.0) {
                    return Err(Error::Domain(format!(
                        "material '{}': invalid constant index n = {n}, k = {k}",
                        self.name
                    )));
                }
            }
            MaterialModel::Sellmeier { b, c_um2, band_nm } => {
                if b.len() != c_um2.len() || b.is_empty() {
                    return Err(Error::Domain(format!(
                        "material '{}': Sellmeier b and c term counts must match and be nonzero",
                        self.name
                    )));
                }
                if band_nm.0 >= band_nm.1 || band_nm.0 <= 0.0 {
                    return Err(Error::Domain(format!(
                        "material '{}': invalid Sellmeier band {band_nm:?}",
                        self.name
                    )));
                }
            }
            MaterialModel::Drude {
                plasma_energy_ev,
                damping_energy_ev,
                band_nm,
            } => {
                if *plasma_energy_ev <= 0.0 || *damping_energy_ev < 0.0 {
                    return Err(Error::Domain(format!(
                        "material '{}': Drude parameters must satisfy ωp > 0, γ >= 0",
                        self.name
                    )));
                }
                if band_nm.0 >= band_nm.1 || band_nm.0 <= 0.0 {
                    return Err(Error::Domain(format!(
                        "material '{}': invalid Drude band {band_nm:?}",
                        self.name
                    )));
                }
            }
            MaterialModel::Table { wavelength_nm, n, k } => {
                if wavelength_nm.len() < 2 || wavelength_nm.len() != n.len() || n.len() != k.len()
                {
                    return Err(Error::Domain(format!(
                        "material '{}': table needs >= 2 rows of equal-length columns",
                        self.name
                    )));
                }
                for w in wavelength_nm.windows(2) {
                    if w[1] <= w[0] {
                        return Err(Error::Domain(format!(
                            "material '{}': table wavelengths not strictly increasing near {} nm",
                            self.name, w[0]
                        )));
                    }
                }
                if k.iter().any(|v| *v < 0.0) || n.iter().any(|v| *v < 0.0) {
                    return Err(Error::Domain(format!(
                        "material '{}': table n and k must be nonnegative",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn model(&self) -> &MaterialModel {
        &self.model
    }

    /// Validity band in nm. Constant-index materials are valid at any
    /// positive wavelength.
    pub fn band_nm(&self) -> (f64, f64) {
        match &self.model {
            MaterialModel::Constant { .. } => (0.0, f64::INFINITY),
            MaterialModel::Sellmeier { band_nm, .. } | MaterialModel::Drude { band_nm, .. } => {
                *band_nm
            }
            MaterialModel::Table { wavelength_nm, .. } => (
                *wavelength_nm.first().unwrap(),
                *wavelength_nm.last().unwrap(),
            ),
        }
    }

    /// Complex relative permittivity `eps = (n + ik)^2` at `wavelength_nm`.
    ///
    /// Pure: repeated calls with the same argument agree bitwise. Tabulated
    /// models interpolate `n` and `k` linearly between the bracketing rows
    /// and are exact at table nodes.
    pub fn permittivity(&self, wavelength_nm: f64) -> Result<ComplexPermittivity> {
        if !wavelength_nm.is_finite() || wavelength_nm <= 0.0 {
            return Err(Error::Domain(format!(
                "wavelength must be positive and finite (got {wavelength_nm})"
            )));
        }
        let (min_nm, max_nm) = self.band_nm();
        if wavelength_nm < min_nm || wavelength_nm > max_nm {
            return Err(Error::WavelengthOutOfBand {
                material: self.name.clone(),
                wavelength_nm,
                min_nm,
                max_nm,
            });
        }
        let nk = match &self.model {
            MaterialModel::Constant { n, k } => Complex64::new(*n, *k),
            MaterialModel::Sellmeier { b, c_um2, .. } => {
                let lam_um2 = (wavelength_nm * 1e-3).powi(2);
                let mut n2 = 1.0;
                for (bi, ci) in b.iter().zip(c_um2) {
                    n2 += bi * lam_um2 / (lam_um2 - ci);
                }
                Complex64::new(n2.max(0.0).sqrt(), 0.0)
            }
            MaterialModel::Drude {
                plasma_energy_ev,
                damping_energy_ev,
                ..
            } => {
                let w = EV_NM / wavelength_nm;
                let eps = Complex64::new(1.0, 0.0)
                    - plasma_energy_ev.powi(2)
                        / Complex64::new(w * w, w * damping_energy_ev);
                return Ok(ComplexPermittivity {
                    eps,
                    wavelength_nm,
                });
            }
            MaterialModel::Table { wavelength_nm: w, n, k } => {
                // Binary search for the bracketing pair; exact node hits
                // return the row values untouched.
                let idx = match w.binary_search_by(|x| x.partial_cmp(&wavelength_nm).unwrap()) {
                    Ok(i) => return Ok(nk_to_eps(Complex64::new(n[i], k[i]), wavelength_nm)),
                    Err(i) => i,
                };
                let (i0, i1) = (idx - 1, idx);
                let t = (wavelength_nm - w[i0]) / (w[i1] - w[i0]);
                Complex64::new(
                    n[i0] + t * (n[i1] - n[i0]),
                    k[i0] + t * (k[i1] - k[i0]),
                )
            }
        };
        Ok(nk_to_eps(nk, wavelength_nm))
    }
}

fn nk_to_eps(nk: Complex64, wavelength_nm: f64) -> ComplexPermittivity {
    // (n + ik)^2 = n^2 - k^2 + 2nk i ; passivity (k >= 0) gives Im eps >= 0.
    ComplexPermittivity {
        eps: Complex64::new(nk.re * nk.re - nk.im * nk.im, 2.0 * nk.re * nk.im),
        wavelength_nm,
    }
}

/// Parse a `(wavelength_nm, n, k)` CSV table.
///
/// Format: header `wavelength_nm,n,k`, `#` comment lines, decimal point `.`,
/// UTF-8. Row numbers in errors count physical lines starting at 1.
pub fn parse_nk_table(name: impl Into<String>, text: &str) -> Result<Material> {
    let name = name.into();
    let mut wavelength = Vec::new();
    let mut ns = Vec::new();
    let mut ks = Vec::new();
    let mut header_seen = false;
    for (lineno, raw) in text.lines().enumerate() {
        let row = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols != ["wavelength_nm", "n", "k"] {
                return Err(Error::TableParse {
                    name,
                    row,
                    reason: format!("expected header `wavelength_nm,n,k`, got `{line}`"),
                });
            }
            header_seen = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(Error::TableParse {
                name,
                row,
                reason: format!("expected 3 columns, got {}", cols.len()),
            });
        }
        let parse = |v: &str, what: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| Error::TableParse {
                name: name.clone(),
                row,
                reason: format!("cannot parse {what} value `{v}`"),
            })
        };
        let w = parse(cols[0], "wavelength")?;
        let n = parse(cols[1], "n")?;
        let k = parse(cols[2], "k")?;
        if let Some(prev) = wavelength.last() {
            if w <= *prev {
                return Err(Error::TableParse {
                    name,
                    row,
                    reason: format!("wavelengths must be strictly increasing ({w} after {prev})"),
                });
            }
        }
        if k < 0.0 {
            return Err(Error::TableParse {
                name,
                row,
                reason: format!("negative extinction coefficient k = {k} (passive media only)"),
            });
        }
        if n < 0.0 || !w.is_finite() || !n.is_finite() || !k.is_finite() {
            return Err(Error::TableParse {
                name,
                row,
                reason: "values must be finite with n >= 0".into(),
            });
        }
        wavelength.push(w);
        ns.push(n);
        ks.push(k);
    }
    if wavelength.len() < 2 {
        return Err(Error::TableParse {
            name,
            row: text.lines().count(),
            reason: format!("table needs at least 2 data rows, got {}", wavelength.len()),
        });
    }
    Material::from_model(
        name,
        MaterialModel::Table {
            wavelength_nm: wavelength,
            n: ns,
            k: ks,
        },
    )
}

/// Load a `(n, k)` table from a CSV file; the material is named after the
/// file stem.
pub fn ingest_nk_table(path: impl AsRef<Path>) -> Result<Material> {
    let path = path.as_ref();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "table".to_string());
    let text = std::fs::read_to_string(path)?;
    parse_nk_table(name, &text)
}

/// Built-in materials.
///
/// Dielectrics default to constant indices at their commonly quoted values;
/// gold ships as the measured Johnson & Christy table (187.9–1937 nm), with
/// a two-parameter Drude fit (`drude_gold`) available for sensitivity
/// studies. `mirror` is an idealized near-perfect reflector
/// (`eps = -1e8`) used to pin sign conventions.
pub mod builtin {
    use super::*;
    use std::sync::OnceLock;

    const AU_JC_CSV: &str = include_str!("../data/au_johnson_christy.csv");

    /// Names accepted by [`by_name`], sorted.
    pub const KNOWN_NAMES: &[&str] = &[
        "air", "au", "diamond", "drude-gold", "glass", "gold", "mirror", "pva", "sic", "silica",
        "vacuum", "zns",
    ];

    pub fn vacuum() -> Material {
        Material::constant_index("vacuum", 1.0, 0.0).unwrap()
    }

    /// Air is treated as vacuum at optical frequencies.
    pub fn air() -> Material {
        Material::constant_index("air", 1.0, 0.0).unwrap()
    }

    /// Coverslip glass, n = 1.45.
    pub fn glass() -> Material {
        Material::constant_index("glass", 1.45, 0.0).unwrap()
    }

    /// Poly(vinyl alcohol), n = 1.47.
    pub fn pva() -> Material {
        Material::constant_index("pva", 1.47, 0.0).unwrap()
    }

    /// Zinc sulfide, n = 2.30.
    pub fn zns() -> Material {
        Material::constant_index("zns", 2.30, 0.0).unwrap()
    }

    /// Silicon carbide, n = 2.59.
    pub fn sic() -> Material {
        Material::constant_index("sic", 2.59, 0.0).unwrap()
    }

    /// Diamond, n = 2.39.
    pub fn diamond() -> Material {
        Material::constant_index("diamond", 2.39, 0.0).unwrap()
    }

    /// Fused silica, Sellmeier coefficients of Malitson (1965).
    pub fn silica() -> Material {
        Material::from_model(
            "silica",
            MaterialModel::Sellmeier {
                b: vec![0.696_166_3, 0.407_942_6, 0.897_479_4],
                c_um2: vec![0.068_404_3f64.powi(2), 0.116_241_4f64.powi(2), 9.896_161f64.powi(2)],
                band_nm: (210.0, 3700.0),
            },
        )
        .unwrap()
    }

    /// Gold, tabulated Johnson & Christy (1972) n, k data.
    pub fn gold() -> Material {
        static GOLD: OnceLock<Material> = OnceLock::new();
        GOLD.get_or_init(|| parse_nk_table("gold", AU_JC_CSV).unwrap())
            .clone()
    }

    /// Two-parameter Drude gold fitted to the near-infrared part of the
    /// tabulated data (ωp = 7.9 eV, γ = 0.083 eV). Rougher than the table;
    /// intended for sensitivity studies only.
    pub fn drude_gold() -> Material {
        Material::from_model(
            "drude-gold",
            MaterialModel::Drude {
                plasma_energy_ev: 7.9,
                damping_energy_ev: 0.083,
                band_nm: (600.0, 1200.0),
            },
        )
        .unwrap()
    }

    /// Idealized near-perfect mirror, eps = -1e8 (|r| -> 1 for every s and
    /// polarization).
    pub fn mirror() -> Material {
        Material::constant_index("mirror", 0.0, 1e4).unwrap()
    }

    /// Look up a built-in material by (case-insensitive) name.
    pub fn by_name(name: &str) -> Option<Material> {
        match name.to_ascii_lowercase().as_str() {
            "vacuum" => Some(vacuum()),
            "air" => Some(air()),
            "glass" => Some(glass()),
            "pva" => Some(pva()),
            "zns" => Some(zns()),
            "sic" => Some(sic()),
            "diamond" => Some(diamond()),
            "silica" => Some(silica()),
            "gold" | "au" => Some(gold()),
            "drude-gold" => Some(drude_gold()),
            "mirror" => Some(mirror()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zns_matches_quoted_index() {
        let eps = builtin::zns().permittivity(900.0).unwrap().eps;
        assert!((eps.re - 5.29).abs() < 1e-12, "Re eps = {}", eps.re);
        assert_eq!(eps.im, 0.0);
    }

    #[test]
    fn vacuum_is_unity_everywhere() {
        for lam in [200.0, 640.0, 900.0, 5000.0] {
            let eps = builtin::vacuum().permittivity(lam).unwrap().eps;
            assert_eq!(eps, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn gold_interpolation_matches_manual_bracketing() {
        // Independent interpolation of the two rows bracketing 900 nm:
        // (892.0, 0.17, 5.663) and (984.0, 0.22, 6.350).
        let t = (900.0 - 892.0) / (984.0 - 892.0);
        let n = 0.17 + t * (0.22 - 0.17);
        let k = 5.663 + t * (6.350 - 5.663);
        let expect = Complex64::new(n * n - k * k, 2.0 * n * k);
        let got = builtin::gold().permittivity(900.0).unwrap().eps;
        assert!((got - expect).norm() < 1e-12 * expect.norm(), "{got} vs {expect}");
    }

    #[test]
    fn gold_exact_at_table_node() {
        // Direct row lookup: 659.5 nm -> n = 0.14, k = 3.697.
        let got = builtin::gold().permittivity(659.5).unwrap().eps;
        let expect = Complex64::new(0.14 * 0.14 - 3.697 * 3.697, 2.0 * 0.14 * 3.697);
        assert_eq!(got, expect);
    }

    #[test]
    fn gold_out_of_band_names_material_and_band() {
        let err = builtin::gold().permittivity(100.0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("gold") && msg.contains("187.9"), "{msg}");
    }

    #[test]
    fn two_row_vacuum_table() {
        let m = parse_nk_table("flat", "wavelength_nm,n,k\n500,1,0\n1000,1,0\n").unwrap();
        let eps = m.permittivity(750.0).unwrap().eps;
        assert_eq!(eps, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn non_monotonic_table_rejected_with_row() {
        let err = parse_nk_table("bad", "wavelength_nm,n,k\n800,1,0\n700,1,0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 3") && msg.contains("strictly increasing"), "{msg}");
    }

    #[test]
    fn negative_k_rejected() {
        let err = parse_nk_table("bad", "wavelength_nm,n,k\n500,1,0\n600,1,-0.1\n").unwrap_err();
        assert!(err.to_string().contains("negative extinction"), "{err}");
    }

    #[test]
    fn malformed_row_rejected() {
        let err = parse_nk_table("bad", "wavelength_nm,n,k\n500,1\n").unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
    }

    #[test]
    fn passivity_across_builtins() {
        for name in builtin::KNOWN_NAMES {
            let m = builtin::by_name(name).unwrap();
            let (lo, hi) = m.band_nm();
            let lo = lo.max(400.0);
            let hi = hi.min(1100.0);
            let mut lam = lo;
            while lam <= hi {
                let eps = m.permittivity(lam).unwrap().eps;
                assert!(eps.im >= 0.0, "{name} at {lam}: Im eps = {}", eps.im);
                assert!(eps.is_finite(), "{name} at {lam}");
                lam += 25.0;
            }
        }
    }

    #[test]
    fn permittivity_is_pure() {
        let m = builtin::gold();
        let a = m.permittivity(733.3).unwrap().eps;
        let b = m.permittivity(733.3).unwrap().eps;
        assert_eq!(a, b);
    }

    #[test]
    fn drude_gold_metallic_in_band() {
        let eps = builtin::drude_gold().permittivity(900.0).unwrap().eps;
        assert!(eps.re < -20.0 && eps.im > 0.0, "{eps}");
    }

    #[test]
    fn silica_index_near_quoted_glass() {
        let eps = builtin::silica().permittivity(900.0).unwrap().eps;
        let n = eps.sqrt().re;
        assert!((n - 1.45).abs() < 0.01, "n = {n}");
    }

    #[test]
    fn interpolation_linear_between_nodes() {
        let m = parse_nk_table("lin", "wavelength_nm,n,k\n500,1.0,0.0\n700,2.0,1.0\n").unwrap();
        let nk = m.permittivity(600.0).unwrap().refractive_index();
        assert!((nk.re - 1.5).abs() < 1e-12 && (nk.im - 0.5).abs() < 1e-12);
    }
}
