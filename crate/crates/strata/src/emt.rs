//! Effective-medium description of a metal/dielectric multilayer:
//! uniaxial permittivity components, hyperbolicity classification, and
//! iso-frequency curve evaluation.
//!
//! Subscript convention: `eps_perp` is the thickness-weighted *arithmetic*
//! mean and governs fields polarized in the layer plane; `eps_par` is the
//! *harmonic* mean and governs fields along the stack axis. The dispersion
//! relation is evaluated exactly as
//! `k_par^2 / eps_par + k_perp^2 / eps_perp = (w/c)^2`,
//! with `k_par` in-plane and `k_perp` along the stack axis. One documented
//! convention throughout prevents silent sign errors; some texts swap the
//! subscripts.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::materials::{ComplexPermittivity, Material};
use crate::stack::sqrt_upper;

/// Uniaxial effective permittivity of one metal/dielectric unit cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectivePermittivity {
    /// Arithmetic (in-plane) average.
    pub eps_perp: Complex64,
    /// Harmonic (stack-axis) average.
    pub eps_par: Complex64,
    pub wavelength_nm: f64,
    pub fill_fraction_metal: f64,
}

impl EffectivePermittivity {
    /// Hyperbolic iff the real parts of the two components have opposite
    /// signs. Classification uses real parts only; losses make the strict
    /// product complex.
    pub fn is_hyperbolic(&self) -> bool {
        self.eps_perp.re * self.eps_par.re < 0.0
    }
}

/// One point of the iso-frequency curve, wavevectors in units of `w/c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoFrequencyPoint {
    pub k_par: f64,
    pub k_perp: Complex64,
}

/// Thickness-weighted arithmetic and harmonic permittivity averages.
pub fn effective_permittivity(
    eps_m: ComplexPermittivity,
    eps_d: ComplexPermittivity,
    d_m_nm: f64,
    d_d_nm: f64,
) -> Result<EffectivePermittivity> {
    if d_m_nm < 0.0 || d_d_nm < 0.0 || (d_m_nm == 0.0 && d_d_nm == 0.0) {
        return Err(Error::Domain(format!(
            "unit-cell thicknesses must be nonnegative and not both zero (got {d_m_nm}, {d_d_nm})"
        )));
    }
    let total = d_m_nm + d_d_nm;
    let eps_perp = (eps_m.eps * d_m_nm + eps_d.eps * d_d_nm) / total;
    let eps_par = total / (d_m_nm / eps_m.eps + d_d_nm / eps_d.eps);
    Ok(EffectivePermittivity {
        eps_perp,
        eps_par,
        wavelength_nm: eps_m.wavelength_nm,
        fill_fraction_metal: d_m_nm / total,
    })
}

/// One sample of a hyperbolicity scan.
#[derive(Debug, Clone, Copy)]
pub struct HyperbolicityPoint {
    pub wavelength_nm: f64,
    pub eff: EffectivePermittivity,
    pub is_hyperbolic: bool,
}

/// Effective permittivity and hyperbolicity classification on a uniform
/// wavelength grid.
pub fn hyperbolicity_band(
    metal: &Material,
    dielectric: &Material,
    d_m_nm: f64,
    d_d_nm: f64,
    lambda_min_nm: f64,
    lambda_max_nm: f64,
    n_points: usize,
) -> Result<Vec<HyperbolicityPoint>> {
    if lambda_min_nm >= lambda_max_nm {
        return Err(Error::Domain(format!(
            "wavelength band must satisfy min < max (got {lambda_min_nm} >= {lambda_max_nm})"
        )));
    }
    if n_points < 2 {
        return Err(Error::Domain(format!(
            "band scan needs at least 2 points, got {n_points}"
        )));
    }
    let step = (lambda_max_nm - lambda_min_nm) / (n_points - 1) as f64;
    (0..n_points)
        .map(|i| {
            let lam = lambda_min_nm + step * i as f64;
            let eff = effective_permittivity(
                metal.permittivity(lam)?,
                dielectric.permittivity(lam)?,
                d_m_nm,
                d_d_nm,
            )?;
            Ok(HyperbolicityPoint {
                wavelength_nm: lam,
                eff,
                is_hyperbolic: eff.is_hyperbolic(),
            })
        })
        .collect()
}

/// Stack-axis wavevector on the iso-frequency surface for a given in-plane
/// wavevector, both in units of `w/c`; branch `Im >= 0`.
pub fn iso_frequency_k_perp(eff: &EffectivePermittivity, k_par: f64) -> IsoFrequencyPoint {
    let k_perp = sqrt_upper(eff.eps_perp * (1.0 - k_par * k_par / eff.eps_par));
    IsoFrequencyPoint { k_par, k_perp }
}

/// Residual of the dispersion relation for a returned point; `< 1e-10` by
/// construction.
pub fn dispersion_residual(eff: &EffectivePermittivity, point: &IsoFrequencyPoint) -> f64 {
    let lhs = point.k_par * point.k_par / eff.eps_par
        + point.k_perp * point.k_perp / eff.eps_perp;
    (lhs - 1.0).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::builtin as m;
    use proptest::prelude::*;

    fn cp(re: f64, im: f64, lam: f64) -> ComplexPermittivity {
        ComplexPermittivity {
            eps: Complex64::new(re, im),
            wavelength_nm: lam,
        }
    }

    #[test]
    fn homogeneous_limit() {
        let eff = effective_permittivity(cp(4.0, 0.0, 900.0), cp(4.0, 0.0, 900.0), 30.0, 70.0)
            .unwrap();
        assert_eq!(eff.eps_perp, Complex64::new(4.0, 0.0));
        assert!((eff.eps_par - 4.0).norm() < 1e-14);
    }

    #[test]
    fn zero_metal_fill() {
        let eff = effective_permittivity(cp(-30.0, 1.0, 900.0), cp(5.29, 0.0, 900.0), 0.0, 50.0)
            .unwrap();
        assert_eq!(eff.eps_perp, Complex64::new(5.29, 0.0));
        assert!((eff.eps_par - 5.29).norm() < 1e-14);
        assert_eq!(eff.fill_fraction_metal, 0.0);
    }

    #[test]
    fn both_zero_thickness_rejected() {
        assert!(
            effective_permittivity(cp(1.0, 0.0, 900.0), cp(1.0, 0.0, 900.0), 0.0, 0.0).is_err()
        );
    }

    #[test]
    fn matches_direct_averages() {
        // Machine-precision agreement with independently written arithmetic.
        let em = Complex64::new(-32.0, 1.9);
        let ed = Complex64::new(5.29, 0.0);
        let (dm, dd) = (30.0, 50.0);
        let eff = effective_permittivity(
            ComplexPermittivity { eps: em, wavelength_nm: 900.0 },
            ComplexPermittivity { eps: ed, wavelength_nm: 900.0 },
            dm,
            dd,
        )
        .unwrap();
        let perp = (em * dm + ed * dd) / (dm + dd);
        let par = (dm + dd) / (dm / em + dd / ed);
        assert!((eff.eps_perp - perp).norm() < 1e-15 * perp.norm());
        assert!((eff.eps_par - par).norm() < 1e-15 * par.norm());
    }

    #[test]
    fn gold_zns_at_900_is_hyperbolic() {
        let eff = effective_permittivity(
            m::gold().permittivity(900.0).unwrap(),
            m::zns().permittivity(900.0).unwrap(),
            30.0,
            30.0,
        )
        .unwrap();
        assert!(eff.eps_perp.re * eff.eps_par.re < 0.0, "{eff:?}");
        assert!(eff.is_hyperbolic());
        // Hand evaluation of the two averages from the table values at
        // 900 nm: arithmetic mean is strongly negative, harmonic positive.
        assert!(eff.eps_perp.re < -10.0, "{}", eff.eps_perp.re);
        assert!(eff.eps_par.re > 5.0, "{}", eff.eps_par.re);
    }

    #[test]
    fn gold_pva_at_900_matches_hand_evaluation() {
        let em = m::gold().permittivity(900.0).unwrap().eps;
        let ed = m::pva().permittivity(900.0).unwrap().eps;
        let eff = effective_permittivity(
            m::gold().permittivity(900.0).unwrap(),
            m::pva().permittivity(900.0).unwrap(),
            30.0,
            30.0,
        )
        .unwrap();
        // Independent hand arithmetic of the same averages.
        let perp_hand = 0.5 * (em + ed);
        let par_hand = 2.0 / (1.0 / em + 1.0 / ed);
        assert!((eff.eps_perp - perp_hand).norm() < 1e-12);
        assert!((eff.eps_par - par_hand).norm() < 1e-12);
        assert!(eff.is_hyperbolic());
    }

    #[test]
    fn dielectric_stack_never_hyperbolic() {
        let band = hyperbolicity_band(&m::zns(), &m::pva(), 30.0, 30.0, 650.0, 1000.0, 50)
            .unwrap();
        assert!(band.iter().all(|p| !p.is_hyperbolic));
    }

    #[test]
    fn gold_zns_hyperbolic_over_band() {
        let band = hyperbolicity_band(&m::gold(), &m::zns(), 30.0, 30.0, 650.0, 1000.0, 176)
            .unwrap();
        assert!(band.iter().all(|p| p.is_hyperbolic));
    }

    #[test]
    fn band_exceeding_material_validity_errors() {
        let err = hyperbolicity_band(&m::gold(), &m::zns(), 30.0, 30.0, 100.0, 1000.0, 10);
        assert!(err.is_err());
    }

    #[test]
    fn isotropic_iso_frequency() {
        let eff = EffectivePermittivity {
            eps_perp: Complex64::new(4.0, 0.0),
            eps_par: Complex64::new(4.0, 0.0),
            wavelength_nm: 900.0,
            fill_fraction_metal: 0.0,
        };
        let p0 = iso_frequency_k_perp(&eff, 0.0);
        assert!((p0.k_perp - 2.0).norm() < 1e-14);
        let edge = iso_frequency_k_perp(&eff, 2.0);
        assert!(edge.k_perp.norm() < 1e-7, "{}", edge.k_perp);
    }

    #[test]
    fn hyperbolic_branch_grows_unbounded() {
        // Lossless idealization with opposite-sign components.
        let eff = EffectivePermittivity {
            eps_perp: Complex64::new(-13.4, 0.0),
            eps_par: Complex64::new(12.7, 0.0),
            wavelength_nm: 900.0,
            fill_fraction_metal: 0.5,
        };
        let ks: Vec<f64> = [5.0, 50.0, 500.0]
            .iter()
            .map(|&k| iso_frequency_k_perp(&eff, k).k_perp.norm())
            .collect();
        assert!(ks[0] < ks[1] && ks[1] < ks[2], "{ks:?}");
        assert!(ks[2] > 400.0);
    }

    proptest! {
        #[test]
        fn swap_symmetry(re_m in -60.0f64..-1.0, im_m in 0.0f64..5.0,
                         re_d in 1.0f64..9.0, dm in 1.0f64..100.0, dd in 1.0f64..100.0) {
            let a = effective_permittivity(cp(re_m, im_m, 900.0), cp(re_d, 0.0, 900.0), dm, dd).unwrap();
            let b = effective_permittivity(cp(re_d, 0.0, 900.0), cp(re_m, im_m, 900.0), dd, dm).unwrap();
            prop_assert!((a.eps_perp - b.eps_perp).norm() < 1e-12 * a.eps_perp.norm());
            prop_assert!((a.eps_par - b.eps_par).norm() < 1e-12 * a.eps_par.norm());
        }

        #[test]
        fn dispersion_residual_small(re_m in -60.0f64..-1.0, im_m in 0.0f64..5.0,
                                     re_d in 1.0f64..9.0, k_par in 0.0f64..100.0) {
            let eff = effective_permittivity(cp(re_m, im_m, 900.0), cp(re_d, 0.0, 900.0), 30.0, 30.0).unwrap();
            let p = iso_frequency_k_perp(&eff, k_par);
            prop_assert!(dispersion_residual(&eff, &p) < 1e-10);
        }
    }
}
