//! Wavevector-resolved dissipation and total decay-rate enhancement for a
//! point dipole inside a planar multilayer.
//!
//! The dipole field is expanded in plane waves over the normalized
//! transverse wavevector `s = k_par / k_host`. With the generalized
//! reflections of the two half-spaces folded into
//! `A = r_up exp(2i k_z d_up)` and `B = r_down exp(2i k_z d_down)`
//! (`k_z = k_host sqrt(1 - s^2)`, branch `Im >= 0`), the normalized power
//! spectra are
//!
//! ```text
//! K_perp(s) = (3/2) Re{ (s^3/sqrt(1-s^2)) (1+A_p)(1+B_p)/(1-A_p B_p) }
//! K_par(s)  = (3/4) Re{ (s/sqrt(1-s^2)) [ (1+A_s)(1+B_s)/(1-A_s B_s)
//!             + (1-s^2)(1-A_p)(1-B_p)/(1-A_p B_p) ] }
//! ```
//!
//! both of which integrate to 1 in a homogeneous host (checked by the
//! substitutions `s = sin(phi)` and `s = cosh(v)`, which are also the
//! integration variables used here because they absorb the integrable
//! `1/sqrt(1-s^2)` endpoint). Rates are reported in the Purcell convention
//! `gamma = Gamma_structure / Gamma_vacuum`, so a homogeneous medium of
//! index `n` gives `gamma = n`. The dipole-moment magnitude cancels in
//! every reported ratio and is not represented.
//!
//! Lateral (`x`/`y`) dipole displacement is an exact no-op in a planar
//! stack; only the stack-axis position `z` enters.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad::adaptive_gk15;
use crate::stack::{side_response, sqrt_upper, LayerRef, LayerStack, Polarization, Profile, Side};

/// Default relative tolerance of the adaptive quadrature.
pub const DEFAULT_REL_TOL: f64 = 1e-6;
/// Relative tail threshold of the evanescent integral.
const TAIL_REL: f64 = 1e-9;
/// Evanescent cutoff floor and ceiling in `s`.
const S_FLOOR: f64 = 10.0;
const S_CEILING: f64 = 1000.0;
/// Hosts must be lossless for the vacuum-rate normalization to make sense.
const MAX_HOST_IM_EPS: f64 = 1e-7;

/// A point dipole inside the stack.
///
/// `z_nm` is measured from the bottom of the host layer (for a cladding
/// host: the distance from its single interface, into the cladding).
/// `theta_deg` is the angle between the dipole axis and the stack normal;
/// 0 is perpendicular to the interfaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleSource {
    pub wavelength_nm: f64,
    pub host_layer: LayerRef,
    pub z_nm: f64,
    pub theta_deg: f64,
}

impl DipoleSource {
    pub fn new(wavelength_nm: f64, host_layer: LayerRef, z_nm: f64, theta_deg: f64) -> Self {
        Self {
            wavelength_nm,
            host_layer,
            z_nm,
            theta_deg,
        }
    }

    /// Orientation weights `(cos^2 theta, 1 - cos^2 theta)`; they sum to 1
    /// exactly.
    pub fn orientation_weights(&self) -> (f64, f64) {
        let c = (self.theta_deg.to_radians()).cos();
        let c2 = c * c;
        (c2, 1.0 - c2)
    }
}

/// Decay rates normalized to the same dipole in unbounded vacuum.
#[derive(Debug, Clone, Copy)]
pub struct DecayRates {
    pub gamma_perp: f64,
    pub gamma_par: f64,
    /// `cos^2(theta) * gamma_perp + sin^2(theta) * gamma_par`, exactly.
    pub gamma_theta: f64,
    /// Absolute error bound (quadrature + evanescent tail), worst
    /// orientation.
    pub err_estimate: f64,
}

/// Portion of the evanescent range counted as pure near-field quenching:
/// `s > 4` lies above every bound surface-mode ridge of the supported
/// metals (|s| ~ 1.0-1.2 at a single interface) while the quenching lobe
/// peaks near `3/(2 k d)`.
pub const QUENCHING_S_CUT: f64 = 4.0;

/// Radiative (`s < 1`) / evanescent (`s > 1`) split of the rates, in the
/// same vacuum-rate units as [`DecayRates`]. `quenching_*` is the `s >
/// `[`QUENCHING_S_CUT`] part of the evanescent term: near-field transfer
/// with the surface-mode ridges excluded, the piece the image-dipole
/// closed form describes.
#[derive(Debug, Clone, Copy)]
pub struct DecaySplit {
    pub radiative_perp: f64,
    pub radiative_par: f64,
    pub evanescent_perp: f64,
    pub evanescent_par: f64,
    pub quenching_perp: f64,
    pub quenching_par: f64,
}

/// One sample of the dissipation spectrum: `K` is the normalized power
/// density `dP/ds` divided by the vacuum-in-host rate.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumSample {
    pub s: f64,
    pub k_perp: f64,
    pub k_par: f64,
}

/// Wavevector-resolved dissipation spectrum.
#[derive(Debug, Clone)]
pub struct DissipationSpectrum {
    pub samples: Vec<SpectrumSample>,
}

/// Sampling request for [`dissipation_spectrum`]. With `s_max = None` the
/// cutoff is chosen from the dipole-to-interface distance so the plotted
/// tail is negligible.
#[derive(Debug, Clone, Copy)]
pub struct SamplingSpec {
    pub s_max: Option<f64>,
    pub n: usize,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        Self { s_max: None, n: 2000 }
    }
}

/// Rates per position offset, from [`position_sweep`].
#[derive(Debug, Clone, Copy)]
pub struct PositionSample {
    pub offset_nm: f64,
    pub rates: DecayRates,
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

/// Per-(stack, dipole, wavelength) evaluation state: cached permittivity
/// profile and host geometry.
pub(crate) struct Engine {
    profile: Profile,
    host: usize,
    pub eps_host: Complex64,
    pub n_host: f64,
    /// Host wavenumber in 1/nm.
    pub k_host: f64,
    pub d_up: Option<f64>,
    pub d_dn: Option<f64>,
}

/// Cavity amplitudes of one polarization at fixed `s`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PolCavity {
    pub a: Complex64,
    pub b: Complex64,
    /// `1 - a b`.
    pub denom: Complex64,
    pub r_up: Complex64,
    pub r_dn: Complex64,
    pub t_up: Complex64,
    pub t_dn: Complex64,
    /// One-way phase from the dipole to the boundary on each side.
    pub phase_up: Complex64,
    pub phase_dn: Complex64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Cavity {
    pub s: f64,
    pub s_z: Complex64,
    pub s_pol: PolCavity,
    pub p_pol: PolCavity,
}

impl Engine {
    pub fn new(stack: &LayerStack, dipole: &DipoleSource) -> Result<Self> {
        if !(0.0..=90.0).contains(&dipole.theta_deg) {
            return Err(Error::Domain(format!(
                "dipole orientation must lie in [0, 90] degrees, got {}",
                dipole.theta_deg
            )));
        }
        let profile = stack.profile(dipole.wavelength_nm)?;
        let host = stack.media_index(dipole.host_layer);
        let (d_up, d_dn) = host_distances(stack, dipole)?;
        let eps_host = profile.eps[host];
        if eps_host.im > MAX_HOST_IM_EPS {
            return Err(Error::Domain(format!(
                "host layer must be lossless at the emission wavelength (Im eps = {:e}); place the dipole in a dielectric",
                eps_host.im
            )));
        }
        let n_host = eps_host.re.max(0.0).sqrt();
        let k_host = n_host * profile.k0;
        Ok(Self {
            profile,
            host,
            eps_host,
            n_host,
            k_host,
            d_up,
            d_dn,
        })
    }

    /// Distance to the nearest interface, in nm.
    pub fn d_min(&self) -> f64 {
        match (self.d_up, self.d_dn) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => f64::INFINITY,
        }
    }

    pub(crate) fn cladding_eps(&self, side: Side) -> Complex64 {
        match side {
            Side::Up => *self.profile.eps.last().unwrap(),
            Side::Down => self.profile.eps[0],
        }
    }

    /// Normalized (to `k_host`) longitudinal wavevector in a cladding.
    pub(crate) fn cladding_q(&self, side: Side, s: f64) -> Complex64 {
        let eps = self.cladding_eps(side);
        sqrt_upper(eps / self.eps_host - Complex64::new(s * s, 0.0))
    }

    pub(crate) fn cavity(&self, s: f64) -> Cavity {
        let s_z = sqrt_upper(Complex64::new(1.0, 0.0) - s * s);
        let kappa2 = self.eps_host * s * s;
        let kz = self.k_host / self.profile.k0 * s_z; // vacuum-normalized q of host

        let pol_cavity = |pol: Polarization| -> PolCavity {
            // side_response is the identity when the host is the outermost
            // medium on that side.
            let (r_up, t_up) = side_response(&self.profile, self.host, Side::Up, kappa2, pol);
            let (r_dn, t_dn) = side_response(&self.profile, self.host, Side::Down, kappa2, pol);
            let phase = |d: Option<f64>| match d {
                Some(d) => (Complex64::i() * kz * self.profile.k0 * d).exp(),
                None => Complex64::new(1.0, 0.0),
            };
            let phase_up = phase(self.d_up);
            let phase_dn = phase(self.d_dn);
            let a = match self.d_up {
                Some(_) => r_up * phase_up * phase_up,
                None => Complex64::new(0.0, 0.0),
            };
            let b = match self.d_dn {
                Some(_) => r_dn * phase_dn * phase_dn,
                None => Complex64::new(0.0, 0.0),
            };
            PolCavity {
                a,
                b,
                denom: 1.0 - a * b,
                r_up,
                r_dn,
                t_up,
                t_dn,
                phase_up,
                phase_dn,
            }
        };

        Cavity {
            s,
            s_z,
            s_pol: pol_cavity(Polarization::S),
            p_pol: pol_cavity(Polarization::P),
        }
    }

    /// Cavity interference factors `(C_p_perp, C_s_par, C_p_par)`.
    fn factors(&self, cav: &Cavity) -> (Complex64, Complex64, Complex64) {
        let p = &cav.p_pol;
        let s = &cav.s_pol;
        let c_p_perp = (1.0 + p.a) * (1.0 + p.b) / p.denom;
        let c_s_par = (1.0 + s.a) * (1.0 + s.b) / s.denom;
        let c_p_par = (1.0 - p.a) * (1.0 - p.b) / p.denom;
        (c_p_perp, c_s_par, c_p_par)
    }

    /// Raw kernels `(K_perp, K_par)` at `s`; infinite only exactly on the
    /// host light line.
    pub(crate) fn kernels_raw(&self, s: f64) -> (f64, f64) {
        let mut s = s;
        if (1.0 - s * s).abs() < 1e-14 {
            s += 1e-7;
        }
        let cav = self.cavity(s);
        let (c_pp, c_s, c_ppar) = self.factors(&cav);
        let inv_sz = 1.0 / cav.s_z;
        let k_perp = 1.5 * (s.powi(3) * inv_sz * c_pp).re;
        let k_par =
            0.75 * (s * inv_sz * (c_s + (1.0 - s * s) * c_ppar)).re;
        (k_perp, k_par)
    }

    /// Reduced radiative integrands at `s = sin(phi)`:
    /// `K(s) ds = f(phi) dphi`.
    fn kernels_radiative(&self, phi: f64) -> (f64, f64) {
        let s = phi.sin();
        let cos2 = 1.0 - s * s;
        let cav = self.cavity(s);
        let (c_pp, c_s, c_ppar) = self.factors(&cav);
        let f_perp = 1.5 * s.powi(3) * c_pp.re;
        let f_par = 0.75 * s * (c_s.re + cos2 * c_ppar.re);
        (f_perp, f_par)
    }

    /// Reduced evanescent integrands at `s = cosh(v)`.
    fn kernels_evanescent(&self, v: f64) -> (f64, f64) {
        let s = v.cosh();
        let sh = v.sinh();
        let cav = self.cavity(s);
        let (c_pp, c_s, c_ppar) = self.factors(&cav);
        let g_perp = 1.5 * s.powi(3) * c_pp.im;
        let g_par = 0.75 * s * (c_s.im - sh * sh * c_ppar.im);
        (g_perp, g_par)
    }

    /// Power leaving the host toward `side` per unit `s` divided by `s`
    /// (finite at `s = 0`), resolved by dipole orientation, in the same
    /// vacuum-in-host units as the kernels. Computed from the transmitted
    /// amplitudes and the cladding flux factor; meaningful where that
    /// cladding is lossless.
    pub(crate) fn outgoing_density(&self, s: f64, side: Side) -> (f64, f64) {
        let cav = self.cavity(s);
        let (u_perp, u_spar, u_ppar) = self.source_amplitudes(&cav, side);
        let q_clad = self.cladding_q(side, s);
        let eps_clad = self.cladding_eps(side);
        let (t_s, t_p, phase) = match side {
            Side::Up => (cav.s_pol.t_up, cav.p_pol.t_up, (cav.s_pol.phase_up, cav.p_pol.phase_up)),
            Side::Down => (cav.s_pol.t_dn, cav.p_pol.t_dn, (cav.s_pol.phase_dn, cav.p_pol.phase_dn)),
        };
        let flux_s = q_clad.re;
        let flux_p = (self.eps_host.re / eps_clad.re) * q_clad.re;
        let perp = 0.75 * flux_p * (t_p * phase.1 * u_perp).norm_sqr();
        let par = 0.375
            * (flux_s * (t_s * phase.0 * u_spar).norm_sqr()
                + flux_p * (t_p * phase.1 * u_ppar).norm_sqr());
        (perp, par)
    }

    /// Power leaving the host toward `side` per unit `s`. Exercised by the
    /// energy-bookkeeping tests.
    #[allow(dead_code)]
    pub(crate) fn outgoing_flux_s(&self, s: f64, side: Side) -> (f64, f64) {
        let (perp, par) = self.outgoing_density(s, side);
        (s * perp, s * par)
    }

    /// Net power crossing the host boundary toward `side` per unit `s`,
    /// from the host-side standing field (reflection route; no transmission
    /// coefficients involved). Equals [`Self::outgoing_flux_s`] when the
    /// intervening sub-stack is lossless. Exercised by the two-route
    /// consistency tests.
    #[allow(dead_code)]
    pub(crate) fn host_flux_s(&self, s: f64, side: Side) -> (f64, f64) {
        let cav = self.cavity(s);
        let (u_perp, u_spar, u_ppar) = self.source_amplitudes(&cav, side);
        let (r_s, r_p, phase) = match side {
            Side::Up => (cav.s_pol.r_up, cav.p_pol.r_up, (cav.s_pol.phase_up, cav.p_pol.phase_up)),
            Side::Down => (cav.s_pol.r_dn, cav.p_pol.r_dn, (cav.s_pol.phase_dn, cav.p_pol.phase_dn)),
        };
        let net = |amp: Complex64, r: Complex64, ph: Complex64| -> f64 {
            let w_out = ph * amp;
            let w_back = r * w_out;
            cav.s_z.re * (w_out.norm_sqr() - w_back.norm_sqr())
                - 2.0 * cav.s_z.im * (w_out * w_back.conj()).im
        };
        let perp = 0.75 * s * net(u_perp, r_p, phase.1);
        let par = 0.375 * s * (net(u_spar, r_s, phase.0) + net(u_ppar, r_p, phase.1));
        (perp, par)
    }

    /// Outward-going source amplitudes at the dipole plane toward `side`,
    /// with all cavity round trips resummed:
    /// `(perp p-pol, par s-pol, par p-pol)`.
    fn source_amplitudes(&self, cav: &Cavity, side: Side) -> (Complex64, Complex64, Complex64) {
        let s = cav.s;
        let inv_sz = 1.0 / cav.s_z;
        let p = &cav.p_pol;
        let sp = &cav.s_pol;
        match side {
            Side::Up => (
                s * inv_sz * (1.0 + p.b) / p.denom,
                inv_sz * (1.0 + sp.b) / sp.denom,
                (1.0 - p.b) / p.denom,
            ),
            Side::Down => (
                s * inv_sz * (1.0 + p.a) / p.denom,
                inv_sz * (1.0 + sp.a) / sp.denom,
                -(1.0 - p.a) / p.denom,
            ),
        }
    }

    /// Radiative and evanescent integrals of both kernels with the given
    /// relative tolerance. Returns `(split, err_perp, err_par)` in kernel
    /// (vacuum-in-host) units.
    fn integrate(&self, rel_tol: f64) -> Result<(DecaySplit, f64, f64)> {
        use std::f64::consts::FRAC_PI_2;
        let max_panels = 4000;

        let rad_perp = adaptive_gk15(
            |phi| self.kernels_radiative(phi).0,
            0.0,
            FRAC_PI_2,
            rel_tol,
            1e-12,
            max_panels,
        );
        let rad_par = adaptive_gk15(
            |phi| self.kernels_radiative(phi).1,
            0.0,
            FRAC_PI_2,
            rel_tol,
            1e-12,
            max_panels,
        );

        // Evanescent part, in chunks of s = cosh(v); after the floor is
        // reached, stop once the running tail estimate is negligible.
        let mut ev_perp = 0.0;
        let mut ev_par = 0.0;
        let mut quench_perp = 0.0;
        let mut quench_par = 0.0;
        let mut err_perp = rad_perp.error;
        let mut err_par = rad_par.error;
        let d_min = self.d_min();

        let mut chunk_edges: Vec<f64> = vec![1.0, 1.5, 2.0, 3.0, QUENCHING_S_CUT, 5.0, 7.0, 10.0];
        let mut edge = 10.0;
        while edge < S_CEILING {
            edge = (edge * 1.5).min(S_CEILING);
            chunk_edges.push(edge);
        }

        let mut converged = false;
        let mut s_reached = 1.0;
        let mut tail_rel_bound = 0.0;
        for pair in chunk_edges.windows(2) {
            let (s0, s1) = (pair[0], pair[1]);
            let v0 = s0.acosh();
            let v1 = s1.acosh();
            let c_perp = adaptive_gk15(
                |v| self.kernels_evanescent(v).0,
                v0,
                v1,
                rel_tol,
                1e-12,
                max_panels,
            );
            let c_par = adaptive_gk15(
                |v| self.kernels_evanescent(v).1,
                v0,
                v1,
                rel_tol,
                1e-12,
                max_panels,
            );
            ev_perp += c_perp.value;
            ev_par += c_par.value;
            if s0 >= QUENCHING_S_CUT {
                quench_perp += c_perp.value;
                quench_par += c_par.value;
            }
            err_perp += c_perp.error;
            err_par += c_par.error;
            s_reached = s1;

            if s1 >= S_FLOOR {
                // Local decay rate of the integrand in v is at least
                // 2 k_host d_min cosh(v); bound the remaining tail by the
                // endpoint magnitude over that rate.
                let (g_perp, g_par) = self.kernels_evanescent(v1);
                let rate = 2.0 * self.k_host * d_min * s1;
                if !rate.is_finite() || rate <= 0.0 {
                    break; // homogeneous medium: nothing decays, kernels are 0
                }
                let total_perp = (rad_perp.value + ev_perp).abs().max(1e-300);
                let total_par = (rad_par.value + ev_par).abs().max(1e-300);
                let tail_perp = (g_perp / rate).abs() / total_perp;
                let tail_par = (g_par / rate).abs() / total_par;
                tail_rel_bound = tail_perp.max(tail_par);
                if tail_rel_bound < TAIL_REL {
                    err_perp += tail_perp * total_perp;
                    err_par += tail_par * total_par;
                    converged = true;
                    break;
                }
            }
        }
        if !converged && s_reached >= S_CEILING {
            return Err(Error::TailNotConverged {
                s_max: S_CEILING,
                tail_estimate: tail_rel_bound,
            });
        }

        Ok((
            DecaySplit {
                radiative_perp: self.n_host * rad_perp.value,
                radiative_par: self.n_host * rad_par.value,
                evanescent_perp: self.n_host * ev_perp,
                evanescent_par: self.n_host * ev_par,
                quenching_perp: self.n_host * quench_perp,
                quenching_par: self.n_host * quench_par,
            },
            self.n_host * err_perp,
            self.n_host * err_par,
        ))
    }
}

fn host_distances(stack: &LayerStack, dipole: &DipoleSource) -> Result<(Option<f64>, Option<f64>)> {
    let z = dipole.z_nm;
    match dipole.host_layer {
        LayerRef::Layer(i) => {
            let t = stack
                .layers()
                .get(i)
                .ok_or_else(|| {
                    Error::Domain(format!(
                        "host layer index {i} out of range (stack has {} layers)",
                        stack.layers().len()
                    ))
                })?
                .thickness_nm;
            if z == 0.0 || z == t {
                return Err(Error::DipoleOnInterface { z_nm: z });
            }
            if z < 0.0 || z > t {
                return Err(Error::DipoleOutsideHost {
                    z_nm: z,
                    thickness_nm: t,
                });
            }
            Ok((Some(t - z), Some(z)))
        }
        LayerRef::UpperCladding => {
            if z == 0.0 {
                return Err(Error::DipoleOnInterface { z_nm: z });
            }
            if z < 0.0 {
                return Err(Error::Domain(format!(
                    "cladding-hosted dipole needs z > 0 (distance from the interface), got {z}"
                )));
            }
            Ok((None, Some(z)))
        }
        LayerRef::LowerCladding => {
            if z == 0.0 {
                return Err(Error::DipoleOnInterface { z_nm: z });
            }
            if z < 0.0 {
                return Err(Error::Domain(format!(
                    "cladding-hosted dipole needs z > 0 (distance from the interface), got {z}"
                )));
            }
            Ok((Some(z), None))
        }
    }
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// Total decay-rate enhancement (Purcell factor) for both principal
/// orientations and the requested one, at the default tolerance.
pub fn purcell(stack: &LayerStack, dipole: &DipoleSource) -> Result<DecayRates> {
    purcell_with_tolerance(stack, dipole, DEFAULT_REL_TOL)
}

/// [`purcell`] with an explicit relative quadrature tolerance.
pub fn purcell_with_tolerance(
    stack: &LayerStack,
    dipole: &DipoleSource,
    rel_tol: f64,
) -> Result<DecayRates> {
    let engine = Engine::new(stack, dipole)?;
    let (split, err_perp, err_par) = engine.integrate(rel_tol)?;
    let gamma_perp = (split.radiative_perp + split.evanescent_perp).max(0.0);
    let gamma_par = (split.radiative_par + split.evanescent_par).max(0.0);
    let (c2, s2) = dipole.orientation_weights();
    Ok(DecayRates {
        gamma_perp,
        gamma_par,
        gamma_theta: c2 * gamma_perp + s2 * gamma_par,
        err_estimate: err_perp.max(err_par),
    })
}

/// Radiative/evanescent split of the rates (vacuum-rate units).
pub fn decay_split(stack: &LayerStack, dipole: &DipoleSource) -> Result<DecaySplit> {
    let engine = Engine::new(stack, dipole)?;
    let (split, _, _) = engine.integrate(DEFAULT_REL_TOL)?;
    Ok(split)
}

/// Decay rate relative to a reference structure (ratio of the two
/// `gamma_theta` values). The canonical reference is
/// [`coverslip_reference`].
pub fn relative_rate(
    stack: &LayerStack,
    dipole: &DipoleSource,
    reference: &LayerStack,
    reference_dipole: &DipoleSource,
) -> Result<f64> {
    let a = purcell(stack, dipole)?;
    let b = purcell(reference, reference_dipole)?;
    Ok(a.gamma_theta / b.gamma_theta)
}

/// The documented reference geometry for relative rates: a bare glass/air
/// interface with the dipole 20 nm above the glass, in air.
pub fn coverslip_reference(wavelength_nm: f64, theta_deg: f64) -> (LayerStack, DipoleSource) {
    let stack = LayerStack::preset(crate::stack::Preset::Coverslip);
    let dipole = DipoleSource::new(wavelength_nm, LayerRef::UpperCladding, 20.0, theta_deg);
    (stack, dipole)
}

/// Rates at a list of stack-axis offsets from the dipole's base position.
/// Lateral offsets are an exact no-op in a planar stack and are not swept.
pub fn position_sweep(
    stack: &LayerStack,
    dipole: &DipoleSource,
    offsets_nm: &[f64],
) -> Result<Vec<PositionSample>> {
    // Validate every offset before computing anything.
    for &off in offsets_nm {
        let z = dipole.z_nm + off;
        if let LayerRef::Layer(i) = dipole.host_layer {
            let t = stack
                .layers()
                .get(i)
                .ok_or_else(|| Error::Domain(format!("host layer index {i} out of range")))?
                .thickness_nm;
            if z <= 0.0 || z >= t {
                return Err(Error::Domain(format!(
                    "offset {off} nm puts the dipole at z = {z} nm, outside the host layer; admissible offsets are ({:.6}, {:.6}) nm",
                    -dipole.z_nm,
                    t - dipole.z_nm
                )));
            }
        } else if z <= 0.0 {
            return Err(Error::Domain(format!(
                "offset {off} nm puts the dipole at z = {z} nm; admissible offsets are ({:.6}, inf) nm",
                -dipole.z_nm
            )));
        }
    }
    offsets_nm
        .par_iter()
        .map(|&off| {
            let mut d = *dipole;
            d.z_nm += off;
            Ok(PositionSample {
                offset_nm: off,
                rates: purcell(stack, &d)?,
            })
        })
        .collect()
}

/// Sampled dissipation spectrum. Samples cluster near the host light line
/// (uniform in `asin(s)` below it, uniform in `acosh(s)` above), which keeps
/// trapezoidal integrals of the returned samples accurate.
pub fn dissipation_spectrum(
    stack: &LayerStack,
    dipole: &DipoleSource,
    spec: &SamplingSpec,
) -> Result<DissipationSpectrum> {
    if spec.n < 8 {
        return Err(Error::Domain(format!(
            "spectrum sampling needs at least 8 points, got {}",
            spec.n
        )));
    }
    let engine = Engine::new(stack, dipole)?;
    let s_max = match spec.s_max {
        Some(v) => {
            if v <= 1.0 || !v.is_finite() {
                return Err(Error::Domain(format!("s_max must exceed 1, got {v}")));
            }
            v
        }
        None => {
            let d_min = engine.d_min();
            if d_min.is_finite() {
                (27.6 / (2.0 * engine.k_host * d_min)).clamp(S_FLOOR, S_CEILING)
            } else {
                S_FLOOR
            }
        }
    };
    let n_rad = spec.n / 2;
    let n_ev = spec.n - n_rad;
    let mut samples = Vec::with_capacity(spec.n);
    let dphi = std::f64::consts::FRAC_PI_2 / n_rad as f64;
    for i in 0..n_rad {
        let s = ((i as f64 + 0.5) * dphi).sin();
        let (k_perp, k_par) = engine.kernels_raw(s);
        samples.push(SpectrumSample { s, k_perp, k_par });
    }
    let v_max = s_max.acosh();
    let dv = v_max / n_ev as f64;
    for i in 0..n_ev {
        let s = ((i as f64 + 0.5) * dv).cosh();
        let (k_perp, k_par) = engine.kernels_raw(s);
        samples.push(SpectrumSample { s, k_perp, k_par });
    }
    Ok(DissipationSpectrum { samples })
}

impl DissipationSpectrum {
    /// Trapezoidal integrals `(int K_perp ds, int K_par ds)` over the
    /// sampled range.
    pub fn integrate(&self) -> (f64, f64) {
        let mut perp = 0.0;
        let mut par = 0.0;
        for w in self.samples.windows(2) {
            let ds = w[1].s - w[0].s;
            perp += 0.5 * (w[0].k_perp + w[1].k_perp) * ds;
            par += 0.5 * (w[0].k_par + w[1].k_par) * ds;
        }
        (perp, par)
    }
}
