//! Planar multilayer geometry and generalized reflection/transmission of
//! sub-stacks via scattering-matrix (Redheffer star) recursion.
//!
//! Transfer matrices overflow exponentially for the high-`s` evanescent
//! components that dominate metal/dielectric stacks; the S-matrix form only
//! ever multiplies decaying exponentials and stays finite for arbitrarily
//! large transverse wavevectors.
//!
//! Conventions, pinned by tests:
//! * longitudinal wavevectors take the branch `Im(k_z) >= 0`, and `k_z > 0`
//!   for lossless propagating waves;
//! * s-polarization tracks the transverse E-field amplitude,
//!   `r = (q1 - q2)/(q1 + q2)`;
//! * p-polarization tracks the transverse H-field amplitude,
//!   `r = (eps2 q1 - eps1 q2)/(eps2 q1 + eps1 q2)`, so a perpendicular
//!   dipole approaching a perfect mirror doubles its decay rate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::Material;

/// Field polarization relative to the plane of incidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    /// Transverse electric (E perpendicular to the plane of incidence).
    S,
    /// Transverse magnetic; carries the surface-plasmon poles.
    P,
}

/// Which half of the structure, as seen from a source layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Up,
    Down,
}

/// A layer or cladding that can host a source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerRef {
    LowerCladding,
    /// Index into the finite layers, bottom to top, 0-based.
    Layer(usize),
    UpperCladding,
}

/// One finite layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub material: Material,
    pub thickness_nm: f64,
}

impl Layer {
    pub fn new(material: Material, thickness_nm: f64) -> Result<Self> {
        if !thickness_nm.is_finite() || thickness_nm <= 0.0 {
            return Err(Error::InvalidLayer(format!(
                "thickness must be finite and positive, got {thickness_nm} nm"
            )));
        }
        Ok(Self {
            material,
            thickness_nm,
        })
    }
}

/// Canonical built-in stacks.
///
/// The three HMM presets share the geometry
/// `glass | dielectric 30 | Au 30 | middle dielectric 50 | Au 30 |
/// dielectric 30 | air`, differing in which dielectric fills the outer and
/// middle slots. `Coverslip` is the bare glass/air reference interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    AuPva,
    AuPvaZns,
    AuZns,
    Coverslip,
}

/// Two semi-infinite claddings plus an ordered list of finite layers
/// (bottom to top). Zero layers is legal: the claddings alone form a single
/// interface.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    lower_cladding: Material,
    layers: Vec<Layer>,
    upper_cladding: Material,
}

impl LayerStack {
    pub fn new(lower_cladding: Material, layers: Vec<Layer>, upper_cladding: Material) -> Self {
        Self {
            lower_cladding,
            layers,
            upper_cladding,
        }
    }

    pub fn preset(preset: Preset) -> Self {
        use crate::materials::builtin as m;
        let hmm = |outer: Material, middle: Material| {
            LayerStack::new(
                m::glass(),
                vec![
                    Layer::new(outer.clone(), 30.0).unwrap(),
                    Layer::new(m::gold(), 30.0).unwrap(),
                    Layer::new(middle, 50.0).unwrap(),
                    Layer::new(m::gold(), 30.0).unwrap(),
                    Layer::new(outer, 30.0).unwrap(),
                ],
                m::air(),
            )
        };
        match preset {
            Preset::AuPva => hmm(m::pva(), m::pva()),
            Preset::AuPvaZns => hmm(m::pva(), m::zns()),
            Preset::AuZns => hmm(m::zns(), m::zns()),
            Preset::Coverslip => LayerStack::new(m::glass(), Vec::new(), m::air()),
        }
    }

    /// Homogeneous medium: both claddings (and no layers) of one material.
    pub fn homogeneous(material: Material) -> Self {
        LayerStack::new(material.clone(), Vec::new(), material)
    }

    pub fn lower_cladding(&self) -> &Material {
        &self.lower_cladding
    }

    pub fn upper_cladding(&self) -> &Material {
        &self.upper_cladding
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Material of any source-capable region.
    pub fn material(&self, at: LayerRef) -> Result<&Material> {
        match at {
            LayerRef::LowerCladding => Ok(&self.lower_cladding),
            LayerRef::UpperCladding => Ok(&self.upper_cladding),
            LayerRef::Layer(i) => self.layers.get(i).map(|l| &l.material).ok_or_else(|| {
                Error::Domain(format!(
                    "layer index {i} out of range (stack has {} layers)",
                    self.layers.len()
                ))
            }),
        }
    }

    /// Permittivity profile `[lower, layers.., upper]` at one wavelength,
    /// with the lossless-metal floor applied.
    pub(crate) fn profile(&self, wavelength_nm: f64) -> Result<Profile> {
        let mut eps = Vec::with_capacity(self.layers.len() + 2);
        eps.push(effective_eps(
            self.lower_cladding.permittivity(wavelength_nm)?.eps,
        ));
        for layer in &self.layers {
            eps.push(effective_eps(layer.material.permittivity(wavelength_nm)?.eps));
        }
        eps.push(effective_eps(
            self.upper_cladding.permittivity(wavelength_nm)?.eps,
        ));
        let d = self.layers.iter().map(|l| l.thickness_nm).collect();
        Ok(Profile {
            eps,
            d,
            k0: 2.0 * std::f64::consts::PI / wavelength_nm,
        })
    }

    pub(crate) fn media_index(&self, at: LayerRef) -> usize {
        match at {
            LayerRef::LowerCladding => 0,
            LayerRef::Layer(i) => i + 1,
            LayerRef::UpperCladding => self.layers.len() + 1,
        }
    }
}

/// Minimum `Im eps` injected into metallic media (`Re eps < 0`). Keeps the
/// real-axis integrand pole-free for lossless-metal idealizations; actual
/// metals always exceed it.
pub const MIN_METAL_IM_EPS: f64 = 1e-6;

pub(crate) fn effective_eps(eps: Complex64) -> Complex64 {
    if eps.re < 0.0 && eps.im < MIN_METAL_IM_EPS {
        Complex64::new(eps.re, MIN_METAL_IM_EPS)
    } else {
        eps
    }
}

/// Cached per-wavelength stack data: permittivities, thicknesses, `k0` in
/// 1/nm.
#[derive(Debug, Clone)]
pub(crate) struct Profile {
    pub eps: Vec<Complex64>,
    pub d: Vec<f64>,
    pub k0: f64,
}

impl Profile {
    /// Normalized longitudinal wavevector `q = k_z/k0` in medium `i` for
    /// vacuum-normalized transverse wavevector squared `kappa2`.
    pub fn q(&self, i: usize, kappa2: Complex64) -> Complex64 {
        sqrt_upper(self.eps[i] - kappa2)
    }
}

/// Principal square root folded onto the branch `Im >= 0` (and `Re >= 0` on
/// the real axis).
pub(crate) fn sqrt_upper(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.im < 0.0 || (r.im == 0.0 && r.re < 0.0) {
        -r
    } else {
        r
    }
}

/// 2x2 scattering matrix of a section, in amplitude conventions where every
/// interface satisfies `t = 1 + r`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SMatrix {
    /// Reflection for incidence from below.
    pub rf: Complex64,
    /// Transmission upward.
    pub tf: Complex64,
    /// Reflection for incidence from above.
    pub rb: Complex64,
    /// Transmission downward.
    pub tb: Complex64,
}

impl SMatrix {
    /// Single interface between media with normalized `q` and permittivity
    /// below/above.
    pub fn interface(
        q1: Complex64,
        eps1: Complex64,
        q2: Complex64,
        eps2: Complex64,
        pol: Polarization,
    ) -> Self {
        let (a, b) = match pol {
            Polarization::S => (q1, q2),
            Polarization::P => (q1 / eps1, q2 / eps2),
        };
        let r = (a - b) / (a + b);
        Self {
            rf: r,
            tf: 1.0 + r,
            rb: -r,
            tb: 1.0 - r,
        }
    }

    /// Homogeneous propagation across thickness `d` (nm); `|phase| <= 1`
    /// for the `Im q >= 0` branch, which is what keeps the recursion stable.
    pub fn propagation(q: Complex64, k0: f64, d: f64) -> Self {
        let phase = (Complex64::i() * q * k0 * d).exp();
        Self {
            rf: Complex64::new(0.0, 0.0),
            tf: phase,
            rb: Complex64::new(0.0, 0.0),
            tb: phase,
        }
    }

    /// Redheffer star product: `self` below, `other` above.
    pub fn star(self, other: SMatrix) -> SMatrix {
        let denom = 1.0 - self.rb * other.rf;
        SMatrix {
            rf: self.rf + self.tb * other.rf * self.tf / denom,
            tf: other.tf * self.tf / denom,
            rb: other.rb + other.tf * self.rb * other.tb / denom,
            tb: self.tb * other.tb / denom,
        }
    }
}

/// Composite S-matrix of the media run `[from..=to]`, referenced at the
/// near boundaries (no propagation through the end media themselves).
pub(crate) fn composite(
    profile: &Profile,
    from: usize,
    to: usize,
    kappa2: Complex64,
    pol: Polarization,
) -> SMatrix {
    debug_assert!(from < to);
    let mut s = SMatrix::interface(
        profile.q(from, kappa2),
        profile.eps[from],
        profile.q(from + 1, kappa2),
        profile.eps[from + 1],
        pol,
    );
    for j in (from + 1)..to {
        // Medium j is a finite layer; profile.d index is j - 1.
        s = s
            .star(SMatrix::propagation(
                profile.q(j, kappa2),
                profile.k0,
                profile.d[j - 1],
            ))
            .star(SMatrix::interface(
                profile.q(j, kappa2),
                profile.eps[j],
                profile.q(j + 1, kappa2),
                profile.eps[j + 1],
                pol,
            ));
    }
    s
}

/// Generalized response of one half of the stack, referenced to the near
/// boundary of the source layer and evaluated at `s = k_par / k_host`.
#[derive(Debug, Clone, Copy)]
pub struct HalfSpaceResponse {
    pub r_s: Complex64,
    pub r_p: Complex64,
    /// Amplitude transmitted into the far cladding (transverse E for s-pol,
    /// transverse H for p-pol).
    pub t_s: Complex64,
    pub t_p: Complex64,
}

/// Single-interface amplitude reflection coefficient.
///
/// `s` is the transverse wavevector normalized by the wavenumber of medium
/// 1 (the incidence side). No metal-loss floor is applied here.
pub fn fresnel(eps1: Complex64, eps2: Complex64, s: f64, pol: Polarization) -> Complex64 {
    let kappa2 = eps1 * s * s;
    let q1 = sqrt_upper(eps1 - kappa2);
    let q2 = sqrt_upper(eps2 - kappa2);
    let (a, b) = match pol {
        Polarization::S => (q1, q2),
        Polarization::P => (q1 / eps1, q2 / eps2),
    };
    if a == b {
        return Complex64::new(0.0, 0.0);
    }
    (a - b) / (a + b)
}

/// Generalized reflection/transmission of the sub-stack on `side` of the
/// source layer, by S-matrix recursion. Finite for any `s >= 0`, including
/// deep into the evanescent regime.
pub fn half_space_response(
    stack: &LayerStack,
    source: LayerRef,
    side: Side,
    wavelength_nm: f64,
    s: f64,
) -> Result<HalfSpaceResponse> {
    if s < 0.0 || !s.is_finite() {
        return Err(Error::Domain(format!(
            "normalized transverse wavevector must be finite and nonnegative, got {s}"
        )));
    }
    let profile = stack.profile(wavelength_nm)?;
    let host = stack.media_index(source);
    if host >= profile.eps.len() {
        return Err(Error::Domain(format!("source layer out of range")));
    }
    let kappa2 = profile.eps[host] * s * s;
    let response = |pol| side_response(&profile, host, side, kappa2, pol);
    let (r_s, t_s) = response(Polarization::S);
    let (r_p, t_p) = response(Polarization::P);
    Ok(HalfSpaceResponse { r_s, r_p, t_s, t_p })
}

/// (r, t) seen from the host for one polarization.
pub(crate) fn side_response(
    profile: &Profile,
    host: usize,
    side: Side,
    kappa2: Complex64,
    pol: Polarization,
) -> (Complex64, Complex64) {
    let last = profile.eps.len() - 1;
    match side {
        Side::Up => {
            if host == last {
                (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
            } else {
                let s = composite(profile, host, last, kappa2, pol);
                (s.rf, s.tf)
            }
        }
        Side::Down => {
            if host == 0 {
                (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
            } else {
                let s = composite(profile, 0, host, kappa2, pol);
                (s.rb, s.tb)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::builtin as m;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Flux factor multiplying `|amplitude|^2` for longitudinal power flow:
    /// `Re(q)` for s-pol, `Re(q/eps)` for p-pol (H-amplitude convention).
    fn flux_factor(q: Complex64, eps: Complex64, pol: Polarization) -> f64 {
        match pol {
            Polarization::S => q.re,
            Polarization::P => (q / eps).re,
        }
    }

    #[test]
    fn fresnel_normal_incidence_air_glass() {
        let r = fresnel(c(1.0, 0.0), c(1.45 * 1.45, 0.0), 0.0, Polarization::S);
        assert!((r.re - (1.0 - 1.45) / (1.0 + 1.45)).abs() < 1e-12);
        assert!((r.re + 0.1837).abs() < 1e-4);
        assert_eq!(r.im, 0.0);
    }

    #[test]
    fn fresnel_no_interface_is_zero() {
        for pol in [Polarization::S, Polarization::P] {
            for s in [0.0, 0.5, 1.0, 3.0] {
                let r = fresnel(c(2.25, 0.01), c(2.25, 0.01), s, pol);
                assert_eq!(r, c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn fresnel_total_internal_reflection_onset() {
        // n1 = 1.5 -> n2 = 1.0, critical s = n2/n1.
        let r = fresnel(c(2.25, 0.0), c(1.0, 0.0), 1.0 / 1.5, Polarization::S);
        assert!((r.norm() - 1.0).abs() < 1e-12, "|r| = {}", r.norm());
    }

    #[test]
    fn p_sign_convention_mirror() {
        // Perfect-mirror limit: r_p -> +1, r_s -> -1 at any s.
        let eps_m = m::mirror().permittivity(650.0).unwrap().eps;
        for s in [0.0, 0.5, 2.0] {
            let rp = fresnel(c(1.0, 0.0), eps_m, s, Polarization::P);
            let rs = fresnel(c(1.0, 0.0), eps_m, s, Polarization::S);
            assert!((rp - 1.0).norm() < 1e-3, "r_p({s}) = {rp}");
            assert!((rs + 1.0).norm() < 1e-3, "r_s({s}) = {rs}");
        }
    }

    #[test]
    fn thick_slab_approaches_semi_infinite() {
        // 200 nm of gold at 900 nm behaves as a semi-infinite interface to
        // better than 1e-6.
        let eps_au = m::gold().permittivity(900.0).unwrap().eps;
        let slab = LayerStack::new(
            m::zns(),
            vec![Layer::new(m::gold(), 200.0).unwrap()],
            m::zns(),
        );
        let eps_host = m::zns().permittivity(900.0).unwrap().eps;
        for s in [0.0, 0.4, 0.9] {
            let resp =
                half_space_response(&slab, LayerRef::LowerCladding, Side::Up, 900.0, s).unwrap();
            for (pol, r) in [(Polarization::S, resp.r_s), (Polarization::P, resp.r_p)] {
                let direct = fresnel(eps_host, eps_au, s, pol);
                assert!((r - direct).norm() < 1e-6, "s={s} {pol:?}: {r} vs {direct}");
            }
        }
    }

    #[test]
    fn empty_substack_is_identity() {
        let stack = LayerStack::preset(Preset::Coverslip);
        let resp =
            half_space_response(&stack, LayerRef::UpperCladding, Side::Up, 900.0, 0.3).unwrap();
        assert_eq!(resp.r_s, c(0.0, 0.0));
        assert_eq!(resp.t_p, c(1.0, 0.0));
    }

    #[test]
    fn matched_cladding_vanishing_reflection() {
        // Source layer adjacent to a cladding of the same material.
        let stack = LayerStack::new(
            m::glass(),
            vec![Layer::new(m::zns(), 40.0).unwrap()],
            m::zns(),
        );
        let resp = half_space_response(&stack, LayerRef::Layer(0), Side::Up, 900.0, 0.2).unwrap();
        assert!(resp.r_s.norm() < 1e-15 && resp.r_p.norm() < 1e-15);
        assert!((resp.t_s - 1.0).norm() < 1e-15);
    }

    #[test]
    fn vanishing_layer_continuity() {
        let base = LayerStack::preset(Preset::AuZns);
        let mut layers = base.layers().to_vec();
        layers.insert(2, Layer::new(m::pva(), 1e-9).unwrap());
        let perturbed = LayerStack::new(m::glass(), layers, m::air());
        for s in [0.3, 1.2, 4.0] {
            let a = half_space_response(&base, LayerRef::Layer(2), Side::Down, 900.0, s).unwrap();
            let b =
                half_space_response(&perturbed, LayerRef::Layer(3), Side::Down, 900.0, s).unwrap();
            // Relative where |r| > 1 (evanescent resonances are steep).
            assert!((a.r_p - b.r_p).norm() < 1e-9 * a.r_p.norm().max(1.0));
            assert!((a.r_s - b.r_s).norm() < 1e-9 * a.r_s.norm().max(1.0));
            assert!((a.t_s - b.t_s).norm() < 1e-9 * a.t_s.norm().max(1.0));
        }
    }

    #[test]
    fn energy_conservation_lossless() {
        // |r|^2 + flux-normalized |t|^2 = 1 for a lossless sub-stack in the
        // propagating window.
        let stack = LayerStack::new(
            m::glass(),
            vec![
                Layer::new(m::zns(), 55.0).unwrap(),
                Layer::new(m::pva(), 80.0).unwrap(),
            ],
            m::air(),
        );
        let profile = stack.profile(900.0).unwrap();
        let host = 0; // lower cladding (glass)
        for pol in [Polarization::S, Polarization::P] {
            for s in [0.0, 0.2, 0.4, 0.6] {
                let kappa2 = profile.eps[host] * s * s;
                let (r, t) = side_response(&profile, host, Side::Up, kappa2, pol);
                let f_host = flux_factor(profile.q(host, kappa2), profile.eps[host], pol);
                let f_far = flux_factor(
                    profile.q(profile.eps.len() - 1, kappa2),
                    profile.eps[profile.eps.len() - 1],
                    pol,
                );
                let total = r.norm_sqr() + t.norm_sqr() * f_far / f_host;
                assert!((total - 1.0).abs() < 1e-9, "{pol:?} s={s}: {total}");
            }
        }
    }

    #[test]
    fn composition_matches_star_product() {
        let stack = LayerStack::new(
            m::glass(),
            vec![
                Layer::new(m::zns(), 30.0).unwrap(),
                Layer::new(m::gold(), 30.0).unwrap(),
                Layer::new(m::zns(), 50.0).unwrap(),
                Layer::new(m::gold(), 30.0).unwrap(),
            ],
            m::air(),
        );
        let profile = stack.profile(780.0).unwrap();
        for pol in [Polarization::S, Polarization::P] {
            for s in [0.1, 0.8, 1.7, 6.0] {
                let kappa2 = profile.eps[0] * s * s;
                let full = composite(&profile, 0, 5, kappa2, pol);
                // Split inside layer 2 (media index 2..3 boundary is an
                // interface; instead split at the layer-3 interface chain):
                let lower = composite(&profile, 0, 3, kappa2, pol);
                let upper = composite(&profile, 3, 5, kappa2, pol);
                let joined = lower
                    .star(SMatrix::propagation(profile.q(3, kappa2), profile.k0, profile.d[2]))
                    .star(upper);
                assert!((full.rf - joined.rf).norm() < 1e-12);
                assert!((full.tf - joined.tf).norm() < 1e-12);
                assert!((full.rb - joined.rb).norm() < 1e-12);
                assert!((full.tb - joined.tb).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn reciprocity_flux_normalized_transmission() {
        let stack = LayerStack::new(
            m::glass(),
            vec![
                Layer::new(m::zns(), 45.0).unwrap(),
                Layer::new(m::gold(), 25.0).unwrap(),
                Layer::new(m::pva(), 70.0).unwrap(),
            ],
            m::air(),
        );
        let profile = stack.profile(850.0).unwrap();
        let last = profile.eps.len() - 1;
        for pol in [Polarization::S, Polarization::P] {
            for s in [0.1, 0.35, 0.6] {
                let kappa2 = profile.eps[0] * s * s;
                let sm = composite(&profile, 0, last, kappa2, pol);
                let f0 = flux_factor(profile.q(0, kappa2), profile.eps[0], pol);
                let fl = flux_factor(profile.q(last, kappa2), profile.eps[last], pol);
                let tf = sm.tf * Complex64::new((fl / f0).sqrt(), 0.0);
                let tb = sm.tb * Complex64::new((f0 / fl).sqrt(), 0.0);
                assert!((tf - tb).norm() < 1e-9, "{pol:?} s={s}: {tf} vs {tb}");
            }
        }
    }

    #[test]
    fn stable_at_large_s() {
        let stack = LayerStack::preset(Preset::AuZns);
        for s in [10.0, 100.0, 1000.0] {
            let r = half_space_response(&stack, LayerRef::Layer(2), Side::Up, 900.0, s).unwrap();
            for v in [r.r_s, r.r_p, r.t_s, r.t_p] {
                assert!(v.is_finite(), "s = {s}: {v}");
            }
        }
    }

    #[test]
    fn presets_have_expected_shape() {
        let s = LayerStack::preset(Preset::AuZns);
        assert_eq!(s.layers().len(), 5);
        assert_eq!(s.layers()[2].thickness_nm, 50.0);
        assert_eq!(s.layers()[1].material.name(), "gold");
        assert_eq!(s.layers()[2].material.name(), "zns");
        let c = LayerStack::preset(Preset::Coverslip);
        assert!(c.layers().is_empty());
    }

    #[test]
    fn zero_thickness_layer_rejected() {
        assert!(Layer::new(m::zns(), 0.0).is_err());
        assert!(Layer::new(m::zns(), -5.0).is_err());
        assert!(Layer::new(m::zns(), f64::INFINITY).is_err());
    }

    proptest! {
        #[test]
        fn lossless_substack_reflection_bounded(s in 0.0f64..0.99, d1 in 10.0f64..200.0, d2 in 10.0f64..200.0) {
            let stack = LayerStack::new(
                m::glass(),
                vec![Layer::new(m::zns(), d1).unwrap(), Layer::new(m::pva(), d2).unwrap()],
                m::air(),
            );
            let r = half_space_response(&stack, LayerRef::LowerCladding, Side::Up, 900.0, s).unwrap();
            prop_assert!(r.r_s.norm_sqr() <= 1.0 + 1e-9);
            prop_assert!(r.r_p.norm_sqr() <= 1.0 + 1e-9);
        }

        #[test]
        fn response_finite_for_any_s(s in 0.0f64..50.0) {
            let stack = LayerStack::preset(Preset::AuPvaZns);
            let r = half_space_response(&stack, LayerRef::Layer(2), Side::Down, 750.0, s).unwrap();
            prop_assert!(r.r_s.is_finite() && r.r_p.is_finite());
            prop_assert!(r.t_s.is_finite() && r.t_p.is_finite());
        }
    }
}
