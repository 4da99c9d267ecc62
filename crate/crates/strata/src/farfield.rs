//! Far-field angular patterns in the claddings, quantum efficiency,
//! collection efficiency within a numerical aperture, and the collected
//! photon rate figure of merit.
//!
//! The pattern `p(theta)` is phi-integrated power density in vacuum-rate
//! units, normalized so that `int p(theta) sin(theta) dtheta` over both
//! sides equals `QE * gamma_theta`. It is assembled from the source-to-
//! cladding transmissions of the stack evaluated at
//! `s = (n_clad / n_host) sin(theta)`, with the same cavity denominators as
//! the dissipation kernels; dipole orientation enters through
//! `cos^2/sin^2` weights.
//!
//! The collected photon rate is factored as `cpr = fp * qe * ce_rad` so
//! absorption is never double counted: `qe` is far-field power over total
//! dissipation and `ce_rad` is the collected fraction of the far field.
//! The product `qe * ce_rad` is exposed as `ce_tot`.

use rayon::prelude::*;

use crate::emission::{purcell, DipoleSource, Engine};
use crate::error::{Error, Result};
use crate::stack::{LayerStack, Side};

/// Default polar grid for emitted patterns: 0.25 degree steps from 0 to 90.
pub const DEFAULT_N_THETA: usize = 361;

/// Internal grid for energy integrals (0.05 degree). The patterns carry
/// square-root cusps at the light lines; 0.25 degree trapezoids leave an
/// error of order 1e-3 there, which would eat the whole energy budget.
const INTEGRATION_N_THETA: usize = 1801;

/// Phi-integrated far-field power density on one side.
#[derive(Debug, Clone)]
pub struct AngularPattern {
    pub side: Side,
    /// `(theta_deg, p)` samples on [0, 90].
    pub samples: Vec<(f64, f64)>,
}

impl AngularPattern {
    /// `int p(theta) sin(theta) dtheta` over the full half-space
    /// (trapezoidal).
    pub fn radiated_power(&self) -> f64 {
        integrate_weighted(&self.samples, 90.0)
    }

    /// Same integral truncated at `theta_max_deg`, with linear
    /// interpolation of the last partial cell.
    pub fn radiated_power_within(&self, theta_max_deg: f64) -> f64 {
        integrate_weighted(&self.samples, theta_max_deg)
    }

    /// Sample with the largest power density.
    pub fn peak(&self) -> (f64, f64) {
        self.samples
            .iter()
            .copied()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap_or((0.0, 0.0))
    }
}

fn integrate_weighted(samples: &[(f64, f64)], theta_max_deg: f64) -> f64 {
    let mut total = 0.0;
    for w in samples.windows(2) {
        let (t0, p0) = w[0];
        let (t1, p1) = w[1];
        if t0 >= theta_max_deg {
            break;
        }
        let f0 = p0 * t0.to_radians().sin();
        if t1 <= theta_max_deg {
            let f1 = p1 * t1.to_radians().sin();
            total += 0.5 * (f0 + f1) * (t1 - t0).to_radians();
        } else {
            // Partial cell up to theta_max.
            let frac = (theta_max_deg - t0) / (t1 - t0);
            let pm = p0 + frac * (p1 - p0);
            let fm = pm * theta_max_deg.to_radians().sin();
            total += 0.5 * (f0 + fm) * (theta_max_deg - t0).to_radians();
            break;
        }
    }
    total
}

/// Collection figures at one wavelength.
#[derive(Debug, Clone, Copy)]
pub struct CollectionResult {
    /// Purcell factor for the requested orientation.
    pub fp: f64,
    /// Far-field radiated power over total dissipated power, clamped to
    /// [0, 1] (quadrature can overshoot by less than the energy tolerance).
    pub qe: f64,
    /// Collected fraction of the total far field, in [0, 1].
    pub ce_rad: f64,
    /// `qe * ce_rad`.
    pub ce_tot: f64,
    /// `fp * qe * ce_rad`, in vacuum-rate units.
    pub cpr: f64,
    pub na: f64,
    pub theta_max_deg: f64,
}

/// One row of a collected-photon-rate spectrum; per-wavelength failures are
/// kept and flagged rather than dropped.
#[derive(Debug)]
pub struct CprSample {
    pub wavelength_nm: f64,
    pub result: Result<CollectionResult>,
}

fn lossless_cladding_index(engine: &Engine, side: Side) -> Result<f64> {
    let eps = engine.cladding_eps(side);
    if eps.re <= 0.0 || eps.im > 1e-9 {
        return Err(Error::Domain(format!(
            "the {side:?} cladding is absorbing (eps = {eps}); far fields are undefined there"
        )));
    }
    Ok(eps.re.sqrt())
}

/// Far-field power density `p(theta)` in the chosen (lossless) cladding on
/// a uniform polar grid of `n_theta` points.
pub fn angular_pattern(
    stack: &LayerStack,
    dipole: &DipoleSource,
    side: Side,
    n_theta: usize,
) -> Result<AngularPattern> {
    if n_theta < 2 {
        return Err(Error::Domain(format!(
            "angular pattern needs at least 2 polar samples, got {n_theta}"
        )));
    }
    let engine = Engine::new(stack, dipole)?;
    let pattern = pattern_with_engine(&engine, dipole, side, n_theta)?;
    Ok(pattern)
}

fn pattern_with_engine(
    engine: &Engine,
    dipole: &DipoleSource,
    side: Side,
    n_theta: usize,
) -> Result<AngularPattern> {
    let n_clad = lossless_cladding_index(engine, side)?;
    let ratio = n_clad / engine.n_host;
    let (c2, s2) = dipole.orientation_weights();
    let step = 90.0 / (n_theta - 1) as f64;
    let samples = (0..n_theta)
        .map(|i| {
            let theta_deg = step * i as f64;
            // Evaluate strictly inside the grazing edge: exactly 90 deg is
            // a 0*inf limit, and sin/cos of the same clamped angle keep the
            // cancellation between cos(theta) and 1/s_z consistent.
            let theta = theta_deg.min(90.0 - 1e-3).to_radians();
            let mut s = ratio * theta.sin();
            if (1.0 - s * s).abs() < 1e-13 {
                s -= 1e-9; // dodge an exact host-light-line collision
            }
            let (g_perp, g_par) = engine.outgoing_density(s, side);
            let p = engine.n_host * ratio * ratio * theta.cos() * (c2 * g_perp + s2 * g_par);
            (theta_deg, p.max(0.0))
        })
        .collect();
    Ok(AngularPattern { side, samples })
}

/// Far-field radiated power over total dissipated power. Requires both
/// claddings lossless (energy reaching them is the only far field).
pub fn quantum_efficiency(stack: &LayerStack, dipole: &DipoleSource) -> Result<f64> {
    let engine = Engine::new(stack, dipole)?;
    let up = pattern_with_engine(&engine, dipole, Side::Up, INTEGRATION_N_THETA)?;
    let dn = pattern_with_engine(&engine, dipole, Side::Down, INTEGRATION_N_THETA)?;
    let gamma = purcell(stack, dipole)?.gamma_theta;
    Ok((up.radiated_power() + dn.radiated_power()) / gamma)
}

/// Collection within a numerical aperture on one side.
///
/// `theta_max = arcsin(na / n_clad)` in the collection medium; `na` must
/// not exceed the cladding light line.
pub fn collection(
    stack: &LayerStack,
    dipole: &DipoleSource,
    na: f64,
    side: Side,
) -> Result<CollectionResult> {
    let engine = Engine::new(stack, dipole)?;
    let n_coll = lossless_cladding_index(&engine, side)?;
    if !(na > 0.0) || !na.is_finite() {
        return Err(Error::Domain(format!(
            "numerical aperture must be positive, got {na}"
        )));
    }
    if na > n_coll {
        return Err(Error::Domain(format!(
            "numerical aperture {na} exceeds the light line of the collection cladding (n = {n_coll})"
        )));
    }
    let theta_max_deg = (na / n_coll).asin().to_degrees();

    let up = pattern_with_engine(&engine, dipole, Side::Up, INTEGRATION_N_THETA)?;
    let dn = pattern_with_engine(&engine, dipole, Side::Down, INTEGRATION_N_THETA)?;
    let p_up = up.radiated_power();
    let p_dn = dn.radiated_power();
    let total_far = p_up + p_dn;

    let rates = purcell(stack, dipole)?;
    let fp = rates.gamma_theta;
    let qe = (total_far / fp).clamp(0.0, 1.0);

    let collected = match side {
        Side::Up => up.radiated_power_within(theta_max_deg),
        Side::Down => dn.radiated_power_within(theta_max_deg),
    };
    let ce_rad = if total_far > 0.0 {
        (collected / total_far).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let ce_tot = qe * ce_rad;
    Ok(CollectionResult {
        fp,
        qe,
        ce_rad,
        ce_tot,
        cpr: fp * ce_tot,
        na,
        theta_max_deg,
    })
}

/// Collection figures across a wavelength band (inclusive uniform grid).
/// Per-wavelength errors are returned in place.
pub fn cpr_spectrum(
    stack: &LayerStack,
    dipole_template: &DipoleSource,
    lambda_min_nm: f64,
    lambda_max_nm: f64,
    n: usize,
    na: f64,
    side: Side,
) -> Result<Vec<CprSample>> {
    if n == 0 {
        return Err(Error::Domain("spectrum needs at least one sample".into()));
    }
    if n > 1 && lambda_min_nm >= lambda_max_nm {
        return Err(Error::Domain(format!(
            "band must satisfy min < max, got [{lambda_min_nm}, {lambda_max_nm}]"
        )));
    }
    let lambdas: Vec<f64> = if n == 1 {
        vec![lambda_min_nm]
    } else {
        let step = (lambda_max_nm - lambda_min_nm) / (n - 1) as f64;
        (0..n).map(|i| lambda_min_nm + step * i as f64).collect()
    };
    Ok(lambdas
        .into_par_iter()
        .map(|lam| {
            let mut dipole = *dipole_template;
            dipole.wavelength_nm = lam;
            CprSample {
                wavelength_nm: lam,
                result: collection(stack, &dipole, na, side),
            }
        })
        .collect())
}
