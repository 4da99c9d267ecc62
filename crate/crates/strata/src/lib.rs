//! Semi-analytic solver for spontaneous-emission engineering in planar
//! metal/dielectric multilayers.
//!
//! A point dipole embedded in a layered stack is expanded in plane waves;
//! scattering-matrix recursion gives the generalized reflections of the two
//! half-spaces, and adaptive integration of the resulting dissipation
//! kernels yields the Purcell factor, the wavevector-resolved power
//! spectrum, far-field patterns in the claddings, quantum and collection
//! efficiency, and the collected-photon-rate figure of merit. An
//! effective-medium module classifies metal/dielectric unit cells as
//! hyperbolic, and a deterministic sweep harness drives design scans over
//! any config parameter.
//!
//! # Quick start
//!
//! ```
//! use strata::{purcell, DipoleSource, LayerRef, LayerStack, Preset};
//!
//! let stack = LayerStack::preset(Preset::AuZns);
//! let dipole = DipoleSource::new(900.0, LayerRef::Layer(2), 25.0, 0.0);
//! let rates = purcell(&stack, &dipole).unwrap();
//! assert!(rates.gamma_perp > 1.0);
//! ```
//!
//! The `examples/` directory holds one runnable program per capability
//! (`cargo run --release --example purcell_spectrum`, ...); the `strata`
//! binary exposes the same operations as subcommands driven by a JSON
//! config.

pub mod config;
pub mod emission;
pub mod emt;
pub mod error;
pub mod farfield;
pub mod materials;
pub mod quad;
pub mod runner;
pub mod stack;
pub mod sweep;

pub use config::{canonical_json, parse_config, ConfigContext, OutputFormat, RunConfig};
pub use emission::{
    coverslip_reference, decay_split, dissipation_spectrum, position_sweep, purcell,
    purcell_with_tolerance, relative_rate, DecayRates, DecaySplit, DipoleSource,
    DissipationSpectrum, SamplingSpec,
};
pub use emt::{
    dispersion_residual, effective_permittivity, hyperbolicity_band, iso_frequency_k_perp,
    EffectivePermittivity, IsoFrequencyPoint,
};
pub use error::{Error, Result};
pub use farfield::{
    angular_pattern, collection, cpr_spectrum, quantum_efficiency, AngularPattern,
    CollectionResult, CprSample,
};
pub use materials::{
    builtin, ingest_nk_table, parse_nk_table, ComplexPermittivity, Material, MaterialModel,
};
pub use stack::{
    fresnel, half_space_response, HalfSpaceResponse, Layer, LayerRef, LayerStack, Polarization,
    Preset, Side,
};
pub use sweep::{band_average, run_sweep, SweepResult, SweepRow};
