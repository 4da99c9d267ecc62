//! JSON run configuration: schema, validation, canonical serialization,
//! and resolution into solver inputs.
//!
//! Configs validate fully before any computation: unknown keys are
//! rejected, referenced material tables must exist and parse, and every
//! numeric field is range-checked with its JSON path named in the error.
//! Canonical serialization (sorted keys, shortest round-trip float
//! formatting) makes reproducibility testable: parse → emit → parse is the
//! identity.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::{self, Material, MaterialModel};
use crate::stack::{Layer, LayerRef, LayerStack, Preset, Side};
use crate::emission::DipoleSource;

/// Environment variable consulted when resolving material table paths.
pub const MATERIALS_DIR_ENV: &str = "STRATA_MATERIALS_DIR";

/// Filesystem context for resolving relative paths in a config.
#[derive(Debug, Clone)]
pub struct ConfigContext {
    /// Directory of the config file (or the working directory).
    pub base_dir: PathBuf,
}

impl Default for ConfigContext {
    fn default() -> Self {
        Self {
            base_dir: PathBuf::from("."),
        }
    }
}

/// Top-level run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub materials: Vec<MaterialDef>,
    pub stack: StackConfig,
    pub dipole: DipoleConfig,
    #[serde(default)]
    pub collection: CollectionConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emt: Option<EmtConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// User-defined material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialDef {
    pub name: String,
    pub model: ModelDef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelDef {
    Constant {
        n: f64,
        #[serde(default)]
        k: f64,
    },
    Sellmeier {
        b: Vec<f64>,
        c_um2: Vec<f64>,
        band_nm: (f64, f64),
    },
    Drude {
        plasma_energy_ev: f64,
        damping_energy_ev: f64,
        band_nm: (f64, f64),
    },
    /// CSV table reference; resolved against the config directory, then
    /// `STRATA_MATERIALS_DIR`.
    Table { path: String },
}

/// Stack: either a named preset or an explicit cladding/layer list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_cladding: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<Vec<LayerConfig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_cladding: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerConfig {
    pub material: String,
    pub thickness_nm: f64,
}

/// Dipole host reference: a 0-based layer index or `"lower"`/`"upper"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HostRef {
    Index(usize),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DipoleConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<BandConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub host_layer: Option<HostRef>,
    #[serde(default)]
    pub theta_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandConfig {
    pub min_nm: f64,
    pub max_nm: f64,
    /// Sample count; defaults to 2 nm steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl BandConfig {
    pub fn n_points(&self) -> usize {
        self.n
            .unwrap_or_else(|| (((self.max_nm - self.min_nm) / 2.0).round() as usize + 1).max(2))
    }

    pub fn wavelengths(&self) -> Vec<f64> {
        let n = self.n_points();
        if n == 1 {
            return vec![self.min_nm];
        }
        let step = (self.max_nm - self.min_nm) / (n - 1) as f64;
        (0..n).map(|i| self.min_nm + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectionConfig {
    #[serde(default = "default_na")]
    pub na: f64,
    #[serde(default = "default_side")]
    pub side: Side,
}

fn default_na() -> f64 {
    0.95
}

fn default_side() -> Side {
    Side::Up
}

impl Default for CollectionConfig {
    fn default() -> Self {
        Self {
            na: default_na(),
            side: default_side(),
        }
    }
}

/// Metal/dielectric unit cell for effective-medium analysis. When absent,
/// the pair is derived from the stack (first metallic and first dielectric
/// layer).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmtConfig {
    pub metal: String,
    pub dielectric: String,
    pub d_metal_nm: f64,
    pub d_dielectric_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameters: Vec<SweepParamConfig>,
    pub objective: ObjectiveConfig,
    #[serde(default = "default_grid_cap")]
    pub max_grid_points: usize,
}

fn default_grid_cap() -> usize {
    1_000_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParamConfig {
    /// Dotted path into this config, e.g. `stack.layers[2].thickness_nm`.
    pub path: String,
    pub min: f64,
    pub max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveConfig {
    pub metric: MetricName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<BandConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    FpPerp,
    Qe,
    CeTot,
    Cpr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: String,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
}

fn default_out_dir() -> String {
    "out".to_string()
}

fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_out_dir(),
            format: default_format(),
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing and validation
// ---------------------------------------------------------------------------

/// Parse and fully validate a JSON config. Defaults are filled, unknown
/// keys rejected, referenced files checked, and the stack/dipole geometry
/// resolved once to surface every semantic error up front.
pub fn parse_config(text: &str, ctx: &ConfigContext) -> Result<RunConfig> {
    let config: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config {
        path: format!("<json:{}:{}>", e.line(), e.column()),
        message: e.to_string(),
    })?;
    config.scenario(ctx)?;
    Ok(config)
}

/// Canonical JSON: sorted keys, stable shortest-round-trip floats.
pub fn canonical_json(config: &RunConfig) -> String {
    // serde_json maps are BTreeMaps, so Value round-tripping sorts keys.
    let value = serde_json::to_value(config).expect("config serializes");
    serde_json::to_string_pretty(&value).expect("value prints")
}

/// Fully resolved solver inputs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub stack: LayerStack,
    /// Dipole at the primary wavelength (explicit `wavelength_nm`, else the
    /// band lower edge).
    pub dipole: DipoleSource,
    pub band: Option<BandConfig>,
    pub na: f64,
    pub side: Side,
    pub emt: Option<EmtScenario>,
}

#[derive(Debug, Clone)]
pub struct EmtScenario {
    pub metal: Material,
    pub dielectric: Material,
    pub d_metal_nm: f64,
    pub d_dielectric_nm: f64,
}

impl Scenario {
    /// All wavelengths this run evaluates (band grid or the single value).
    pub fn wavelengths(&self) -> Vec<f64> {
        match &self.band {
            Some(b) => b.wavelengths(),
            None => vec![self.dipole.wavelength_nm],
        }
    }
}

impl RunConfig {
    /// Resolve into solver inputs, validating everything on the way.
    pub fn scenario(&self, ctx: &ConfigContext) -> Result<Scenario> {
        let registry = self.material_registry(ctx)?;
        let stack = self.build_stack(&registry)?;

        // Dipole wavelength or band.
        if self.dipole.wavelength_nm.is_none() && self.dipole.band.is_none() {
            return Err(Error::Config {
                path: "dipole".into(),
                message: "either `wavelength_nm` or `band` is required".into(),
            });
        }
        if let Some(lam) = self.dipole.wavelength_nm {
            if !(lam.is_finite() && lam > 0.0) {
                return Err(Error::Config {
                    path: "dipole.wavelength_nm".into(),
                    message: format!("must be positive and finite, got {lam}"),
                });
            }
        }
        if let Some(band) = &self.dipole.band {
            validate_band(band, "dipole.band")?;
        }
        if !(0.0..=90.0).contains(&self.dipole.theta_deg) {
            return Err(Error::Config {
                path: "dipole.theta_deg".into(),
                message: format!("must lie in [0, 90], got {}", self.dipole.theta_deg),
            });
        }

        let host = match &self.dipole.host_layer {
            None => {
                if stack.layers().is_empty() {
                    LayerRef::UpperCladding
                } else {
                    LayerRef::Layer(stack.layers().len() / 2)
                }
            }
            Some(HostRef::Index(i)) => {
                if *i >= stack.layers().len() {
                    return Err(Error::Config {
                        path: "dipole.host_layer".into(),
                        message: format!(
                            "layer index {i} out of range (stack has {} layers)",
                            stack.layers().len()
                        ),
                    });
                }
                LayerRef::Layer(*i)
            }
            Some(HostRef::Named(name)) => match name.as_str() {
                "lower" => LayerRef::LowerCladding,
                "upper" => LayerRef::UpperCladding,
                other => {
                    return Err(Error::Config {
                        path: "dipole.host_layer".into(),
                        message: format!(
                            "expected a layer index, \"lower\" or \"upper\", got \"{other}\""
                        ),
                    })
                }
            },
        };
        let z_nm = self.dipole.z_nm.unwrap_or(match host {
            LayerRef::Layer(i) => stack.layers()[i].thickness_nm / 2.0,
            _ => 20.0,
        });
        let lambda = self
            .dipole
            .wavelength_nm
            .unwrap_or_else(|| self.dipole.band.as_ref().unwrap().min_nm);
        let dipole = DipoleSource::new(lambda, host, z_nm, self.dipole.theta_deg);

        if !(self.collection.na > 0.0 && self.collection.na.is_finite()) {
            return Err(Error::Config {
                path: "collection.na".into(),
                message: format!("numerical aperture must be positive, got {}", self.collection.na),
            });
        }

        if let Some(sweep) = &self.sweep {
            validate_sweep(sweep)?;
        }

        let emt = self.resolve_emt(&registry, &stack, lambda)?;

        Ok(Scenario {
            stack,
            dipole,
            band: self.dipole.band,
            na: self.collection.na,
            side: self.collection.side,
            emt,
        })
    }

    /// Built-in materials plus user definitions (user names shadow
    /// built-ins).
    fn material_registry(&self, ctx: &ConfigContext) -> Result<BTreeMap<String, Material>> {
        let mut registry = BTreeMap::new();
        for (i, def) in self.materials.iter().enumerate() {
            let name = def.name.to_ascii_lowercase();
            let material = match &def.model {
                ModelDef::Constant { n, k } => Material::constant_index(name.clone(), *n, *k)
                    .map_err(|e| Error::Config {
                        path: format!("materials[{i}]"),
                        message: e.to_string(),
                    })?,
                ModelDef::Sellmeier { b, c_um2, band_nm } => Material::from_model(
                    name.clone(),
                    MaterialModel::Sellmeier {
                        b: b.clone(),
                        c_um2: c_um2.clone(),
                        band_nm: *band_nm,
                    },
                )
                .map_err(|e| Error::Config {
                    path: format!("materials[{i}]"),
                    message: e.to_string(),
                })?,
                ModelDef::Drude {
                    plasma_energy_ev,
                    damping_energy_ev,
                    band_nm,
                } => Material::from_model(
                    name.clone(),
                    MaterialModel::Drude {
                        plasma_energy_ev: *plasma_energy_ev,
                        damping_energy_ev: *damping_energy_ev,
                        band_nm: *band_nm,
                    },
                )
                .map_err(|e| Error::Config {
                    path: format!("materials[{i}]"),
                    message: e.to_string(),
                })?,
                ModelDef::Table { path } => {
                    let resolved = resolve_table_path(path, ctx)?;
                    let mut material = materials::ingest_nk_table(&resolved)?;
                    material = Material::from_model(name.clone(), material.model().clone())?;
                    material
                }
            };
            registry.insert(name, material);
        }
        Ok(registry)
    }

    fn lookup_material(
        &self,
        registry: &BTreeMap<String, Material>,
        name: &str,
    ) -> Result<Material> {
        let key = name.to_ascii_lowercase();
        if let Some(m) = registry.get(&key) {
            return Ok(m.clone());
        }
        if let Some(m) = materials::builtin::by_name(&key) {
            return Ok(m);
        }
        let mut known: Vec<String> = materials::builtin::KNOWN_NAMES
            .iter()
            .map(|s| s.to_string())
            .chain(registry.keys().cloned())
            .collect();
        known.sort();
        known.dedup();
        Err(Error::UnknownMaterial {
            name: name.to_string(),
            known: known.join(", "),
        })
    }

    fn build_stack(&self, registry: &BTreeMap<String, Material>) -> Result<LayerStack> {
        let s = &self.stack;
        match (&s.preset, &s.lower_cladding, &s.layers, &s.upper_cladding) {
            (Some(p), None, None, None) => Ok(LayerStack::preset(*p)),
            (None, Some(lower), Some(layers), Some(upper)) => {
                let lower = self.lookup_material(registry, lower)?;
                let upper = self.lookup_material(registry, upper)?;
                let mut built = Vec::with_capacity(layers.len());
                for (i, layer) in layers.iter().enumerate() {
                    if !(layer.thickness_nm.is_finite() && layer.thickness_nm > 0.0) {
                        return Err(Error::Config {
                            path: format!("stack.layers[{i}].thickness_nm"),
                            message: format!(
                                "thickness must be positive and finite, got {}",
                                layer.thickness_nm
                            ),
                        });
                    }
                    let material = self.lookup_material(registry, &layer.material)?;
                    built.push(Layer::new(material, layer.thickness_nm).map_err(|e| {
                        Error::Config {
                            path: format!("stack.layers[{i}]"),
                            message: e.to_string(),
                        }
                    })?);
                }
                Ok(LayerStack::new(lower, built, upper))
            }
            _ => Err(Error::Config {
                path: "stack".into(),
                message: "specify either `preset` alone, or all of `lower_cladding`, `layers`, `upper_cladding`".into(),
            }),
        }
    }

    fn resolve_emt(
        &self,
        registry: &BTreeMap<String, Material>,
        stack: &LayerStack,
        lambda_ref: f64,
    ) -> Result<Option<EmtScenario>> {
        if let Some(emt) = &self.emt {
            if emt.d_metal_nm < 0.0 || emt.d_dielectric_nm < 0.0 {
                return Err(Error::Config {
                    path: "emt".into(),
                    message: "unit-cell thicknesses must be nonnegative".into(),
                });
            }
            return Ok(Some(EmtScenario {
                metal: self.lookup_material(registry, &emt.metal)?,
                dielectric: self.lookup_material(registry, &emt.dielectric)?,
                d_metal_nm: emt.d_metal_nm,
                d_dielectric_nm: emt.d_dielectric_nm,
            }));
        }
        // Derive from the stack: first metallic and first dielectric layer.
        let mut metal = None;
        let mut dielectric = None;
        for layer in stack.layers() {
            if let Ok(eps) = layer.material.permittivity(lambda_ref) {
                if eps.eps.re < 0.0 && metal.is_none() {
                    metal = Some((layer.material.clone(), layer.thickness_nm));
                } else if eps.eps.re > 0.0 && dielectric.is_none() {
                    dielectric = Some((layer.material.clone(), layer.thickness_nm));
                }
            }
        }
        Ok(match (metal, dielectric) {
            (Some((m, dm)), Some((d, dd))) => Some(EmtScenario {
                metal: m,
                dielectric: d,
                d_metal_nm: dm,
                d_dielectric_nm: dd,
            }),
            _ => None,
        })
    }
}

fn validate_band(band: &BandConfig, path: &str) -> Result<()> {
    if !(band.min_nm.is_finite() && band.max_nm.is_finite() && band.min_nm > 0.0) {
        return Err(Error::Config {
            path: path.into(),
            message: format!("band edges must be positive and finite, got [{}, {}]", band.min_nm, band.max_nm),
        });
    }
    if band.min_nm >= band.max_nm {
        return Err(Error::Config {
            path: path.into(),
            message: format!("band must satisfy min < max, got [{}, {}]", band.min_nm, band.max_nm),
        });
    }
    if let Some(n) = band.n {
        if n < 1 {
            return Err(Error::Config {
                path: format!("{path}.n"),
                message: "needs at least 1 sample".into(),
            });
        }
    }
    Ok(())
}

fn validate_sweep(sweep: &SweepConfig) -> Result<()> {
    if sweep.parameters.is_empty() {
        return Err(Error::Config {
            path: "sweep.parameters".into(),
            message: "at least one parameter axis is required".into(),
        });
    }
    let mut grid: usize = 1;
    for (i, p) in sweep.parameters.iter().enumerate() {
        if p.n_points < 1 {
            return Err(Error::Config {
                path: format!("sweep.parameters[{i}].n_points"),
                message: "needs at least 1 point".into(),
            });
        }
        if !(p.min.is_finite() && p.max.is_finite()) || p.min > p.max {
            return Err(Error::Config {
                path: format!("sweep.parameters[{i}]"),
                message: format!("range must satisfy min <= max, got [{}, {}]", p.min, p.max),
            });
        }
        grid = grid.saturating_mul(p.n_points);
    }
    if grid > sweep.max_grid_points {
        return Err(Error::Config {
            path: "sweep".into(),
            message: format!(
                "grid has {grid} points, exceeding the cap of {}",
                sweep.max_grid_points
            ),
        });
    }
    if sweep.objective.wavelength_nm.is_none() && sweep.objective.band.is_none() {
        return Err(Error::Config {
            path: "sweep.objective".into(),
            message: "either `wavelength_nm` or `band` is required".into(),
        });
    }
    if let Some(band) = &sweep.objective.band {
        validate_band(band, "sweep.objective.band")?;
    }
    Ok(())
}

/// Resolve a material table path: absolute as-is, else relative to the
/// config directory, else `STRATA_MATERIALS_DIR`.
pub fn resolve_table_path(path: &str, ctx: &ConfigContext) -> Result<PathBuf> {
    let p = Path::new(path);
    if p.is_absolute() {
        if p.exists() {
            return Ok(p.to_path_buf());
        }
        return Err(Error::Config {
            path: "materials".into(),
            message: format!("table file not found: {path}"),
        });
    }
    let local = ctx.base_dir.join(p);
    if local.exists() {
        return Ok(local);
    }
    if let Ok(dir) = std::env::var(MATERIALS_DIR_ENV) {
        let env_path = Path::new(&dir).join(p);
        if env_path.exists() {
            return Ok(env_path);
        }
    }
    Err(Error::Config {
        path: "materials".into(),
        message: format!(
            "table file not found: {path} (searched {} and ${MATERIALS_DIR_ENV})",
            ctx.base_dir.display()
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ConfigContext {
        ConfigContext::default()
    }

    #[test]
    fn minimal_preset_config_fills_defaults() {
        let text = r#"{
            "stack": {"preset": "au-zns"},
            "dipole": {"wavelength_nm": 900.0, "theta_deg": 0.0}
        }"#;
        let config = parse_config(text, &ctx()).unwrap();
        let scenario = config.scenario(&ctx()).unwrap();
        assert_eq!(scenario.na, 0.95);
        assert_eq!(scenario.side, Side::Up);
        assert_eq!(scenario.dipole.host_layer, LayerRef::Layer(2));
        assert_eq!(scenario.dipole.z_nm, 25.0);
        assert_eq!(config.output.format, OutputFormat::Csv);
        // EMT pair derived from the preset: gold + zns at 30/30.
        let emt = scenario.emt.unwrap();
        assert_eq!(emt.metal.name(), "gold");
        assert_eq!(emt.dielectric.name(), "zns");
        assert_eq!(emt.d_metal_nm, 30.0);
        assert_eq!(emt.d_dielectric_nm, 30.0);
    }

    #[test]
    fn negative_thickness_names_json_path() {
        let text = r#"{
            "stack": {"lower_cladding": "glass", "layers": [
                {"material": "zns", "thickness_nm": 30.0},
                {"material": "gold", "thickness_nm": -5.0}
            ], "upper_cladding": "air"},
            "dipole": {"wavelength_nm": 900.0}
        }"#;
        let err = parse_config(text, &ctx()).unwrap_err();
        assert!(
            err.to_string().contains("stack.layers[1].thickness_nm"),
            "{err}"
        );
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{
            "stack": {"preset": "au-zns"},
            "dipole": {"wavelength_nm": 900.0},
            "typo_field": 1
        }"#;
        assert!(parse_config(text, &ctx()).is_err());
    }

    #[test]
    fn unknown_material_lists_known_names() {
        let text = r#"{
            "stack": {"lower_cladding": "glass", "layers": [
                {"material": "unobtainium", "thickness_nm": 30.0}
            ], "upper_cladding": "air"},
            "dipole": {"wavelength_nm": 900.0}
        }"#;
        let err = parse_config(text, &ctx()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("unobtainium") && msg.contains("zns") && msg.contains("gold"), "{msg}");
    }

    #[test]
    fn canonical_round_trip_is_identity() {
        let text = r#"{
            "stack": {"preset": "au-pva-zns"},
            "dipole": {"band": {"min_nm": 650.0, "max_nm": 1000.0}, "theta_deg": 45.0},
            "collection": {"na": 0.9, "side": "down"},
            "sweep": {
                "parameters": [{"path": "stack.layers[2].thickness_nm", "min": 30.0, "max": 80.0, "n_points": 11}],
                "objective": {"metric": "fp_perp", "wavelength_nm": 900.0}
            }
        }"#;
        let config = parse_config(text, &ctx()).unwrap();
        let canon = canonical_json(&config);
        let reparsed = parse_config(&canon, &ctx()).unwrap();
        assert_eq!(config, reparsed);
        assert_eq!(canon, canonical_json(&reparsed));
    }

    #[test]
    fn missing_table_file_is_config_error() {
        let text = r#"{
            "materials": [{"name": "mystery", "model": {"type": "table", "path": "does_not_exist.csv"}}],
            "stack": {"preset": "au-zns"},
            "dipole": {"wavelength_nm": 900.0}
        }"#;
        let err = parse_config(text, &ctx()).unwrap_err();
        assert!(err.to_string().contains("does_not_exist.csv"), "{err}");
    }

    #[test]
    fn band_defaults_to_2nm_steps() {
        let band = BandConfig {
            min_nm: 650.0,
            max_nm: 1000.0,
            n: None,
        };
        assert_eq!(band.n_points(), 176);
        let grid = band.wavelengths();
        assert_eq!(grid.len(), 176);
        assert!((grid[1] - grid[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_preset_and_explicit_rejected() {
        let text = r#"{
            "stack": {"preset": "au-zns", "lower_cladding": "glass"},
            "dipole": {"wavelength_nm": 900.0}
        }"#;
        let err = parse_config(text, &ctx()).unwrap_err();
        assert!(err.to_string().contains("preset"), "{err}");
    }

    #[test]
    fn inline_constant_material_usable_in_stack() {
        let text = r#"{
            "materials": [{"name": "hi_index", "model": {"type": "constant", "n": 3.0}}],
            "stack": {"lower_cladding": "glass", "layers": [
                {"material": "hi_index", "thickness_nm": 40.0}
            ], "upper_cladding": "air"},
            "dipole": {"wavelength_nm": 900.0, "host_layer": 0}
        }"#;
        let config = parse_config(text, &ctx()).unwrap();
        let scenario = config.scenario(&ctx()).unwrap();
        let eps = scenario.stack.layers()[0].material.permittivity(900.0).unwrap().eps;
        assert!((eps.re - 9.0).abs() < 1e-12);
    }
}
