//! Deterministic full-factorial parameter sweeps over config fields.
//!
//! Objectives are cheap and multimodal (stacked Fabry-Perot resonances),
//! so the harness evaluates exhaustive grids rather than running a local
//! optimizer: identical config and spec give bitwise-identical results for
//! any worker count, with row order fixed by the grid (last axis fastest)
//! and argmax ties broken toward the lexicographically smallest parameter
//! tuple.

use rayon::prelude::*;

use crate::config::{BandConfig, ConfigContext, MetricName, RunConfig, SweepConfig};
use crate::emission::purcell;
use crate::error::{Error, Result};
use crate::farfield::{collection, quantum_efficiency};

/// Metrics attached to each evaluated grid point; collection figures are
/// present only when the metric needed them.
#[derive(Debug, Clone, Copy, Default)]
pub struct RowMetrics {
    pub fp: Option<f64>,
    pub qe: Option<f64>,
    pub ce_tot: Option<f64>,
    pub cpr: Option<f64>,
}

/// One evaluated grid point.
#[derive(Debug, Clone)]
pub struct SweepRow {
    /// Parameter values in axis order.
    pub values: Vec<f64>,
    pub objective: f64,
    pub metrics: RowMetrics,
}

/// Full sweep outcome; `argmax` indexes `rows`.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub parameter_paths: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub argmax: usize,
}

impl SweepResult {
    pub fn argmax_row(&self) -> &SweepRow {
        &self.rows[self.argmax]
    }
}

pub(crate) struct EvalOutcome {
    pub objective: f64,
    pub metrics: RowMetrics,
}

/// Run the sweep described by `spec` around `base`.
pub fn run_sweep(
    base: &RunConfig,
    ctx: &ConfigContext,
    spec: &SweepConfig,
) -> Result<SweepResult> {
    run_sweep_with(base, spec, &|config| evaluate_physics(config, ctx, spec))
}

/// Sweep harness with an injectable evaluator (used directly by tests).
pub(crate) fn run_sweep_with(
    base: &RunConfig,
    spec: &SweepConfig,
    evaluate: &(dyn Fn(&RunConfig) -> Result<EvalOutcome> + Sync),
) -> Result<SweepResult> {
    if spec.parameters.is_empty() {
        return Err(Error::Config {
            path: "sweep.parameters".into(),
            message: "at least one parameter axis is required".into(),
        });
    }
    let mut total: usize = 1;
    for p in &spec.parameters {
        if p.n_points < 1 {
            return Err(Error::Config {
                path: format!("sweep parameter `{}`", p.path),
                message: "needs at least 1 grid point".into(),
            });
        }
        total = total.saturating_mul(p.n_points);
    }
    if total > spec.max_grid_points {
        return Err(Error::Config {
            path: "sweep".into(),
            message: format!(
                "grid has {total} points, exceeding the cap of {}",
                spec.max_grid_points
            ),
        });
    }

    let base_value = serde_json::to_value(base).expect("config serializes");
    // Fail fast on unresolvable paths before evaluating anything.
    for p in &spec.parameters {
        let mut probe = base_value.clone();
        set_path(&mut probe, &p.path, p.min)?;
    }

    let tuples: Vec<Vec<f64>> = (0..total).map(|i| tuple_at(spec, i)).collect();
    let outcomes: Vec<Result<SweepRow>> = tuples
        .into_par_iter()
        .map(|values| {
            let mut value = base_value.clone();
            for (p, v) in spec.parameters.iter().zip(&values) {
                set_path(&mut value, &p.path, *v)?;
            }
            let config: RunConfig = serde_json::from_value(value).map_err(|e| Error::Config {
                path: "sweep".into(),
                message: format!("modified config is invalid at {values:?}: {e}"),
            })?;
            let outcome = evaluate(&config).map_err(|e| {
                Error::Config {
                    path: "sweep".into(),
                    message: format!("evaluation failed at parameter tuple {values:?}: {e}"),
                }
            })?;
            Ok(SweepRow {
                values,
                objective: outcome.objective,
                metrics: outcome.metrics,
            })
        })
        .collect();

    // Surface the first failure in grid order for determinism.
    let mut rows = Vec::with_capacity(total);
    for outcome in outcomes {
        rows.push(outcome?);
    }

    // Strictly-greater replacement keeps the first (lexicographically
    // smallest) tuple on ties.
    let mut argmax = 0;
    for (i, row) in rows.iter().enumerate() {
        if row.objective > rows[argmax].objective {
            argmax = i;
        }
    }
    Ok(SweepResult {
        parameter_paths: spec.parameters.iter().map(|p| p.path.clone()).collect(),
        rows,
        argmax,
    })
}

/// Parameter tuple of grid point `index` (row-major, last axis fastest).
fn tuple_at(spec: &SweepConfig, index: usize) -> Vec<f64> {
    let mut values = vec![0.0; spec.parameters.len()];
    let mut rem = index;
    for (slot, p) in spec.parameters.iter().enumerate().rev() {
        let i = rem % p.n_points;
        rem /= p.n_points;
        values[slot] = if p.n_points == 1 {
            p.min
        } else {
            p.min + (p.max - p.min) * i as f64 / (p.n_points - 1) as f64
        };
    }
    values
}

/// Set the dotted path (e.g. `stack.layers[2].thickness_nm`) in a JSON
/// value tree to a number.
fn set_path(root: &mut serde_json::Value, path: &str, value: f64) -> Result<()> {
    let err = |msg: String| Error::Config {
        path: path.to_string(),
        message: msg,
    };
    let mut cursor = root;
    let segments: Vec<&str> = path.split('.').collect();
    for (si, segment) in segments.iter().enumerate() {
        let last = si == segments.len() - 1;
        // Split "layers[2]" into the field and optional indices.
        let (field, indices) = parse_segment(segment).map_err(err)?;
        if !field.is_empty() {
            cursor = cursor
                .as_object_mut()
                .ok_or_else(|| err(format!("`{field}` is not reachable (not an object)")))?
                .get_mut(field)
                .ok_or_else(|| err(format!("field `{field}` does not exist")))?;
        }
        for idx in &indices {
            cursor = cursor
                .as_array_mut()
                .ok_or_else(|| err(format!("`{field}` is not an array")))?
                .get_mut(*idx)
                .ok_or_else(|| err(format!("index {idx} out of bounds in `{field}`")))?;
        }
        if last {
            if !cursor.is_number() && !cursor.is_null() {
                return Err(err("path does not point at a numeric field".into()));
            }
            *cursor = serde_json::json!(value);
        }
    }
    Ok(())
}

fn parse_segment(segment: &str) -> std::result::Result<(&str, Vec<usize>), String> {
    match segment.find('[') {
        None => Ok((segment, Vec::new())),
        Some(start) => {
            let field = &segment[..start];
            let mut indices = Vec::new();
            let mut rest = &segment[start..];
            while let Some(stripped) = rest.strip_prefix('[') {
                let end = stripped
                    .find(']')
                    .ok_or_else(|| format!("unclosed `[` in `{segment}`"))?;
                let idx: usize = stripped[..end]
                    .parse()
                    .map_err(|_| format!("bad index in `{segment}`"))?;
                indices.push(idx);
                rest = &stripped[end + 1..];
            }
            if !rest.is_empty() {
                return Err(format!("trailing characters in `{segment}`"));
            }
            Ok((field, indices))
        }
    }
}

/// Physics evaluator: builds the scenario of the modified config and
/// computes the requested metric at a wavelength or band-averaged.
fn evaluate_physics(
    config: &RunConfig,
    ctx: &ConfigContext,
    spec: &SweepConfig,
) -> Result<EvalOutcome> {
    let scenario = config.scenario(ctx)?;
    let metric = spec.objective.metric;
    let eval_at = |lambda: f64| -> Result<(f64, RowMetrics)> {
        let mut dipole = scenario.dipole;
        dipole.wavelength_nm = lambda;
        match metric {
            MetricName::FpPerp => {
                let rates = purcell(&scenario.stack, &dipole)?;
                Ok((
                    rates.gamma_perp,
                    RowMetrics {
                        fp: Some(rates.gamma_perp),
                        ..Default::default()
                    },
                ))
            }
            MetricName::Qe => {
                let qe = quantum_efficiency(&scenario.stack, &dipole)?;
                Ok((
                    qe,
                    RowMetrics {
                        qe: Some(qe),
                        ..Default::default()
                    },
                ))
            }
            MetricName::CeTot | MetricName::Cpr => {
                let c = collection(&scenario.stack, &dipole, scenario.na, scenario.side)?;
                let objective = if metric == MetricName::CeTot {
                    c.ce_tot
                } else {
                    c.cpr
                };
                Ok((
                    objective,
                    RowMetrics {
                        fp: Some(c.fp),
                        qe: Some(c.qe),
                        ce_tot: Some(c.ce_tot),
                        cpr: Some(c.cpr),
                    },
                ))
            }
        }
    };

    match (&spec.objective.wavelength_nm, &spec.objective.band) {
        (Some(lambda), _) => {
            let (objective, metrics) = eval_at(*lambda)?;
            Ok(EvalOutcome { objective, metrics })
        }
        (None, Some(band)) => {
            let samples: Vec<(f64, f64)> = band
                .wavelengths()
                .iter()
                .map(|&lam| Ok((lam, eval_at(lam)?.0)))
                .collect::<Result<_>>()?;
            let objective = band_average(&samples, band.min_nm, band.max_nm)?;
            Ok(EvalOutcome {
                objective,
                metrics: RowMetrics::default(),
            })
        }
        (None, None) => Err(Error::Config {
            path: "sweep.objective".into(),
            message: "either `wavelength_nm` or `band` is required".into(),
        }),
    }
}

/// Trapezoidal mean of `(x, v)` samples inside `[min, max]`; needs at least
/// two samples in the band.
pub fn band_average(samples: &[(f64, f64)], min: f64, max: f64) -> Result<f64> {
    let inside: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|(x, _)| *x >= min && *x <= max)
        .collect();
    if inside.len() < 2 {
        return Err(Error::Domain(format!(
            "band average over [{min}, {max}] needs at least 2 samples inside the band, found {}",
            inside.len()
        )));
    }
    let mut integral = 0.0;
    for w in inside.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::Domain(
                "band-average samples must be strictly increasing in wavelength".into(),
            ));
        }
        integral += 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
    }
    let width = inside.last().unwrap().0 - inside[0].0;
    Ok(integral / width)
}

/// Default band over which a sweep mentions no explicit objective band.
pub fn default_band() -> BandConfig {
    BandConfig {
        min_nm: 650.0,
        max_nm: 1000.0,
        n: None,
    }
}
