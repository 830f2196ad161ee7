//! Scenario configuration: strict JSON with unknown keys rejected, so a
//! committed scenario file means exactly what it says.

use bihsc::spectrum::DEFAULT_INT_TOL;
use bihsc::{CoeffState, MediumParams};
use num_complex::Complex64;
use serde::Deserialize;

use crate::CliError;

/// A full run description. `gamma` drives the single-parameter commands,
/// `gamma_grid` the scan; the rest is shared.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub gamma: Option<f64>,
    pub ell: f64,
    #[serde(rename = "T", default = "default_horizon")]
    pub horizon: f64,
    pub n_modes: usize,
    #[serde(default)]
    pub initial_data: Option<InitialData>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Output path prefix; overridden by `--out`.
    #[serde(default)]
    pub outputs: Option<String>,
    #[serde(default)]
    pub gamma_grid: Option<GammaGrid>,
}

fn default_horizon() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields, rename_all = "snake_case")]
pub enum InitialData {
    /// Unit coefficient on one mode.
    Mode { index: usize },
    /// Complex coefficients `[[re, im], ...]` on modes 1, 2, ...
    Coefficients { values: Vec<[f64; 2]> },
    /// Uniform complex samples on `[0, ell]`, endpoints included.
    GridSamples { values: Vec<[f64; 2]> },
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_int_tol")]
    pub int_tol: f64,
    #[serde(default)]
    pub reg: f64,
}

fn default_int_tol() -> f64 {
    DEFAULT_INT_TOL
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            int_tol: DEFAULT_INT_TOL,
            reg: 0.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum GammaGrid {
    Linspace { start: f64, stop: f64, count: usize },
    Explicit { values: Vec<f64> },
}

impl GammaGrid {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        let points = match self {
            GammaGrid::Linspace { start, stop, count } => {
                if *count == 0 {
                    return Err(CliError::validation("gamma_grid count must be positive"));
                }
                if *count == 1 {
                    vec![*start]
                } else {
                    (0..*count)
                        .map(|i| start + (stop - start) * (i as f64 / (*count - 1) as f64))
                        .collect()
                }
            }
            GammaGrid::Explicit { values } => values.clone(),
        };
        if points.is_empty() {
            return Err(CliError::validation("gamma_grid must not be empty"));
        }
        if points.iter().any(|&g| g >= 0.0 || !g.is_finite()) {
            return Err(CliError::validation(
                "every gamma in the grid must be finite and strictly negative",
            ));
        }
        Ok(points)
    }
}

impl Scenario {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
        let scenario: Scenario = serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("invalid scenario: {e}")))?;
        scenario.validate_common()?;
        Ok(scenario)
    }

    fn validate_common(&self) -> Result<(), CliError> {
        if self.n_modes == 0 {
            return Err(CliError::validation("n_modes must be at least 1"));
        }
        if self.horizon <= 0.0 || !self.horizon.is_finite() {
            return Err(CliError::validation("T must be finite and positive"));
        }
        if self.tolerances.int_tol.is_nan() || self.tolerances.int_tol < 0.0 {
            return Err(CliError::validation("int_tol must be nonnegative"));
        }
        if self.tolerances.reg.is_nan() || self.tolerances.reg < 0.0 {
            return Err(CliError::validation("reg must be nonnegative"));
        }
        Ok(())
    }

    /// Parameters for the single-gamma commands.
    pub fn params(&self) -> Result<MediumParams, CliError> {
        let gamma = self
            .gamma
            .ok_or_else(|| CliError::validation("this command needs a 'gamma' field"))?;
        Ok(MediumParams::new(gamma, self.ell)?)
    }

    /// Builds the initial state against modes `1..=n_modes`, plus the
    /// uncontrolled tail energy beyond the truncation when it is knowable
    /// (grid samples or an over-long coefficient list).
    pub fn initial_state(
        &self,
        params: MediumParams,
    ) -> Result<(CoeffState, Option<f64>), CliError> {
        let data = self
            .initial_data
            .as_ref()
            .ok_or_else(|| CliError::validation("this command needs 'initial_data'"))?;
        match data {
            InitialData::Mode { index } => {
                if *index == 0 || *index > self.n_modes {
                    return Err(CliError::validation(format!(
                        "mode index {index} outside 1..={}",
                        self.n_modes
                    )));
                }
                let state = CoeffState::unit_mode(params, self.n_modes, *index)?;
                Ok((state, Some(0.0)))
            }
            InitialData::Coefficients { values } => {
                let coeffs: Vec<Complex64> =
                    values.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                // `+ 0.0` flushes the negative zero an empty sum produces
                let tail: f64 = coeffs
                    .iter()
                    .skip(self.n_modes)
                    .map(|c| c.norm_sqr())
                    .sum::<f64>()
                    + 0.0;
                let head: Vec<Complex64> = coeffs
                    .iter()
                    .copied()
                    .chain(std::iter::repeat(Complex64::default()))
                    .take(self.n_modes)
                    .collect();
                let state = CoeffState::from_coefficients(params, self.n_modes, &head)?;
                Ok((state, Some(tail)))
            }
            InitialData::GridSamples { values } => {
                let samples: Vec<Complex64> =
                    values.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                let state = CoeffState::project(params, self.n_modes, &samples)?;
                // Tail = quadrature L2 mass of the samples minus the
                // captured modal mass (nonnegative up to quadrature error).
                let h = params.ell() / (samples.len() - 1) as f64;
                let density: Vec<Complex64> = samples
                    .iter()
                    .map(|s| Complex64::new(s.norm_sqr(), 0.0))
                    .collect();
                let total = bihsc::quad::simpson(&density, h).re;
                let captured: f64 = state.coeffs().iter().map(|c| c.norm_sqr()).sum();
                Ok((state, Some((total - captured).max(0.0))))
            }
        }
    }
}
