//! TOML run configuration and its mapping onto the domain types.

use std::path::Path;

use serde::Deserialize;

use bloch1d::materials::{PermittivityModel, PertKind, Structure, UnitCell};
use bloch1d::Tolerances;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub material: Materials,
    pub cell_a: CellConfig,
    pub cell_b: CellConfig,
    #[serde(default)]
    pub globals: Globals,
    #[serde(default)]
    pub perturbation: Perturbation,
    #[serde(default)]
    pub scan: Scan,
    #[serde(default)]
    pub sweep: Sweep,
    #[serde(default)]
    pub tolerances: TolerancesConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Materials {
    pub eps1: Model,
    pub eps2: Model,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Model {
    pub eps0: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellConfig {
    /// `[[length, species], ...]`, species 1 or 2, lengths summing to 1.
    pub layers: Vec<(f64, u8)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Globals {
    #[serde(default = "one")]
    pub mu0: f64,
}

impl Default for Globals {
    fn default() -> Self {
        Self { mu0: 1.0 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    #[serde(default)]
    pub kind: KindConfig,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub sigma: f64,
}

impl Default for Perturbation {
    fn default() -> Self {
        Self {
            kind: KindConfig::None,
            delta: 0.0,
            sigma: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum KindConfig {
    #[default]
    None,
    InverseSqDecreasing,
    InverseSqIncreasing,
}

impl From<KindConfig> for PertKind {
    fn from(k: KindConfig) -> Self {
        match k {
            KindConfig::None => PertKind::None,
            KindConfig::InverseSqDecreasing => PertKind::InverseSqDecreasing,
            KindConfig::InverseSqIncreasing => PertKind::InverseSqIncreasing,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scan {
    #[serde(default = "default_window")]
    pub omega_window: (f64, f64),
    #[serde(default = "default_n_scan")]
    pub n_scan: usize,
    #[serde(default = "default_kappa_points")]
    pub kappa_points: usize,
}

impl Default for Scan {
    fn default() -> Self {
        Self {
            omega_window: default_window(),
            n_scan: default_n_scan(),
            kappa_points: default_kappa_points(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    /// 1-based index into the ordered list of common gap intersections.
    #[serde(default = "one_usize")]
    pub gap_index: usize,
    #[serde(default = "default_delta_max")]
    pub delta_max: f64,
    #[serde(default = "default_delta_points")]
    pub delta_points: usize,
    #[serde(default = "default_sigma_points")]
    pub sigma_points: usize,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            gap_index: 1,
            delta_max: default_delta_max(),
            delta_points: default_delta_points(),
            sigma_points: default_sigma_points(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesConfig {
    pub eta_pole: Option<f64>,
    pub eta_edge: Option<f64>,
    pub root_rel: Option<f64>,
    pub edge_residual: Option<f64>,
    pub floquet: Option<f64>,
    pub sym: Option<f64>,
    pub zak_class: Option<f64>,
    pub w_residual: Option<f64>,
}

fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn default_window() -> (f64, f64) {
    (0.0, 0.995)
}
fn default_n_scan() -> usize {
    4000
}
fn default_kappa_points() -> usize {
    64
}
fn default_delta_max() -> f64 {
    1.0
}
fn default_delta_points() -> usize {
    33
}
fn default_sigma_points() -> usize {
    31
}

/// Configuration or validation failure; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let config: RunConfig = toml::from_str(&text)
        .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    if config.scan.omega_window.1 <= config.scan.omega_window.0 {
        return Err(ConfigError(
            "scan.omega_window: upper bound must exceed lower bound".into(),
        ));
    }
    if config.sweep.gap_index == 0 {
        return Err(ConfigError("sweep.gap_index: must be 1-based".into()));
    }
    Ok(config)
}

impl RunConfig {
    /// Build the (possibly perturbed) structure the commands operate on.
    pub fn structure(&self) -> Result<Structure<f64>, ConfigError> {
        let model = |m: &Model, which: &str| -> Result<PermittivityModel<f64>, ConfigError> {
            if m.eps0 < 0.0 || m.alpha < 0.0 || m.beta < 0.0 {
                return Err(ConfigError(format!(
                    "material.{which}: eps0, alpha and beta must be non-negative"
                )));
            }
            Ok(PermittivityModel::new(m.eps0, m.alpha, m.beta))
        };
        let mut eps1 = model(&self.material.eps1, "eps1")?;
        let mut eps2 = model(&self.material.eps2, "eps2")?;
        let kind: PertKind = self.perturbation.kind.into();
        if kind != PertKind::None && self.perturbation.delta != 0.0 {
            if self.perturbation.delta < 0.0 {
                return Err(ConfigError("perturbation.delta: must be >= 0".into()));
            }
            eps1 = eps1.with_perturbation(kind, self.perturbation.delta);
            eps2 = eps2.with_perturbation(kind, self.perturbation.delta);
        }
        let cell_a = UnitCell::from_pairs("A", &self.cell_a.layers)
            .map_err(|e| ConfigError(format!("cell_a.layers: {e}")))?;
        let cell_b = UnitCell::from_pairs("B", &self.cell_b.layers)
            .map_err(|e| ConfigError(format!("cell_b.layers: {e}")))?;
        let s = Structure::new(cell_a, cell_b, eps1, eps2, self.globals.mu0)
            .map_err(|e| ConfigError(format!("globals.mu0: {e}")))?;
        if self.perturbation.sigma != 0.0 {
            return s
                .apply_sigma_perturbation(self.perturbation.sigma)
                .map_err(|e| ConfigError(format!("perturbation.sigma: {e}")));
        }
        Ok(s)
    }

    pub fn tolerances(&self) -> Tolerances<f64> {
        let mut t = Tolerances::default();
        let c = &self.tolerances;
        if let Some(x) = c.eta_pole {
            t.eta_pole = x;
        }
        if let Some(x) = c.eta_edge {
            t.eta_edge = x;
        }
        if let Some(x) = c.root_rel {
            t.root_rel = x;
        }
        if let Some(x) = c.edge_residual {
            t.edge_residual = x;
        }
        if let Some(x) = c.floquet {
            t.floquet = x;
        }
        if let Some(x) = c.sym {
            t.sym = x;
        }
        if let Some(x) = c.zak_class {
            t.zak_class = x;
        }
        if let Some(x) = c.w_residual {
            t.w_residual = x;
        }
        t
    }
}
