//! Scenario files.
//!
//! ```toml
//! name = "nonlocality_demo"
//! units = "natural"          # or "si"
//! seed = 7
//! memory_budget_mb = 512     # optional
//!
//! [state]
//! kind = "modes"             # or "random" with count, k_min, k_max
//! modes = [
//!   { k = [0.0, 0.0, 1.0], a_plus = [1.0, 0.0], a_minus = [0.0, 0.0], weight = 1.0 },
//! ]
//!
//! [grid]                     # optional, needed by grid actions
//! n = 32
//! dx = 0.2
//!
//! [[actions]]
//! name = "obs"
//! kind = "observables"
//! ```

use std::collections::HashSet;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fields::kernels::Kernel;
use crate::fields::{state_to_grid, GridSpec};
use crate::lorentz::Boost;
use crate::modes::{make_mode, ModeRecord, ModeState};
use crate::units::Units;

/// Default memory budget when a scenario does not declare one.
pub const DEFAULT_MEMORY_BUDGET_MB: u64 = 2048;
/// Peak bytes per grid node across the grid actions (several 6-component
/// complex node arrays plus transform scratch).
pub const BYTES_PER_NODE: u64 = 1024;

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// Unreadable file.
    Io(String),
    /// Malformed TOML or unknown keys; the message carries line and column.
    Parse(String),
    /// Well-formed but invalid values; the message names the key.
    Invalid { key: String, message: String },
    /// Grid too large for the declared memory budget.
    Resource { needed_mb: u64, budget_mb: u64 },
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Io(m) => write!(f, "cannot read config: {m}"),
            ConfigError::Parse(m) => write!(f, "config error: {m}"),
            ConfigError::Invalid { key, message } => write!(f, "config error at `{key}`: {message}"),
            ConfigError::Resource { needed_mb, budget_mb } => write!(
                f,
                "resource error: grid needs about {needed_mb} MB, budget is {budget_mb} MB (memory_budget_mb)"
            ),
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(key: impl Into<String>, message: impl std::fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitsPreset {
    Si,
    Natural,
}

impl UnitsPreset {
    pub fn units(self) -> Units {
        match self {
            UnitsPreset::Si => Units::si(),
            UnitsPreset::Natural => Units::natural(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Modes { modes: Vec<ModeRecord> },
    Random { count: usize, k_min: f64, k_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub dx: f64,
}

/// Optional CSV export of one plane of a density variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvExport {
    pub path: PathBuf,
    /// Axis normal to the exported plane (0, 1, 2); default 2.
    #[serde(default = "default_normal")]
    pub normal: usize,
    /// Storage index of the plane; default n/2 (the origin).
    pub index: Option<usize>,
}

fn default_normal() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Action {
    IdentitySuite {
        name: String,
    },
    Evolve {
        name: String,
        dt: f64,
        steps: usize,
    },
    Observables {
        name: String,
        /// Also compute orbital angular momentum on the grid.
        #[serde(default)]
        orbital: bool,
    },
    SpinDensityVariants {
        name: String,
        min_spread_fraction: Option<f64>,
        csv: Option<CsvExport>,
    },
    ProbabilityDensityVariants {
        name: String,
        min_spread_fraction: Option<f64>,
        csv: Option<CsvExport>,
    },
    CovarianceCheck {
        name: String,
        betas: Vec<f64>,
    },
    KernelCheck {
        name: String,
        kernel: Kernel,
        k_samples: Vec<f64>,
    },
    MaxwellConsistency {
        name: String,
        dt: f64,
        #[serde(default)]
        energy_steps: usize,
    },
}

impl Action {
    pub fn name(&self) -> &str {
        match self {
            Action::IdentitySuite { name }
            | Action::Evolve { name, .. }
            | Action::Observables { name, .. }
            | Action::SpinDensityVariants { name, .. }
            | Action::ProbabilityDensityVariants { name, .. }
            | Action::CovarianceCheck { name, .. }
            | Action::KernelCheck { name, .. }
            | Action::MaxwellConsistency { name, .. } => name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Action::IdentitySuite { .. } => "identity_suite",
            Action::Evolve { .. } => "evolve",
            Action::Observables { .. } => "observables",
            Action::SpinDensityVariants { .. } => "spin_density_variants",
            Action::ProbabilityDensityVariants { .. } => "probability_density_variants",
            Action::CovarianceCheck { .. } => "covariance_check",
            Action::KernelCheck { .. } => "kernel_check",
            Action::MaxwellConsistency { .. } => "maxwell_consistency",
        }
    }

    fn needs_grid(&self) -> bool {
        matches!(
            self,
            Action::SpinDensityVariants { .. }
                | Action::ProbabilityDensityVariants { .. }
                | Action::MaxwellConsistency { .. }
                | Action::Observables { orbital: true, .. }
        )
    }

    fn needs_state(&self) -> bool {
        !matches!(self, Action::IdentitySuite { .. } | Action::KernelCheck { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Report path; the report goes to stdout when absent.
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub units: UnitsPreset,
    #[serde(default)]
    pub seed: u64,
    pub memory_budget_mb: Option<u64>,
    pub state: Option<StateSpec>,
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub actions: Vec<Action>,
    pub output: Option<OutputConfig>,
}

/// A validated scenario with its state and grid constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub units: Units,
    pub state: Option<ModeState>,
    pub grid: Option<GridSpec>,
}

impl Scenario {
    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn actions(&self) -> &[Action] {
        &self.file.actions
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigError> {
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string().trim_end().to_string()))?;
    validate(file)
}

pub fn load_scenario(path: &std::path::Path) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

fn build_state(spec: &StateSpec, seed: u64) -> Result<ModeState, ConfigError> {
    match spec {
        StateSpec::Modes { modes } => {
            let mut out = Vec::with_capacity(modes.len());
            for (i, r) in modes.iter().enumerate() {
                let m = make_mode(
                    r.k,
                    Complex64::new(r.a_plus[0], r.a_plus[1]),
                    Complex64::new(r.a_minus[0], r.a_minus[1]),
                    r.weight,
                )
                .map_err(|e| invalid(format!("state.modes[{i}]"), e))?;
                out.push(m);
            }
            Ok(ModeState::new(out))
        }
        StateSpec::Random { count, k_min, k_max } => {
            if *count == 0 {
                return Err(invalid("state.count", "must be at least 1"));
            }
            if !(*k_min > 0.0 && k_max >= k_min && k_max.is_finite()) {
                return Err(invalid("state.k_min", "need 0 < k_min ≤ k_max"));
            }
            Ok(ModeState::random(seed, *count, *k_min, *k_max))
        }
    }
}

fn validate(file: ScenarioFile) -> Result<Scenario, ConfigError> {
    if file.name.trim().is_empty() {
        return Err(invalid("name", "must not be empty"));
    }
    let units = file.units.units();
    let grid = match &file.grid {
        Some(g) => Some(GridSpec::new(g.n, g.dx).map_err(|e| invalid("grid", e))?),
        None => None,
    };
    let state = match &file.state {
        Some(s) => Some(build_state(s, file.seed)?),
        None => None,
    };

    let mut names = HashSet::new();
    for (i, a) in file.actions.iter().enumerate() {
        let key = |field: &str| format!("actions[{i}].{field}");
        if a.name().trim().is_empty() {
            return Err(invalid(key("name"), "must not be empty"));
        }
        if !names.insert(a.name().to_string()) {
            return Err(invalid(key("name"), format!("duplicate action name `{}`", a.name())));
        }
        if a.needs_state() && state.is_none() {
            return Err(invalid(key("kind"), format!("`{}` needs a [state] table", a.kind())));
        }
        if a.needs_grid() && grid.is_none() {
            return Err(invalid(key("kind"), format!("`{}` needs a [grid] table", a.kind())));
        }
        match a {
            Action::Evolve { dt, steps, .. } => {
                if !dt.is_finite() {
                    return Err(invalid(key("dt"), "must be finite"));
                }
                if *steps == 0 {
                    return Err(invalid(key("steps"), "must be at least 1"));
                }
            }
            Action::CovarianceCheck { betas, .. } => {
                if betas.is_empty() {
                    return Err(invalid(key("betas"), "must list at least one velocity"));
                }
                for (j, b) in betas.iter().enumerate() {
                    Boost::new(*b).map_err(|_| {
                        invalid(
                            format!("actions[{i}].betas[{j}]"),
                            format!("β = {b} must satisfy |β| < 1"),
                        )
                    })?;
                }
            }
            Action::KernelCheck { k_samples, .. } => {
                if k_samples.is_empty() {
                    return Err(invalid(key("k_samples"), "must list at least one wavenumber"));
                }
                if let Some(j) = k_samples.iter().position(|k| !(*k > 0.0 && k.is_finite())) {
                    return Err(invalid(format!("actions[{i}].k_samples[{j}]"), "must be positive"));
                }
            }
            Action::MaxwellConsistency { dt, .. } => {
                if !dt.is_finite() {
                    return Err(invalid(key("dt"), "must be finite"));
                }
            }
            Action::SpinDensityVariants {
                min_spread_fraction,
                csv,
                ..
            }
            | Action::ProbabilityDensityVariants {
                min_spread_fraction,
                csv,
                ..
            } => {
                if let Some(f) = min_spread_fraction {
                    if !(*f >= 0.0) {
                        return Err(invalid(key("min_spread_fraction"), "must be non-negative"));
                    }
                }
                if let (Some(c), Some(g)) = (csv, grid) {
                    if c.normal > 2 || c.index.is_some_and(|ix| ix >= g.n()) {
                        return Err(invalid(key("csv"), "plane outside grid"));
                    }
                }
            }
            Action::IdentitySuite { .. } | Action::Observables { .. } => {}
        }
    }

    let needs_grid = file.actions.iter().any(Action::needs_grid);
    if let (true, Some(g), Some(s)) = (needs_grid, grid, &state) {
        let budget = file.memory_budget_mb.unwrap_or(DEFAULT_MEMORY_BUDGET_MB);
        let needed = (g.nodes() as u64 * BYTES_PER_NODE).div_ceil(1 << 20);
        if needed > budget {
            return Err(ConfigError::Resource {
                needed_mb: needed,
                budget_mb: budget,
            });
        }
        state_to_grid(s, &g).map_err(|e| match e {
            Error::OffGridMode { k } => {
                invalid("state", format!("mode k = {k:?} is outside the grid band or on k = 0"))
            }
            other => invalid("state", other),
        })?;
    }

    Ok(Scenario {
        file,
        units,
        state,
        grid,
    })
}

/// Human-readable action plan.
pub fn describe_scenario(s: &Scenario) -> String {
    let mut out = String::new();
    let units = match s.file.units {
        UnitsPreset::Si => "si",
        UnitsPreset::Natural => "natural",
    };
    out.push_str(&format!(
        "scenario {} (units {units}, seed {})\n",
        s.name(),
        s.file.seed
    ));
    match (&s.file.state, &s.state) {
        (Some(StateSpec::Modes { modes }), _) => out.push_str(&format!("state: {} explicit modes\n", modes.len())),
        (Some(StateSpec::Random { count, k_min, k_max }), _) => {
            out.push_str(&format!("state: {count} random modes, |k| in [{k_min}, {k_max}]\n"))
        }
        (None, _) => out.push_str("state: none\n"),
    }
    match &s.grid {
        Some(g) => out.push_str(&format!("grid: n = {}, dx = {}\n", g.n(), g.dx())),
        None => out.push_str("grid: none\n"),
    }
    out.push_str(&format!("actions ({}):\n", s.actions().len()));
    for (i, a) in s.actions().iter().enumerate() {
        out.push_str(&format!("  {}. {} [{}]\n", i + 1, a.name(), a.kind()));
    }
    out
}
