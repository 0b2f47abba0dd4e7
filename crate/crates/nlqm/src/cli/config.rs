//! Run configuration: a TOML file with dotted-key overrides.
//!
//! ```toml
//! mode = "analytic"            # analytic | nonlinear | linearized | reduced
//!                              # | spatial | appendix_a | appendix_b | verify
//!
//! [hamiltonian]
//! kind = "random"              # random | diag | file
//! dim = 4                      # random only
//! seed = 42                    # random only
//! # values = [0.0, 1.0]        # diag only
//! # path = "h.json"            # file only (see README for the JSON schema)
//!
//! [coupling]
//! a = 1.0
//! b = 0.5
//!
//! [solution]
//! omega0 = 1.0
//! vartheta = 0.3
//! theta = 0.7
//! ab_seed = 7                  # seeds the orthonormal (A, B) coefficients
//!
//! [initial]
//! kind = "analytic"            # analytic | exceptional
//!
//! [time]
//! t_start = -2.0
//! t_end = 2.0
//! n_samples = 81
//!
//! [integrator]
//! method = "rk45_adaptive"     # rk45_adaptive | rk4_fixed
//! abs_tol = 1e-10
//! rel_tol = 1e-10
//! max_step = 0.1
//! initial_step = 1e-3
//! rhs_variant = "derived"      # derived | printed
//!
//! [output]
//! directory = "out"
//! formats = ["csv", "json"]    # csv | json | svg
//!
//! [spatial]                    # spatial mode only
//! x_min = 0.0
//! x_max = 6.283185307179586
//! n_points = 256
//! dt = 0.001
//! potential_cos_amp = 0.0      # V(x) = amp * cos(2π(x − x_min)/L)
//!
//! [appendix]                   # appendix modes only
//! t0 = 0.0
//! c_seed = 8                   # appendix_a initial coefficients
//! tau0 = 0.6                   # appendix_b scalars
//! delta0 = 1.0
//! gamma0_phase = 0.3
//! alpha = 0.4                  # appendix_b A-channel weight
//! ```
//!
//! Overrides use dotted paths: `--set coupling.b=0.25`,
//! `--set integrator.method=rk4_fixed`.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::hilbert::{Coupling, HermitianOperator, C64};
use crate::integrator::RhsVariant;
use crate::ode::{IntegratorConfig, Method, TimeSpan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Analytic,
    Nonlinear,
    Linearized,
    Reduced,
    Spatial,
    AppendixA,
    AppendixB,
    Verify,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Nonlinear => "nonlinear",
            Mode::Linearized => "linearized",
            Mode::Reduced => "reduced",
            Mode::Spatial => "spatial",
            Mode::AppendixA => "appendix_a",
            Mode::AppendixB => "appendix_b",
            Mode::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum HamiltonianConfig {
    Random { dim: usize, seed: u64 },
    Diag { values: Vec<f64> },
    File { path: String },
}

impl Default for HamiltonianConfig {
    fn default() -> Self {
        HamiltonianConfig::Random { dim: 4, seed: 42 }
    }
}

impl HamiltonianConfig {
    /// Materialize the operator. Relative file paths resolve against
    /// `base_dir` (the config file's directory).
    pub fn build(&self, base_dir: &Path) -> Result<HermitianOperator> {
        match self {
            HamiltonianConfig::Random { dim, seed } => {
                crate::hilbert::random_hermitian(*dim, *seed)
            }
            HamiltonianConfig::Diag { values } => HermitianOperator::from_diagonal(values),
            HamiltonianConfig::File { path } => {
                let full = base_dir.join(path);
                let text = std::fs::read_to_string(&full).map_err(|e| {
                    Error::ContractViolation(format!(
                        "cannot read hamiltonian file {}: {e}",
                        full.display()
                    ))
                })?;
                load_hamiltonian_json(&text)
            }
        }
    }
}

/// JSON schema for `hamiltonian.kind = "file"`:
/// `{"matrix": [[[re, im], ...], ...]}` — a square row-major matrix of
/// [re, im] pairs.
pub fn load_hamiltonian_json(text: &str) -> Result<HermitianOperator> {
    #[derive(Deserialize)]
    struct FileMatrix {
        matrix: Vec<Vec<[f64; 2]>>,
    }
    let parsed: FileMatrix = serde_json::from_str(text)
        .map_err(|e| Error::ContractViolation(format!("hamiltonian JSON: {e}")))?;
    let dim = parsed.matrix.len();
    if dim == 0 || parsed.matrix.iter().any(|row| row.len() != dim) {
        return Err(Error::ContractViolation(
            "hamiltonian JSON must be a nonempty square matrix".into(),
        ));
    }
    let mut m = nalgebra::DMatrix::zeros(dim, dim);
    for (i, row) in parsed.matrix.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            m[(i, j)] = C64::new(re, im);
        }
    }
    HermitianOperator::new(m)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct CouplingConfig {
    pub a: f64,
    pub b: f64,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        CouplingConfig { a: 1.0, b: 0.5 }
    }
}

impl CouplingConfig {
    pub fn build(&self) -> Result<Coupling> {
        Coupling::new(self.a, self.b)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SolutionConfig {
    pub omega0: f64,
    pub vartheta: f64,
    pub theta: f64,
    pub ab_seed: u64,
}

impl Default for SolutionConfig {
    fn default() -> Self {
        SolutionConfig {
            omega0: 1.0,
            vartheta: 0.3,
            theta: 0.7,
            ab_seed: 7,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    #[default]
    Analytic,
    Exceptional,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct InitialConfig {
    pub kind: InitialKind,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct TimeConfig {
    pub t_start: f64,
    pub t_end: f64,
    pub n_samples: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            t_start: -2.0,
            t_end: 2.0,
            n_samples: 81,
        }
    }
}

impl TimeConfig {
    pub fn span(&self) -> Result<TimeSpan> {
        if !self.t_end.is_finite() || !self.t_start.is_finite() || self.t_end <= self.t_start {
            return Err(Error::ContractViolation(format!(
                "time.t_end ({}) must exceed time.t_start ({})",
                self.t_end, self.t_start
            )));
        }
        if self.n_samples < 2 {
            return Err(Error::ContractViolation(
                "time.n_samples must be >= 2".into(),
            ));
        }
        TimeSpan::new(self.t_start, self.t_end, self.n_samples)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorSection {
    pub method: Method,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
    pub initial_step: f64,
    pub rhs_variant: RhsVariant,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let base = IntegratorConfig::default();
        IntegratorSection {
            method: base.method,
            abs_tol: base.abs_tol,
            rel_tol: base.rel_tol,
            max_step: base.max_step,
            initial_step: base.initial_step,
            rhs_variant: RhsVariant::Derived,
        }
    }
}

impl IntegratorSection {
    pub fn build(&self) -> IntegratorConfig {
        IntegratorConfig {
            method: self.method,
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_step: self.max_step,
            initial_step: self.initial_step,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    pub directory: String,
    pub formats: Vec<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: "out".into(),
            formats: vec!["csv".into(), "json".into()],
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, format: &str) -> bool {
        self.formats.iter().any(|f| f == format)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SpatialConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub dt: f64,
    /// Amplitude of an optional smooth periodic trap
    /// V(x) = amp · cos(2π(x − x_min)/L).
    pub potential_cos_amp: f64,
}

impl Default for SpatialConfig {
    fn default() -> Self {
        SpatialConfig {
            x_min: 0.0,
            x_max: 2.0 * std::f64::consts::PI,
            n_points: 256,
            dt: 1e-3,
            potential_cos_amp: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct AppendixConfig {
    /// Time origin of the complex-coupling norm law (appendix_a).
    pub t0: f64,
    /// Seed for the appendix_a initial coefficients.
    pub c_seed: u64,
    /// Constant scalars of the real-coupling pair (appendix_b).
    pub tau0: f64,
    pub delta0: f64,
    pub gamma0_phase: f64,
    /// A-channel weight of the appendix_b construction.
    pub alpha: f64,
}

impl Default for AppendixConfig {
    fn default() -> Self {
        AppendixConfig {
            t0: 0.0,
            c_seed: 8,
            tau0: 0.6,
            delta0: 1.0,
            gamma0_phase: 0.3,
            alpha: 0.4,
        }
    }
}

/// The full run configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub mode: Mode,
    pub hamiltonian: HamiltonianConfig,
    pub coupling: CouplingConfig,
    pub solution: SolutionConfig,
    pub initial: InitialConfig,
    pub time: TimeConfig,
    pub integrator: IntegratorSection,
    pub output: OutputConfig,
    pub spatial: SpatialConfig,
    pub appendix: AppendixConfig,
    /// Directory the config file was loaded from; used to resolve relative
    /// paths. Not part of the file schema.
    #[serde(skip)]
    pub base_dir: std::path::PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Analytic,
            hamiltonian: HamiltonianConfig::default(),
            coupling: CouplingConfig::default(),
            solution: SolutionConfig::default(),
            initial: InitialConfig::default(),
            time: TimeConfig::default(),
            integrator: IntegratorSection::default(),
            output: OutputConfig::default(),
            spatial: SpatialConfig::default(),
            appendix: AppendixConfig::default(),
            base_dir: std::path::PathBuf::from("."),
        }
    }
}

impl RunConfig {
    /// Load a config file and apply `--set key=value` overrides.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::ContractViolation(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut value: toml::Value = text
            .parse()
            .map_err(|e| Error::ContractViolation(format!("config parse error: {e}")))?;
        for item in overrides {
            apply_override(&mut value, item)?;
        }
        let mut config: RunConfig = value
            .try_into()
            .map_err(|e| Error::ContractViolation(format!("config field error: {e}")))?;
        config.base_dir = path
            .parent()
            .map(|p| p.to_path_buf())
            .unwrap_or_else(|| std::path::PathBuf::from("."));
        Ok(config)
    }

    /// Parse a config from TOML text (defaults applied for missing keys).
    pub fn from_toml(text: &str) -> Result<Self> {
        let value: toml::Value = text
            .parse()
            .map_err(|e| Error::ContractViolation(format!("config parse error: {e}")))?;
        value
            .try_into()
            .map_err(|e| Error::ContractViolation(format!("config field error: {e}")))
    }

    /// Apply a grid/override assignment to an in-memory config.
    pub fn with_override(&self, assignment: &str) -> Result<Self> {
        let mut value = toml::Value::try_from(self.clone())
            .map_err(|e| Error::ContractViolation(format!("config serialize error: {e}")))?;
        apply_override(&mut value, assignment)?;
        let mut config: RunConfig = value
            .try_into()
            .map_err(|e| Error::ContractViolation(format!("config field error: {e}")))?;
        config.base_dir = self.base_dir.clone();
        Ok(config)
    }
}

/// Apply one `dotted.path=value` assignment to a TOML tree. The value is
/// parsed as TOML when possible and falls back to a string.
pub fn apply_override(root: &mut toml::Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment.split_once('=').ok_or_else(|| {
        Error::ContractViolation(format!(
            "override `{assignment}` must look like key.path=value"
        ))
    })?;
    // A bare value is not a TOML document; wrap it in a synthetic key to
    // parse numbers/booleans/arrays, and fall back to a plain string.
    let parsed: toml::Value = format!("v = {}", raw.trim())
        .parse::<toml::Value>()
        .ok()
        .and_then(|mut doc| doc.as_table_mut().and_then(|t| t.remove("v")))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let mut node = root;
    let segments: Vec<&str> = path.trim().split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(Error::ContractViolation(format!(
            "override `{assignment}` has an empty path segment"
        )));
    }
    for (i, seg) in segments.iter().enumerate() {
        let table = node.as_table_mut().ok_or_else(|| {
            Error::ContractViolation(format!(
                "override `{assignment}`: `{}` is not a table",
                segments[..i].join(".")
            ))
        })?;
        if i == segments.len() - 1 {
            table.insert(seg.to_string(), parsed);
            return Ok(());
        }
        node = table
            .entry(seg.to_string())
            .or_insert_with(|| toml::Value::Table(toml::map::Map::new()));
    }
    unreachable!("loop always returns on the last segment");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_from_empty_toml() {
        let config = RunConfig::from_toml("").unwrap();
        assert_eq!(config.mode, Mode::Analytic);
        assert_eq!(config.time.n_samples, 81);
    }

    #[test]
    fn overrides_replace_nested_keys() {
        let config =
            RunConfig::from_toml("mode = \"nonlinear\"\n[coupling]\na = 2.0\nb = 1.0").unwrap();
        let updated = config.with_override("coupling.b=0.25").unwrap();
        assert_eq!(updated.coupling.b, 0.25);
        assert_eq!(updated.coupling.a, 2.0);
        let updated = updated
            .with_override("integrator.method=rk4_fixed")
            .unwrap();
        assert_eq!(updated.integrator.method, Method::Rk4Fixed);
    }

    #[test]
    fn bad_override_is_rejected() {
        let config = RunConfig::default();
        assert!(config.with_override("no_equals_sign").is_err());
        assert!(config.with_override("mode.=x").is_err());
    }

    #[test]
    fn hamiltonian_json_round_trip() {
        let text = r#"{"matrix": [[[1.0, 0.0], [0.5, 0.5]], [[0.5, -0.5], [2.0, 0.0]]]}"#;
        let h = load_hamiltonian_json(text).unwrap();
        assert_eq!(h.dim(), 2);
        assert!((h.matrix()[(0, 1)] - C64::new(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn hamiltonian_json_rejects_non_hermitian() {
        let text = r#"{"matrix": [[[1.0, 0.0], [0.5, 0.5]], [[0.5, 0.5], [2.0, 0.0]]]}"#;
        assert!(load_hamiltonian_json(text).is_err());
    }

    #[test]
    fn time_section_rejects_reversed_span() {
        let config = RunConfig::from_toml("[time]\nt_start = 2.0\nt_end = -2.0").unwrap();
        assert!(config.time.span().is_err());
    }
}
