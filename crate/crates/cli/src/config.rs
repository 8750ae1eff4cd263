//! Run configuration: a TOML file of flat sections, defaults for every key.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use keldysh_core::bath::SpectralDensity;
use keldysh_core::nca::{BareKeldysh, ModelConfig, SolverConfig};
use keldysh_core::numerics::{FrequencyGrid, Statistics, ThermalParams};
use keldysh_core::Error as CoreError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("ParseError at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("ValidationError({key}): {reason}")]
    Validation { key: String, reason: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ConfigError {
    fn validation(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::Validation {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Maps a core validation failure onto the offending key.
    fn from_core(fallback: &str, e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { name, reason } => Self::validation(name, reason),
            other => Self::validation(fallback, other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub omega0: f64,
    pub lambda_sq: f64,
    pub linear_scale: f64,
    pub bare_keldysh: BareKeldysh,
    pub width: f64,
    /// Scale of the Lamb shift in the spin-boson resonance denominator.
    pub shift_scale: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        let m = ModelConfig::<f64>::default();
        Self {
            omega0: m.omega0,
            lambda_sq: m.lambda_sq,
            linear_scale: m.linear_scale,
            bare_keldysh: m.bare_keldysh,
            width: m.width,
            shift_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermalSection {
    pub beta: f64,
    /// +1 fermion, -1 boson.
    pub eta: i8,
}

impl Default for ThermalSection {
    fn default() -> Self {
        Self { beta: 1.0, eta: -1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    OhmicLorentzian,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensitySection {
    pub kind: DensityKind,
    pub amplitude: f64,
    pub cutoff: f64,
    /// Two-column `omega J` table, relative to the config file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

impl Default for DensitySection {
    fn default() -> Self {
        Self {
            kind: DensityKind::OhmicLorentzian,
            amplitude: PI,
            cutoff: 1.0,
            file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub omega_max: f64,
    pub n: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            omega_max: FrequencyGrid::<f64>::DEFAULT_OMEGA_MAX,
            n: FrequencyGrid::<f64>::DEFAULT_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub mixing: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverConfig::<f64>::default();
        Self {
            mixing: s.mixing,
            tol: s.tol,
            max_iter: s.max_iter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksSection {
    /// Largest acceptable relative FDR residual.
    pub fdr_tol: f64,
    /// Largest acceptable KMS residual, normalised by `max S_>`.
    pub kms_tol: f64,
}

impl Default for ChecksSection {
    fn default() -> Self {
        Self {
            fdr_tol: 1e-3,
            kms_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// The file as written, with defaults filled in.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub model: ModelSection,
    pub thermal: ThermalSection,
    pub j: DensitySection,
    pub grid: GridSection,
    pub solver: SolverSection,
    pub checks: ChecksSection,
    pub output: OutputSection,
}

const KEYS: &[(&str, &[&str])] = &[
    ("model", &["omega0", "lambda_sq", "linear_scale", "bare_keldysh", "width", "shift_scale"]),
    ("thermal", &["beta", "eta"]),
    ("j", &["kind", "amplitude", "cutoff", "file"]),
    ("grid", &["omega_max", "n"]),
    ("solver", &["mixing", "tol", "max_iter"]),
    ("checks", &["fdr_tol", "kms_tol"]),
    ("output", &["dir"]),
];

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e| parse_error(text, &e))?;
        for (section, value) in &table {
            let Some((_, known)) = KEYS.iter().find(|(s, _)| s == section) else {
                return Err(ConfigError::validation(section.as_str(), "unknown key"));
            };
            if let Some(inner) = value.as_table() {
                if let Some(key) = inner.keys().find(|k| !known.contains(&k.as_str())) {
                    return Err(ConfigError::validation(format!("{section}.{key}"), "unknown key"));
                }
            }
        }
        toml::from_str(text).map_err(|e| parse_error(text, &e))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }
}

fn parse_error(text: &str, e: &toml::de::Error) -> ConfigError {
    let line = e
        .span()
        .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
        .unwrap_or(0);
    ConfigError::Parse {
        line,
        message: e.message().trim().to_string(),
    }
}

/// Validated configuration ready for the solvers.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub file: FileConfig,
    pub grid: FrequencyGrid<f64>,
    /// Statistics as configured; the Keldysh solvers additionally require bosons.
    pub thermal: ThermalParams<f64>,
    pub model: ModelConfig<f64>,
    pub solver: SolverConfig<f64>,
}

impl RunConfig {
    /// `base` resolves a relative `j.file`.
    pub fn build(file: FileConfig, base: &Path) -> Result<Self, ConfigError> {
        let t = &file.thermal;
        let eta = Statistics::try_from(t.eta).map_err(|r| ConfigError::validation("eta", r))?;
        let thermal = ThermalParams::new(t.beta, eta).map_err(|e| ConfigError::from_core("beta", e))?;
        let grid = FrequencyGrid::new(file.grid.omega_max, file.grid.n)
            .map_err(|e| ConfigError::from_core("grid", e))?;
        let j = density(&file.j, base)?;
        let m = &file.model;
        let model = ModelConfig {
            omega0: m.omega0,
            j,
            tp: ThermalParams::boson(t.beta).map_err(|e| ConfigError::from_core("beta", e))?,
            lambda_sq: m.lambda_sq,
            linear_scale: m.linear_scale,
            bare_keldysh: m.bare_keldysh,
            width: m.width,
        };
        model.validate().map_err(|e| ConfigError::from_core("model", e))?;
        if !(m.shift_scale.is_finite()) {
            return Err(ConfigError::validation("shift_scale", "must be finite"));
        }
        let s = &file.solver;
        let solver = SolverConfig {
            mixing: s.mixing,
            tol: s.tol,
            max_iter: s.max_iter,
        };
        solver.validate().map_err(|e| ConfigError::from_core("solver", e))?;
        for (key, v) in [("fdr_tol", file.checks.fdr_tol), ("kms_tol", file.checks.kms_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::validation(key, "must be positive"));
            }
        }
        Ok(Self {
            file,
            grid,
            thermal,
            model,
            solver,
        })
    }

    /// Statistics check deferred from [`RunConfig::build`] for the Keldysh solvers.
    pub fn require_boson(&self) -> Result<(), ConfigError> {
        if self.thermal.eta == Statistics::Boson {
            Ok(())
        } else {
            Err(ConfigError::validation("eta", "the Keldysh solvers treat a bosonic mode only"))
        }
    }

    pub fn out_dir(&self) -> &Path {
        &self.file.output.dir
    }
}

fn density(j: &DensitySection, base: &Path) -> Result<SpectralDensity<f64>, ConfigError> {
    match j.kind {
        DensityKind::OhmicLorentzian => {
            SpectralDensity::ohmic(j.amplitude, j.cutoff).map_err(|e| ConfigError::from_core("j", e))
        }
        DensityKind::Tabulated => {
            let rel = j
                .file
                .as_ref()
                .ok_or_else(|| ConfigError::validation("j.file", "required when kind = \"tabulated\""))?;
            let path = base.join(rel);
            let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io {
                path: path.clone(),
                source,
            })?;
            SpectralDensity::parse_table(&text).map_err(|e| match e {
                CoreError::Parse { line, message } => {
                    ConfigError::validation("j.file", format!("{}: line {line}: {message}", path.display()))
                }
                other => ConfigError::validation("j.file", other.to_string()),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let f = FileConfig::parse("").unwrap();
        assert_eq!(f, FileConfig::default());
        let rc = RunConfig::build(f, Path::new(".")).unwrap();
        assert_eq!(rc.grid.len(), 4096);
        assert_eq!(rc.model.lambda_sq, 0.02);
        assert_eq!(rc.solver.max_iter, 500);
    }

    #[test]
    fn defaults_round_trip_through_toml() {
        let text = FileConfig::default().to_toml();
        assert_eq!(FileConfig::parse(&text).unwrap(), FileConfig::default());
    }

    #[test]
    fn negative_lambda_is_rejected_by_key() {
        let f = FileConfig::parse("[model]\nlambda_sq = -0.1\n").unwrap();
        match RunConfig::build(f, Path::new(".")) {
            Err(ConfigError::Validation { key, reason }) => {
                assert_eq!(key, "lambda_sq");
                assert_eq!(reason, "must be ≥ 0");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_named() {
        match FileConfig::parse("[model]\nomega0 = 1.0\nomgea = 2.0\n") {
            Err(ConfigError::Validation { key, .. }) => assert_eq!(key, "model.omgea"),
            other => panic!("{other:?}"),
        }
        match FileConfig::parse("[modle]\n") {
            Err(ConfigError::Validation { key, .. }) => assert_eq!(key, "modle"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_and_type_errors_carry_the_line() {
        match FileConfig::parse("[model]\nomega0 = 1.0\nlambda_sq = = 2\n") {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match FileConfig::parse("[grid]\n\nn = \"many\"\n") {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn omitted_amplitude_defaults_to_pi() {
        let f = FileConfig::parse("[j]\nkind = \"ohmic_lorentzian\"\ncutoff = 2.0\n").unwrap();
        assert_eq!(f.j.amplitude, PI);
    }

    #[test]
    fn fermions_parse_but_are_refused_by_the_solvers() {
        let f = FileConfig::parse("[thermal]\neta = 1\n").unwrap();
        let rc = RunConfig::build(f, Path::new(".")).unwrap();
        assert!(rc.require_boson().is_err());
    }
}
