//! JSON run configuration.
//!
//! ```json
//! {
//!   "partition": { "A": [-1, 0], "B": [0, 1] },
//!   "kernels": { "J": { "profile": "box", "radius": 1 },
//!                "G": { "profile": "gaussian", "radius": 0.5, "sigma": 0.2 } },
//!   "resolution": { "nA": 64, "nB": 64 },
//!   "model": "parabolic_elliptic",
//!   "time": { "T": 1.0, "dt": 0.01, "scheme": "implicit_euler" },
//!   "initial": { "u0": "cos(pi*x)" },
//!   "outputs": { "trajectory_path": "trajectory.csv",
//!                "diagnostics_path": "diagnostics.csv", "snapshot_stride": 1 }
//! }
//! ```

use locnl_core::{DVector, Grid, Kernel, ModelKind, Partition1D, Profile, TimeScheme};
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::expr::Expr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub partition: PartitionSpec,
    pub kernels: KernelsSpec,
    pub resolution: ResolutionSpec,
    pub model: ModelSpec,
    pub time: TimeSpec,
    pub initial: InitialSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<EpsilonSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSpec {
    #[serde(rename = "A")]
    pub a: [f64; 2],
    #[serde(rename = "B")]
    pub b: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelsSpec {
    #[serde(rename = "J")]
    pub j: KernelSpec,
    #[serde(rename = "G")]
    pub g: KernelSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileSpec {
    Box,
    Tent,
    Gaussian,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub profile: ProfileSpec,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// `[radius, value]` pairs for table profiles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionSpec {
    #[serde(rename = "nA")]
    pub n_a: usize,
    #[serde(rename = "nB")]
    pub n_b: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpec {
    ParabolicElliptic,
    EllipticParabolic,
}

impl From<ModelSpec> for ModelKind {
    fn from(m: ModelSpec) -> ModelKind {
        match m {
            ModelSpec::ParabolicElliptic => ModelKind::ParabolicElliptic,
            ModelSpec::EllipticParabolic => ModelKind::EllipticParabolic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeSpec {
    #[default]
    ImplicitEuler,
    CrankNicolson,
}

impl From<SchemeSpec> for TimeScheme {
    fn from(s: SchemeSpec) -> TimeScheme {
        match s {
            SchemeSpec::ImplicitEuler => TimeScheme::ImplicitEuler,
            SchemeSpec::CrankNicolson => TimeScheme::CrankNicolson,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    #[serde(rename = "T")]
    pub t_end: f64,
    pub dt: f64,
    #[serde(default)]
    pub scheme: SchemeSpec,
}

/// Either an expression in `x` or one value per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialData {
    Expression(String),
    Samples(Vec<f64>),
}

impl InitialData {
    /// Values at the cell centers of `grid`.
    pub fn sample(&self, grid: &Grid) -> Result<DVector<f64>, String> {
        match self {
            InitialData::Expression(text) => {
                let e = Expr::parse(text).map_err(|e| e.to_string())?;
                Ok(grid.sample(|x| e.eval(x)))
            }
            InitialData::Samples(values) => {
                if values.len() != grid.len() {
                    return Err(format!("expected {} samples, got {}", grid.len(), values.len()));
                }
                Ok(DVector::from_column_slice(values))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u0: Option<InitialData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<InitialData>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_trajectory_path")]
    pub trajectory_path: String,
    #[serde(default = "default_diagnostics_path")]
    pub diagnostics_path: String,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
}

fn default_trajectory_path() -> String {
    "trajectory.csv".into()
}

fn default_diagnostics_path() -> String {
    "diagnostics.csv".into()
}

fn default_stride() -> usize {
    1
}

impl Default for OutputSpec {
    fn default() -> OutputSpec {
        OutputSpec {
            trajectory_path: default_trajectory_path(),
            diagnostics_path: default_diagnostics_path(),
            snapshot_stride: default_stride(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonSpec {
    pub ladder: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_layer: Option<f64>,
}

/// Parses and validates a JSON run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::Invalid { path, message: e.into_inner().to_string() }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn invalid(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { path: path.into(), message: message.into() }
}

impl KernelSpec {
    pub fn build(&self, path: &str) -> Result<Kernel, ConfigError> {
        let profile = match self.profile {
            ProfileSpec::Box => Profile::Box,
            ProfileSpec::Tent => Profile::Tent,
            ProfileSpec::Gaussian => {
                let sigma = self.sigma.ok_or_else(|| invalid(&format!("{path}.sigma"), "gaussian profile needs sigma"))?;
                Profile::TruncatedGaussian { sigma }
            }
            ProfileSpec::Table => {
                let samples = self
                    .samples
                    .as_ref()
                    .ok_or_else(|| invalid(&format!("{path}.samples"), "table profile needs samples"))?;
                Profile::Table(samples.iter().map(|s| (s[0], s[1])).collect())
            }
        };
        Kernel::normalize(profile, self.radius).map_err(|e| invalid(path, e.to_string()))
    }
}

impl RunConfig {
    pub fn model_kind(&self) -> ModelKind {
        self.model.into()
    }

    pub fn scheme(&self) -> TimeScheme {
        self.time.scheme.into()
    }

    pub fn build_partition(&self) -> Result<Partition1D, ConfigError> {
        let (a, b) = (self.partition.a, self.partition.b);
        Partition1D::new((a[0], a[1]), (b[0], b[1])).map_err(|e| invalid("partition", e.to_string()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.build_partition()?;
        self.kernels.j.build("kernels.J")?;
        self.kernels.g.build("kernels.G")?;
        if self.resolution.n_a < 2 {
            return Err(invalid("resolution.nA", "need at least 2 cells"));
        }
        if self.resolution.n_b < 2 {
            return Err(invalid("resolution.nB", "need at least 2 cells"));
        }
        let t = &self.time;
        if !(t.t_end.is_finite() && t.t_end > 0.0) {
            return Err(invalid("time.T", "final time must be positive"));
        }
        if !(t.dt.is_finite() && t.dt > 0.0) {
            return Err(invalid("time.dt", "time step must be positive"));
        }
        if t.dt > t.t_end {
            return Err(invalid("time.dt", "time step exceeds the final time"));
        }
        match self.model {
            ModelSpec::ParabolicElliptic if self.initial.u0.is_none() => {
                return Err(invalid("initial.u0", "the parabolic–elliptic model evolves u and needs u0"));
            }
            ModelSpec::EllipticParabolic if self.initial.v0.is_none() => {
                return Err(invalid("initial.v0", "the elliptic–parabolic model evolves v and needs v0"));
            }
            _ => {}
        }
        for (name, data, n) in [
            ("initial.u0", &self.initial.u0, self.resolution.n_a),
            ("initial.v0", &self.initial.v0, self.resolution.n_b),
        ] {
            match data {
                Some(InitialData::Expression(text)) => {
                    Expr::parse(text).map_err(|e| invalid(name, e.to_string()))?;
                }
                Some(InitialData::Samples(values)) if values.len() != n => {
                    return Err(invalid(name, format!("expected {n} samples, got {}", values.len())));
                }
                _ => {}
            }
        }
        let o = &self.outputs;
        if o.snapshot_stride == 0 {
            return Err(invalid("outputs.snapshot_stride", "stride must be at least 1"));
        }
        if o.trajectory_path.trim().is_empty() {
            return Err(invalid("outputs.trajectory_path", "path is empty"));
        }
        if o.diagnostics_path.trim().is_empty() {
            return Err(invalid("outputs.diagnostics_path", "path is empty"));
        }
        if let Some(eps) = &self.epsilon {
            if eps.ladder.len() < 3 {
                return Err(invalid("epsilon.ladder", "need at least 3 rungs"));
            }
            if eps.ladder.iter().any(|e| !(e.is_finite() && *e > 0.0))
                || eps.ladder.windows(2).any(|w| w[1] >= w[0])
            {
                return Err(invalid("epsilon.ladder", "rungs must be positive and strictly decreasing"));
            }
            if let Some(tl) = eps.t_layer {
                if !(tl > 0.0 && tl <= t.t_end) {
                    return Err(invalid("epsilon.t_layer", "layer cutoff must lie in (0, T]"));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
