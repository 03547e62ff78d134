//! Run-configuration JSON: model and mesh selection, materials, integrator
//! settings, per-port input signals, optional controller and passivation
//! feedback, output options.

use phdec::complex::{
    generate_interval_mesh, generate_strip_mesh, mesh_from_json, DualGeometry, SimplicialComplex,
};
use phdec::integrate::{InputSignal, Method, PortSignal};
use phdec::models::{build_telegraph, build_wave2d, Causality};
use phdec::phs::{close_loop, Controller, MaterialField, PortHamiltonianSystem};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Invalid(String),
    #[error("model error: {0}")]
    Model(#[from] phdec::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    #[serde(default)]
    pub causality: Option<CausalityKind>,
    pub mesh: MeshSpec,
    #[serde(default)]
    pub materials: Materials,
    #[serde(default)]
    pub integrator: IntegratorSpec,
    #[serde(default)]
    pub signals: Vec<SignalEntry>,
    #[serde(default)]
    pub initial_state: Option<InitialState>,
    #[serde(default)]
    pub controller: Option<ControllerSpec>,
    #[serde(default)]
    pub passivation: Option<bool>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub spectrum: Option<SpectrumSpec>,
    #[serde(default)]
    pub dump_matrices: Option<bool>,
    #[serde(default)]
    pub fault_injection: Option<FaultInjection>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Telegraph,
    Wave2d,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CausalityKind {
    Voltage,
    Current,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSpec {
    Interval {
        n_edges: usize,
        length: f64,
    },
    Strip {
        rows: usize,
        cols: usize,
        width: f64,
        height: f64,
    },
    File {
        path: String,
    },
}

/// A material coefficient: one value broadcast over all cells, or one
/// value per cell.
#[derive(Debug, Deserialize, Clone)]
#[serde(untagged)]
pub enum ScalarOrVec {
    Scalar(f64),
    PerCell(Vec<f64>),
}

impl ScalarOrVec {
    pub fn resolve(&self, len: usize, name: &str) -> Result<MaterialField, ConfigError> {
        let values = match self {
            ScalarOrVec::Scalar(v) => vec![*v; len],
            ScalarOrVec::PerCell(v) => {
                if v.len() != len {
                    return Err(ConfigError::Invalid(format!(
                        "material '{name}' has {} entries, mesh needs {len}",
                        v.len()
                    )));
                }
                v.clone()
            }
        };
        MaterialField::new(values).map_err(ConfigError::Model)
    }
}

fn default_material() -> ScalarOrVec {
    ScalarOrVec::Scalar(1.0)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Materials {
    /// Mass density (wave model), per vertex-dual cell.
    #[serde(default = "default_material")]
    pub mu: ScalarOrVec,
    /// Young's modulus (wave model), per edge.
    #[serde(default = "default_material")]
    pub e: ScalarOrVec,
    /// Distributed capacitance (telegraph).
    #[serde(default = "default_material")]
    pub c: ScalarOrVec,
    /// Distributed inductance (telegraph).
    #[serde(default = "default_material")]
    pub l: ScalarOrVec,
}

impl Default for Materials {
    fn default() -> Self {
        Materials {
            mu: default_material(),
            e: default_material(),
            c: default_material(),
            l: default_material(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    #[serde(default = "default_method")]
    pub method: MethodKind,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Midpoint,
    Leapfrog,
}

fn default_method() -> MethodKind {
    MethodKind::Midpoint
}
fn default_dt() -> f64 {
    1e-3
}
fn default_t_final() -> f64 {
    1.0
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        IntegratorSpec {
            method: default_method(),
            dt: default_dt(),
            t_final: default_t_final(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalEntry {
    pub port: usize,
    pub signal: SignalKind,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalKind {
    Zero,
    Constant {
        value: f64,
    },
    Sine {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    Piecewise {
        schedule: Vec<(f64, f64)>,
    },
}

impl SignalKind {
    fn to_port_signal(&self) -> PortSignal {
        match self {
            SignalKind::Zero => PortSignal::Zero,
            SignalKind::Constant { value } => PortSignal::Constant(*value),
            SignalKind::Sine {
                amplitude,
                frequency,
                phase,
            } => PortSignal::Sinusoid {
                amplitude: *amplitude,
                frequency: *frequency,
                phase: *phase,
            },
            SignalKind::Piecewise { schedule } => PortSignal::PiecewiseConstant(schedule.clone()),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Zero,
    Random {
        #[serde(default = "default_scale")]
        scale: f64,
    },
    Values {
        values: Vec<f64>,
    },
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSpec {
    pub gc: Vec<Vec<f64>>,
    #[serde(rename = "Hc_quadratic", alias = "hc_quadratic")]
    pub hc_quadratic: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default)]
    pub format: Option<FormatKind>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum FormatKind {
    Csv,
    Svg,
    Both,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub resolutions: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub n_modes: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultInjection {
    /// Negative-control self-test: flip one sign in the Dirac boundary
    /// block so `verify` reports a nonzero skewness residual.
    #[serde(default)]
    pub dirac_sign_flip: bool,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        if !(cfg.integrator.dt > 0.0) || !(cfg.integrator.t_final > 0.0) {
            return Err(ConfigError::Invalid(
                "dt and t_final must be positive".into(),
            ));
        }
        Ok(cfg)
    }

    pub fn from_file(path: &str) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        RunConfig::from_json(&text)
    }

    pub fn method(&self) -> Method {
        match self.integrator.method {
            MethodKind::Midpoint => Method::Midpoint,
            MethodKind::Leapfrog => Method::Leapfrog,
        }
    }

    pub fn build_mesh(&self) -> Result<(SimplicialComplex, DualGeometry), ConfigError> {
        match &self.mesh {
            MeshSpec::Interval { n_edges, length } => {
                Ok(generate_interval_mesh(*n_edges, *length)?)
            }
            MeshSpec::Strip {
                rows,
                cols,
                width,
                height,
            } => Ok(generate_strip_mesh(*rows, *cols, *width, *height)?),
            MeshSpec::File { path } => {
                let text = std::fs::read_to_string(path)?;
                let complex = mesh_from_json(&text)?;
                let geometry = phdec::complex::compute_dual_geometry(&complex)?;
                Ok((complex, geometry))
            }
        }
    }

    /// Build the plant described by the config on an already-built mesh.
    pub fn build_system(
        &self,
        complex: &SimplicialComplex,
        geometry: &DualGeometry,
    ) -> Result<PortHamiltonianSystem, ConfigError> {
        let sys = match self.model {
            ModelKind::Wave2d => {
                let mu = self.materials.mu.resolve(complex.count(0), "mu")?;
                let young = self.materials.e.resolve(complex.count(1), "e")?;
                build_wave2d(complex, geometry, &mu, &young)?
            }
            ModelKind::Telegraph => {
                let causality = match self.causality.unwrap_or(CausalityKind::Current) {
                    CausalityKind::Voltage => Causality::VoltageInput,
                    CausalityKind::Current => Causality::CurrentInput,
                };
                let (c_len, l_len) = match causality {
                    Causality::VoltageInput => (complex.count(1), complex.count(0)),
                    Causality::CurrentInput => (complex.count(0), complex.count(1)),
                };
                let cap = self.materials.c.resolve(c_len, "c")?;
                let ind = self.materials.l.resolve(l_len, "l")?;
                build_telegraph(complex, geometry, &cap, &ind, causality)?
            }
        };
        if let Some(ctrl) = &self.controller {
            if self.passivation == Some(true) {
                return Err(ConfigError::Invalid(
                    "controller and passivation cannot both be enabled".into(),
                ));
            }
            let controller = Controller::new(ctrl.gc.clone(), ctrl.hc_quadratic.clone())
                .map_err(ConfigError::Model)?;
            return Ok(close_loop(&sys, &controller)?);
        }
        Ok(sys)
    }

    /// Per-port input signal; unnamed ports stay zero.
    pub fn build_signal(&self, n_ports: usize) -> Result<InputSignal, ConfigError> {
        let mut ports = vec![PortSignal::Zero; n_ports];
        for entry in &self.signals {
            if entry.port >= n_ports {
                return Err(ConfigError::Invalid(format!(
                    "signal references port {}, model has {} ports",
                    entry.port, n_ports
                )));
            }
            ports[entry.port] = entry.signal.to_port_signal();
        }
        Ok(InputSignal { ports })
    }

    pub fn build_initial_state(&self, dim: usize, seed: u64) -> Result<Vec<f64>, ConfigError> {
        match &self.initial_state {
            None | Some(InitialState::Zero) => Ok(vec![0.0; dim]),
            Some(InitialState::Random { scale }) => {
                let mut rng = phdec::rng::Rng::new(seed ^ 0x1757);
                Ok(rng.vec_signed(dim).into_iter().map(|v| v * scale).collect())
            }
            Some(InitialState::Values { values }) => {
                if values.len() != dim {
                    return Err(ConfigError::Invalid(format!(
                        "initial state has {} entries, system needs {dim}",
                        values.len()
                    )));
                }
                Ok(values.clone())
            }
        }
    }
}
