//! TOML scenario configuration.
//!
//! Paths are resolved relative to the config file. Physical values accept
//! `"value unit"` strings (see [`crate::units`]) or bare SI numbers.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use sbdyn_core::controller::{select_gains, ControlError, ControlGains, SecondOrderSpec};
use sbdyn_core::gravity::{GravityError, GravityModel};
use sbdyn_core::guidance::{GuidanceConfig, GuidanceError, LandingGuidance, TraverseRate};
use sbdyn_core::rigid_body::{
    so3, AsteroidModel, AsteroidRotation, DumbbellParams, DynamicsError, Dynamics, MomentConvention, SpacecraftState,
};
use sbdyn_core::simulation::Scenario;
use sbdyn_core::{Matrix3, Vector3, GRAVITATIONAL_CONSTANT};

use crate::mesh_io::{load_mesh, LengthUnit, MeshIoError};
use crate::units::{vector_si, Dimension, Quantity, UnitError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Syntax(String),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error(transparent)]
    Unit(#[from] UnitError),
    #[error("mesh: {0}")]
    Mesh(#[from] MeshIoError),
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub mesh: MeshSection,
    pub asteroid: AsteroidSection,
    pub spacecraft: SpacecraftSection,
    pub initial: InitialSection,
    pub guidance: GuidanceSection,
    #[serde(default)]
    pub control: ControlSection,
    pub simulation: SimulationSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub path: PathBuf,
    /// Overrides the OBJ `# units` header.
    pub units: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsteroidSection {
    pub density: Quantity,
    pub rotation_period: Option<Quantity>,
    pub spin_axis: Option<[f64; 3]>,
    pub gravitational_constant: Option<f64>,
    #[serde(default = "yes")]
    pub gravity: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacecraftSection {
    pub m1: Quantity,
    pub m2: Quantity,
    pub length: Quantity,
    pub sphere_radius: Quantity,
    /// `body-frame` (default) or `literal`.
    pub moment_convention: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub position: [Quantity; 3],
    pub velocity: Option<[Quantity; 3]>,
    pub attitude_axis: Option<[f64; 3]>,
    pub attitude_angle: Option<Quantity>,
    pub angular_velocity: Option<[Quantity; 3]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuidanceSection {
    pub initial_radius: Quantity,
    pub switch_time: Quantity,
    pub descent_rate: Option<Quantity>,
    /// `continuous` (default) or `literal`.
    pub continuity: Option<String>,
    /// `quarter-turn` (default) or `align-f1`.
    pub traverse: Option<String>,
    /// Defaults to the largest vertex radius of the mesh.
    pub surface_radius: Option<Quantity>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpec {
    pub zeta: f64,
    pub natural_frequency: Quantity,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitGains {
    pub k_x: f64,
    pub k_v: f64,
    pub k_r: f64,
    pub k_omega: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSection {
    #[serde(default = "yes")]
    pub enabled: bool,
    pub gains: Option<ExplicitGains>,
    pub translational: Option<DesignSpec>,
    pub rotational: Option<DesignSpec>,
}

impl Default for ControlSection {
    fn default() -> Self {
        Self {
            enabled: true,
            gains: None,
            translational: None,
            rotational: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub dt: Quantity,
    pub t_final: Quantity,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

/// Validated configuration in SI units with resolved paths.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub mesh_path: PathBuf,
    pub mesh_units: Option<LengthUnit>,
    pub density: f64,
    pub gravitational_constant: f64,
    pub gravity_enabled: bool,
    /// rad/s about `e₃`.
    pub spin_rate: f64,
    pub masses: [f64; 2],
    pub length: f64,
    pub sphere_radius: f64,
    pub moment_convention: MomentConvention,
    pub initial_position: [f64; 3],
    pub initial_velocity: [f64; 3],
    /// Axis-angle vector of `R₀`.
    pub initial_rotation: [f64; 3],
    pub initial_angular_velocity: [f64; 3],
    pub guidance: GuidanceConfig,
    /// `None` means "largest vertex radius".
    pub surface_radius: Option<f64>,
    pub control: Option<GainSource>,
    pub dt: f64,
    pub t_final: f64,
    pub seed: Option<u64>,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainSource {
    Explicit(ControlGains),
    Design {
        translational: SecondOrderSpec,
        rotational: SecondOrderSpec,
    },
}

fn positive(value: f64, field: &str) -> Result<f64, ConfigError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(invalid(field, format!("must be positive, got {value}")))
    }
}

fn design(spec: &Option<DesignSpec>, default: SecondOrderSpec, field: &str) -> Result<SecondOrderSpec, ConfigError> {
    let Some(spec) = spec else { return Ok(default) };
    let wn = spec.natural_frequency.si(Dimension::AngularRate, &format!("{field}.natural_frequency"))?;
    SecondOrderSpec::new(spec.zeta, wn).map_err(|e| invalid(field, e.to_string()))
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))
    }

    /// Check values and convert to SI. Relative paths are joined to `base`.
    pub fn resolve(&self, base: &Path) -> Result<ScenarioConfig, ConfigError> {
        use Dimension::*;
        let a = &self.asteroid;
        let density = positive(a.density.si(Density, "asteroid.density")?, "asteroid.density")?;
        let gravitational_constant = positive(
            a.gravitational_constant.unwrap_or(GRAVITATIONAL_CONSTANT),
            "asteroid.gravitational_constant",
        )?;
        let spin_rate = match &a.rotation_period {
            None => 0.0,
            Some(p) => 2.0 * std::f64::consts::PI / positive(p.si(Time, "asteroid.rotation_period")?, "asteroid.rotation_period")?,
        };
        if let Some(axis) = a.spin_axis {
            let v = Vector3::from(axis);
            if (v.normalize() - Vector3::z()).norm() > 1e-12 || !v.iter().all(|c| c.is_finite()) {
                return Err(invalid("asteroid.spin_axis", "only the +e3 spin axis [0, 0, 1] is supported"));
            }
        }

        let s = &self.spacecraft;
        let m1 = positive(s.m1.si(Mass, "spacecraft.m1")?, "spacecraft.m1")?;
        let m2 = positive(s.m2.si(Mass, "spacecraft.m2")?, "spacecraft.m2")?;
        let length = s.length.si(Length, "spacecraft.length")?;
        if !(length >= 0.0) {
            return Err(invalid("spacecraft.length", "must be non-negative"));
        }
        let sphere_radius = positive(s.sphere_radius.si(Length, "spacecraft.sphere_radius")?, "spacecraft.sphere_radius")?;
        let moment_convention = match s.moment_convention.as_deref() {
            None | Some("body-frame") => MomentConvention::BodyFrame,
            Some("literal") => MomentConvention::Literal,
            Some(other) => {
                return Err(invalid(
                    "spacecraft.moment_convention",
                    format!("expected `body-frame` or `literal`, got `{other}`"),
                ))
            }
        };

        let i = &self.initial;
        let zero = || [Quantity::Number(0.0), Quantity::Number(0.0), Quantity::Number(0.0)];
        let initial_position = vector_si(&i.position, Length, "initial.position")?;
        let initial_velocity = vector_si(i.velocity.as_ref().unwrap_or(&zero()), Speed, "initial.velocity")?;
        let initial_angular_velocity =
            vector_si(i.angular_velocity.as_ref().unwrap_or(&zero()), AngularRate, "initial.angular_velocity")?;
        let angle = match &i.attitude_angle {
            Some(q) => q.si(Angle, "initial.attitude_angle")?,
            None => 0.0,
        };
        let axis = Vector3::from(i.attitude_axis.unwrap_or([0.0, 0.0, 1.0]));
        if !(axis.norm() > 0.0) || !axis.iter().all(|c| c.is_finite()) {
            return Err(invalid("initial.attitude_axis", "must be a non-zero vector"));
        }
        let rotation = axis.normalize() * angle;

        let g = &self.guidance;
        let r0 = positive(g.initial_radius.si(Length, "guidance.initial_radius")?, "guidance.initial_radius")?;
        let td = positive(g.switch_time.si(Time, "guidance.switch_time")?, "guidance.switch_time")?;
        let mut guidance = match g.continuity.as_deref() {
            None | Some("continuous") => GuidanceConfig::new(r0, td),
            Some("literal") => GuidanceConfig::literal(r0, td),
            Some(other) => {
                return Err(invalid(
                    "guidance.continuity",
                    format!("expected `continuous` or `literal`, got `{other}`"),
                ))
            }
        };
        guidance.traverse = match g.traverse.as_deref() {
            None | Some("quarter-turn") => TraverseRate::QuarterTurn,
            Some("align-f1") => TraverseRate::AlignWithF1,
            Some(other) => {
                return Err(invalid(
                    "guidance.traverse",
                    format!("expected `quarter-turn` or `align-f1`, got `{other}`"),
                ))
            }
        };
        if let Some(rate) = &g.descent_rate {
            guidance.descent_rate = rate.si(Speed, "guidance.descent_rate")?;
        }
        let surface_radius = match &g.surface_radius {
            Some(q) => Some(q.si(Length, "guidance.surface_radius")?),
            None => None,
        };

        let c = &self.control;
        let control = if !c.enabled {
            None
        } else if let Some(k) = &c.gains {
            if c.translational.is_some() || c.rotational.is_some() {
                return Err(invalid("control", "give either `gains` or design specs, not both"));
            }
            Some(GainSource::Explicit(
                ControlGains::new(k.k_x, k.k_v, k.k_r, k.k_omega).map_err(|e| invalid("control.gains", e.to_string()))?,
            ))
        } else {
            Some(GainSource::Design {
                translational: design(&c.translational, SecondOrderSpec::DEFAULT_TRANSLATIONAL, "control.translational")?,
                rotational: design(&c.rotational, SecondOrderSpec::DEFAULT_ROTATIONAL, "control.rotational")?,
            })
        };

        let sim = &self.simulation;
        let dt = positive(sim.dt.si(Time, "simulation.dt")?, "simulation.dt")?;
        let t_final = positive(sim.t_final.si(Time, "simulation.t_final")?, "simulation.t_final")?;
        if t_final < td {
            return Err(invalid("simulation.t_final", "must not be earlier than guidance.switch_time"));
        }

        let mesh_units = match &self.mesh.units {
            None => None,
            Some(u) => Some(LengthUnit::parse(u).ok_or_else(|| invalid("mesh.units", format!("unknown unit `{u}`")))?),
        };

        Ok(ScenarioConfig {
            mesh_path: base.join(&self.mesh.path),
            mesh_units,
            density,
            gravitational_constant,
            gravity_enabled: a.gravity,
            spin_rate,
            masses: [m1, m2],
            length,
            sphere_radius,
            moment_convention,
            initial_position,
            initial_velocity,
            initial_rotation: [rotation.x, rotation.y, rotation.z],
            initial_angular_velocity,
            guidance,
            surface_radius,
            control,
            dt,
            t_final,
            seed: sim.seed,
            csv: self.output.csv.as_ref().map(|p| base.join(p)),
            json: self.output.json.as_ref().map(|p| base.join(p)),
        })
    }
}

/// Read, parse and validate a scenario file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    ScenarioFile::parse(&text)?.resolve(base)
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("gravity model: {0}")]
    Gravity(#[from] GravityError),
    #[error("spacecraft: {0}")]
    Spacecraft(#[from] DynamicsError),
    #[error("guidance: {0}")]
    Guidance(#[from] GuidanceError),
    #[error("control: {0}")]
    Control(#[from] ControlError),
}

impl From<MeshIoError> for BuildError {
    fn from(e: MeshIoError) -> Self {
        Self::Config(e.into())
    }
}

impl ScenarioConfig {
    pub fn initial_state(&self) -> SpacecraftState {
        SpacecraftState {
            position: Vector3::from(self.initial_position),
            velocity: Vector3::from(self.initial_velocity),
            attitude: so3::exp(&Vector3::from(self.initial_rotation)),
            angular_velocity: Vector3::from(self.initial_angular_velocity),
            time: 0.0,
        }
    }

    /// Load the mesh and assemble the runnable scenario.
    pub fn build(&self) -> Result<Scenario<LandingGuidance>, BuildError> {
        let mesh = load_mesh(&self.mesh_path, self.mesh_units)?;
        let body = GravityModel::from_mesh(&mesh, self.gravitational_constant, self.density)?;
        let rotation = AsteroidRotation::new(self.spin_rate, Matrix3::identity());
        let mut asteroid = AsteroidModel::new(body, rotation);
        asteroid.gravity_enabled = self.gravity_enabled;
        let params = DumbbellParams::new(self.masses[0], self.masses[1], self.length, self.sphere_radius)?;

        let surface = self.surface_radius.unwrap_or_else(|| mesh.max_vertex_radius());
        let guidance = LandingGuidance::new(self.guidance.with_surface_radius(surface), rotation)?;
        let gains = match self.control {
            None => None,
            Some(GainSource::Explicit(k)) => Some(k),
            Some(GainSource::Design {
                translational,
                rotational,
            }) => Some(select_gains(&params, &translational, &rotational)?),
        };
        let mut dynamics = Dynamics::new(asteroid, params);
        dynamics.moment_convention = self.moment_convention;
        Ok(Scenario {
            dynamics,
            command: guidance,
            gains,
            initial: self.initial_state(),
            dt: self.dt,
            t_final: self.t_final,
            seed: self.seed,
        })
    }
}
