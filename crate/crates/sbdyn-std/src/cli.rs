//! The `sbdyn` command line.
//!
//! Exit codes: 0 success, 1 I/O failure while writing outputs, 2 bad
//! arguments, configuration or mesh, 3 collision or a command below the
//! surface, 4 numerical abort.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use sbdyn_core::controller::SecondOrderSpec;
use sbdyn_core::gravity::{Containment, GravityModel};
use sbdyn_core::{Vector3, GRAVITATIONAL_CONSTANT};

use crate::export::summary_json;
use crate::mesh_io::{load_mesh, write_cache, LengthUnit};
use crate::scenario::{exit_code, run_file};

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_TERMINATED: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(name = "sbdyn", version, about = "Spacecraft dynamics and landing about small bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and print the run summary as JSON.
    Run {
        config: PathBuf,
        /// Overrides `simulation.seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate the polyhedron field at one body-fixed point.
    Field {
        #[arg(long)]
        mesh: PathBuf,
        /// `x,y,z` in meters.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: [f64; 3],
        /// kg/m^3
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        #[arg(long, default_value_t = GRAVITATIONAL_CONSTANT)]
        g: f64,
        /// Vertex units, overriding the file header (`m` or `km`).
        #[arg(long, value_parser = parse_unit)]
        units: Option<LengthUnit>,
    },
    /// Check that a mesh is a closed, consistently oriented triangle surface.
    ValidateMesh {
        mesh: PathBuf,
        #[arg(long, value_parser = parse_unit)]
        units: Option<LengthUnit>,
        /// Also write the binary cache here.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Controller gains from second-order response specifications.
    Gains {
        /// Total spacecraft mass, kg.
        #[arg(long, allow_hyphen_values = true)]
        mass: f64,
        #[arg(long, default_value_t = 1.0)]
        zeta: f64,
        /// Translational natural frequency, rad/s.
        #[arg(long, default_value_t = 0.05)]
        wn: f64,
        /// Largest principal moment of inertia, kg m^2.
        #[arg(long, allow_hyphen_values = true)]
        inertia_max: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        zeta_att: f64,
        #[arg(long, default_value_t = 0.2)]
        wn_att: f64,
    },
}

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got `{s}`"));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|e| format!("`{p}`: {e}"))?;
    }
    Ok(out)
}

fn parse_unit(s: &str) -> Result<LengthUnit, String> {
    LengthUnit::parse(s).ok_or_else(|| format!("unknown length unit `{s}`"))
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn fail(&mut self, code: u8, message: impl Display) -> u8 {
        let _ = writeln!(self.err, "error: {message}");
        code
    }

    fn print(&mut self, value: &Value) -> u8 {
        let text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
        match writeln!(self.out, "{text}") {
            Ok(()) => EXIT_OK,
            Err(e) => self.fail(EXIT_IO, e),
        }
    }
}

/// Parse `args` (including the program name) and execute. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut io = Io { out, err };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let target = if e.use_stderr() { &mut io.err } else { &mut io.out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match cli.command {
        Command::Run { config, seed } => match run_file(&config, seed) {
            Ok((_, log)) => {
                let status = io.print(&json!({ "records": log.records.len(), "summary": summary_json(&log.summary) }));
                if status != EXIT_OK {
                    return status;
                }
                exit_code(log.summary.termination) as u8
            }
            Err(e) => io.fail(e.exit_code() as u8, e),
        },
        Command::Field {
            mesh,
            point,
            density,
            g,
            units,
        } => {
            let model = match load_mesh(&mesh, units) {
                Ok(m) => match GravityModel::from_mesh(&m, g, density) {
                    Ok(model) => model,
                    Err(e) => return io.fail(EXIT_CONFIG, e),
                },
                Err(e) => return io.fail(EXIT_CONFIG, e),
            };
            let p = Vector3::from(point);
            let f = match model.evaluate(&p) {
                Ok(f) => f,
                Err(e) => return io.fail(EXIT_TERMINATED, e),
            };
            let h = f.gradient;
            let location = match model.classify(&p) {
                Ok(Containment::Interior) => "inside",
                Ok(Containment::Exterior) => "outside",
                Err(_) => "surface",
            };
            io.print(&json!({
                "point": point,
                "potential": f.potential,
                "attraction": [f.attraction.x, f.attraction.y, f.attraction.z],
                "gradient_matrix": [
                    [h[(0, 0)], h[(0, 1)], h[(0, 2)]],
                    [h[(1, 0)], h[(1, 1)], h[(1, 2)]],
                    [h[(2, 0)], h[(2, 1)], h[(2, 2)]],
                ],
                "laplacian": f.laplacian,
                "location": location,
                "mass": model.mass(),
            }))
        }
        Command::ValidateMesh { mesh, units, cache } => {
            let m = match load_mesh(&mesh, units) {
                Ok(m) => m,
                Err(e) => return io.fail(EXIT_CONFIG, e),
            };
            let report = match m.check_manifold() {
                Ok(r) => r,
                Err(e) => return io.fail(EXIT_CONFIG, e),
            };
            if let Some(path) = cache {
                if let Err(e) = write_cache(&m, &path) {
                    return io.fail(EXIT_IO, e);
                }
            }
            let c = m.volume_centroid();
            io.print(&json!({
                "vertices": m.vertices().len(),
                "edges": report.edges,
                "faces": m.faces().len(),
                "euler_characteristic": report.euler_characteristic,
                "volume": m.volume(),
                "centroid": [c.x, c.y, c.z],
                "max_vertex_radius": m.max_vertex_radius(),
            }))
        }
        Command::Gains {
            mass,
            zeta,
            wn,
            inertia_max,
            zeta_att,
            wn_att,
        } => {
            let specs = SecondOrderSpec::new(zeta, wn).and_then(|t| Ok((t, SecondOrderSpec::new(zeta_att, wn_att)?)));
            let (trans, rot) = match specs {
                Ok(s) => s,
                Err(e) => return io.fail(EXIT_CONFIG, e),
            };
            if !(mass.is_finite() && mass > 0.0) {
                return io.fail(EXIT_CONFIG, "--mass must be positive");
            }
            let (k_x, k_v) = trans.gains_for(mass);
            let mut out = json!({ "k_x": k_x, "k_v": k_v });
            if let Some(j) = inertia_max {
                if !(j.is_finite() && j > 0.0) {
                    return io.fail(EXIT_CONFIG, "--inertia-max must be positive");
                }
                let (k_r, k_omega) = rot.gains_for(j);
                out["k_r"] = json!(k_r);
                out["k_omega"] = json!(k_omega);
            }
            io.print(&out)
        }
    }
}
