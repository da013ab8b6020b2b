//! Run configuration files.
//!
//! Line-oriented: `[section]` headers, `key = value` pairs, `#` comments.
//! Unknown sections or keys and repeated keys are errors. Lists are
//! comma-separated. Relative paths resolve against the file's directory.
//!
//! ```text
//! [surface]
//! id = expanding_sphere      # expanding_sphere | peanut_example2 | static_sphere | user_defined
//! mesh = icosphere           # icosphere | nonacute_sphere | example2
//! level = 2                  # default: 2, or 4 for the example2 mesh
//! off = mesh.off             # user_defined only, replaces mesh/level
//! velocity = x1, x2, x3      # user_defined only, Eulerian
//! max_substep = 0.001        # user_defined only, RK4 step bound
//!
//! [hamiltonian]
//! id = levelset              # levelset | sphere-g1 | sphere-g2 | sphere-expr
//! speed = 1                  # levelset: F(x, t)
//! drift = 0, 0, 0            # levelset: beta(x, t)
//! solution = x1*x2*t         # sphere-expr: manufactured g(x, t)
//! lipschitz = 1.5            # optional, diagnostics only
//!
//! [initial]
//! u0 = exact                 # exact (manufactured solutions) or an expression
//!
//! [scheme]
//! c1 = 0.5
//! c_tau = 0.005
//! end_time = 0.5
//!
//! [output]
//! directory = out
//! frames = 0, 0.25, 0.5      # default: 0 and end_time
//! formats = vtk, levelset    # default: vtk
//! level_value = 0
//!
//! [eoc]
//! levels = 0, 1, 2
//!
//! [verify]
//! levels = 1, 2
//! trials = 200
//! seed = 1
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::expr::{parse_expr, Expr, ExprSolution, ExprVector};
use super::off::read_off;
use crate::calculus::{BuiltinSolution, ScalarField, SmoothSolution, SolutionField};
use crate::error::{Error, Result};
use crate::geometry::EvolvingSurface;
use crate::geometry::{SurfaceMesh, Vec3};
use crate::hamiltonian::{
    level_set_hamiltonian, sphere_manufactured_hamiltonian, CoefficientFields, Hamiltonian,
    HamiltonianId,
};
use crate::solver::SchemeParams;
use crate::surfaces::{
    example2_surface, expanding_sphere_surface, static_sphere_surface, user_defined_surface,
    BuiltinSurfaceId, MeshBuilder,
};

#[derive(Clone, Debug, PartialEq)]
pub enum MeshSource {
    Builder { builder: MeshBuilder, level: usize },
    Off(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceSpec {
    pub id: BuiltinSurfaceId,
    pub mesh: MeshSource,
    pub velocity: Option<ExprVector>,
    pub max_substep: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    pub id: HamiltonianId,
    pub speed: Expr,
    pub drift: ExprVector,
    pub solution: Option<Expr>,
    pub lipschitz: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialData {
    /// The manufactured solution at `t = 0`.
    Exact,
    Expr(Expr),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Vtk,
    Levelset,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSpec {
    pub directory: PathBuf,
    pub formats: Vec<OutputFormat>,
    pub level_value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifySpec {
    pub levels: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub surface: SurfaceSpec,
    pub hamiltonian: HamiltonianSpec,
    pub u0: InitialData,
    /// `output_times` holds the frame times.
    pub params: SchemeParams,
    pub output: OutputSpec,
    pub eoc_levels: Vec<usize>,
    pub verify: VerifySpec,
}

const KEYS: &[(&str, &[&str])] = &[
    (
        "surface",
        &["id", "mesh", "level", "off", "velocity", "max_substep"],
    ),
    (
        "hamiltonian",
        &["id", "speed", "drift", "solution", "lipschitz"],
    ),
    ("initial", &["u0"]),
    ("scheme", &["c1", "c_tau", "end_time"]),
    ("output", &["directory", "frames", "formats", "level_value"]),
    ("eoc", &["levels"]),
    ("verify", &["levels", "trials", "seed"]),
];

type Table = BTreeMap<(String, String), (usize, String)>;

fn tokenize(text: &str) -> Result<Table> {
    let mut table = Table::new();
    let mut section: Option<String> = None;
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| {
                    Error::Config(format!("line {line_no}: unterminated section header"))
                })?
                .trim();
            if !KEYS.iter().any(|(s, _)| *s == name) {
                return Err(Error::Config(format!(
                    "line {line_no}: unknown section [{name}]"
                )));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {line_no}: expected 'key = value'")))?;
        let key = key.trim();
        let sec = section.as_deref().ok_or_else(|| {
            Error::Config(format!("line {line_no}: key '{key}' outside a section"))
        })?;
        let allowed = KEYS.iter().find(|(s, _)| *s == sec).unwrap().1;
        if !allowed.contains(&key) {
            return Err(Error::Config(format!(
                "line {line_no}: unknown key '{key}' in [{sec}]"
            )));
        }
        if table
            .insert(
                (sec.to_string(), key.to_string()),
                (line_no, value.trim().to_string()),
            )
            .is_some()
        {
            return Err(Error::Config(format!(
                "line {line_no}: repeated key '{key}' in [{sec}]"
            )));
        }
    }
    Ok(table)
}

struct Reader {
    table: Table,
}

impl Reader {
    fn raw(&self, sec: &str, key: &str) -> Option<&(usize, String)> {
        self.table.get(&(sec.to_string(), key.to_string()))
    }

    fn parse<T: std::str::FromStr>(&self, sec: &str, key: &str) -> Result<Option<T>> {
        match self.raw(sec, key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|_| {
                Error::Config(format!("line {line}: invalid value '{v}' for {sec}.{key}"))
            }),
        }
    }

    fn list<T: std::str::FromStr>(&self, sec: &str, key: &str) -> Result<Option<Vec<T>>> {
        match self.raw(sec, key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(|s| {
                    s.trim().parse().map_err(|_| {
                        Error::Config(format!(
                            "line {line}: invalid list item '{}' in {sec}.{key}",
                            s.trim()
                        ))
                    })
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    fn expr(&self, sec: &str, key: &str) -> Result<Option<Expr>> {
        match self.raw(sec, key) {
            None => Ok(None),
            Some((line, v)) => parse_expr(v)
                .map(Some)
                .map_err(|e| with_line(e, *line, sec, key)),
        }
    }

    fn expr3(&self, sec: &str, key: &str) -> Result<Option<ExprVector>> {
        match self.raw(sec, key) {
            None => Ok(None),
            Some((line, v)) => {
                let parts: Vec<&str> = v.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::Config(format!(
                        "line {line}: {sec}.{key} needs three comma-separated expressions"
                    )));
                }
                let mut exprs = Vec::with_capacity(3);
                for p in parts {
                    exprs.push(parse_expr(p).map_err(|e| with_line(e, *line, sec, key))?);
                }
                Ok(Some(ExprVector(exprs.try_into().unwrap())))
            }
        }
    }
}

fn with_line(e: Error, line: usize, sec: &str, key: &str) -> Error {
    match e {
        Error::Syntax { offset, message } => Error::Syntax {
            offset,
            message: format!("line {line}, {sec}.{key}: {message}"),
        },
        other => other,
    }
}

fn constant(c: f64) -> Expr {
    Expr::Num(c)
}

/// Parse configuration text; relative paths resolve against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<RunConfig> {
    let r = Reader {
        table: tokenize(text)?,
    };
    let resolve = |p: PathBuf| if p.is_absolute() { p } else { base_dir.join(p) };

    let surface_id: BuiltinSurfaceId = match r.raw("surface", "id") {
        Some((_, v)) => v.parse()?,
        None => return Err(Error::Config("missing surface.id".into())),
    };
    let mesh = match r.raw("surface", "off") {
        Some((_, path)) => MeshSource::Off(resolve(PathBuf::from(path))),
        None => {
            let default_builder = if surface_id == BuiltinSurfaceId::PeanutExample2 {
                MeshBuilder::Example2
            } else {
                MeshBuilder::Icosphere
            };
            let builder = match r.raw("surface", "mesh") {
                Some((_, v)) => v.parse()?,
                None => default_builder,
            };
            let level = r
                .parse("surface", "level")?
                .unwrap_or(builder.default_level());
            MeshSource::Builder { builder, level }
        }
    };
    let velocity = r.expr3("surface", "velocity")?;
    if surface_id == BuiltinSurfaceId::UserDefined && velocity.is_none() {
        return Err(Error::Config(
            "surface user_defined needs surface.velocity".into(),
        ));
    }
    let surface = SurfaceSpec {
        id: surface_id,
        mesh,
        velocity,
        max_substep: r.parse("surface", "max_substep")?.unwrap_or(1e-3),
    };

    let h_id: HamiltonianId = match r.raw("hamiltonian", "id") {
        Some((_, v)) => v.parse()?,
        None => return Err(Error::Config("missing hamiltonian.id".into())),
    };
    let solution = r.expr("hamiltonian", "solution")?;
    if h_id == HamiltonianId::SphereExpr && solution.is_none() {
        return Err(Error::Config(
            "hamiltonian sphere-expr needs hamiltonian.solution".into(),
        ));
    }
    let manufactured = h_id != HamiltonianId::LevelSet;
    if manufactured && surface_id != BuiltinSurfaceId::ExpandingSphere {
        return Err(Error::Config(
            "manufactured hamiltonians are defined on the expanding_sphere surface only".into(),
        ));
    }
    let hamiltonian = HamiltonianSpec {
        id: h_id,
        speed: r.expr("hamiltonian", "speed")?.unwrap_or(constant(1.0)),
        drift: r.expr3("hamiltonian", "drift")?.unwrap_or(ExprVector([
            constant(0.0),
            constant(0.0),
            constant(0.0),
        ])),
        solution,
        lipschitz: r.parse("hamiltonian", "lipschitz")?,
    };

    let u0 = match r.raw("initial", "u0") {
        Some((_, v)) if v == "exact" => InitialData::Exact,
        Some(_) => InitialData::Expr(r.expr("initial", "u0")?.unwrap()),
        None => InitialData::Exact,
    };
    if u0 == InitialData::Exact && !manufactured {
        return Err(Error::Config(
            "initial.u0 = exact needs a manufactured hamiltonian; give an expression".into(),
        ));
    }

    let end_time: f64 = r.parse("scheme", "end_time")?.unwrap_or(0.5);
    let frames = r
        .list("output", "frames")?
        .unwrap_or_else(|| vec![0.0, end_time]);
    let params = SchemeParams::new(
        r.parse("scheme", "c1")?.unwrap_or(0.5),
        r.parse("scheme", "c_tau")?.unwrap_or(0.005),
        end_time,
    )
    .and_then(|p| p.with_output_times(frames))
    .map_err(|e| Error::Config(e.to_string()))?;

    let formats = match r.raw("output", "formats") {
        None => vec![OutputFormat::Vtk],
        Some((line, v)) => v
            .split(',')
            .map(|s| match s.trim() {
                "vtk" => Ok(OutputFormat::Vtk),
                "levelset" => Ok(OutputFormat::Levelset),
                other => Err(Error::Config(format!(
                    "line {line}: unknown output format '{other}'"
                ))),
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let output = OutputSpec {
        directory: resolve(
            r.raw("output", "directory")
                .map(|(_, v)| PathBuf::from(v))
                .unwrap_or_else(|| PathBuf::from("out")),
        ),
        formats,
        level_value: r.parse("output", "level_value")?.unwrap_or(0.0),
    };

    Ok(RunConfig {
        surface,
        hamiltonian,
        u0,
        params,
        output,
        eoc_levels: r.list("eoc", "levels")?.unwrap_or_else(|| vec![0, 1, 2]),
        verify: VerifySpec {
            levels: r.list("verify", "levels")?.unwrap_or_else(|| vec![1, 2]),
            trials: r.parse("verify", "trials")?.unwrap_or(200),
            seed: r.parse("verify", "seed")?.unwrap_or(1),
        },
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}

impl RunConfig {
    /// The initial mesh, with the builder level optionally replaced.
    pub fn build_mesh(&self, level: Option<usize>) -> Result<SurfaceMesh> {
        match &self.surface.mesh {
            MeshSource::Builder { builder, level: l } => builder.build(level.unwrap_or(*l)),
            MeshSource::Off(path) => read_off(path),
        }
    }

    pub fn build_surface(&self, mesh: SurfaceMesh) -> Result<EvolvingSurface> {
        match self.surface.id {
            BuiltinSurfaceId::ExpandingSphere => expanding_sphere_surface(mesh),
            BuiltinSurfaceId::PeanutExample2 => example2_surface(mesh),
            BuiltinSurfaceId::StaticSphere => static_sphere_surface(mesh),
            BuiltinSurfaceId::UserDefined => user_defined_surface(
                mesh,
                Arc::new(self.surface.velocity.clone().expect("checked at parse")),
                self.surface.max_substep,
            ),
        }
    }

    /// Exact solution of a manufactured problem.
    pub fn exact_solution(&self) -> Option<Arc<dyn SmoothSolution>> {
        match self.hamiltonian.id {
            HamiltonianId::LevelSet => None,
            HamiltonianId::SphereG1 => Some(Arc::new(BuiltinSolution::ExpCubic)),
            HamiltonianId::SphereG2 => Some(Arc::new(BuiltinSolution::SinCubic)),
            HamiltonianId::SphereExpr => Some(Arc::new(ExprSolution {
                expr: self.hamiltonian.solution.clone().expect("checked at parse"),
            })),
        }
    }

    pub fn build_hamiltonian(&self, surface: &EvolvingSurface) -> Arc<dyn Hamiltonian> {
        match self.exact_solution() {
            Some(g) => Arc::new(sphere_manufactured_hamiltonian(g)),
            None => {
                let h = level_set_hamiltonian(CoefficientFields {
                    speed: Arc::new(self.hamiltonian.speed.clone()),
                    drift: Arc::new(self.hamiltonian.drift.clone()),
                    surface_velocity: surface.velocity_field(),
                });
                Arc::new(match self.hamiltonian.lipschitz {
                    Some(l) => h.with_lipschitz_estimate(l),
                    None => h,
                })
            }
        }
    }

    pub fn initial_data(&self) -> Arc<dyn ScalarField> {
        match (&self.u0, self.exact_solution()) {
            (InitialData::Expr(e), _) => Arc::new(e.clone()),
            (InitialData::Exact, Some(g)) => Arc::new(OwnedSolution(g)),
            (InitialData::Exact, None) => unreachable!("checked at parse"),
        }
    }
}

struct OwnedSolution(Arc<dyn SmoothSolution>);

impl ScalarField for OwnedSolution {
    fn value(&self, x: Vec3, t: f64) -> Result<f64> {
        SolutionField(self.0.as_ref()).value(x, t)
    }
}
