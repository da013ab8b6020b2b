//! Built-in evolving surfaces and mesh families.

use std::f64::consts::PI;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{
    icosphere, nonacute_sphere, EvolvingSurface, FlowMap, FnVelocity, SurfaceMesh, Vec3,
    VelocityField,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinSurfaceId {
    ExpandingSphere,
    PeanutExample2,
    StaticSphere,
    UserDefined,
}

impl FromStr for BuiltinSurfaceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "expanding_sphere" => Ok(BuiltinSurfaceId::ExpandingSphere),
            "peanut_example2" => Ok(BuiltinSurfaceId::PeanutExample2),
            "static_sphere" => Ok(BuiltinSurfaceId::StaticSphere),
            "user_defined" => Ok(BuiltinSurfaceId::UserDefined),
            _ => Err(Error::Config(format!("unknown surface '{s}'"))),
        }
    }
}

/// Mesh generators selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshBuilder {
    Icosphere,
    NonacuteSphere,
    Example2,
}

impl MeshBuilder {
    /// Level used when a configuration names none. The Example-2 mesh
    /// needs a finer level to resolve the thin waist.
    pub fn default_level(self) -> usize {
        match self {
            MeshBuilder::Icosphere | MeshBuilder::NonacuteSphere => 2,
            MeshBuilder::Example2 => 4,
        }
    }

    pub fn build(self, level: usize) -> Result<SurfaceMesh> {
        match self {
            MeshBuilder::Icosphere => icosphere(level),
            MeshBuilder::NonacuteSphere => nonacute_sphere(level),
            MeshBuilder::Example2 => example2_initial_mesh(level),
        }
    }
}

impl FromStr for MeshBuilder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "icosphere" => Ok(MeshBuilder::Icosphere),
            "nonacute_sphere" => Ok(MeshBuilder::NonacuteSphere),
            "example2" => Ok(MeshBuilder::Example2),
            _ => Err(Error::Config(format!("unknown mesh builder '{s}'"))),
        }
    }
}

const UNIT_SPHERE_TOLERANCE: f64 = 1e-9;

fn check_unit_sphere(mesh: &SurfaceMesh) -> Result<()> {
    match mesh
        .positions()
        .iter()
        .position(|x| (x.norm() - 1.0).abs() > UNIT_SPHERE_TOLERANCE)
    {
        Some(i) => Err(Error::OffSphereInitialMesh(i)),
        None => Ok(()),
    }
}

/// Unit radial velocity `x/|x|`.
pub fn radial_velocity() -> Arc<dyn VelocityField> {
    Arc::new(FnVelocity(|_, x: Vec3, _| x.normalized()))
}

/// Sphere of radius `1 + t`: `Φ(X, t) = (1 + t)X`.
pub fn expanding_sphere_surface(initial_mesh: SurfaceMesh) -> Result<EvolvingSurface> {
    check_unit_sphere(&initial_mesh)?;
    Ok(EvolvingSurface::new(
        initial_mesh,
        FlowMap::Analytic(Arc::new(|x0: Vec3, t: f64| x0 * (1.0 + t))),
        radial_velocity(),
        "expanding_sphere",
    ))
}

/// Unit sphere at rest.
pub fn static_sphere_surface(initial_mesh: SurfaceMesh) -> Result<EvolvingSurface> {
    check_unit_sphere(&initial_mesh)?;
    Ok(EvolvingSurface::new(
        initial_mesh,
        FlowMap::Analytic(Arc::new(|x0: Vec3, _| x0)),
        Arc::new(FnVelocity(|_, _, _| Vec3::ZERO)),
        "static_sphere",
    ))
}

/// Any closed mesh moved by an Eulerian velocity field, integrated with RK4.
pub fn user_defined_surface(
    initial_mesh: SurfaceMesh,
    velocity: Arc<dyn VelocityField>,
    max_substep: f64,
) -> Result<EvolvingSurface> {
    if !(max_substep > 0.0 && max_substep.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "integration substep must be positive, got {max_substep}"
        )));
    }
    Ok(EvolvingSurface::new(
        initial_mesh,
        FlowMap::Integrated { max_substep },
        velocity,
        "user_defined",
    ))
}

/// `x₁² + x₂² + 2x₃²(x₃² − 199/200) − 0.01`; the initial surface of the
/// level-set demo is its zero set.
pub fn example2_level_function(x: Vec3) -> f64 {
    x.x * x.x + x.y * x.y + 2.0 * x.z * x.z * (x.z * x.z - 199.0 / 200.0) - 0.01
}

const EXAMPLE2_ON_SURFACE: f64 = 1e-6;
const EXAMPLE2_PROJECTION: f64 = 1e-9;

/// Closed-form Lagrangian motion of the level-set demo surface.
pub fn example2_flow(x0: Vec3, t: f64) -> Vec3 {
    let planar = 1.0 + 0.5 * (1.0 - (2.0 * PI * t).cos());
    let axial = 1.0 + 0.2 * (1.0 - (4.0 * PI * t).cos());
    Vec3::new(x0.x * planar, x0.y * planar, x0.z * axial)
}

/// `π (sin 2πt X₁, sin 2πt X₂, 0.8 sin 4πt X₃)` in terms of the initial
/// position `X`; `π` is the scalar constant.
pub fn example2_velocity(x0: Vec3, t: f64) -> Vec3 {
    let s2 = (2.0 * PI * t).sin();
    let s4 = (4.0 * PI * t).sin();
    Vec3::new(s2 * x0.x, s2 * x0.y, 0.8 * s4 * x0.z) * PI
}

pub fn example2_surface(initial_mesh: SurfaceMesh) -> Result<EvolvingSurface> {
    if let Some(i) = initial_mesh
        .positions()
        .iter()
        .position(|&x| !(example2_level_function(x).abs() <= EXAMPLE2_ON_SURFACE))
    {
        return Err(Error::OffSurfaceInitialMesh(i));
    }
    Ok(EvolvingSurface::new(
        initial_mesh,
        FlowMap::Analytic(Arc::new(example2_flow)),
        Arc::new(FnVelocity(|x0, _, t| example2_velocity(x0, t))),
        "peanut_example2",
    ))
}

/// Positive root of the level function along the ray through `dir`, by
/// bisection. The surface is star-shaped about the origin, so the root is
/// unique.
fn project_on_ray(dir: Vec3, vertex: usize) -> Result<Vec3> {
    let f = |s: f64| example2_level_function(dir * s);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while f(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::ProjectionFailure(vertex));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = if f(lo).abs() <= f(hi).abs() {
        dir * lo
    } else {
        dir * hi
    };
    if example2_level_function(x).abs() < EXAMPLE2_PROJECTION {
        Ok(x)
    } else {
        Err(Error::ProjectionFailure(vertex))
    }
}

/// Icosphere of the given level projected radially onto the initial
/// level-set demo surface.
pub fn example2_initial_mesh(resolution: usize) -> Result<SurfaceMesh> {
    if resolution < 1 {
        return Err(Error::InvalidParams(
            "example2 mesh resolution must be at least 1".into(),
        ));
    }
    let sphere = icosphere(resolution)?;
    let positions = sphere
        .positions()
        .iter()
        .enumerate()
        .map(|(i, &d)| project_on_ray(d.normalized(), i))
        .collect::<Result<Vec<_>>>()?;
    SurfaceMesh::new(positions, sphere.triangles().to_vec())
}
