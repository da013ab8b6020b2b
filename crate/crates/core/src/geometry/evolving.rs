use std::sync::Arc;

use rayon::prelude::*;

use super::{SurfaceMesh, Vec3};
use crate::error::{Error, Result};

/// Velocity of the surface material points.
///
/// `origin` is the point's position at `t = 0` and `x` its current
/// position; Eulerian fields ignore `origin`, Lagrangian prescriptions
/// ignore `x`.
pub trait VelocityField: Send + Sync {
    fn velocity(&self, origin: Vec3, x: Vec3, t: f64) -> Result<Vec3>;
}

/// Wraps an infallible closure `(origin, x, t) -> v` as a [`VelocityField`].
pub struct FnVelocity<F>(pub F);

impl<F> VelocityField for FnVelocity<F>
where
    F: Fn(Vec3, Vec3, f64) -> Vec3 + Send + Sync,
{
    fn velocity(&self, origin: Vec3, x: Vec3, t: f64) -> Result<Vec3> {
        Ok((self.0)(origin, x, t))
    }
}

pub type AnalyticFlow = Arc<dyn Fn(Vec3, f64) -> Vec3 + Send + Sync>;

/// How vertex positions are obtained from the reference configuration.
#[derive(Clone)]
pub enum FlowMap {
    /// Closed-form `Φ(X, t)`.
    Analytic(AnalyticFlow),
    /// Classical RK4 on the velocity field with steps no longer than
    /// `max_substep`.
    Integrated { max_substep: f64 },
}

impl std::fmt::Debug for FlowMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FlowMap::Analytic(_) => f.write_str("Analytic"),
            FlowMap::Integrated { max_substep } => {
                write!(f, "Integrated {{ max_substep: {max_substep} }}")
            }
        }
    }
}

#[derive(Clone)]
pub struct EvolvingSurface {
    initial_mesh: SurfaceMesh,
    flow: FlowMap,
    velocity: Arc<dyn VelocityField>,
    label: String,
}

impl EvolvingSurface {
    pub fn new(
        initial_mesh: SurfaceMesh,
        flow: FlowMap,
        velocity: Arc<dyn VelocityField>,
        label: impl Into<String>,
    ) -> Self {
        EvolvingSurface {
            initial_mesh,
            flow,
            velocity,
            label: label.into(),
        }
    }

    pub fn initial_mesh(&self) -> &SurfaceMesh {
        &self.initial_mesh
    }

    pub fn flow(&self) -> &FlowMap {
        &self.flow
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn velocity_field(&self) -> Arc<dyn VelocityField> {
        Arc::clone(&self.velocity)
    }

    pub fn velocity(&self, origin: Vec3, x: Vec3, t: f64) -> Result<Vec3> {
        self.velocity.velocity(origin, x, t)
    }

    /// The mesh at time `t`, starting from the initial configuration.
    pub fn advect_mesh(&self, t: f64) -> Result<SurfaceMesh> {
        self.advance(&self.initial_mesh, t)
    }

    /// Move `mesh` forward from `mesh.time()` to `t`.
    ///
    /// Analytic flows evaluate `Φ(X, t)` directly; integrated flows continue
    /// from the current positions.
    pub fn advance(&self, mesh: &SurfaceMesh, t: f64) -> Result<SurfaceMesh> {
        if !mesh.same_topology(&self.initial_mesh) {
            return Err(Error::InvalidMesh(
                "mesh does not belong to this evolving surface".into(),
            ));
        }
        if t == mesh.time() {
            return Ok(mesh.clone());
        }
        let origins = mesh.origins();
        let positions: Vec<Vec3> = match &self.flow {
            FlowMap::Analytic(phi) => origins.par_iter().map(|&x0| phi(x0, t)).collect(),
            FlowMap::Integrated { max_substep } => {
                let t0 = mesh.time();
                let span = t - t0;
                let n = (span.abs() / max_substep).ceil().max(1.0) as usize;
                let dt = span / n as f64;
                mesh.positions()
                    .par_iter()
                    .zip(origins.par_iter())
                    .map(|(&x, &x0)| {
                        let mut x = x;
                        for k in 0..n {
                            x = self.rk4(x0, x, t0 + k as f64 * dt, dt)?;
                        }
                        Ok(x)
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        if positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::IntegrationFailure(t));
        }
        mesh.with_positions(positions, t)
    }

    fn rk4(&self, x0: Vec3, x: Vec3, t: f64, dt: f64) -> Result<Vec3> {
        let v = &self.velocity;
        let k1 = v.velocity(x0, x, t)?;
        let k2 = v.velocity(x0, x + k1 * (0.5 * dt), t + 0.5 * dt)?;
        let k3 = v.velocity(x0, x + k2 * (0.5 * dt), t + 0.5 * dt)?;
        let k4 = v.velocity(x0, x + k3 * dt, t + dt)?;
        Ok(x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
    }
}

impl std::fmt::Debug for EvolvingSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EvolvingSurface")
            .field("label", &self.label)
            .field("flow", &self.flow)
            .field("vertices", &self.initial_mesh.vertex_count())
            .finish()
    }
}
