//! Hamiltonians `H(x, t, p)` and the built-in instances.

use std::str::FromStr;
use std::sync::Arc;

use crate::calculus::{expanding_sphere_derivatives, ScalarField, SmoothSolution, VectorField};
use crate::error::{Error, Result};
use crate::geometry::{Vec3, VelocityField};

/// Where a Hamiltonian is evaluated: the current vertex position and the
/// vertex's position at `t = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint {
    pub position: Vec3,
    pub origin: Vec3,
}

impl SurfacePoint {
    pub fn at(position: Vec3) -> Self {
        SurfacePoint {
            position,
            origin: position,
        }
    }
}

pub trait Hamiltonian: Send + Sync {
    fn eval(&self, at: SurfacePoint, t: f64, p: Vec3) -> Result<f64>;

    fn label(&self) -> String;

    /// Optional estimate of the Lipschitz constant in `p`, for diagnostics.
    fn lipschitz_p_estimate(&self) -> Option<f64> {
        None
    }
}

/// `H ≡ c`.
#[derive(Clone, Copy, Debug)]
pub struct ConstantHamiltonian(pub f64);

impl Hamiltonian for ConstantHamiltonian {
    fn eval(&self, _: SurfacePoint, _: f64, _: Vec3) -> Result<f64> {
        Ok(self.0)
    }

    fn label(&self) -> String {
        format!("constant({})", self.0)
    }

    fn lipschitz_p_estimate(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// Closure adapter `(x, t, p) -> H`.
pub struct FnHamiltonian<F> {
    label: String,
    f: F,
}

impl<F: Fn(Vec3, f64, Vec3) -> f64 + Send + Sync> FnHamiltonian<F> {
    pub fn new(label: impl Into<String>, f: F) -> Self {
        FnHamiltonian {
            label: label.into(),
            f,
        }
    }
}

impl<F: Fn(Vec3, f64, Vec3) -> f64 + Send + Sync> Hamiltonian for FnHamiltonian<F> {
    fn eval(&self, at: SurfacePoint, t: f64, p: Vec3) -> Result<f64> {
        Ok((self.f)(at.position, t, p))
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Coefficients of the curve-evolution Hamiltonian.
#[derive(Clone)]
pub struct CoefficientFields {
    /// Normal speed `F`.
    pub speed: Arc<dyn ScalarField>,
    /// Advection `β`.
    pub drift: Arc<dyn VectorField>,
    /// Surface velocity `v_Γ`.
    pub surface_velocity: Arc<dyn VelocityField>,
}

/// `H(x, t, p) = F(x, t)|p| + β(x, t)·p − v_Γ(x, t)·p`.
pub struct LevelSetHamiltonian {
    coeffs: CoefficientFields,
    lipschitz: Option<f64>,
}

pub fn level_set_hamiltonian(coeffs: CoefficientFields) -> LevelSetHamiltonian {
    LevelSetHamiltonian {
        coeffs,
        lipschitz: None,
    }
}

impl LevelSetHamiltonian {
    pub fn with_lipschitz_estimate(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }
}

impl Hamiltonian for LevelSetHamiltonian {
    fn eval(&self, at: SurfacePoint, t: f64, p: Vec3) -> Result<f64> {
        let x = at.position;
        let speed = self.coeffs.speed.value(x, t)?;
        let drift = self.coeffs.drift.value(x, t)?;
        let v = self.coeffs.surface_velocity.velocity(at.origin, x, t)?;
        Ok(speed * p.norm() + drift.dot(p) - v.dot(p))
    }

    fn label(&self) -> String {
        "levelset".into()
    }

    fn lipschitz_p_estimate(&self) -> Option<f64> {
        self.lipschitz
    }
}

/// Points farther than this from the sphere `|x| = 1 + t` are rejected by
/// the manufactured Hamiltonians.
pub const MANUFACTURED_SURFACE_TOLERANCE: f64 = 1e-6;

/// Hamiltonian for which `g` solves the equation on the expanding sphere
/// `R(t) = 1 + t`:
/// `H(x, t, p) = −|p| + |∇_Γ g(x, t)| − ∂•g(x, t)`.
pub struct SphereManufacturedHamiltonian {
    g: Arc<dyn SmoothSolution>,
}

pub fn sphere_manufactured_hamiltonian(
    g: Arc<dyn SmoothSolution>,
) -> SphereManufacturedHamiltonian {
    SphereManufacturedHamiltonian { g }
}

impl SphereManufacturedHamiltonian {
    pub fn solution(&self) -> Arc<dyn SmoothSolution> {
        Arc::clone(&self.g)
    }
}

impl Hamiltonian for SphereManufacturedHamiltonian {
    fn eval(&self, at: SurfacePoint, t: f64, p: Vec3) -> Result<f64> {
        let d = expanding_sphere_derivatives(
            self.g.as_ref(),
            at.position,
            t,
            MANUFACTURED_SURFACE_TOLERANCE,
        )?;
        Ok(-p.norm() + d.tangential_gradient_norm - d.material_derivative)
    }

    fn label(&self) -> String {
        format!("sphere-manufactured[{}]", self.g.label())
    }

    fn lipschitz_p_estimate(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// Registry ids for command-line selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HamiltonianId {
    LevelSet,
    SphereG1,
    SphereG2,
    /// Manufactured Hamiltonian for an expression-defined `g`.
    SphereExpr,
}

impl FromStr for HamiltonianId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "levelset" => Ok(HamiltonianId::LevelSet),
            "sphere-g1" => Ok(HamiltonianId::SphereG1),
            "sphere-g2" => Ok(HamiltonianId::SphereG2),
            "sphere-expr" => Ok(HamiltonianId::SphereExpr),
            _ => Err(Error::Config(format!("unknown hamiltonian '{s}'"))),
        }
    }
}
