//! Nodal fields, piecewise-linear gradients and exact derivatives of the
//! built-in manufactured solutions.

use crate::error::{Error, Result};
use crate::geometry::{MeshEpoch, SurfaceMesh, TriangleGeom, Vec3};

/// A scalar field `(x, t) -> value` defined near the surface.
pub trait ScalarField: Send + Sync {
    fn value(&self, x: Vec3, t: f64) -> Result<f64>;
}

/// A vector field `(x, t) -> value` defined near the surface.
pub trait VectorField: Send + Sync {
    fn value(&self, x: Vec3, t: f64) -> Result<Vec3>;
}

impl ScalarField for f64 {
    fn value(&self, _: Vec3, _: f64) -> Result<f64> {
        Ok(*self)
    }
}

impl VectorField for Vec3 {
    fn value(&self, _: Vec3, _: f64) -> Result<Vec3> {
        Ok(*self)
    }
}

/// Closure adapter for [`ScalarField`].
pub struct FnScalar<F>(pub F);

impl<F: Fn(Vec3, f64) -> f64 + Send + Sync> ScalarField for FnScalar<F> {
    fn value(&self, x: Vec3, t: f64) -> Result<f64> {
        Ok((self.0)(x, t))
    }
}

/// Closure adapter for [`VectorField`].
pub struct FnVector<F>(pub F);

impl<F: Fn(Vec3, f64) -> Vec3 + Send + Sync> VectorField for FnVector<F> {
    fn value(&self, x: Vec3, t: f64) -> Result<Vec3> {
        Ok((self.0)(x, t))
    }
}

/// One scalar per vertex, tied to the mesh time level it was computed on.
#[derive(Clone, Debug, PartialEq)]
pub struct NodalField {
    values: Vec<f64>,
    time: f64,
    epoch: MeshEpoch,
}

impl NodalField {
    pub fn new(mesh: &SurfaceMesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.vertex_count() {
            return Err(Error::EpochMismatch);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(i));
        }
        Ok(NodalField {
            values,
            time: mesh.time(),
            epoch: mesh.epoch(),
        })
    }

    pub fn constant(mesh: &SurfaceMesh, c: f64) -> Result<Self> {
        NodalField::new(mesh, vec![c; mesh.vertex_count()])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn epoch(&self) -> MeshEpoch {
        self.epoch
    }

    pub fn check_mesh(&self, mesh: &SurfaceMesh) -> Result<()> {
        if self.epoch == mesh.epoch() {
            Ok(())
        } else {
            Err(Error::EpochMismatch)
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Gradient of the piecewise-linear interpolant of `field` on triangle
/// `tri`; it lies in the triangle's plane.
pub fn tangential_gradient(
    field: &NodalField,
    mesh: &SurfaceMesh,
    geo: &TriangleGeom,
    tri: usize,
) -> Result<Vec3> {
    field.check_mesh(mesh)?;
    let idx = mesh.triangles()[tri];
    let v = field.values();
    Ok(geo.basis_gradients[0] * v[idx[0]]
        + geo.basis_gradients[1] * v[idx[1]]
        + geo.basis_gradients[2] * v[idx[2]])
}

/// Nodal interpolant `values[i] = f(x_i, mesh.time)`.
pub fn interpolate(f: &dyn ScalarField, mesh: &SurfaceMesh) -> Result<NodalField> {
    let t = mesh.time();
    let values = mesh
        .positions()
        .iter()
        .enumerate()
        .map(|(i, &x)| match f.value(x, t) {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) => Err(Error::NonFiniteValue(i)),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    NodalField::new(mesh, values)
}

/// A smooth function of `(x, t)` on R³ × R with its partial derivatives.
pub trait SmoothSolution: Send + Sync {
    fn value(&self, x: Vec3, t: f64) -> Result<f64>;
    fn gradient(&self, x: Vec3, t: f64) -> Result<Vec3>;
    fn time_derivative(&self, x: Vec3, t: f64) -> Result<f64>;
    fn label(&self) -> String;
}

/// Adapter so a smooth solution can serve as initial data.
pub struct SolutionField<'a>(pub &'a dyn SmoothSolution);

impl ScalarField for SolutionField<'_> {
    fn value(&self, x: Vec3, t: f64) -> Result<f64> {
        self.0.value(x, t)
    }
}

/// Built-in manufactured solutions with closed-form partials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BuiltinSolution {
    /// `e^{−t/2} x₁x₂x₃`
    ExpCubic,
    /// `10 sin t + x₁x₂x₃ t`
    SinCubic,
    Constant(f64),
}

impl SmoothSolution for BuiltinSolution {
    fn value(&self, x: Vec3, t: f64) -> Result<f64> {
        let cubic = x.x * x.y * x.z;
        Ok(match *self {
            BuiltinSolution::ExpCubic => (-0.5 * t).exp() * cubic,
            BuiltinSolution::SinCubic => 10.0 * t.sin() + cubic * t,
            BuiltinSolution::Constant(c) => c,
        })
    }

    fn gradient(&self, x: Vec3, t: f64) -> Result<Vec3> {
        let g = Vec3::new(x.y * x.z, x.x * x.z, x.x * x.y);
        Ok(match *self {
            BuiltinSolution::ExpCubic => g * (-0.5 * t).exp(),
            BuiltinSolution::SinCubic => g * t,
            BuiltinSolution::Constant(_) => Vec3::ZERO,
        })
    }

    fn time_derivative(&self, x: Vec3, t: f64) -> Result<f64> {
        let cubic = x.x * x.y * x.z;
        Ok(match *self {
            BuiltinSolution::ExpCubic => -0.5 * (-0.5 * t).exp() * cubic,
            BuiltinSolution::SinCubic => 10.0 * t.cos() + cubic,
            BuiltinSolution::Constant(_) => 0.0,
        })
    }

    fn label(&self) -> String {
        match self {
            BuiltinSolution::ExpCubic => "exp(-0.5t) x1 x2 x3".into(),
            BuiltinSolution::SinCubic => "10 sin(t) + x1 x2 x3 t".into(),
            BuiltinSolution::Constant(c) => format!("{c}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereDerivatives {
    pub value: f64,
    pub material_derivative: f64,
    pub tangential_gradient: Vec3,
    pub tangential_gradient_norm: f64,
}

/// Default tolerance on `| |x| − (1 + t) |`.
pub const ON_SPHERE_TOLERANCE: f64 = 1e-9;

/// Exact surface derivatives of `g` on the sphere of radius `R(t) = 1 + t`
/// moving with velocity `x/|x|`.
pub fn sphere_exact_derivatives(
    g: &dyn SmoothSolution,
    x: Vec3,
    t: f64,
) -> Result<SphereDerivatives> {
    expanding_sphere_derivatives(g, x, t, ON_SPHERE_TOLERANCE)
}

pub(crate) fn expanding_sphere_derivatives(
    g: &dyn SmoothSolution,
    x: Vec3,
    t: f64,
    tolerance: f64,
) -> Result<SphereDerivatives> {
    let r = 1.0 + t;
    let radius = x.norm();
    if !((radius - r).abs() <= tolerance) {
        return Err(Error::OffSurface {
            radius,
            expected: r,
        });
    }
    let grad = g.gradient(x, t)?;
    let radial = grad.dot(x);
    let norm_sq = grad.norm_squared() - radial * radial / (r * r);
    Ok(SphereDerivatives {
        value: g.value(x, t)?,
        material_derivative: g.time_derivative(x, t)? + radial / r,
        tangential_gradient: grad - x * (radial / (r * r)),
        tangential_gradient_norm: norm_sq.max(0.0).sqrt(),
    })
}
