//! Error measurement, convergence tables, and property checks of the scheme.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::calculus::{sphere_exact_derivatives, ScalarField, SmoothSolution, SolutionField};
use crate::error::{Error, Result};
use crate::geometry::{EvolvingSurface, SurfaceMesh};
use crate::hamiltonian::{sphere_manufactured_hamiltonian, Hamiltonian, SurfacePoint};
use crate::solver::{
    run, scheme_operator, select_viscosity, state_timestep, LevelGeometry, RunObserver,
    SchemeParams, SolverState,
};
use crate::surfaces::expanding_sphere_surface;

/// `max_i |u_i − exact(x_i, t)|` at one time level.
pub fn max_nodal_error(state: &SolverState, exact: &dyn ScalarField) -> Result<f64> {
    state
        .mesh
        .positions()
        .iter()
        .zip(state.values())
        .try_fold(0.0f64, |acc, (&x, &u)| {
            Ok(acc.max((u - exact.value(x, state.time)?).abs()))
        })
}

/// Running maximum of the nodal error and of the mesh size over a run.
pub struct ErrorTracker<'a> {
    exact: &'a dyn ScalarField,
    pub max_error: f64,
    pub h_max: f64,
}

impl<'a> ErrorTracker<'a> {
    pub fn new(exact: &'a dyn ScalarField) -> Self {
        ErrorTracker {
            exact,
            max_error: 0.0,
            h_max: 0.0,
        }
    }
}

impl RunObserver for ErrorTracker<'_> {
    fn on_step(&mut self, state: &SolverState) -> Result<()> {
        self.max_error = self.max_error.max(max_nodal_error(state, self.exact)?);
        self.h_max = self.h_max.max(state.geometry.h_max);
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EocRow {
    pub h_max: f64,
    pub error: f64,
    /// Absent on the first row.
    pub eoc: Option<f64>,
}

/// `eoc_k = log(E_{k−1}/E_k) / log(h_{k−1}/h_k)` over `(h, error)` rows.
pub fn eoc(rows: &[(f64, f64)]) -> Result<Vec<EocRow>> {
    if rows.len() < 2 {
        return Err(Error::InvalidParams(
            "convergence table needs at least two rows".into(),
        ));
    }
    for (k, &(_, e)) in rows.iter().enumerate() {
        if !(e > 0.0) {
            return Err(Error::NonPositiveError(k));
        }
    }
    for k in 1..rows.len() {
        if !(rows[k].0 < rows[k - 1].0) || !(rows[k].0 > 0.0) {
            return Err(Error::NonMonotoneH(k));
        }
    }
    Ok(rows
        .iter()
        .enumerate()
        .map(|(k, &(h, e))| EocRow {
            h_max: h,
            error: e,
            eoc: (k > 0).then(|| {
                let (h0, e0) = rows[k - 1];
                (e0 / e).ln() / (h0 / h).ln()
            }),
        })
        .collect())
}

/// CSV with header `h_max,error,eoc`.
pub fn eoc_csv(rows: &[EocRow]) -> String {
    let mut out = String::from("h_max,error,eoc\n");
    for r in rows {
        let eoc = r.eoc.map(|v| format!("{v:.16e}")).unwrap_or_default();
        let _ = writeln!(out, "{:.16e},{:.16e},{}", r.h_max, r.error, eoc);
    }
    out
}

/// `(h_max, E)` of one manufactured-solution run on the expanding sphere.
pub fn manufactured_error(
    mesh: SurfaceMesh,
    solution: Arc<dyn SmoothSolution>,
    params: &SchemeParams,
) -> Result<(f64, f64)> {
    let surface = expanding_sphere_surface(mesh)?;
    let h = sphere_manufactured_hamiltonian(Arc::clone(&solution));
    let exact = SolutionField(solution.as_ref());
    let mut tracker = ErrorTracker::new(&exact);
    run(&surface, &h, &exact, params, &mut tracker)?;
    Ok((tracker.h_max, tracker.max_error))
}

/// Manufactured-solution runs over a mesh family; the runs are independent
/// and execute concurrently.
pub fn manufactured_study(
    meshes: Vec<SurfaceMesh>,
    solution: Arc<dyn SmoothSolution>,
    params: &SchemeParams,
) -> Result<Vec<(f64, f64)>> {
    meshes
        .into_par_iter()
        .map(|m| manufactured_error(m, Arc::clone(&solution), params))
        .collect()
}

/// Truncation error of one step from interpolated exact data:
/// `max_i |(φ_i^{n+1} − S(I φ)_i)/τ − (∂•φ + H(x_i, t, ∇_Γφ))|` at `n = 0`.
///
/// Exact surface derivatives are taken on the expanding sphere, so the
/// surface must be one.
pub fn consistency_residual(
    phi: &dyn SmoothSolution,
    surface: &EvolvingSurface,
    h: &dyn Hamiltonian,
    params: &SchemeParams,
) -> Result<f64> {
    let state = SolverState::initial(surface, &SolutionField(phi))?;
    let tau = state_timestep(&state, params);
    let t1 = state.time + tau;
    let next = scheme_operator(&state, h, params, tau, state.values())?;
    let mesh1 = surface.advance(&state.mesh, t1)?;
    let positions = state.mesh.positions();
    (0..positions.len())
        .into_par_iter()
        .map(|i| {
            let x = positions[i];
            let d = sphere_exact_derivatives(phi, x, state.time)?;
            let at = SurfacePoint {
                position: x,
                origin: state.mesh.origins()[i],
            };
            let pde = d.material_derivative + h.eval(at, state.time, d.tangential_gradient)?;
            let phi1 = phi.value(mesh1.position(i), t1)?;
            Ok(((phi1 - next[i]) / tau - pde).abs())
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotonicityReport {
    /// Number of `(trial, vertex)` pairs with `S(u)_i > S(v)_i`.
    pub violations: usize,
    /// `min (S(v)_i − S(u)_i)` over all trials and vertices.
    pub worst_margin: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Randomised check of `u ≤ v ⇒ S(u) ≤ S(v)` for one step from `t = 0`.
///
/// Each trial draws `u_i` uniform in `[−1, 1]` and `v = u + δ` with `δ_i`
/// uniform in `[0, 1)`, from a ChaCha8 stream seeded with `seed`.
pub fn monotonicity_fuzz(
    surface: &EvolvingSurface,
    h: &dyn Hamiltonian,
    params: &SchemeParams,
    trials: usize,
    seed: u64,
) -> Result<MonotonicityReport> {
    if trials == 0 {
        return Err(Error::InvalidParams("fuzz needs at least one trial".into()));
    }
    let state = SolverState::initial(surface, &0.0)?;
    let tau = state_timestep(&state, params);
    let m = state.mesh.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = MonotonicityReport {
        violations: 0,
        worst_margin: f64::INFINITY,
        trials,
        seed,
    };
    for _ in 0..trials {
        let u: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let v: Vec<f64> = u.iter().map(|&x| x + rng.random::<f64>()).collect();
        let su = scheme_operator(&state, h, params, tau, &u)?;
        let sv = scheme_operator(&state, h, params, tau, &v)?;
        for (a, b) in su.iter().zip(&sv) {
            if a > b {
                report.violations += 1;
            }
            report.worst_margin = report.worst_margin.min(b - a);
        }
    }
    Ok(report)
}

/// Parameter limits under which one step is monotone for every field, for a
/// Hamiltonian with Lipschitz constant `lipschitz` in `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotonicityBound {
    /// Smallest `C1` for which every off-diagonal coefficient of the update
    /// is nonnegative.
    pub c1_min: f64,
    /// Largest `C_τ` for which every diagonal coefficient is nonnegative at
    /// the given `C1`.
    pub c_tau_max: f64,
}

/// Sufficient conditions for monotonicity on `mesh`.
///
/// The update of `u_i` depends on a neighbour value `u_k` through the
/// gradients in the two ring triangles at edge `(i, k)`, with weight at most
/// `L·Σ sector·|∇φ_k|`, and through the viscosity term with weight
/// `ε_i (h_L + h_R)/|E|`. Requiring the second to dominate gives `c1_min`;
/// the diagonal coefficient `1 − τ(…)` gives `c_tau_max`. Both are worst
/// cases over all gradients, so they are sufficient, not necessary.
pub fn monotonicity_bound(
    mesh: &SurfaceMesh,
    lipschitz: f64,
    c1: f64,
) -> Result<MonotonicityBound> {
    let level = LevelGeometry::build(mesh)?;
    let triangles = mesh.triangles();
    let basis = |t: usize, v: usize| -> f64 {
        let k = triangles[t]
            .iter()
            .position(|&a| a == v)
            .expect("vertex of its ring triangle");
        level.triangles[t].basis_gradients[k].norm()
    };
    let mut bound = MonotonicityBound {
        c1_min: 0.0,
        c_tau_max: f64::INFINITY,
    };
    for (i, star) in mesh.stars().iter().enumerate() {
        let cv = &level.volumes[i];
        let n = star.valence();
        let diam = star
            .ring_tris
            .iter()
            .map(|&t| level.triangles[t].diameter)
            .fold(0.0, f64::max);
        let eps = select_viscosity([diam], c1);
        let mut diagonal = 0.0;
        for j in 0..n {
            let (t, prev) = (star.ring_tris[j], star.ring_tris[(j + n - 1) % n]);
            let k = star.ring[j];
            let sensitivity = lipschitz
                * (cv.sector_area[j] * basis(t, k)
                    + cv.sector_area[(j + n - 1) % n] * basis(prev, k));
            bound.c1_min = bound.c1_min.max(sensitivity / (cv.edge_weight(j) * diam));
            diagonal += lipschitz * cv.sector_area[j] * basis(t, i) + eps * cv.edge_weight(j);
        }
        bound.c_tau_max = bound
            .c_tau_max
            .min(cv.total_area / (diagonal * level.min_edge));
    }
    Ok(bound)
}
