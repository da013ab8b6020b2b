//! Explicit monotone finite-volume time stepping on an evolving mesh.
//!
//! One step maps nodal values `u^n` on the mesh at `t^n` to
//! `u_i^{n+1} = u_i^n − τ^n H_i^n`, where the numerical Hamiltonian `H_i^n`
//! averages `H` over the star of `i` (weighted by the control-volume sectors)
//! and subtracts an artificial viscosity term built from edge differences.
//! The mesh is then advected to `t^{n+1}` and all geometry is rebuilt.

use std::sync::Arc;

use rayon::prelude::*;

use crate::calculus::{interpolate, NodalField, ScalarField};
use crate::control_volume::{all_control_volumes, ControlVolumeGeom};
use crate::error::{Error, Result};
use crate::geometry::{all_triangle_geometry, EvolvingSurface, SurfaceMesh, TriangleGeom};
use crate::hamiltonian::{Hamiltonian, SurfacePoint};

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeParams {
    /// `C₁` in `ε_i^n = C₁ max_j h_{T_j}`.
    pub c1_viscosity: f64,
    /// `C_τ` in `τ^n = C_τ min |E|`.
    pub c_tau: f64,
    pub end_time: f64,
    /// Sorted, deduplicated times in `[0, end_time]` at which the run
    /// reports; steps are shortened to hit them exactly.
    pub output_times: Vec<f64>,
}

impl SchemeParams {
    pub fn new(c1_viscosity: f64, c_tau: f64, end_time: f64) -> Result<Self> {
        let p = SchemeParams {
            c1_viscosity,
            c_tau,
            end_time,
            output_times: Vec::new(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_output_times(mut self, mut times: Vec<f64>) -> Result<Self> {
        times.sort_by(f64::total_cmp);
        times.dedup();
        self.output_times = times;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c1_viscosity > 0.0 && self.c1_viscosity.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "viscosity factor must be positive, got {}",
                self.c1_viscosity
            )));
        }
        if !(self.c_tau > 0.0 && self.c_tau.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "time step factor must be positive, got {}",
                self.c_tau
            )));
        }
        if !(self.end_time >= 0.0 && self.end_time.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "end time must be non-negative, got {}",
                self.end_time
            )));
        }
        if let Some(t) = self
            .output_times
            .iter()
            .find(|&&t| !(0.0..=self.end_time).contains(&t))
        {
            return Err(Error::InvalidParams(format!(
                "output time {t} outside [0, {}]",
                self.end_time
            )));
        }
        Ok(())
    }

    /// First output time strictly after `t`, or the end time.
    fn next_stop(&self, t: f64) -> f64 {
        self.output_times
            .iter()
            .copied()
            .find(|&s| s > t)
            .unwrap_or(self.end_time)
            .min(self.end_time)
    }
}

/// Triangle and control-volume geometry of one time level.
#[derive(Debug)]
pub struct LevelGeometry {
    pub triangles: Vec<TriangleGeom>,
    pub volumes: Vec<ControlVolumeGeom>,
    pub min_edge: f64,
    pub h_max: f64,
}

impl LevelGeometry {
    pub fn build(mesh: &SurfaceMesh) -> Result<Self> {
        let triangles = all_triangle_geometry(mesh)?;
        let volumes = all_control_volumes(mesh, &triangles)?;
        let h_max = triangles.iter().map(|g| g.diameter).fold(0.0, f64::max);
        Ok(LevelGeometry {
            triangles,
            volumes,
            min_edge: mesh.min_edge_length(),
            h_max,
        })
    }
}

/// Snapshot of the discrete solution at `t^n`.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub step_index: usize,
    pub time: f64,
    pub mesh: SurfaceMesh,
    pub field: NodalField,
    pub geometry: Arc<LevelGeometry>,
}

impl SolverState {
    pub fn new(mesh: SurfaceMesh, field: NodalField) -> Result<Self> {
        field.check_mesh(&mesh)?;
        let geometry = Arc::new(LevelGeometry::build(&mesh)?);
        Ok(SolverState {
            step_index: 0,
            time: mesh.time(),
            mesh,
            field,
            geometry,
        })
    }

    /// Interpolated initial data on the surface's initial mesh.
    pub fn initial(surface: &EvolvingSurface, u0: &dyn ScalarField) -> Result<Self> {
        let mesh = surface.initial_mesh().clone();
        let field = interpolate(u0, &mesh)?;
        SolverState::new(mesh, field)
    }

    /// Same mesh and geometry, different nodal values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Ok(SolverState {
            field: NodalField::new(&self.mesh, values)?,
            ..self.clone()
        })
    }

    pub fn values(&self) -> &[f64] {
        self.field.values()
    }
}

/// `τ = C_τ · min edge`, shortened so the step never passes the end time or
/// the next output time.
pub fn select_timestep(mesh: &SurfaceMesh, params: &SchemeParams) -> f64 {
    timestep_from_edge(mesh.min_edge_length(), mesh.time(), params).0
}

/// Returns the step and the exact time it lands on.
fn timestep_from_edge(min_edge: f64, t: f64, params: &SchemeParams) -> (f64, f64) {
    let stop = params.next_stop(t);
    let tau = params.c_tau * min_edge;
    if tau >= stop - t {
        (stop - t, stop)
    } else {
        (tau, t + tau)
    }
}

/// `ε = C₁ · max` of the ring triangle diameters.
pub fn select_viscosity(diameters: impl IntoIterator<Item = f64>, c1_viscosity: f64) -> f64 {
    c1_viscosity * diameters.into_iter().fold(0.0, f64::max)
}

pub fn vertex_viscosity(state: &SolverState, i: usize, params: &SchemeParams) -> f64 {
    let geo = &state.geometry.triangles;
    select_viscosity(
        state.mesh.stars()[i]
            .ring_tris
            .iter()
            .map(|&t| geo[t].diameter),
        params.c1_viscosity,
    )
}

/// `H_i^n` for the state's own field.
pub fn numerical_hamiltonian(
    i: usize,
    state: &SolverState,
    h: &dyn Hamiltonian,
    eps_i: f64,
) -> Result<f64> {
    state.field.check_mesh(&state.mesh)?;
    numerical_hamiltonian_of(state.values(), i, state, h, eps_i)
}

fn numerical_hamiltonian_of(
    u: &[f64],
    i: usize,
    state: &SolverState,
    h: &dyn Hamiltonian,
    eps_i: f64,
) -> Result<f64> {
    let mesh = &state.mesh;
    let star = &mesh.stars()[i];
    let cv = &state.geometry.volumes[i];
    let geo = &state.geometry.triangles;
    let triangles = mesh.triangles();
    let at = SurfacePoint {
        position: mesh.position(i),
        origin: mesh.origins()[i],
    };
    let ui = u[i];

    let mut average = 0.0;
    let mut flux = 0.0;
    let mut weight_sum = 0.0;
    for j in 0..star.valence() {
        let t = star.ring_tris[j];
        let g = &geo[t];
        let tri = triangles[t];
        let mut grad = crate::geometry::Vec3::ZERO;
        for a in 0..3 {
            if tri[a] != i {
                grad += g.basis_gradients[a] * (u[tri[a]] - ui);
            }
        }
        let w = cv.sector_area[j] / cv.total_area;
        weight_sum += w;
        average += w * h.eval(at, state.time, grad)?;
        flux += (u[star.ring[j]] - ui) / cv.edge_len[j] * (cv.h_left[j] + cv.h_right[j]);
    }
    debug_assert!(
        (weight_sum - 1.0).abs() < 1e-12,
        "weights sum to {weight_sum}"
    );
    Ok(average - eps_i / cv.total_area * flux)
}

/// The scheme operator `S_h^n` applied to arbitrary nodal values on the
/// state's mesh, with a given step `tau`.
pub fn scheme_operator(
    state: &SolverState,
    h: &dyn Hamiltonian,
    params: &SchemeParams,
    tau: f64,
    u: &[f64],
) -> Result<Vec<f64>> {
    if u.len() != state.mesh.vertex_count() {
        return Err(Error::EpochMismatch);
    }
    (0..u.len())
        .into_par_iter()
        .map(|i| {
            let eps = vertex_viscosity(state, i, params);
            let next = u[i] - tau * numerical_hamiltonian_of(u, i, state, h, eps)?;
            if next.is_finite() {
                Ok(next)
            } else {
                Err(Error::NonFiniteUpdate {
                    vertex: i,
                    time: state.time,
                })
            }
        })
        .collect()
}

/// What one step used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInfo {
    pub tau: f64,
    pub eps_min: f64,
    pub eps_max: f64,
}

/// Step length the scheme takes from `state`.
pub fn state_timestep(state: &SolverState, params: &SchemeParams) -> f64 {
    timestep_from_edge(state.geometry.min_edge, state.time, params).0
}

fn advance(
    state: &SolverState,
    h: &dyn Hamiltonian,
    params: &SchemeParams,
    surface: &EvolvingSurface,
) -> Result<(SolverState, StepInfo)> {
    let (tau, t_next) = timestep_from_edge(state.geometry.min_edge, state.time, params);
    let values = scheme_operator(state, h, params, tau, state.values())?;
    let (eps_min, eps_max) = (0..state.mesh.vertex_count())
        .map(|i| vertex_viscosity(state, i, params))
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), e| {
            (lo.min(e), hi.max(e))
        });
    let mesh = surface.advance(&state.mesh, t_next)?;
    let field = NodalField::new(&mesh, values).map_err(|e| match e {
        Error::NonFiniteValue(vertex) => Error::NonFiniteUpdate {
            vertex,
            time: state.time,
        },
        other => other,
    })?;
    let mut next = SolverState::new(mesh, field)?;
    next.step_index = state.step_index + 1;
    Ok((
        next,
        StepInfo {
            tau,
            eps_min,
            eps_max,
        },
    ))
}

/// One explicit step from `t^n` to `t^{n+1}`.
pub fn step(
    state: &SolverState,
    h: &dyn Hamiltonian,
    params: &SchemeParams,
    surface: &EvolvingSurface,
) -> Result<SolverState> {
    if !(state.time < params.end_time) {
        return Err(Error::InvalidParams(format!(
            "cannot step past the end time {} (t = {})",
            params.end_time, state.time
        )));
    }
    advance(state, h, params, surface).map(|(s, _)| s)
}

/// Running extrema of the step parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunStats {
    pub steps: usize,
    pub tau_min: f64,
    pub tau_max: f64,
    pub eps_min: f64,
    pub eps_max: f64,
}

impl Default for RunStats {
    fn default() -> Self {
        RunStats {
            steps: 0,
            tau_min: f64::INFINITY,
            tau_max: 0.0,
            eps_min: f64::INFINITY,
            eps_max: 0.0,
        }
    }
}

impl RunStats {
    fn record(&mut self, info: &StepInfo) {
        self.steps += 1;
        self.tau_min = self.tau_min.min(info.tau);
        self.tau_max = self.tau_max.max(info.tau);
        self.eps_min = self.eps_min.min(info.eps_min);
        self.eps_max = self.eps_max.max(info.eps_max);
    }

    /// Extrema as reported; zero before the first step.
    pub fn extrema(&self) -> [f64; 4] {
        if self.steps == 0 {
            [0.0; 4]
        } else {
            [self.tau_min, self.tau_max, self.eps_min, self.eps_max]
        }
    }
}

/// `n t tau_min tau_max eps_min eps_max u_min u_max`
pub fn stats_line(state: &SolverState, stats: &RunStats) -> String {
    let [tau_min, tau_max, eps_min, eps_max] = stats.extrema();
    format!(
        "{} {:.9e} {:.9e} {:.9e} {:.9e} {:.9e} {:.9e} {:.9e}",
        state.step_index,
        state.time,
        tau_min,
        tau_max,
        eps_min,
        eps_max,
        state.field.min(),
        state.field.max()
    )
}

/// Callbacks from [`run`].
pub trait RunObserver {
    /// Every time level, including the initial one.
    fn on_step(&mut self, _state: &SolverState) -> Result<()> {
        Ok(())
    }

    /// Each requested output time.
    fn on_output(&mut self, _state: &SolverState, _stats: &RunStats) -> Result<()> {
        Ok(())
    }
}

impl RunObserver for () {}

pub struct RunOutcome {
    pub state: SolverState,
    pub stats: RunStats,
}

/// Solve from `u0` at `t = 0` to `params.end_time`.
pub fn run(
    surface: &EvolvingSurface,
    h: &dyn Hamiltonian,
    u0: &dyn ScalarField,
    params: &SchemeParams,
    observer: &mut dyn RunObserver,
) -> Result<RunOutcome> {
    params.validate()?;
    let mut state = SolverState::initial(surface, u0)?;
    let mut stats = RunStats::default();
    let mut next_output = 0;
    let emit =
        |state: &SolverState, stats: &RunStats, next: &mut usize, obs: &mut dyn RunObserver| {
            while *next < params.output_times.len() && params.output_times[*next] <= state.time {
                obs.on_output(state, stats)?;
                *next += 1;
            }
            Ok::<(), Error>(())
        };

    observer.on_step(&state)?;
    emit(&state, &stats, &mut next_output, observer)?;
    while state.time < params.end_time {
        let (next, info) = advance(&state, h, params, surface)?;
        stats.record(&info);
        state = next;
        observer.on_step(&state)?;
        emit(&state, &stats, &mut next_output, observer)?;
    }
    Ok(RunOutcome { state, stats })
}
