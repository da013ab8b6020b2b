use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use surfhj::calculus::{
    interpolate, sphere_exact_derivatives, tangential_gradient, BuiltinSolution, FnScalar,
    FnVector, NodalField,
};
use surfhj::control_volume::{all_control_volumes, incircle_tangent_length};
use surfhj::geometry::{all_triangle_geometry, icosphere, nonacute_sphere, TriangleGeom, Vec3};
use surfhj::hamiltonian::{
    level_set_hamiltonian, sphere_manufactured_hamiltonian, CoefficientFields, Hamiltonian,
    SurfacePoint,
};
use surfhj::solver::{scheme_operator, state_timestep, step, SchemeParams, SolverState};
use surfhj::surfaces::{expanding_sphere_surface, radial_velocity};
use surfhj::verify::{eoc, monotonicity_bound};

fn point() -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-1.0..1.0f64).prop_map(Vec3::from_array)
}

/// Triangles with every angle at least about 1 degree.
fn triangle() -> impl Strategy<Value = [Vec3; 3]> {
    prop::array::uniform3(point()).prop_filter("well shaped", |p| {
        TriangleGeom::from_points(*p)
            .map(|g| g.vertex_angles.iter().all(|&a| a > 0.02))
            .unwrap_or(false)
    })
}

fn unit_vector() -> impl Strategy<Value = Vec3> {
    point()
        .prop_filter("not tiny", |p| p.norm() > 0.1)
        .prop_map(Vec3::normalized)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn triangle_invariants(p in triangle()) {
        let g = TriangleGeom::from_points(p).unwrap();
        prop_assert!((g.normal.norm() - 1.0).abs() < 1e-12);
        let angles: f64 = g.vertex_angles.iter().sum();
        prop_assert!((angles - std::f64::consts::PI).abs() < 1e-10);
        let sum = g.basis_gradients[0] + g.basis_gradients[1] + g.basis_gradients[2];
        prop_assert!(sum.norm() < 1e-10 / g.inradius);
        for b in g.basis_gradients {
            prop_assert!(b.dot(g.normal).abs() <= 1e-12 * b.norm());
        }
    }

    #[test]
    fn affine_reconstruction_is_projected_gradient(p in triangle(), c in point(), d in -5.0..5.0f64) {
        let g = TriangleGeom::from_points(p).unwrap();
        let f = |x: Vec3| c.dot(x) + d;
        let recon = (0..3).fold(Vec3::ZERO, |acc, a| acc + g.basis_gradients[a] * f(p[a]));
        // in-plane gradient from a two-vector frame of the triangle
        let e1 = (p[1] - p[0]).normalized();
        let e2 = g.normal.cross(e1);
        let expected = e1 * c.dot(e1) + e2 * c.dot(e2);
        prop_assert!((recon - expected).norm() <= 1e-10 * c.norm().max(1e-3));
    }

    #[test]
    fn tangent_length_matches_inradius_oracle(p in triangle(), k in 0usize..3) {
        let g = TriangleGeom::from_points(p).unwrap();
        let d = incircle_tangent_length(p, k).unwrap();
        let oracle = g.inradius / (0.5 * g.vertex_angles[k]).tan();
        prop_assert!((d - oracle).abs() <= 1e-12 * oracle.max(1.0));
    }

    #[test]
    fn manufactured_identity(n in unit_vector(), t in 0.0..1.0f64, second in any::<bool>()) {
        let g = if second { BuiltinSolution::SinCubic } else { BuiltinSolution::ExpCubic };
        let h = sphere_manufactured_hamiltonian(Arc::new(g));
        let x = n * (1.0 + t);
        let d = sphere_exact_derivatives(&g, x, t).unwrap();
        let r = d.material_derivative + h.eval(SurfacePoint::at(x), t, d.tangential_gradient).unwrap();
        prop_assert!(r.abs() < 1e-10, "residual {r}");
    }

    #[test]
    fn level_set_hamiltonian_is_homogeneous_when_drift_cancels(
        n in unit_vector(), p in point(), lambda in 0.0..20.0f64, t in 0.0..1.0f64,
    ) {
        let velocity = radial_velocity();
        let h = level_set_hamiltonian(CoefficientFields {
            speed: Arc::new(FnScalar(|x: Vec3, _| 1.0 + 4.0 * x.x * x.x)),
            drift: Arc::new(FnVector(|x: Vec3, _| x.normalized())),
            surface_velocity: velocity,
        });
        let at = SurfacePoint::at(n * (1.0 + t));
        let scaled = h.eval(at, t, p * lambda).unwrap();
        let direct = lambda * h.eval(at, t, p).unwrap();
        prop_assert!((scaled - direct).abs() <= 1e-13 * direct.abs().max(1e-300) + 1e-300);
    }

    #[test]
    fn eoc_is_scale_invariant(
        h0 in 0.5..2.0f64,
        shrink in prop::collection::vec(0.3..0.9f64, 2..6),
        errors in prop::collection::vec(1e-4..1.0f64, 6),
        lambda in 1e-3..1e3f64,
    ) {
        let mut h = h0;
        let mut rows = vec![(h, errors[0])];
        for (k, s) in shrink.iter().enumerate() {
            h *= s;
            rows.push((h, errors[k + 1]));
        }
        let scaled: Vec<_> = rows.iter().map(|&(h, e)| (h, e * lambda)).collect();
        for (a, b) in eoc(&rows).unwrap().iter().zip(&eoc(&scaled).unwrap()) {
            match (a.eoc, b.eoc) {
                (None, None) => {}
                (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0)),
                _ => prop_assert!(false, "eoc presence differs"),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn scheme_commutes_with_constants(seed in any::<u64>(), c in -10.0..10.0f64) {
        let surface = expanding_sphere_surface(icosphere(1).unwrap()).unwrap();
        let h = sphere_manufactured_hamiltonian(Arc::new(BuiltinSolution::ExpCubic));
        let params = SchemeParams::new(0.5, 0.005, 0.5).unwrap();
        let state = SolverState::initial(&surface, &0.0).unwrap();
        let tau = state_timestep(&state, &params);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<f64> = (0..state.mesh.vertex_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let shifted: Vec<f64> = u.iter().map(|v| v + c).collect();
        let a = scheme_operator(&state, &h, &params, tau, &u).unwrap();
        let b = scheme_operator(&state, &h, &params, tau, &shifted).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((y - (x + c)).abs() <= 1e-12);
        }
    }

    #[test]
    fn gradient_is_linear(seed in any::<u64>(), alpha in -3.0..3.0f64, beta in -3.0..3.0f64) {
        let mesh = icosphere(1).unwrap();
        let geo = all_triangle_geometry(&mesh).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut random = || -> Vec<f64> { (0..mesh.vertex_count()).map(|_| rng.random_range(-1.0..1.0)).collect() };
        let (u, v) = (random(), random());
        let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| alpha * a + beta * b).collect();
        let (u, v, w) = (
            NodalField::new(&mesh, u).unwrap(),
            NodalField::new(&mesh, v).unwrap(),
            NodalField::new(&mesh, w).unwrap(),
        );
        for (t, g) in geo.iter().enumerate() {
            let gu = tangential_gradient(&u, &mesh, g, t).unwrap();
            let gv = tangential_gradient(&v, &mesh, g, t).unwrap();
            let gw = tangential_gradient(&w, &mesh, g, t).unwrap();
            prop_assert!((gw - (gu * alpha + gv * beta)).norm() <= 1e-12 * (1.0 + gw.norm()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    /// With `H(x, t, 0) = 0`, monotonicity and commuting with constants give
    /// a discrete maximum principle once `C1` meets the sufficient bound.
    #[test]
    fn sup_norm_does_not_grow(seed in any::<u64>(), obtuse in any::<bool>()) {
        let mesh = if obtuse { nonacute_sphere(1) } else { icosphere(1) }.unwrap();
        // |p| − v·p has Lipschitz constant 1 + |v projected on the triangle
        // plane|; the radial velocity is within 0.5 of the normal here
        let c1 = monotonicity_bound(&mesh, 1.5, 1.0).unwrap().c1_min;
        let surface = expanding_sphere_surface(mesh).unwrap();
        let h = level_set_hamiltonian(CoefficientFields {
            speed: Arc::new(1.0),
            drift: Arc::new(Vec3::ZERO),
            surface_velocity: surface.velocity_field(),
        });
        let params = SchemeParams::new(c1, 0.005, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = SolverState::initial(&surface, &0.0).unwrap();
        let u0: Vec<f64> = (0..state.mesh.vertex_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let bound = u0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        state = state.with_values(u0).unwrap();
        for _ in 0..20 {
            state = step(&state, &h, &params, &surface).unwrap();
            let sup = state.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(sup <= bound + 1e-10);
        }
    }

    #[test]
    fn expanding_sphere_vertices_stay_on_sphere(t in 0.0..2.0f64) {
        let mesh = icosphere(2).unwrap();
        let surface = expanding_sphere_surface(mesh.clone()).unwrap();
        let moved = surface.advect_mesh(t).unwrap();
        prop_assert_eq!(moved.triangles(), mesh.triangles());
        prop_assert!(moved.same_topology(&mesh));
        for x in moved.positions() {
            prop_assert!((x.norm() - (1.0 + t)).abs() < 1e-12);
        }
    }
}

#[test]
fn control_volume_area_identity_on_all_test_meshes() {
    let meshes = (0..=4)
        .map(|l| icosphere(l).unwrap())
        .chain((0..=3).map(|l| nonacute_sphere(l).unwrap()));
    for mesh in meshes {
        let geo = all_triangle_geometry(&mesh).unwrap();
        for cv in all_control_volumes(&mesh, &geo).unwrap() {
            assert!(cv.total_area > 0.0);
            assert!(cv.sector_area.iter().all(|&a| a > 0.0));
            let sum: f64 = cv.sector_area.iter().sum();
            assert!((sum - cv.total_area).abs() <= 1e-10 * cv.total_area);
        }
    }
}

/// Largest gap between the linear interpolant at face centroids and `f` at
/// the centroid's radial projection.
fn centroid_interpolation_error<F: Fn(Vec3) -> f64 + Send + Sync>(
    f: &F,
    level: usize,
) -> (f64, f64) {
    let mesh = icosphere(level).unwrap();
    let field = interpolate(&FnScalar(|x: Vec3, _| f(x)), &mesh).unwrap();
    let u = field.values();
    let mut err = 0.0f64;
    let mut h = 0.0f64;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let [a, b, c] = mesh.triangle_points(t);
        h = h.max((b - a).norm().max((c - b).norm()).max((a - c).norm()));
        let centroid = (a + b + c) / 3.0;
        let linear = (u[tri[0]] + u[tri[1]] + u[tri[2]]) / 3.0;
        err = err.max((linear - f(centroid.normalized())).abs());
    }
    (h, err)
}

#[test]
fn interpolation_error_of_lipschitz_function_decays_linearly() {
    // kinked along a plane in general position relative to the mesh
    let n = Vec3::new(0.3, 0.5, 0.8).normalized();
    let f = |x: Vec3| (x.dot(n) - 0.2).abs();
    let errs: Vec<_> = (2..=6)
        .map(|l| centroid_interpolation_error(&f, l))
        .collect();
    for w in errs.windows(2) {
        let ratio = w[1].1 / w[0].1;
        let h_ratio = w[1].0 / w[0].0;
        assert!(
            (0.7 * h_ratio..=1.3 * h_ratio).contains(&ratio),
            "error ratio {ratio} vs h ratio {h_ratio}: {errs:?}"
        );
    }
}
