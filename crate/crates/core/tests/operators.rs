mod common;

use common::{hex_disc, rel_l2};
use ltl_core::ltl::{
    build_frames, gradient_field, laplacian, laplacian_field, parallel_transport, vertex_gradient,
    LtlConfig, LtlOperator, OperatorError, TangentFrame,
};
use ltl_core::mesh::{build_adjacency, gen_icosphere, gen_torus, validate, TriangleMesh, Vec3};
use nalgebra::Rotation3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn xs(mesh: &TriangleMesh, k: usize) -> Vec<f64> {
    mesh.vertices().iter().map(|p| p[k]).collect()
}

fn smooth_field(mesh: &TriangleMesh) -> Vec<f64> {
    mesh.vertices()
        .iter()
        .map(|p| (1.3 * p.x).sin() + p.y * p.z + 0.5 * (p.z).exp())
        .collect()
}

#[test]
fn constants_are_annihilated_exactly() {
    for mesh in [gen_icosphere(3).unwrap(), gen_torus(2.0, 1.0, 15, 31).unwrap()] {
        let op = LtlOperator::new(mesh.clone()).unwrap();
        let h = vec![3.7; mesh.n_vertices()];
        let grad = op.gradient_field(&h).unwrap();
        assert!(grad.ambient.iter().all(|g| *g == Vec3::zeros()));
        let lap = op.laplacian_field(&h).unwrap();
        assert!(lap.iter().all(|&x| x == 0.0));
    }
}

#[test]
fn affine_fields_are_reproduced_on_a_flat_disc() {
    let (mesh, interior) = hex_disc(12, 0.25, 11);
    let adj = build_adjacency(&mesh).unwrap();
    let cfg = LtlConfig::default();
    let frames = build_frames(&mesh, &adj, &cfg).unwrap();
    let h: Vec<f64> = mesh.vertices().iter().map(|p| 3.0 * p.x + 2.0 * p.y).collect();
    let mut checked = 0;
    for v in 0..mesh.n_vertices() {
        if !interior[v] {
            assert!(matches!(
                vertex_gradient(&mesh, &adj, &frames, &h, v, &cfg),
                Err(OperatorError::BoundaryVertex { .. })
            ));
            continue;
        }
        let g = vertex_gradient(&mesh, &adj, &frames, &h, v, &cfg).unwrap();
        assert!((g.ambient - Vec3::new(3.0, 2.0, 0.0)).norm() < 1e-10);
        if adj[v].neighbors.iter().all(|&n| interior[n]) {
            let lap = laplacian(&mesh, &adj, &frames, &h, v, &cfg).unwrap();
            assert!(lap.abs() < 1e-8, "vertex {v}: {lap}");
            checked += 1;
        }
    }
    assert!(checked > 300);
}

#[test]
fn gradients_are_tangent() {
    for mesh in [gen_icosphere(3).unwrap(), gen_torus(2.0, 1.0, 15, 31).unwrap()] {
        let op = LtlOperator::new(mesh.clone()).unwrap();
        let grad = op.gradient_field(&smooth_field(&mesh)).unwrap();
        for (g, f) in grad.ambient.iter().zip(op.frames()) {
            assert!(g.dot(&f.normal).abs() < 1e-10);
        }
        for ((g, c), f) in grad.ambient.iter().zip(&grad.coeffs).zip(op.frames()) {
            assert!((g - (f.e1 * c.x + f.e2 * c.y)).norm() < 1e-12);
        }
    }
}

#[test]
fn laplacian_is_independent_of_the_tangent_basis() {
    let mesh = gen_icosphere(3).unwrap();
    let op = LtlOperator::new(mesh.clone()).unwrap();
    let h = smooth_field(&mesh);
    let reference = op.laplacian_field(&h).unwrap();
    let grad_ref = op.gradient_field(&h).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let frames: Vec<TangentFrame> = op
            .frames()
            .iter()
            .map(|f| f.rotated(rng.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        let rotated = LtlOperator::from_parts(
            mesh.clone(),
            op.adjacency().clone(),
            frames,
            LtlConfig::default(),
        )
        .unwrap();
        let lap = rotated.laplacian_field(&h).unwrap();
        let diff = lap
            .iter()
            .zip(reference.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-9, "{diff}");
        let grad = rotated.gradient_field(&h).unwrap();
        for (a, b) in grad.ambient.iter().zip(&grad_ref.ambient) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}

#[test]
fn rigid_motions_rotate_gradients_and_keep_laplacians() {
    let mesh = gen_icosphere(2).unwrap();
    let rot = Rotation3::from_euler_angles(-0.41, 1.12, 2.9);
    let moved = mesh.map_vertices(|p| rot * p + Vec3::new(0.3, -2.0, 1.5));
    let h = smooth_field(&mesh);
    let a = LtlOperator::new(mesh).unwrap();
    let b = LtlOperator::new(moved).unwrap();
    let ga = a.gradient_field(&h).unwrap();
    let gb = b.gradient_field(&h).unwrap();
    for (x, y) in ga.ambient.iter().zip(&gb.ambient) {
        assert!((rot * x - y).norm() < 1e-9);
    }
    let la = a.laplacian_field(&h).unwrap();
    let lb = b.laplacian_field(&h).unwrap();
    for (x, y) in la.iter().zip(lb.iter()) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn per_vertex_and_whole_field_laplacians_agree() {
    let mesh = gen_torus(2.0, 1.0, 9, 17).unwrap();
    let adj = build_adjacency(&mesh).unwrap();
    let cfg = LtlConfig::default();
    let frames = build_frames(&mesh, &adj, &cfg).unwrap();
    let h = smooth_field(&mesh);
    let field = laplacian_field(&mesh, &adj, &frames, &h, &cfg).unwrap();
    let grads = gradient_field(&mesh, &adj, &frames, &h, &cfg).unwrap();
    for v in (0..mesh.n_vertices()).rev() {
        let single = laplacian(&mesh, &adj, &frames, &h, v, &cfg).unwrap();
        assert!((single - field[v]).abs() < 1e-10);
        let g = vertex_gradient(&mesh, &adj, &frames, &h, v, &cfg).unwrap();
        assert_eq!(g.ambient, grads.ambient[v]);
    }
}

#[test]
fn serial_and_parallel_fields_are_bitwise_identical() {
    let mesh = gen_icosphere(4).unwrap();
    let h = smooth_field(&mesh);
    let par = LtlOperator::new(mesh.clone()).unwrap();
    let ser = LtlOperator::with_config(
        mesh,
        LtlConfig {
            parallel: false,
            ..LtlConfig::default()
        },
    )
    .unwrap();
    assert_eq!(par.laplacian_field(&h).unwrap(), ser.laplacian_field(&h).unwrap());
    assert_eq!(par.gradient_field(&h).unwrap(), ser.gradient_field(&h).unwrap());
}

#[test]
fn transport_is_an_isometry() {
    let mesh = gen_icosphere(3).unwrap();
    let adj = build_adjacency(&mesh).unwrap();
    let cfg = LtlConfig::default();
    let frames = build_frames(&mesh, &adj, &cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for v in 0..mesh.n_vertices() {
        for &n in &adj[v].neighbors {
            let c = nalgebra::Vector2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let w = frames[n].ambient(&c);
            let moved = parallel_transport(&mesh, &adj, &frames, n, v, &w, &cfg).unwrap();
            assert!((moved.norm() - w.norm()).abs() < 1e-12);
            assert!(moved.dot(&frames[v].normal).abs() < 1e-12);
            let zero = parallel_transport(&mesh, &adj, &frames, n, v, &Vec3::zeros(), &cfg).unwrap();
            assert_eq!(zero, Vec3::zeros());
        }
    }
    let far = (0..mesh.n_vertices()).find(|&u| u != 0 && !adj[0].neighbors.contains(&u)).unwrap();
    assert!(matches!(
        parallel_transport(&mesh, &adj, &frames, far, 0, &Vec3::x(), &cfg),
        Err(OperatorError::NotAdjacent { .. })
    ));
}

#[test]
fn flat_transport_is_the_identity() {
    let (mesh, interior) = hex_disc(4, 0.2, 3);
    let adj = build_adjacency(&mesh).unwrap();
    let cfg = LtlConfig::default();
    let frames = build_frames(&mesh, &adj, &cfg).unwrap();
    let w = Vec3::new(0.7, -1.9, 0.0);
    for v in (0..mesh.n_vertices()).filter(|&v| interior[v]) {
        for &n in &adj[v].neighbors {
            let moved = parallel_transport(&mesh, &adj, &frames, n, v, &w, &cfg).unwrap();
            assert!((moved - w).norm() < 1e-14);
        }
    }
}

#[test]
fn transport_falls_back_when_an_edge_is_parallel_to_a_normal() {
    let mesh = gen_icosphere(1).unwrap();
    let adj = build_adjacency(&mesh).unwrap();
    let cfg = LtlConfig::default();
    let mut frames = build_frames(&mesh, &adj, &cfg).unwrap();
    let n = adj[0].neighbors[0];
    let edge = (mesh.vertex(n) - mesh.vertex(0)).normalize();
    let seed = mesh.vertex(adj[0].neighbors[1]) - mesh.vertex(0);
    frames[0] = TangentFrame::seeded(edge, &seed, 1e-8).unwrap();
    let op = LtlOperator::from_parts(mesh.clone(), adj.clone(), frames.clone(), cfg).unwrap();
    // Edge 0–n seen from both ends.
    assert_eq!(op.transport_fallbacks(), 2);
    let w = frames[n].e1;
    let moved = parallel_transport(&mesh, &adj, &frames, n, 0, &w, &cfg).unwrap();
    assert!((moved.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn open_meshes_are_refused() {
    let (mesh, _) = hex_disc(3, 0.0, 0);
    assert!(matches!(
        LtlOperator::new(mesh),
        Err(OperatorError::BoundaryVertex { .. })
    ));
}

#[test]
fn misaligned_fields_are_refused() {
    let op = LtlOperator::new(gen_icosphere(1).unwrap()).unwrap();
    assert!(matches!(
        op.laplacian_field(&[1.0; 3]),
        Err(OperatorError::FieldLength { expected: 42, got: 3 })
    ));
    let mut h = vec![0.0; 42];
    h[7] = f64::NAN;
    assert!(matches!(
        op.gradient_field(&h),
        Err(OperatorError::NonFiniteField { vertex: 7 })
    ));
}

#[test]
fn sphere_gradient_of_x1_converges() {
    let mut errors = Vec::new();
    for s in 2..=5 {
        let mesh = gen_icosphere(s).unwrap();
        let op = LtlOperator::new(mesh.clone()).unwrap();
        let grad = op.gradient_field(&xs(&mesh, 0)).unwrap();
        let (mut num, mut den) = (0.0, 0.0);
        for (g, p) in grad.ambient.iter().zip(mesh.vertices()) {
            let exact = Vec3::x() - p * p.x;
            num += (g - exact).norm_squared();
            den += exact.norm_squared();
        }
        errors.push((num / den).sqrt());
    }
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(errors[3] < 5e-3, "{errors:?}");
}

#[test]
fn sphere_laplacian_of_coordinates_converges() {
    for k in 0..3 {
        let errors: Vec<f64> = (2..=4)
            .map(|s| {
                let mesh = gen_icosphere(s).unwrap();
                let h = xs(&mesh, k);
                let lap = LtlOperator::new(mesh).unwrap().laplacian_field(&h).unwrap();
                let exact: Vec<f64> = h.iter().map(|x| -2.0 * x).collect();
                rel_l2(&lap, &exact)
            })
            .collect();
        assert!(errors.windows(2).all(|w| w[1] <= w[0]), "x{}: {errors:?}", k + 1);
    }
}

#[test]
fn disc_helper_is_a_valid_open_patch() {
    let (mesh, interior) = hex_disc(14, 0.25, 2);
    let d = validate(&mesh);
    assert_eq!(d.orientation_conflicts, 0);
    assert_eq!(d.non_manifold_edges, 0);
    assert_eq!(d.degenerate_faces, 0);
    assert_eq!(d.euler_characteristic, 1);
    assert!(interior.iter().filter(|&&i| i).count() >= 500);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operators_are_linear(alpha in -5.0f64..5.0, beta in -5.0f64..5.0) {
        let mesh = gen_torus(2.0, 1.0, 9, 17).unwrap();
        let op = LtlOperator::new(mesh.clone()).unwrap();
        let h = smooth_field(&mesh);
        let k: Vec<f64> = mesh.vertices().iter().map(|p| p.x * p.y - p.z).collect();
        let mix: Vec<f64> = h.iter().zip(&k).map(|(a, b)| alpha * a + beta * b).collect();
        let (lh, lk, lm) = (
            op.laplacian_field(&h).unwrap(),
            op.laplacian_field(&k).unwrap(),
            op.laplacian_field(&mix).unwrap(),
        );
        for v in 0..mesh.n_vertices() {
            prop_assert!((lm[v] - (alpha * lh[v] + beta * lk[v])).abs() < 1e-10);
        }
        let (gh, gk, gm) = (
            op.gradient_field(&h).unwrap(),
            op.gradient_field(&k).unwrap(),
            op.gradient_field(&mix).unwrap(),
        );
        for v in 0..mesh.n_vertices() {
            prop_assert!((gm.ambient[v] - (gh.ambient[v] * alpha + gk.ambient[v] * beta)).norm() < 1e-10);
        }
    }
}
