#![allow(dead_code)]

use ltl_core::mesh::{TriangleMesh, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Hexagonal patch of a triangular lattice with `rings` rings around the
/// origin, in the plane z = 0. Vertices strictly inside the patch are moved
/// by up to `jitter` lattice spacings.
pub fn hex_disc(rings: i64, jitter: f64, seed: u64) -> (TriangleMesh, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut index = std::collections::HashMap::new();
    let mut vertices = Vec::new();
    let mut interior = Vec::new();
    let inside = |q: i64, r: i64| q.abs() <= rings && r.abs() <= rings && (q + r).abs() <= rings;
    for q in -rings..=rings {
        for r in -rings..=rings {
            if !inside(q, r) {
                continue;
            }
            let mut x = q as f64 + 0.5 * r as f64;
            let mut y = r as f64 * 3f64.sqrt() / 2.0;
            let is_interior = q.abs() < rings && r.abs() < rings && (q + r).abs() < rings;
            if is_interior {
                x += jitter * rng.random_range(-1.0..1.0);
                y += jitter * rng.random_range(-1.0..1.0);
            }
            index.insert((q, r), vertices.len());
            vertices.push(Vec3::new(x, y, 0.0));
            interior.push(is_interior);
        }
    }
    let mut faces = Vec::new();
    for q in -rings..=rings {
        for r in -rings..=rings {
            let corner = |dq: i64, dr: i64| index.get(&(q + dq, r + dr)).copied();
            if let (Some(a), Some(b), Some(c)) = (corner(0, 0), corner(1, 0), corner(0, 1)) {
                faces.push([a, b, c]);
            }
            if let (Some(a), Some(b), Some(c)) = (corner(1, 0), corner(1, 1), corner(0, 1)) {
                faces.push([a, b, c]);
            }
        }
    }
    (TriangleMesh::new(vertices, faces).unwrap(), interior)
}

pub fn rel_l2(approx: &[f64], exact: &[f64]) -> f64 {
    let num: f64 = approx.iter().zip(exact).map(|(a, e)| (a - e).powi(2)).sum();
    let den: f64 = exact.iter().map(|e| e * e).sum();
    (num / den).sqrt()
}
