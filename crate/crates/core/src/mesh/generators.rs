use std::collections::HashMap;
use std::f64::consts::TAU;

use super::{MeshError, TriangleMesh, Vec3};

/// Largest accepted icosphere subdivision level (655 362 vertices).
pub const MAX_ICOSPHERE_SUBDIVISIONS: u32 = 8;

/// Unit icosphere: a regular icosahedron split `subdivisions` times, with every
/// new vertex projected back onto the sphere.
///
/// Produces `10·4^s + 2` vertices and `20·4^s` faces.
pub fn gen_icosphere(subdivisions: u32) -> Result<TriangleMesh, MeshError> {
    if subdivisions > MAX_ICOSPHERE_SUBDIVISIONS {
        return Err(MeshError::SubdivisionCap {
            requested: subdivisions,
            cap: MAX_ICOSPHERE_SUBDIVISIONS,
        });
    }
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vec3> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Vec3>| -> usize {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                vertices.push(((vertices[a] + vertices[b]) * 0.5).normalize());
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    TriangleMesh::new(vertices, faces)
}

/// Point on the torus with major radius `a` and minor radius `r` at
/// parameters `(x, y)`: `((a + r cos x) cos y, (a + r cos x) sin y, r sin x)`.
pub(crate) fn torus_point(a: f64, r: f64, x: f64, y: f64) -> Vec3 {
    let ring = a + r * x.cos();
    Vec3::new(ring * y.cos(), ring * y.sin(), r * x.sin())
}

/// Parametric torus grid with `nu` samples around the tube (parameter `x`)
/// and `nv` around the axis (parameter `y`). Each vertex keeps `(x, y)`.
pub fn gen_torus(a: f64, r: f64, nu: usize, nv: usize) -> Result<TriangleMesh, MeshError> {
    if !(r > 0.0 && a > r && a.is_finite()) {
        return Err(MeshError::TorusGeometry(format!(
            "need a > r > 0 (got a = {a}, r = {r})"
        )));
    }
    if nu < 3 || nv < 3 {
        return Err(MeshError::TorusGeometry(format!(
            "need nu, nv >= 3 (got nu = {nu}, nv = {nv})"
        )));
    }
    let index = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut vertices = Vec::with_capacity(nu * nv);
    let mut params = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let x = TAU * i as f64 / nu as f64;
        for j in 0..nv {
            let y = TAU * j as f64 / nv as f64;
            vertices.push(torus_point(a, r, x, y));
            params.push([x, y]);
        }
    }
    // x_y × x_x points outward, so quads are wound (i,j) → (i,j+1) → (i+1,j+1).
    let mut faces = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let p00 = index(i, j);
            let p01 = index(i, j + 1);
            let p10 = index(i + 1, j);
            let p11 = index(i + 1, j + 1);
            faces.push([p00, p01, p11]);
            faces.push([p00, p11, p10]);
        }
    }
    TriangleMesh::new(vertices, faces)?.with_params(params)
}
