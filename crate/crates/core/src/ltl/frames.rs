use nalgebra::Vector2;

use super::{LtlConfig, OperatorError};
use crate::mesh::{Adjacency, TriangleMesh, Vec3, VertexStar};

/// Orthonormal triple at a vertex: unit normal plus a basis of the tangent plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentFrame {
    pub normal: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
}

impl TangentFrame {
    /// Frame with `e1` along the tangential part of `seed`; `None` when the
    /// seed is within `parallel_tol` (relative) of the normal.
    pub fn seeded(normal: Vec3, seed: &Vec3, parallel_tol: f64) -> Option<Self> {
        let tangential = project_to_plane(seed, &normal);
        let len = tangential.norm();
        if !(len > parallel_tol * seed.norm()) {
            return None;
        }
        let e1 = tangential / len;
        Some(Self {
            normal,
            e1,
            e2: normal.cross(&e1),
        })
    }

    /// Coefficients of `w` in the `(e1, e2)` basis.
    pub fn coords(&self, w: &Vec3) -> Vector2<f64> {
        Vector2::new(w.dot(&self.e1), w.dot(&self.e2))
    }

    pub fn ambient(&self, c: &Vector2<f64>) -> Vec3 {
        self.e1 * c.x + self.e2 * c.y
    }

    /// The same plane with the basis turned by `angle` about the normal.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let e1 = self.e1 * c + self.e2 * s;
        Self {
            normal: self.normal,
            e1,
            e2: self.normal.cross(&e1),
        }
    }
}

/// `w - <w, n> n` for unit `n`.
pub fn project_to_plane(w: &Vec3, n: &Vec3) -> Vec3 {
    w - n * w.dot(n)
}

/// Inverse-squared centroid distance weights for the faces of a star, together
/// with the unit face normals. Faces whose area falls below `area_threshold`
/// get no normal and no weight.
fn centroid_weighted_normals(
    mesh: &TriangleMesh,
    star: &VertexStar,
    v: usize,
    area_threshold: f64,
) -> Vec<Option<(f64, Vec3)>> {
    let center = mesh.vertex(v);
    star.wedges
        .iter()
        .zip(&star.faces)
        .map(|(&[i, j], &f)| {
            let cross = mesh.face_cross(f);
            let area = 0.5 * cross.norm();
            if area <= area_threshold {
                return None;
            }
            let centroid = (mesh.vertex(star.neighbors[i]) + mesh.vertex(star.neighbors[j]) + center) / 3.0;
            let dist2 = (centroid - center).norm_squared();
            Some((1.0 / dist2, cross / (2.0 * area)))
        })
        .collect()
}

pub(crate) fn vertex_normal_with_threshold(
    mesh: &TriangleMesh,
    star: &VertexStar,
    v: usize,
    area_threshold: f64,
) -> Result<Vec3, OperatorError> {
    let weighted = centroid_weighted_normals(mesh, star, v, area_threshold);
    let total: f64 = weighted.iter().flatten().map(|(w, _)| w).sum();
    if total == 0.0 {
        return Err(OperatorError::SingularStar { vertex: v });
    }
    let mut sum = Vec3::zeros();
    for (w, n) in weighted.iter().flatten() {
        sum += n * (w / total);
    }
    let len = sum.norm();
    if !(len > 0.0) {
        return Err(OperatorError::AmbiguousNormal { vertex: v });
    }
    Ok(sum / len)
}

/// Centroid-weighted vertex normal: the normalized sum of incident unit face
/// normals, each weighted by the inverse squared distance from `v` to the
/// face centroid.
pub fn vertex_normal(
    mesh: &TriangleMesh,
    star: &VertexStar,
    v: usize,
    config: &LtlConfig,
) -> Result<Vec3, OperatorError> {
    let threshold = config.degenerate_area_rel * mesh.bbox_diagonal().powi(2);
    vertex_normal_with_threshold(mesh, star, v, threshold)
}

/// Frames for all vertices. `e1` is seeded by the first star neighbor whose
/// edge direction is not (nearly) parallel to the normal.
pub fn build_frames(
    mesh: &TriangleMesh,
    adjacency: &Adjacency,
    config: &LtlConfig,
) -> Result<Vec<TangentFrame>, OperatorError> {
    let threshold = config.degenerate_area_rel * mesh.bbox_diagonal().powi(2);
    adjacency
        .stars()
        .iter()
        .enumerate()
        .map(|(v, star)| {
            let normal = vertex_normal_with_threshold(mesh, star, v, threshold)?;
            let center = mesh.vertex(v);
            star.neighbors
                .iter()
                .find_map(|&n| TangentFrame::seeded(normal, &(mesh.vertex(n) - center), config.parallel_tol))
                .ok_or(OperatorError::SingularStar { vertex: v })
        })
        .collect()
}
