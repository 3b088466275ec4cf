use nalgebra::Vector2;

use super::{LtlConfig, OperatorError, TangentFrame};
use crate::mesh::{TriangleMesh, VertexStar};

pub type Vec2 = Vector2<f64>;

/// A face of the lifted polygon, spanned by the origin and `points[i]`, `points[j]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftedFace {
    pub i: usize,
    pub j: usize,
    /// Centroid weight, normalized over the usable faces; zero when `degenerate`.
    pub weight: f64,
    /// Set when the two lifted edges are (nearly) colinear.
    pub degenerate: bool,
}

/// The one-ring of a vertex projected onto its tangent plane and written in
/// frame coordinates. The center vertex sits at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPolygon {
    pub vertex: usize,
    pub points: Vec<Vec2>,
    pub faces: Vec<LiftedFace>,
}

impl LiftedPolygon {
    pub fn usable_faces(&self) -> impl Iterator<Item = (usize, &LiftedFace)> {
        self.faces.iter().enumerate().filter(|(_, f)| !f.degenerate)
    }

    pub fn has_usable_face(&self) -> bool {
        self.faces.iter().any(|f| !f.degenerate)
    }
}

/// Projects the neighbors of `v` onto the tangent plane of `frame` and
/// assigns each lifted face a weight proportional to the inverse squared
/// norm of its centroid `(ṽᵢ + ṽⱼ)/3`.
pub fn lift_neighborhood(
    mesh: &TriangleMesh,
    star: &VertexStar,
    frame: &TangentFrame,
    v: usize,
    config: &LtlConfig,
) -> LiftedPolygon {
    let center = mesh.vertex(v);
    // The tangential projection has the same (e1, e2) coordinates as the raw
    // edge vector because both basis vectors are orthogonal to the normal.
    let points: Vec<Vec2> = star
        .neighbors
        .iter()
        .map(|&n| frame.coords(&(mesh.vertex(n) - center)))
        .collect();
    let mut faces: Vec<LiftedFace> = star
        .wedges
        .iter()
        .map(|&[i, j]| {
            let (gii, gij, gjj) = gram(&points[i], &points[j]);
            let det = gii * gjj - gij * gij;
            let degenerate = !(det >= config.gram_rel_threshold * gii * gjj) || det == 0.0;
            let weight = if degenerate {
                0.0
            } else {
                1.0 / ((points[i] + points[j]) / 3.0).norm_squared()
            };
            LiftedFace {
                i,
                j,
                weight,
                degenerate,
            }
        })
        .collect();
    let total: f64 = faces.iter().map(|f| f.weight).sum();
    if total > 0.0 {
        for f in &mut faces {
            f.weight /= total;
        }
    }
    LiftedPolygon {
        vertex: v,
        points,
        faces,
    }
}

fn gram(a: &Vec2, b: &Vec2) -> (f64, f64, f64) {
    (a.dot(a), a.dot(b), b.dot(b))
}

/// Gradient at the origin of the affine interpolant on one lifted face.
///
/// Solves the Gram system for `(α, β)` with `∇ = α ṽᵢ + β ṽⱼ`, so that
/// `⟨∇, ṽᵢ⟩ = hᵢ − h₀` and `⟨∇, ṽⱼ⟩ = hⱼ − h₀`.
pub fn face_gradient(
    polygon: &LiftedPolygon,
    face: usize,
    h_center: f64,
    h_i: f64,
    h_j: f64,
) -> Result<Vec2, OperatorError> {
    let f = &polygon.faces[face];
    if f.degenerate {
        return Err(OperatorError::DegenerateFace {
            vertex: polygon.vertex,
            face,
        });
    }
    Ok(gram_solve(
        &polygon.points[f.i],
        &polygon.points[f.j],
        h_i - h_center,
        h_j - h_center,
    ))
}

#[inline]
pub(crate) fn gram_solve(vi: &Vec2, vj: &Vec2, di: f64, dj: f64) -> Vec2 {
    let (gii, gij, gjj) = gram(vi, vj);
    let det = gii * gjj - gij * gij;
    let alpha = (gjj * di - gij * dj) / det;
    let beta = (gii * dj - gij * di) / det;
    vi * alpha + vj * beta
}
