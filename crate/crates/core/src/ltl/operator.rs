use nalgebra::Matrix2;
use rayon::prelude::*;

use super::field::check_field;
use super::lifting::gram_solve;
use super::{
    build_frames, lift_neighborhood, LiftedPolygon, LtlConfig, OperatorError, TangentFrame, Vec2,
    VertexScalarField, VertexTangentField,
};
use crate::mesh::{build_adjacency, validate, Adjacency, TriangleMesh, Vec3};

/// A tangent vector at a vertex in frame coefficients and ambient form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub coeffs: Vec2,
    pub ambient: Vec3,
}

/// Centroid-weighted blend of the usable face gradients of `polygon`, for
/// values given at the origin and at each lifted neighbor.
#[inline]
fn blended_gradient(polygon: &LiftedPolygon, center: f64, at_slot: impl Fn(usize) -> f64) -> Vec2 {
    let mut grad = Vec2::zeros();
    for face in polygon.faces.iter().filter(|f| !f.degenerate) {
        let g = gram_solve(
            &polygon.points[face.i],
            &polygon.points[face.j],
            at_slot(face.i) - center,
            at_slot(face.j) - center,
        );
        grad += g * face.weight;
    }
    grad
}

fn closed_star(adjacency: &Adjacency, v: usize) -> Result<(), OperatorError> {
    let star = adjacency.star(v);
    if star.faces.is_empty() {
        return Err(OperatorError::SingularStar { vertex: v });
    }
    if !star.closed {
        return Err(OperatorError::BoundaryVertex { vertex: v });
    }
    Ok(())
}

fn usable_polygon(
    mesh: &TriangleMesh,
    adjacency: &Adjacency,
    frames: &[TangentFrame],
    v: usize,
    config: &LtlConfig,
) -> Result<LiftedPolygon, OperatorError> {
    closed_star(adjacency, v)?;
    let polygon = lift_neighborhood(mesh, adjacency.star(v), &frames[v], v, config);
    if !polygon.has_usable_face() {
        return Err(OperatorError::SingularStar { vertex: v });
    }
    Ok(polygon)
}

/// Discrete gradient of `h` at `v`: the centroid-weighted mean of the lifted
/// per-face gradients, with weights renormalized over non-degenerate faces.
pub fn vertex_gradient(
    mesh: &TriangleMesh,
    adjacency: &Adjacency,
    frames: &[TangentFrame],
    h: &[f64],
    v: usize,
    config: &LtlConfig,
) -> Result<TangentVector, OperatorError> {
    check_field(h, mesh.n_vertices())?;
    let polygon = usable_polygon(mesh, adjacency, frames, v, config)?;
    let star = adjacency.star(v);
    let coeffs = blended_gradient(&polygon, h[v], |k| h[star.neighbors[k]]);
    Ok(TangentVector {
        coeffs,
        ambient: frames[v].ambient(&coeffs),
    })
}

/// Edge-seeded frames at `to` and at `from` used by the transport from
/// `from` to `to`, plus whether the fallback seed was needed.
fn edge_frames(
    mesh: &TriangleMesh,
    adjacency: &Adjacency,
    frames: &[TangentFrame],
    from: usize,
    to: usize,
    parallel_tol: f64,
) -> Result<(TangentFrame, TangentFrame, bool), OperatorError> {
    let star = adjacency.star(to);
    let slot = star
        .slot_of(from)
        .ok_or(OperatorError::NotAdjacent { from, to })?;
    let seeded = |d: &Vec3| {
        Some((
            TangentFrame::seeded(frames[to].normal, d, parallel_tol)?,
            TangentFrame::seeded(frames[from].normal, d, parallel_tol)?,
        ))
    };
    let edge = mesh.vertex(from) - mesh.vertex(to);
    if let Some((at_to, at_from)) = seeded(&edge) {
        return Ok((at_to, at_from, false));
    }
    // The next neighbor in the star shares a face with the edge.
    let n = star.neighbors.len();
    let next = star.neighbors[(slot + 1) % n];
    let fallback = mesh.vertex(next) - mesh.vertex(to);
    seeded(&fallback)
        .map(|(a, b)| (a, b, true))
        .ok_or(OperatorError::TransportDegenerate { from, to })
}

/// Carries a tangent vector `w` at `from` into the tangent plane at `to`.
///
/// Both planes get a basis seeded by the edge direction `from − to`; the
/// coefficients of `w` in the basis at `from` are reused in the basis at `to`.
pub fn parallel_transport(
    mesh: &TriangleMesh,
    adjacency: &Adjacency,
    frames: &[TangentFrame],
    from: usize,
    to: usize,
    w: &Vec3,
    config: &LtlConfig,
) -> Result<Vec3, OperatorError> {
    let (at_to, at_from, _) = edge_frames(mesh, adjacency, frames, from, to, config.parallel_tol)?;
    Ok(at_to.ambient(&at_from.coords(w)))
}

/// Matrix taking frame coefficients at `from` to frame coefficients at `to`.
fn transport_matrix(
    at_to: &TangentFrame,
    at_from: &TangentFrame,
    frame_to: &TangentFrame,
    frame_from: &TangentFrame,
) -> Matrix2<f64> {
    let into_to = Matrix2::new(
        frame_to.e1.dot(&at_to.e1),
        frame_to.e1.dot(&at_to.e2),
        frame_to.e2.dot(&at_to.e1),
        frame_to.e2.dot(&at_to.e2),
    );
    let out_of_from = Matrix2::new(
        at_from.e1.dot(&frame_from.e1),
        at_from.e1.dot(&frame_from.e2),
        at_from.e2.dot(&frame_from.e1),
        at_from.e2.dot(&frame_from.e2),
    );
    into_to * out_of_from
}

/// Trace of the lifted Jacobian of the transported gradient field.
fn trace_of_gradient_jacobian(
    polygon: &LiftedPolygon,
    center: Vec2,
    transported: &[Vec2],
) -> f64 {
    let grad_a = blended_gradient(polygon, center.x, |k| transported[k].x);
    let grad_b = blended_gradient(polygon, center.y, |k| transported[k].y);
    grad_a.x + grad_b.y
}

/// Discrete Laplace–Beltrami operator at `v`.
///
/// Neighbor gradients are transported into the tangent plane at `v`, their
/// frame coefficients `a`, `b` are differentiated on the same lifted polygon
/// with the same weights, and `Δh(v) = a₁₁ + a₂₂`.
pub fn laplacian(
    mesh: &TriangleMesh,
    adjacency: &Adjacency,
    frames: &[TangentFrame],
    h: &[f64],
    v: usize,
    config: &LtlConfig,
) -> Result<f64, OperatorError> {
    let center = vertex_gradient(mesh, adjacency, frames, h, v, config)?;
    let polygon = usable_polygon(mesh, adjacency, frames, v, config)?;
    let star = adjacency.star(v);
    let mut transported = Vec::with_capacity(star.neighbors.len());
    for &n in &star.neighbors {
        let grad = vertex_gradient(mesh, adjacency, frames, h, n, config)?;
        let moved = parallel_transport(mesh, adjacency, frames, n, v, &grad.ambient, config)?;
        transported.push(frames[v].coords(&moved));
    }
    Ok(trace_of_gradient_jacobian(&polygon, center.coeffs, &transported))
}

/// Gradient of `h` at every vertex of a solver-ready mesh.
pub fn gradient_field(
    mesh: &TriangleMesh,
    adjacency: &Adjacency,
    frames: &[TangentFrame],
    h: &[f64],
    config: &LtlConfig,
) -> Result<VertexTangentField, OperatorError> {
    LtlOperator::from_parts(mesh.clone(), adjacency.clone(), frames.to_vec(), *config)?
        .gradient_field(h)
}

/// Laplacian of `h` at every vertex of a solver-ready mesh.
pub fn laplacian_field(
    mesh: &TriangleMesh,
    adjacency: &Adjacency,
    frames: &[TangentFrame],
    h: &[f64],
    config: &LtlConfig,
) -> Result<VertexScalarField, OperatorError> {
    LtlOperator::from_parts(mesh.clone(), adjacency.clone(), frames.to_vec(), *config)?
        .laplacian_field(h)
}

/// Whole-mesh operators with the geometry-only parts (lifted polygons and
/// transport matrices) computed once. The operator itself is applied lazily
/// to each field; no global matrix is assembled.
#[derive(Debug, Clone)]
pub struct LtlOperator {
    mesh: TriangleMesh,
    adjacency: Adjacency,
    frames: Vec<TangentFrame>,
    polygons: Vec<LiftedPolygon>,
    /// Per vertex and neighbor slot: neighbor frame coefficients → own frame coefficients.
    transports: Vec<Vec<Matrix2<f64>>>,
    transport_fallbacks: usize,
    config: LtlConfig,
}

impl LtlOperator {
    pub fn new(mesh: TriangleMesh) -> Result<Self, OperatorError> {
        Self::with_config(mesh, LtlConfig::default())
    }

    pub fn with_config(mesh: TriangleMesh, config: LtlConfig) -> Result<Self, OperatorError> {
        let adjacency = build_adjacency(&mesh)?;
        check_solver_ready(&mesh, &adjacency)?;
        let frames = build_frames(&mesh, &adjacency, &config)?;
        Self::from_parts(mesh, adjacency, frames, config)
    }

    /// Builds the operator around caller-supplied frames (any orthonormal
    /// tangent basis per vertex is accepted).
    pub fn from_parts(
        mesh: TriangleMesh,
        adjacency: Adjacency,
        frames: Vec<TangentFrame>,
        config: LtlConfig,
    ) -> Result<Self, OperatorError> {
        check_solver_ready(&mesh, &adjacency)?;
        if frames.len() != mesh.n_vertices() {
            return Err(OperatorError::FieldLength {
                expected: mesh.n_vertices(),
                got: frames.len(),
            });
        }
        let per_vertex: Vec<Result<(LiftedPolygon, Vec<Matrix2<f64>>, usize), OperatorError>> =
            (0..mesh.n_vertices())
                .into_par_iter()
                .map(|v| {
                    let polygon = usable_polygon(&mesh, &adjacency, &frames, v, &config)?;
                    let mut fallbacks = 0;
                    let mut transports = Vec::with_capacity(adjacency.star(v).valence());
                    for &n in &adjacency.star(v).neighbors {
                        let (at_to, at_from, fell_back) =
                            edge_frames(&mesh, &adjacency, &frames, n, v, config.parallel_tol)?;
                        fallbacks += usize::from(fell_back);
                        transports.push(transport_matrix(&at_to, &at_from, &frames[v], &frames[n]));
                    }
                    Ok((polygon, transports, fallbacks))
                })
                .collect();
        let mut polygons = Vec::with_capacity(mesh.n_vertices());
        let mut transports = Vec::with_capacity(mesh.n_vertices());
        let mut transport_fallbacks = 0;
        let mut errors = Vec::new();
        for result in per_vertex {
            match result {
                Ok((p, t, f)) => {
                    polygons.push(p);
                    transports.push(t);
                    transport_fallbacks += f;
                }
                Err(e) => errors.push(e),
            }
        }
        if !errors.is_empty() {
            return Err(OperatorError::aggregate(errors));
        }
        Ok(Self {
            mesh,
            adjacency,
            frames,
            polygons,
            transports,
            transport_fallbacks,
            config,
        })
    }

    pub fn mesh(&self) -> &TriangleMesh {
        &self.mesh
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    pub fn frames(&self) -> &[TangentFrame] {
        &self.frames
    }

    pub fn polygons(&self) -> &[LiftedPolygon] {
        &self.polygons
    }

    pub fn config(&self) -> &LtlConfig {
        &self.config
    }

    pub fn n_vertices(&self) -> usize {
        self.mesh.n_vertices()
    }

    /// Number of directed edges whose transport frames needed the fallback seed.
    pub fn transport_fallbacks(&self) -> usize {
        self.transport_fallbacks
    }

    /// Runs `f` over all vertices, in parallel when configured. The output
    /// order is the vertex order either way.
    fn map_vertices<T: Send>(&self, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
        if self.config.parallel {
            (0..self.n_vertices()).into_par_iter().map(f).collect()
        } else {
            (0..self.n_vertices()).map(f).collect()
        }
    }

    fn gradient_coeffs_unchecked(&self, h: &[f64]) -> Vec<Vec2> {
        self.map_vertices(|v| {
            let star = self.adjacency.star(v);
            blended_gradient(&self.polygons[v], h[v], |k| h[star.neighbors[k]])
        })
    }

    /// Gradient at every vertex in frame coefficients.
    pub fn gradient_coeffs(&self, h: &[f64]) -> Result<Vec<Vec2>, OperatorError> {
        check_field(h, self.n_vertices())?;
        Ok(self.gradient_coeffs_unchecked(h))
    }

    pub fn gradient_field(&self, h: &[f64]) -> Result<VertexTangentField, OperatorError> {
        let coeffs = self.gradient_coeffs(h)?;
        let ambient = coeffs
            .iter()
            .zip(&self.frames)
            .map(|(c, f)| f.ambient(c))
            .collect();
        Ok(VertexTangentField { coeffs, ambient })
    }

    /// Laplacian from precomputed gradient coefficients.
    pub fn laplacian_from_gradients(&self, grads: &[Vec2]) -> Vec<f64> {
        self.map_vertices(|v| {
            let star = self.adjacency.star(v);
            let transported: Vec<Vec2> = star
                .neighbors
                .iter()
                .zip(&self.transports[v])
                .map(|(&n, m)| m * grads[n])
                .collect();
            trace_of_gradient_jacobian(&self.polygons[v], grads[v], &transported)
        })
    }

    pub fn laplacian_field(&self, h: &[f64]) -> Result<VertexScalarField, OperatorError> {
        let grads = self.gradient_coeffs(h)?;
        Ok(VertexScalarField::from_vec(self.laplacian_from_gradients(&grads)))
    }

    /// Laplacian without re-checking the field; `h` must have one value per vertex.
    pub(crate) fn laplacian_vec(&self, h: &[f64]) -> Vec<f64> {
        debug_assert_eq!(h.len(), self.n_vertices());
        let grads = self.gradient_coeffs_unchecked(h);
        self.laplacian_from_gradients(&grads)
    }
}

fn check_solver_ready(mesh: &TriangleMesh, adjacency: &Adjacency) -> Result<(), OperatorError> {
    if let Some(v) = adjacency.stars().iter().position(|s| !s.closed && !s.faces.is_empty()) {
        return Err(OperatorError::BoundaryVertex { vertex: v });
    }
    let diagnostics = validate(mesh);
    if !diagnostics.is_solver_ready() {
        return Err(OperatorError::NotSolverReady(format!(
            "{} boundary, {} non-manifold, {} degenerate, {} orientation conflicts, {} isolated vertices",
            diagnostics.boundary_edges,
            diagnostics.non_manifold_edges,
            diagnostics.degenerate_faces,
            diagnostics.orientation_conflicts,
            diagnostics.isolated_vertices
        )));
    }
    Ok(())
}
