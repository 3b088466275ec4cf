//! Discrete gradient and Laplace–Beltrami operators by local tangential lifting.
//!
//! Every vertex gets a tangent frame built from a centroid-weighted normal.
//! Its one-ring is projected onto that plane, a function is interpolated
//! linearly on each lifted face, and the per-face gradients are blended with
//! centroid weights. The Laplacian differentiates the frame coefficients of
//! the neighbors' gradients, after carrying them into the center's tangent
//! plane by an edge-aligned parallel transport, and takes the trace.

mod field;
mod frames;
mod lifting;
mod operator;

pub use field::{VertexScalarField, VertexTangentField};
pub use frames::{build_frames, project_to_plane, vertex_normal, TangentFrame};
pub use lifting::{face_gradient, lift_neighborhood, LiftedFace, LiftedPolygon, Vec2};
pub use operator::{
    gradient_field, laplacian, laplacian_field, parallel_transport, vertex_gradient, LtlOperator,
    TangentVector,
};

use thiserror::Error;

use crate::mesh::MeshError;

/// Numerical thresholds used by the operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtlConfig {
    /// A lifted face is dropped when its Gram determinant falls below this
    /// multiple of `⟨ṽᵢ,ṽᵢ⟩⟨ṽⱼ,ṽⱼ⟩`.
    pub gram_rel_threshold: f64,
    /// Relative tangential length below which an edge counts as parallel to a normal.
    pub parallel_tol: f64,
    /// Faces with area below this multiple of the squared bounding-box
    /// diagonal are ignored when averaging normals.
    pub degenerate_area_rel: f64,
    /// Evaluate whole-field operators with rayon.
    pub parallel: bool,
}

impl Default for LtlConfig {
    fn default() -> Self {
        Self {
            gram_rel_threshold: 1e-14,
            parallel_tol: 1e-8,
            degenerate_area_rel: crate::mesh::DEGENERATE_AREA_REL,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OperatorError {
    #[error("vertex {vertex} lies on the mesh boundary; operators need a closed star")]
    BoundaryVertex { vertex: usize },
    #[error("vertex {vertex} has no usable incident face")]
    SingularStar { vertex: usize },
    #[error("weighted face normals cancel at vertex {vertex}")]
    AmbiguousNormal { vertex: usize },
    #[error("lifted face {face} of vertex {vertex} is degenerate")]
    DegenerateFace { vertex: usize, face: usize },
    #[error("edge ({from}, {to}) is parallel to a vertex normal and no fallback direction works")]
    TransportDegenerate { from: usize, to: usize },
    #[error("vertices {from} and {to} are not adjacent")]
    NotAdjacent { from: usize, to: usize },
    #[error("field has {got} values but the mesh has {expected} vertices")]
    FieldLength { expected: usize, got: usize },
    #[error("field value at vertex {vertex} is not finite")]
    NonFiniteField { vertex: usize },
    #[error("mesh is not solver-ready: {0}")]
    NotSolverReady(String),
    #[error("{count} vertices failed; first: {first}")]
    Aggregate {
        count: usize,
        first: Box<OperatorError>,
        errors: Vec<OperatorError>,
    },
    #[error(transparent)]
    Mesh(#[from] MeshErrorMessage),
}

/// Mesh errors carried inside operator errors (kept as text so the operator
/// error stays `Clone`).
#[derive(Debug, Clone, Error, PartialEq)]
#[error("{0}")]
pub struct MeshErrorMessage(pub String);

impl From<MeshError> for OperatorError {
    fn from(e: MeshError) -> Self {
        OperatorError::Mesh(MeshErrorMessage(e.to_string()))
    }
}

impl OperatorError {
    /// Collapses per-vertex failures into one error, keeping at most 16 of them.
    pub(crate) fn aggregate(mut errors: Vec<OperatorError>) -> Self {
        if errors.len() == 1 {
            return errors.pop().unwrap();
        }
        let count = errors.len();
        errors.truncate(16);
        OperatorError::Aggregate {
            count,
            first: Box::new(errors[0].clone()),
            errors,
        }
    }
}
