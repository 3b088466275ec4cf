//! Indexed triangle meshes: representation, one-ring adjacency, generators,
//! file I/O and validity diagnostics.

mod adjacency;
mod generators;
pub mod io;
mod validate;

pub use adjacency::{build_adjacency, Adjacency, VertexStar};
pub use generators::{gen_icosphere, gen_torus, MAX_ICOSPHERE_SUBDIVISIONS};
pub use io::{load_mesh, save_mesh, MeshFormat, NamedField};
pub use validate::{validate, MeshDiagnostics, DEGENERATE_AREA_REL};

use nalgebra::Vector3;
use thiserror::Error;

pub type Vec3 = Vector3<f64>;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("face {face} references vertex {index}, but the mesh has {n_vertices} vertices")]
    IndexOutOfRange {
        face: usize,
        index: usize,
        n_vertices: usize,
    },
    #[error("face {face} repeats vertex {index}")]
    RepeatedIndex { face: usize, index: usize },
    #[error("vertex {vertex} has a non-finite coordinate")]
    NonFiniteVertex { vertex: usize },
    #[error("parameter list has {got} entries but the mesh has {expected} vertices")]
    ParameterCount { expected: usize, got: usize },
    #[error("edge ({a}, {b}) is shared by {count} faces")]
    NonManifoldEdge { a: usize, b: usize, count: usize },
    #[error("directed edge ({a}, {b}) is traversed by two faces; winding is inconsistent")]
    InconsistentOrientation { a: usize, b: usize },
    #[error("the faces around vertex {vertex} do not form a single fan")]
    NonManifoldVertex { vertex: usize },
    #[error("icosphere subdivision level {requested} exceeds the cap of {cap}")]
    SubdivisionCap { requested: u32, cap: u32 },
    #[error("invalid torus geometry: {0}")]
    TorusGeometry(String),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: unsupported element: {message}")]
    UnsupportedElement {
        path: String,
        line: usize,
        message: String,
    },
    #[error("unknown mesh format for '{0}' (expected .off, .obj or .ply)")]
    UnknownFormat(String),
    #[error("{0} is write-only")]
    WriteOnlyFormat(&'static str),
    #[error("field '{name}' has {got} values but the mesh has {expected} vertices")]
    FieldLength {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An indexed triangle mesh with counterclockwise (outward) face winding.
///
/// Surfaces generated from a parametrization keep the parameter pair of each
/// vertex in `params` so that analytic fields can be evaluated without
/// inverting the embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
    params: Option<Vec<[f64; 2]>>,
}

impl TriangleMesh {
    /// Builds a mesh after checking index validity and finite positions.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let n = vertices.len();
        if let Some(vertex) = vertices.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(MeshError::NonFiniteVertex { vertex });
        }
        for (fi, f) in faces.iter().enumerate() {
            for &index in f {
                if index >= n {
                    return Err(MeshError::IndexOutOfRange {
                        face: fi,
                        index,
                        n_vertices: n,
                    });
                }
            }
            if f[0] == f[1] || f[0] == f[2] {
                return Err(MeshError::RepeatedIndex { face: fi, index: f[0] });
            }
            if f[1] == f[2] {
                return Err(MeshError::RepeatedIndex { face: fi, index: f[1] });
            }
        }
        Ok(Self {
            vertices,
            faces,
            params: None,
        })
    }

    /// Attaches per-vertex parameter coordinates `(u, v)`.
    pub fn with_params(mut self, params: Vec<[f64; 2]>) -> Result<Self, MeshError> {
        if params.len() != self.vertices.len() {
            return Err(MeshError::ParameterCount {
                expected: self.vertices.len(),
                got: params.len(),
            });
        }
        self.params = Some(params);
        Ok(self)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn params(&self) -> Option<&[[f64; 2]]> {
        self.params.as_deref()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex(&self, v: usize) -> Vec3 {
        self.vertices[v]
    }

    /// Unnormalized face normal `(b - a) × (c - a)`; its length is twice the area.
    pub fn face_cross(&self, f: usize) -> Vec3 {
        let [a, b, c] = self.faces[f];
        let pa = self.vertices[a];
        (self.vertices[b] - pa).cross(&(self.vertices[c] - pa))
    }

    pub fn face_area(&self, f: usize) -> f64 {
        0.5 * self.face_cross(f).norm()
    }

    /// Length of the bounding-box diagonal.
    pub fn bbox_diagonal(&self) -> f64 {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for p in &self.vertices {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        if self.vertices.is_empty() {
            0.0
        } else {
            (hi - lo).norm()
        }
    }

    /// Shortest edge length over all faces.
    pub fn min_edge_length(&self) -> f64 {
        self.faces
            .iter()
            .flat_map(|f| {
                (0..3).map(move |k| (f[k], f[(k + 1) % 3]))
            })
            .map(|(a, b)| (self.vertices[a] - self.vertices[b]).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Applies `map` to every vertex position, keeping connectivity and parameters.
    pub fn map_vertices(&self, map: impl Fn(&Vec3) -> Vec3) -> Self {
        Self {
            vertices: self.vertices.iter().map(map).collect(),
            faces: self.faces.clone(),
            params: self.params.clone(),
        }
    }
}
