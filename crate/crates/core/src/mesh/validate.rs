use std::collections::HashMap;
use std::fmt;

use super::TriangleMesh;

/// Relative area below which a face counts as degenerate, scaled by the
/// squared bounding-box diagonal.
pub const DEGENERATE_AREA_REL: f64 = 1e-12;

/// Defect counts and size statistics for a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshDiagnostics {
    pub n_vertices: usize,
    pub n_faces: usize,
    pub n_edges: usize,
    pub euler_characteristic: i64,
    pub boundary_edges: usize,
    pub non_manifold_edges: usize,
    pub degenerate_faces: usize,
    pub orientation_conflicts: usize,
    pub isolated_vertices: usize,
    pub min_face_area: f64,
    pub max_face_area: f64,
    pub min_edge_length: f64,
}

impl MeshDiagnostics {
    /// Closed, consistently oriented, manifold and free of degenerate faces.
    pub fn is_solver_ready(&self) -> bool {
        self.boundary_edges == 0
            && self.non_manifold_edges == 0
            && self.degenerate_faces == 0
            && self.orientation_conflicts == 0
            && self.isolated_vertices == 0
            && self.n_faces > 0
    }
}

impl fmt::Display for MeshDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices = {}", self.n_vertices)?;
        writeln!(f, "faces = {}", self.n_faces)?;
        writeln!(f, "edges = {}", self.n_edges)?;
        writeln!(f, "euler_characteristic = {}", self.euler_characteristic)?;
        writeln!(f, "boundary_edges = {}", self.boundary_edges)?;
        writeln!(f, "non_manifold_edges = {}", self.non_manifold_edges)?;
        writeln!(f, "degenerate_faces = {}", self.degenerate_faces)?;
        writeln!(f, "orientation_conflicts = {}", self.orientation_conflicts)?;
        writeln!(f, "isolated_vertices = {}", self.isolated_vertices)?;
        writeln!(f, "min_face_area = {}", self.min_face_area)?;
        writeln!(f, "max_face_area = {}", self.max_face_area)?;
        writeln!(f, "min_edge_length = {}", self.min_edge_length)?;
        write!(f, "solver_ready = {}", self.is_solver_ready())
    }
}

/// Computes diagnostics in one pass over the faces. Never fails; defects are
/// counted rather than reported as errors.
pub fn validate(mesh: &TriangleMesh) -> MeshDiagnostics {
    // (faces on edge, faces traversing it low → high)
    let mut edges: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    let mut used = vec![false; mesh.n_vertices()];
    let threshold = DEGENERATE_AREA_REL * mesh.bbox_diagonal().powi(2);
    let mut degenerate_faces = 0;
    let mut min_face_area = f64::INFINITY;
    let mut max_face_area: f64 = 0.0;
    for (fi, f) in mesh.faces().iter().enumerate() {
        let area = mesh.face_area(fi);
        if area < threshold || area == 0.0 {
            degenerate_faces += 1;
        }
        min_face_area = min_face_area.min(area);
        max_face_area = max_face_area.max(area);
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            used[a] = true;
            let entry = edges.entry((a.min(b), a.max(b))).or_default();
            entry.0 += 1;
            if a < b {
                entry.1 += 1;
            }
        }
    }
    let mut boundary_edges = 0;
    let mut non_manifold_edges = 0;
    let mut orientation_conflicts = 0;
    for &(count, forward) in edges.values() {
        match count {
            1 => boundary_edges += 1,
            2 if forward != 1 => orientation_conflicts += 1,
            2 => {}
            _ => non_manifold_edges += 1,
        }
    }
    let n_edges = edges.len();
    MeshDiagnostics {
        n_vertices: mesh.n_vertices(),
        n_faces: mesh.n_faces(),
        n_edges,
        euler_characteristic: mesh.n_vertices() as i64 - n_edges as i64 + mesh.n_faces() as i64,
        boundary_edges,
        non_manifold_edges,
        degenerate_faces,
        orientation_conflicts,
        isolated_vertices: used.iter().filter(|&&u| !u).count(),
        min_face_area: if mesh.n_faces() == 0 { 0.0 } else { min_face_area },
        max_face_area,
        min_edge_length: if mesh.n_faces() == 0 { 0.0 } else { mesh.min_edge_length() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{gen_icosphere, Vec3};

    #[test]
    fn icosphere_is_clean() {
        let d = validate(&gen_icosphere(3).unwrap());
        assert_eq!(d.boundary_edges, 0);
        assert_eq!(d.non_manifold_edges, 0);
        assert_eq!(d.degenerate_faces, 0);
        assert_eq!(d.orientation_conflicts, 0);
        assert!(d.is_solver_ready());
    }

    #[test]
    fn single_triangle_has_three_boundary_edges() {
        let mesh =
            TriangleMesh::new(vec![Vec3::zeros(), Vec3::x(), Vec3::y()], vec![[0, 1, 2]]).unwrap();
        let d = validate(&mesh);
        assert_eq!(d.boundary_edges, 3);
        assert!(!d.is_solver_ready());
        assert!((d.min_face_area - 0.5).abs() < 1e-15);
    }

    #[test]
    fn same_winding_pair_is_one_conflict() {
        // Both faces traverse 0 → 1.
        let mesh = TriangleMesh::new(
            vec![Vec3::zeros(), Vec3::x(), Vec3::y(), -Vec3::y()],
            vec![[0, 1, 2], [0, 1, 3]],
        )
        .unwrap();
        let d = validate(&mesh);
        assert_eq!(d.orientation_conflicts, 1);
        assert_eq!(d.boundary_edges, 4);

        let consistent = TriangleMesh::new(
            vec![Vec3::zeros(), Vec3::x(), Vec3::y(), -Vec3::y()],
            vec![[0, 1, 2], [1, 0, 3]],
        )
        .unwrap();
        assert_eq!(validate(&consistent).orientation_conflicts, 0);
    }

    #[test]
    fn degenerate_face_is_counted() {
        let mesh = TriangleMesh::new(
            vec![Vec3::zeros(), Vec3::x(), Vec3::new(2.0, 0.0, 0.0), Vec3::y()],
            vec![[0, 1, 2], [0, 1, 3]],
        )
        .unwrap();
        assert_eq!(validate(&mesh).degenerate_faces, 1);
    }
}
