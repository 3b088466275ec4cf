//! ASCII mesh files.
//!
//! Input: OFF and OBJ, triangles only. Output: OFF, OBJ, and PLY, where PLY
//! carries one `double` vertex property per named scalar field. Coordinates
//! are written in Rust's shortest round-trip notation, so a save/load cycle
//! reproduces every coordinate bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{MeshError, TriangleMesh, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
    Ply,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self, MeshError> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("off") => Ok(Self::Off),
            Some("obj") => Ok(Self::Obj),
            Some("ply") => Ok(Self::Ply),
            _ => Err(MeshError::UnknownFormat(path.display().to_string())),
        }
    }
}

/// A per-vertex scalar field to be attached to an exported mesh.
#[derive(Debug, Clone, Copy)]
pub struct NamedField<'a> {
    pub name: &'a str,
    pub values: &'a [f64],
}

pub fn load_mesh(path: &Path, format: MeshFormat) -> Result<TriangleMesh, MeshError> {
    let text = fs::read_to_string(path)?;
    let name = path.display().to_string();
    match format {
        MeshFormat::Off => parse_off(&text, &name),
        MeshFormat::Obj => parse_obj(&text, &name),
        MeshFormat::Ply => Err(MeshError::WriteOnlyFormat("PLY")),
    }
}

/// Writes `mesh` to `path`. Fields are only stored by the PLY writer.
pub fn save_mesh(
    mesh: &TriangleMesh,
    fields: &[NamedField<'_>],
    path: &Path,
    format: MeshFormat,
) -> Result<(), MeshError> {
    let text = match format {
        MeshFormat::Off => write_off(mesh),
        MeshFormat::Obj => write_obj(mesh),
        MeshFormat::Ply => write_ply(mesh, fields)?,
    };
    fs::write(path, text)?;
    Ok(())
}

pub fn write_off(mesh: &TriangleMesh) -> String {
    let mut out = String::new();
    out.push_str("OFF\n");
    let _ = writeln!(out, "{} {} 0", mesh.n_vertices(), mesh.n_faces());
    for p in mesh.vertices() {
        let _ = writeln!(out, "{:?} {:?} {:?}", p.x, p.y, p.z);
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "3 {} {} {}", f[0], f[1], f[2]);
    }
    out
}

pub fn write_obj(mesh: &TriangleMesh) -> String {
    let mut out = String::new();
    for p in mesh.vertices() {
        let _ = writeln!(out, "v {:?} {:?} {:?}", p.x, p.y, p.z);
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

pub fn write_ply(mesh: &TriangleMesh, fields: &[NamedField<'_>]) -> Result<String, MeshError> {
    let mut names = Vec::with_capacity(fields.len());
    for field in fields {
        if field.values.len() != mesh.n_vertices() {
            return Err(MeshError::FieldLength {
                name: field.name.to_string(),
                expected: mesh.n_vertices(),
                got: field.values.len(),
            });
        }
        names.push(field.name.to_ascii_lowercase());
    }
    let mut out = String::new();
    out.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(out, "element vertex {}", mesh.n_vertices());
    out.push_str("property double x\nproperty double y\nproperty double z\n");
    for name in &names {
        let _ = writeln!(out, "property double {name}");
    }
    let _ = writeln!(out, "element face {}", mesh.n_faces());
    out.push_str("property list uchar int vertex_indices\nend_header\n");
    for (v, p) in mesh.vertices().iter().enumerate() {
        let _ = write!(out, "{:?} {:?} {:?}", p.x, p.y, p.z);
        for field in fields {
            let _ = write!(out, " {:?}", field.values[v]);
        }
        out.push('\n');
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "3 {} {} {}", f[0], f[1], f[2]);
    }
    Ok(out)
}

/// Non-empty lines with `#` comments removed, tagged with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_err(path: &str, line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

fn parse_coord(tok: Option<&str>, path: &str, line: usize) -> Result<f64, MeshError> {
    let tok = tok.ok_or_else(|| parse_err(path, line, "expected a coordinate"))?;
    let value: f64 = tok
        .parse()
        .map_err(|_| parse_err(path, line, format!("invalid number '{tok}'")))?;
    if !value.is_finite() {
        return Err(parse_err(path, line, format!("non-finite coordinate '{tok}'")));
    }
    Ok(value)
}

fn parse_count(tok: Option<&str>, what: &str, path: &str, line: usize) -> Result<usize, MeshError> {
    let tok = tok.ok_or_else(|| parse_err(path, line, format!("expected {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(path, line, format!("invalid {what} '{tok}'")))
}

pub fn parse_off(text: &str, path: &str) -> Result<TriangleMesh, MeshError> {
    let mut lines = content_lines(text);
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let mut header_tokens = header.split_whitespace();
    if header_tokens.next() != Some("OFF") {
        return Err(parse_err(path, header_line, "missing OFF header"));
    }
    // Counts may follow the keyword on the same line.
    let mut rest: Vec<&str> = header_tokens.collect();
    let mut counts_line = header_line;
    if rest.is_empty() {
        let (n, line) = lines
            .next()
            .ok_or_else(|| parse_err(path, header_line, "missing element counts"))?;
        counts_line = n;
        rest = line.split_whitespace().collect();
    }
    let mut it = rest.into_iter();
    let n_vertices = parse_count(it.next(), "vertex count", path, counts_line)?;
    let n_faces = parse_count(it.next(), "face count", path, counts_line)?;

    let mut vertices = Vec::with_capacity(n_vertices);
    for _ in 0..n_vertices {
        let (n, line) = lines
            .next()
            .ok_or_else(|| parse_err(path, counts_line, "unexpected end of file in vertex list"))?;
        let mut t = line.split_whitespace();
        let x = parse_coord(t.next(), path, n)?;
        let y = parse_coord(t.next(), path, n)?;
        let z = parse_coord(t.next(), path, n)?;
        vertices.push(Vec3::new(x, y, z));
    }
    let mut faces = Vec::with_capacity(n_faces);
    for _ in 0..n_faces {
        let (n, line) = lines
            .next()
            .ok_or_else(|| parse_err(path, counts_line, "unexpected end of file in face list"))?;
        let mut t = line.split_whitespace();
        let arity = parse_count(t.next(), "face arity", path, n)?;
        if arity != 3 {
            return Err(MeshError::UnsupportedElement {
                path: path.to_string(),
                line: n,
                message: format!("face with {arity} vertices (only triangles are supported)"),
            });
        }
        let mut f = [0usize; 3];
        for slot in &mut f {
            *slot = parse_count(t.next(), "vertex index", path, n)?;
        }
        faces.push(f);
    }
    TriangleMesh::new(vertices, faces)
}

pub fn parse_obj(text: &str, path: &str) -> Result<TriangleMesh, MeshError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (n, line) in content_lines(text) {
        let mut t = line.split_whitespace();
        match t.next() {
            Some("v") => {
                let x = parse_coord(t.next(), path, n)?;
                let y = parse_coord(t.next(), path, n)?;
                let z = parse_coord(t.next(), path, n)?;
                vertices.push(Vec3::new(x, y, z));
            }
            Some("f") => {
                let corners: Vec<&str> = t.collect();
                if corners.len() != 3 {
                    return Err(MeshError::UnsupportedElement {
                        path: path.to_string(),
                        line: n,
                        message: format!(
                            "face with {} vertices (only triangles are supported)",
                            corners.len()
                        ),
                    });
                }
                let mut f = [0usize; 3];
                for (slot, corner) in f.iter_mut().zip(corners) {
                    let idx = corner.split('/').next().unwrap_or("");
                    let i: i64 = idx
                        .parse()
                        .map_err(|_| parse_err(path, n, format!("invalid face index '{corner}'")))?;
                    // Negative indices count back from the most recent vertex.
                    let resolved = if i > 0 {
                        i - 1
                    } else if i < 0 {
                        vertices.len() as i64 + i
                    } else {
                        -1
                    };
                    if resolved < 0 {
                        return Err(parse_err(path, n, format!("invalid face index '{corner}'")));
                    }
                    *slot = resolved as usize;
                }
                faces.push(f);
            }
            Some("vn" | "vt" | "vp" | "o" | "g" | "s" | "usemtl" | "mtllib") => {}
            Some("l" | "p" | "curv" | "surf") => {
                return Err(MeshError::UnsupportedElement {
                    path: path.to_string(),
                    line: n,
                    message: format!("'{}' elements", line.split_whitespace().next().unwrap()),
                });
            }
            Some(other) => {
                return Err(parse_err(path, n, format!("unknown keyword '{other}'")));
            }
            None => {}
        }
    }
    TriangleMesh::new(vertices, faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::gen_icosphere;

    fn tetrahedron() -> TriangleMesh {
        TriangleMesh::new(
            vec![
                Vec3::new(1.0, 1.0, 1.0),
                Vec3::new(1.0, -1.0, -1.0),
                Vec3::new(-1.0, 1.0, -1.0),
                Vec3::new(-1.0, -1.0, 1.0 / 3.0),
            ],
            vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]],
        )
        .unwrap()
    }

    #[test]
    fn off_and_obj_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for mesh in [tetrahedron(), gen_icosphere(2).unwrap()] {
            for (name, format) in [("m.off", MeshFormat::Off), ("m.obj", MeshFormat::Obj)] {
                let path = dir.path().join(name);
                save_mesh(&mesh, &[], &path, format).unwrap();
                let back = load_mesh(&path, format).unwrap();
                assert_eq!(back.faces(), mesh.faces());
                assert_eq!(back.vertices(), mesh.vertices());
            }
        }
    }

    #[test]
    fn obj_quad_is_unsupported() {
        let text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
        match parse_obj(text, "quad.obj") {
            Err(MeshError::UnsupportedElement { line: 5, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn obj_slash_and_negative_indices() {
        let text = "# tri\nv 0 0 0\nv 1 0 0\nvt 0 0\nv 0 1 0\nf -3/1 2/1/1 3//1\n";
        let mesh = parse_obj(text, "t.obj").unwrap();
        assert_eq!(mesh.faces(), &[[0, 1, 2]]);
    }

    #[test]
    fn malformed_off_reports_line() {
        let text = "OFF\n3 1 0\n0 0 0\n1 0 zero\n0 1 0\n3 0 1 2\n";
        match parse_off(text, "bad.off") {
            Err(MeshError::Parse { line: 4, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let quad = "OFF 4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        assert!(matches!(
            parse_off(quad, "quad.off"),
            Err(MeshError::UnsupportedElement { line: 6, .. })
        ));
    }

    #[test]
    fn ply_declares_one_property_per_field() {
        let mesh = tetrahedron();
        let u = [0.5, 1.0, 1.5, 2.0];
        let text = write_ply(&mesh, &[NamedField { name: "U", values: &u }]).unwrap();
        let header: Vec<&str> = text.lines().take_while(|l| *l != "end_header").collect();
        let props: Vec<&&str> = header.iter().filter(|l| l.starts_with("property double")).collect();
        assert_eq!(props.len(), 4);
        assert_eq!(*props[3], "property double u");
        assert!(header.contains(&"element vertex 4"));
        let first_vertex = text.lines().nth(header.len() + 1).unwrap();
        assert_eq!(first_vertex, "1.0 1.0 1.0 0.5");
    }

    #[test]
    fn ply_rejects_misaligned_field() {
        let mesh = tetrahedron();
        let err = write_ply(&mesh, &[NamedField { name: "u", values: &[1.0] }]).unwrap_err();
        assert!(matches!(err, MeshError::FieldLength { expected: 4, got: 1, .. }));
    }
}
