use std::fs;
use std::path::PathBuf;

use ltl_core::dsl::{parse, sample_field, FieldExpr};
use ltl_core::mesh::{gen_icosphere, gen_torus, load_mesh, MeshFormat, TriangleMesh};

use crate::output::{sha256_hex, Metadata};
use crate::CliError;

/// Where a mesh comes from: a generator (which keeps the surface parameters
/// `u`, `v`) or a file.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshSource {
    Sphere { subdiv: u32 },
    Torus { a: f64, r: f64, nu: usize, nv: usize },
    File(PathBuf),
}

impl MeshSource {
    /// Reads `sphere:N`, `torus:A,R,NU,NV`, or a path.
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let bad = || CliError::input(format!("malformed generator spec '{spec}'"));
        if let Some(n) = spec.strip_prefix("sphere:") {
            return Ok(MeshSource::Sphere {
                subdiv: n.trim().parse().map_err(|_| bad())?,
            });
        }
        if let Some(rest) = spec.strip_prefix("torus:") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            let [a, r, nu, nv] = parts[..] else {
                return Err(bad());
            };
            return Ok(MeshSource::Torus {
                a: a.parse().map_err(|_| bad())?,
                r: r.parse().map_err(|_| bad())?,
                nu: nu.parse().map_err(|_| bad())?,
                nv: nv.parse().map_err(|_| bad())?,
            });
        }
        Ok(MeshSource::File(PathBuf::from(spec)))
    }

    pub fn load(&self) -> Result<TriangleMesh, CliError> {
        match self {
            MeshSource::Sphere { subdiv } => gen_icosphere(*subdiv).map_err(|e| CliError::input(e.to_string())),
            MeshSource::Torus { a, r, nu, nv } => {
                gen_torus(*a, *r, *nu, *nv).map_err(|e| CliError::input(e.to_string()))
            }
            MeshSource::File(path) => MeshFormat::from_path(path)
                .and_then(|f| load_mesh(path, f))
                .map_err(|e| CliError::input(format!("{}: {e}", path.display()))),
        }
    }

    /// Records the source and, for files, a hash of the file bytes.
    pub fn describe(&self, meta: &mut Metadata) -> Result<(), CliError> {
        match self {
            MeshSource::Sphere { subdiv } => {
                meta.set("mesh.source", format!("sphere:{subdiv}"));
            }
            MeshSource::Torus { a, r, nu, nv } => {
                meta.set("mesh.source", format!("torus:{a:?},{r:?},{nu},{nv}"));
            }
            MeshSource::File(path) => {
                let bytes = fs::read(path)
                    .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
                meta.set("mesh.source", path.display())
                    .set("mesh.sha256", sha256_hex(&bytes));
            }
        }
        Ok(())
    }
}

pub fn mesh_stats(mesh: &TriangleMesh, meta: &mut Metadata) {
    let d = ltl_core::mesh::validate(mesh);
    meta.set("mesh.vertices", d.n_vertices)
        .set("mesh.faces", d.n_faces)
        .set("mesh.euler_characteristic", d.euler_characteristic)
        .set_f64("mesh.min_edge_length", d.min_edge_length)
        .set("mesh.has_parameters", mesh.params().is_some());
}

pub fn parse_expr(flag: &str, text: &str) -> Result<FieldExpr, CliError> {
    parse(text).map_err(|e| CliError::input(format!("--{flag} '{text}': {e}")))
}

pub fn sample(flag: &str, expr: &FieldExpr, mesh: &TriangleMesh) -> Result<Vec<f64>, CliError> {
    sample_field(expr, mesh).map_err(|e| CliError::input(format!("--{flag}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_specs() {
        assert_eq!(MeshSource::parse("sphere:3").unwrap(), MeshSource::Sphere { subdiv: 3 });
        assert_eq!(
            MeshSource::parse("torus:2,1,15,31").unwrap(),
            MeshSource::Torus { a: 2.0, r: 1.0, nu: 15, nv: 31 }
        );
        assert_eq!(MeshSource::parse("a.off").unwrap(), MeshSource::File("a.off".into()));
        assert_eq!(MeshSource::parse("torus:2,1").unwrap_err().code, 2);
        assert_eq!(MeshSource::parse("sphere:x").unwrap_err().code, 2);
    }

    #[test]
    fn generator_preconditions_are_input_errors() {
        let e = MeshSource::parse("torus:1,2,8,8").unwrap().load().unwrap_err();
        assert_eq!(e.code, 2);
        assert_eq!(MeshSource::parse("missing.off").unwrap().load().unwrap_err().code, 2);
    }
}
