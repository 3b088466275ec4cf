//! Run directories: field files, traces, metadata and their hashes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ltl_core::mesh::{io::write_ply, NamedField, TriangleMesh};
use sha2::{Digest, Sha256};

use crate::args::SnapshotFormat;
use crate::CliError;

pub const METADATA_FILE: &str = "metadata.txt";
pub const TIMINGS_FILE: &str = "timings.txt";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes files into one directory and remembers their hashes.
#[derive(Debug)]
pub struct RunDir {
    root: PathBuf,
    hashes: BTreeMap<String, String>,
}

impl RunDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root)
            .map_err(|e| CliError::input(format!("cannot create {}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
            hashes: BTreeMap::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.root.join(name);
        fs::write(&path, contents)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
        self.hashes.insert(name.to_string(), sha256_hex(contents.as_bytes()));
        Ok(())
    }

    /// Writes a file that is not part of the reproducible output.
    pub fn write_unhashed(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.root.join(name);
        fs::write(&path, contents)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
    }

    pub fn hashes(&self) -> &BTreeMap<String, String> {
        &self.hashes
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Writes `metadata.txt` with every hash recorded so far appended.
    pub fn finish(&mut self, metadata: &Metadata) -> Result<(), CliError> {
        let mut text = metadata.render();
        for (name, hash) in &self.hashes {
            let _ = writeln!(text, "output.{name}.sha256 = {hash}");
        }
        self.write(METADATA_FILE, &text)
    }
}

/// Ordered `key = value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn set_f64(&mut self, key: &str, value: f64) -> &mut Self {
        self.set(key, format!("{value:?}"))
    }

    pub fn render(&self) -> String {
        let mut out = String::from("# schema = ltl-metadata/1\n");
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

/// A mesh with per-vertex fields, as PLY properties or CSV columns.
pub fn field_file(
    mesh: &TriangleMesh,
    fields: &[NamedField<'_>],
    format: SnapshotFormat,
) -> Result<String, CliError> {
    match format {
        SnapshotFormat::Ply => write_ply(mesh, fields).map_err(|e| CliError::input(e.to_string())),
        SnapshotFormat::Csv => {
            let mut out = String::from("# schema = ltl-field/1\nvertex,x,y,z");
            for f in fields {
                let _ = write!(out, ",{}", f.name);
            }
            out.push('\n');
            for (v, p) in mesh.vertices().iter().enumerate() {
                let _ = write!(out, "{v},{:?},{:?},{:?}", p.x, p.y, p.z);
                for f in fields {
                    let _ = write!(out, ",{:?}", f.values[v]);
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}
