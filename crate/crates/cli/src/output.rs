//! Output directory handling. Files are written whole and their digests
//! recorded for the manifest.

use std::path::{Path, PathBuf};

use serde::Serialize;
use spinpair::Complex64;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub file: String,
    pub sha256: String,
}

pub struct OutputDir {
    root: PathBuf,
    written: Vec<FileDigest>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root)
            .map_err(|e| CliError::Usage(format!("cannot create output directory {}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.root.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(FileDigest {
            file: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Numeric(format!("cannot serialise {name}: {e}")))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn written(&self) -> &[FileDigest] {
        &self.written
    }
}

/// CSV text with a header row; values use the shortest round-trip format.
pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Complex matrix as rows of `[re, im]` pairs.
pub fn complex_matrix<const N: usize>(m: &[[Complex64; N]; N]) -> Vec<Vec<[f64; 2]>> {
    m.iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect()
}
