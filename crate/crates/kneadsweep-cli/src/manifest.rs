//! Reproduction manifests written beside every artifact.

use std::path::{Path, PathBuf};

use kneadsweep::container::write_atomic;

use crate::error::AppError;

/// Provenance record; identical config_hash implies identical data bytes.
pub struct RunManifest {
    pub config_hash: u64,
    pub wall_time: f64,
    pub worker_count: usize,
}

impl RunManifest {
    pub fn render(&self) -> String {
        format!(
            "config_hash={:016x}\ntool_version={}\nwall_time={:.3}\nworker_count={}\n",
            self.config_hash,
            env!("CARGO_PKG_VERSION"),
            self.wall_time,
            self.worker_count
        )
    }

    /// Writes `<artifact>.manifest` next to the artifact, atomically.
    pub fn write_beside(&self, artifact: &Path) -> Result<PathBuf, AppError> {
        let mut name = artifact.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest");
        let path = artifact.with_file_name(name);
        write_atomic(&path, self.render().as_bytes())?;
        Ok(path)
    }
}
