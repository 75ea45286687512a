//! Run manifests: a JSON index of layer weight files.
//!
//! Schema (`format_version` 1):
//!
//! ```json
//! {
//!   "model": "toy-net",
//!   "format_version": 1,
//!   "seed": 7,
//!   "layers": [
//!     { "name": "layer0", "file": "layer0.npy", "rows": 256, "cols": 256, "bits": 4 }
//!   ]
//! }
//! ```
//!
//! Layer `file` paths are resolved relative to the manifest's directory.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MANIFEST_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerEntry {
    pub name: String,
    pub file: String,
    pub rows: usize,
    pub cols: usize,
    pub bits: u8,
}

impl LayerEntry {
    /// Resolves the weight file against the manifest's directory.
    pub fn resolve(&self, base: &Path) -> PathBuf {
        base.join(&self.file)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub model: String,
    pub format_version: u32,
    pub seed: u64,
    pub layers: Vec<LayerEntry>,
}

impl Manifest {
    /// Loads and validates a manifest: version 1, unique layer names, and
    /// every referenced file present next to the manifest.
    pub fn load(path: impl AsRef<Path>) -> Result<Manifest> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
        manifest.validate(path.parent().unwrap_or_else(|| Path::new(".")))?;
        Ok(manifest)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    fn validate(&self, base: &Path) -> Result<()> {
        if self.format_version != MANIFEST_FORMAT_VERSION {
            return Err(Error::unsupported(format!(
                "manifest format_version {} (expected {MANIFEST_FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.layers.is_empty() {
            return Err(Error::validation("manifest lists no layers".to_string()));
        }
        let mut seen = HashSet::new();
        for layer in &self.layers {
            if !seen.insert(layer.name.as_str()) {
                return Err(Error::validation(format!("duplicate layer name '{}'", layer.name)));
            }
            let file = layer.resolve(base);
            if !file.is_file() {
                return Err(Error::validation(format!(
                    "layer '{}': weight file {} does not exist",
                    layer.name,
                    file.display()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::npy::save_npy;
    use crate::tensor::Tensor2D;

    fn write_manifest(dir: &Path, layers: Vec<LayerEntry>) -> PathBuf {
        let m = Manifest {
            model: "test".to_string(),
            format_version: 1,
            seed: 1,
            layers,
        };
        let path = dir.join("manifest.json");
        m.save(&path).unwrap();
        path
    }

    #[test]
    fn load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t = Tensor2D::new(2, 2, vec![1.0; 4]).unwrap();
        save_npy(&t, dir.path().join("w.npy")).unwrap();
        let path = write_manifest(
            dir.path(),
            vec![LayerEntry { name: "l0".into(), file: "w.npy".into(), rows: 2, cols: 2, bits: 4 }],
        );
        let m = Manifest::load(&path).unwrap();
        assert_eq!(m.layers.len(), 1);
        assert_eq!(m.layers[0].name, "l0");
    }

    #[test]
    fn duplicate_names_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let t = Tensor2D::new(2, 2, vec![1.0; 4]).unwrap();
        save_npy(&t, dir.path().join("w.npy")).unwrap();
        let entry =
            LayerEntry { name: "l0".into(), file: "w.npy".into(), rows: 2, cols: 2, bits: 4 };
        let path = write_manifest(dir.path(), vec![entry.clone(), entry]);
        assert!(matches!(Manifest::load(&path), Err(Error::Validation(_))));
    }

    #[test]
    fn missing_file_names_the_layer() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_manifest(
            dir.path(),
            vec![LayerEntry {
                name: "ghost".into(),
                file: "missing.npy".into(),
                rows: 2,
                cols: 2,
                bits: 4,
            }],
        );
        let err = Manifest::load(&path).unwrap_err();
        assert!(err.to_string().contains("ghost"), "{err}");
    }

    #[test]
    fn corrupt_json_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        std::fs::write(&path, "{not json").unwrap();
        assert!(matches!(Manifest::load(&path), Err(Error::Format(_))));
    }

    #[test]
    fn wrong_version_is_unsupported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        std::fs::write(
            &path,
            r#"{"model":"m","format_version":2,"seed":0,"layers":[]}"#,
        )
        .unwrap();
        assert!(matches!(Manifest::load(&path), Err(Error::Unsupported(_))));
    }
}
