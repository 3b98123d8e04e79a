//! Catalog file: one JSON object per line describing a UI element.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use flowboat_core::catalog::{Catalog, CatalogError, UiElement};

use crate::records::split_lines;

#[derive(Debug, thiserror::Error)]
pub enum CatalogLoadError {
    #[error("cannot read catalog {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("catalog line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] CatalogError),
}

pub fn parse_catalog(bytes: &[u8]) -> Result<Catalog, CatalogLoadError> {
    let mut elements = Vec::new();
    for (idx, line) in split_lines(bytes).enumerate() {
        let parse_err = |message: String| CatalogLoadError::Parse { line: idx + 1, message };
        let line = line.map_err(|e| parse_err(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let element: UiElement = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
        elements.push(element);
    }
    Ok(Catalog::from_elements(elements)?)
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<Catalog, CatalogLoadError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| CatalogLoadError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_catalog(&bytes)
}

pub fn render_catalog<'a>(elements: impl IntoIterator<Item = &'a UiElement>) -> String {
    let mut out = String::new();
    for e in elements {
        out.push_str(&serde_json::to_string(e).expect("catalog entries serialize"));
        out.push('\n');
    }
    out
}

/// Shared catalog that can be swapped as a whole while readers hold the
/// previous version.
#[derive(Clone, Default)]
pub struct CatalogHandle(Arc<RwLock<Arc<Catalog>>>);

impl CatalogHandle {
    pub fn new(catalog: Catalog) -> Self {
        Self(Arc::new(RwLock::new(Arc::new(catalog))))
    }

    pub fn current(&self) -> Arc<Catalog> {
        self.0.read().unwrap().clone()
    }

    pub fn replace(&self, catalog: Catalog) -> usize {
        let n = catalog.len();
        *self.0.write().unwrap() = Arc::new(catalog);
        n
    }
}
