//! Declarative catalog files.
//!
//! A catalog file carries software models and task templates in one
//! document, JSON or TOML by extension:
//!
//! ```toml
//! [[software]]
//! name = "myapp"
//! native = [1280, 800]
//! initial_screen = "main"
//! value_vocabulary = ["42"]
//!
//! [[software.screens]]
//! id = "main"
//!
//! [[software.screens.widgets]]
//! id = "field"
//! kind = "text_field"
//! bbox = { x = 80, y = 80, w = 240, h = 48 }
//! label = "Field"
//!
//! [[templates]]
//! id = "myapp/set"
//! software = "myapp"
//! instruction = "Set the field to \"{v}\"."
//! slots = [{ name = "v", domain = "vocab_value" }]
//!
//! [[templates.goal]]
//! atom = "widget_value_equals"
//! widget = "field"
//! value = "{v}"
//! ```
//!
//! Every model is validated on load.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::model::SoftwareModel;
use crate::env::taskgen::TaskTemplate;
use crate::env::EnvError;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CatalogFile {
    #[serde(default)]
    pub software: Vec<SoftwareModel>,
    #[serde(default)]
    pub templates: Vec<TaskTemplate>,
}

/// Load and validate a catalog file (`.json` or `.toml`).
pub fn load_catalog_file(path: &Path) -> Result<CatalogFile, EnvError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| EnvError::CatalogFile(format!("{}: {e}", path.display())))?;
    let file: CatalogFile = match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => toml::from_str(&text)
            .map_err(|e| EnvError::CatalogFile(format!("{}: {e}", path.display())))?,
        _ => serde_json::from_str(&text)
            .map_err(|e| EnvError::CatalogFile(format!("{}: {e}", path.display())))?,
    };
    for model in &file.software {
        model.validate()?;
    }
    Ok(file)
}
