//! Loading a template descriptor with its ontologies, tables and registry.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use ontopop_core::expansion::MintRegistry;
use ontopop_core::io::load_sources;
use ontopop_core::pattern::ColumnBinding;
use ontopop_core::template::{load_csv, parse_descriptor, TableDoc, TemplateDescriptor};
use ontopop_core::validation::{validate_table, GraphSet, RangeCache, ValidatedTable};

/// A file or parse problem, reported with exit status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, text: &str) -> Result<(), InputError> {
    fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

pub struct Project {
    pub descriptor: TemplateDescriptor,
    pub graphs: GraphSet,
    pub cache: RangeCache,
}

impl Project {
    /// Ontology paths in the descriptor resolve relative to its directory.
    pub fn load(descriptor_path: &Path) -> Result<Self, InputError> {
        let text = read(descriptor_path)?;
        let descriptor =
            parse_descriptor(&text).map_err(|e| InputError(format!("{}: {e}", descriptor_path.display())))?;
        let base = descriptor_path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        let (graphs, warnings) =
            load_sources(&descriptor.ontology_sources, &base).map_err(|e| InputError(e.to_string()))?;
        if !warnings.is_empty() {
            eprintln!("{} ontology warning(s)", warnings.len());
        }
        Ok(Project {
            descriptor,
            graphs,
            cache: RangeCache::new(),
        })
    }

    pub fn load_table(&self, path: &Path) -> Result<TableDoc, InputError> {
        let text = read(path)?;
        load_csv(&text, &self.descriptor).map_err(|e| InputError(format!("{}: {e}", path.display())))
    }

    pub fn empty_table(&self) -> TableDoc {
        TableDoc::new(self.descriptor.columns.iter().map(|c| c.name.clone()).collect())
    }

    pub fn validate(&self, table: &TableDoc) -> Result<ValidatedTable, InputError> {
        validate_table(table, &self.descriptor, &self.graphs, &self.cache).map_err(|e| InputError(e.to_string()))
    }
}

pub fn load_registry(path: &Path) -> Result<MintRegistry, InputError> {
    MintRegistry::from_json(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

pub fn load_binding(path: &Path) -> Result<ColumnBinding, InputError> {
    ColumnBinding::parse_json(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

/// Spreadsheet-style reference, e.g. `A5` for the first column of the
/// fifth data row.
pub fn cell_ref(col: usize, row: usize) -> String {
    let mut letters = Vec::new();
    let mut n = col + 1;
    while n > 0 {
        let rem = (n - 1) % 26;
        letters.push(b'A' + rem as u8);
        n = (n - 1) / 26;
    }
    letters.reverse();
    format!("{}{}", String::from_utf8(letters).unwrap(), row + 1)
}

#[cfg(test)]
mod tests {
    use super::cell_ref;

    #[test]
    fn refs() {
        assert_eq!(cell_ref(0, 4), "A5");
        assert_eq!(cell_ref(25, 0), "Z1");
        assert_eq!(cell_ref(26, 0), "AA1");
    }
}
