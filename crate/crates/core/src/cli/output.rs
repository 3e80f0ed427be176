//! Atomic artifact writing and fixed numeric formatting.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

/// 15 significant digits, exponent form, independent of locale.
pub fn num(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Write through a temp file in the target directory, then rename, so the
/// path is either absent or complete.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Files produced by one command, relative to the output directory.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub root: PathBuf,
    pub written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(root: PathBuf) -> Self {
        Self {
            root,
            written: Vec::new(),
        }
    }

    pub fn table(&mut self, name: &str, t: &Table) -> Result<PathBuf> {
        self.raw(&format!("tables/{name}.csv"), t.to_csv().as_bytes())
    }

    pub fn report(&mut self, name: &str, value: &impl Serialize) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.raw(&format!("reports/{name}.json"), text.as_bytes())
    }

    pub fn raw(&mut self, rel: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.root.join(rel);
        write_atomic(&path, bytes)?;
        self.written.push(PathBuf::from(rel));
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(num(1.0), "1.00000000000000e0");
        assert_eq!(num(-0.000123), "-1.23000000000000e-4");
        assert_eq!(opt_num(None), "");
    }

    #[test]
    fn atomic_replace() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a/b.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        let leftovers = std::fs::read_dir(dir.path().join("a")).unwrap().count();
        assert_eq!(leftovers, 1);
    }
}
